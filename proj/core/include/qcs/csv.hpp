#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

namespace qcs {

using Cell = std::variant<std::int64_t, double, std::string>;
using Row = std::vector<Cell>;

/// Nine significant digits, shortest of fixed/exponent ("%.9g").
std::string format_decimal(double value);
std::string format_cell(const Cell& cell);

/// Header row then one line per row, comma separated, LF endings. Throws
/// InvalidArgument if a row width differs from the schema.
void write_csv(std::ostream& out, const std::vector<std::string>& schema, const std::vector<Row>& rows);

/// Lowercase hex SHA-256 of a byte string.
std::string sha256_hex(const std::string& bytes);

}  // namespace qcs

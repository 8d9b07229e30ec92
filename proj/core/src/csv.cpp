#include "qcs/csv.hpp"

#include <array>
#include <cstdio>
#include <ostream>

#include <openssl/evp.h>

#include "qcs/error.hpp"

namespace qcs {

std::string format_decimal(double value) {
  std::array<char, 64> buf{};
  const int len = std::snprintf(buf.data(), buf.size(), "%.9g", value);
  return std::string(buf.data(), static_cast<std::size_t>(len));
}

std::string format_cell(const Cell& cell) {
  if (const auto* i = std::get_if<std::int64_t>(&cell)) return std::to_string(*i);
  if (const auto* d = std::get_if<double>(&cell)) return format_decimal(*d);
  return std::get<std::string>(cell);
}

void write_csv(std::ostream& out, const std::vector<std::string>& schema, const std::vector<Row>& rows) {
  for (std::size_t c = 0; c < schema.size(); ++c) out << (c ? "," : "") << schema[c];
  out << '\n';
  for (const Row& row : rows) {
    require(row.size() == schema.size(), ErrorCode::InvalidArgument,
            "row has " + std::to_string(row.size()) + " cells, schema has " + std::to_string(schema.size()));
    for (std::size_t c = 0; c < row.size(); ++c) out << (c ? "," : "") << format_cell(row[c]);
    out << '\n';
  }
}

std::string sha256_hex(const std::string& bytes) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int len = 0;
  require(EVP_Digest(bytes.data(), bytes.size(), digest.data(), &len, EVP_sha256(), nullptr) == 1, ErrorCode::Io,
          "SHA-256 computation failed");
  static constexpr char kHex[] = "0123456789abcdef";
  std::string hex;
  hex.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    hex.push_back(kHex[digest[i] >> 4]);
    hex.push_back(kHex[digest[i] & 0xf]);
  }
  return hex;
}

}  // namespace qcs

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>

#include "qcs/error.hpp"
#include "qcs/frontend.hpp"

namespace qcs {

namespace {

constexpr std::string_view kHeader = "# span_ps=";

std::int64_t parse_int(std::string_view text, std::size_t line_no) {
  std::int64_t value = 0;
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  require(ec == std::errc{} && ptr == end && value >= 0 && !text.empty(), ErrorCode::ParseError,
          "line " + std::to_string(line_no) + ": expected an unsigned decimal integer, got '" + std::string(text) + "'");
  return value;
}

}  // namespace

void write_photon_stream(std::ostream& out, const PhotonStream& stream) {
  stream.validate();
  out << kHeader << stream.span_ps << '\n';
  for (std::int64_t t : stream.timestamps_ps) out << t << '\n';
}

PhotonStream read_photon_stream(std::istream& in) {
  PhotonStream stream;
  std::string line;
  require(static_cast<bool>(std::getline(in, line)), ErrorCode::ParseError, "missing header line");
  require(line.rfind(kHeader, 0) == 0, ErrorCode::ParseError, "header must start with '# span_ps='");
  stream.span_ps = parse_int(std::string_view(line).substr(kHeader.size()), 1);
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    stream.timestamps_ps.push_back(parse_int(line, line_no));
  }
  stream.validate();
  return stream;
}

void save_photon_stream(const std::string& path, const PhotonStream& stream) {
  std::ofstream out(path, std::ios::binary);
  require(out.good(), ErrorCode::Io, "cannot open " + path + " for writing");
  write_photon_stream(out, stream);
  require(out.good(), ErrorCode::Io, "write failed for " + path);
}

PhotonStream load_photon_stream(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), ErrorCode::Io, "cannot open " + path);
  return read_photon_stream(in);
}

}  // namespace qcs

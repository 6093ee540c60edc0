#include "file_header.hpp"

#include <fmt/format.h>

#include <charconv>
#include <fstream>
#include <iterator>

namespace dmri::detail {

std::vector<std::uint8_t> read_file(std::filesystem::path const &path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError(fmt::format("cannot open {} for reading", path.string()));
  }
  std::vector<std::uint8_t> bytes{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  if (in.bad()) {
    throw IoError(fmt::format("read failed on {}", path.string()));
  }
  return bytes;
}

void write_file(std::filesystem::path const &path, std::vector<std::uint8_t> const &bytes)
{
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw IoError(fmt::format("cannot open {} for writing", path.string()));
  }
  out.write(reinterpret_cast<char const *>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) {
    throw IoError(fmt::format("write failed on {}", path.string()));
  }
}

void put_header(std::vector<std::uint8_t> &out, std::string_view magic, Shape const &shape)
{
  out.insert(out.end(), magic.begin(), magic.end());
  auto const line = fmt::format("{} {} {}\n", shape.frames, shape.rows, shape.cols);
  out.insert(out.end(), line.begin(), line.end());
}

namespace {

std::size_t parse_dimension(std::string_view field, std::string_view line)
{
  bool const digits_only =
    !field.empty() && field.find_first_not_of("0123456789") == std::string_view::npos;
  std::size_t value = 0;
  auto const [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (!digits_only || ec != std::errc{} || ptr != field.data() + field.size() || value == 0 ||
      (field.size() > 1 && field.front() == '0')) {
    throw FormatError(FormatFault::MalformedHeader, fmt::format("malformed header line '{}'", line));
  }
  return value;
}

} // namespace

Header parse_header(std::vector<std::uint8_t> const &bytes, std::string_view magic)
{
  if (bytes.size() < magic.size() ||
      std::string_view(reinterpret_cast<char const *>(bytes.data()), magic.size()) != magic) {
    throw FormatError(FormatFault::BadMagic, fmt::format("bad magic, expected '{}'", magic.substr(0, magic.size() - 1)));
  }
  std::string_view const rest(reinterpret_cast<char const *>(bytes.data()) + magic.size(), bytes.size() - magic.size());
  auto const eol = rest.find('\n');
  if (eol == std::string_view::npos || eol > 64) {
    throw FormatError(FormatFault::MalformedHeader, "header line missing or unterminated");
  }
  auto const line = rest.substr(0, eol);
  auto const s1 = line.find(' ');
  auto const s2 = s1 == std::string_view::npos ? s1 : line.find(' ', s1 + 1);
  if (s1 == std::string_view::npos || s2 == std::string_view::npos || line.find(' ', s2 + 1) != std::string_view::npos) {
    throw FormatError(FormatFault::MalformedHeader, fmt::format("malformed header line '{}'", line));
  }
  Shape const shape{parse_dimension(line.substr(0, s1), line),
                    parse_dimension(line.substr(s1 + 1, s2 - s1 - 1), line),
                    parse_dimension(line.substr(s2 + 1), line)};
  return {shape, magic.size() + eol + 1};
}

void check_payload(std::size_t available, std::size_t expected, std::filesystem::path const &path)
{
  if (available < expected) {
    throw FormatError(
      FormatFault::Truncated,
      fmt::format("{}: payload truncated ({} of {} bytes)", path.string(), available, expected));
  }
  if (available > expected) {
    throw FormatError(
      FormatFault::TrailingBytes,
      fmt::format("{}: {} trailing bytes after payload", path.string(), available - expected));
  }
}

} // namespace dmri::detail

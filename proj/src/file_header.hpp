#pragma once

#include "dmri/error.hpp"
#include "dmri/sequence.hpp"

#include <cstdint>
#include <filesystem>
#include <string_view>
#include <vector>

namespace dmri::detail {

std::vector<std::uint8_t> read_file(std::filesystem::path const &path);
void write_file(std::filesystem::path const &path, std::vector<std::uint8_t> const &bytes);

// Appends magic + "T m n\n".
void put_header(std::vector<std::uint8_t> &out, std::string_view magic, Shape const &shape);

struct Header
{
  Shape shape;
  std::size_t payload_offset;
};

// Strict parse of magic + "T m n\n"; dimensions must be positive decimals.
Header parse_header(std::vector<std::uint8_t> const &bytes, std::string_view magic);

// Checks the payload is exactly `expected` bytes long.
void check_payload(std::size_t available, std::size_t expected, std::filesystem::path const &path);

} // namespace dmri::detail

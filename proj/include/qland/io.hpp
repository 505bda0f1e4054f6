#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace qland {

/// Malformed artifact file. offset() is the byte position the reader was at.
class FormatError : public std::runtime_error {
 public:
  FormatError(const std::string& what, std::size_t offset)
      : std::runtime_error(what + " (at byte offset " + std::to_string(offset) + ")"), offset_(offset) {}
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::vector<std::uint8_t> read_file(const std::filesystem::path& path);

/// Writes to a sibling temp file and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);
void write_file_atomic(const std::filesystem::path& path, const std::string& text);

/// Lowercase hex SHA-256.
std::string sha256_hex(std::span<const std::uint8_t> bytes);

/// Shortest decimal form that parses back to the same double.
std::string format_double(double value);

namespace binary {

void put_u32_le(std::vector<std::uint8_t>& out, std::uint32_t v);
void put_f64_le(std::vector<std::uint8_t>& out, double v);
std::uint32_t get_u32_le(std::span<const std::uint8_t> in, std::size_t offset);
double get_f64_le(std::span<const std::uint8_t> in, std::size_t offset);

/// Shared layout of the artifact files: 8 magic bytes, u32 LE header length,
/// UTF-8 JSON header, raw payload.
struct Envelope {
  std::string header_json;
  std::size_t payload_offset = 0;
  std::span<const std::uint8_t> payload;
};

std::vector<std::uint8_t> pack_envelope(const std::string& magic, const std::string& header_json);
Envelope unpack_envelope(std::span<const std::uint8_t> bytes, const std::string& magic);

}  // namespace binary

}  // namespace qland

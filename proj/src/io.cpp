#include "qland/io.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <charconv>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <system_error>

#include <openssl/evp.h>

namespace qland {

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError("read failed: " + path.string());
  return bytes;
}

void write_file_atomic(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + tmp.string() + " for writing");
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    out.flush();
    if (!out) throw IoError("write failed: " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw IoError("cannot move " + tmp.string() + " to " + path.string());
  }
}

void write_file_atomic(const std::filesystem::path& path, const std::string& text) {
  write_file_atomic(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

std::string sha256_hex(std::span<const std::uint8_t> bytes) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest.data(), &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("SHA-256 digest failed");
  }
  std::ostringstream hex;
  for (unsigned int i = 0; i < len; ++i) hex << std::hex << std::setw(2) << std::setfill('0') << int{digest[i]};
  return hex.str();
}

std::string format_double(double value) {
  std::array<char, 32> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  return std::string(buf.data(), res.ptr);
}

namespace binary {

namespace {

template <typename T>
T to_little(T v) {
  if constexpr (std::endian::native == std::endian::big) {
    auto raw = std::bit_cast<std::array<std::uint8_t, sizeof(T)>>(v);
    std::reverse(raw.begin(), raw.end());
    return std::bit_cast<T>(raw);
  }
  return v;
}

}  // namespace

void put_u32_le(std::vector<std::uint8_t>& out, std::uint32_t v) {
  const auto raw = std::bit_cast<std::array<std::uint8_t, 4>>(to_little(v));
  out.insert(out.end(), raw.begin(), raw.end());
}

void put_f64_le(std::vector<std::uint8_t>& out, double v) {
  const auto raw = std::bit_cast<std::array<std::uint8_t, 8>>(to_little(std::bit_cast<std::uint64_t>(v)));
  out.insert(out.end(), raw.begin(), raw.end());
}

std::uint32_t get_u32_le(std::span<const std::uint8_t> in, std::size_t offset) {
  std::array<std::uint8_t, 4> raw{};
  std::memcpy(raw.data(), in.data() + offset, raw.size());
  return to_little(std::bit_cast<std::uint32_t>(raw));
}

double get_f64_le(std::span<const std::uint8_t> in, std::size_t offset) {
  std::array<std::uint8_t, 8> raw{};
  std::memcpy(raw.data(), in.data() + offset, raw.size());
  return std::bit_cast<double>(to_little(std::bit_cast<std::uint64_t>(raw)));
}

std::vector<std::uint8_t> pack_envelope(const std::string& magic, const std::string& header_json) {
  std::vector<std::uint8_t> out(magic.begin(), magic.end());
  put_u32_le(out, static_cast<std::uint32_t>(header_json.size()));
  out.insert(out.end(), header_json.begin(), header_json.end());
  return out;
}

Envelope unpack_envelope(std::span<const std::uint8_t> bytes, const std::string& magic) {
  if (bytes.size() < magic.size() || std::memcmp(bytes.data(), magic.data(), magic.size()) != 0) {
    throw FormatError("bad magic, expected \"" + magic + "\"", 0);
  }
  const std::size_t len_offset = magic.size();
  if (bytes.size() < len_offset + 4) throw FormatError("truncated header length", len_offset);
  const std::uint32_t header_len = get_u32_le(bytes, len_offset);
  const std::size_t header_offset = len_offset + 4;
  if (bytes.size() - header_offset < header_len) {
    throw FormatError("header length " + std::to_string(header_len) + " exceeds file size", header_offset);
  }
  Envelope env;
  env.header_json.assign(reinterpret_cast<const char*>(bytes.data() + header_offset), header_len);
  env.payload_offset = header_offset + header_len;
  env.payload = bytes.subspan(env.payload_offset);
  return env;
}

}  // namespace binary

}  // namespace qland

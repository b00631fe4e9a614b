#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>

namespace hcn::io {

// Little-endian binary writer/reader for the strata cache and model
// checkpoint formats. Byte order is fixed explicitly so files are portable.

class Writer {
 public:
  explicit Writer(const std::filesystem::path& path)
      : path_(path), out_(path, std::ios::binary | std::ios::trunc) {
    if (!out_) throw std::runtime_error("cannot open " + path.string() + " for writing");
  }

  void bytes(const void* p, std::size_t size) {
    out_.write(static_cast<const char*>(p), static_cast<std::streamsize>(size));
  }

  void u16(std::uint16_t v) { put_le(v); }
  void u64(std::uint64_t v) { put_le(v); }
  void i64(std::int64_t v) { put_le(static_cast<std::uint64_t>(v)); }

  void f64(double v) { put_le(std::bit_cast<std::uint64_t>(v)); }

  void str(const std::string& s) {
    u64(s.size());
    bytes(s.data(), s.size());
  }

  void finish() {
    out_.flush();
    if (!out_) throw std::runtime_error("write failed: " + path_.string());
  }

 private:
  template <class T>
  void put_le(T v) {
    unsigned char buf[sizeof(T)];
    for (std::size_t i = 0; i < sizeof(T); ++i) buf[i] = static_cast<unsigned char>(v >> (8 * i));
    bytes(buf, sizeof(T));
  }

  std::filesystem::path path_;
  std::ofstream out_;
};

class Reader {
 public:
  explicit Reader(const std::filesystem::path& path)
      : path_(path), in_(path, std::ios::binary) {
    if (!in_) throw std::runtime_error("cannot open " + path.string());
  }

  void bytes(void* p, std::size_t size) {
    in_.read(static_cast<char*>(p), static_cast<std::streamsize>(size));
    if (in_.gcount() != static_cast<std::streamsize>(size))
      throw std::runtime_error(path_.string() + ": truncated or corrupt file");
  }

  std::uint16_t u16() { return get_le<std::uint16_t>(); }
  std::uint64_t u64() { return get_le<std::uint64_t>(); }
  std::int64_t i64() { return static_cast<std::int64_t>(get_le<std::uint64_t>()); }
  double f64() { return std::bit_cast<double>(get_le<std::uint64_t>()); }

  std::string str() {
    std::string s(u64(), '\0');
    bytes(s.data(), s.size());
    return s;
  }

  void expect_magic(const char (&magic)[9], const char* kind) {
    char buf[8];
    bytes(buf, 8);
    if (std::memcmp(buf, magic, 8) != 0)
      throw std::runtime_error(path_.string() + ": not a " + kind + " (bad magic)");
  }

  const std::filesystem::path& path() const { return path_; }

 private:
  template <class T>
  T get_le() {
    unsigned char buf[sizeof(T)];
    bytes(buf, sizeof(T));
    T v = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) v |= static_cast<T>(buf[i]) << (8 * i);
    return v;
  }

  std::filesystem::path path_;
  std::ifstream in_;
};

}  // namespace hcn::io

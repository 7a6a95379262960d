#pragma once

// Little-endian byte buffers shared by the checkpoint formats.

#include <bit>
#include <cstdint>
#include <cstring>
#include <span>
#include <string>
#include <string_view>
#include <type_traits>
#include <vector>

#include "bspn/errors.hpp"

namespace bspn::detail {

static_assert(std::endian::native == std::endian::little, "checkpoint I/O assumes a little-endian host");

class ByteWriter {
 public:
  template <class T>
  void put(T v) {
    static_assert(std::is_trivially_copyable_v<T>);
    const auto* p = reinterpret_cast<const std::uint8_t*>(&v);
    buf_.insert(buf_.end(), p, p + sizeof(T));
  }
  void put_bytes(std::span<const std::uint8_t> b) { buf_.insert(buf_.end(), b.begin(), b.end()); }
  void put_magic(std::string_view m) { buf_.insert(buf_.end(), m.begin(), m.end()); }
  std::vector<std::uint8_t> take() { return std::move(buf_); }
  std::size_t size() const noexcept { return buf_.size(); }

 private:
  std::vector<std::uint8_t> buf_;
};

class ByteReader {
 public:
  explicit ByteReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  template <class T>
  T get(const char* field) {
    static_assert(std::is_trivially_copyable_v<T>);
    need(sizeof(T), field);
    T v;
    std::memcpy(&v, bytes_.data() + pos_, sizeof(T));
    field_start_ = pos_;
    pos_ += sizeof(T);
    return v;
  }
  std::span<const std::uint8_t> get_bytes(std::size_t n, const char* field) {
    need(n, field);
    auto s = bytes_.subspan(pos_, n);
    field_start_ = pos_;
    pos_ += n;
    return s;
  }
  void expect_magic(std::string_view m) {
    const auto b = get_bytes(m.size(), "magic");
    if (std::memcmp(b.data(), m.data(), m.size()) != 0) fail(std::string("bad magic, expected ") + std::string(m));
  }
  // Reports the offset where the most recently read field starts.
  [[noreturn]] void fail(const std::string& what) const { throw ParseError(what, field_start_); }
  std::size_t pos() const noexcept { return pos_; }
  std::size_t remaining() const noexcept { return bytes_.size() - pos_; }

 private:
  void need(std::size_t n, const char* field) const {
    if (remaining() < n) throw ParseError(std::string("truncated input while reading ") + field, pos_);
  }
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
  std::size_t field_start_ = 0;
};

}  // namespace bspn::detail

#include "bspn/samples.hpp"

#include <fstream>
#include <iterator>
#include <string>

#include <zlib.h>

#include "bspn/errors.hpp"
#include "bytes.hpp"

namespace bspn {
namespace {

constexpr std::string_view kMagic = "BSPNZSMP";
constexpr std::uint32_t kVersion = 1;

std::uint64_t fnv1a(std::uint64_t h, std::span<const std::uint8_t> bytes) noexcept {
  for (std::uint8_t b : bytes) {
    h ^= b;
    h *= 0x100000001b3ULL;
  }
  return h;
}

template <class T>
std::uint64_t fnv1a_value(std::uint64_t h, T v) noexcept {
  return fnv1a(h, {reinterpret_cast<const std::uint8_t*>(&v), sizeof(T)});
}

}  // namespace

std::uint64_t content_hash(const AssignmentMatrix& z) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  h = fnv1a_value<std::uint64_t>(h, z.rows());
  h = fnv1a_value<std::uint64_t>(h, z.sums());
  h = fnv1a_value<std::uint64_t>(h, z.arity());
  return fnv1a(h, z.bytes());
}

std::uint64_t sample_seed(std::uint64_t seed, const StoredSample& s) noexcept {
  return mix64(seed ^ mix64(content_hash(s.z) ^ mix64(s.iteration)));
}

std::vector<std::uint8_t> encode_sample(const StoredSample& s) {
  const auto raw = s.z.bytes();
  uLongf comp_len = compressBound(static_cast<uLong>(raw.size()));
  std::vector<std::uint8_t> comp(comp_len);
  if (compress2(comp.data(), &comp_len, raw.data(), static_cast<uLong>(raw.size()), Z_DEFAULT_COMPRESSION) != Z_OK)
    throw Error("zlib compression failed");
  comp.resize(comp_len);

  detail::ByteWriter w;
  w.put_magic(kMagic);
  w.put<std::uint32_t>(kVersion);
  w.put<std::uint64_t>(s.iteration);
  w.put<double>(s.elapsed);
  w.put<std::uint64_t>(s.z.rows());
  w.put<std::uint64_t>(s.z.sums());
  w.put<std::uint32_t>(static_cast<std::uint32_t>(s.z.arity()));
  w.put<std::uint8_t>(static_cast<std::uint8_t>(s.z.width()));
  w.put<std::uint64_t>(raw.size());
  w.put<std::uint64_t>(comp.size());
  w.put_bytes(comp);
  return w.take();
}

StoredSample decode_sample(std::span<const std::uint8_t> bytes) {
  detail::ByteReader r(bytes);
  r.expect_magic(kMagic);
  if (const auto v = r.get<std::uint32_t>("version"); v != kVersion)
    r.fail("unsupported sample format version " + std::to_string(v));
  StoredSample s;
  s.iteration = r.get<std::uint64_t>("iteration");
  s.elapsed = r.get<double>("elapsed");
  const auto rows = r.get<std::uint64_t>("rows");
  const auto sums = r.get<std::uint64_t>("sums");
  const auto arity = r.get<std::uint32_t>("arity");
  const auto width = r.get<std::uint8_t>("entry width");
  const auto raw_len = r.get<std::uint64_t>("raw length");
  const auto comp_len = r.get<std::uint64_t>("compressed length");
  if (arity < 1 || arity > 65536) r.fail("arity out of range");
  if (width != (arity <= 256 ? 1 : 2)) r.fail("entry width does not match arity");
  if (sums != 0 && rows > raw_len / sums / width) r.fail("shape exceeds raw length");
  if (raw_len != rows * sums * width) r.fail("raw length does not match shape");
  if (comp_len != r.remaining()) r.fail("compressed length does not match payload");
  const auto comp = r.get_bytes(comp_len, "payload");
  s.z = AssignmentMatrix(rows, sums, arity);
  uLongf out_len = static_cast<uLongf>(raw_len);
  if (uncompress(s.z.bytes().data(), &out_len, comp.data(), static_cast<uLong>(comp.size())) != Z_OK ||
      out_len != raw_len)
    throw ParseError("corrupt compressed payload", bytes.size() - comp_len);
  for (std::size_t n = 0; n < rows; ++n)
    for (std::size_t k = 0; k < sums; ++k)
      if (s.z.get(n, k) >= arity) throw ParseError("assignment entry out of range", bytes.size() - comp_len);
  return s;
}

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw Error("read failed for " + path.string());
  return bytes;
}

void write_file_bytes(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot create " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error("write failed for " + path.string());
}

void write_sample_file(const std::filesystem::path& path, const StoredSample& s) {
  write_file_bytes(path, encode_sample(s));
}

StoredSample read_sample_file(const std::filesystem::path& path) {
  const auto bytes = read_file_bytes(path);
  try {
    return decode_sample(bytes);
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what(), e.offset());
  }
}

}  // namespace bspn

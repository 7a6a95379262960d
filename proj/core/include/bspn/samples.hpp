#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "bspn/state.hpp"

namespace bspn {

// One thinned draw of Z kept by a chain.
struct StoredSample {
  std::uint64_t iteration = 0;  // zero-based sweep index that produced it
  double elapsed = 0.0;         // chain wall time in seconds at that point
  AssignmentMatrix z;

  friend bool operator==(const StoredSample&, const StoredSample&) = default;
};

// FNV-1a over the shape and entries of z.
std::uint64_t content_hash(const AssignmentMatrix& z) noexcept;

// Seed for the parameter draw of one stored sample. Depends only on the run
// seed and the sample itself, so results do not depend on sample order.
std::uint64_t sample_seed(std::uint64_t seed, const StoredSample& s) noexcept;

// Sample file layout (little-endian):
//   "BSPNZSMP", u32 version (1), u64 iteration, f64 elapsed, u64 rows,
//   u64 sums, u32 arity, u8 entry width, u64 raw length, u64 compressed
//   length, then the zlib-compressed row-major entries.
std::vector<std::uint8_t> encode_sample(const StoredSample& s);
StoredSample decode_sample(std::span<const std::uint8_t> bytes);

void write_sample_file(const std::filesystem::path& path, const StoredSample& s);
StoredSample read_sample_file(const std::filesystem::path& path);

// Whole-file helpers shared by the checkpoint readers; throw Error on I/O failure.
std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path);
void write_file_bytes(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);

}  // namespace bspn

#pragma once

#include <cstdint>
#include <string_view>

#include "bspn/rng.hpp"
#include "bspn/state.hpp"

namespace bspn {

struct SweepReport {
  std::uint64_t iteration = 0;
  std::uint64_t accepted = 0;   // top-down: accepted proposals; bottom-up: N
  std::uint64_t proposals = 0;  // datapoints visited
  double seconds = 0.0;
  std::uint64_t node_touches = 0;
  std::uint64_t skipped_dims = 0;  // top-down: dimensions whose leaf did not change

  double acceptance_rate() const noexcept {
    return proposals == 0 ? 0.0 : static_cast<double>(accepted) / static_cast<double>(proposals);
  }
};

// One Markov chain over a LatentState it owns. Not thread-safe; independent
// chains may run concurrently on a shared model and dataset.
class Sampler {
 public:
  virtual ~Sampler() = default;
  virtual SweepReport sweep(Rng& rng) = 0;
  virtual const LatentState& state() const = 0;
  virtual std::string_view name() const = 0;
};

enum class SamplerKind { TopDown, BottomUp };

std::string_view sampler_name(SamplerKind k) noexcept;
// Accepts "topdown" and "bottomup".
SamplerKind parse_sampler(std::string_view name);

}  // namespace bspn

#pragma once

#include <cstdint>
#include <random>

namespace multithresh {

//! One step of the SplitMix64 generator; advances state.
std::uint64_t splitmix64(std::uint64_t& state);

//! Seed of stream `stream` under `root`: two SplitMix64 rounds over
//! root ^ (stream * golden-ratio constant). Distinct streams never share
//! generator state.
std::uint64_t derive_seed(std::uint64_t root, std::uint64_t stream);

//! Deterministic generator: Mersenne Twister 64 with a platform-independent
//! mapping to doubles (53 random bits).
class Rng
{
public:
  explicit Rng(std::uint64_t seed)
    : engine_(seed)
  {}

  std::uint64_t next() { return engine_(); }

  //! Uniform on [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  //! Uniform integer in [0, bound), bound > 0, without modulo bias.
  std::uint64_t below(std::uint64_t bound);

private:
  std::mt19937_64 engine_;
};

} // namespace multithresh

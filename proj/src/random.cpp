#include "multithresh/random.hpp"

namespace multithresh {

std::uint64_t
splitmix64(std::uint64_t& state)
{
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t
derive_seed(std::uint64_t root, std::uint64_t stream)
{
  std::uint64_t state = root ^ (stream * 0x9e3779b97f4a7c15ULL);
  splitmix64(state);
  return splitmix64(state);
}

std::uint64_t
Rng::below(std::uint64_t bound)
{
  const std::uint64_t limit = ~std::uint64_t{ 0 } - (~std::uint64_t{ 0 } % bound);
  std::uint64_t draw;
  do {
    draw = engine_();
  } while (draw >= limit);
  return draw % bound;
}

} // namespace multithresh

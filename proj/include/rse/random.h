#ifndef RSE_RANDOM_H_
#define RSE_RANDOM_H_

#include <cstdint>
#include <initializer_list>
#include <random>

namespace rse {

using Rng = std::mt19937_64;

// Mixes a base seed with a list of stream coordinates (example index, epoch,
// ...) into an independent seed. Results depend only on the arguments, so
// streams can be partitioned across workers without changing outputs.
inline std::uint64_t DeriveSeed(std::uint64_t base,
                                std::initializer_list<std::uint64_t> coords) {
  auto mix = [](std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  };
  std::uint64_t h = mix(base);
  for (std::uint64_t c : coords) h = mix(h ^ mix(c));
  return h;
}

inline Rng MakeRng(std::uint64_t base,
                   std::initializer_list<std::uint64_t> coords) {
  return Rng(DeriveSeed(base, coords));
}

}  // namespace rse

#endif  // RSE_RANDOM_H_

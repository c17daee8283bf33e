#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace benignlab {

// Deterministic random source shared by every sampler in the library.
//
// Bits come from std::mt19937_64, whose output sequence is fixed by the C++
// standard. Distributions are implemented here rather than with
// <random>'s distribution classes, which are implementation-defined:
//   uniform()   (bits >> 11) * 2^-53, a double in [0, 1)
//   sign()      +1 if uniform() < 0.5, else -1
//   normal()    Marsaglia polar method; the second variate of each accepted
//               pair is cached and returned by the next call
// Same seed therefore gives the same stream on every conforming platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform();
  int sign();
  double normal();
  double normal(double mean, double stddev) { return mean + stddev * normal(); }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t x);

// Order-sensitive combination of a base seed with stream/cell identifiers.
// derive_seed(b, {a, c}) == mix64(mix64(b ^ ...)); see rng.cpp for the exact fold.
std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> parts);

// IEEE-754 bit pattern of a double, for hashing real-valued grid coordinates.
std::uint64_t double_bits(double x);

}  // namespace benignlab

#pragma once

#include <cstdint>
#include <random>
#include <string_view>

#include "scs/vec3.hpp"

namespace scs {

std::uint64_t splitmix64(std::uint64_t x);

// FNV-1a, 64 bit.
std::uint64_t fnv1a64(std::string_view bytes);

// Seed for an independent stream keyed by (master seed, id).
std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t stream_id);
std::uint64_t derive_seed(std::uint64_t master_seed, std::string_view stream_name);

// Seeded generator with distribution transforms written out here rather than
// taken from <random>, whose distributions are implementation-defined. Every
// draw consumes a fixed number of engine outputs, so streams are reproducible
// across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // [0, 1) with 53 bits of resolution.
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  // Integer in [lo, hi].
  int uniform_int(int lo, int hi);
  // Standard normal via Box-Muller; consumes two draws.
  double normal();
  double normal(double mean, double sigma) { return mean + sigma * normal(); }
  // Knuth's product method; fine for the small means used here.
  int poisson(double mean);
  // Uniform direction on the unit sphere (normalized Gaussian triple).
  Vec3 unit_vector();

 private:
  std::mt19937_64 engine_;
};

}  // namespace scs

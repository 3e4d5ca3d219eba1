#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "scs/rng.hpp"
#include "scs/scene.hpp"

namespace scs {

struct Dataset;

// Volume of the intersection of two spheres with radii r1, r2 whose centres
// are d apart.
double sphere_intersection_volume(double r1, double r2, double d);

// Fraction of a ball of radius r, centred at distance D from an object, that
// lies strictly closer to the object than the ball's centre.
double lens_fraction(double D_km, double r_km);

struct CapAsymmetryResult {
  double D_km = 0.0;
  double r_km = 0.0;
  double analytic_fraction = 0.0;
  double empirical_fraction = 0.0;
  std::uint64_t samples = 0;
};

// Throws ValidationError("central inside exclusion regime not modeled") unless
// 0 < r < D.
CapAsymmetryResult cap_asymmetry(double D_km, double r_km, std::uint64_t samples, Rng& rng);

struct DistanceSummary {
  int a = 1;  // viewpoint indices of the pair
  int b = 2;
  double min_km = 0.0;
  double mean_km = 0.0;
  double max_km = 0.0;
  std::size_t count = 0;

  double spread_km() const { return max_km - min_km; }
};

struct PairwiseStats {
  // Indexed by RadiusClass; pairs (1,2), (1,3), ..., (k-1,k).
  std::array<std::vector<DistanceSummary>, 3> by_class;

  const DistanceSummary& pair(RadiusClass cls, int a, int b) const;
};

PairwiseStats pairwise_stats(const Dataset& dataset);

}  // namespace scs

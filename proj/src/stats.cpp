#include "scs/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "scs/cluster.hpp"
#include "scs/error.hpp"

namespace scs {

double sphere_intersection_volume(double r1, double r2, double d) {
  if (d >= r1 + r2) return 0.0;
  if (d <= std::abs(r1 - r2)) {
    const double r = std::min(r1, r2);
    return 4.0 / 3.0 * std::numbers::pi * r * r * r;
  }
  const double s = r1 + r2 - d;
  const double diff = r1 - r2;
  return std::numbers::pi * s * s * (d * d + 2.0 * d * (r1 + r2) - 3.0 * diff * diff) / (12.0 * d);
}

double lens_fraction(double D_km, double r_km) {
  const double ball = 4.0 / 3.0 * std::numbers::pi * r_km * r_km * r_km;
  return sphere_intersection_volume(D_km, r_km, D_km) / ball;
}

CapAsymmetryResult cap_asymmetry(double D_km, double r_km, std::uint64_t samples, Rng& rng) {
  if (!(r_km > 0.0) || !(r_km < D_km)) {
    throw ValidationError("central inside exclusion regime not modeled");
  }
  CapAsymmetryResult res;
  res.D_km = D_km;
  res.r_km = r_km;
  res.samples = samples;
  res.analytic_fraction = lens_fraction(D_km, r_km);

  // Object at the origin, ball centre on the +x axis.
  const EciPosition center{D_km, 0.0, 0.0};
  std::uint64_t closer = 0;
  for (std::uint64_t i = 0; i < samples; ++i) {
    if (norm(sample_uniform_ball(center, r_km, rng)) < D_km) ++closer;
  }
  res.empirical_fraction = samples ? static_cast<double>(closer) / static_cast<double>(samples) : 0.0;
  return res;
}

const DistanceSummary& PairwiseStats::pair(RadiusClass cls, int a, int b) const {
  for (const auto& s : by_class[static_cast<std::size_t>(cls)]) {
    if (s.a == a && s.b == b) return s;
  }
  throw Error("pairwise stats: no pair s" + std::to_string(a) + "-s" + std::to_string(b));
}

PairwiseStats pairwise_stats(const Dataset& dataset) {
  const int k = dataset.config.k();
  PairwiseStats stats;
  for (auto& pairs : stats.by_class) {
    for (int a = 1; a <= k; ++a) {
      for (int b = a + 1; b <= k; ++b) {
        DistanceSummary s;
        s.a = a;
        s.b = b;
        s.min_km = std::numeric_limits<double>::infinity();
        s.max_km = 0.0;
        pairs.push_back(s);
      }
    }
  }

  for (const auto& scene : dataset.scenes) {
    auto& pairs = stats.by_class[static_cast<std::size_t>(scene.cluster.radius_class)];
    for (auto& s : pairs) {
      const double d = distance(scene.cluster.member(s.a).position, scene.cluster.member(s.b).position);
      s.min_km = std::min(s.min_km, d);
      s.max_km = std::max(s.max_km, d);
      s.mean_km += d;
      ++s.count;
    }
  }
  for (auto& pairs : stats.by_class) {
    for (auto& s : pairs) {
      if (s.count) {
        s.mean_km /= static_cast<double>(s.count);
      } else {
        s.min_km = 0.0;
      }
    }
  }
  return stats;
}

}  // namespace scs

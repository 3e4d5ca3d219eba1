#include "doctest.h"

#include <cmath>

#include "scs/rng.hpp"

using namespace scs;

TEST_CASE("streams are reproducible and distinct") {
  Rng a(1), b(1), c(2);
  for (int i = 0; i < 100; ++i) {
    const double x = a.uniform();
    CHECK(x == b.uniform());
    CHECK(x >= 0.0);
    CHECK(x < 1.0);
  }
  CHECK(Rng(1).uniform() != c.uniform());
  CHECK(derive_seed(42, 1) != derive_seed(42, 2));
  CHECK(derive_seed(42, 1) == derive_seed(42, 1));
  CHECK(derive_seed(7, "close_c00000_v1") != derive_seed(7, "close_c00000_v2"));
  // FNV-1a test vector.
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cull);
}

TEST_CASE("distribution moments") {
  Rng rng(77);
  const int n = 200000;
  double s = 0, s2 = 0, p = 0;
  int lo = 0, hi = 0;
  for (int i = 0; i < n; ++i) {
    const double z = rng.normal();
    s += z;
    s2 += z * z;
    p += rng.poisson(0.2);
    const int k = rng.uniform_int(1, 5);
    lo += k == 1;
    hi += k == 5;
    CHECK(std::abs(norm(rng.unit_vector()) - 1.0) < 1e-12);
  }
  CHECK(std::abs(s / n) < 0.01);
  CHECK(std::abs(s2 / n - 1) < 0.01);
  CHECK(std::abs(p / n - 0.2) < 0.005);
  CHECK(std::abs(lo / double(n) - 0.2) < 0.005);
  CHECK(std::abs(hi / double(n) - 0.2) < 0.005);
}

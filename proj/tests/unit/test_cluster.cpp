#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <set>

#include "scs/cluster.hpp"
#include "scs/error.hpp"
#include "scs/viewpoint.hpp"

using namespace scs;

TEST_CASE("sample_uniform_ball moments") {
  Rng rng(2024);
  const Vec3 c{7000, 10, -3};
  const double r = 2.0;
  const int n = 1'000'000;
  double sum = 0.0;
  int inner = 0;
  for (int i = 0; i < n; ++i) {
    const double d = distance(sample_uniform_ball(c, r, rng), c);
    REQUIRE(d <= r);
    sum += d;
    if (d <= r / 2) ++inner;
  }
  CHECK(std::abs(sum / n - 0.75 * r) <= 0.002 * r);
  CHECK(std::abs(static_cast<double>(inner) / n - 0.125) <= 0.002);
}

TEST_CASE("sample_cone_direction stays in the cone") {
  Rng rng(9);
  const Vec3 axis = normalized(Vec3{1, 2, 3});
  for (int i = 0; i < 10000; ++i) {
    const Vec3 d = sample_cone_direction(axis, 20.0, rng);
    CHECK(std::abs(norm(d) - 1.0) < 1e-12);
    CHECK(dot(d, axis) >= std::cos(20.0 * M_PI / 180.0) - 1e-12);
  }
}

TEST_CASE("generate_cluster is deterministic and satisfies invariants") {
  const CameraConfig cam;
  for (auto cls : kRadiusClasses) {
    const auto cfg = default_cluster_config(cls);
    for (ClusterId id = 0; id < 200; ++id) {
      Rng a = cluster_rng(42, id);
      Rng b = cluster_rng(42, id);
      const Cluster c1 = generate_cluster(cfg, cam, id, a);
      const Cluster c2 = generate_cluster(cfg, cam, id, b);
      REQUIRE(c1 == c2);
      CHECK(c1.size() == 3);
      for (const auto& s : c1.secondaries) CHECK(distance(s.position, c1.central.position) <= cfg.radius_km);
      CHECK(distance(c1.secondaries[0].position, c1.secondaries[1].position) <= 2 * cfg.radius_km);
      double nearest = 1e9;
      for (const auto& t : c1.targets) nearest = std::min(nearest, distance(t.position, c1.central.position));
      CHECK(nearest >= 0.5);
      CHECK(nearest <= 2.0);
      CHECK(c1.targets.size() >= 1);
      CHECK(c1.targets.size() <= 5);
      for (const auto& v : render_scene(c1, cam)) CHECK(!v.entries.empty());
      const double alt = c1.central.geodetic.alt_km;
      CHECK(alt >= 500.0 - 1e-9);
      CHECK(alt <= 600.0 + 1e-9);
    }
  }
}

TEST_CASE("generate_cluster gives up on an unsatisfiable config") {
  auto cfg = default_cluster_config(RadiusClass::Close);
  // Secondaries far outside any camera cone, targets no farther than 0.6 km.
  cfg.radius_km = 50.0;
  cfg.nearest_target_range_km = {0.5, 0.6};
  cfg.targets_per_scene = {1, 1};
  cfg.max_attempts = 20;
  CameraConfig cam;
  cam.fov_deg = 1.0;
  Rng rng(1);
  CHECK_THROWS_WITH_AS(generate_cluster(cfg, cam, 0, rng), "unsatisfiable cluster config", ValidationError);
}

TEST_CASE("config validation") {
  auto cfg = default_cluster_config(RadiusClass::Mid);
  cfg.k = 1;
  CHECK_THROWS_AS(validate(cfg), ValidationError);
  cfg = default_cluster_config(RadiusClass::Mid);
  cfg.nearest_target_range_km = {2.0, 1.0};
  CHECK_THROWS_AS(validate(cfg), ValidationError);
  cfg = default_cluster_config(RadiusClass::Mid);
  cfg.radius_km = 0.0;
  CHECK_THROWS_AS(validate(cfg), ValidationError);

  DatasetConfig ds;
  ds.scenes_per_class = 0;
  CHECK_THROWS_AS(validate(ds), ValidationError);
}

TEST_CASE("default radii") {
  CHECK(default_radius_km(RadiusClass::Close) == 0.5);
  CHECK(default_radius_km(RadiusClass::Mid) == 1.0);
  CHECK(default_radius_km(RadiusClass::Far) == 2.0);
  CHECK(parse_radius_class("far") == RadiusClass::Far);
  CHECK(!parse_radius_class("huge"));
}

TEST_CASE("generate_dataset sizes and determinism") {
  DatasetConfig cfg;
  const Dataset a = generate_dataset(cfg);
  CHECK(a.image_count() == 180);
  CHECK(a == generate_dataset(cfg));

  std::set<std::string> ids;
  for (const auto& s : a.scenes)
    for (const auto& v : s.views) ids.insert(v.image_id);
  CHECK(ids.size() == 180);
  CHECK(a.find_image("close_c00000_v1") != nullptr);
  CHECK(a.find_image("nope") == nullptr);

  cfg.scenes_per_class = 1;
  CHECK(generate_dataset(cfg).image_count() == 9);

  cfg = DatasetConfig{};
  cfg.master_seed = 43;
  CHECK(!(generate_dataset(cfg) == a));
}

TEST_CASE("cluster streams do not depend on generation order") {
  DatasetConfig cfg;
  cfg.scenes_per_class = 5;
  const Dataset ds = generate_dataset(cfg);
  // Cluster 7 regenerated alone.
  Rng rng = cluster_rng(cfg.master_seed, 7);
  const Cluster c = generate_cluster(cfg.classes[1], cfg.camera, 7, rng);
  CHECK(c == ds.scenes[7].cluster);
}

TEST_CASE("distance_stats against brute force") {
  DatasetConfig cfg;
  cfg.scenes_per_class = 50;
  const Dataset ds = generate_dataset(cfg);
  const DistanceTable t = distance_stats(ds);

  std::array<std::array<double, 4>, 4> sum{};
  std::array<int, 4> n{};
  for (const auto& s : ds.scenes) {
    const auto row = static_cast<std::size_t>(s.cluster.radius_class);
    double best = 1e9;
    for (int j = 0; j < 3; ++j) {
      double acc = 0;
      for (const auto& e : s.views[j].entries) acc += e.distance_km;
      const double m = acc / static_cast<double>(s.views[j].entries.size());
      sum[row][j] += m;
      sum[3][j] += m;
      best = std::min(best, m);
    }
    sum[row][3] += best;
    sum[3][3] += best;
    ++n[row];
    ++n[3];
  }
  for (std::size_t r = 0; r < 4; ++r) {
    for (std::size_t j = 0; j < 3; ++j) CHECK(t.rows[r].fixed[j] == doctest::Approx(sum[r][j] / n[r]).epsilon(1e-12));
    CHECK(t.rows[r].selected == doctest::Approx(sum[r][3] / n[r]).epsilon(1e-12));
  }
  CHECK(check_vd_dominance(t));
}

TEST_CASE("check_vd_dominance on hand tables") {
  auto make = [](std::array<std::array<double, 4>, 4> v) {
    DistanceTable t;
    for (std::size_t r = 0; r < 4; ++r) {
      t.rows[r].fixed = {v[r][0], v[r][1], v[r][2]};
      t.rows[r].selected = v[r][3];
      t.rows[r].clusters = 20;
    }
    return t;
  };
  CHECK(check_vd_dominance(make({{{2.98, 2.917, 2.86, 2.80},
                                  {2.57, 2.89, 2.63, 2.37},
                                  {2.16, 2.60, 2.70, 2.03},
                                  {2.57, 2.80, 2.73, 2.40}}})));
  CHECK(check_vd_dominance(make({{{1, 1, 1, 1}, {1, 1, 1, 1}, {1, 1, 1, 1}, {1, 1, 1, 1}}})));
  CHECK(!check_vd_dominance(make({{{1, 1, 1, 1}, {1, 2, 3, 1.5}, {1, 1, 1, 1}, {1, 1, 1, 1}}})));
}

TEST_CASE("one target at exactly 1 km everywhere gives 1.0 cells") {
  DatasetConfig cfg;
  cfg.scenes_per_class = 4;
  Dataset ds = generate_dataset(cfg);
  for (auto& s : ds.scenes)
    for (auto& v : s.views) {
      v.entries.resize(1);
      v.entries[0].distance_km = 1.0;
    }
  const auto t = distance_stats(ds);
  for (const auto& row : t.rows) {
    for (double f : row.fixed) CHECK(f == 1.0);
    CHECK(row.selected == 1.0);
  }
}

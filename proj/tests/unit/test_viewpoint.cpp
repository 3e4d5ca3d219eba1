#include "doctest.h"

#include <algorithm>
#include <set>

#include "scs/cluster.hpp"
#include "scs/error.hpp"
#include "scs/rng.hpp"
#include "scs/viewpoint.hpp"

using namespace scs;

namespace {

Observation obs_with(int j, std::vector<double> distances) {
  Observation o;
  o.viewpoint_index = j;
  o.sat_id = make_sat_id(0, j);
  o.image_id = make_image_id(RadiusClass::Close, 0, j);
  for (double d : distances) {
    ObservationEntry e;
    e.distance_km = d;
    o.entries.push_back(e);
  }
  return o;
}

}  // namespace

TEST_CASE("mean_visible_distance") {
  CHECK(mean_visible_distance(obs_with(1, {1.0})) == 1.0);
  CHECK(mean_visible_distance(obs_with(1, {1.0, 3.0})) == 2.0);
  CHECK_THROWS_WITH_AS(mean_visible_distance(obs_with(1, {})), "no visible targets", Error);

  Rng rng(4);
  for (int i = 0; i < 1000; ++i) {
    std::vector<double> d(static_cast<std::size_t>(rng.uniform_int(1, 6)));
    for (auto& x : d) x = rng.uniform(0.1, 20);
    double s = 0;
    for (double x : d) s += x;
    CHECK(std::abs(mean_visible_distance(obs_with(1, d)) - s / d.size()) < 1e-12);
  }
}

TEST_CASE("select_viewpoint argmin and ties") {
  std::vector<Observation> v{obs_with(1, {2.5}), obs_with(2, {2.2}), obs_with(3, {2.9})};
  CHECK(select_viewpoint(v).chosen_index == 2);

  v = {obs_with(1, {2.0}), obs_with(2, {2.0}), obs_with(3, {3.0})};
  CHECK(select_viewpoint(v).chosen_index == 1);
  std::reverse(v.begin(), v.end());
  CHECK(select_viewpoint(v).chosen_index == 1);

  v = {obs_with(1, {}), obs_with(2, {5.0}), obs_with(3, {4.0, 6.0})};
  const auto r = select_viewpoint(v);
  CHECK(r.chosen_index == 2);
  CHECK(r.scores.size() == 2);

  v = {obs_with(1, {}), obs_with(2, {})};
  CHECK_THROWS_WITH_AS(select_viewpoint(v), "cluster has no observer", Error);
}

TEST_CASE("selection on generated clusters matches exhaustive search") {
  DatasetConfig cfg;
  cfg.scenes_per_class = 100;
  const Dataset ds = generate_dataset(cfg);
  for (const auto& s : ds.scenes) {
    const auto r = select_viewpoint(s.views);
    double best = 1e18;
    int best_j = 0;
    for (const auto& v : s.views) {
      double acc = 0;
      for (const auto& e : v.entries) acc += e.distance_km;
      const double m = acc / static_cast<double>(v.entries.size());
      if (m < best) {
        best = m;
        best_j = v.viewpoint_index;
      }
    }
    CHECK(r.chosen_index == best_j);
    CHECK(r.chosen_mean_km() == best);
  }
}

TEST_CASE("selection message wire format") {
  SelectionMessage m;
  m.sat_id = make_sat_id(12, 3);
  m.cluster_id = 12;
  m.viewpoint_index = 3;
  m.mean_distance_km = 2.718281828;
  m.visible_count = 4;
  const auto bytes = m.encode();
  CHECK(bytes.size() == 32);
  CHECK(SelectionMessage::decode(bytes) == m);
  // cluster id little-endian in the first four bytes
  CHECK(std::to_integer<int>(bytes[0]) == 12);

  auto bad = bytes;
  bad[9] ^= std::byte{1};
  CHECK_THROWS_AS(SelectionMessage::decode(bad), ValidationError);
  bad = bytes;
  bad[22] = std::byte{9};
  CHECK_THROWS_AS(SelectionMessage::decode(bad), ValidationError);
  CHECK_THROWS_AS(SelectionMessage::decode(std::span<const std::byte>(bytes.data(), 10)), ValidationError);
}

TEST_CASE("protocol_round") {
  std::vector<Observation> v{obs_with(1, {2.5}), obs_with(2, {2.2}), obs_with(3, {2.9})};
  const auto round = protocol_round(v);
  CHECK(round.messages.size() == 3);
  CHECK(round.total_bytes == 96);
  CHECK(round.result == select_viewpoint(v));

  for (int k = 2; k <= 16; ++k) {
    std::vector<Observation> views;
    for (int j = 1; j <= k; ++j) views.push_back(obs_with(j, {1.0 + j}));
    CHECK(protocol_round(views).total_bytes < 1000);
  }

  DatasetConfig cfg;
  const Dataset ds = generate_dataset(cfg);
  for (const auto& s : ds.scenes) CHECK(protocol_round(s.views).result == select_viewpoint(s.views));
}

TEST_CASE("partitions") {
  DatasetConfig cfg;
  const Dataset ds = generate_dataset(cfg);
  std::set<const Observation*> seen;
  for (int j = 1; j <= 3; ++j) {
    const auto p = fixed_viewpoint(ds, j);
    CHECK(p.images.size() == 60);
    for (const auto* o : p.images) {
      CHECK(o->viewpoint_index == j);
      CHECK(seen.insert(o).second);
    }
  }
  CHECK(seen.size() == ds.image_count());
  CHECK_THROWS_AS(fixed_viewpoint(ds, 0), ValidationError);
  CHECK_THROWS_AS(fixed_viewpoint(ds, 4), ValidationError);

  const auto vd = selected_viewpoint(ds);
  CHECK(vd.images.size() == 60);
  std::set<ClusterId> clusters;
  for (const auto* o : vd.images) clusters.insert(o->cluster_id);
  CHECK(clusters.size() == 60);

  const auto parts = standard_partitions(ds);
  REQUIRE(parts.size() == 4);
  CHECK(parts[3].label == "Vd");
}

#include "doctest.h"

#include "scs/cluster.hpp"
#include "scs/detector.hpp"
#include "scs/error.hpp"
#include "scs/fusion.hpp"
#include "scs/rng.hpp"

using namespace scs;

namespace {

DetectionBox det(double cx, double cy, double w, double h, double conf) {
  DetectionBox d;
  d.cx = cx;
  d.cy = cy;
  d.w = w;
  d.h = h;
  d.confidence = conf;
  return d;
}

std::vector<DetectionSet> views_of(std::vector<std::vector<DetectionBox>> boxes) {
  std::vector<DetectionSet> out;
  for (std::size_t i = 0; i < boxes.size(); ++i) {
    DetectionSet s;
    s.image_id = "v" + std::to_string(i + 1);
    s.boxes = boxes[i];
    out.push_back(s);
  }
  return out;
}

}  // namespace

TEST_CASE("fuse_merge examples") {
  const FusionConfig cfg;
  const auto b = det(0.5, 0.5, 0.1, 0.1, 0.8);
  auto out = fuse_merge(views_of({{b}, {b}, {b}}), cfg);
  REQUIRE(out.boxes.size() == 1);
  CHECK(out.boxes[0] == b);
  CHECK(out.image_id == "v1");

  out = fuse_merge(views_of({{det(0.1, 0.1, 0.1, 0.1, 0.9)}, {det(0.5, 0.5, 0.1, 0.1, 0.8)},
                             {det(0.9, 0.9, 0.1, 0.1, 0.7)}}),
                   cfg);
  CHECK(out.boxes.size() == 3);

  // Offset by half a width: IoU 1/3.
  out = fuse_merge(views_of({{det(0.4, 0.5, 0.2, 0.2, 0.9)}, {det(0.5, 0.5, 0.2, 0.2, 0.8)}}), cfg);
  CHECK(out.boxes.size() == 2);
}

TEST_CASE("merged geometry and confidence") {
  FusionConfig cfg;
  const auto out = fuse_merge(views_of({{det(0.50, 0.5, 0.1, 0.1, 0.9)}, {det(0.51, 0.5, 0.1, 0.1, 0.3)}}), cfg);
  REQUIRE(out.boxes.size() == 1);
  CHECK(out.boxes[0].confidence == doctest::Approx(0.6));
  CHECK(out.boxes[0].cx == doctest::Approx((0.9 * 0.50 + 0.3 * 0.51) / 1.2));

  cfg.merge_rule = MergeRule::HighestConfidence;
  const auto hc = fuse_merge(views_of({{det(0.50, 0.5, 0.1, 0.1, 0.9)}, {det(0.51, 0.5, 0.1, 0.1, 0.3)}}), cfg);
  CHECK(hc.boxes[0].cx == 0.50);
}

TEST_CASE("a group takes at most one box per view") {
  const FusionConfig cfg;
  const auto out = fuse_merge(views_of({{det(0.5, 0.5, 0.1, 0.1, 0.9), det(0.5, 0.5, 0.1, 0.1, 0.8)}, {}}), cfg);
  CHECK(out.boxes.size() == 2);
}

TEST_CASE("fuse_vote") {
  FusionConfig cfg;
  const auto b = det(0.5, 0.5, 0.1, 0.1, 0.8);
  CHECK(fuse_vote(views_of({{b}, {b}, {b}}), cfg).boxes.size() == 1);
  CHECK(fuse_vote(views_of({{b}, {}, {}}), cfg).boxes.empty());

  cfg.min_votes = 1;
  Rng rng(8);
  for (int t = 0; t < 200; ++t) {
    std::vector<std::vector<DetectionBox>> boxes(3);
    for (auto& v : boxes) {
      const int n = rng.uniform_int(0, 4);
      for (int i = 0; i < n; ++i)
        v.push_back(det(rng.uniform(0.3, 0.7), rng.uniform(0.3, 0.7), rng.uniform(0.05, 0.2), rng.uniform(0.05, 0.2),
                        rng.uniform()));
    }
    const auto views = views_of(boxes);
    CHECK(fuse_vote(views, cfg) == fuse_merge(views, cfg));
  }
}

TEST_CASE("fusion config validation") {
  FusionConfig cfg;
  cfg.min_votes = 4;
  CHECK_THROWS_AS(validate(cfg, 3), ValidationError);
  cfg = {};
  cfg.iou_group_threshold = 1.5;
  CHECK_THROWS_AS(validate(cfg), ValidationError);
  CHECK(parse_merge_rule("highest_confidence") == MergeRule::HighestConfidence);
  CHECK_THROWS_AS(parse_merge_rule("median"), ValidationError);
}

TEST_CASE("fuse_dataset keys by the central image") {
  DatasetConfig dc;
  dc.scenes_per_class = 2;
  const Dataset ds = generate_dataset(dc);
  const auto sets = synth_detect_all(DetectorModel{}, ds);
  const auto fused = fuse_dataset(ds, sets, FusionMode::Merge, FusionConfig{});
  REQUIRE(fused.size() == ds.scenes.size());
  for (std::size_t i = 0; i < fused.size(); ++i) {
    CHECK(fused[i].image_id == ds.scenes[i].views[0].image_id);
    CHECK(fused[i].model_tag == "synthetic+merge");
  }
  std::vector<DetectionSet> partial(sets.begin(), sets.begin() + 2);
  CHECK_THROWS_AS(fuse_dataset(ds, partial, FusionMode::Vote, FusionConfig{}), ValidationError);
}

TEST_CASE("comm_cost arithmetic") {
  auto r = comm_cost(CommStrategy::Selection, 3, 640 * 640 * 3, 32, 1.0);
  CHECK(r.bytes_per_cluster == 96);
  CHECK(r.transfer_ms == doctest::Approx(0.000768));
  CHECK(r.within_budget);

  r = comm_cost(CommStrategy::EarlyFusion, 3, 640 * 640 * 3, 32, 1.0);
  CHECK(r.bytes_per_cluster == 2'457'600);
  CHECK(r.transfer_ms == doctest::Approx(19.6608).epsilon(1e-12));
  CHECK(r.within_budget);

  r = comm_cost(CommStrategy::EarlyFusion, 3, 1920ull * 1080 * 3, 32, 1.0);
  CHECK(r.transfer_ms == doctest::Approx(99.5328).epsilon(1e-12));
  CHECK(!r.within_budget);

  CHECK_THROWS_AS(comm_cost(CommStrategy::Selection, 3, 1, 32, 0.0), ValidationError);
}

TEST_CASE("reaction budget") {
  CHECK(std::abs(reaction_budget_ms(0.5, 7.8) - 64.1) < 0.05);
  CHECK(std::abs(reaction_budget_ms(2.0, 7.8) - 256.4) < 0.05);
  CHECK(reaction_budget_ms(0.5, 15.6) == doctest::Approx(reaction_budget_ms(0.5, 7.8) / 2));
  CHECK_THROWS_AS(reaction_budget_ms(0.5, 0.0), ValidationError);
}

#include "doctest.h"

#include <set>

#include "json.hpp"
#include "scs/dataset_io.hpp"
#include "scs/error.hpp"
#include "scs/text.hpp"
#include "test_util.hpp"

using namespace scs;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

Dataset small_dataset(int scenes = 3, std::uint64_t seed = 42) {
  DatasetConfig cfg;
  cfg.scenes_per_class = scenes;
  cfg.master_seed = seed;
  return generate_dataset(cfg);
}

void edit_manifest(const fs::path& dir, const std::function<void(json&)>& f) {
  json j = json::parse(testutil::slurp(dir / "manifest.json"));
  f(j);
  testutil::spit(dir / "manifest.json", j.dump(2));
}

std::string import_error(const fs::path& dir) {
  try {
    import_dataset(dir);
  } catch (const ValidationError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("number formatting round-trips") {
  for (double v : {0.0, 1.0, 0.1, 1.0 / 3.0, 6871.123456789012, -2.5e-12, 1e300}) {
    CHECK(*parse_number(format_number(v)) == v);
  }
  CHECK(format_number(-0.0) == "0");
  CHECK(!parse_number("1.0x"));
  CHECK(!parse_number(""));
  CHECK(parse_int("42") == 42);
  CHECK(!parse_int("4.2"));
}

TEST_CASE("default export layout") {
  testutil::TempDir dir("layout");
  const Dataset ds = small_dataset(20);
  const auto manifest = export_dataset(ds, dir.path());
  CHECK(manifest.images.size() == 180);
  int labels = 0, metas = 0, manifests = 0;
  for (const auto& e : fs::recursive_directory_iterator(dir.path())) {
    const auto name = e.path().filename().string();
    if (name.ends_with(".labels.txt")) ++labels;
    if (name.ends_with(".meta.json")) ++metas;
    if (name == "manifest.json") ++manifests;
  }
  CHECK(labels == 180);
  CHECK(metas == 180);
  CHECK(manifests == 1);
  CHECK(fs::exists(dir / "close/c00000/v1.labels.txt"));
  CHECK(fs::exists(dir / "far/c00059/v3.meta.json"));
}

TEST_CASE("meta.json fields") {
  testutil::TempDir dir("meta");
  const Dataset ds = small_dataset(2);
  export_dataset(ds, dir.path());
  const json m = json::parse(testutil::slurp(dir / "mid/c00002/v2.meta.json"));
  std::set<std::string> top, sat, obj;
  for (auto& [k, v] : m.items()) top.insert(k);
  for (auto& [k, v] : m["satellite"].items()) sat.insert(k);
  CHECK(top == std::set<std::string>{"satellite", "objects"});
  CHECK(sat == std::set<std::string>{"sat_id", "latitude_deg", "longitude_deg", "altitude_km", "inclination_deg",
                                     "raan_deg"});
  REQUIRE(!m["objects"].empty());
  for (auto& [k, v] : m["objects"][0].items()) obj.insert(k);
  CHECK(obj == std::set<std::string>{"object_id", "screen_position_px", "bbox", "distance_km", "latitude_deg",
                                     "longitude_deg", "altitude_km", "inclination_deg", "raan_deg"});
}

TEST_CASE("labels are normalized class cx cy w h lines") {
  const Dataset ds = small_dataset(1);
  const auto text = labels_text(ds.scenes[0].views[0]);
  std::istringstream in(text);
  std::string line;
  int n = 0;
  while (std::getline(in, line)) {
    const auto f = split_fields(line);
    REQUIRE(f.size() == 5);
    for (std::size_t i = 1; i < 5; ++i) {
      const double v = *parse_number(f[i]);
      CHECK(v >= 0.0);
      CHECK(v <= 1.0);
    }
    ++n;
  }
  CHECK(n == static_cast<int>(ds.scenes[0].views[0].entries.size()));
}

TEST_CASE("round trip and byte stability") {
  testutil::TempDir a("rt_a"), b("rt_b"), c("rt_c");
  const Dataset ds = small_dataset(4);
  export_dataset(ds, a.path(), ExportOptions{true});
  export_dataset(small_dataset(4), b.path(), ExportOptions{true});
  CHECK(testutil::snapshot(a.path()) == testutil::snapshot(b.path()));

  const auto imported = import_dataset(a.path());
  CHECK(imported.dataset == ds);
  export_dataset(imported.dataset, imported.config, c.path(), ExportOptions{true});
  CHECK(testutil::snapshot(a.path()) == testutil::snapshot(c.path()));

  // Re-export into the same directory replaces the old dataset.
  export_dataset(small_dataset(1), a.path());
  CHECK(import_dataset(a.path()).dataset.scenes.size() == 3);
  CHECK(!fs::exists(a / "far/c00011"));
}

TEST_CASE("import rejects tampering") {
  testutil::TempDir dir("tamper");
  const Dataset ds = small_dataset(2);
  export_dataset(ds, dir.path());
  const auto pristine = testutil::snapshot(dir.path());
  auto restore = [&] {
    for (const auto& [rel, text] : pristine) testutil::spit(dir / rel, text);
  };

  edit_manifest(dir.path(), [](json& j) { j["version"] = "9.9"; });
  CHECK(import_error(dir.path()).find("version") != std::string::npos);
  restore();

  // Secondary moved outside the cluster radius.
  edit_manifest(dir.path(), [](json& j) {
    auto& p = j["clusters"][0]["secondaries"][0]["position_km"];
    p[0] = p[0].get<double>() + 3.0;
  });
  CHECK(!import_error(dir.path()).empty());
  restore();

  edit_manifest(dir.path(), [](json& j) { j["clusters"][0]["radius_km"] = 0.01; });
  CHECK(!import_error(dir.path()).empty());
  restore();

  edit_manifest(dir.path(), [](json& j) { j["config"]["master_seed"] = 7; });
  CHECK(import_error(dir.path()).find("digest") != std::string::npos);
  restore();

  testutil::spit(dir / "close/c00000/v1.labels.txt", "0 0.5 0.5 0.1 0.1\n");
  CHECK(import_error(dir.path()).find("v1.labels.txt") != std::string::npos);
  restore();

  fs::remove(dir / "close/c00001/v2.meta.json");
  CHECK(!import_error(dir.path()).empty());
  restore();

  testutil::spit(dir / "close/c00001/v7.labels.txt", "");
  CHECK(!import_error(dir.path()).empty());
  fs::remove(dir / "close/c00001/v7.labels.txt");

  fs::remove(dir / "manifest.json");
  CHECK(!import_error(dir.path()).empty());
  restore();
  CHECK(import_error(dir.path()).empty());
}

TEST_CASE("config parsing") {
  const auto cfg = parse_config(R"({"master_seed": 5, "scenes_per_class": 2,
      "classes": [{"class": "close", "radius_km": 0.5}, {"class": "far", "radius_km": 2.0}],
      "detector": {"p_max": 0.8}, "fusion": {"min_votes": 3}})");
  CHECK(cfg.dataset.master_seed == 5);
  CHECK(cfg.dataset.classes.size() == 2);
  CHECK(cfg.detector.p_max == 0.8);
  CHECK(cfg.fusion.min_votes == 3);
  CHECK(parse_config(config_to_json(cfg)) == cfg);
  CHECK(config_digest(cfg).size() == 16);
  CHECK(config_digest(cfg) != config_digest(PipelineConfig{}));

  CHECK_THROWS_AS(parse_config(R"({"mystery": 1})"), ValidationError);
  CHECK_THROWS_AS(parse_config(R"({"master_seed": "x"})"), ValidationError);
  CHECK_THROWS_AS(parse_config("{not json"), ValidationError);
  CHECK_THROWS_AS(parse_config(R"({"classes": [{"class": "huge"}]})"), ValidationError);
  CHECK(PipelineConfig{}.image_bytes() == 640u * 640u * 3u);
}

TEST_CASE("map points") {
  const Dataset ds = small_dataset(20);
  const auto pts = export_map_points(ds);
  CHECK(pts.size() == 60);
  for (const auto& p : pts) {
    CHECK(p.lat_deg >= -90);
    CHECK(p.lat_deg <= 90);
    CHECK(p.lon_deg > -180);
    CHECK(p.lon_deg <= 180);
    CHECK(p.spread_deg >= 0);
  }
  const auto csv = map_points_csv(pts);
  CHECK(csv.rfind("cluster_id,lat_deg,lon_deg,spread_deg\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 61);

  Dataset same = small_dataset(1);
  for (auto& s : same.scenes)
    for (auto& sec : s.cluster.secondaries) sec.position = s.cluster.central.position;
  for (const auto& p : export_map_points(same)) CHECK(p.spread_deg == 0.0);
}

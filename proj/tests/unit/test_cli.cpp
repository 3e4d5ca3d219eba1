#include "doctest.h"

#include <sstream>

#include "json.hpp"
#include "scs/cli.hpp"
#include "test_util.hpp"

using namespace scs;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "scs");
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

}  // namespace

TEST_CASE("full pipeline through the CLI") {
  testutil::TempDir tmp("cli");
  const std::string data = (tmp / "data").string();
  const std::string dets = (tmp / "dets").string();
  const std::string perfect = (tmp / "perfect").string();

  REQUIRE(run({"gen", "--config", "default", "--out", data}).code == 0);

  auto r = run({"select", "--data", data});
  REQUIRE(r.code == 0);
  const auto first = testutil::slurp(tmp / "data/selection.json");
  const auto again = run({"select", "--data", data});
  CHECK(again.out == r.out);
  CHECK(testutil::slurp(tmp / "data/selection.json") == first);
  CHECK(nlohmann::json::parse(first).contains("clusters"));

  REQUIRE(run({"detect", "--data", data, "--model", "noiseless", "--out", perfect}).code == 0);
  r = run({"eval", "--data", data, "--detections", perfect, "--out", (tmp / "rep.json").string()});
  REQUIRE(r.code == 0);
  const auto report = nlohmann::json::parse(testutil::slurp(tmp / "rep.json"));
  int cells = 0;
  for (const auto& row : report["rows"])
    for (const char* col : {"close", "mid", "far", "overall"}) {
      const auto& cell = row[col];
      CHECK(cell["mAP50"].get<double>() == 1.0);
      CHECK(cell["mAP50_95"].get<double>() == 1.0);
      ++cells;
    }
  CHECK(cells == 16);
  CHECK(std::filesystem::exists(tmp / "rep.txt"));

  REQUIRE(run({"detect", "--data", data, "--out", dets}).code == 0);
  r = run({"fuse", "--data", data, "--detections", dets, "--mode", "merge", "--out", (tmp / "fused").string()});
  CHECK(r.code == 0);
  CHECK(r.out.find("merge") != std::string::npos);
  CHECK(run({"fuse", "--data", data, "--detections", dets, "--mode", "vote"}).code == 0);

  r = run({"report", "--data", data, "--out", (tmp / "report").string(), "--cap-samples", "20000"});
  CHECK(r.code == 0);
  CHECK(r.out.find("Vd dominance: yes") != std::string::npos);
  const auto rj = nlohmann::json::parse(testutil::slurp(tmp / "report/report.json"));
  CHECK(rj["vd_dominance"].get<bool>());
  CHECK(testutil::slurp(tmp / "report/map_points.csv").rfind("cluster_id,lat_deg,lon_deg,spread_deg", 0) == 0);
}

TEST_CASE("exit code matrix") {
  testutil::TempDir tmp("cli_codes");
  const std::string data = (tmp / "data").string();
  REQUIRE(run({"gen", "--out", data}).code == 0);

  // usage errors
  CHECK(run({}).code == 2);
  CHECK(run({"frobnicate"}).code == 2);
  CHECK(run({"gen"}).code == 2);
  CHECK(run({"gen", "--out", data, "--bogus"}).code == 2);
  CHECK(run({"fuse", "--data", data, "--detections", data, "--mode", "average"}).code == 2);
  CHECK(run({"select"}).code == 2);
  const auto usage = run({"eval", "--data", data});
  CHECK(usage.code == 2);
  CHECK(usage.err.find("--detections") != std::string::npos);

  // validation errors
  CHECK(run({"select", "--data", (tmp / "missing").string()}).code == 1);
  testutil::spit(tmp / "bad.json", R"({"scenes_per_class": -1})");
  CHECK(run({"gen", "--config", (tmp / "bad.json").string(), "--out", (tmp / "x").string()}).code == 1);
  testutil::spit(tmp / "bad_model.json", R"({"p_max": 2})");
  CHECK(run({"detect", "--data", data, "--model", (tmp / "bad_model.json").string(), "--out",
             (tmp / "d").string()})
            .code == 1);
  std::filesystem::create_directories(tmp / "broken");
  testutil::spit(tmp / "broken/close_c00000_v1.txt", "0 0.5 0.5\n");
  const auto bad = run({"eval", "--data", data, "--detections", (tmp / "broken").string()});
  CHECK(bad.code == 1);
  CHECK(bad.err.find(":1:") != std::string::npos);
  // Detections for only one image: the rest are missing.
  std::filesystem::create_directories(tmp / "sparse");
  testutil::spit(tmp / "sparse/close_c00000_v1.txt", "0 0.5 0.5 0.1 0.1 0.9\n");
  CHECK(run({"eval", "--data", data, "--detections", (tmp / "sparse").string()}).code == 1);

  CHECK(run({"--help"}).code == 0);
  CHECK(run({"gen", "--help"}).code == 0);
}

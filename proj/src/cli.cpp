#include "scs/cli.hpp"

#include <filesystem>
#include <map>
#include <ostream>

#include "CLI11.hpp"

#include "scs/dataset_io.hpp"
#include "scs/detector.hpp"
#include "scs/error.hpp"
#include "scs/eval.hpp"
#include "scs/fusion.hpp"
#include "scs/report.hpp"

namespace scs {

namespace fs = std::filesystem;

namespace {

struct Options {
  std::string config;
  std::string out;
  std::string data;
  std::string model = "default";
  std::string detections;
  std::string mode;
  std::string tag;
  bool stub_images = false;
  int scenes = 0;
  std::uint64_t cap_samples = 1'000'000;
};

int cmd_gen(const Options& o, std::ostream& out) {
  PipelineConfig cfg;
  if (!o.config.empty() && o.config != "default") cfg = load_config(o.config);
  if (o.scenes > 0) cfg.dataset.scenes_per_class = o.scenes;
  const Dataset ds = generate_dataset(cfg.dataset);
  ExportOptions eo;
  eo.stub_images = o.stub_images;
  const auto manifest = export_dataset(ds, cfg, o.out, eo);
  out << "generated " << ds.scenes.size() << " clusters, " << manifest.images.size() << " images -> " << o.out
      << " (config " << manifest.config_digest << ")\n";
  return kExitOk;
}

int cmd_select(const Options& o, std::ostream& out) {
  const auto imported = import_dataset(o.data);
  const auto& ds = imported.dataset;
  write_file_atomic(fs::path(o.data) / "selection.json", selection_json(ds, imported.manifest.config_digest));
  std::map<int, std::size_t> chosen;
  std::size_t bytes = 0;
  for (const auto& scene : ds.scenes) {
    const auto round = protocol_round(scene.views);
    ++chosen[round.result.chosen_index];
    bytes += round.total_bytes;
  }
  out << "selected viewpoints for " << ds.scenes.size() << " clusters:";
  for (const auto& [j, n] : chosen) out << " V" << j << "=" << n;
  out << "\nprotocol bytes: " << bytes << " total, " << kSelectionMessageBytes << " B per message\n";
  return kExitOk;
}

int cmd_detect(const Options& o, std::ostream& out) {
  const auto imported = import_dataset(o.data);
  DetectorModel model = imported.config.detector;
  if (o.model == "noiseless") {
    model = noiseless_detector_model();
  } else if (o.model != "default") {
    model = load_detector_model(o.model);
  }
  validate(model);
  std::error_code ec;
  fs::create_directories(o.out, ec);
  if (ec) throw Error("cannot create " + o.out + ": " + ec.message());
  const auto sets = synth_detect_all(model, imported.dataset);
  std::size_t boxes = 0;
  for (const auto& s : sets) {
    write_detection_file(o.out, s);
    boxes += s.boxes.size();
  }
  out << "wrote " << sets.size() << " detection files (" << boxes << " boxes, model '" << model.tag << "') -> "
      << o.out << "\n";
  return kExitOk;
}

IngestResult ingest_checked(const std::string& dir, const Dataset& ds, std::ostream& err) {
  auto ingested = ingest_detections(dir, &ds);
  for (const auto& id : ingested.unknown_image_ids) {
    err << "warning: detections for unknown image '" << id << "' ignored\n";
  }
  return ingested;
}

std::string strip_report_extension(const std::string& path) {
  fs::path p(path);
  if (p.extension() == ".txt" || p.extension() == ".json") p.replace_extension();
  return p.string();
}

int cmd_eval(const Options& o, std::ostream& out, std::ostream& err) {
  const auto imported = import_dataset(o.data);
  const auto ingested = ingest_checked(o.detections, imported.dataset, err);
  auto report = evaluate(imported.dataset, ingested.sets);
  report.config_digest = imported.manifest.config_digest;
  report.model_tag = o.tag.empty() ? fs::path(o.detections).filename().string() : o.tag;

  const std::string table = format_report_table(report);
  out << table;
  if (!o.out.empty()) {
    const std::string stem = strip_report_extension(o.out);
    write_file_atomic(stem + ".txt", table);
    write_file_atomic(stem + ".json", report_to_json(report));
    out << "report -> " << stem << ".{txt,json}\n";
  }
  return kExitOk;
}

int cmd_fuse(const Options& o, std::ostream& out, std::ostream& err) {
  const auto imported = import_dataset(o.data);
  const auto& ds = imported.dataset;
  const auto ingested = ingest_checked(o.detections, ds, err);
  const FusionMode mode = o.mode == "vote" ? FusionMode::Vote : FusionMode::Merge;
  const auto fused = fuse_dataset(ds, ingested.sets, mode, imported.config.fusion);

  auto report = evaluate(ds, ingested.sets);
  // Fused sets are scored against the central image they are keyed by.
  Partition fused_part = fixed_viewpoint(ds, 1);
  fused_part.label = o.mode;
  const auto fused_report = evaluate(std::span<const Partition>(&fused_part, 1), fused);
  report.rows.push_back(fused_report.rows.front());
  report.config_digest = imported.manifest.config_digest;
  out << format_report_table(report);

  if (!o.out.empty()) {
    std::error_code ec;
    fs::create_directories(o.out, ec);
    if (ec) throw Error("cannot create " + o.out + ": " + ec.message());
    for (const auto& s : fused) write_detection_file(o.out, s);
    out << "fused detections -> " << o.out << "\n";
  }
  return kExitOk;
}

int cmd_report(const Options& o, std::ostream& out) {
  const auto imported = import_dataset(o.data);
  const auto& ds = imported.dataset;
  const auto& cfg = imported.config;

  const auto table = distance_stats(ds);
  const bool dominance = check_vd_dominance(table);
  const std::string table_text = format_distance_table(table);
  out << "Mean distance (km) to visible targets\n" << table_text;
  out << "Vd dominance: " << (dominance ? "yes" : "NO") << "\n\n";

  std::string comm_text;
  for (auto s : {CommStrategy::Selection, CommStrategy::EarlyFusion}) {
    comm_text += format_comm_report(comm_cost(s, ds.config.k(), cfg.image_bytes(), cfg.comm.message_bytes,
                                              cfg.comm.link_gbps, cfg.comm.budget_ms)) +
                 "\n";
  }
  out << "Communication per cluster\n" << comm_text;
  char buf[128];
  std::snprintf(buf, sizeof(buf), "reaction budget: %.1f ms (%.3g km at %.3g km/s)\n",
                reaction_budget_ms(cfg.comm.reaction_distance_km, cfg.comm.closing_speed_km_s),
                cfg.comm.reaction_distance_km, cfg.comm.closing_speed_km_s);
  out << buf;

  const auto points = export_map_points(ds);
  if (!o.out.empty()) {
    std::error_code ec;
    fs::create_directories(o.out, ec);
    if (ec) throw Error("cannot create " + o.out + ": " + ec.message());
    const fs::path dir(o.out);
    write_file_atomic(dir / "distance_table.txt", table_text);
    write_file_atomic(dir / "map_points.csv", map_points_csv(points));
    write_file_atomic(dir / "comm_cost.txt", comm_text);
    write_file_atomic(dir / "report.json", dataset_report_json(ds, cfg, o.cap_samples));
    out << "report files -> " << o.out << "\n";
  } else {
    out << "\n" << dataset_report_json(ds, cfg, o.cap_samples);
  }
  return dominance ? kExitOk : kExitValidation;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Satellite-cluster viewpoint selection simulator"};
  app.require_subcommand(1);
  Options o;

  auto* gen = app.add_subcommand("gen", "Generate and export a dataset");
  gen->add_option("--config", o.config, "Config JSON file, or 'default'");
  gen->add_option("--out", o.out, "Output dataset directory")->required();
  gen->add_option("--scenes", o.scenes, "Override scenes per class")->check(CLI::PositiveNumber);
  gen->add_flag("--stub-images", o.stub_images, "Write black placeholder images");

  auto* sel = app.add_subcommand("select", "Run distance-based viewpoint selection");
  sel->add_option("--data", o.data, "Dataset directory")->required();

  auto* det = app.add_subcommand("detect", "Synthesize detections for every image");
  det->add_option("--data", o.data, "Dataset directory")->required();
  det->add_option("--model", o.model, "Detector model JSON, 'default' or 'noiseless'");
  det->add_option("--out", o.out, "Output detections directory")->required();

  auto* ev = app.add_subcommand("eval", "Score detections per viewpoint and cluster class");
  ev->add_option("--data", o.data, "Dataset directory")->required();
  ev->add_option("--detections", o.detections, "Directory of <image_id>.txt files")->required();
  ev->add_option("--out", o.out, "Report path; writes <path>.txt and <path>.json");
  ev->add_option("--tag", o.tag, "Model tag recorded in the report");

  auto* fu = app.add_subcommand("fuse", "Fuse per-view detections and compare with selection");
  fu->add_option("--data", o.data, "Dataset directory")->required();
  fu->add_option("--detections", o.detections, "Directory of <image_id>.txt files")->required();
  fu->add_option("--mode", o.mode, "merge or vote")->required()->check(CLI::IsMember({"merge", "vote"}));
  fu->add_option("--out", o.out, "Write fused detection files here");

  auto* rep = app.add_subcommand("report", "Distance table, map points, comm costs");
  rep->add_option("--data", o.data, "Dataset directory")->required();
  rep->add_option("--out", o.out, "Write report files here");
  rep->add_option("--cap-samples", o.cap_samples, "Monte Carlo samples for cap asymmetry");

  std::vector<const char*> argv;
  argv.reserve(args.size());
  for (const auto& a : args) argv.push_back(a.c_str());
  if (argv.empty()) argv.push_back("scs");

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  }

  try {
    if (gen->parsed()) return cmd_gen(o, out);
    if (sel->parsed()) return cmd_select(o, out);
    if (det->parsed()) return cmd_detect(o, out);
    if (ev->parsed()) return cmd_eval(o, out, err);
    if (fu->parsed()) return cmd_fuse(o, out, err);
    if (rep->parsed()) return cmd_report(o, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  }
  err << app.help();
  return kExitUsage;
}

}  // namespace scs

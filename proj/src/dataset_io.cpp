#include "scs/dataset_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

#include "json.hpp"

#include "scs/error.hpp"
#include "scs/text.hpp"

namespace scs {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

namespace {

// Reads an object's keys by name and rejects keys nobody asked for.
class ObjectReader {
 public:
  ObjectReader(const Json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ValidationError(path_ + ": expected an object");
  }

  bool has(const char* key) const { return j_.contains(key); }

  const Json& raw(const char* key) {
    seen_.insert(key);
    if (!j_.contains(key)) throw ValidationError(path_ + "." + key + ": missing");
    return j_.at(key);
  }

  template <typename T>
  void get(const char* key, T& out) {
    if (!j_.contains(key)) return;
    seen_.insert(key);
    out = convert<T>(j_.at(key), path_ + "." + key);
  }

  template <typename T>
  T require(const char* key) {
    if (!j_.contains(key)) throw ValidationError(path_ + "." + key + ": missing");
    T out{};
    get(key, out);
    return out;
  }

  void get_interval(const char* key, Interval& out) {
    if (!j_.contains(key)) return;
    seen_.insert(key);
    const auto v = convert<std::vector<double>>(j_.at(key), path_ + "." + key);
    if (v.size() != 2) throw ValidationError(path_ + "." + key + ": expected [min, max]");
    out = {v[0], v[1]};
  }

  void get_int_range(const char* key, IntRange& out) {
    if (!j_.contains(key)) return;
    seen_.insert(key);
    const auto v = convert<std::vector<int>>(j_.at(key), path_ + "." + key);
    if (v.size() != 2) throw ValidationError(path_ + "." + key + ": expected [min, max]");
    out = {v[0], v[1]};
  }

  void finish() const {
    for (const auto& item : j_.items()) {
      if (!seen_.contains(item.key())) {
        throw ValidationError(path_ + "." + item.key() + ": unknown key");
      }
    }
  }

  template <typename T>
  static T convert(const Json& v, const std::string& where) {
    if constexpr (std::is_same_v<T, double>) {
      if (!v.is_number()) throw ValidationError(where + ": expected a number");
    } else if constexpr (std::is_integral_v<T>) {
      if (!v.is_number_integer()) throw ValidationError(where + ": expected an integer");
      if constexpr (std::is_unsigned_v<T>) {
        if (v.is_number_integer() && !v.is_number_unsigned() && v.get<std::int64_t>() < 0) {
          throw ValidationError(where + ": expected a non-negative integer");
        }
      }
    } else if constexpr (std::is_same_v<T, std::string>) {
      if (!v.is_string()) throw ValidationError(where + ": expected a string");
    }
    try {
      return v.get<T>();
    } catch (const nlohmann::json::exception& e) {
      throw ValidationError(where + ": " + e.what());
    }
  }

 private:
  const Json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

Json interval_json(const Interval& i) { return Json::array({i.lo, i.hi}); }
Json int_range_json(const IntRange& i) { return Json::array({i.lo, i.hi}); }

void read_cluster_fields(ObjectReader& r, ClusterConfig& c) {
  r.get("k", c.k);
  r.get_interval("nearest_target_range_km", c.nearest_target_range_km);
  r.get_int_range("targets_per_scene", c.targets_per_scene);
  r.get_interval("altitude_range_km", c.altitude_range_km);
  r.get("extra_target_max_km", c.extra_target_max_km);
  r.get("bounding_radius_m", c.bounding_radius_m);
  r.get("max_attempts", c.max_attempts);
}

Json camera_json(const CameraConfig& c) {
  Json j;
  j["fov_deg"] = c.fov_deg;
  j["width_px"] = c.width_px;
  j["height_px"] = c.height_px;
  j["max_range_km"] = c.limits.max_range_km;
  j["min_apparent_px"] = c.limits.min_apparent_px;
  return j;
}

Json cluster_config_json(const ClusterConfig& c) {
  Json j;
  j["class"] = std::string(to_string(c.radius_class));
  j["radius_km"] = c.radius_km;
  j["k"] = c.k;
  j["nearest_target_range_km"] = interval_json(c.nearest_target_range_km);
  j["targets_per_scene"] = int_range_json(c.targets_per_scene);
  j["altitude_range_km"] = interval_json(c.altitude_range_km);
  j["extra_target_max_km"] = c.extra_target_max_km;
  j["bounding_radius_m"] = c.bounding_radius_m;
  j["max_attempts"] = c.max_attempts;
  return j;
}

Json detector_json(const DetectorModel& m) {
  Json j;
  j["p_max"] = m.p_max;
  j["area_half_px2"] = m.area_half_px2;
  j["area_slope"] = m.area_slope;
  j["center_jitter_frac"] = m.center_jitter_frac;
  j["size_jitter_frac"] = m.size_jitter_frac;
  j["fp_rate_per_image"] = m.fp_rate_per_image;
  j["conf_noise_sigma"] = m.conf_noise_sigma;
  j["seed"] = m.seed;
  j["tag"] = m.tag;
  return j;
}

DetectorModel detector_from_json(const Json& j, const std::string& path) {
  DetectorModel m;
  ObjectReader r(j, path);
  r.get("p_max", m.p_max);
  r.get("area_half_px2", m.area_half_px2);
  r.get("area_slope", m.area_slope);
  r.get("center_jitter_frac", m.center_jitter_frac);
  r.get("size_jitter_frac", m.size_jitter_frac);
  r.get("fp_rate_per_image", m.fp_rate_per_image);
  r.get("conf_noise_sigma", m.conf_noise_sigma);
  r.get("seed", m.seed);
  r.get("tag", m.tag);
  r.finish();
  validate(m);
  return m;
}

Json pipeline_json(const PipelineConfig& cfg) {
  Json j;
  j["master_seed"] = cfg.dataset.master_seed;
  j["scenes_per_class"] = cfg.dataset.scenes_per_class;
  j["camera"] = camera_json(cfg.dataset.camera);
  Json classes = Json::array();
  for (const auto& c : cfg.dataset.classes) classes.push_back(cluster_config_json(c));
  j["classes"] = classes;
  j["detector"] = detector_json(cfg.detector);
  Json f;
  f["iou_group_threshold"] = cfg.fusion.iou_group_threshold;
  f["min_votes"] = cfg.fusion.min_votes;
  f["merge_rule"] = std::string(to_string(cfg.fusion.merge_rule));
  j["fusion"] = f;
  Json c;
  c["link_gbps"] = cfg.comm.link_gbps;
  c["image_bytes"] = cfg.comm.image_bytes;
  c["message_bytes"] = cfg.comm.message_bytes;
  c["budget_ms"] = cfg.comm.budget_ms;
  c["reaction_distance_km"] = cfg.comm.reaction_distance_km;
  c["closing_speed_km_s"] = cfg.comm.closing_speed_km_s;
  j["comm"] = c;
  return j;
}

PipelineConfig pipeline_from_json(const Json& j, const std::string& path) {
  PipelineConfig cfg;
  ObjectReader r(j, path);
  r.get("master_seed", cfg.dataset.master_seed);
  r.get("scenes_per_class", cfg.dataset.scenes_per_class);

  if (r.has("camera")) {
    ObjectReader cr(r.raw("camera"), path + ".camera");
    auto& cam = cfg.dataset.camera;
    cr.get("fov_deg", cam.fov_deg);
    cr.get("width_px", cam.width_px);
    cr.get("height_px", cam.height_px);
    cr.get("max_range_km", cam.limits.max_range_km);
    cr.get("min_apparent_px", cam.limits.min_apparent_px);
    cr.finish();
  }

  // Shared cluster settings first, then per-class entries.
  if (r.has("cluster")) {
    ObjectReader sr(r.raw("cluster"), path + ".cluster");
    ClusterConfig shared;
    read_cluster_fields(sr, shared);
    sr.finish();
    for (auto& c : cfg.dataset.classes) {
      const auto cls = c.radius_class;
      const auto radius = c.radius_km;
      c = shared;
      c.radius_class = cls;
      c.radius_km = radius;
    }
  }
  if (r.has("classes")) {
    const Json& arr = r.raw("classes");
    if (!arr.is_array() || arr.empty()) throw ValidationError(path + ".classes: expected a non-empty array");
    std::vector<ClusterConfig> classes;
    for (std::size_t i = 0; i < arr.size(); ++i) {
      const std::string where = path + ".classes[" + std::to_string(i) + "]";
      ObjectReader cr(arr[i], where);
      const auto name = cr.require<std::string>("class");
      const auto cls = parse_radius_class(name);
      if (!cls) throw ValidationError(where + ".class: unknown class '" + name + "'");
      ClusterConfig c = default_cluster_config(*cls);
      for (const auto& base : cfg.dataset.classes) {
        if (base.radius_class == *cls) c = base;
      }
      cr.get("radius_km", c.radius_km);
      read_cluster_fields(cr, c);
      cr.finish();
      classes.push_back(c);
    }
    cfg.dataset.classes = std::move(classes);
  }

  if (r.has("detector")) cfg.detector = detector_from_json(r.raw("detector"), path + ".detector");

  if (r.has("fusion")) {
    ObjectReader fr(r.raw("fusion"), path + ".fusion");
    fr.get("iou_group_threshold", cfg.fusion.iou_group_threshold);
    fr.get("min_votes", cfg.fusion.min_votes);
    std::string rule{to_string(cfg.fusion.merge_rule)};
    fr.get("merge_rule", rule);
    cfg.fusion.merge_rule = parse_merge_rule(rule);
    fr.finish();
  }

  if (r.has("comm")) {
    ObjectReader cr(r.raw("comm"), path + ".comm");
    cr.get("link_gbps", cfg.comm.link_gbps);
    cr.get("image_bytes", cfg.comm.image_bytes);
    cr.get("message_bytes", cfg.comm.message_bytes);
    cr.get("budget_ms", cfg.comm.budget_ms);
    cr.get("reaction_distance_km", cfg.comm.reaction_distance_km);
    cr.get("closing_speed_km_s", cfg.comm.closing_speed_km_s);
    cr.finish();
  }
  r.finish();

  validate(cfg.dataset);
  validate(cfg.fusion, cfg.dataset.k());
  if (!(cfg.comm.link_gbps > 0.0) || cfg.comm.message_bytes == 0 || !(cfg.comm.budget_ms > 0.0) ||
      !(cfg.comm.reaction_distance_km > 0.0) || !(cfg.comm.closing_speed_km_s > 0.0)) {
    throw ValidationError(path + ".comm: rates, sizes and budgets must be positive");
  }
  return cfg;
}

Json parse_json_text(std::string_view text, const std::string& source) {
  try {
    return Json::parse(text.begin(), text.end());
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError(source + ": " + e.what());
  }
}

}  // namespace

std::uint64_t PipelineConfig::image_bytes() const {
  if (comm.image_bytes != 0) return comm.image_bytes;
  return static_cast<std::uint64_t>(dataset.camera.width_px) *
         static_cast<std::uint64_t>(dataset.camera.height_px) * 3U;
}

PipelineConfig parse_config(std::string_view json_text) {
  return pipeline_from_json(parse_json_text(json_text, "config"), "config");
}

PipelineConfig load_config(const fs::path& path) {
  const auto text = read_file(path);
  return pipeline_from_json(parse_json_text(text, path.string()), path.string());
}

std::string config_to_json(const PipelineConfig& cfg, int indent) {
  return pipeline_json(cfg).dump(indent);
}

std::string config_digest(const PipelineConfig& cfg) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(fnv1a64(pipeline_json(cfg).dump())));
  return buf;
}

DetectorModel parse_detector_model(std::string_view json_text) {
  return detector_from_json(parse_json_text(json_text, "detector model"), "detector");
}

DetectorModel load_detector_model(const fs::path& path) {
  return detector_from_json(parse_json_text(read_file(path), path.string()), path.string());
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file_atomic(const fs::path& path, std::string_view contents) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp.string());
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) throw Error("write failed: " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw Error("cannot rename " + tmp.string() + " to " + path.string() + ": " + ec.message());
}

// ---------------------------------------------------------------------------
// Per-image files

std::string labels_text(const Observation& obs) {
  std::string out;
  for (const auto& e : obs.entries) {
    out += std::to_string(e.box.class_id) + ' ' + format_number(e.box.cx) + ' ' +
           format_number(e.box.cy) + ' ' + format_number(e.box.w) + ' ' + format_number(e.box.h) + '\n';
  }
  return out;
}

namespace {

Json meta_document(const Scene& scene, const Observation& obs) {
  const auto& sat = scene.cluster.member(obs.viewpoint_index);
  Json j;
  Json s;
  s["sat_id"] = sat.sat_id;
  s["latitude_deg"] = sat.geodetic.lat_deg;
  s["longitude_deg"] = sat.geodetic.lon_deg;
  s["altitude_km"] = sat.geodetic.alt_km;
  s["inclination_deg"] = sat.elements.inclination_deg;
  s["raan_deg"] = sat.elements.raan_deg;
  j["satellite"] = s;
  Json objects = Json::array();
  for (const auto& e : obs.entries) {
    const auto it = std::find_if(scene.cluster.targets.begin(), scene.cluster.targets.end(),
                                 [&](const TargetObject& t) { return t.object_id == e.object_id; });
    if (it == scene.cluster.targets.end()) throw Error("observation references unknown object");
    Json o;
    o["object_id"] = e.object_id;
    o["screen_position_px"] = Json::array({e.screen_x_px, e.screen_y_px});
    o["bbox"] = Json::array({e.box.cx, e.box.cy, e.box.w, e.box.h});
    o["distance_km"] = e.distance_km;
    o["latitude_deg"] = it->geodetic.lat_deg;
    o["longitude_deg"] = it->geodetic.lon_deg;
    o["altitude_km"] = it->geodetic.alt_km;
    o["inclination_deg"] = it->elements.inclination_deg;
    o["raan_deg"] = it->elements.raan_deg;
    objects.push_back(o);
  }
  j["objects"] = objects;
  return j;
}

Json vec_json(const Vec3& v) { return Json::array({v.x, v.y, v.z}); }

Json elements_json(const OrbitalElements& e) {
  Json j;
  j["altitude_km"] = e.altitude_km;
  j["inclination_deg"] = e.inclination_deg;
  j["raan_deg"] = e.raan_deg;
  j["phase_deg"] = e.phase_deg;
  return j;
}

Json satellite_json(const SatelliteState& s) {
  Json j;
  j["sat_id"] = s.sat_id;
  j["position_km"] = vec_json(s.position);
  j["elements"] = elements_json(s.elements);
  return j;
}

Json cluster_json(const Cluster& c) {
  Json j;
  j["cluster_id"] = c.cluster_id;
  j["class"] = std::string(to_string(c.radius_class));
  j["radius_km"] = c.radius_km;
  j["central"] = satellite_json(c.central);
  Json sec = Json::array();
  for (const auto& s : c.secondaries) sec.push_back(satellite_json(s));
  j["secondaries"] = sec;
  Json targets = Json::array();
  for (const auto& t : c.targets) {
    Json tj;
    tj["object_id"] = t.object_id;
    tj["position_km"] = vec_json(t.position);
    tj["bounding_radius_m"] = t.bounding_radius_m;
    tj["elements"] = elements_json(t.elements);
    targets.push_back(tj);
  }
  j["targets"] = targets;
  return j;
}

Json selection_result_json(const SelectionResult& s) {
  Json j;
  j["cluster_id"] = s.cluster_id;
  j["chosen_index"] = s.chosen_index;
  j["chosen_sat_id"] = s.chosen_sat_id;
  Json scores = Json::array();
  for (const auto& v : s.scores) {
    Json sj;
    sj["viewpoint"] = v.viewpoint_index;
    sj["sat_id"] = v.sat_id;
    sj["mean_distance_km"] = v.mean_distance_km;
    sj["visible_count"] = v.visible_count;
    scores.push_back(sj);
  }
  j["scores"] = scores;
  return j;
}

std::string cluster_dir_name(ClusterId id) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "c%05u", static_cast<unsigned>(id));
  return buf;
}

std::string stub_pgm(int width, int height) {
  std::string out = "P5\n" + std::to_string(width) + " " + std::to_string(height) + "\n255\n";
  out.append(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), '\0');
  return out;
}

}  // namespace

std::string meta_json(const Scene& scene, const Observation& obs) {
  return meta_document(scene, obs).dump(2) + "\n";
}

DatasetManifest export_dataset(const Dataset& dataset, const fs::path& dir, const ExportOptions& options) {
  PipelineConfig cfg;
  cfg.dataset = dataset.config;
  return export_dataset(dataset, cfg, dir, options);
}

DatasetManifest export_dataset(const Dataset& dataset, const PipelineConfig& cfg, const fs::path& dir,
                               const ExportOptions& options) {
  if (!(cfg.dataset == dataset.config)) {
    throw ValidationError("export_dataset: pipeline config does not match the dataset's config");
  }
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error("cannot create " + dir.string() + ": " + ec.message());

  // Take down the previous commit point before touching its files.
  const fs::path manifest_path = dir / "manifest.json";
  fs::remove(manifest_path, ec);
  for (auto cls : kRadiusClasses) fs::remove_all(dir / std::string(to_string(cls)), ec);
  fs::remove(dir / "selection.json", ec);

  DatasetManifest manifest;
  manifest.master_seed = dataset.config.master_seed;
  manifest.config_digest = config_digest(cfg);
  manifest.selections = select_all(dataset);

  for (const auto& scene : dataset.scenes) {
    const fs::path rel_dir = fs::path(std::string(to_string(scene.cluster.radius_class))) /
                             cluster_dir_name(scene.cluster.cluster_id);
    fs::create_directories(dir / rel_dir, ec);
    if (ec) throw Error("cannot create " + (dir / rel_dir).string() + ": " + ec.message());
    for (const auto& view : scene.views) {
      ImageRecord rec;
      rec.image_id = view.image_id;
      rec.cluster_id = view.cluster_id;
      rec.radius_class = view.radius_class;
      rec.viewpoint_index = view.viewpoint_index;
      const std::string stem = "v" + std::to_string(view.viewpoint_index);
      rec.labels_path = (rel_dir / (stem + ".labels.txt")).generic_string();
      rec.meta_path = (rel_dir / (stem + ".meta.json")).generic_string();
      write_file_atomic(dir / rec.labels_path, labels_text(view));
      write_file_atomic(dir / rec.meta_path, meta_json(scene, view));
      if (options.stub_images) {
        rec.image_path = (rel_dir / (stem + ".pgm")).generic_string();
        write_file_atomic(dir / rec.image_path, stub_pgm(view.pose.width_px, view.pose.height_px));
      }
      manifest.images.push_back(std::move(rec));
    }
  }

  Json m;
  m["format"] = std::string(kDatasetFormat);
  m["version"] = manifest.version;
  m["master_seed"] = manifest.master_seed;
  m["config_digest"] = manifest.config_digest;
  m["config"] = pipeline_json(cfg);
  Json clusters = Json::array();
  for (const auto& scene : dataset.scenes) clusters.push_back(cluster_json(scene.cluster));
  m["clusters"] = clusters;
  Json images = Json::array();
  for (const auto& rec : manifest.images) {
    Json ij;
    ij["image_id"] = rec.image_id;
    ij["cluster_id"] = rec.cluster_id;
    ij["class"] = std::string(to_string(rec.radius_class));
    ij["viewpoint"] = rec.viewpoint_index;
    ij["labels"] = rec.labels_path;
    ij["meta"] = rec.meta_path;
    if (!rec.image_path.empty()) ij["image"] = rec.image_path;
    images.push_back(ij);
  }
  m["images"] = images;
  Json sel = Json::array();
  for (const auto& s : manifest.selections) sel.push_back(selection_result_json(s));
  m["selection"] = sel;
  write_file_atomic(manifest_path, m.dump(2) + "\n");
  return manifest;
}

// ---------------------------------------------------------------------------
// Import

namespace {

// Geometry tolerances for re-validation of stored values.
constexpr double kBoundSlackKm = 1e-9;
constexpr double kElementsTolKm = 1e-6;
constexpr double kFileTol = 1e-9;

Vec3 vec_from_json(const Json& j, const std::string& where) {
  const auto v = ObjectReader::convert<std::vector<double>>(j, where);
  if (v.size() != 3) throw ValidationError(where + ": expected [x, y, z]");
  return {v[0], v[1], v[2]};
}

OrbitalElements elements_from_json(const Json& j, const std::string& where) {
  ObjectReader r(j, where);
  OrbitalElements e;
  e.altitude_km = r.require<double>("altitude_km");
  e.inclination_deg = r.require<double>("inclination_deg");
  e.raan_deg = r.require<double>("raan_deg");
  e.phase_deg = r.require<double>("phase_deg");
  r.finish();
  return e;
}

SatelliteState satellite_from_json(const Json& j, const std::string& where) {
  ObjectReader r(j, where);
  SatelliteState s;
  s.sat_id = r.require<SatId>("sat_id");
  s.position = vec_from_json(r.raw("position_km"), where + ".position_km");
  s.elements = elements_from_json(r.raw("elements"), where + ".elements");
  r.finish();
  if (norm(orbit_position(s.elements) - s.position) > kElementsTolKm) {
    throw ValidationError(where + ".elements: inconsistent with position_km");
  }
  s.geodetic = eci_to_geodetic(s.position);
  return s;
}

Cluster cluster_from_json(const Json& j, const std::string& where, const DatasetConfig& cfg) {
  ObjectReader r(j, where);
  Cluster c;
  c.cluster_id = r.require<ClusterId>("cluster_id");
  const auto name = r.require<std::string>("class");
  const auto cls = parse_radius_class(name);
  if (!cls) throw ValidationError(where + ".class: unknown class '" + name + "'");
  c.radius_class = *cls;
  c.radius_km = r.require<double>("radius_km");
  c.central = satellite_from_json(r.raw("central"), where + ".central");
  const Json& sec = r.raw("secondaries");
  if (!sec.is_array()) throw ValidationError(where + ".secondaries: expected an array");
  for (std::size_t i = 0; i < sec.size(); ++i) {
    c.secondaries.push_back(satellite_from_json(sec[i], where + ".secondaries[" + std::to_string(i) + "]"));
  }
  const Json& targets = r.raw("targets");
  if (!targets.is_array() || targets.empty()) throw ValidationError(where + ".targets: expected a non-empty array");
  for (std::size_t i = 0; i < targets.size(); ++i) {
    const std::string tw = where + ".targets[" + std::to_string(i) + "]";
    ObjectReader tr(targets[i], tw);
    TargetObject t;
    t.object_id = tr.require<ObjectId>("object_id");
    t.position = vec_from_json(tr.raw("position_km"), tw + ".position_km");
    t.bounding_radius_m = tr.require<double>("bounding_radius_m");
    t.elements = elements_from_json(tr.raw("elements"), tw + ".elements");
    tr.finish();
    if (!(t.bounding_radius_m > 0.0)) throw ValidationError(tw + ".bounding_radius_m: must be > 0");
    if (norm(orbit_position(t.elements) - t.position) > kElementsTolKm) {
      throw ValidationError(tw + ".elements: inconsistent with position_km");
    }
    t.geodetic = eci_to_geodetic(t.position);
    c.targets.push_back(t);
  }
  r.finish();

  const ClusterConfig* cc = nullptr;
  for (const auto& k : cfg.classes) {
    if (k.radius_class == c.radius_class) cc = &k;
  }
  if (!cc) throw ValidationError(where + ".class: not configured");
  if (c.radius_km != cc->radius_km) throw ValidationError(where + ".radius_km: differs from config");
  if (c.size() != cc->k) throw ValidationError(where + ".secondaries: cluster size differs from k");
  if (c.central.sat_id != make_sat_id(c.cluster_id, 1)) throw ValidationError(where + ".central.sat_id: unexpected id");
  for (int jdx = 2; jdx <= c.size(); ++jdx) {
    const auto& s = c.member(jdx);
    const std::string sw = where + ".secondaries[" + std::to_string(jdx - 2) + "]";
    if (s.sat_id != make_sat_id(c.cluster_id, jdx)) throw ValidationError(sw + ".sat_id: unexpected id");
    if (distance(s.position, c.central.position) > c.radius_km + kBoundSlackKm) {
      throw ValidationError(sw + ".position_km: secondary beyond cluster radius");
    }
  }
  double nearest = std::numeric_limits<double>::infinity();
  for (const auto& t : c.targets) nearest = std::min(nearest, distance(t.position, c.central.position));
  if (nearest < cc->nearest_target_range_km.lo - kBoundSlackKm ||
      nearest > cc->nearest_target_range_km.hi + kBoundSlackKm) {
    throw ValidationError(where + ".targets: nearest target outside nearest_target_range_km");
  }
  return c;
}

// First differing path, or empty when a and b agree (numbers within tol).
std::string json_difference(const Json& a, const Json& b, const std::string& path) {
  if (a.is_number() && b.is_number()) {
    const double x = a.get<double>();
    const double y = b.get<double>();
    return std::abs(x - y) <= kFileTol * std::max(1.0, std::abs(y)) ? "" : path;
  }
  if (a.type() != b.type()) return path;
  if (a.is_object()) {
    if (a.size() != b.size()) return path;
    for (const auto& item : b.items()) {
      if (!a.contains(item.key())) return path + "." + item.key();
      auto d = json_difference(a.at(item.key()), item.value(), path + "." + item.key());
      if (!d.empty()) return d;
    }
    return "";
  }
  if (a.is_array()) {
    if (a.size() != b.size()) return path;
    for (std::size_t i = 0; i < a.size(); ++i) {
      auto d = json_difference(a[i], b[i], path + "[" + std::to_string(i) + "]");
      if (!d.empty()) return d;
    }
    return "";
  }
  return a == b ? "" : path;
}

void check_labels(const fs::path& file, const Observation& view) {
  std::istringstream in(read_file(file));
  std::string line;
  std::size_t line_no = 0, idx = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto fields = split_fields(line);
    if (fields.empty()) continue;
    if (fields.size() != 5) throw ParseError(file.string(), line_no, "expected `class cx cy w h`");
    if (idx >= view.entries.size()) throw ParseError(file.string(), line_no, "more labels than visible objects");
    const auto& box = view.entries[idx].box;
    const auto cls = parse_int(fields[0]);
    if (!cls || *cls != box.class_id) throw ParseError(file.string(), line_no, "class mismatch");
    const double expect[] = {box.cx, box.cy, box.w, box.h};
    for (std::size_t i = 0; i < 4; ++i) {
      const auto v = parse_number(fields[i + 1]);
      if (!v || std::abs(*v - expect[i]) > kFileTol) {
        throw ParseError(file.string(), line_no, "box does not match cluster geometry");
      }
    }
    ++idx;
  }
  if (idx != view.entries.size()) throw ValidationError(file.string() + ": fewer labels than visible objects");
}

SelectionResult selection_from_json(const Json& j, const std::string& where) {
  ObjectReader r(j, where);
  SelectionResult s;
  s.cluster_id = r.require<ClusterId>("cluster_id");
  s.chosen_index = r.require<int>("chosen_index");
  s.chosen_sat_id = r.require<SatId>("chosen_sat_id");
  const Json& scores = r.raw("scores");
  if (!scores.is_array()) throw ValidationError(where + ".scores: expected an array");
  for (std::size_t i = 0; i < scores.size(); ++i) {
    ObjectReader sr(scores[i], where + ".scores[" + std::to_string(i) + "]");
    ViewpointScore v;
    v.viewpoint_index = sr.require<int>("viewpoint");
    v.sat_id = sr.require<SatId>("sat_id");
    v.mean_distance_km = sr.require<double>("mean_distance_km");
    v.visible_count = sr.require<int>("visible_count");
    sr.finish();
    s.scores.push_back(v);
  }
  r.finish();
  return s;
}

}  // namespace

ImportedDataset import_dataset(const fs::path& dir) {
  const fs::path manifest_path = dir / "manifest.json";
  if (!fs::exists(manifest_path)) throw ValidationError(manifest_path.string() + ": missing manifest");
  const std::string mp = manifest_path.string();
  const Json m = parse_json_text(read_file(manifest_path), mp);

  ObjectReader r(m, mp);
  if (r.require<std::string>("format") != kDatasetFormat) throw ValidationError(mp + ".format: not an scs dataset");
  const auto version = r.require<std::string>("version");
  if (version != kDatasetVersion) {
    throw ValidationError(mp + ".version: unsupported dataset version '" + version + "' (expected " +
                          std::string(kDatasetVersion) + ")");
  }

  ImportedDataset out;
  out.config = pipeline_from_json(r.raw("config"), mp + ".config");
  out.manifest.version = version;
  out.manifest.master_seed = r.require<std::uint64_t>("master_seed");
  out.manifest.config_digest = r.require<std::string>("config_digest");
  if (out.manifest.config_digest != config_digest(out.config)) {
    throw ValidationError(mp + ".config_digest: does not match config");
  }
  if (out.manifest.master_seed != out.config.dataset.master_seed) {
    throw ValidationError(mp + ".master_seed: differs from config.master_seed");
  }

  Dataset& ds = out.dataset;
  ds.config = out.config.dataset;
  const Json& clusters = r.raw("clusters");
  if (!clusters.is_array()) throw ValidationError(mp + ".clusters: expected an array");
  std::set<ClusterId> ids;
  std::map<RadiusClass, int> per_class;
  for (std::size_t i = 0; i < clusters.size(); ++i) {
    Scene scene;
    const std::string where = mp + ".clusters[" + std::to_string(i) + "]";
    scene.cluster = cluster_from_json(clusters[i], where, ds.config);
    if (!ids.insert(scene.cluster.cluster_id).second) throw ValidationError(where + ".cluster_id: duplicate");
    ++per_class[scene.cluster.radius_class];
    scene.views = render_scene(scene.cluster, ds.config.camera);
    for (const auto& v : scene.views) {
      if (v.entries.empty()) {
        throw ValidationError(where + ": viewpoint " + std::to_string(v.viewpoint_index) + " sees no target");
      }
    }
    ds.scenes.push_back(std::move(scene));
  }
  for (const auto& c : ds.config.classes) {
    if (per_class[c.radius_class] != ds.config.scenes_per_class) {
      throw ValidationError(mp + ".clusters: class " + std::string(to_string(c.radius_class)) +
                            " does not have scenes_per_class clusters");
    }
  }

  std::map<std::string, std::pair<const Scene*, const Observation*>> views;
  for (const auto& scene : ds.scenes) {
    for (const auto& v : scene.views) views[v.image_id] = {&scene, &v};
  }

  const Json& images = r.raw("images");
  if (!images.is_array()) throw ValidationError(mp + ".images: expected an array");
  std::set<std::string> referenced;
  std::set<std::string> seen_ids;
  for (std::size_t i = 0; i < images.size(); ++i) {
    const std::string where = mp + ".images[" + std::to_string(i) + "]";
    ObjectReader ir(images[i], where);
    ImageRecord rec;
    rec.image_id = ir.require<std::string>("image_id");
    rec.cluster_id = ir.require<ClusterId>("cluster_id");
    const auto cls_name = ir.require<std::string>("class");
    const auto cls = parse_radius_class(cls_name);
    if (!cls) throw ValidationError(where + ".class: unknown class '" + cls_name + "'");
    rec.radius_class = *cls;
    rec.viewpoint_index = ir.require<int>("viewpoint");
    rec.labels_path = ir.require<std::string>("labels");
    rec.meta_path = ir.require<std::string>("meta");
    ir.get("image", rec.image_path);
    ir.finish();

    if (!seen_ids.insert(rec.image_id).second) throw ValidationError(where + ".image_id: duplicate");
    const auto it = views.find(rec.image_id);
    if (it == views.end()) throw ValidationError(where + ".image_id: no such view in clusters");
    const auto& [scene, view] = it->second;
    if (rec.cluster_id != view->cluster_id || rec.radius_class != view->radius_class ||
        rec.viewpoint_index != view->viewpoint_index) {
      throw ValidationError(where + ": image record does not match its cluster");
    }
    for (const auto* p : {&rec.labels_path, &rec.meta_path, &rec.image_path}) {
      if (p->empty()) continue;
      if (!fs::is_regular_file(dir / *p)) throw ValidationError((dir / *p).string() + ": missing file");
      referenced.insert((dir / *p).lexically_normal().generic_string());
    }
    check_labels(dir / rec.labels_path, *view);
    const fs::path meta_file = dir / rec.meta_path;
    const Json meta = parse_json_text(read_file(meta_file), meta_file.string());
    const auto diff = json_difference(meta, meta_document(*scene, *view), "");
    if (!diff.empty()) {
      throw ValidationError(meta_file.string() + ": field '" + diff + "' does not match cluster geometry");
    }
    out.manifest.images.push_back(std::move(rec));
  }
  if (seen_ids.size() != views.size()) throw ValidationError(mp + ".images: not every view has an image record");

  for (auto cls : kRadiusClasses) {
    const fs::path class_dir = dir / std::string(to_string(cls));
    if (!fs::exists(class_dir)) continue;
    for (const auto& item : fs::recursive_directory_iterator(class_dir)) {
      if (!item.is_regular_file()) continue;
      if (!referenced.contains(item.path().lexically_normal().generic_string())) {
        throw ValidationError(item.path().string() + ": file not referenced by manifest");
      }
    }
  }

  const Json& sel = r.raw("selection");
  if (!sel.is_array()) throw ValidationError(mp + ".selection: expected an array");
  for (std::size_t i = 0; i < sel.size(); ++i) {
    out.manifest.selections.push_back(selection_from_json(sel[i], mp + ".selection[" + std::to_string(i) + "]"));
  }
  const auto recomputed = select_all(ds);
  if (out.manifest.selections.size() != recomputed.size()) {
    throw ValidationError(mp + ".selection: does not cover every cluster");
  }
  for (std::size_t i = 0; i < recomputed.size(); ++i) {
    const auto& a = out.manifest.selections[i];
    const auto& b = recomputed[i];
    if (a.cluster_id != b.cluster_id || a.chosen_index != b.chosen_index || a.chosen_sat_id != b.chosen_sat_id) {
      throw ValidationError(mp + ".selection[" + std::to_string(i) + "]: does not match recomputed selection");
    }
  }
  r.finish();
  return out;
}

// ---------------------------------------------------------------------------
// Map export and selection file

std::vector<MapPoint> export_map_points(const Dataset& dataset) {
  if (dataset.scenes.empty()) throw Error("export_map_points: empty dataset");
  std::vector<MapPoint> points;
  points.reserve(dataset.scenes.size());
  for (const auto& scene : dataset.scenes) {
    const auto& c = scene.cluster;
    MapPoint p;
    p.cluster_id = c.cluster_id;
    p.lat_deg = c.central.geodetic.lat_deg;
    p.lon_deg = c.central.geodetic.lon_deg;
    for (int a = 1; a <= c.size(); ++a) {
      for (int b = a + 1; b <= c.size(); ++b) {
        const Vec3& pa = c.member(a).position;
        const Vec3& pb = c.member(b).position;
        // atan2 form stays accurate for the tiny angles between cluster members.
        const double angle = std::atan2(norm(cross(pa, pb)), dot(pa, pb)) * 180.0 / std::numbers::pi;
        p.spread_deg = std::max(p.spread_deg, angle);
      }
    }
    points.push_back(p);
  }
  return points;
}

std::string map_points_csv(std::span<const MapPoint> points) {
  std::string out = "cluster_id,lat_deg,lon_deg,spread_deg\n";
  for (const auto& p : points) {
    out += std::to_string(p.cluster_id) + ',' + format_number(p.lat_deg) + ',' + format_number(p.lon_deg) +
           ',' + format_number(p.spread_deg) + '\n';
  }
  return out;
}

std::string selection_json(const Dataset& dataset, const std::string& digest) {
  Json j;
  j["config_digest"] = digest;
  j["wire_message_bytes"] = kSelectionMessageBytes;
  Json results = Json::array();
  std::size_t total_bytes = 0, messages = 0;
  for (const auto& scene : dataset.scenes) {
    const auto round = protocol_round(scene.views);
    Json rj = selection_result_json(round.result);
    rj["protocol_bytes"] = round.total_bytes;
    results.push_back(rj);
    total_bytes += round.total_bytes;
    messages += round.messages.size();
  }
  j["clusters"] = dataset.scenes.size();
  j["messages"] = messages;
  j["total_protocol_bytes"] = total_bytes;
  j["results"] = results;
  return j.dump(2) + "\n";
}

}  // namespace scs

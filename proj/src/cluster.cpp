#include "scs/cluster.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "scs/error.hpp"
#include "scs/viewpoint.hpp"

namespace scs {

std::string_view to_string(RadiusClass c) {
  switch (c) {
    case RadiusClass::Close: return "close";
    case RadiusClass::Mid: return "mid";
    case RadiusClass::Far: return "far";
  }
  return "unknown";
}

std::optional<RadiusClass> parse_radius_class(std::string_view s) {
  for (auto c : kRadiusClasses) {
    if (to_string(c) == s) return c;
  }
  return std::nullopt;
}

double default_radius_km(RadiusClass c) {
  switch (c) {
    case RadiusClass::Close: return 0.5;
    case RadiusClass::Mid: return 1.0;
    case RadiusClass::Far: return 2.0;
  }
  return 0.0;
}

ClusterConfig default_cluster_config(RadiusClass cls) {
  ClusterConfig cfg;
  cfg.radius_class = cls;
  cfg.radius_km = default_radius_km(cls);
  return cfg;
}

void validate(const ClusterConfig& cfg) {
  const std::string where = "cluster config (" + std::string(to_string(cfg.radius_class)) + "): ";
  if (!(cfg.radius_km > 0.0)) throw ValidationError(where + "radius_km must be > 0");
  if (cfg.k < 2 || cfg.k > kMaxClusterMembers) {
    throw ValidationError(where + "k must be in [2, 255]");
  }
  const auto& near = cfg.nearest_target_range_km;
  if (!(near.lo > 0.0) || !(near.lo < near.hi)) {
    throw ValidationError(where + "nearest_target_range_km needs 0 < min < max");
  }
  if (cfg.targets_per_scene.lo < 1 || cfg.targets_per_scene.lo > cfg.targets_per_scene.hi ||
      cfg.targets_per_scene.hi > kMaxClusterMembers) {
    throw ValidationError(where + "targets_per_scene needs 1 <= min <= max <= 255");
  }
  const auto& alt = cfg.altitude_range_km;
  if (!(alt.lo > 0.0) || alt.lo > alt.hi) {
    throw ValidationError(where + "altitude_range_km needs 0 < min <= max");
  }
  if (!(cfg.extra_target_max_km >= near.hi)) {
    throw ValidationError(where + "extra_target_max_km must be >= nearest range max");
  }
  if (!(cfg.bounding_radius_m > 0.0)) throw ValidationError(where + "bounding_radius_m must be > 0");
  if (cfg.max_attempts < 1) throw ValidationError(where + "max_attempts must be >= 1");
}

void validate(const DatasetConfig& cfg) {
  if (cfg.scenes_per_class < 1) throw ValidationError("scenes_per_class must be >= 1");
  if (cfg.classes.empty()) throw ValidationError("dataset config has no cluster classes");
  for (const auto& c : cfg.classes) {
    validate(c);
    if (c.k != cfg.classes.front().k) {
      throw ValidationError("every cluster class must use the same k");
    }
  }
  const auto& cam = cfg.camera;
  if (!(cam.fov_deg > 0.0 && cam.fov_deg < 180.0)) throw ValidationError("camera fov_deg outside (0, 180)");
  if (cam.width_px < 1 || cam.height_px < 1) throw ValidationError("camera resolution must be positive");
  if (!(cam.limits.max_range_km > 0.0)) throw ValidationError("camera max_range_km must be > 0");
  if (cam.limits.min_apparent_px < 0.0) throw ValidationError("camera min_apparent_px must be >= 0");
}

const SatelliteState& Cluster::member(int viewpoint_index) const {
  if (viewpoint_index == 1) return central;
  if (viewpoint_index < 1 || viewpoint_index > size()) {
    throw Error("cluster " + std::to_string(cluster_id) + " has no member " +
                std::to_string(viewpoint_index));
  }
  return secondaries[viewpoint_index - 2];
}

std::size_t Dataset::image_count() const {
  std::size_t n = 0;
  for (const auto& s : scenes) n += s.views.size();
  return n;
}

const Observation* Dataset::find_image(std::string_view image_id) const {
  for (const auto& s : scenes) {
    for (const auto& v : s.views) {
      if (v.image_id == image_id) return &v;
    }
  }
  return nullptr;
}

EciPosition sample_uniform_ball(const EciPosition& center, double radius_km, Rng& rng) {
  const Vec3 dir = rng.unit_vector();
  const double rho = radius_km * std::cbrt(rng.uniform());
  return center + dir * rho;
}

Vec3 sample_cone_direction(const Vec3& axis, double half_angle_deg, Rng& rng) {
  const Vec3 a = normalized(axis);
  const Vec3 u = camera_up_for(a);
  const Vec3 v = cross(u, a);
  const double cos_max = std::cos(half_angle_deg * std::numbers::pi / 180.0);
  const double cos_t = rng.uniform(cos_max, 1.0);
  const double sin_t = std::sqrt(std::max(0.0, 1.0 - cos_t * cos_t));
  const double phi = rng.uniform(0.0, 2.0 * std::numbers::pi);
  return a * cos_t + u * (sin_t * std::cos(phi)) + v * (sin_t * std::sin(phi));
}

namespace {

SatelliteState make_satellite(SatId id, const EciPosition& p, const Vec3& motion) {
  SatelliteState s;
  s.sat_id = id;
  s.position = p;
  s.elements = elements_through(p, motion);
  s.geodetic = eci_to_geodetic(p);
  return s;
}

TargetObject make_target(ObjectId id, const EciPosition& p, const Vec3& motion, double radius_m) {
  TargetObject t;
  t.object_id = id;
  t.position = p;
  t.bounding_radius_m = radius_m;
  t.elements = elements_through(p, motion);
  t.geodetic = eci_to_geodetic(p);
  return t;
}

// Cone inscribed in the image frustum, so a farther target is in view of the
// central camera whenever it is large enough to register.
double inscribed_cone_deg(const CameraConfig& camera) {
  const double tan_h = std::tan(0.5 * camera.fov_deg * std::numbers::pi / 180.0);
  const double aspect = static_cast<double>(std::min(camera.width_px, camera.height_px)) /
                        static_cast<double>(camera.width_px);
  return std::atan(tan_h * aspect) * 180.0 / std::numbers::pi;
}

bool any_engulfed(const Cluster& c) {
  for (const auto& t : c.targets) {
    const double rho_km = t.bounding_radius_m / 1000.0;
    if (distance(t.position, c.central.position) <= 2.0 * rho_km) return true;
    for (const auto& s : c.secondaries) {
      if (distance(t.position, s.position) <= 2.0 * rho_km) return true;
    }
  }
  return false;
}

}  // namespace

Cluster generate_cluster(const ClusterConfig& cfg, const CameraConfig& camera,
                         ClusterId cluster_id, Rng& rng) {
  validate(cfg);
  const double cone_deg = inscribed_cone_deg(camera);

  for (int attempt = 0; attempt < cfg.max_attempts; ++attempt) {
    OrbitalElements el;
    el.altitude_km = rng.uniform(cfg.altitude_range_km.lo, cfg.altitude_range_km.hi);
    el.inclination_deg = rng.uniform(0.0, 180.0);
    el.raan_deg = rng.uniform(0.0, 360.0);
    el.phase_deg = rng.uniform(0.0, 360.0);

    Cluster c;
    c.cluster_id = cluster_id;
    c.radius_class = cfg.radius_class;
    c.radius_km = cfg.radius_km;

    const Vec3 motion = orbit_direction(el);
    c.central.sat_id = make_sat_id(cluster_id, 1);
    c.central.position = orbit_position(el);
    c.central.elements = normalize(el);
    c.central.geodetic = eci_to_geodetic(c.central.position);

    const double nearest_km = rng.uniform(cfg.nearest_target_range_km.lo, cfg.nearest_target_range_km.hi);
    const Vec3 axis = rng.unit_vector();
    c.targets.push_back(make_target(make_object_id(cluster_id, 0),
                                    c.central.position + axis * nearest_km, motion,
                                    cfg.bounding_radius_m));

    const int n_targets = rng.uniform_int(cfg.targets_per_scene.lo, cfg.targets_per_scene.hi);
    for (int m = 1; m < n_targets; ++m) {
      const double d = rng.uniform(nearest_km, cfg.extra_target_max_km);
      const Vec3 dir = sample_cone_direction(axis, cone_deg, rng);
      c.targets.push_back(make_target(make_object_id(cluster_id, m), c.central.position + dir * d,
                                      motion, cfg.bounding_radius_m));
    }

    for (int j = 2; j <= cfg.k; ++j) {
      const EciPosition p = sample_uniform_ball(c.central.position, cfg.radius_km, rng);
      c.secondaries.push_back(make_satellite(make_sat_id(cluster_id, j), p, motion));
    }

    if (any_engulfed(c)) continue;
    const auto views = render_scene(c, camera);
    const bool all_observe = std::all_of(views.begin(), views.end(),
                                         [](const Observation& o) { return !o.entries.empty(); });
    if (all_observe) return c;
  }
  throw ValidationError("unsatisfiable cluster config");
}

std::vector<Observation> render_scene(const Cluster& cluster, const CameraConfig& camera) {
  const CameraPose central_pose = orient_camera(cluster.central, cluster.targets, camera);
  std::vector<Observation> views;
  views.reserve(static_cast<std::size_t>(cluster.size()));
  for (int j = 1; j <= cluster.size(); ++j) {
    const SatelliteState& sat = cluster.member(j);
    views.push_back(render_observation(sat, j, cluster.cluster_id, cluster.radius_class,
                                       cluster.targets, translated_pose(central_pose, sat.position),
                                       camera.limits));
  }
  return views;
}

Rng cluster_rng(std::uint64_t master_seed, ClusterId cluster_id) {
  return Rng(derive_seed(master_seed, static_cast<std::uint64_t>(cluster_id)));
}

Dataset generate_dataset(const DatasetConfig& cfg) {
  validate(cfg);
  Dataset ds;
  ds.config = cfg;
  ds.scenes.reserve(cfg.classes.size() * static_cast<std::size_t>(cfg.scenes_per_class));
  ClusterId next_id = 0;
  for (const auto& cls : cfg.classes) {
    for (int i = 0; i < cfg.scenes_per_class; ++i) {
      const ClusterId id = next_id++;
      Rng rng = cluster_rng(cfg.master_seed, id);
      Scene scene;
      scene.cluster = generate_cluster(cls, cfg.camera, id, rng);
      scene.views = render_scene(scene.cluster, cfg.camera);
      ds.scenes.push_back(std::move(scene));
    }
  }
  return ds;
}

DistanceTable distance_stats(const Dataset& dataset) {
  if (dataset.scenes.empty()) throw Error("distance_stats: empty dataset");
  const int k = dataset.config.k();

  struct Acc {
    std::vector<double> sum;
    std::vector<std::size_t> n;
    double sel_sum = 0.0;
    std::size_t sel_n = 0;
    std::size_t clusters = 0;
  };
  std::array<Acc, 4> acc;
  for (auto& a : acc) {
    a.sum.assign(static_cast<std::size_t>(k), 0.0);
    a.n.assign(static_cast<std::size_t>(k), 0);
  }

  for (const auto& scene : dataset.scenes) {
    const auto row = static_cast<std::size_t>(scene.cluster.radius_class);
    for (std::size_t r : {row, DistanceTable::kOverall}) {
      auto& a = acc[r];
      ++a.clusters;
      for (const auto& view : scene.views) {
        if (view.entries.empty()) continue;
        const auto col = static_cast<std::size_t>(view.viewpoint_index - 1);
        a.sum[col] += mean_visible_distance(view);
        ++a.n[col];
      }
      a.sel_sum += select_viewpoint(scene.views).chosen_mean_km();
      ++a.sel_n;
    }
  }

  const double nan = std::numeric_limits<double>::quiet_NaN();
  DistanceTable table;
  for (std::size_t r = 0; r < acc.size(); ++r) {
    auto& row = table.rows[r];
    row.fixed.resize(static_cast<std::size_t>(k));
    for (std::size_t j = 0; j < row.fixed.size(); ++j) {
      row.fixed[j] = acc[r].n[j] ? acc[r].sum[j] / static_cast<double>(acc[r].n[j]) : nan;
    }
    row.selected = acc[r].sel_n ? acc[r].sel_sum / static_cast<double>(acc[r].sel_n) : nan;
    row.clusters = acc[r].clusters;
  }
  return table;
}

bool check_vd_dominance(const DistanceTable& table) {
  for (const auto& row : table.rows) {
    if (row.clusters == 0 && std::isnan(row.selected)) continue;
    for (double v : row.fixed) {
      if (!(row.selected <= v)) return false;
    }
  }
  return true;
}

}  // namespace scs

#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "scs/camera.hpp"
#include "scs/rng.hpp"
#include "scs/scene.hpp"

namespace scs {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  bool operator==(const Interval&) const = default;
};

struct IntRange {
  int lo = 1;
  int hi = 1;
  bool operator==(const IntRange&) const = default;
};

// Generation parameters for one radius class.
struct ClusterConfig {
  RadiusClass radius_class = RadiusClass::Close;
  double radius_km = 0.5;
  int k = 3;
  Interval nearest_target_range_km{0.5, 2.0};
  // Total targets per scene, nearest included.
  IntRange targets_per_scene{1, 5};
  Interval altitude_range_km{500.0, 600.0};
  // Farther targets are placed in [nearest, this] inside the camera cone.
  double extra_target_max_km = 10.0;
  double bounding_radius_m = 5.0;
  int max_attempts = 1000;

  bool operator==(const ClusterConfig&) const = default;
};

// Throws ValidationError naming the offending field.
void validate(const ClusterConfig& cfg);

ClusterConfig default_cluster_config(RadiusClass cls);

struct Cluster {
  ClusterId cluster_id = 0;
  RadiusClass radius_class = RadiusClass::Close;
  double radius_km = 0.5;
  SatelliteState central;
  std::vector<SatelliteState> secondaries;
  std::vector<TargetObject> targets;

  int size() const { return 1 + static_cast<int>(secondaries.size()); }
  // 1-based: 1 is the central satellite.
  const SatelliteState& member(int viewpoint_index) const;

  bool operator==(const Cluster&) const = default;
};

struct DatasetConfig {
  std::uint64_t master_seed = 42;
  int scenes_per_class = 20;
  // One entry per radius class, generated in this order.
  std::vector<ClusterConfig> classes{default_cluster_config(RadiusClass::Close),
                                     default_cluster_config(RadiusClass::Mid),
                                     default_cluster_config(RadiusClass::Far)};
  CameraConfig camera;

  int k() const { return classes.empty() ? 0 : classes.front().k; }

  bool operator==(const DatasetConfig&) const = default;
};

void validate(const DatasetConfig& cfg);

// One cluster and the k images its members capture.
struct Scene {
  Cluster cluster;
  // views[j - 1] is viewpoint j.
  std::vector<Observation> views;

  bool operator==(const Scene&) const = default;
};

struct Dataset {
  DatasetConfig config;
  std::vector<Scene> scenes;

  std::size_t image_count() const;
  const Observation* find_image(std::string_view image_id) const;

  bool operator==(const Dataset&) const = default;
};

// Uniform over the solid ball: Gaussian direction times r * u^(1/3).
EciPosition sample_uniform_ball(const EciPosition& center, double radius_km, Rng& rng);

// Uniform direction within a cone of the given half-angle around axis.
Vec3 sample_cone_direction(const Vec3& axis, double half_angle_deg, Rng& rng);

// Resamples until every member sees at least one target; throws
// ValidationError("unsatisfiable cluster config") after cfg.max_attempts.
Cluster generate_cluster(const ClusterConfig& cfg, const CameraConfig& camera,
                         ClusterId cluster_id, Rng& rng);

// Central camera aimed at its nearest target, secondaries sharing that
// orientation from their own positions.
std::vector<Observation> render_scene(const Cluster& cluster, const CameraConfig& camera);

// Stream for a cluster depends only on (master_seed, cluster_id).
Rng cluster_rng(std::uint64_t master_seed, ClusterId cluster_id);

Dataset generate_dataset(const DatasetConfig& cfg);

// Mean distance (km) from each image to its visible targets, averaged per
// (radius class, viewpoint). Row 3 pools all classes.
struct DistanceTable {
  struct Row {
    std::vector<double> fixed;  // V1..Vk
    double selected = 0.0;      // Vd
    std::size_t clusters = 0;
  };
  static constexpr std::size_t kOverall = 3;
  std::array<Row, 4> rows;

  int k() const { return rows[0].fixed.empty() ? 0 : static_cast<int>(rows[0].fixed.size()); }
};

DistanceTable distance_stats(const Dataset& dataset);

// True iff every row has Vd <= min over the fixed viewpoints.
bool check_vd_dominance(const DistanceTable& table);

}  // namespace scs

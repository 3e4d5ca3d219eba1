#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "scs/box.hpp"
#include "scs/scene.hpp"

namespace scs {

struct VisibilityLimits {
  double max_range_km = 20.0;
  // Targets whose projected diameter falls below this are not visible.
  double min_apparent_px = 1.0;

  bool operator==(const VisibilityLimits&) const = default;
};

struct CameraConfig {
  // Applies across the image width; pixels are square.
  double fov_deg = 45.0;
  int width_px = 640;
  int height_px = 640;
  VisibilityLimits limits;

  bool operator==(const CameraConfig&) const = default;
};

// Left-handed camera frame: right = up x forward, image y grows downward.
struct CameraPose {
  EciPosition position;
  Vec3 forward{0.0, 0.0, 1.0};
  Vec3 up{1.0, 0.0, 0.0};
  double fov_deg = 45.0;
  int width_px = 640;
  int height_px = 640;

  Vec3 right() const { return cross(up, forward); }
  // Focal length in pixels.
  double focal_px() const;

  bool operator==(const CameraPose&) const = default;
};

// YOLO-style normalized box.
struct GroundTruthBox {
  int class_id = 0;
  double cx = 0.0;
  double cy = 0.0;
  double w = 0.0;
  double h = 0.0;

  Box geometry() const { return {cx, cy, w, h}; }

  bool operator==(const GroundTruthBox&) const = default;
};

struct ObservationEntry {
  ObjectId object_id = 0;
  GroundTruthBox box;
  double distance_km = 0.0;
  // Projected centre in pixels, before clamping the box to the image.
  double screen_x_px = 0.0;
  double screen_y_px = 0.0;

  bool operator==(const ObservationEntry&) const = default;
};

struct Observation {
  std::string image_id;
  SatId sat_id = 0;
  ClusterId cluster_id = 0;
  int viewpoint_index = 1;  // 1-based; 1 is the central satellite
  RadiusClass radius_class = RadiusClass::Close;
  CameraPose pose;
  // Ascending by distance_km.
  std::vector<ObservationEntry> entries;

  bool operator==(const Observation&) const = default;
};

// Unit vector perpendicular to forward: world z projected off forward, or
// world x when forward is parallel to z.
Vec3 camera_up_for(const Vec3& forward);

// Points the camera at the nearest target. Throws GeometryError("degenerate
// look-at") when that target coincides with the satellite.
CameraPose orient_camera(const SatelliteState& sat, std::span<const TargetObject> targets,
                         const CameraConfig& config = {});

// Same orientation, different position: how secondaries share the central
// satellite's viewing angle.
CameraPose translated_pose(const CameraPose& pose, const EciPosition& position);

// Analytic projection of the target's bounding sphere. Returns nothing when the
// target is behind the camera, out of range, smaller than the pixel threshold,
// or entirely outside the image. Throws GeometryError("target engulfs camera")
// when the camera sits inside the sphere.
std::optional<ObservationEntry> project_target(const CameraPose& pose, const TargetObject& target,
                                               const VisibilityLimits& limits = {});

std::string make_image_id(RadiusClass cls, ClusterId cluster, int viewpoint_index);

// All targets that project, sorted by ascending distance (object id breaks ties).
Observation render_observation(const SatelliteState& sat, int viewpoint_index, ClusterId cluster,
                               RadiusClass cls, std::span<const TargetObject> targets,
                               const CameraPose& pose, const VisibilityLimits& limits = {});

}  // namespace scs

#include "scs/camera.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "scs/error.hpp"

namespace scs {

double CameraPose::focal_px() const {
  return 0.5 * width_px / std::tan(0.5 * fov_deg * std::numbers::pi / 180.0);
}

Vec3 camera_up_for(const Vec3& forward) {
  const Vec3 z_axis{0.0, 0.0, 1.0};
  Vec3 up = z_axis - forward * dot(z_axis, forward);
  if (norm(up) < 1e-9) {
    const Vec3 x_axis{1.0, 0.0, 0.0};
    up = x_axis - forward * dot(x_axis, forward);
  }
  return normalized(up);
}

CameraPose orient_camera(const SatelliteState& sat, std::span<const TargetObject> targets,
                         const CameraConfig& config) {
  if (targets.empty()) throw GeometryError("orient_camera: no targets");
  const auto nearest = std::min_element(
      targets.begin(), targets.end(), [&](const TargetObject& a, const TargetObject& b) {
        return distance(a.position, sat.position) < distance(b.position, sat.position);
      });
  const Vec3 look = nearest->position - sat.position;
  if (norm(look) == 0.0) throw GeometryError("degenerate look-at");

  CameraPose pose;
  pose.position = sat.position;
  pose.forward = normalized(look);
  pose.up = camera_up_for(pose.forward);
  pose.fov_deg = config.fov_deg;
  pose.width_px = config.width_px;
  pose.height_px = config.height_px;
  return pose;
}

CameraPose translated_pose(const CameraPose& pose, const EciPosition& position) {
  CameraPose out = pose;
  out.position = position;
  return out;
}

std::optional<ObservationEntry> project_target(const CameraPose& pose, const TargetObject& target,
                                               const VisibilityLimits& limits) {
  const Vec3 v = target.position - pose.position;
  const double d = norm(v);
  const double rho = target.bounding_radius_m / 1000.0;
  if (d <= rho) throw GeometryError("target engulfs camera");

  const double depth = dot(v, pose.forward);
  if (depth <= 0.0) return std::nullopt;
  if (d > limits.max_range_km) return std::nullopt;

  const double focal = pose.focal_px();
  const double half = std::tan(std::asin(rho / d)) * focal;
  if (2.0 * half < limits.min_apparent_px) return std::nullopt;

  const double width = pose.width_px;
  const double height = pose.height_px;
  const double sx = 0.5 * width + focal * dot(v, pose.right()) / depth;
  const double sy = 0.5 * height - focal * dot(v, pose.up) / depth;

  const double x0 = std::clamp(sx - half, 0.0, width);
  const double x1 = std::clamp(sx + half, 0.0, width);
  const double y0 = std::clamp(sy - half, 0.0, height);
  const double y1 = std::clamp(sy + half, 0.0, height);
  if (!(x1 > x0) || !(y1 > y0)) return std::nullopt;

  ObservationEntry entry;
  entry.object_id = target.object_id;
  entry.distance_km = d;
  entry.screen_x_px = sx;
  entry.screen_y_px = sy;
  entry.box.class_id = 0;
  entry.box.cx = 0.5 * (x0 + x1) / width;
  entry.box.cy = 0.5 * (y0 + y1) / height;
  entry.box.w = (x1 - x0) / width;
  entry.box.h = (y1 - y0) / height;
  return entry;
}

std::string make_image_id(RadiusClass cls, ClusterId cluster, int viewpoint_index) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%s_c%05u_v%d", std::string(to_string(cls)).c_str(),
                static_cast<unsigned>(cluster), viewpoint_index);
  return buf;
}

Observation render_observation(const SatelliteState& sat, int viewpoint_index, ClusterId cluster,
                               RadiusClass cls, std::span<const TargetObject> targets,
                               const CameraPose& pose, const VisibilityLimits& limits) {
  Observation obs;
  obs.image_id = make_image_id(cls, cluster, viewpoint_index);
  obs.sat_id = sat.sat_id;
  obs.cluster_id = cluster;
  obs.viewpoint_index = viewpoint_index;
  obs.radius_class = cls;
  obs.pose = pose;
  for (const auto& target : targets) {
    if (auto entry = project_target(pose, target, limits)) obs.entries.push_back(*entry);
  }
  std::sort(obs.entries.begin(), obs.entries.end(),
            [](const ObservationEntry& a, const ObservationEntry& b) {
              if (a.distance_km != b.distance_km) return a.distance_km < b.distance_km;
              return a.object_id < b.object_id;
            });
  return obs;
}

}  // namespace scs

#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "scs/orbital.hpp"
#include "scs/vec3.hpp"

namespace scs {

using ClusterId = std::uint32_t;
// (cluster_id << 8) | viewpoint index, so at most 255 satellites per cluster.
using SatId = std::uint32_t;
// (cluster_id << 8) | target index.
using ObjectId = std::uint32_t;

inline constexpr int kMaxClusterMembers = 255;

constexpr SatId make_sat_id(ClusterId cluster, int viewpoint_index) {
  return (cluster << 8) | static_cast<std::uint32_t>(viewpoint_index);
}
constexpr ObjectId make_object_id(ClusterId cluster, int target_index) {
  return (cluster << 8) | static_cast<std::uint32_t>(target_index);
}

enum class RadiusClass { Close = 0, Mid = 1, Far = 2 };

inline constexpr std::array<RadiusClass, 3> kRadiusClasses = {RadiusClass::Close, RadiusClass::Mid,
                                                              RadiusClass::Far};

// "close", "mid", "far".
std::string_view to_string(RadiusClass c);
std::optional<RadiusClass> parse_radius_class(std::string_view s);
// 0.5 / 1.0 / 2.0 km.
double default_radius_km(RadiusClass c);

struct SatelliteState {
  SatId sat_id = 0;
  EciPosition position;
  OrbitalElements elements;
  GeodeticCoord geodetic;

  bool operator==(const SatelliteState&) const = default;
};

struct TargetObject {
  ObjectId object_id = 0;
  EciPosition position;
  double bounding_radius_m = 5.0;
  GeodeticCoord geodetic;
  OrbitalElements elements;

  bool operator==(const TargetObject&) const = default;
};

}  // namespace scs

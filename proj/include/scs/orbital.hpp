#pragma once

#include "scs/vec3.hpp"

namespace scs {

// Spherical Earth, no rotation: the prime meridian stays on the +x axis.
inline constexpr double kEarthRadiusKm = 6371.0;

// Circular orbit. Argument of perigee is fixed at zero, so phase_deg is the
// argument of latitude measured from the ascending node.
struct OrbitalElements {
  double altitude_km = 500.0;
  double inclination_deg = 0.0;  // [0, 180)
  double raan_deg = 0.0;         // [0, 360)
  double phase_deg = 0.0;        // [0, 360)

  bool operator==(const OrbitalElements&) const = default;
};

struct GeodeticCoord {
  double lat_deg = 0.0;  // [-90, 90]
  double lon_deg = 0.0;  // (-180, 180]
  double alt_km = 0.0;

  bool operator==(const GeodeticCoord&) const = default;
};

// Wraps into [0, 360).
double normalize_angle_deg(double deg);

// Wraps RAAN and phase into [0, 360) and maps inclinations outside [0, 180)
// onto the equivalent orbit. Throws ValidationError for altitude <= 0.
OrbitalElements normalize(const OrbitalElements& elements);

// Position on the circular orbit: R_z(raan) * R_x(inclination) applied to the
// in-plane point at the given phase.
EciPosition orbit_position(const OrbitalElements& elements);

// Unit velocity direction of the circular orbit at the elements' phase.
Vec3 orbit_direction(const OrbitalElements& elements);

// The circular orbit through p whose plane also contains the direction of
// motion; orbit_position of the result reproduces p. Used to give every
// cluster member orbital metadata consistent with its position.
OrbitalElements elements_through(const EciPosition& p, const Vec3& motion_direction);

// lat = asin(z/|p|), lon = atan2(y, x), alt = |p| - R_e. Poles get lon = 0.
// Throws GeometryError("degenerate position") for the zero vector.
GeodeticCoord eci_to_geodetic(const EciPosition& p);

EciPosition geodetic_to_eci(const GeodeticCoord& g);

}  // namespace scs

#include "scs/orbital.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "scs/error.hpp"

namespace scs {
namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;
constexpr double kRadToDeg = 180.0 / std::numbers::pi;

// Ascending-node direction and the in-plane axis 90 degrees ahead of it.
struct PlaneBasis {
  Vec3 node;
  Vec3 ahead;
};

PlaneBasis plane_basis(double inclination_deg, double raan_deg) {
  const double i = inclination_deg * kDegToRad;
  const double o = raan_deg * kDegToRad;
  return {{std::cos(o), std::sin(o), 0.0},
          {-std::cos(i) * std::sin(o), std::cos(i) * std::cos(o), std::sin(i)}};
}

}  // namespace

double normalize_angle_deg(double deg) {
  double wrapped = std::fmod(deg, 360.0);
  if (wrapped < 0.0) wrapped += 360.0;
  // fmod of a tiny negative can round back up to exactly 360.
  if (wrapped >= 360.0) wrapped = 0.0;
  return wrapped;
}

OrbitalElements normalize(const OrbitalElements& elements) {
  if (!(elements.altitude_km > 0.0)) {
    throw ValidationError("orbital elements: altitude_km must be > 0");
  }
  OrbitalElements out = elements;
  double inc = normalize_angle_deg(elements.inclination_deg);
  double raan = elements.raan_deg;
  double phase = elements.phase_deg;
  // Inclinations in [180, 360) describe the same plane flipped about the node
  // line: i' = 360 - i, raan' = raan + 180, phase' = phase + 180.
  if (inc >= 180.0) {
    inc = 360.0 - inc;
    raan += 180.0;
    phase += 180.0;
    if (inc >= 180.0) inc = 0.0;
  }
  out.inclination_deg = inc;
  out.raan_deg = normalize_angle_deg(raan);
  out.phase_deg = normalize_angle_deg(phase);
  return out;
}

EciPosition orbit_position(const OrbitalElements& elements) {
  const OrbitalElements e = normalize(elements);
  const PlaneBasis b = plane_basis(e.inclination_deg, e.raan_deg);
  const double u = e.phase_deg * kDegToRad;
  const double r = kEarthRadiusKm + e.altitude_km;
  return b.node * (r * std::cos(u)) + b.ahead * (r * std::sin(u));
}

Vec3 orbit_direction(const OrbitalElements& elements) {
  const OrbitalElements e = normalize(elements);
  const PlaneBasis b = plane_basis(e.inclination_deg, e.raan_deg);
  const double u = e.phase_deg * kDegToRad;
  return b.node * -std::sin(u) + b.ahead * std::cos(u);
}

OrbitalElements elements_through(const EciPosition& p, const Vec3& motion_direction) {
  const double r = norm(p);
  if (r == 0.0) throw GeometryError("degenerate position");
  Vec3 h = cross(p, motion_direction);
  if (norm(h) < 1e-12 * r) throw GeometryError("motion direction parallel to position");
  h = normalized(h);

  // Orbit normal is (sin i sin raan, -sin i cos raan, cos i).
  double inc = std::acos(std::clamp(h.z, -1.0, 1.0)) * kRadToDeg;
  const double sin_i = std::hypot(h.x, h.y);
  double raan = sin_i > 1e-12 ? std::atan2(h.x, -h.y) * kRadToDeg : 0.0;
  if (sin_i <= 1e-12 && h.z < 0.0) {
    // Retrograde equatorial: fold onto the prograde plane (static snapshot,
    // direction of motion is not observable).
    inc = 0.0;
  }

  const PlaneBasis b = plane_basis(inc, raan);
  const double phase = std::atan2(dot(p, b.ahead), dot(p, b.node)) * kRadToDeg;

  OrbitalElements out;
  out.altitude_km = r - kEarthRadiusKm;
  out.inclination_deg = inc;
  out.raan_deg = normalize_angle_deg(raan);
  out.phase_deg = normalize_angle_deg(phase);
  return out;
}

GeodeticCoord eci_to_geodetic(const EciPosition& p) {
  const double r = norm(p);
  if (r == 0.0) throw GeometryError("degenerate position");
  GeodeticCoord g;
  g.lat_deg = std::asin(std::clamp(p.z / r, -1.0, 1.0)) * kRadToDeg;
  g.lon_deg = (p.x == 0.0 && p.y == 0.0) ? 0.0 : std::atan2(p.y, p.x) * kRadToDeg;
  if (g.lon_deg == -180.0) g.lon_deg = 180.0;
  g.alt_km = r - kEarthRadiusKm;
  return g;
}

EciPosition geodetic_to_eci(const GeodeticCoord& g) {
  const double r = kEarthRadiusKm + g.alt_km;
  const double lat = g.lat_deg * kDegToRad;
  const double lon = g.lon_deg * kDegToRad;
  return {r * std::cos(lat) * std::cos(lon), r * std::cos(lat) * std::sin(lon), r * std::sin(lat)};
}

}  // namespace scs

#pragma once

namespace scs {

// Axis-aligned box in normalized image coordinates, centre + size.
struct Box {
  double cx = 0.0;
  double cy = 0.0;
  double w = 0.0;
  double h = 0.0;

  double x0() const { return cx - 0.5 * w; }
  double x1() const { return cx + 0.5 * w; }
  double y0() const { return cy - 0.5 * h; }
  double y1() const { return cy + 0.5 * h; }
  double area() const { return w * h; }

  bool operator==(const Box&) const = default;
};

// Intersection over union in [0, 1]; 0 when either box has zero area.
double iou(const Box& a, const Box& b);

}  // namespace scs

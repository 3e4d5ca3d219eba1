#include "scs/box.hpp"

#include <algorithm>

namespace scs {

double iou(const Box& a, const Box& b) {
  // Areas from the corner form so that iou(a, a) is exactly 1.
  const double area_a = (a.x1() - a.x0()) * (a.y1() - a.y0());
  const double area_b = (b.x1() - b.x0()) * (b.y1() - b.y0());
  if (!(area_a > 0.0) || !(area_b > 0.0)) return 0.0;
  const double iw = std::min(a.x1(), b.x1()) - std::max(a.x0(), b.x0());
  const double ih = std::min(a.y1(), b.y1()) - std::max(a.y0(), b.y0());
  if (iw <= 0.0 || ih <= 0.0) return 0.0;
  const double inter = iw * ih;
  const double uni = area_a + area_b - inter;
  return std::clamp(inter / uni, 0.0, 1.0);
}

}  // namespace scs

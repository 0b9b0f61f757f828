#pragma once

#include <algorithm>
#include <cmath>

namespace bpm {

// Axis-aligned box, MOTChallenge convention: top-left corner + size, pixels.
struct BoundingBox {
    double x = 0.0;
    double y = 0.0;
    double w = 1.0;
    double h = 1.0;

    double right() const { return x + w; }
    double bottom() const { return y + h; }
    double cx() const { return x + 0.5 * w; }
    double cy() const { return y + 0.5 * h; }
    double area() const { return w * h; }

    bool valid() const {
        return std::isfinite(x) && std::isfinite(y) && std::isfinite(w) &&
               std::isfinite(h) && w > 0.0 && h > 0.0;
    }
};

inline double iou(const BoundingBox& a, const BoundingBox& b) {
    const double ix = std::max(0.0, std::min(a.right(), b.right()) - std::max(a.x, b.x));
    const double iy = std::max(0.0, std::min(a.bottom(), b.bottom()) - std::max(a.y, b.y));
    const double inter = ix * iy;
    if (inter <= 0.0) return 0.0;
    return inter / (a.area() + b.area() - inter);
}

// Coordinate-wise linear interpolation, t in [0,1]: t=0 -> a, t=1 -> b.
inline BoundingBox lerp_box(const BoundingBox& a, const BoundingBox& b, double t) {
    return BoundingBox{a.x + t * (b.x - a.x), a.y + t * (b.y - a.y),
                       a.w + t * (b.w - a.w), a.h + t * (b.h - a.h)};
}

}  // namespace bpm

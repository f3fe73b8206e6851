#pragma once

#include <cmath>

namespace msssn {

struct Position {
    double x = 0.0;
    double y = 0.0;

    friend bool operator==(const Position&, const Position&) = default;
};

inline double distance(const Position& a, const Position& b) {
    return std::hypot(a.x - b.x, a.y - b.y);
}

/// Axis-aligned rectangle [x0, x1] x [y0, y1].
struct Rect {
    double x0 = 0.0;
    double y0 = 0.0;
    double x1 = 0.0;
    double y1 = 0.0;

    [[nodiscard]] double width() const { return x1 - x0; }
    [[nodiscard]] double height() const { return y1 - y0; }
    [[nodiscard]] double area() const { return width() * height(); }
    [[nodiscard]] Position centroid() const { return {0.5 * (x0 + x1), 0.5 * (y0 + y1)}; }
    /// Closed containment; tiling ownership is decided by World::region_of.
    [[nodiscard]] bool contains(const Position& p) const {
        return p.x >= x0 && p.x <= x1 && p.y >= y0 && p.y <= y1;
    }

    friend bool operator==(const Rect&, const Rect&) = default;
};

}  // namespace msssn

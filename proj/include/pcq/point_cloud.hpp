#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <vector>

#include "pcq/errors.hpp"

namespace pcq {

// One point: position stored as 32-bit floats (PLY storage precision),
// 8-bit RGB attributes. Feature math promotes coordinates to double.
struct Point {
    float x = 0.f, y = 0.f, z = 0.f;
    std::uint8_t r = 0, g = 0, b = 0;

    friend bool operator==(const Point&, const Point&) = default;
};

class PointCloud {
public:
    PointCloud() = default;
    explicit PointCloud(std::vector<Point> pts, bool colored = true)
        : points_(std::move(pts)), colored_(colored) {}

    std::size_t size() const noexcept { return points_.size(); }
    bool empty() const noexcept { return points_.empty(); }
    bool has_color() const noexcept { return colored_; }

    const Point& operator[](std::size_t i) const { return points_[i]; }
    const std::vector<Point>& points() const noexcept { return points_; }

    std::array<double, 3> position(std::size_t i) const {
        const Point& p = points_[i];
        return {double(p.x), double(p.y), double(p.z)};
    }

    friend bool operator==(const PointCloud&, const PointCloud&) = default;

    void require_color() const {
        if (!colored_) throw colorless_cloud("cloud has no color attributes");
    }
    void require_nonempty() const {
        if (points_.empty()) throw empty_cloud("cloud has no points");
    }

private:
    std::vector<Point> points_;
    bool colored_ = true;
};

inline double squared_distance(const Point& a, const Point& b) {
    const double dx = double(a.x) - double(b.x);
    const double dy = double(a.y) - double(b.y);
    const double dz = double(a.z) - double(b.z);
    return dx * dx + dy * dy + dz * dz;
}

} // namespace pcq

#pragma once

// Reduced-reference content features computed from the reference cloud's
// luminance: CFGD (mean per-point luma gradient over KNN distances) and
// CBMV (mean per-voxel luma standard deviation).

#include <cmath>
#include <cstddef>
#include <vector>

#include "pcq/errors.hpp"
#include "pcq/point_cloud.hpp"
#include "pcq/spatial.hpp"

namespace pcq {

struct LumaWeights {
    double r, g, b;
};

// BT.709; BT.601 would be {0.299, 0.587, 0.114}.
inline constexpr LumaWeights kBt709{0.2126, 0.7152, 0.0722};

inline double luma(std::uint8_t r, std::uint8_t g, std::uint8_t b,
                   const LumaWeights& w = kBt709) {
    return w.r * double(r) + w.g * double(g) + w.b * double(b);
}

inline std::vector<double> luma_of(const PointCloud& cloud,
                                   const LumaWeights& w = kBt709) {
    cloud.require_color();
    std::vector<double> y(cloud.size());
    for (std::size_t i = 0; i < cloud.size(); ++i) {
        const Point& p = cloud[i];
        y[i] = luma(p.r, p.g, p.b, w);
    }
    return y;
}

struct FeatureVector {
    double cfgd = 0.0;
    double cbmv = 0.0;
    unsigned v_size = 64;       // voxel edge count used for CBMV
    std::size_t knn_k = 8;      // neighbor count used for CFGD
};

// Mean over points of the per-point mean |dY|/d over the K nearest
// neighbors. Zero-distance neighbor pairs are excluded from both the sum
// and the neighbor count; a point whose neighbors are all coincident
// contributes 0.
inline double cfgd(const PointCloud& cloud, const KnnIndex& index,
                   std::size_t k, const LumaWeights& w = kBt709) {
    if (cloud.size() < 2) throw degenerate_cloud("CFGD needs at least 2 points");
    const std::vector<double> y = luma_of(cloud, w);
    double total = 0.0;
    for (std::size_t i = 0; i < cloud.size(); ++i) {
        const auto neighbors = index.query_knn(i, k);
        double sum = 0.0;
        std::size_t n = 0;
        for (const Neighbor& nb : neighbors) {
            if (nb.distance == 0.0) continue;
            sum += std::abs(y[i] - y[nb.index]) / nb.distance;
            ++n;
        }
        if (n > 0) total += sum / double(n);
    }
    return total / double(cloud.size());
}

// Mean over non-empty voxels of the population standard deviation of luma
// inside each voxel.
inline double cbmv(const PointCloud& cloud, const VoxelGrid& grid,
                   const LumaWeights& w = kBt709) {
    const std::vector<double> y = luma_of(cloud, w);
    double total = 0.0;
    for (const VoxelGrid::Cell& cell : grid.cells()) {
        const double d = double(cell.members.size());
        double mean = 0.0;
        for (std::size_t idx : cell.members) mean += y[idx];
        mean /= d;
        double var = 0.0;
        for (std::size_t idx : cell.members) {
            const double dv = y[idx] - mean;
            var += dv * dv;
        }
        total += std::sqrt(var / d);
    }
    return total / double(grid.occupied_count());
}

inline FeatureVector extract_features(const PointCloud& cloud, std::size_t k,
                                      unsigned v,
                                      const LumaWeights& w = kBt709) {
    KnnIndex index(cloud);
    VoxelGrid grid(cloud, v);
    FeatureVector f;
    f.cfgd = cfgd(cloud, index, k, w);
    f.cbmv = cbmv(cloud, grid, w);
    f.v_size = v;
    f.knn_k = k;
    return f;
}

} // namespace pcq

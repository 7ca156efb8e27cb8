#pragma once

// Symmetric point-to-point luma PSNR between a reference and a distorted
// cloud: for each point, the squared luma difference to its Euclidean
// nearest neighbor in the other cloud; PSNR uses the worse of the two
// directional MSEs (pc_error convention), 8-bit peak.

#include <cmath>
#include <limits>

#include "pcq/errors.hpp"
#include "pcq/features.hpp"
#include "pcq/point_cloud.hpp"
#include "pcq/spatial.hpp"

namespace pcq {

struct P2PResult {
    double mse_ab = 0.0;
    double mse_ba = 0.0;
    double psnr_y = 0.0; // dB; +inf when both MSEs are zero
};

namespace detail {

inline double directional_luma_mse(const PointCloud& from,
                                   const PointCloud& to,
                                   const std::vector<double>& luma_from,
                                   const std::vector<double>& luma_to) {
    const KnnIndex index(to);
    double sum = 0.0;
    for (std::size_t i = 0; i < from.size(); ++i) {
        const Neighbor nn = index.query_nearest(from[i]);
        const double d = luma_from[i] - luma_to[nn.index];
        sum += d * d;
    }
    return sum / double(from.size());
}

} // namespace detail

inline P2PResult psnr_y(const PointCloud& reference,
                        const PointCloud& distorted,
                        const LumaWeights& w = kBt709) {
    reference.require_nonempty();
    distorted.require_nonempty();
    reference.require_color();
    distorted.require_color();

    const std::vector<double> ya = luma_of(reference, w);
    const std::vector<double> yb = luma_of(distorted, w);

    P2PResult res;
    res.mse_ab = detail::directional_luma_mse(reference, distorted, ya, yb);
    res.mse_ba = detail::directional_luma_mse(distorted, reference, yb, ya);
    const double worst = std::max(res.mse_ab, res.mse_ba);
    res.psnr_y = worst == 0.0
                     ? std::numeric_limits<double>::infinity()
                     : 10.0 * std::log10(255.0 * 255.0 / worst);
    return res;
}

} // namespace pcq

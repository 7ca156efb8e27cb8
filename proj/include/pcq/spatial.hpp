#pragma once

// Exact nearest-neighbor index (kd-tree) and cubic voxel grid over a
// point cloud. Both are immutable after construction and safe to query
// from multiple threads.

#include <algorithm>
#include <array>
#include <cstddef>
#include <limits>
#include <numeric>
#include <unordered_map>
#include <vector>

#include "pcq/errors.hpp"
#include "pcq/point_cloud.hpp"

namespace pcq {

struct Neighbor {
    std::size_t index;
    double distance; // Euclidean
};

// Exact KNN over a cloud's positions. Ties in distance are broken by the
// lower point index so query results are deterministic.
class KnnIndex {
public:
    explicit KnnIndex(const PointCloud& cloud) : cloud_(&cloud) {
        cloud.require_nonempty();
        order_.resize(cloud.size());
        std::iota(order_.begin(), order_.end(), std::size_t{0});
        nodes_.reserve(cloud.size());
        root_ = build(0, cloud.size());
    }

    const PointCloud& cloud() const noexcept { return *cloud_; }

    // K nearest neighbors of point `i`, excluding `i` itself (but not
    // excluding coincident duplicate points). Sorted by (distance, index).
    std::vector<Neighbor> query_knn(std::size_t i, std::size_t k) const {
        Search s;
        s.exclude = i;
        s.k = k;
        s.target = (*cloud_)[i];
        if (k > 0 && cloud_->size() > 1) search(root_, s);
        return finish(s);
    }

    // Nearest neighbor of an external query point (no exclusion).
    Neighbor query_nearest(const Point& q) const {
        Search s;
        s.exclude = npos;
        s.k = 1;
        s.target = q;
        search(root_, s);
        auto r = finish(s);
        return r.front();
    }

private:
    static constexpr std::size_t npos = std::size_t(-1);
    static constexpr int leaf_size = 16;

    struct Node {
        int axis = -1; // -1: leaf
        double split = 0.0;
        std::size_t begin = 0, end = 0; // leaf range into order_
        std::size_t left = 0, right = 0;
    };

    struct Cand {
        double d2;
        std::size_t index;
        bool operator<(const Cand& o) const {
            return d2 < o.d2 || (d2 == o.d2 && index < o.index);
        }
    };

    struct Search {
        Point target;
        std::size_t exclude = npos;
        std::size_t k = 0;
        std::vector<Cand> heap; // max-heap on (d2, index)
    };

    std::size_t build(std::size_t begin, std::size_t end) {
        Node n;
        if (end - begin <= leaf_size) {
            n.begin = begin;
            n.end = end;
            nodes_.push_back(n);
            return nodes_.size() - 1;
        }
        std::array<double, 3> lo{}, hi{};
        lo.fill(std::numeric_limits<double>::infinity());
        hi.fill(-std::numeric_limits<double>::infinity());
        for (std::size_t t = begin; t < end; ++t) {
            auto p = cloud_->position(order_[t]);
            for (int a = 0; a < 3; ++a) {
                lo[std::size_t(a)] = std::min(lo[std::size_t(a)], p[std::size_t(a)]);
                hi[std::size_t(a)] = std::max(hi[std::size_t(a)], p[std::size_t(a)]);
            }
        }
        int axis = 0;
        double ext = hi[0] - lo[0];
        for (int a = 1; a < 3; ++a)
            if (hi[std::size_t(a)] - lo[std::size_t(a)] > ext) {
                ext = hi[std::size_t(a)] - lo[std::size_t(a)];
                axis = a;
            }
        if (ext == 0.0) { // all coincident, keep as leaf
            n.begin = begin;
            n.end = end;
            nodes_.push_back(n);
            return nodes_.size() - 1;
        }
        const std::size_t mid = (begin + end) / 2;
        std::nth_element(order_.begin() + std::ptrdiff_t(begin),
                         order_.begin() + std::ptrdiff_t(mid),
                         order_.begin() + std::ptrdiff_t(end),
                         [&](std::size_t a, std::size_t b) {
                             return cloud_->position(a)[std::size_t(axis)] <
                                    cloud_->position(b)[std::size_t(axis)];
                         });
        n.axis = axis;
        n.split = cloud_->position(order_[mid])[std::size_t(axis)];
        nodes_.push_back(n);
        const std::size_t self = nodes_.size() - 1;
        const std::size_t l = build(begin, mid);
        const std::size_t r = build(mid, end);
        nodes_[self].left = l;
        nodes_[self].right = r;
        return self;
    }

    void offer(Search& s, std::size_t idx) const {
        if (idx == s.exclude) return;
        Cand c{squared_distance(s.target, (*cloud_)[idx]), idx};
        if (s.heap.size() < s.k) {
            s.heap.push_back(c);
            std::push_heap(s.heap.begin(), s.heap.end());
        } else if (c < s.heap.front()) {
            std::pop_heap(s.heap.begin(), s.heap.end());
            s.heap.back() = c;
            std::push_heap(s.heap.begin(), s.heap.end());
        }
    }

    void search(std::size_t ni, Search& s) const {
        const Node& n = nodes_[ni];
        if (n.axis < 0) {
            for (std::size_t t = n.begin; t < n.end; ++t) offer(s, order_[t]);
            return;
        }
        const double tq = double(n.axis == 0   ? s.target.x
                                 : n.axis == 1 ? s.target.y
                                                : s.target.z);
        const double diff = tq - n.split;
        const std::size_t near = diff < 0 ? n.left : n.right;
        const std::size_t far = diff < 0 ? n.right : n.left;
        search(near, s);
        // visit far side on exact equality too so distance ties keep the
        // lower-index winner
        if (s.heap.size() < s.k || diff * diff <= s.heap.front().d2)
            search(far, s);
    }

    std::vector<Neighbor> finish(Search& s) const {
        std::sort(s.heap.begin(), s.heap.end());
        std::vector<Neighbor> out;
        out.reserve(s.heap.size());
        for (const Cand& c : s.heap)
            out.push_back({c.index, std::sqrt(c.d2)});
        return out;
    }

    const PointCloud* cloud_;
    std::vector<std::size_t> order_;
    std::vector<Node> nodes_;
    std::size_t root_ = 0;
};

// Cubic voxel grid: V^3 voxels over the axis-aligned cube centered on the
// cloud's bounding box, with edge equal to the largest bounding-box extent.
class VoxelGrid {
public:
    VoxelGrid(const PointCloud& cloud, unsigned v) : v_(v) {
        cloud.require_nonempty();
        if (v == 0) throw bad_input("voxel edge count must be positive");

        std::array<double, 3> lo{}, hi{};
        lo.fill(std::numeric_limits<double>::infinity());
        hi.fill(-std::numeric_limits<double>::infinity());
        for (std::size_t i = 0; i < cloud.size(); ++i) {
            auto p = cloud.position(i);
            for (std::size_t a = 0; a < 3; ++a) {
                lo[a] = std::min(lo[a], p[a]);
                hi[a] = std::max(hi[a], p[a]);
            }
        }
        double edge = 0.0;
        for (std::size_t a = 0; a < 3; ++a) edge = std::max(edge, hi[a] - lo[a]);
        edge_ = edge;
        for (std::size_t a = 0; a < 3; ++a)
            cube_min_[a] = 0.5 * (lo[a] + hi[a]) - 0.5 * edge;

        std::unordered_map<std::uint64_t, std::size_t> slot;
        for (std::size_t i = 0; i < cloud.size(); ++i) {
            const std::uint64_t key = voxel_key(cloud.position(i));
            auto [it, inserted] = slot.try_emplace(key, cells_.size());
            if (inserted) cells_.push_back({key, {}});
            cells_[it->second].members.push_back(i);
        }
    }

    unsigned edge_count() const noexcept { return v_; }
    std::size_t occupied_count() const noexcept { return cells_.size(); }

    struct Cell {
        std::uint64_t key;
        std::vector<std::size_t> members;
    };
    const std::vector<Cell>& cells() const noexcept { return cells_; }

    // Per-axis voxel coordinate of a position, clamped to [0, V-1].
    std::array<unsigned, 3> voxel_of(const std::array<double, 3>& p) const {
        std::array<unsigned, 3> c{};
        for (std::size_t a = 0; a < 3; ++a) {
            if (edge_ <= 0.0) {
                c[a] = 0; // degenerate cloud: everything in one voxel
                continue;
            }
            double f = std::floor(double(v_) * (p[a] - cube_min_[a]) / edge_);
            if (f < 0.0) f = 0.0;
            if (f > double(v_ - 1)) f = double(v_ - 1);
            c[a] = unsigned(f);
        }
        return c;
    }

private:
    std::uint64_t voxel_key(const std::array<double, 3>& p) const {
        auto c = voxel_of(p);
        return (std::uint64_t(c[0]) << 42) | (std::uint64_t(c[1]) << 21) |
               std::uint64_t(c[2]);
    }

    unsigned v_;
    double edge_ = 0.0;
    std::array<double, 3> cube_min_{};
    std::vector<Cell> cells_;
};

} // namespace pcq

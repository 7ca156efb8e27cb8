#include <doctest.h>

#include <cmath>
#include <random>

#include "pcq/baseline.hpp"
#include "oracles.hpp"

namespace {

// O(N^2) directional luma MSE oracle.
double mse_brute(const pcq::PointCloud& from, const pcq::PointCloud& to) {
    long double sum = 0.0L;
    for (std::size_t i = 0; i < from.size(); ++i) {
        double best = std::numeric_limits<double>::infinity();
        std::size_t best_idx = 0;
        for (std::size_t j = 0; j < to.size(); ++j) {
            const double d2 = pcq::squared_distance(from[i], to[j]);
            if (d2 < best) {
                best = d2;
                best_idx = j;
            }
        }
        const long double d =
            oracle::luma_ld(from[i]) - oracle::luma_ld(to[best_idx]);
        sum += d * d;
    }
    return double(sum / (long double)from.size());
}

pcq::PointCloud rotated_translated(const pcq::PointCloud& c) {
    // rotation about z by a fixed angle plus a translation, applied in
    // double then stored back to float
    const double ca = std::cos(0.7), sa = std::sin(0.7);
    std::vector<pcq::Point> pts = c.points();
    for (pcq::Point& p : pts) {
        const double x = double(p.x), y = double(p.y);
        p.x = float(ca * x - sa * y + 13.0);
        p.y = float(sa * x + ca * y - 4.0);
        p.z = float(double(p.z) + 2.5);
    }
    return pcq::PointCloud(std::move(pts), c.has_color());
}

} // namespace

TEST_CASE("identical clouds give zero MSE and infinite PSNR") {
    std::mt19937 rng(137);
    const pcq::PointCloud c = oracle::random_cloud(rng, 100);
    const pcq::P2PResult r = pcq::psnr_y(c, c);
    CHECK(r.mse_ab == 0.0);
    CHECK(r.mse_ba == 0.0);
    CHECK(std::isinf(r.psnr_y));
}

TEST_CASE("coincident points with luma 0 vs 255 give 0 dB") {
    pcq::PointCloud a(std::vector<pcq::Point>{{0, 0, 0, 0, 0, 0}});
    pcq::PointCloud b(std::vector<pcq::Point>{{0, 0, 0, 255, 255, 255}});
    const pcq::P2PResult r = pcq::psnr_y(a, b);
    CHECK(r.mse_ab == doctest::Approx(255.0 * 255.0).epsilon(1e-12));
    CHECK(r.psnr_y == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("empty or colorless inputs rejected") {
    pcq::PointCloud empty;
    pcq::PointCloud one(std::vector<pcq::Point>{{}});
    CHECK_THROWS_AS(pcq::psnr_y(empty, one), pcq::empty_cloud);
    pcq::PointCloud colorless(std::vector<pcq::Point>{{}}, false);
    CHECK_THROWS_AS(pcq::psnr_y(one, colorless), pcq::colorless_cloud);
}

TEST_CASE("matches brute-force oracle on random pairs") {
    std::mt19937 rng(139);
    for (int rep = 0; rep < 5; ++rep) {
        const pcq::PointCloud a = oracle::random_cloud(rng, 200);
        const pcq::PointCloud b = oracle::random_cloud(rng, 180);
        const pcq::P2PResult r = pcq::psnr_y(a, b);
        CHECK(r.mse_ab == doctest::Approx(mse_brute(a, b)).epsilon(1e-9));
        CHECK(r.mse_ba == doctest::Approx(mse_brute(b, a)).epsilon(1e-9));
    }
}

TEST_CASE("reported value is symmetric in argument order") {
    std::mt19937 rng(149);
    const pcq::PointCloud a = oracle::random_cloud(rng, 150);
    const pcq::PointCloud b = oracle::random_cloud(rng, 150);
    const pcq::P2PResult ab = pcq::psnr_y(a, b);
    const pcq::P2PResult ba = pcq::psnr_y(b, a);
    CHECK(ab.psnr_y == doctest::Approx(ba.psnr_y).epsilon(1e-12));
    CHECK(ab.mse_ab == doctest::Approx(ba.mse_ba).epsilon(1e-12));
}

TEST_CASE("rigid motion of both clouds leaves PSNR unchanged") {
    std::mt19937 rng(151);
    const pcq::PointCloud a = oracle::random_cloud(rng, 150);
    const pcq::PointCloud b = oracle::random_cloud(rng, 150);
    const pcq::P2PResult before = pcq::psnr_y(a, b);
    const pcq::P2PResult after =
        pcq::psnr_y(rotated_translated(a), rotated_translated(b));
    CHECK(after.psnr_y == doctest::Approx(before.psnr_y).epsilon(1e-9));
}

TEST_CASE("inflating every luma error cannot raise PSNR") {
    std::mt19937 rng(157);
    const pcq::PointCloud ref = oracle::random_cloud(rng, 120);
    // distorted copy: same geometry, luma pushed toward an extreme
    auto degrade = [&](int amount) {
        std::vector<pcq::Point> pts = ref.points();
        for (pcq::Point& p : pts) {
            p.r = std::uint8_t(std::min(255, int(p.r) + amount));
            p.g = std::uint8_t(std::min(255, int(p.g) + amount));
            p.b = std::uint8_t(std::min(255, int(p.b) + amount));
        }
        return pcq::PointCloud(std::move(pts));
    };
    const double mild = pcq::psnr_y(ref, degrade(10)).psnr_y;
    const double harsh = pcq::psnr_y(ref, degrade(60)).psnr_y;
    CHECK(harsh <= mild);
}

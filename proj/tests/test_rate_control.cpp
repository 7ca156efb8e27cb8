#include <doctest.h>

#include <cmath>
#include <random>

#include "pcq/rate_control.hpp"
#include "oracles.hpp"

namespace {

// Exhaustive integer-grid oracle: scan every (QPg, QPc) pair, keep the
// feasible one with least predicted MOS^c (ties: first in scan order).
struct GridBest {
    bool found = false;
    int qp_g = 0, qp_c = 0;
    double mosc = 0.0;
};

GridBest grid_search(const pcq::QualityModelParams& q,
                     const pcq::RateModelParams& r, double target,
                     pcq::QpRange range) {
    GridBest best;
    for (int qg = range.lo; qg <= range.hi; ++qg)
        for (int qc = range.lo; qc <= range.hi; ++qc) {
            const double sg = pcq::qp_to_qstep(qg);
            const double sc = pcq::qp_to_qstep(qc);
            if (r.rate(sg, sc) > target) continue;
            const double mosc = pcq::predict_mosc(q, sg, sc);
            if (!best.found || mosc < best.mosc) {
                best = {true, qg, qc, mosc};
            }
        }
    return best;
}

struct Instance {
    pcq::QualityModelParams q;
    pcq::RateModelParams r;
    double target;
};

Instance random_instance(std::mt19937& rng) {
    std::uniform_real_distribution<double> p(0.05, 0.4);
    std::uniform_real_distribution<double> p3(0.0, 25.0);
    std::uniform_real_distribution<double> gamma(200.0, 5000.0);
    std::uniform_real_distribution<double> theta(-1.2, -0.4);
    Instance inst;
    inst.q = {p(rng), p(rng), p3(rng), {}, {}};
    inst.r.gamma_g = gamma(rng);
    inst.r.theta_g = theta(rng);
    inst.r.gamma_c = gamma(rng);
    inst.r.theta_c = theta(rng);
    // target somewhere between the cheapest and the most expensive corner
    const double rmin = inst.r.rate(pcq::qp_to_qstep(50), pcq::qp_to_qstep(50));
    const double rmax = inst.r.rate(pcq::qp_to_qstep(26), pcq::qp_to_qstep(26));
    std::uniform_real_distribution<double> t(rmin * 1.01, rmax * 1.2);
    inst.target = t(rng);
    return inst;
}

} // namespace

TEST_CASE("qp_to_qstep anchors and range") {
    CHECK(pcq::qp_to_qstep(26) == 12.75);
    CHECK(pcq::qp_to_qstep(32) == 25.5);
    CHECK(pcq::qp_to_qstep(38) == 51.0);
    CHECK(pcq::qp_to_qstep(44) == 102.0);
    CHECK(pcq::qp_to_qstep(50) == 204.0);
    CHECK_THROWS_AS(pcq::qp_to_qstep(0), pcq::out_of_range);
    CHECK_THROWS_AS(pcq::qp_to_qstep(52), pcq::out_of_range);
}

TEST_CASE("fit_rate_model inverts two samples exactly") {
    const double gamma = 1000.0, theta = -0.8;
    std::vector<pcq::RateSample> s = {
        {12.75, gamma * std::pow(12.75, theta)},
        {204.0, gamma * std::pow(204.0, theta)}};
    auto [g, t] = pcq::fit_rate_model(s);
    CHECK(g == doctest::Approx(gamma).epsilon(1e-9));
    CHECK(t == doctest::Approx(theta).epsilon(1e-9));
}

TEST_CASE("degenerate rate samples rejected") {
    std::vector<pcq::RateSample> same_q = {{51, 100}, {51, 200}};
    CHECK_THROWS_AS(pcq::fit_rate_model(same_q), pcq::degenerate_samples);
    std::vector<pcq::RateSample> bad_rate = {{12.75, 100}, {204, -5}};
    CHECK_THROWS_AS(pcq::fit_rate_model(bad_rate), pcq::degenerate_samples);
    std::vector<pcq::RateSample> one = {{12.75, 100}};
    CHECK_THROWS_AS(pcq::fit_rate_model(one), pcq::degenerate_samples);
}

TEST_CASE("overdetermined rate fit matches log-space OLS oracle") {
    std::mt19937 rng(163);
    std::uniform_real_distribution<double> noise(-0.05, 0.05);
    const double gamma = 800.0, theta = -0.7;
    std::vector<pcq::RateSample> s;
    for (double q : {12.75, 25.5, 51.0, 102.0, 204.0})
        s.push_back({q, gamma * std::pow(q, theta) * std::exp(noise(rng))});
    auto [g, t] = pcq::fit_rate_model(s);

    std::vector<long double> a, b;
    for (const auto& smp : s) {
        a.insert(a.end(), {std::log((long double)smp.qstep), 1.0L});
        b.push_back(std::log((long double)smp.kbpmp));
    }
    const auto x = oracle::normal_equations(a, b, s.size(), 2, 1);
    CHECK(t == doctest::Approx(double(x[0])).epsilon(1e-9));
    CHECK(g == doctest::Approx(double(std::exp(x[1]))).epsilon(1e-9));
}

TEST_CASE("symmetric instance gives equal steps") {
    pcq::QualityModelParams q{0.2, 0.2, 5.0, {}, {}};
    pcq::RateModelParams r{1000.0, -0.8, 1000.0, -0.8};
    const double target = 0.8 * r.rate(pcq::qp_to_qstep(26), pcq::qp_to_qstep(26));
    const pcq::RateControlSolution sol = pcq::solve_rate_control(q, r, target);
    CHECK(sol.qg == doctest::Approx(sol.qc).epsilon(1e-9));
    // the integer optimum of a symmetric instance may be an asymmetric
    // pair like (28, 29) when its mirror image ties; both QPs must still
    // bracket the common continuous solution
    CHECK(std::abs(sol.qp_g - sol.qp_c) <= 1);
}

TEST_CASE("generous budget pins both QPs at the range minimum") {
    pcq::QualityModelParams q{0.2, 0.3, 5.0, {}, {}};
    pcq::RateModelParams r{1000.0, -0.8, 500.0, -0.6};
    const double target = 10.0 * r.rate(pcq::qp_to_qstep(26), pcq::qp_to_qstep(26));
    const pcq::RateControlSolution sol = pcq::solve_rate_control(q, r, target);
    CHECK(sol.qp_g == 26);
    CHECK(sol.qp_c == 26);
    CHECK(!sol.binding);
}

TEST_CASE("impossible budget -> Infeasible") {
    pcq::QualityModelParams q{0.2, 0.3, 5.0, {}, {}};
    pcq::RateModelParams r{1000.0, -0.8, 500.0, -0.6};
    const double rmin = r.rate(pcq::qp_to_qstep(50), pcq::qp_to_qstep(50));
    CHECK_THROWS_AS(pcq::solve_rate_control(q, r, rmin * 0.5),
                    pcq::infeasible);
}

TEST_CASE("invalid models rejected") {
    pcq::RateModelParams r{1000.0, -0.8, 500.0, -0.6};
    pcq::QualityModelParams flat{0.0, 0.3, 5.0, {}, {}};
    CHECK_THROWS_AS(pcq::solve_rate_control(flat, r, 100.0),
                    pcq::non_monotone_model);
    pcq::QualityModelParams q{0.2, 0.3, 5.0, {}, {}};
    pcq::RateModelParams rising{1000.0, 0.5, 500.0, -0.6};
    CHECK_THROWS_AS(pcq::solve_rate_control(q, rising, 100.0),
                    pcq::invalid_rate_model);
}

TEST_CASE("integer solution equals exhaustive grid search") {
    std::mt19937 rng(167);
    for (int rep = 0; rep < 120; ++rep) {
        const Instance inst = random_instance(rng);
        pcq::QpRange range{26, 50};
        pcq::RateControlSolution sol;
        try {
            sol = pcq::solve_rate_control(inst.q, inst.r, inst.target, range);
        } catch (const pcq::infeasible&) {
            CHECK(!grid_search(inst.q, inst.r, inst.target, range).found);
            continue;
        }
        const GridBest best = grid_search(inst.q, inst.r, inst.target, range);
        REQUIRE(best.found);
        CHECK(sol.qp_g == best.qp_g);
        CHECK(sol.qp_c == best.qp_c);
        CHECK(sol.predicted_rate <= inst.target * (1.0 + 1e-9));
    }
}

TEST_CASE("KKT residuals vanish on active interior solutions") {
    std::mt19937 rng(173);
    int checked = 0;
    while (checked < 30) {
        const Instance inst = random_instance(rng);
        pcq::RateControlSolution sol;
        try {
            sol = pcq::solve_rate_control(inst.q, inst.r, inst.target);
        } catch (const pcq::infeasible&) {
            continue;
        }
        const double qmin = pcq::qp_to_qstep(26), qmax = pcq::qp_to_qstep(50);
        const bool interior = sol.binding && sol.qg > qmin * (1 + 1e-9) &&
                              sol.qg < qmax * (1 - 1e-9) &&
                              sol.qc > qmin * (1 + 1e-9) &&
                              sol.qc < qmax * (1 - 1e-9);
        if (!interior) continue;
        const double res_g =
            inst.q.p1 + sol.lambda * inst.r.gamma_g * inst.r.theta_g *
                            std::pow(sol.qg, inst.r.theta_g - 1.0);
        const double res_c =
            inst.q.p2 + sol.lambda * inst.r.gamma_c * inst.r.theta_c *
                            std::pow(sol.qc, inst.r.theta_c - 1.0);
        CHECK(std::abs(res_g) / inst.q.p1 < 1e-8);
        CHECK(std::abs(res_c) / inst.q.p2 < 1e-8);
        // active constraint satisfied tightly
        CHECK(inst.r.rate(sol.qg, sol.qc) ==
              doctest::Approx(inst.target).epsilon(1e-9));
        ++checked;
    }
}

TEST_CASE("raising the budget never worsens predicted MOS^c") {
    std::mt19937 rng(179);
    for (int rep = 0; rep < 25; ++rep) {
        const Instance inst = random_instance(rng);
        double prev_mosc = std::numeric_limits<double>::infinity();
        for (double scale : {1.0, 1.3, 1.8, 2.5, 4.0}) {
            pcq::RateControlSolution sol;
            try {
                sol = pcq::solve_rate_control(inst.q, inst.r,
                                              inst.target * scale);
            } catch (const pcq::infeasible&) {
                continue;
            }
            CHECK(sol.predicted_mosc <= prev_mosc + 1e-12);
            prev_mosc = sol.predicted_mosc;
        }
    }
}

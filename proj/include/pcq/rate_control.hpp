#pragma once

// Rate control for the linear MOS^c model under a power-law (Cauchy) rate
// constraint: minimize p1*Qg + p2*Qc + p3 subject to
// gamma_g*Qg^theta_g + gamma_c*Qc^theta_c <= R_T over the quantization
// steps reachable by an integer QP range. The continuous optimum is found
// by bisecting the KKT multiplier; the integer QP pair is then selected
// exactly by sweeping geometry QPs and taking the smallest feasible color
// QP for each.

#include <cmath>
#include <cstdlib>
#include <limits>
#include <string>
#include <vector>

#include "pcq/errors.hpp"
#include "pcq/linalg.hpp"
#include "pcq/quality_model.hpp"

namespace pcq {

inline constexpr int kQpMin = 1;
inline constexpr int kQpMax = 51;
inline constexpr int kQpDefaultLo = 26;
inline constexpr int kQpDefaultHi = 50;

// Qstep doubles every 6 QP, anchored at QP 26 -> 12.75.
inline double qp_to_qstep(int qp) {
    if (qp < kQpMin || qp > kQpMax)
        throw out_of_range("QP " + std::to_string(qp) + " outside [" +
                           std::to_string(kQpMin) + ", " +
                           std::to_string(kQpMax) + "]");
    return 12.75 * std::exp2(double(qp - 26) / 6.0);
}

struct RateModelParams {
    double gamma_g = 0.0, theta_g = 0.0;
    double gamma_c = 0.0, theta_c = 0.0;

    double rate_g(double qg) const { return gamma_g * std::pow(qg, theta_g); }
    double rate_c(double qc) const { return gamma_c * std::pow(qc, theta_c); }
    double rate(double qg, double qc) const { return rate_g(qg) + rate_c(qc); }
};

struct RateSample {
    double qstep;
    double kbpmp;
};

// Fit R = gamma * Q^theta. Two samples invert exactly; more go through
// log-log OLS.
inline std::pair<double, double>
fit_rate_model(const std::vector<RateSample>& samples) {
    if (samples.size() < 2)
        throw degenerate_samples("need at least 2 precode samples");
    for (const RateSample& s : samples) {
        if (s.qstep <= 0.0 || s.kbpmp <= 0.0)
            throw degenerate_samples("rates and steps must be positive");
    }
    if (samples.size() == 2) {
        const RateSample &s1 = samples[0], &s2 = samples[1];
        if (s1.qstep == s2.qstep)
            throw degenerate_samples("precode samples share a quantization step");
        const double theta =
            std::log(s1.kbpmp / s2.kbpmp) / std::log(s1.qstep / s2.qstep);
        const double gamma = s1.kbpmp / std::pow(s1.qstep, theta);
        return {gamma, theta};
    }
    Matrix a(samples.size(), 2);
    std::vector<double> b(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) {
        a(i, 0) = std::log(samples[i].qstep);
        a(i, 1) = 1.0;
        b[i] = std::log(samples[i].kbpmp);
    }
    std::vector<double> x;
    try {
        x = least_squares(a, b);
    } catch (const rank_deficient&) {
        throw degenerate_samples("precode samples share a quantization step");
    }
    return {std::exp(x[1]), x[0]};
}

struct QpRange {
    int lo = kQpDefaultLo;
    int hi = kQpDefaultHi;
};

struct RateControlSolution {
    double qg = 0.0, qc = 0.0; // continuous optimum (steps)
    int qp_g = 0, qp_c = 0;    // chosen integer QPs
    double qstep_g = 0.0, qstep_c = 0.0;
    double predicted_mosc = 0.0;
    double predicted_mos = 0.0;
    double predicted_rate = 0.0;
    bool binding = false;      // rate constraint active at continuous optimum
    double lambda = 0.0;       // KKT multiplier (0 when not binding)
};

inline RateControlSolution
solve_rate_control(const QualityModelParams& quality,
                   const RateModelParams& rate, double target_kbpmp,
                   QpRange range = {}) {
    if (quality.p1 <= 0.0 || quality.p2 <= 0.0)
        throw non_monotone_model("p1 and p2 must be positive");
    if (rate.theta_g >= 0.0 || rate.theta_c >= 0.0)
        throw invalid_rate_model("rate exponents must be negative");
    if (rate.gamma_g <= 0.0 || rate.gamma_c <= 0.0)
        throw invalid_rate_model("rate scales must be positive");
    if (range.lo > range.hi || range.lo < kQpMin || range.hi > kQpMax)
        throw out_of_range("invalid QP range");
    if (target_kbpmp <= 0.0) throw bad_input("target rate must be positive");

    const double qmin = qp_to_qstep(range.lo);
    const double qmax = qp_to_qstep(range.hi);

    if (rate.rate(qmax, qmax) > target_kbpmp)
        throw infeasible("target below the minimum achievable rate");

    RateControlSolution sol;
    auto clampq = [&](double q) { return std::clamp(q, qmin, qmax); };

    if (rate.rate(qmin, qmin) <= target_kbpmp) {
        // Budget covers the finest steps: unconstrained corner.
        sol.qg = qmin;
        sol.qc = qmin;
        sol.binding = false;
        sol.lambda = 0.0;
    } else {
        // Constraint active: the stationarity conditions
        //   p1 = -lambda * gamma_g * theta_g * Qg^(theta_g - 1)
        //   p2 = -lambda * gamma_c * theta_c * Qc^(theta_c - 1)
        // give Q(lambda) per axis; the constraint gap is monotone
        // decreasing in lambda, so bisect.
        auto q_of_lambda = [&](double lam, double p, double gamma,
                               double theta) {
            return clampq(
                std::pow(p / (-lam * gamma * theta), 1.0 / (theta - 1.0)));
        };
        auto gap = [&](double lam) {
            const double qg =
                q_of_lambda(lam, quality.p1, rate.gamma_g, rate.theta_g);
            const double qc =
                q_of_lambda(lam, quality.p2, rate.gamma_c, rate.theta_c);
            return rate.rate(qg, qc) - target_kbpmp;
        };
        double lo = 1.0, hi = 1.0;
        while (gap(lo) < 0.0) lo /= 2.0; // shrink lambda -> finer steps, more rate
        while (gap(hi) > 0.0) hi *= 2.0;
        for (int it = 0; it < 200; ++it) {
            const double mid = 0.5 * (lo + hi);
            (gap(mid) > 0.0 ? lo : hi) = mid;
        }
        sol.lambda = 0.5 * (lo + hi);
        sol.qg = q_of_lambda(sol.lambda, quality.p1, rate.gamma_g, rate.theta_g);
        sol.qc = q_of_lambda(sol.lambda, quality.p2, rate.gamma_c, rate.theta_c);
        sol.binding = true;
    }

    // Exact integer selection: for each geometry QP, the color rate budget
    // fixes the smallest admissible color QP; pick the pair with least
    // predicted MOS^c. Rate is decreasing in QP so the sweep is exact.
    bool found = false;
    double best_mosc = std::numeric_limits<double>::infinity();
    for (int qpg = range.lo; qpg <= range.hi; ++qpg) {
        const double qg = qp_to_qstep(qpg);
        const double remaining = target_kbpmp - rate.rate_g(qg);
        if (remaining <= 0.0) continue;
        int qpc = range.hi + 1;
        for (int c = range.lo; c <= range.hi; ++c) {
            if (rate.rate_c(qp_to_qstep(c)) <= remaining) {
                qpc = c;
                break;
            }
        }
        if (qpc > range.hi) continue;
        const double mosc =
            predict_mosc(quality, qg, qp_to_qstep(qpc));
        if (!found || mosc < best_mosc) {
            found = true;
            best_mosc = mosc;
            sol.qp_g = qpg;
            sol.qp_c = qpc;
        }
    }
    if (!found) throw infeasible("no feasible QP pair in range");

    sol.qstep_g = qp_to_qstep(sol.qp_g);
    sol.qstep_c = qp_to_qstep(sol.qp_c);
    sol.predicted_mosc = predict_mosc(quality, sol.qstep_g, sol.qstep_c);
    sol.predicted_mos = mos_from_mosc(sol.predicted_mosc);
    sol.predicted_rate = rate.rate(sol.qstep_g, sol.qstep_c);
    return sol;
}

} // namespace pcq

#pragma once

// The linear MOS^c models and their fitting/evaluation machinery.
// MOS^c = 100 - MOS is the perceptual-distortion form used throughout;
// the final model is MOS^c = p1*Qg + p2*Qc + p3, optionally with the
// bilinear form a*Qg*Qc + b*Qg + c*Qc + d it was reduced from.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <optional>
#include <vector>

#include "pcq/errors.hpp"
#include "pcq/linalg.hpp"

namespace pcq {

struct BilinearParams {
    double a = 0.0, b = 0.0, c = 0.0, d = 0.0;
};

struct PerQgLine {
    double qg = 0.0;  // geometry quantization step this line was fitted at
    double c1 = 0.0;  // slope over Qc
    double c2 = 0.0;  // intercept
};

struct LineCoeffs {
    double c11 = 0.0, c12 = 0.0; // slope line: c1(Qg) = c11*Qg + c12
    double c21 = 0.0, c22 = 0.0; // intercept line: c2(Qg) = c21*Qg + c22
    double scc_slope = 0.0;      // SCC of Qg vs c1
    double scc_intercept = 0.0;  // SCC of Qg vs c2
};

struct QualityModelParams {
    double p1 = 0.0, p2 = 0.0, p3 = 0.0;
    std::optional<BilinearParams> bilinear;
    std::vector<PerQgLine> per_qg_lines;
};

struct FitReport {
    double plcc = 0.0;
    double srcc = 0.0;
    double rmse = 0.0;
    double scc = 0.0; // squared Pearson correlation
};

inline double predict_mosc(const QualityModelParams& p, double qg, double qc) {
    return p.p1 * qg + p.p2 * qc + p.p3;
}

inline double mos_from_mosc(double mosc) {
    return std::clamp(100.0 - mosc, 0.0, 100.0);
}

inline double predict_mosc_bilinear(const QualityModelParams& p, double qg,
                                    double qc) {
    if (!p.bilinear) throw bad_input("model has no bilinear parameters");
    const BilinearParams& m = *p.bilinear;
    return m.a * qg * qc + m.b * qg + m.c * qc + m.d;
}

namespace detail {

inline double mean(const std::vector<double>& v) {
    return std::accumulate(v.begin(), v.end(), 0.0) / double(v.size());
}

inline double pearson(const std::vector<double>& x,
                      const std::vector<double>& y) {
    const double mx = mean(x), my = mean(y);
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = x[i] - mx, dy = y[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0.0 || syy == 0.0)
        throw degenerate_variance("constant vector in correlation");
    return sxy / std::sqrt(sxx * syy);
}

// Average ranks for ties.
inline std::vector<double> ranks(const std::vector<double>& v) {
    std::vector<std::size_t> idx(v.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::sort(idx.begin(), idx.end(),
              [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    std::vector<double> r(v.size());
    std::size_t i = 0;
    while (i < v.size()) {
        std::size_t j = i;
        while (j + 1 < v.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
        const double avg = 0.5 * double(i + j) + 1.0;
        for (std::size_t k = i; k <= j; ++k) r[idx[k]] = avg;
        i = j + 1;
    }
    return r;
}

} // namespace detail

inline FitReport correlation_report(const std::vector<double>& predicted,
                                    const std::vector<double>& observed) {
    if (predicted.size() != observed.size())
        throw shape_mismatch("prediction/observation length mismatch");
    if (predicted.size() < 2)
        throw bad_input("need at least 2 samples for correlations");
    FitReport rep;
    rep.plcc = detail::pearson(predicted, observed);
    rep.srcc = detail::pearson(detail::ranks(predicted), detail::ranks(observed));
    double se = 0.0;
    for (std::size_t i = 0; i < predicted.size(); ++i) {
        const double d = predicted[i] - observed[i];
        se += d * d;
    }
    rep.rmse = std::sqrt(se / double(predicted.size()));
    rep.scc = rep.plcc * rep.plcc;
    return rep;
}

struct MoscSample {
    double qg, qc, mosc;
};

// OLS of mosc over [Qg, Qc, 1].
inline std::pair<QualityModelParams, FitReport>
fit_linear_mosc(const std::vector<MoscSample>& samples) {
    if (samples.size() < 3)
        throw rank_deficient("need at least 3 samples to fit (p1,p2,p3)");
    Matrix a(samples.size(), 3);
    std::vector<double> b(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) {
        a(i, 0) = samples[i].qg;
        a(i, 1) = samples[i].qc;
        a(i, 2) = 1.0;
        b[i] = samples[i].mosc;
    }
    const std::vector<double> x = least_squares(a, b);
    QualityModelParams params;
    params.p1 = x[0];
    params.p2 = x[1];
    params.p3 = x[2];
    std::vector<double> pred(samples.size()), obs(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) {
        pred[i] = predict_mosc(params, samples[i].qg, samples[i].qc);
        obs[i] = samples[i].mosc;
    }
    return {params, correlation_report(pred, obs)};
}

// Stage 1: per-Qg lines MOS^c = c1*Qc + c2. Stage 2: OLS of c1 and c2
// against Qg, yielding the bilinear coefficients (a,b,c,d) = (c11,c21,c12,c22).
inline std::pair<std::vector<PerQgLine>, LineCoeffs>
fit_per_qg_lines(const std::vector<MoscSample>& samples) {
    std::vector<double> qgs;
    for (const MoscSample& s : samples)
        if (std::find(qgs.begin(), qgs.end(), s.qg) == qgs.end())
            qgs.push_back(s.qg);
    std::sort(qgs.begin(), qgs.end());
    if (qgs.size() < 2)
        throw rank_deficient("need at least 2 distinct Qg groups");

    std::vector<PerQgLine> lines;
    for (double qg : qgs) {
        std::vector<std::pair<double, double>> rows;
        for (const MoscSample& s : samples)
            if (s.qg == qg) rows.emplace_back(s.qc, s.mosc);
        if (rows.size() < 2)
            throw rank_deficient("Qg group needs at least 2 samples");
        Matrix design(rows.size(), 2);
        std::vector<double> rhs(rows.size());
        for (std::size_t i = 0; i < rows.size(); ++i) {
            design(i, 0) = rows[i].first;
            design(i, 1) = 1.0;
            rhs[i] = rows[i].second;
        }
        const std::vector<double> x = least_squares(design, rhs);
        lines.push_back({qg, x[0], x[1]});
    }

    Matrix design(lines.size(), 2);
    std::vector<double> c1(lines.size()), c2(lines.size()), qgv(lines.size());
    for (std::size_t i = 0; i < lines.size(); ++i) {
        design(i, 0) = lines[i].qg;
        design(i, 1) = 1.0;
        qgv[i] = lines[i].qg;
        c1[i] = lines[i].c1;
        c2[i] = lines[i].c2;
    }
    const std::vector<double> s1 = least_squares(design, c1);
    const std::vector<double> s2 = least_squares(design, c2);

    LineCoeffs lc;
    lc.c11 = s1[0];
    lc.c12 = s1[1];
    lc.c21 = s2[0];
    lc.c22 = s2[1];
    const double r1 = detail::pearson(qgv, c1);
    const double r2 = detail::pearson(qgv, c2);
    lc.scc_slope = r1 * r1;
    lc.scc_intercept = r2 * r2;
    return {lines, lc};
}

} // namespace pcq

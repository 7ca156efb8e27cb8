#pragma once

// Subjective-score post-processing: per-observer Z-scores, BT.500-style
// outlier screening, MOS aggregation, per-observer agreement, and the
// two-way ANOVA over MOS^c cells.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "pcq/errors.hpp"
#include "pcq/quality_model.hpp"

namespace pcq {

// Raw or normalized ratings X_{mij}: content m, observer i, degradation j
// (one degradation = one (Qg level, Qc level) cell). Missing entries are
// tracked by `present`.
struct RatingTensor {
    std::size_t contents = 0, observers = 0, degradations = 0;
    std::vector<double> score;
    std::vector<std::uint8_t> present;

    RatingTensor() = default;
    RatingTensor(std::size_t m, std::size_t n, std::size_t j)
        : contents(m), observers(n), degradations(j), score(m * n * j, 0.0),
          present(m * n * j, 0) {}

    std::size_t idx(std::size_t m, std::size_t i, std::size_t j) const {
        return (m * observers + i) * degradations + j;
    }
    void set(std::size_t m, std::size_t i, std::size_t j, double v) {
        score[idx(m, i, j)] = v;
        present[idx(m, i, j)] = 1;
    }
    bool has(std::size_t m, std::size_t i, std::size_t j) const {
        return present[idx(m, i, j)] != 0;
    }
    double at(std::size_t m, std::size_t i, std::size_t j) const {
        return score[idx(m, i, j)];
    }
};

// Per-observer standardization (sample std, n-1) without range rescaling.
inline RatingTensor zscore_raw(const RatingTensor& t) {
    RatingTensor out = t;
    for (std::size_t i = 0; i < t.observers; ++i) {
        double sum = 0.0;
        std::size_t n = 0;
        for (std::size_t m = 0; m < t.contents; ++m)
            for (std::size_t j = 0; j < t.degradations; ++j)
                if (t.has(m, i, j)) {
                    sum += t.at(m, i, j);
                    ++n;
                }
        if (n < 2)
            throw zero_variance("observer " + std::to_string(i) +
                                " has fewer than 2 ratings");
        const double mu = sum / double(n);
        double ss = 0.0;
        for (std::size_t m = 0; m < t.contents; ++m)
            for (std::size_t j = 0; j < t.degradations; ++j)
                if (t.has(m, i, j)) {
                    const double d = t.at(m, i, j) - mu;
                    ss += d * d;
                }
        const double sigma = std::sqrt(ss / double(n - 1));
        if (sigma == 0.0)
            throw zero_variance("observer " + std::to_string(i) +
                                " gave constant ratings");
        for (std::size_t m = 0; m < t.contents; ++m)
            for (std::size_t j = 0; j < t.degradations; ++j)
                if (t.has(m, i, j))
                    out.score[out.idx(m, i, j)] = (t.at(m, i, j) - mu) / sigma;
    }
    return out;
}

// Global min-max affine map of all present scores onto [lo, hi].
inline RatingTensor rescale_to_range(const RatingTensor& t, double lo = 0.0,
                                     double hi = 100.0) {
    double zmin = std::numeric_limits<double>::infinity();
    double zmax = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < t.score.size(); ++k)
        if (t.present[k]) {
            zmin = std::min(zmin, t.score[k]);
            zmax = std::max(zmax, t.score[k]);
        }
    if (zmin > zmax) return t; // nothing present
    RatingTensor out = t;
    const double span = zmax - zmin;
    for (std::size_t k = 0; k < t.score.size(); ++k)
        if (t.present[k])
            out.score[k] = span == 0.0
                               ? 0.5 * (lo + hi)
                               : lo + (hi - lo) * (t.score[k] - zmin) / span;
    return out;
}

inline RatingTensor zscore_normalize(const RatingTensor& t) {
    return rescale_to_range(zscore_raw(t));
}

struct OutlierEntry {
    std::size_t content, observer, degradation;
    double score;
};

// BT.500 screening per (content, degradation) cell: with cell kurtosis
// beta2 in [2,4] the Gaussian mean +/- 2*sigma bound applies, otherwise
// mean +/- sqrt(20)*sigma. Outlying ratings are masked; observers are
// never dropped. Cells with fewer than 3 ratings are left untouched.
inline std::pair<RatingTensor, std::vector<OutlierEntry>>
remove_outliers(const RatingTensor& t) {
    RatingTensor out = t;
    std::vector<OutlierEntry> masked;
    for (std::size_t m = 0; m < t.contents; ++m) {
        for (std::size_t j = 0; j < t.degradations; ++j) {
            std::vector<std::pair<std::size_t, double>> cell;
            for (std::size_t i = 0; i < t.observers; ++i)
                if (t.has(m, i, j)) cell.emplace_back(i, t.at(m, i, j));
            if (cell.size() < 3) continue;
            const double n = double(cell.size());
            double mu = 0.0;
            for (auto& [i, v] : cell) mu += v;
            mu /= n;
            double m2 = 0.0, m4 = 0.0, ss = 0.0;
            for (auto& [i, v] : cell) {
                const double d = v - mu;
                m2 += d * d;
                m4 += d * d * d * d;
                ss += d * d;
            }
            m2 /= n;
            m4 /= n;
            if (m2 == 0.0) continue; // all ratings identical
            const double beta2 = m4 / (m2 * m2);
            const double sigma = std::sqrt(ss / (n - 1.0));
            const double bound =
                (beta2 >= 2.0 && beta2 <= 4.0) ? 2.0 * sigma
                                               : std::sqrt(20.0) * sigma;
            for (auto& [i, v] : cell) {
                if (std::abs(v - mu) > bound) {
                    out.present[out.idx(m, i, j)] = 0;
                    masked.push_back({m, i, j, v});
                }
            }
        }
    }
    return {std::move(out), std::move(masked)};
}

struct MosTable {
    std::size_t contents = 0, degradations = 0;
    std::vector<double> mos;  // indexed m * degradations + j
    std::vector<double> mosc; // 100 - mos

    double mos_at(std::size_t m, std::size_t j) const {
        return mos[m * degradations + j];
    }
};

inline MosTable aggregate_mos(const RatingTensor& t) {
    MosTable table;
    table.contents = t.contents;
    table.degradations = t.degradations;
    table.mos.resize(t.contents * t.degradations);
    table.mosc.resize(t.contents * t.degradations);
    for (std::size_t m = 0; m < t.contents; ++m) {
        for (std::size_t j = 0; j < t.degradations; ++j) {
            double sum = 0.0;
            std::size_t n = 0;
            for (std::size_t i = 0; i < t.observers; ++i)
                if (t.has(m, i, j)) {
                    sum += t.at(m, i, j);
                    ++n;
                }
            if (n == 0)
                throw empty_cell("no unmasked ratings for content " +
                                 std::to_string(m) + ", degradation " +
                                 std::to_string(j));
            table.mos[m * t.degradations + j] = sum / double(n);
            table.mosc[m * t.degradations + j] =
                100.0 - table.mos[m * t.degradations + j];
        }
    }
    return table;
}

struct ObserverAgreement {
    double plcc = 0.0;
    double srcc = 0.0;
};

inline std::vector<ObserverAgreement>
observer_agreement(const RatingTensor& t, const MosTable& mos) {
    std::vector<ObserverAgreement> out(t.observers);
    for (std::size_t i = 0; i < t.observers; ++i) {
        std::vector<double> own, panel;
        for (std::size_t m = 0; m < t.contents; ++m)
            for (std::size_t j = 0; j < t.degradations; ++j)
                if (t.has(m, i, j)) {
                    own.push_back(t.at(m, i, j));
                    panel.push_back(mos.mos_at(m, j));
                }
        if (own.size() < 2)
            throw degenerate_variance("observer " + std::to_string(i) +
                                      " rated fewer than 2 cells");
        const FitReport rep = correlation_report(own, panel);
        out[i] = {rep.plcc, rep.srcc};
    }
    return out;
}

struct AnovaRow {
    double ss = 0.0;
    std::size_t df = 0;
    double ms = 0.0;
    double f = 0.0;
    bool f_defined = true;
};

struct AnovaTable {
    AnovaRow qg, qc, interaction;
    double ss_error = 0.0;
    std::size_t df_error = 0;
    double ms_error = 0.0;
};

// Balanced two-way ANOVA over MOS^c cells: i indexes Qg levels (I of
// them), j indexes Qc levels (J), l indexes contents (L), with
// cells[(i*J + j)*L + l]. Contents act as replicates.
inline AnovaTable two_way_anova(const std::vector<double>& cells,
                                std::size_t levels_qg, std::size_t levels_qc,
                                std::size_t replicates) {
    const std::size_t I = levels_qg, J = levels_qc, L = replicates;
    if (I < 2 || J < 2 || L < 2)
        throw unbalanced_design("need at least 2 levels per factor and 2 replicates");
    if (cells.size() != I * J * L)
        throw unbalanced_design("cell count does not match I*J*L");

    auto at = [&](std::size_t i, std::size_t j, std::size_t l) {
        return cells[(i * J + j) * L + l];
    };

    double grand = 0.0;
    for (double v : cells) grand += v;
    grand /= double(I * J * L);

    std::vector<double> mean_i(I, 0.0), mean_j(J, 0.0), mean_ij(I * J, 0.0);
    for (std::size_t i = 0; i < I; ++i)
        for (std::size_t j = 0; j < J; ++j)
            for (std::size_t l = 0; l < L; ++l) {
                const double v = at(i, j, l);
                mean_i[i] += v;
                mean_j[j] += v;
                mean_ij[i * J + j] += v;
            }
    for (double& v : mean_i) v /= double(J * L);
    for (double& v : mean_j) v /= double(I * L);
    for (double& v : mean_ij) v /= double(L);

    AnovaTable tb;
    for (std::size_t i = 0; i < I; ++i) {
        const double d = mean_i[i] - grand;
        tb.qg.ss += d * d;
    }
    tb.qg.ss *= double(J * L);
    for (std::size_t j = 0; j < J; ++j) {
        const double d = mean_j[j] - grand;
        tb.qc.ss += d * d;
    }
    tb.qc.ss *= double(I * L);
    for (std::size_t i = 0; i < I; ++i)
        for (std::size_t j = 0; j < J; ++j) {
            const double d = mean_ij[i * J + j] - mean_i[i] - mean_j[j] + grand;
            tb.interaction.ss += d * d;
        }
    tb.interaction.ss *= double(L);
    for (std::size_t i = 0; i < I; ++i)
        for (std::size_t j = 0; j < J; ++j)
            for (std::size_t l = 0; l < L; ++l) {
                const double d = at(i, j, l) - mean_ij[i * J + j];
                tb.ss_error += d * d;
            }

    tb.qg.df = I - 1;
    tb.qc.df = J - 1;
    tb.interaction.df = (I - 1) * (J - 1);
    tb.df_error = I * J * (L - 1);

    tb.qg.ms = tb.qg.ss / double(tb.qg.df);
    tb.qc.ms = tb.qc.ss / double(tb.qc.df);
    tb.interaction.ms = tb.interaction.ss / double(tb.interaction.df);
    tb.ms_error = tb.ss_error / double(tb.df_error);

    for (AnovaRow* row : {&tb.qg, &tb.qc, &tb.interaction}) {
        if (tb.ms_error == 0.0) {
            row->f_defined = false;
            row->f = 0.0;
        } else {
            row->f = row->ms / tb.ms_error;
        }
    }
    return tb;
}

} // namespace pcq

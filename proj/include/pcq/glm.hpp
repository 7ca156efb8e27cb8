#pragma once

// Generalized linear predictor mapping content features to the quality
// model parameters: P = [1, cfgd, cbmv] * H, with H a 3x3 matrix stored
// row-major. Row 0 holds the constant weights, row 1 the cfgd weights,
// row 2 the cbmv weights; columns correspond to (p1, p2, p3). This is the
// orientation the trained coefficients are published in; keep any change
// confined to this header and the JSON (de)serializer.

#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include "pcq/errors.hpp"
#include "pcq/features.hpp"
#include "pcq/linalg.hpp"
#include "pcq/quality_model.hpp"

namespace pcq {

struct GlmMatrix {
    std::array<std::array<double, 3>, 3> h{}; // h[row][col]
    unsigned v_size = 64;
    std::size_t knn_k = 8;
    std::string luma_standard = "bt709";

    static constexpr std::array<const char*, 3> row_labels = {"const", "cfgd",
                                                              "cbmv"};
    static constexpr std::array<const char*, 3> col_labels = {"p1", "p2", "p3"};
};

// Published coefficients for the WPC training split (V = 64^3 CBMV).
inline GlmMatrix glm_paper_preset() {
    GlmMatrix m;
    m.h = {{{0.1817, 0.2058, 18.4528},
            {0.0034, -0.0070, -0.0199},
            {-0.0116, 0.0292, -1.5427}}};
    return m;
}

inline QualityModelParams glm_predict(const GlmMatrix& m,
                                      const FeatureVector& f) {
    const std::array<double, 3> feat = {1.0, f.cfgd, f.cbmv};
    std::array<double, 3> p{};
    for (std::size_t j = 0; j < 3; ++j)
        for (std::size_t k = 0; k < 3; ++k) p[j] += feat[k] * m.h[k][j];
    QualityModelParams out;
    out.p1 = p[0];
    out.p2 = p[1];
    out.p3 = p[2];
    return out;
}

struct GlmTrainingRow {
    FeatureVector features;
    QualityModelParams params;
};

struct GlmTrainResult {
    GlmMatrix matrix;
    double epsilon = 0.0; // residual sum of squared parameter errors
};

inline GlmTrainResult glm_train(const std::vector<GlmTrainingRow>& rows) {
    if (rows.size() < 3)
        throw rank_deficient("need at least 3 training rows for a 3x3 H");
    Matrix f(rows.size(), 3);
    Matrix p(rows.size(), 3);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        f(i, 0) = 1.0;
        f(i, 1) = rows[i].features.cfgd;
        f(i, 2) = rows[i].features.cbmv;
        p(i, 0) = rows[i].params.p1;
        p(i, 1) = rows[i].params.p2;
        p(i, 2) = rows[i].params.p3;
    }
    const Matrix h = least_squares(f, p);

    GlmTrainResult res;
    for (std::size_t r = 0; r < 3; ++r)
        for (std::size_t c = 0; c < 3; ++c) res.matrix.h[r][c] = h(r, c);
    if (!rows.empty()) {
        res.matrix.v_size = rows.front().features.v_size;
        res.matrix.knn_k = rows.front().features.knn_k;
    }
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const QualityModelParams pred = glm_predict(res.matrix, rows[i].features);
        const double d1 = pred.p1 - rows[i].params.p1;
        const double d2 = pred.p2 - rows[i].params.p2;
        const double d3 = pred.p3 - rows[i].params.p3;
        res.epsilon += d1 * d1 + d2 * d2 + d3 * d3;
    }
    return res;
}

} // namespace pcq

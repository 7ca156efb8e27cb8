// pcq: command-line front end for the point cloud perceptual quality
// toolkit. Subcommands: features, predict-mos, train-glm, subjective,
// psnr, rate-control. JSON payloads go to stdout, diagnostics to stderr.

#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "pcq/baseline.hpp"
#include "pcq/errors.hpp"
#include "pcq/features.hpp"
#include "pcq/glm.hpp"
#include "pcq/ply_io.hpp"
#include "pcq/quality_model.hpp"
#include "pcq/rate_control.hpp"
#include "pcq/serialize.hpp"
#include "pcq/subjective.hpp"

namespace {

using pcq::json;

pcq::LumaWeights luma_weights(const std::string& standard) {
    if (standard == "bt709") return pcq::kBt709;
    if (standard == "bt601") return pcq::LumaWeights{0.299, 0.587, 0.114};
    throw pcq::bad_input("unknown luma standard '" + standard + "'");
}

pcq::GlmMatrix load_glm(const std::string& path) {
    if (path.empty() || path == "paper") return pcq::glm_paper_preset();
    return pcq::glm_from_json(pcq::load_json_file(path));
}

void emit(const json& payload) { std::cout << payload.dump(2) << "\n"; }

struct FeatureArgs {
    std::string ply;
    std::size_t k = 8;
    unsigned v = 64;
    std::string luma = "bt709";
};

void run_features(const FeatureArgs& a) {
    if (a.v != 8 && a.v != 16 && a.v != 32 && a.v != 64)
        throw pcq::bad_input("V must be one of 8, 16, 32, 64");
    const pcq::PointCloud cloud = pcq::read_ply(a.ply);
    const pcq::FeatureVector f =
        pcq::extract_features(cloud, a.k, a.v, luma_weights(a.luma));
    json out = pcq::to_json(f, a.luma);
    out["config"] = {{"input", a.ply}, {"K", a.k}, {"V", a.v},
                     {"luma_standard", a.luma}};
    emit(out);
}

struct PredictArgs {
    std::string features;
    std::string glm = "paper";
    double qg = 0.0, qc = 0.0;
    bool qp_inputs = false;
};

void run_predict(const PredictArgs& a) {
    const pcq::FeatureVector f =
        pcq::feature_vector_from_json(pcq::load_json_file(a.features));
    const pcq::GlmMatrix h = load_glm(a.glm);
    const pcq::QualityModelParams params = pcq::glm_predict(h, f);
    const double qg = a.qp_inputs ? pcq::qp_to_qstep(int(a.qg)) : a.qg;
    const double qc = a.qp_inputs ? pcq::qp_to_qstep(int(a.qc)) : a.qc;
    const double mosc = pcq::predict_mosc(params, qg, qc);
    json out;
    out["mosc"] = mosc;
    out["mos"] = pcq::mos_from_mosc(mosc);
    out["params"] = pcq::to_json(params);
    out["config"] = {{"features", a.features}, {"glm", a.glm},
                     {"qg", qg},               {"qc", qc},
                     {"qp_inputs", a.qp_inputs}};
    emit(out);
}

struct TrainArgs {
    std::string rows;
};

void run_train(const TrainArgs& a) {
    const auto rows = pcq::read_glm_rows_csv(a.rows);
    const pcq::GlmTrainResult res = pcq::glm_train(rows);
    json out = pcq::to_json(res.matrix);
    out["epsilon"] = res.epsilon;
    out["config"] = {{"rows", a.rows}, {"n_rows", rows.size()}};
    emit(out);
}

struct SubjectiveArgs {
    std::string ratings;
    bool anova = false;
    bool skip_outliers = false;
};

void run_subjective(const SubjectiveArgs& a) {
    const pcq::RatingsCsv csv = pcq::read_ratings_csv(a.ratings);
    pcq::RatingTensor z = pcq::zscore_normalize(csv.tensor);
    std::vector<pcq::OutlierEntry> masked;
    if (!a.skip_outliers) {
        auto [clean, outliers] = pcq::remove_outliers(z);
        z = std::move(clean);
        masked = std::move(outliers);
    }
    const pcq::MosTable mos = pcq::aggregate_mos(z);
    const auto agreement = pcq::observer_agreement(z, mos);

    json out;
    out["mos_table"] = json::array();
    for (std::size_t m = 0; m < mos.contents; ++m)
        for (std::size_t j = 0; j < mos.degradations; ++j) {
            out["mos_table"].push_back(
                {{"content", csv.content_ids[m]},
                 {"qg_level", csv.degradations[j].first},
                 {"qc_level", csv.degradations[j].second},
                 {"mos", mos.mos_at(m, j)},
                 {"mosc", 100.0 - mos.mos_at(m, j)}});
        }
    out["outliers_masked"] = json::array();
    for (const pcq::OutlierEntry& e : masked)
        out["outliers_masked"].push_back(
            {{"content", csv.content_ids[e.content]},
             {"observer", csv.observer_ids[e.observer]},
             {"qg_level", csv.degradations[e.degradation].first},
             {"qc_level", csv.degradations[e.degradation].second},
             {"score", e.score}});
    out["observer_agreement"] = json::array();
    for (std::size_t i = 0; i < agreement.size(); ++i)
        out["observer_agreement"].push_back(
            {{"observer", csv.observer_ids[i]},
             {"plcc", agreement[i].plcc},
             {"srcc", agreement[i].srcc}});

    if (a.anova) {
        // Reshape MOS^c cells into (Qg level, Qc level, content).
        std::vector<std::string> qg_levels, qc_levels;
        for (const auto& [qg, qc] : csv.degradations) {
            if (std::find(qg_levels.begin(), qg_levels.end(), qg) ==
                qg_levels.end())
                qg_levels.push_back(qg);
            if (std::find(qc_levels.begin(), qc_levels.end(), qc) ==
                qc_levels.end())
                qc_levels.push_back(qc);
        }
        const std::size_t I = qg_levels.size(), J = qc_levels.size(),
                          L = mos.contents;
        if (csv.degradations.size() != I * J)
            throw pcq::unbalanced_design(
                "degradations do not form a full Qg x Qc grid");
        std::vector<double> cells(I * J * L, 0.0);
        std::vector<std::uint8_t> seen(I * J * L, 0);
        for (std::size_t j = 0; j < csv.degradations.size(); ++j) {
            const auto gi = std::size_t(
                std::find(qg_levels.begin(), qg_levels.end(),
                          csv.degradations[j].first) - qg_levels.begin());
            const auto ci = std::size_t(
                std::find(qc_levels.begin(), qc_levels.end(),
                          csv.degradations[j].second) - qc_levels.begin());
            for (std::size_t m = 0; m < L; ++m) {
                cells[(gi * J + ci) * L + m] = 100.0 - mos.mos_at(m, j);
                seen[(gi * J + ci) * L + m] = 1;
            }
        }
        for (std::uint8_t s : seen)
            if (!s)
                throw pcq::unbalanced_design("missing (Qg, Qc) cell");
        out["anova"] = pcq::to_json(pcq::two_way_anova(cells, I, J, L));
    }
    out["config"] = {{"ratings", a.ratings},
                     {"anova", a.anova},
                     {"outlier_removal", !a.skip_outliers}};
    emit(out);
}

struct PsnrArgs {
    std::string reference, distorted;
    std::string luma = "bt709";
};

void run_psnr(const PsnrArgs& a) {
    const pcq::PointCloud ref = pcq::read_ply(a.reference);
    const pcq::PointCloud dist = pcq::read_ply(a.distorted);
    const pcq::P2PResult r = pcq::psnr_y(ref, dist, luma_weights(a.luma));
    json out;
    out["mse_ab"] = r.mse_ab;
    out["mse_ba"] = r.mse_ba;
    if (std::isinf(r.psnr_y))
        out["psnr_y_db"] = "inf";
    else
        out["psnr_y_db"] = r.psnr_y;
    out["config"] = {{"reference", a.reference},
                     {"distorted", a.distorted},
                     {"luma_standard", a.luma}};
    emit(out);
}

struct RateControlArgs {
    std::string features;
    std::string glm = "paper";
    std::string rate_samples;
    double target = 0.0;
    int qp_lo = pcq::kQpDefaultLo;
    int qp_hi = pcq::kQpDefaultHi;
    bool full_range = false;
};

void run_rate_control(const RateControlArgs& a) {
    const pcq::FeatureVector f =
        pcq::feature_vector_from_json(pcq::load_json_file(a.features));
    const pcq::GlmMatrix h = load_glm(a.glm);
    const pcq::QualityModelParams params = pcq::glm_predict(h, f);

    const pcq::PrecodeCsv precode = pcq::read_precode_csv(a.rate_samples);
    pcq::RateModelParams rate;
    std::tie(rate.gamma_g, rate.theta_g) = pcq::fit_rate_model(precode.geom);
    std::tie(rate.gamma_c, rate.theta_c) = pcq::fit_rate_model(precode.color);

    pcq::QpRange range{a.qp_lo, a.qp_hi};
    if (a.full_range) range = {pcq::kQpMin, pcq::kQpMax};
    const pcq::RateControlSolution sol =
        pcq::solve_rate_control(params, rate, a.target, range);

    json out;
    out["qp_g"] = sol.qp_g;
    out["qp_c"] = sol.qp_c;
    out["qstep_g"] = sol.qstep_g;
    out["qstep_c"] = sol.qstep_c;
    out["qg_continuous"] = sol.qg;
    out["qc_continuous"] = sol.qc;
    out["predicted_mosc"] = sol.predicted_mosc;
    out["predicted_mos"] = sol.predicted_mos;
    out["predicted_rate_kbpmp"] = sol.predicted_rate;
    out["binding"] = sol.binding;
    out["quality_params"] = pcq::to_json(params);
    out["rate_model"] = {{"gamma_g", rate.gamma_g},
                         {"theta_g", rate.theta_g},
                         {"gamma_c", rate.gamma_c},
                         {"theta_c", rate.theta_c}};
    out["config"] = {{"features", a.features},
                     {"glm", a.glm},
                     {"rate_samples", a.rate_samples},
                     {"target_kbpmp", a.target},
                     {"qp_range", {range.lo, range.hi}}};
    emit(out);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Reduced-reference perceptual quality toolkit for "
                 "compressed 3D point clouds"};
    app.require_subcommand(1);

    FeatureArgs fa;
    auto* features = app.add_subcommand(
        "features", "Extract CFGD/CBMV features from a reference PLY");
    features->add_option("ply", fa.ply, "Reference point cloud (PLY)")
        ->required();
    features->add_option("-K,--knn", fa.k, "Neighbor count for CFGD")
        ->default_val(8);
    features->add_option("-V,--voxels", fa.v,
                         "Voxel edge count for CBMV (8, 16, 32, 64)")
        ->default_val(64);
    features->add_option("--luma", fa.luma, "Luma standard (bt709, bt601)")
        ->default_val("bt709");

    PredictArgs pa;
    auto* predict = app.add_subcommand(
        "predict-mos", "Predict MOS from features and quantization steps");
    predict->add_option("--features", pa.features, "Feature JSON file")
        ->required();
    predict->add_option("--glm", pa.glm,
                        "GLM matrix JSON ('paper' for the bundled preset)")
        ->default_val("paper");
    predict->add_option("--qg", pa.qg, "Geometry quantization step")->required();
    predict->add_option("--qc", pa.qc, "Color quantization step")->required();
    predict->add_flag("--qp", pa.qp_inputs,
                      "Interpret --qg/--qc as integer QPs");

    TrainArgs ta;
    auto* train =
        app.add_subcommand("train-glm", "Fit the GLM matrix from a CSV of "
                                        "(cfgd, cbmv, p1, p2, p3) rows");
    train->add_option("--rows", ta.rows, "Training CSV")->required();

    SubjectiveArgs sa;
    auto* subjective = app.add_subcommand(
        "subjective", "Post-process raw subjective ratings (CSV)");
    subjective->add_option("--ratings", sa.ratings, "Ratings CSV")->required();
    subjective->add_flag("--anova", sa.anova, "Run the two-way ANOVA");
    subjective->add_flag("--no-outlier-removal", sa.skip_outliers,
                         "Skip BT.500 screening");

    PsnrArgs ya;
    auto* psnr = app.add_subcommand(
        "psnr", "Point-to-point luma PSNR between two PLY clouds");
    psnr->add_option("reference", ya.reference, "Reference PLY")->required();
    psnr->add_option("distorted", ya.distorted, "Distorted PLY")->required();
    psnr->add_option("--luma", ya.luma, "Luma standard")->default_val("bt709");

    RateControlArgs ra;
    auto* rc = app.add_subcommand(
        "rate-control", "Solve for the optimal (QPg, QPc) under a bitrate "
                        "budget");
    rc->add_option("--features", ra.features, "Feature JSON file")->required();
    rc->add_option("--glm", ra.glm, "GLM matrix JSON")->default_val("paper");
    rc->add_option("--rate-samples", ra.rate_samples,
                   "Precode CSV (kind, qstep, kbpmp)")
        ->required();
    rc->add_option("--target-kbpmp", ra.target,
                   "Target bitrate, kilobits per million points")
        ->required();
    rc->add_option("--qp-min", ra.qp_lo, "Lowest QP")->default_val(26);
    rc->add_option("--qp-max", ra.qp_hi, "Highest QP")->default_val(50);
    rc->add_flag("--full-range", ra.full_range, "Allow the full QP range 1..51");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*features) run_features(fa);
        if (*predict) run_predict(pa);
        if (*train) run_train(ta);
        if (*subjective) run_subjective(sa);
        if (*psnr) run_psnr(ya);
        if (*rc) run_rate_control(ra);
    } catch (const pcq::error& e) {
        std::cerr << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "Error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

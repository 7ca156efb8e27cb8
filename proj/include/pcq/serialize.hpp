#pragma once

// JSON and CSV (de)serialization for the CLI surface. JSON uses ordered
// keys so identical invocations produce byte-identical output.

#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "pcq/errors.hpp"
#include "pcq/features.hpp"
#include "pcq/glm.hpp"
#include "pcq/quality_model.hpp"
#include "pcq/rate_control.hpp"
#include "pcq/subjective.hpp"

namespace pcq {

using json = nlohmann::ordered_json;

inline json to_json(const FeatureVector& f, const std::string& luma_standard) {
    json j;
    j["cfgd"] = f.cfgd;
    j["cbmv"] = f.cbmv;
    j["K"] = f.knn_k;
    j["V"] = f.v_size;
    j["luma_standard"] = luma_standard;
    return j;
}

inline FeatureVector feature_vector_from_json(const json& j) {
    FeatureVector f;
    try {
        f.cfgd = j.at("cfgd").get<double>();
        f.cbmv = j.at("cbmv").get<double>();
        if (j.contains("K")) f.knn_k = j.at("K").get<std::size_t>();
        if (j.contains("V")) f.v_size = j.at("V").get<unsigned>();
    } catch (const json::exception& e) {
        throw bad_input(std::string("bad feature JSON: ") + e.what());
    }
    return f;
}

inline json to_json(const GlmMatrix& m) {
    json j;
    j["h"] = json::array();
    for (const auto& row : m.h) j["h"].push_back(row);
    j["row_labels"] = m.row_labels;
    j["col_labels"] = m.col_labels;
    j["meta"] = {{"V", m.v_size}, {"K", m.knn_k}, {"luma_standard", m.luma_standard}};
    return j;
}

inline GlmMatrix glm_from_json(const json& j) {
    GlmMatrix m;
    try {
        const auto& h = j.at("h");
        if (h.size() != 3) throw shape_mismatch("GLM matrix must be 3x3");
        for (std::size_t r = 0; r < 3; ++r) {
            if (h[r].size() != 3) throw shape_mismatch("GLM matrix must be 3x3");
            for (std::size_t c = 0; c < 3; ++c)
                m.h[r][c] = h[r][c].get<double>();
        }
        if (j.contains("meta")) {
            const auto& meta = j.at("meta");
            if (meta.contains("V")) m.v_size = meta.at("V").get<unsigned>();
            if (meta.contains("K")) m.knn_k = meta.at("K").get<std::size_t>();
            if (meta.contains("luma_standard"))
                m.luma_standard = meta.at("luma_standard").get<std::string>();
        }
    } catch (const json::exception& e) {
        throw bad_input(std::string("bad GLM JSON: ") + e.what());
    }
    return m;
}

inline json to_json(const QualityModelParams& p) {
    json j;
    j["p1"] = p.p1;
    j["p2"] = p.p2;
    j["p3"] = p.p3;
    if (p.bilinear) {
        j["a"] = p.bilinear->a;
        j["b"] = p.bilinear->b;
        j["c"] = p.bilinear->c;
        j["d"] = p.bilinear->d;
    }
    return j;
}

inline json to_json(const FitReport& r) {
    return json{{"plcc", r.plcc}, {"srcc", r.srcc}, {"rmse", r.rmse}, {"scc", r.scc}};
}

inline json to_json(const AnovaTable& t) {
    auto row = [](const AnovaRow& r) {
        json j{{"ss", r.ss}, {"df", r.df}, {"ms", r.ms}};
        if (r.f_defined)
            j["f"] = r.f;
        else
            j["f"] = nullptr;
        return j;
    };
    json j;
    j["qg"] = row(t.qg);
    j["qc"] = row(t.qc);
    j["qg_x_qc"] = row(t.interaction);
    j["error"] = {{"ss", t.ss_error}, {"df", t.df_error}, {"ms", t.ms_error}};
    return j;
}

inline json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw io_failure("cannot open '" + path + "'");
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw bad_input("invalid JSON in '" + path + "': " + e.what());
    }
}

// ---- CSV ----

inline std::vector<std::vector<std::string>>
read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw io_failure("cannot open '" + path + "'");
    std::vector<std::vector<std::string>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> fields;
        std::stringstream ls(line);
        std::string field;
        while (std::getline(ls, field, ',')) {
            // trim
            const auto b = field.find_first_not_of(" \t");
            const auto e = field.find_last_not_of(" \t");
            fields.push_back(b == std::string::npos
                                 ? std::string{}
                                 : field.substr(b, e - b + 1));
        }
        rows.push_back(std::move(fields));
    }
    return rows;
}

inline double parse_number(const std::string& s, const std::string& what) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw bad_input("cannot parse " + what + " '" + s + "'");
    }
}

// Ratings CSV: content_id, observer_id, qg_level, qc_level, score.
// Returns the tensor plus the ordered label lists behind each axis.
struct RatingsCsv {
    RatingTensor tensor;
    std::vector<std::string> content_ids;
    std::vector<std::string> observer_ids;
    std::vector<std::pair<std::string, std::string>> degradations; // (qg, qc)
};

inline RatingsCsv read_ratings_csv(const std::string& path) {
    auto rows = read_csv(path);
    if (rows.empty()) throw bad_input("empty ratings CSV");
    std::size_t first = 0;
    if (!rows[0].empty() && rows[0][0] == "content_id") first = 1;

    auto index_of = [](std::vector<std::string>& labels, const std::string& v) {
        for (std::size_t i = 0; i < labels.size(); ++i)
            if (labels[i] == v) return i;
        labels.push_back(v);
        return labels.size() - 1;
    };

    RatingsCsv out;
    std::vector<std::array<std::size_t, 3>> entries;
    std::vector<double> scores;
    for (std::size_t r = first; r < rows.size(); ++r) {
        if (rows[r].size() != 5)
            throw bad_input("ratings CSV row " + std::to_string(r + 1) +
                            " must have 5 fields");
        const std::size_t m = index_of(out.content_ids, rows[r][0]);
        const std::size_t i = index_of(out.observer_ids, rows[r][1]);
        const auto key = std::make_pair(rows[r][2], rows[r][3]);
        std::size_t j = out.degradations.size();
        for (std::size_t d = 0; d < out.degradations.size(); ++d)
            if (out.degradations[d] == key) {
                j = d;
                break;
            }
        if (j == out.degradations.size()) out.degradations.push_back(key);
        entries.push_back({m, i, j});
        scores.push_back(parse_number(rows[r][4], "score"));
    }
    out.tensor = RatingTensor(out.content_ids.size(), out.observer_ids.size(),
                              out.degradations.size());
    for (std::size_t k = 0; k < entries.size(); ++k)
        out.tensor.set(entries[k][0], entries[k][1], entries[k][2], scores[k]);
    return out;
}

// Precode CSV: kind{geom,color}, qstep, kbpmp.
struct PrecodeCsv {
    std::vector<RateSample> geom;
    std::vector<RateSample> color;
};

inline PrecodeCsv read_precode_csv(const std::string& path) {
    auto rows = read_csv(path);
    if (rows.empty()) throw bad_input("empty precode CSV");
    std::size_t first = 0;
    if (!rows[0].empty() && rows[0][0] == "kind") first = 1;
    PrecodeCsv out;
    for (std::size_t r = first; r < rows.size(); ++r) {
        if (rows[r].size() != 3)
            throw bad_input("precode CSV row " + std::to_string(r + 1) +
                            " must have 3 fields");
        RateSample s{parse_number(rows[r][1], "qstep"),
                     parse_number(rows[r][2], "kbpmp")};
        if (rows[r][0] == "geom")
            out.geom.push_back(s);
        else if (rows[r][0] == "color")
            out.color.push_back(s);
        else
            throw bad_input("precode kind must be 'geom' or 'color', got '" +
                            rows[r][0] + "'");
    }
    return out;
}

// GLM training CSV: cfgd, cbmv, p1, p2, p3.
inline std::vector<GlmTrainingRow> read_glm_rows_csv(const std::string& path) {
    auto rows = read_csv(path);
    if (rows.empty()) throw bad_input("empty training CSV");
    std::size_t first = 0;
    if (!rows[0].empty() && rows[0][0] == "cfgd") first = 1;
    std::vector<GlmTrainingRow> out;
    for (std::size_t r = first; r < rows.size(); ++r) {
        if (rows[r].size() != 5)
            throw bad_input("training CSV row " + std::to_string(r + 1) +
                            " must have 5 fields");
        GlmTrainingRow row;
        row.features.cfgd = parse_number(rows[r][0], "cfgd");
        row.features.cbmv = parse_number(rows[r][1], "cbmv");
        row.params.p1 = parse_number(rows[r][2], "p1");
        row.params.p2 = parse_number(rows[r][3], "p2");
        row.params.p3 = parse_number(rows[r][4], "p3");
        out.push_back(row);
    }
    return out;
}

} // namespace pcq

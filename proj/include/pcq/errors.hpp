#pragma once

#include <stdexcept>
#include <string>

namespace pcq {

// All library errors derive from pcq::error and carry a stable short name
// that the CLI prints on stderr.
class error : public std::runtime_error {
public:
    error(std::string name, const std::string& msg)
        : std::runtime_error(name + ": " + msg), name_(std::move(name)) {}
    const std::string& name() const noexcept { return name_; }

private:
    std::string name_;
};

#define PCQ_DEFINE_ERROR(type, name_literal)                      \
    class type : public error {                                   \
    public:                                                       \
        explicit type(const std::string& msg)                     \
            : error(name_literal, msg) {}                         \
    }

PCQ_DEFINE_ERROR(malformed_header, "MalformedHeader");
PCQ_DEFINE_ERROR(unsupported_format, "UnsupportedFormat");
PCQ_DEFINE_ERROR(count_mismatch, "CountMismatch");
PCQ_DEFINE_ERROR(io_failure, "IoFailure");
PCQ_DEFINE_ERROR(colorless_cloud, "ColorlessCloud");
PCQ_DEFINE_ERROR(degenerate_cloud, "DegenerateCloud");
PCQ_DEFINE_ERROR(empty_cloud, "EmptyCloud");
PCQ_DEFINE_ERROR(rank_deficient, "RankDeficient");
PCQ_DEFINE_ERROR(degenerate_variance, "DegenerateVariance");
PCQ_DEFINE_ERROR(zero_variance, "ZeroVariance");
PCQ_DEFINE_ERROR(empty_cell, "EmptyCell");
PCQ_DEFINE_ERROR(unbalanced_design, "UnbalancedDesign");
PCQ_DEFINE_ERROR(shape_mismatch, "ShapeMismatch");
PCQ_DEFINE_ERROR(out_of_range, "OutOfRange");
PCQ_DEFINE_ERROR(degenerate_samples, "DegenerateSamples");
PCQ_DEFINE_ERROR(infeasible, "Infeasible");
PCQ_DEFINE_ERROR(non_monotone_model, "NonMonotoneModel");
PCQ_DEFINE_ERROR(invalid_rate_model, "InvalidRateModel");
PCQ_DEFINE_ERROR(bad_input, "BadInput");

#undef PCQ_DEFINE_ERROR

} // namespace pcq

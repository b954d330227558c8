#pragma once

// Convergence studies: heterogeneous vs homogenised space-time solves over
// an eps ladder, error metrics against source norms, fitted rates.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "homoglab/evolution_solvers.hpp"
#include "homoglab/rates.hpp"

namespace homoglab::study {

/// Source norm a metric is measured against.
enum class RhsNorm {
    dtt_f,            // ||dt^2 f||
    dt_f,             // ||dt f||
    f,                // ||f||
    dt_minus_half_f,  // ||dt^{-1/2} f||
    dtt_f_plus_dt_g,  // ||dt^2 f|| + ||dt g||
};

const char* to_string(RhsNorm rhs);

struct MetricInfo {
    evolution::Kind kind;
    std::string name;
    RhsNorm rhs;
    std::string description;
};

/// Every metric the study can compute, grouped by equation kind.
const std::vector<MetricInfo>& metric_registry();
std::vector<std::string> metric_names(evolution::Kind kind);

struct StudyConfig {
    evolution::Kind kind = evolution::Kind::wave;
    std::optional<torus::CoefficientCell> a;
    std::optional<torus::CoefficientCell> b;
    std::optional<torus::CoefficientCell> gamma;
    std::vector<double> eps;
    double nu = 1.0;
    int cell_points = 32;
    int half_window = 64;
    double horizon = 0.0;  // 0 selects 16 / nu
    evolution::SourceSpec source;    // seeds are assigned per sampled source
    evolution::SourceSpec g_source;  // thermoelastic; seeds are assigned per sampled source
    int random_sources = 4;
    std::vector<std::string> metrics;  // empty selects every metric of kind
    double tolerance = 1e-12;

    /// Throws ConfigError on inconsistent settings.
    void validate() const;
    std::vector<std::string> selected_metrics() const;
};

/// Reads "1/M", "0.25" or a bare number. Throws ConfigError.
double parse_eps(const std::string& text);

/// JSON study description; coefficient entries are either inline term lists
/// or paths (resolved against base_dir). Throws ConfigError.
StudyConfig parse_study_config(const std::string& json_text, const std::string& base_dir = ".");

struct ReportRow {
    double eps = 0.0;
    std::string metric;
    double lhs = 0.0;
    double rhs_norm = 0.0;
    double ratio = 0.0;  // lhs / rhs_norm, worst over the sampled sources
};

struct MetricSummary {
    std::string metric;
    rates::SlopeFit fit;    // ratio against eps
    double constant = 0.0;  // max over eps of ratio / eps
};

struct Environment {
    int dimension = 1;
    int cell_points = 0;
    int half_window = 0;
    double horizon = 0.0;
    double nu = 0.0;
    double tolerance = 0.0;
    int sources = 0;
    std::string profile;
    double max_residual = 0.0;
};

struct ConvergenceReport {
    evolution::Kind kind = evolution::Kind::wave;
    std::vector<ReportRow> rows;  // metric-major, eps in config order
    std::vector<MetricSummary> summaries;
    Environment environment;

    const MetricSummary& summary(const std::string& metric) const;
    std::vector<ReportRow> rows_for(const std::string& metric) const;
};

/// Values at or below this fraction of the source norm are reported as exact zeros.
inline constexpr double roundoff_floor = 1e-13;

/// Every metric for one eps and one source set; lhs per metric and rhs per norm.
struct Measurement {
    std::map<std::string, double> lhs;
    std::map<RhsNorm, double> rhs;
    double max_residual = 0.0;
};

Measurement measure(const StudyConfig& cfg, double eps, const evolution::SourceSpec& f_source,
                    const evolution::SourceSpec& g_source);

ConvergenceReport run_study(const StudyConfig& cfg);

} // namespace homoglab::study

#include "homoglab/report_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>

#include <json.hpp>

namespace homoglab::report {

namespace {

// Shortest round-trip representation, independent of stream state and locale.
std::string number(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string slope_text(const rates::SlopeFit& fit) {
    return fit.exact_zero ? std::string("exact") : number(fit.slope);
}

nlohmann::json json_number(double x) {
    if (std::isfinite(x)) return x;
    return nullptr;
}

} // namespace

Format parse_format(const std::string& name) {
    if (name == "csv") return Format::csv;
    if (name == "json") return Format::json;
    throw ConfigError("report format must be 'csv' or 'json'");
}

void write_csv(const study::ConvergenceReport& report, std::ostream& out) {
    out << "equation,metric,eps,lhs,rhs_norm,ratio,slope\n";
    const std::string equation = evolution::to_string(report.kind);
    for (const auto& row : report.rows) {
        out << equation << ',' << row.metric << ',' << number(row.eps) << ',' << number(row.lhs) << ','
            << number(row.rhs_norm) << ',' << number(row.ratio) << ','
            << slope_text(report.summary(row.metric).fit) << '\n';
    }
}

void write_json(const study::ConvergenceReport& report, std::ostream& out) {
    using nlohmann::ordered_json;
    ordered_json root;
    root["equation"] = evolution::to_string(report.kind);
    const auto& env = report.environment;
    root["environment"] = {{"dimension", env.dimension},   {"cell_points", env.cell_points},
                           {"half_window", env.half_window}, {"horizon", env.horizon},
                           {"nu", env.nu},                   {"tolerance", env.tolerance},
                           {"sources", env.sources},         {"profile", env.profile},
                           {"max_residual", env.max_residual}};
    ordered_json rows = ordered_json::array();
    for (const auto& r : report.rows)
        rows.push_back({{"metric", r.metric}, {"eps", r.eps}, {"lhs", r.lhs}, {"rhs_norm", r.rhs_norm}, {"ratio", r.ratio}});
    root["rows"] = rows;
    ordered_json metrics = ordered_json::array();
    for (const auto& s : report.summaries) {
        ordered_json m = {{"metric", s.metric}, {"exact_zero", s.fit.exact_zero}};
        m["slope"] = s.fit.exact_zero ? ordered_json(nullptr) : ordered_json(json_number(s.fit.slope));
        m["constant"] = json_number(s.constant);
        metrics.push_back(m);
    }
    root["metrics"] = metrics;
    out << root.dump(2) << '\n';
}

void emit(const study::ConvergenceReport& report, const std::string& path, Format format) {
    std::ofstream file(path, std::ios::binary);
    if (!file) throw Error("cannot open '" + path + "' for writing");
    if (format == Format::csv) write_csv(report, file);
    else write_json(report, file);
    file.flush();
    if (!file) throw Error("failed writing '" + path + "'");
}

} // namespace homoglab::report

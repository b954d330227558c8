#include "homoglab/study.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "homoglab/coefficient_io.hpp"
#include "homoglab/transforms_norms.hpp"

namespace homoglab::study {

using evolution::Kind;
using torus::CoefficientCell;
using torus::SpectralField;

const char* to_string(RhsNorm rhs) {
    switch (rhs) {
    case RhsNorm::dtt_f: return "||dt^2 f||";
    case RhsNorm::dt_f: return "||dt f||";
    case RhsNorm::f: return "||f||";
    case RhsNorm::dt_minus_half_f: return "||dt^-1/2 f||";
    case RhsNorm::dtt_f_plus_dt_g: return "||dt^2 f|| + ||dt g||";
    }
    return "?";
}

const std::vector<MetricInfo>& metric_registry() {
    static const std::vector<MetricInfo> registry = {
        {Kind::wave, "dt_u", RhsNorm::dtt_f, "||dt u_eps - dt u_0||"},
        {Kind::wave, "flux_corrector", RhsNorm::dtt_f, "||a(x/eps) grad(u_eps - u_0 - eps N_0(x/eps) . grad u_0)||"},
        {Kind::wave, "flux_hminus1", RhsNorm::dtt_f, "||a(x/eps) grad u_eps - a_0 grad u_0||_{H^-1}"},
        {Kind::wave, "u", RhsNorm::dt_f, "||u_eps - u_0||"},
        {Kind::wave, "first_order_h1", RhsNorm::dtt_f, "||u_eps - u_0 - eps N_0(x/eps) . grad u_0||_{H^1}"},
        {Kind::wave, "evolutionary", RhsNorm::dtt_f, "(||dt u_eps - dt u_0||^2 + ||flux difference||_{H^-1}^2)^{1/2}"},
        {Kind::heat, "dt_half_u", RhsNorm::f, "||dt^{1/2} u_eps - dt^{1/2} u_0||"},
        {Kind::heat, "flux_corrector", RhsNorm::f, "||b(x/eps) grad(u_eps - u_0 - eps N_0(x/eps) . grad u_0)||"},
        {Kind::heat, "flux_hminus1", RhsNorm::f, "||b(x/eps) grad u_eps - b_0 grad u_0||_{H^-1}"},
        {Kind::heat, "u", RhsNorm::dt_minus_half_f, "||u_eps - u_0||"},
        {Kind::heat, "first_order_h1", RhsNorm::f, "||u_eps - u_0 - eps N_0(x/eps) . grad u_0||_{H^1}"},
        {Kind::heat, "evolutionary", RhsNorm::f, "(||u_eps - u_0||^2 + ||flux difference||_{H^-1}^2)^{1/2}"},
        {Kind::thermoelastic, "dt_u", RhsNorm::dtt_f_plus_dt_g, "||dt u_eps - dt u_0||"},
        {Kind::thermoelastic, "dt_half_v", RhsNorm::dtt_f_plus_dt_g, "||dt^{1/2} v_eps - dt^{1/2} v_0||"},
        {Kind::thermoelastic, "flux_corrector_u", RhsNorm::dtt_f_plus_dt_g, "||a(x/eps) grad(u_eps - u_0 - eps N_0^a . grad u_0)||"},
        {Kind::thermoelastic, "flux_corrector_v", RhsNorm::dtt_f_plus_dt_g, "||b(x/eps) grad(v_eps - v_0 - eps N_0^b . grad v_0)||"},
        {Kind::thermoelastic, "flux_hminus1_u", RhsNorm::dtt_f_plus_dt_g, "||a(x/eps) grad u_eps - a_0 grad u_0||_{H^-1}"},
        {Kind::thermoelastic, "flux_hminus1_v", RhsNorm::dtt_f_plus_dt_g, "||b(x/eps) grad v_eps - b_0 grad v_0||_{H^-1}"},
        {Kind::thermoelastic, "sum", RhsNorm::dtt_f_plus_dt_g, "sum of the six thermoelastic metrics"},
    };
    return registry;
}

std::vector<std::string> metric_names(Kind kind) {
    std::vector<std::string> out;
    for (const auto& m : metric_registry())
        if (m.kind == kind) out.push_back(m.name);
    return out;
}

namespace {

const MetricInfo& lookup(Kind kind, const std::string& name) {
    for (const auto& m : metric_registry())
        if (m.kind == kind && m.name == name) return m;
    throw ConfigError(std::string("unknown metric '") + name + "' for " + evolution::to_string(kind));
}

SpaceTimeField refine(const SpaceTimeField& u, const BoxGrid& fine) {
    SpaceTimeField out(fine, u.time(), u.components());
    for (int s = 0; s < u.time().size(); ++s) out.slice(s) = torus::resample(u.slice(s), fine.grid());
    return out;
}

/// c_0 grad u_0 on the grid of u_0.
SpaceTimeField constant_flux(const Eigen::MatrixXcd& c0, const SpaceTimeField& u0) {
    const int d = u0.box().dimension();
    SpaceTimeField out(u0.box(), u0.time(), d);
    for (int s = 0; s < u0.time().size(); ++s) {
        const SpectralField grad = torus::gradient(u0.slice(s));
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) {
                const auto src = grad.component(j);
                auto dst = out.slice(s).component(i);
                for (std::size_t p = 0; p < dst.size(); ++p) dst[p] += c0(i, j) * src[p];
            }
    }
    return out;
}

struct FieldErrors {
    double dt = 0.0, dt_half = 0.0, plain = 0.0, flux_corrector = 0.0, flux_hminus1 = 0.0, first_order_h1 = 0.0;
};

FieldErrors errors(const SpaceTimeField& ueps, const SpaceTimeField& u0, const CoefficientCell& c,
                   const cell::Corrector& cor, const Eigen::MatrixXcd& c0) {
    const SpaceTimeField diff = ueps - u0;
    const evolution::CorrectorField cf = evolution::corrector_field(u0, cor, c);
    const BoxGrid fine = cf.first_order.box();
    const SpaceTimeField first_diff = refine(ueps, fine) - cf.first_order;
    FieldErrors e;
    e.dt = norms::norm_L2nu(norms::dt_multiplier(1.0, diff));
    e.dt_half = norms::norm_L2nu(norms::dt_multiplier(0.5, diff));
    e.plain = norms::norm_L2nu(diff);
    e.flux_corrector = norms::norm_L2nu(evolution::flux(c, first_diff, 1));
    e.flux_hminus1 = norms::norm_L2nu_Hminus1(evolution::flux(c, ueps) - constant_flux(c0, refine(u0, fine)));
    e.first_order_h1 = norms::norm_L2nu_H1(first_diff);
    return e;
}

evolution::EquationSpec make_spec(const StudyConfig& cfg, double eps, const evolution::SourceSpec& fs,
                                  const evolution::SourceSpec& gs) {
    const int M = cells_for_eps(eps);
    const int d = (cfg.a ? cfg.a : cfg.b)->dimension();
    const BoxGrid box(d, M, cfg.cell_points);
    const TimeGrid time(cfg.nu, cfg.horizon, cfg.half_window);
    evolution::EquationSpec spec{cfg.kind, std::nullopt, std::nullopt, std::nullopt,
                                 evolution::make_source(box, time, fs), std::nullopt};
    if (cfg.kind != Kind::heat) spec.a = cfg.a->resampled(box.cell_grid());
    if (cfg.kind != Kind::wave) spec.b = cfg.b->resampled(box.cell_grid());
    if (cfg.kind == Kind::thermoelastic) {
        spec.gamma = cfg.gamma;
        spec.g = evolution::make_source(box, time, gs);
    }
    spec.tolerance = cfg.tolerance;
    return spec;
}

double parse_eps_node(const nlohmann::json& node) {
    if (node.is_number()) return node.get<double>();
    if (node.is_string()) return parse_eps(node.get<std::string>());
    throw ConfigError("eps entries must be numbers or strings '1/M'");
}

CoefficientCell parse_coefficient_entry(const nlohmann::json& node, const std::string& base_dir,
                                        torus::CoefficientKind default_kind, int cell_points) {
    using nlohmann::json;
    auto resolve = [&](const std::string& path) {
        const std::filesystem::path p(path);
        return p.is_absolute() ? p.string() : (std::filesystem::path(base_dir) / p).string();
    };
    torus::CoefficientKind kind = default_kind;
    if (node.is_string()) return torus::load_coefficient(resolve(node.get<std::string>()), kind, cell_points);
    if (node.is_array()) return torus::parse_coefficient(node.dump(), kind, cell_points);
    if (!node.is_object()) throw ConfigError("coefficient entries must be a path, a term list or an object");
    if (node.contains("kind")) {
        const std::string k = node.at("kind").get<std::string>();
        if (k == "scalar") kind = torus::CoefficientKind::scalar;
        else if (k == "matrix") kind = torus::CoefficientKind::matrix;
        else throw ConfigError("coefficient kind must be 'scalar' or 'matrix'");
    }
    if (node.contains("file")) return torus::load_coefficient(resolve(node.at("file").get<std::string>()), kind, cell_points);
    if (node.contains("terms")) return torus::parse_coefficient(node.at("terms").dump(), kind, cell_points);
    throw ConfigError("coefficient object needs 'file' or 'terms'");
}

evolution::SourceSpec parse_source(const nlohmann::json& node) {
    evolution::SourceSpec s;
    if (node.contains("profile")) s.profile = evolution::parse_profile(node.at("profile").get<std::string>());
    if (node.contains("band")) s.spatial_band = node.at("band").get<int>();
    if (node.contains("width")) s.width = node.at("width").get<double>();
    if (node.contains("amplitude")) s.amplitude = node.at("amplitude").get<double>();
    return s;
}

} // namespace

void StudyConfig::validate() const {
    if (kind != Kind::heat && !a) throw ConfigError("study needs coefficient a");
    if (kind != Kind::wave && !b) throw ConfigError("study needs coefficient b");
    if (kind == Kind::thermoelastic && !gamma) throw ConfigError("thermoelastic study needs gamma");
    if (eps.size() < 3) throw ConfigError("study needs at least three eps values");
    std::vector<int> cells;
    for (double e : eps) {
        try {
            cells.push_back(cells_for_eps(e));
        } catch (const DomainError& err) {
            throw ConfigError(err.what());
        }
    }
    std::sort(cells.begin(), cells.end());
    if (std::adjacent_find(cells.begin(), cells.end()) != cells.end()) throw ConfigError("eps values must be distinct");
    if (!(nu > 0.0)) throw ConfigError("nu must be positive");
    if (cell_points < 8 || cell_points % 2 != 0) throw ConfigError("cell_points must be even and >= 8");
    if (half_window < 1) throw ConfigError("half_window must be positive");
    if (random_sources < 0) throw ConfigError("random_sources must be nonnegative");
    for (const auto& m : metrics) lookup(kind, m);
    for (const auto* c : {a ? &*a : nullptr, b ? &*b : nullptr, gamma ? &*gamma : nullptr})
        if (c && 2 * c->max_frequency() >= cell_points)
            throw ConfigError("cell_points under-resolves a coefficient");
}

std::vector<std::string> StudyConfig::selected_metrics() const {
    return metrics.empty() ? metric_names(kind) : metrics;
}

double parse_eps(const std::string& s) {
    const auto slash = s.find('/');
    try {
        std::size_t used = 0;
        if (slash == std::string::npos) {
            const double v = std::stod(s, &used);
            if (used == s.size()) return v;
        } else {
            const double num = std::stod(s.substr(0, slash));
            const std::string den = s.substr(slash + 1);
            const double d = std::stod(den, &used);
            if (used == den.size() && d != 0.0) return num / d;
        }
    } catch (const std::exception&) {
    }
    throw ConfigError("eps entries must be numbers or strings '1/M', got '" + s + "'");
}

StudyConfig parse_study_config(const std::string& json_text, const std::string& base_dir) {
    using nlohmann::json;
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("study config: ") + e.what());
    }
    try {
        StudyConfig cfg;
        cfg.kind = evolution::parse_kind(root.at("equation").get<std::string>());
        cfg.cell_points = root.value("cell_points", cfg.cell_points);
        cfg.nu = root.value("nu", cfg.nu);
        cfg.half_window = root.value("half_window", cfg.half_window);
        cfg.horizon = root.value("horizon", cfg.horizon);
        cfg.random_sources = root.value("random_sources", cfg.random_sources);
        cfg.tolerance = root.value("tolerance", cfg.tolerance);
        const json& coeffs = root.at("coefficients");
        if (coeffs.contains("a"))
            cfg.a = parse_coefficient_entry(coeffs.at("a"), base_dir, torus::CoefficientKind::scalar, 0);
        if (coeffs.contains("b"))
            cfg.b = parse_coefficient_entry(coeffs.at("b"), base_dir, torus::CoefficientKind::scalar, 0);
        if (coeffs.contains("gamma"))
            cfg.gamma = parse_coefficient_entry(coeffs.at("gamma"), base_dir, torus::CoefficientKind::scalar, 0);
        for (const auto& e : root.at("eps")) cfg.eps.push_back(parse_eps_node(e));
        if (root.contains("source")) cfg.source = parse_source(root.at("source"));
        if (root.contains("g_source")) cfg.g_source = parse_source(root.at("g_source"));
        if (root.contains("metrics"))
            for (const auto& m : root.at("metrics")) cfg.metrics.push_back(m.get<std::string>());
        cfg.validate();
        return cfg;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("study config: ") + e.what());
    } catch (const DomainError& e) {
        throw ConfigError(std::string("study config: ") + e.what());
    }
}

const MetricSummary& ConvergenceReport::summary(const std::string& metric) const {
    for (const auto& s : summaries)
        if (s.metric == metric) return s;
    throw DomainError("report has no metric '" + metric + "'");
}

std::vector<ReportRow> ConvergenceReport::rows_for(const std::string& metric) const {
    std::vector<ReportRow> out;
    for (const auto& r : rows)
        if (r.metric == metric) out.push_back(r);
    return out;
}

Measurement measure(const StudyConfig& cfg, double eps, const evolution::SourceSpec& fs,
                    const evolution::SourceSpec& gs) {
    const evolution::EquationSpec spec = make_spec(cfg, eps, fs, gs);
    const evolution::Solution sol = evolution::solve_heterogeneous(spec);
    const evolution::CellData cd = evolution::cell_data(spec);
    const evolution::HomogenisedSolution hom = evolution::solve_homogenised(spec, cd.effective);

    Measurement m;
    m.max_residual = sol.max_residual;
    const double f2 = norms::norm_L2nu(norms::dt_multiplier(2.0, spec.f));
    m.rhs[RhsNorm::dtt_f] = f2;
    m.rhs[RhsNorm::dt_f] = norms::norm_L2nu(norms::dt_multiplier(1.0, spec.f));
    m.rhs[RhsNorm::f] = norms::norm_L2nu(spec.f);
    m.rhs[RhsNorm::dt_minus_half_f] = norms::norm_L2nu(norms::dt_multiplier(-0.5, spec.f));
    m.rhs[RhsNorm::dtt_f_plus_dt_g] = f2 + (spec.g ? norms::norm_L2nu(norms::dt_multiplier(1.0, *spec.g)) : 0.0);

    switch (cfg.kind) {
    case Kind::wave: {
        const FieldErrors e = errors(sol.u, hom.u, *spec.a, *cd.a_corrector, cd.effective.a0);
        m.lhs = {{"dt_u", e.dt},
                 {"flux_corrector", e.flux_corrector},
                 {"flux_hminus1", e.flux_hminus1},
                 {"u", e.plain},
                 {"first_order_h1", e.first_order_h1},
                 {"evolutionary", std::hypot(e.dt, e.flux_hminus1)}};
        break;
    }
    case Kind::heat: {
        const FieldErrors e = errors(sol.u, hom.u, *spec.b, *cd.b_corrector, cd.effective.b0);
        m.lhs = {{"dt_half_u", e.dt_half},
                 {"flux_corrector", e.flux_corrector},
                 {"flux_hminus1", e.flux_hminus1},
                 {"u", e.plain},
                 {"first_order_h1", e.first_order_h1},
                 {"evolutionary", std::hypot(e.plain, e.flux_hminus1)}};
        break;
    }
    case Kind::thermoelastic: {
        const FieldErrors eu = errors(sol.u, hom.u, *spec.a, *cd.a_corrector, cd.effective.a0);
        const FieldErrors ev = errors(*sol.v, *hom.v, *spec.b, *cd.b_corrector, cd.effective.b0);
        m.lhs = {{"dt_u", eu.dt},
                 {"dt_half_v", ev.dt_half},
                 {"flux_corrector_u", eu.flux_corrector},
                 {"flux_corrector_v", ev.flux_corrector},
                 {"flux_hminus1_u", eu.flux_hminus1},
                 {"flux_hminus1_v", ev.flux_hminus1}};
        double sum = 0.0;
        for (const auto& [name, value] : m.lhs) sum += value;
        m.lhs["sum"] = sum;
        break;
    }
    }
    return m;
}

ConvergenceReport run_study(const StudyConfig& cfg) {
    cfg.validate();
    const std::vector<std::string> selected = cfg.selected_metrics();
    const int sources = 1 + cfg.random_sources;

    ConvergenceReport report;
    report.kind = cfg.kind;
    report.environment = {(cfg.a ? cfg.a : cfg.b)->dimension(), cfg.cell_points, cfg.half_window,
                          TimeGrid(cfg.nu, cfg.horizon, cfg.half_window).horizon(), cfg.nu, cfg.tolerance,
                          sources, evolution::to_string(cfg.source.profile), 0.0};

    // best[metric][eps index]
    std::map<std::string, std::vector<ReportRow>> best;
    for (const auto& name : selected) best[name].resize(cfg.eps.size());
    for (std::size_t ie = 0; ie < cfg.eps.size(); ++ie) {
        for (int k = 0; k < sources; ++k) {
            evolution::SourceSpec fs = cfg.source, gs = cfg.g_source;
            fs.seed = std::uint64_t(k);
            gs.seed = k == 0 ? 0 : std::uint64_t(1000 + k);
            Measurement m;
            try {
                m = measure(cfg, cfg.eps[ie], fs, gs);
            } catch (const Error& e) {
                throw Error("study failed at eps = " + std::to_string(cfg.eps[ie]) + ": " + e.what());
            }
            report.environment.max_residual = std::max(report.environment.max_residual, m.max_residual);
            for (const auto& name : selected) {
                const double rhs = m.rhs.at(lookup(cfg.kind, name).rhs);
                double lhs = m.lhs.at(name);
                if (lhs <= roundoff_floor * rhs) lhs = 0.0;
                const double ratio = rhs > 0.0 ? lhs / rhs : 0.0;
                ReportRow& slot = best[name][ie];
                if (k == 0 || ratio > slot.ratio) slot = {cfg.eps[ie], name, lhs, rhs, ratio};
            }
        }
    }
    for (const auto& name : selected) {
        std::vector<std::pair<double, double>> points;
        MetricSummary s{name, {}, 0.0};
        for (const auto& row : best[name]) {
            report.rows.push_back(row);
            points.emplace_back(row.eps, row.ratio);
            s.constant = std::max(s.constant, row.ratio / row.eps);
        }
        s.fit = rates::fit_slope(points);
        report.summaries.push_back(s);
    }
    return report;
}

} // namespace homoglab::study

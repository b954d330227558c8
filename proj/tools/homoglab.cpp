// homoglab: command line front end for the homogenisation library.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "homoglab/cell_problems.hpp"
#include "homoglab/check.hpp"
#include "homoglab/coefficient_io.hpp"
#include "homoglab/errors.hpp"
#include "homoglab/fibre_lab.hpp"
#include "homoglab/parallel.hpp"
#include "homoglab/report_io.hpp"
#include "homoglab/study.hpp"

using namespace homoglab;
using nlohmann::ordered_json;
using json = nlohmann::json;

namespace {

constexpr int exit_pass = 0;
constexpr int exit_failure = 1;
constexpr int exit_config = 2;

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read '" + path + "'");
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

// Keys of the --config file replace the matching flag values.
json merge_config(json flags, const std::string& config_path) {
    if (config_path.empty()) return flags;
    json file;
    try {
        file = json::parse(read_file(config_path));
    } catch (const json::exception& e) {
        throw ConfigError(config_path + ": " + e.what());
    }
    if (!file.is_object()) throw ConfigError(config_path + ": expected a JSON object");
    flags.update(file);
    return flags;
}

template <class T>
T get(const json& opts, const char* key) {
    try {
        return opts.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(std::string("option '") + key + "': " + e.what());
    }
}

double eps_of(const json& node) {
    if (node.is_number()) return node.get<double>();
    if (node.is_string()) return study::parse_eps(node.get<std::string>());
    throw ConfigError("eps must be a number or '1/M'");
}

std::string base_dir_of(const std::string& config_path) {
    if (config_path.empty()) return ".";
    const auto parent = std::filesystem::path(config_path).parent_path();
    return parent.empty() ? "." : parent.string();
}

std::string resolve(const std::string& path, const std::string& base) {
    const std::filesystem::path p(path);
    return p.is_absolute() || base == "." ? path : (std::filesystem::path(base) / p).string();
}

torus::CoefficientKind coefficient_kind(const std::string& s) {
    if (s == "scalar") return torus::CoefficientKind::scalar;
    if (s == "matrix") return torus::CoefficientKind::matrix;
    throw ConfigError("coefficient kind must be 'scalar' or 'matrix', got '" + s + "'");
}

ordered_json complex_matrix(const Eigen::MatrixXcd& m) {
    ordered_json re = ordered_json::array(), im = ordered_json::array();
    for (int r = 0; r < m.rows(); ++r) {
        ordered_json rr = ordered_json::array(), ir = ordered_json::array();
        for (int c = 0; c < m.cols(); ++c) {
            rr.push_back(m(r, c).real());
            ir.push_back(m(r, c).imag());
        }
        re.push_back(rr);
        im.push_back(ir);
    }
    return {{"re", re}, {"im", im}};
}

ordered_json fit_json(const rates::SlopeFit& f) {
    if (f.exact_zero) return "exact";
    return f.slope;
}

int run_cell(const json& opts, const std::string& base) {
    const int n = get<int>(opts, "n");
    const auto kind = coefficient_kind(get<std::string>(opts, "kind"));
    const auto a = torus::load_coefficient(resolve(get<std::string>(opts, "coeff"), base), kind, n);
    const int d = a.dimension();
    const torus::CellGrid grid(d, n);
    const auto theta_list = get<std::vector<double>>(opts, "theta");
    if (theta_list.size() > 2) throw ConfigError("theta has at most two components");
    Wavevector theta{};
    for (std::size_t i = 0; i < theta_list.size(); ++i) theta[i] = theta_list[i];

    cell::SolverOptions so;
    so.tolerance = get<double>(opts, "tolerance");
    const cell::Corrector cor = cell::solve_corrector(a, theta, grid, so);
    const cell::HomogenisedTensor t = cell::homogenised_tensor(a, cor);

    ordered_json out;
    out["dimension"] = d;
    out["cell_points"] = n;
    out["theta"] = {theta[0], theta[1]};
    out["tensor"] = complex_matrix(t.value);
    out["residual"] = cor.residual;
    out["iterations"] = cor.iterations;
    if (const int levels = get<int>(opts, "levels"); levels > 0) {
        std::vector<Wavevector> thetas;
        for (int k = 1; k <= levels; ++k) thetas.push_back({std::ldexp(1.0, -k), 0.0});
        const cell::DeviationTable table = cell::tensor_theta_deviation(a, thetas, grid, so);
        out["tensor_slope"] = fit_json(table.tensor_fit);
        out["corrector_slope"] = fit_json(table.corrector_fit);
        out["tensor_constant"] = table.tensor_constant;
        out["corrector_constant"] = table.corrector_constant;
    }
    std::cout << out.dump(2) << '\n';
    return exit_pass;
}

int run_fibre(const json& opts, const std::string& base) {
    const int n = get<int>(opts, "n");
    const auto a = torus::load_coefficient(resolve(get<std::string>(opts, "coeff"), base),
                                           torus::CoefficientKind::scalar, n);
    const torus::CellGrid grid(a.dimension(), n);
    fibre::SweepConfig c;
    const std::string eq = get<std::string>(opts, "eq");
    if (eq == "wave") c.equation = fibre::Equation::wave;
    else if (eq == "heat") c.equation = fibre::Equation::heat;
    else throw ConfigError("fibre equation must be 'wave' or 'heat', got '" + eq + "'");
    for (const auto& e : opts.at("eps")) c.eps.push_back(eps_of(e));
    if (c.eps.empty()) throw ConfigError("fibre needs at least one eps");
    c.nu = get<double>(opts, "nu");
    const int k_max = get<int>(opts, "k_max");
    const int k_step = get<int>(opts, "k_step");
    if (k_step <= 0) throw ConfigError("k_step must be positive");
    for (int k = -k_max; k <= k_max; k += k_step) c.k_values.push_back(k);
    c.thetas = fibre::dyadic_theta_grid(a.dimension(), get<int>(opts, "levels"));

    torus::SpectralField F(grid, 1, torus::Domain::frequency);
    F.component(0)[grid.index_of_mode({0, 0})] = 1.0;
    F.component(0)[grid.index_of_mode({1, 0})] = 0.5;
    const fibre::SweepResult r = fibre::fibre_error_sweep(a, c, F);
    const auto inv = fibre::uniform_invertibility(c.thetas, grid);
    double floor = inv.front().min_singular_value;
    for (const auto& e : inv) floor = std::min(floor, e.min_singular_value);

    const double limit = get<double>(opts, "max_variation");
    ordered_json out;
    out["equation"] = eq;
    out["eps"] = c.eps;
    out["sup_ratio"] = r.sup_ratio;
    out["variation"] = r.variation;
    out["thetas"] = c.thetas.size();
    out["k_values"] = c.k_values.size();
    out["min_singular_value"] = floor;
    out["passed"] = r.variation < limit;
    std::cout << out.dump(2) << '\n';
    return r.variation < limit ? exit_pass : exit_failure;
}

evolution::SourceSpec source_of(const json& opts, const char* key) {
    evolution::SourceSpec s;
    s.profile = evolution::parse_profile(get<std::string>(opts, key));
    s.spatial_band = get<int>(opts, "band");
    s.width = get<double>(opts, "width");
    return s;
}

int run_evolve(const json& opts, const std::string& base) {
    study::StudyConfig cfg;
    cfg.kind = evolution::parse_kind(get<std::string>(opts, "eq"));
    cfg.cell_points = get<int>(opts, "n");
    cfg.half_window = get<int>(opts, "half_window");
    cfg.nu = get<double>(opts, "nu");
    cfg.tolerance = get<double>(opts, "tolerance");
    auto load = [&](const char* key) -> std::optional<torus::CoefficientCell> {
        const std::string path = get<std::string>(opts, key);
        if (path.empty()) return std::nullopt;
        return torus::load_coefficient(resolve(path, base), torus::CoefficientKind::scalar, 0);
    };
    cfg.a = load("coeff");
    cfg.b = load("b");
    cfg.gamma = load("gamma");
    const double eps = eps_of(opts.at("eps"));
    const evolution::SourceSpec f = source_of(opts, "source");
    const evolution::SourceSpec g = f;

    const study::Measurement m = study::measure(cfg, eps, f, g);
    ordered_json out;
    out["equation"] = evolution::to_string(cfg.kind);
    out["eps"] = eps;
    out["max_residual"] = m.max_residual;
    ordered_json lhs;
    for (const auto& name : study::metric_names(cfg.kind)) lhs[name] = m.lhs.at(name);
    out["metrics"] = lhs;
    ordered_json rhs;
    rhs["dtt_f"] = m.rhs.at(study::RhsNorm::dtt_f);
    rhs["dt_f"] = m.rhs.at(study::RhsNorm::dt_f);
    rhs["f"] = m.rhs.at(study::RhsNorm::f);
    rhs["dt_minus_half_f"] = m.rhs.at(study::RhsNorm::dt_minus_half_f);
    rhs["dtt_f_plus_dt_g"] = m.rhs.at(study::RhsNorm::dtt_f_plus_dt_g);
    out["rhs_norms"] = rhs;
    std::cout << out.dump(2) << '\n';
    return exit_pass;
}

int run_study_command(const std::string& config_path, const json& flags) {
    if (config_path.empty()) throw ConfigError("study needs --config");
    json doc;
    try {
        doc = json::parse(read_file(config_path));
    } catch (const json::exception& e) {
        throw ConfigError(config_path + ": " + e.what());
    }
    json opts = flags;
    for (const char* key : {"output", "format", "min_slope"})
        if (doc.contains(key)) opts[key] = doc[key];
    const study::StudyConfig cfg = study::parse_study_config(doc.dump(), base_dir_of(config_path));
    const auto format = report::parse_format(get<std::string>(opts, "format"));
    const double min_slope = get<double>(opts, "min_slope");

    const study::ConvergenceReport r = study::run_study(cfg);
    const std::string output = get<std::string>(opts, "output");
    if (output.empty()) {
        if (format == report::Format::csv) report::write_csv(r, std::cout);
        else report::write_json(r, std::cout);
    } else {
        report::emit(r, output, format);
    }
    bool ok = true;
    for (const auto& s : r.summaries) {
        const bool pass = s.fit.exact_zero || s.fit.slope >= min_slope;
        ok = ok && pass;
        std::cerr << (pass ? "PASS " : "FAIL ") << s.metric << " slope "
                  << (s.fit.exact_zero ? std::string("exact") : std::to_string(s.fit.slope))
                  << " C " << s.constant << '\n';
    }
    return ok ? exit_pass : exit_failure;
}

int run_check(const json& opts, const std::string& base) {
    check::Options o;
    o.seed = get<unsigned long long>(opts, "seed");
    const std::string coeff = get<std::string>(opts, "coeff");
    if (!coeff.empty())
        o.coefficient = torus::load_coefficient(resolve(coeff, base), torus::CoefficientKind::scalar, 0);
    const auto entries = check::run(check::parse_suite(get<std::string>(opts, "suite")), o);
    return check::print(entries, std::cout) ? exit_pass : exit_failure;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Periodic homogenisation lab: cell problems, fibres, evolution studies"};
    app.require_subcommand(1);
    int threads = 0;
    app.add_option("--threads", threads, "Worker cap (HOMOGLAB_THREADS is the default)");

    std::string config;
    auto with_config = [&](CLI::App* sub) {
        sub->add_option("--config", config, "JSON file whose keys override the flags");
    };

    // cell
    auto* cell = app.add_subcommand("cell", "Corrector and homogenised tensor");
    with_config(cell);
    std::string cell_coeff, cell_kind = "scalar";
    int cell_n = 64, cell_levels = 0;
    double cell_tol = 1e-12;
    std::vector<double> cell_theta{0.0};
    cell->add_option("--coeff", cell_coeff, "Coefficient JSON file");
    cell->add_option("--kind", cell_kind, "scalar or matrix")->capture_default_str();
    cell->add_option("--n", cell_n, "Cell grid points per axis")->capture_default_str();
    cell->add_option("--theta", cell_theta, "Quasimomentum components")->delimiter(',');
    cell->add_option("--levels", cell_levels, "Also fit theta-Lipschitz slopes over theta = 2^-k, k=1..levels");
    cell->add_option("--tolerance", cell_tol)->capture_default_str();

    // fibre
    auto* fib = app.add_subcommand("fibre", "Fibre error sweep over theta, lambda and eps");
    with_config(fib);
    std::string fib_eq = "wave", fib_coeff;
    std::vector<std::string> fib_eps{"1/8", "1/16", "1/32"};
    int fib_n = 32, fib_levels = 6, fib_kmax = 8, fib_kstep = 1;
    double fib_nu = 1.0, fib_var = 2.0;
    fib->add_option("--eq", fib_eq, "wave or heat")->capture_default_str();
    fib->add_option("--coeff", fib_coeff, "Coefficient JSON file");
    fib->add_option("--eps", fib_eps, "eps values, e.g. 1/8,1/16")->delimiter(',');
    fib->add_option("--n", fib_n)->capture_default_str();
    fib->add_option("--levels", fib_levels, "Dyadic theta levels")->capture_default_str();
    fib->add_option("--k-max", fib_kmax, "Largest |Im lambda|")->capture_default_str();
    fib->add_option("--k-step", fib_kstep)->capture_default_str();
    fib->add_option("--nu", fib_nu)->capture_default_str();
    fib->add_option("--max-variation", fib_var, "Failure threshold on sup ratio variation across eps")
        ->capture_default_str();

    // evolve
    auto* evo = app.add_subcommand("evolve", "Heterogeneous vs homogenised solve at one eps");
    with_config(evo);
    std::string evo_eq = "wave", evo_a, evo_b, evo_gamma, evo_eps = "1/8", evo_source = "smooth";
    int evo_n = 32, evo_window = 64, evo_band = 1;
    double evo_nu = 1.0, evo_width = 4.0, evo_tol = 1e-12;
    evo->add_option("--eq", evo_eq, "wave, heat or thermoelastic")->capture_default_str();
    evo->add_option("--coeff", evo_a, "Coefficient a (wave, thermoelastic)");
    evo->add_option("--b", evo_b, "Coefficient b (heat, thermoelastic)");
    evo->add_option("--gamma", evo_gamma, "Coupling coefficient (thermoelastic)");
    evo->add_option("--eps", evo_eps, "1/M")->capture_default_str();
    evo->add_option("--source", evo_source, "smooth or rough")->capture_default_str();
    evo->add_option("--band", evo_band, "Spatial band of the source")->capture_default_str();
    evo->add_option("--width", evo_width, "Temporal width of the smooth source")->capture_default_str();
    evo->add_option("--n", evo_n)->capture_default_str();
    evo->add_option("--half-window", evo_window, "Laplace slots per side")->capture_default_str();
    evo->add_option("--nu", evo_nu)->capture_default_str();
    evo->add_option("--tolerance", evo_tol)->capture_default_str();

    // study
    auto* stu = app.add_subcommand("study", "Convergence study over an eps ladder");
    with_config(stu);
    std::string stu_output, stu_format = "csv";
    double stu_min_slope = 0.9;
    stu->add_option("--output", stu_output, "Report path (stdout when omitted)");
    stu->add_option("--format", stu_format, "csv or json")->capture_default_str();
    stu->add_option("--min-slope", stu_min_slope, "Failure threshold on fitted slopes")->capture_default_str();

    // check
    auto* chk = app.add_subcommand("check", "Invariant suites");
    with_config(chk);
    std::string chk_suite = "all", chk_coeff;
    unsigned long long chk_seed = 20240601;
    chk->add_option("suite", chk_suite, "cell, fibre, evolution, norms or all")->capture_default_str();
    chk->add_option("--coeff", chk_coeff, "Replacement coefficient for the cell suite");
    chk->add_option("--seed", chk_seed)->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? exit_pass : exit_config;
    }

    try {
        if (threads > 0) parallel::set_thread_limit(threads);
        const std::string base = base_dir_of(config);
        if (*cell)
            return run_cell(merge_config({{"coeff", cell_coeff}, {"kind", cell_kind}, {"n", cell_n},
                                          {"theta", cell_theta}, {"levels", cell_levels},
                                          {"tolerance", cell_tol}},
                                         config),
                            base);
        if (*fib)
            return run_fibre(merge_config({{"eq", fib_eq}, {"coeff", fib_coeff}, {"eps", fib_eps},
                                           {"n", fib_n}, {"levels", fib_levels}, {"k_max", fib_kmax},
                                           {"k_step", fib_kstep}, {"nu", fib_nu},
                                           {"max_variation", fib_var}},
                                          config),
                             base);
        if (*evo)
            return run_evolve(merge_config({{"eq", evo_eq}, {"coeff", evo_a}, {"b", evo_b},
                                            {"gamma", evo_gamma}, {"eps", evo_eps},
                                            {"source", evo_source}, {"band", evo_band},
                                            {"width", evo_width}, {"n", evo_n},
                                            {"half_window", evo_window}, {"nu", evo_nu},
                                            {"tolerance", evo_tol}},
                                           config),
                              base);
        if (*stu)
            return run_study_command(config, {{"output", stu_output}, {"format", stu_format},
                                              {"min_slope", stu_min_slope}});
        if (*chk)
            return run_check(merge_config({{"suite", chk_suite}, {"coeff", chk_coeff}, {"seed", chk_seed}},
                                          config),
                             base);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return exit_config;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_failure;
    }
    return exit_failure;
}

// cylfi: command-line front end for the cylindrical-distribution engine.
//
// Subcommands
//   green   Green functions F_0..F_k of a Gaussian, written as JSON
//   moment  evaluate a projected Gaussian against a polynomial
//   check   randomized compatibility / functoriality / oracle suites
//   limit   oscillatory (eps -> 0) limit study with diagnostics
//   genfun  truncated generating functional vs its closed form
//   oracle  direct quadrature of a moment integral, no Wick anywhere
//
// Exit codes: 0 success, 1 check failure, 2 usage or input validation,
// 3 numerical or convergence failure. Errors print one JSON object on
// stderr. Commands that take --seed write no timestamps to stdout, so
// their stdout is bit-reproducible; files written via --out carry a
// manifest with timestamps.

#include <chrono>
#include <complex>
#include <cstdlib>
#include <ctime>
#include <functional>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "cylfi/cylfi.hpp"

namespace {

using namespace cylfi;

constexpr int kExitCheckFailure = 1;
constexpr int kExitUsage = 2;
constexpr int kExitNumerical = 3;

std::string utc_now() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::string join_args(int argc, char** argv) {
    std::string s;
    for (int i = 0; i < argc; ++i) {
        if (i) s += ' ';
        s += argv[i];
    }
    return s;
}

json error_json(const std::string& kind, const std::string& message) {
    return json{{"error", kind}, {"message", message}};
}

// Central error -> exit code mapping; every command body runs under this.
int run_guarded(const std::function<int()>& body) {
    try {
        return body();
    } catch (const parse_error& e) {
        json j = error_json("parse", e.what());
        j["position"] = e.position;
        std::cerr << j.dump() << "\n";
        return kExitUsage;
    } catch (const convergence_error& e) {
        json j = error_json("convergence", e.what());
        j["diagnostics"] = e.diagnostics;
        std::cerr << j.dump() << "\n";
        return kExitNumerical;
    } catch (const numerical_error& e) {
        std::cerr << error_json("numerical", e.what()).dump() << "\n";
        return kExitNumerical;
    } catch (const truncation_error& e) {
        std::cerr << error_json("truncation", e.what()).dump() << "\n";
        return kExitUsage;
    } catch (const resource_error& e) {
        std::cerr << error_json("resource", e.what()).dump() << "\n";
        return kExitUsage;
    } catch (const insufficient_data_error& e) {
        std::cerr << error_json("insufficient_data", e.what()).dump() << "\n";
        return kExitUsage;
    } catch (const shape_error& e) {
        std::cerr << error_json("shape", e.what()).dump() << "\n";
        return kExitUsage;
    } catch (const domain_error& e) {
        std::cerr << error_json("domain", e.what()).dump() << "\n";
        return kExitUsage;
    } catch (const error& e) {
        std::cerr << error_json("error", e.what()).dump() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << error_json("internal", e.what()).dump() << "\n";
        return kExitNumerical;
    }
}

int env_max_degree() {
    const char* v = std::getenv("CYLFI_MAX_DEGREE");
    if (!v) return kDefaultMaxDegree;
    char* end = nullptr;
    const long d = std::strtol(v, &end, 10);
    if (!end || *end != '\0' || d < 0 || d > kWickOrderCap)
        throw domain_error("CYLFI_MAX_DEGREE must be an integer in 0.." +
                           std::to_string(kWickOrderCap) + ", got \"" + std::string(v) + "\"");
    return static_cast<int>(d);
}

std::string fmt_complex(cxd z) {
    std::ostringstream os;
    os << std::setprecision(17) << "[" << z.real() << ", " << z.imag() << "]";
    return os.str();
}

std::string fmt_double(double x) {
    std::ostringstream os;
    os << std::scientific << std::setprecision(6) << x;
    return os.str();
}

// Shared kernel/form selection for green and limit.
struct SourceFlags {
    std::string kernel;  // "", "kg-euclidean", "kg-minkowski"
    std::string form_path;
    int sites = 2;
    double mass = 1.0;
    double spacing = 1.0;
};

void add_source_flags(CLI::App* cmd, SourceFlags& src, const std::string& kernel_choices) {
    cmd->add_option("--kernel", src.kernel, "built-in kernel (" + kernel_choices + ")");
    cmd->add_option("--form", src.form_path, "bilinear form JSON file");
    cmd->add_option("--sites", src.sites, "lattice sites (kernel mode)");
    cmd->add_option("--mass", src.mass, "lattice mass (kernel mode)");
    cmd->add_option("--spacing", src.spacing, "lattice spacing (kernel mode)");
}

BilinearForm load_form(const std::string& path) { return form_from_json(load_json_file(path)); }

RunManifest make_manifest(const std::string& command, std::vector<std::string> inputs,
                          std::optional<std::uint64_t> seed, const std::string& started) {
    RunManifest m;
    m.command = command;
    m.inputs = std::move(inputs);
    m.seed = seed;
    m.started_utc = started;
    m.finished_utc = utc_now();
    return m;
}

// ---------------------------------------------------------------- green --

int cmd_green(const SourceFlags& src, int order, int degree, const std::string& out_path,
              const std::string& command_line) {
    const std::string started = utc_now();
    CylDistribution dist = [&]() {
        if (!src.kernel.empty() && !src.form_path.empty())
            throw domain_error("green: --kernel and --form are mutually exclusive");
        if (src.kernel == "kg-euclidean")
            return klein_gordon_euclidean(LatticeSpec{src.sites, src.spacing, src.mass}, degree);
        if (!src.kernel.empty())
            throw domain_error("green: unknown kernel \"" + src.kernel + "\"");
        if (src.form_path.empty()) throw domain_error("green: need --kernel or --form");
        return CylDistribution::gaussian(load_form(src.form_path), degree);
    }();
    if (order < 0 || order > degree)
        throw truncation_error("green: order must lie in 0..degree");

    json orders = json::array();
    for (int k = 0; k <= order; ++k) orders.push_back(tensor_to_json(green_function(dist, k)));

    json out{{"nvars", dist.space().dim},
             {"max_order", order},
             {"green_functions", std::move(orders)}};
    std::vector<std::string> inputs;
    if (!src.form_path.empty()) inputs.push_back(src.form_path);
    out["manifest"] = manifest_to_json(make_manifest(command_line, inputs, std::nullopt, started));

    if (out_path.empty()) {
        std::cout << out.dump(2) << "\n";
    } else {
        save_json_file(out_path, out);
        std::cout << "wrote " << out_path << "\n";
    }
    return 0;
}

// --------------------------------------------------------------- moment --

int cmd_moment(const std::string& form_path, const std::string& proj_path, const std::string& poly_text,
               int degree) {
    const BilinearForm b = load_form(form_path);
    const Projection pi = proj_path.empty() ? canonical_projection(b.space())
                                            : projection_from_json(load_json_file(proj_path));

    Polynomial p(0);
    try {
        p = parse_polynomial(poly_text, pi.arity());
    } catch (const parse_error& e) {
        // caret diagnostic is for humans; the JSON error object still goes
        // to stderr via the guard, so re-throw with the annotated text
        throw parse_error(caret_message(poly_text, e), e.position);
    }

    const GaussianSpec spec(b, degree);
    const MomentFunctional mu = gaussian_project(spec, pi);
    std::cout << fmt_complex(evaluate(mu, p)) << "\n";
    return 0;
}

// ---------------------------------------------------------------- check --

int cmd_check(int trials, std::uint64_t seed, const CheckCaps& caps, bool sabotage) {
    std::ostringstream out;
    if (trials == 0) {
        out << "check: 0 trials requested, vacuous pass\n";
        std::cout << out.str();
        return 0;
    }

    const SuiteReport compat = run_compatibility_suite(trials, seed, caps, sabotage);
    const SuiteReport functor = run_functoriality_suite(trials, seed, caps);
    const SuiteReport oracle = run_wick_oracle_suite(seed);

    bool all_pass = true;
    json failing = json::array();
    for (const SuiteReport* rep : {&compat, &functor, &oracle}) {
        out << rep->name << ": trials=" << rep->trials << " max_residual=" << fmt_double(rep->max_residual)
            << " tolerance=" << fmt_double(rep->tolerance) << " "
            << (rep->pass ? "PASS" : "FAIL") << "\n";
        if (!rep->pass) {
            all_pass = false;
            failing.push_back(rep->worst_instance);
        }
    }
    out << "overall: " << (all_pass ? "PASS" : "FAIL") << "\n";
    std::cout << out.str();
    if (!all_pass) {
        std::cerr << json{{"error", "check_failure"}, {"failing_instances", failing}}.dump() << "\n";
        return kExitCheckFailure;
    }
    return 0;
}

// ---------------------------------------------------------------- limit --

int cmd_limit(const SourceFlags& src, std::vector<double> eps, int extrapolation_order, int degree,
              double tol, const std::string& proj_path, const std::string& out_path,
              const std::string& command_line) {
    const std::string started = utc_now();
    if (eps.empty()) eps = default_eps_schedule();

    CylDistribution dist = [&]() {
        if (!src.kernel.empty() && !src.form_path.empty())
            throw domain_error("limit: --kernel and --form are mutually exclusive");
        if (src.kernel == "kg-minkowski") {
            LatticeSpec lat{src.sites, src.spacing, src.mass};
            const ModelSpace space = lattice_space(lat);
            BilinearForm b(space, lattice_covariance(lat).cast<cxd>());
            ImaginaryGaussianSpec spec(std::move(b), eps, extrapolation_order, Eigen::MatrixXd(), degree);
            spec.convergence_tol = tol;
            return CylDistribution::limit(std::move(spec));
        }
        if (!src.kernel.empty())
            throw domain_error("limit: unknown kernel \"" + src.kernel + "\"");
        if (src.form_path.empty()) throw domain_error("limit: need --kernel or --form");
        ImaginaryGaussianSpec spec(load_form(src.form_path), eps, extrapolation_order,
                                   Eigen::MatrixXd(), degree);
        spec.convergence_tol = tol;
        return CylDistribution::limit(std::move(spec));
    }();

    const Projection pi = proj_path.empty() ? canonical_projection(dist.space())
                                            : projection_from_json(load_json_file(proj_path));
    const ImaginaryProjection result = dist.project_with_diagnostics(pi);

    json per_eps = json::array();
    for (const auto& mu : result.family) per_eps.push_back(moments_to_json(mu));
    json diag{{"tolerance", result.diagnostics.tol},
              {"converged", result.diagnostics.converged},
              {"final_deltas", result.diagnostics.final_deltas},
              {"deltas", result.diagnostics.deltas}};
    json out{{"eps", result.eps},
             {"per_eps_moments", std::move(per_eps)},
             {"extrapolated", moments_to_json(result.moments)},
             {"diagnostics", std::move(diag)}};
    std::vector<std::string> inputs;
    if (!src.form_path.empty()) inputs.push_back(src.form_path);
    if (!proj_path.empty()) inputs.push_back(proj_path);
    out["manifest"] = manifest_to_json(make_manifest(command_line, inputs, std::nullopt, started));

    if (out_path.empty()) {
        std::cout << out.dump(2) << "\n";
    } else {
        save_json_file(out_path, out);
        std::cout << "wrote " << out_path << "\n";
    }
    return 0;
}

// --------------------------------------------------------------- genfun --

int cmd_genfun(const std::string& form_path, const std::string& phi_text, int degree) {
    const BilinearForm b = load_form(form_path);

    std::vector<double> entries;
    std::stringstream ss(phi_text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            entries.push_back(std::stod(item));
        } catch (const std::exception&) {
            throw domain_error("genfun: --phi expects comma-separated reals, got \"" + item + "\"");
        }
    }
    if (static_cast<int>(entries.size()) != b.dim())
        throw shape_error("genfun: phi has " + std::to_string(entries.size()) + " entries, form is " +
                          std::to_string(b.dim()) + "-dimensional");
    Eigen::VectorXcd phi(b.dim());
    for (int i = 0; i < b.dim(); ++i) phi(i) = entries[static_cast<std::size_t>(i)];

    const GaussianSpec spec(b, degree);
    const TestFunction tf(spec.form.space(), phi);
    const GeneratingFunctional z = generating_functional(spec, tf, degree);

    // closed form for the exact Gaussian: exp((i/2) B(phi, phi))
    const cxd bphi = (phi.transpose() * b.matrix() * phi)(0);
    const cxd closed = std::exp(cxd(0.0, 0.5) * bphi);

    std::ostringstream out;
    out << "degree  term\n";
    for (std::size_t k = 0; k < z.terms.size(); ++k)
        out << std::setw(6) << k << "  " << fmt_complex(z.terms[k]) << "\n";
    out << "truncated   " << fmt_complex(z.value) << "\n";
    out << "closed-form " << fmt_complex(closed) << "\n";
    out << "deviation   " << fmt_double(std::abs(z.value - closed)) << "\n";
    std::cout << out.str();
    return 0;
}

// --------------------------------------------------------------- oracle --

int cmd_oracle(const std::string& form_path, const std::string& poly_text, int points, double sigmas) {
    const BilinearForm b = load_form(form_path);
    Polynomial p(0);
    try {
        p = parse_polynomial(poly_text, b.dim());
    } catch (const parse_error& e) {
        throw parse_error(caret_message(poly_text, e), e.position);
    }
    QuadratureConfig cfg;
    cfg.points_per_axis = points;
    cfg.box_halfwidth_sigmas = sigmas;
    std::cout << fmt_complex(integrate_moment(b.matrix(), p, cfg)) << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"cylindrical distribution engine"};
    app.require_subcommand(1);
    const std::string command_line = join_args(argc, argv);

    int default_degree = kDefaultMaxDegree;
    const int guard = run_guarded([&]() {
        default_degree = env_max_degree();
        return 0;
    });
    if (guard != 0) return guard;

    // green
    auto* green = app.add_subcommand("green", "Green functions of a Gaussian");
    SourceFlags green_src;
    add_source_flags(green, green_src, "kg-euclidean");
    int green_order = 2;
    int green_degree = default_degree;
    std::string green_out;
    green->add_option("--order", green_order, "highest Green function order");
    green->add_option("--degree", green_degree, "truncation degree");
    green->add_option("--out", green_out, "output JSON path (stdout if omitted)");

    // moment
    auto* moment = app.add_subcommand("moment", "evaluate a projected Gaussian on a polynomial");
    std::string moment_form, moment_proj, moment_poly;
    int moment_degree = default_degree;
    moment->add_option("--form", moment_form, "bilinear form JSON file")->required();
    moment->add_option("--proj", moment_proj, "projection JSON file (identity if omitted)");
    moment->add_option("--poly", moment_poly, "polynomial, e.g. \"3*s1^2*s2 - (0,1)*s3\"")->required();
    moment->add_option("--degree", moment_degree, "truncation degree");

    // check
    auto* check = app.add_subcommand("check", "randomized self-check suites");
    int check_trials = 100;
    std::uint64_t check_seed = 42;
    CheckCaps caps;
    bool sabotage = false;
    check->add_option("--trials", check_trials, "trials per algebraic suite")->check(CLI::NonNegativeNumber);
    check->add_option("--seed", check_seed, "master seed");
    check->add_option("--max-dim", caps.max_space_dim, "cap on model space dimension");
    check->add_option("--max-rows", caps.max_arity, "cap on projection arity and map rows");
    check->add_option("--max-degree", caps.max_degree, "cap on truncation degree");
    check->add_flag("--sabotage", sabotage, "flip one moment sign; the run must fail");

    // limit
    auto* limit = app.add_subcommand("limit", "oscillatory eps -> 0 limit study");
    SourceFlags limit_src;
    add_source_flags(limit, limit_src, "kg-minkowski");
    std::vector<double> limit_eps;
    int limit_order = 1;
    int limit_degree = default_degree;
    double limit_tol = -1.0;
    std::string limit_proj, limit_out;
    limit->add_option("--eps", limit_eps, "eps schedule, strictly decreasing")->delimiter(',');
    limit->add_option("--extrapolation-order", limit_order, "Richardson order");
    limit->add_option("--degree", limit_degree, "truncation degree");
    limit->add_option("--tol", limit_tol, "Cauchy tolerance; negative means diagnostics only");
    limit->add_option("--proj", limit_proj, "projection JSON file (identity if omitted)");
    limit->add_option("--out", limit_out, "output JSON path (stdout if omitted)");

    // genfun
    auto* genfun = app.add_subcommand("genfun", "truncated generating functional");
    std::string genfun_form, genfun_phi;
    int genfun_degree = default_degree;
    genfun->add_option("--form", genfun_form, "bilinear form JSON file")->required();
    genfun->add_option("--phi", genfun_phi, "test function, comma-separated reals")->required();
    genfun->add_option("--degree", genfun_degree, "truncation degree");

    // oracle
    auto* oracle = app.add_subcommand("oracle", "direct quadrature of a moment integral");
    std::string oracle_form, oracle_poly;
    int oracle_points = 2001;
    double oracle_sigmas = 12.0;
    oracle->add_option("--form", oracle_form, "bilinear form JSON file (dimension <= 3)")->required();
    oracle->add_option("--poly", oracle_poly, "polynomial to integrate")->required();
    oracle->add_option("--points", oracle_points, "grid points per axis (odd)");
    oracle->add_option("--sigmas", oracle_sigmas, "box halfwidth in decay lengths");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e); // --help
        std::cerr << error_json("usage", e.what()).dump() << "\n";
        return kExitUsage;
    }

    return run_guarded([&]() -> int {
        if (green->parsed())
            return cmd_green(green_src, green_order, green_degree, green_out, command_line);
        if (moment->parsed()) return cmd_moment(moment_form, moment_proj, moment_poly, moment_degree);
        if (check->parsed()) return cmd_check(check_trials, check_seed, caps, sabotage);
        if (limit->parsed())
            return cmd_limit(limit_src, limit_eps, limit_order, limit_degree, limit_tol, limit_proj,
                             limit_out, command_line);
        if (genfun->parsed()) return cmd_genfun(genfun_form, genfun_phi, genfun_degree);
        if (oracle->parsed()) return cmd_oracle(oracle_form, oracle_poly, oracle_points, oracle_sigmas);
        throw error("no subcommand dispatched");
    });
}

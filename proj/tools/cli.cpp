// Command-line surface over the C API: index distributions, characteristic
// functions, fiber densities, kernels, simulations, analytic-vs-MC
// comparisons. Emits CSV/JSON with an embedded run manifest; writes are
// atomic (temp then rename). Exit codes: 0 ok, 1 numeric/domain failure,
// 2 usage error.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "loopwind.h"

using nlohmann::json;

namespace {

struct Args {
    std::string geometry = "cp1";
    int n = 1;
    double mu = 0.0;
    double r0 = 0.6, r = 0.9, theta = 0.0, t = 1.0;
    int k = 10;
    double lambda = 1.0;
    std::string lambda_grid, theta_grid, r_grid;
    double tol_rel = 1e-10, tol_abs = 1e-14;
    std::string out, format = "csv";
    std::string family = "compact";
    double alpha = 0.0, beta = 0.0;
    unsigned long long seed = 1;
    long paths = 100000;
    double dt = 1e-3;
    int threads = 0;
};

int default_threads() {
    const char* env = std::getenv("LOOPWIND_THREADS");
    return env ? std::atoi(env) : 0;
}

[[noreturn]] void die_numeric(lw_status st) {
    std::cerr << "error: " << lw_last_error() << " (status " << int(st)
              << ")\n";
    std::exit(1);
}

void check(lw_status st) {
    if (st != LW_OK) die_numeric(st);
}

lw_tolerance make_tol(const Args& a) {
    lw_tolerance tol = lw_default_tolerance();
    tol.rel = a.tol_rel;
    tol.abs = a.tol_abs;
    return tol;
}

lw_sim_config make_sim(const Args& a) {
    lw_sim_config cfg = lw_default_sim_config();
    cfg.dt = a.dt;
    cfg.n_paths = a.paths;
    cfg.seed = a.seed;
    cfg.threads = a.threads;
    return cfg;
}

struct GeometryHandle {
    lw_geometry* g = nullptr;
    GeometryHandle(const Args& a) {
        check(lw_geometry_create(a.geometry.c_str(), a.n, a.mu, &g));
    }
    ~GeometryHandle() { lw_geometry_destroy(g); }
    GeometryHandle(const GeometryHandle&) = delete;
    GeometryHandle& operator=(const GeometryHandle&) = delete;
};

std::vector<double> parse_grid(const std::string& spec, double single) {
    if (spec.empty()) return {single};
    double a = 0.0, b = 0.0, step = 0.0;
    if (std::sscanf(spec.c_str(), "%lf:%lf:%lf", &a, &b, &step) != 3 ||
        step <= 0.0 || b < a) {
        std::cerr << "error: grid must be a:b:step with step > 0, b >= a\n";
        std::exit(2);
    }
    std::vector<double> xs;
    for (double x = a; x <= b + 1e-12 * step; x += step) xs.push_back(x);
    return xs;
}

json run_manifest(const std::string& command, const Args& a,
                  double wall_clock_s) {
    return json{{"command", command},
                {"library_version", lw_version()},
                {"geometry", a.geometry},
                {"params",
                 {{"n", a.n},
                  {"mu", a.mu},
                  {"r0", a.r0},
                  {"r", a.r},
                  {"theta", a.theta},
                  {"t", a.t},
                  {"k", a.k},
                  {"lambda", a.lambda},
                  {"lambda_grid", a.lambda_grid},
                  {"theta_grid", a.theta_grid},
                  {"r_grid", a.r_grid},
                  {"family", a.family},
                  {"alpha", a.alpha},
                  {"beta", a.beta}}},
                {"tolerance", {{"rel", a.tol_rel}, {"abs", a.tol_abs}}},
                {"seed", a.seed},
                {"paths", a.paths},
                {"dt", a.dt},
                {"threads", a.threads},
                {"out", a.out},
                {"format", a.format},
                {"wall_clock_s", wall_clock_s}};
}

void write_atomic(const std::string& path, const std::string& content) {
    if (path.empty()) {
        std::cout << content;
        return;
    }
    const std::string tmp = path + ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) {
            std::cerr << "error: cannot open " << tmp << " for writing\n";
            std::exit(1);
        }
        f << content;
        if (!f.flush()) {
            std::cerr << "error: short write to " << tmp << "\n";
            std::exit(1);
        }
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::cerr << "error: rename to " << path << " failed: "
                  << ec.message() << "\n";
        std::exit(1);
    }
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// x/value/error triples in CSV or JSON, manifest embedded either way.
void emit_grid(const Args& a, const json& manifest, const std::string& xname,
               const std::vector<double>& xs, const std::vector<double>& vs,
               const std::vector<double>& errs) {
    std::ostringstream os;
    if (a.format == "json") {
        json out{{"manifest", manifest},
                 {xname, xs},
                 {"value", vs},
                 {"abs_error_estimate", errs}};
        os << out.dump(2) << "\n";
    } else {
        os << "# " << manifest.dump() << "\n";
        os << "x,value,abs_error_estimate\n";
        for (std::size_t i = 0; i < xs.size(); ++i)
            os << fmt(xs[i]) << ',' << fmt(vs[i]) << ',' << fmt(errs[i])
               << "\n";
    }
    write_atomic(a.out, os.str());
}

void emit_dist(const Args& a, const json& manifest,
               const std::vector<double>& probs, double norm_defect,
               double tail_constant, const std::vector<double>* ci_lo,
               const std::vector<double>* ci_hi) {
    std::vector<int> ks;
    for (int k = -a.k; k <= a.k; ++k) ks.push_back(k);
    std::ostringstream os;
    if (a.format == "json") {
        json out{{"manifest", manifest},
                 {"geometry", a.geometry},
                 {"params",
                  {{"n", a.n},
                   {"mu", a.mu},
                   {"r0", a.r0},
                   {"r", a.r},
                   {"theta", a.theta},
                   {"t", a.t}}},
                 {"k", ks},
                 {"probs", probs},
                 {"norm_defect", norm_defect},
                 {"tail_constant", std::isnan(tail_constant)
                                       ? json(nullptr)
                                       : json(tail_constant)}};
        if (ci_lo) out["ci_lo"] = *ci_lo;
        if (ci_hi) out["ci_hi"] = *ci_hi;
        os << out.dump(2) << "\n";
    } else {
        os << "# " << manifest.dump() << "\n";
        os << "k,prob,ci_lo,ci_hi\n";
        for (std::size_t i = 0; i < ks.size(); ++i) {
            os << ks[i] << ',' << fmt(probs[i]) << ',';
            if (ci_lo) os << fmt((*ci_lo)[i]);
            os << ',';
            if (ci_hi) os << fmt((*ci_hi)[i]);
            os << "\n";
        }
    }
    write_atomic(a.out, os.str());
}

double elapsed_s(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                         t0)
        .count();
}

int cmd_dist(const Args& a) {
    const auto t0 = std::chrono::steady_clock::now();
    const lw_tolerance tol = make_tol(a);
    std::vector<double> probs(std::size_t(2 * a.k + 1));
    double defect = 0.0, tailc = 0.0;
    if (a.geometry == "sl2" && a.r0 == 0.0 && a.r == 0.0 && a.theta == 0.0) {
        check(lw_sl2_loop_index(a.t, a.mu, -a.k, a.k, &tol, probs.data(),
                                &defect, &tailc));
    } else {
        GeometryHandle g(a);
        check(lw_index_distribution(g.g, a.r0, a.r, a.theta, a.t, -a.k, a.k,
                                    &tol, probs.data(), &defect, &tailc));
    }
    emit_dist(a, run_manifest("dist", a, elapsed_s(t0)), probs, defect, tailc,
              nullptr, nullptr);
    return 0;
}

int cmd_cf(const Args& a) {
    const auto t0 = std::chrono::steady_clock::now();
    const lw_tolerance tol = make_tol(a);
    GeometryHandle g(a);
    const std::vector<double> xs = parse_grid(a.lambda_grid, a.lambda);
    std::vector<double> vs, errs;
    for (double lam : xs) {
        double v = 0.0;
        check(lw_conditional_cf(g.g, lam, a.r0, a.r, a.t, &tol, &v));
        vs.push_back(v);
        errs.push_back(a.tol_rel * std::fabs(v));
    }
    if (a.out.empty() && a.lambda_grid.empty()) {
        std::cout << fmt(vs[0]) << "\n";
        return 0;
    }
    emit_grid(a, run_manifest("cf", a, elapsed_s(t0)), "lambda", xs, vs,
              errs);
    return 0;
}

int cmd_density(const Args& a) {
    const auto t0 = std::chrono::steady_clock::now();
    const lw_tolerance tol = make_tol(a);
    GeometryHandle g(a);
    const std::vector<double> xs = parse_grid(a.theta_grid, a.theta);
    std::vector<double> vs, errs;
    for (double th : xs) {
        double v = 0.0, err = 0.0;
        check(lw_fiber_density(g.g, a.r0, a.r, a.t, th, &tol, &v, &err));
        vs.push_back(v);
        errs.push_back(err);
    }
    if (a.out.empty() && a.theta_grid.empty()) {
        std::cout << fmt(vs[0]) << "\n";
        return 0;
    }
    emit_grid(a, run_manifest("density", a, elapsed_s(t0)), "theta", xs, vs,
              errs);
    return 0;
}

int cmd_kernel(const Args& a) {
    const auto t0 = std::chrono::steady_clock::now();
    const lw_tolerance tol = make_tol(a);
    const std::vector<double> xs = parse_grid(a.r_grid, a.r);
    std::vector<double> vs, errs;
    for (double r : xs) {
        double v = 0.0;
        if (a.family == "compact")
            check(lw_compact_kernel(a.alpha, a.beta, a.t, a.r0, r, &tol, &v));
        else if (a.family == "hyperbolic")
            check(lw_hyperbolic_kernel(a.alpha, a.beta, a.t, a.r0, r, &tol,
                                       &v));
        else {
            std::cerr << "error: --family must be compact or hyperbolic\n";
            return 2;
        }
        vs.push_back(v);
        errs.push_back(a.tol_rel * std::fabs(v));
    }
    if (a.out.empty() && a.r_grid.empty()) {
        std::cout << fmt(vs[0]) << "\n";
        return 0;
    }
    emit_grid(a, run_manifest("kernel", a, elapsed_s(t0)), "r", xs, vs, errs);
    return 0;
}

int cmd_simulate(const Args& a) {
    const auto t0 = std::chrono::steady_clock::now();
    const lw_sim_config cfg = make_sim(a);
    GeometryHandle g(a);
    const std::size_t nk = std::size_t(2 * a.k + 1);
    std::vector<double> probs(nk), lo(nk), hi(nk);
    long accepted = 0;
    check(lw_estimate_index_distribution(g.g, a.r0, a.r, a.theta, a.t, &cfg,
                                         -a.k, a.k, probs.data(), lo.data(),
                                         hi.data(), nullptr, nullptr,
                                         &accepted));
    json manifest = run_manifest("simulate", a, elapsed_s(t0));
    manifest["accepted"] = accepted;
    emit_dist(a, manifest, probs, 0.0,
              std::numeric_limits<double>::quiet_NaN(), &lo, &hi);
    return 0;
}

int cmd_compare(const Args& a) {
    const auto t0 = std::chrono::steady_clock::now();
    const lw_tolerance tol = make_tol(a);
    const lw_sim_config cfg = make_sim(a);
    GeometryHandle g(a);
    struct Row {
        std::string quantity;
        double analytic, empirical, se, z;
    };
    std::vector<Row> rows;

    const bool loop_case =
        (a.geometry == "sl2" || a.geometry == "plane" ||
         (a.r == a.r0 && a.theta == 0.0));
    if (a.geometry != "sl2") {
        // conditional CF at one lambda via the ratio estimator
        double ana = 0.0;
        check(lw_conditional_cf(g.g, a.lambda, a.r0, a.r, a.t, &tol, &ana));
        double re = 0.0, im = 0.0, se = 0.0;
        long acc = 0;
        check(lw_estimate_conditional_cf(g.g, a.lambda, a.r0, a.r, a.t, &cfg,
                                         &re, &im, &se, &acc));
        rows.push_back({"cf_lambda_" + fmt(a.lambda), ana, re, se,
                        se > 0.0 ? (re - ana) / se : 0.0});
    }
    if (loop_case) {
        const int kw = std::min(a.k, 2);
        const std::size_t nk = std::size_t(2 * kw + 1);
        std::vector<double> emp(nk), se(nk);
        long accepted = 0;
        check(lw_estimate_index_distribution(g.g, a.r0, a.r, a.theta, a.t,
                                             &cfg, -kw, kw, emp.data(),
                                             nullptr, nullptr, se.data(),
                                             nullptr, &accepted));
        std::vector<double> ana(nk);
        double defect = 0.0, tailc = 0.0;
        if (a.geometry == "sl2") {
            check(lw_sl2_loop_index(a.t, a.mu, -kw, kw, &tol, ana.data(),
                                    &defect, &tailc));
        } else if (a.geometry == "plane") {
            for (int k = -kw; k <= kw; ++k)
                check(lw_planar_index(a.r0 * a.r0 / a.t, k, &tol,
                                      &ana[std::size_t(k + kw)]));
        } else {
            check(lw_index_distribution(g.g, a.r0, a.r, a.theta, a.t, -kw,
                                        kw, &tol, ana.data(), &defect,
                                        &tailc));
        }
        for (int k = -kw; k <= kw; ++k) {
            const std::size_t i = std::size_t(k + kw);
            rows.push_back({"index_" + std::to_string(k), ana[i], emp[i],
                            se[i], se[i] > 0.0 ? (emp[i] - ana[i]) / se[i]
                                               : 0.0});
        }
    }

    json manifest = run_manifest("compare", a, elapsed_s(t0));
    std::ostringstream os;
    if (a.format == "json") {
        json jrows = json::array();
        for (const Row& r : rows)
            jrows.push_back({{"quantity", r.quantity},
                             {"analytic", r.analytic},
                             {"empirical", r.empirical},
                             {"stderr", r.se},
                             {"z", r.z}});
        os << json{{"manifest", manifest}, {"rows", jrows}}.dump(2) << "\n";
    } else {
        os << "# " << manifest.dump() << "\n";
        os << "quantity,analytic,empirical,stderr,z\n";
        for (const Row& r : rows)
            os << r.quantity << ',' << fmt(r.analytic) << ','
               << fmt(r.empirical) << ',' << fmt(r.se) << ',' << fmt(r.z)
               << "\n";
    }
    write_atomic(a.out, os.str());
    return 0;
}

int cmd_limits(const Args& a) {
    const auto t0 = std::chrono::steady_clock::now();
    GeometryHandle g(a);
    const std::vector<double> xs = parse_grid(a.lambda_grid, a.lambda);
    std::vector<double> vs, errs;
    for (double lam : xs) {
        double v = 0.0;
        check(lw_limit_cf(g.g, lam, &v));
        vs.push_back(v);
        errs.push_back(0.0);
    }
    if (a.out.empty() && a.lambda_grid.empty()) {
        std::cout << fmt(vs[0]) << "\n";
        return 0;
    }
    emit_grid(a, run_manifest("limits", a, elapsed_s(t0)), "lambda", xs, vs,
              errs);
    return 0;
}

void add_common(CLI::App* sub, Args& a, bool sim_flags) {
    sub->add_option("--geometry", a.geometry, "plane|cp1|sphere|ch1|ads|sl2")
        ->check(CLI::IsMember({"plane", "cp1", "sphere", "ch1", "ads",
                               "sl2"}));
    sub->add_option("--n", a.n, "complex dimension of the base");
    sub->add_option("--mu", a.mu, "Berger deformation parameter");
    sub->add_option("--r0", a.r0, "radial start");
    sub->add_option("--r", a.r, "radial end");
    sub->add_option("--theta", a.theta,
                    "fiber angle in [0, 2pi); reduced with a warning");
    sub->add_option("--t", a.t, "bridge length");
    sub->add_option("--tol-rel", a.tol_rel, "relative tolerance");
    sub->add_option("--tol-abs", a.tol_abs, "absolute tolerance floor");
    sub->add_option("--out", a.out, "output path (stdout when omitted)");
    sub->add_option("--format", a.format, "csv|json")
        ->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("--threads", a.threads,
                    "worker threads (0 = hardware concurrency)");
    if (sim_flags) {
        sub->add_option("--seed", a.seed, "master RNG seed");
        sub->add_option("--paths", a.paths, "number of simulated paths");
        sub->add_option("--dt", a.dt, "Euler step size");
    }
}

}  // namespace

int main(int argc, char** argv) {
    Args a;
    a.threads = default_threads();
    CLI::App app{"winding-index laws of Brownian loops on fibered spaces"};
    app.require_subcommand(1);

    CLI::App* dist = app.add_subcommand("dist", "analytic index distribution");
    add_common(dist, a, false);
    dist->add_option("--k", a.k, "symmetric window half-width");

    CLI::App* cf = app.add_subcommand("cf", "conditional characteristic fn");
    add_common(cf, a, false);
    cf->add_option("--lambda", a.lambda, "frequency");
    cf->add_option("--lambda-grid", a.lambda_grid, "a:b:step");

    CLI::App* density = app.add_subcommand("density", "fiber angle density");
    add_common(density, a, false);
    density->add_option("--theta-grid", a.theta_grid, "a:b:step");

    CLI::App* kernel = app.add_subcommand("kernel", "Jacobi heat kernel");
    add_common(kernel, a, false);
    kernel->add_option("--family", a.family, "compact|hyperbolic");
    kernel->add_option("--alpha", a.alpha, "Jacobi alpha");
    kernel->add_option("--beta", a.beta, "Jacobi beta");
    kernel->add_option("--r-grid", a.r_grid, "a:b:step");

    CLI::App* sim = app.add_subcommand("simulate",
                                       "empirical index distribution");
    add_common(sim, a, true);
    sim->add_option("--k", a.k, "symmetric window half-width");

    CLI::App* cmp = app.add_subcommand("compare", "analytic vs Monte Carlo");
    add_common(cmp, a, true);
    cmp->add_option("--k", a.k, "index window half-width for loop rows");
    cmp->add_option("--lambda", a.lambda, "CF comparison frequency");

    CLI::App* limits = app.add_subcommand("limits", "long-time limit CF");
    add_common(limits, a, false);
    limits->add_option("--lambda", a.lambda, "frequency");
    limits->add_option("--lambda-grid", a.lambda_grid, "a:b:step");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    if (a.theta < 0.0 || a.theta >= 2.0 * M_PI) {
        const double reduced =
            a.theta - 2.0 * M_PI * std::floor(a.theta / (2.0 * M_PI));
        std::cerr << "warning: theta reduced to " << reduced << "\n";
        a.theta = reduced;
    }

    if (dist->parsed()) return cmd_dist(a);
    if (cf->parsed()) return cmd_cf(a);
    if (density->parsed()) return cmd_density(a);
    if (kernel->parsed()) return cmd_kernel(a);
    if (sim->parsed()) return cmd_simulate(a);
    if (cmp->parsed()) return cmd_compare(a);
    if (limits->parsed()) return cmd_limits(a);
    return 2;
}

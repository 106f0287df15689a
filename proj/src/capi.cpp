#include "loopwind.h"

#include <cmath>
#include <cstring>
#include <string>

#include "loopwind/kernels.hpp"
#include "loopwind/laws.hpp"
#include "loopwind/mc.hpp"
#include "loopwind/numeric.hpp"

namespace {

thread_local std::string g_last_error;

void set_error(const char* msg) { g_last_error = msg ? msg : ""; }

template <class Fn>
lw_status guarded(const Fn& fn) {
    try {
        fn();
        return LW_OK;
    } catch (const loopwind::domain_error& e) {
        set_error(e.what());
        return LW_ERR_DOMAIN;
    } catch (const loopwind::numeric_error& e) {
        set_error(e.what());
        return LW_ERR_NUMERIC;
    } catch (const std::exception& e) {
        set_error(e.what());
        return LW_ERR_INTERNAL;
    } catch (...) {
        set_error("unknown failure");
        return LW_ERR_INTERNAL;
    }
}

loopwind::Tolerance to_tol(const lw_tolerance* tol) {
    loopwind::Tolerance out;
    if (tol) {
        out.rel = tol->rel;
        out.abs = tol->abs;
        out.max_evals = tol->max_evals;
    }
    return out;
}

loopwind::SimConfig to_sim(const lw_sim_config* cfg) {
    loopwind::SimConfig out;
    if (cfg) {
        out.dt = cfg->dt;
        out.n_paths = cfg->n_paths;
        out.seed = cfg->seed;
        out.bin_halfwidth = cfg->bin_halfwidth;
        out.angular_halfwidth = cfg->angular_halfwidth;
        out.threads = cfg->threads;
    }
    return out;
}

lw_status invalid(const char* msg) {
    set_error(msg);
    return LW_ERR_INVALID;
}

void store_dist(const loopwind::IndexDistribution& d, double* probs,
                double* norm_defect, double* tail_constant) {
    if (probs)
        for (std::size_t i = 0; i < d.probs.size(); ++i) probs[i] = d.probs[i];
    if (norm_defect) *norm_defect = d.norm_defect;
    if (tail_constant) *tail_constant = d.tail_constant;
}

}  // namespace

struct lw_geometry {
    loopwind::Geometry geom;
};

extern "C" {

const char* lw_last_error(void) { return g_last_error.c_str(); }

const char* lw_version(void) { return "loopwind 1.0.0"; }

lw_tolerance lw_default_tolerance(void) {
    const loopwind::Tolerance t;
    return {t.rel, t.abs, t.max_evals};
}

lw_sim_config lw_default_sim_config(void) {
    const loopwind::SimConfig c;
    return {c.dt,            c.n_paths,           c.seed,
            c.bin_halfwidth, c.angular_halfwidth, c.threads};
}

lw_status lw_geometry_create(const char* name, int n, double mu,
                             lw_geometry** out) {
    if (!name || !out) return invalid("geometry_create: NULL argument");
    *out = nullptr;
    return guarded([&] {
        loopwind::Geometry g;
        const std::string s = name;
        if (s == "plane")
            g = loopwind::Geometry::plane();
        else if (s == "cp1")
            g = loopwind::Geometry::cp1();
        else if (s == "sphere")
            g = loopwind::Geometry::sphere(n, mu);
        else if (s == "ch1")
            g = loopwind::Geometry::ch1();
        else if (s == "ads")
            g = loopwind::Geometry::ads(n, mu);
        else if (s == "sl2")
            g = loopwind::Geometry::sl2(mu);
        else
            throw loopwind::domain_error(
                "unknown geometry (expected plane|cp1|sphere|ch1|ads|sl2)");
        g.validate();
        *out = new lw_geometry{g};
    });
}

void lw_geometry_destroy(lw_geometry* g) { delete g; }

lw_status lw_geometry_heavy_tails(const lw_geometry* g, int* out) {
    if (!g || !out) return invalid("heavy_tails: NULL argument");
    *out = g->geom.heavy_tails() ? 1 : 0;
    return LW_OK;
}

lw_status lw_compact_kernel(double alpha, double beta, double t, double r0,
                            double r, const lw_tolerance* tol, double* out) {
    if (!out) return invalid("compact_kernel: NULL output");
    return guarded([&] {
        *out = loopwind::compact_jacobi_kernel({alpha, beta}, t, r0, r,
                                               to_tol(tol));
    });
}

lw_status lw_hyperbolic_kernel(double alpha, double beta, double t, double r0,
                               double r, const lw_tolerance* tol,
                               double* out) {
    if (!out) return invalid("hyperbolic_kernel: NULL output");
    return guarded([&] {
        *out = loopwind::hyperbolic_jacobi_kernel({alpha, beta}, t, r0, r,
                                                  to_tol(tol));
    });
}

lw_status lw_conditional_cf(const lw_geometry* g, double lambda, double r0,
                            double r, double t, const lw_tolerance* tol,
                            double* out) {
    if (!g || !out) return invalid("conditional_cf: NULL argument");
    return guarded([&] {
        *out = loopwind::conditional_cf(g->geom, lambda, r0, r, t, to_tol(tol));
    });
}

lw_status lw_bridge_cf(const lw_geometry* g, double lambda, double r0,
                       double r, double theta, double t,
                       const lw_tolerance* tol, double* out_re,
                       double* out_im) {
    if (!g) return invalid("bridge_cf: NULL geometry");
    return guarded([&] {
        const loopwind::complex v = loopwind::bridge_cf(
            g->geom, lambda, {r0, r, theta, t}, to_tol(tol));
        if (out_re) *out_re = v.real();
        if (out_im) *out_im = v.imag();
    });
}

lw_status lw_fiber_density(const lw_geometry* g, double r0, double r,
                           double t, double theta, const lw_tolerance* tol,
                           double* value, double* abs_err) {
    if (!g || !value) return invalid("fiber_density: NULL argument");
    return guarded([&] {
        const loopwind::NumericResult v =
            loopwind::fiber_density(g->geom, r0, r, t, theta, to_tol(tol));
        *value = v.value;
        if (abs_err) *abs_err = v.abs_error;
    });
}

lw_status lw_index_distribution(const lw_geometry* g, double r0, double r,
                                double theta, double t, int k_min, int k_max,
                                const lw_tolerance* tol, double* probs,
                                double* norm_defect, double* tail_constant) {
    if (!g) return invalid("index_distribution: NULL geometry");
    if (k_min > k_max) return invalid("index_distribution: k_min > k_max");
    return guarded([&] {
        const loopwind::IndexDistribution d = loopwind::index_distribution(
            g->geom, {r0, r, theta, t}, k_min, k_max, to_tol(tol));
        store_dist(d, probs, norm_defect, tail_constant);
    });
}

lw_status lw_planar_index(double r_param, int k, const lw_tolerance* tol,
                          double* out) {
    if (!out) return invalid("planar_index: NULL output");
    return guarded(
        [&] { *out = loopwind::planar_index(r_param, k, to_tol(tol)); });
}

lw_status lw_sl2_loop_index(double t, double mu, int k_min, int k_max,
                            const lw_tolerance* tol, double* probs,
                            double* norm_defect, double* tail_constant) {
    if (k_min > k_max) return invalid("sl2_loop_index: k_min > k_max");
    return guarded([&] {
        const loopwind::IndexDistribution d =
            loopwind::sl2_loop_index(t, mu, k_min, k_max, to_tol(tol));
        store_dist(d, probs, norm_defect, tail_constant);
    });
}

lw_status lw_ch1_longtime_index(double r0, double r, double theta, int k,
                                const lw_tolerance* tol, double* out) {
    if (!out) return invalid("ch1_longtime_index: NULL output");
    return guarded([&] {
        *out = loopwind::ch1_longtime_index(r0, r, theta, k, to_tol(tol));
    });
}

lw_status lw_limit_cf(const lw_geometry* g, double lambda, double* out) {
    if (!g || !out) return invalid("limit_cf: NULL argument");
    return guarded([&] { *out = loopwind::limit_cf(g->geom, lambda); });
}

lw_status lw_ads_joint_density(int n, double mu, double t, double r0,
                               double r, double theta,
                               const lw_tolerance* tol, double* out) {
    if (!out) return invalid("ads_joint_density: NULL output");
    return guarded([&] {
        *out = loopwind::ads_joint_density(n, mu, t, r0, r, theta, to_tol(tol));
    });
}

lw_status lw_mu_convolution_check(int n, double mu, double r0, double r,
                                  double t, double theta,
                                  const lw_tolerance* tol, double* out) {
    if (!out) return invalid("mu_convolution_check: NULL output");
    return guarded([&] {
        *out = loopwind::mu_convolution_check(n, mu, r0, r, t, theta,
                                              to_tol(tol));
    });
}

lw_status lw_simulate_radial(const lw_geometry* g, double r0, double t,
                             const lw_sim_config* cfg, double* out) {
    if (!g || !out) return invalid("simulate_radial: NULL argument");
    return guarded([&] {
        const std::vector<double> r =
            loopwind::simulate_radial(g->geom, r0, t, to_sim(cfg));
        std::memcpy(out, r.data(), r.size() * sizeof(double));
    });
}

lw_status lw_estimate_conditional_cf(const lw_geometry* g, double lambda,
                                     double r0, double r, double t,
                                     const lw_sim_config* cfg, double* out_re,
                                     double* out_im, double* stderr_est,
                                     long* accepted) {
    if (!g) return invalid("estimate_conditional_cf: NULL geometry");
    return guarded([&] {
        const loopwind::CfEstimate e = loopwind::estimate_conditional_cf(
            g->geom, lambda, r0, r, t, to_sim(cfg));
        if (out_re) *out_re = e.value.real();
        if (out_im) *out_im = e.value.imag();
        if (stderr_est) *stderr_est = e.stderr_est;
        if (accepted) *accepted = e.accepted;
    });
}

lw_status lw_estimate_index_distribution(const lw_geometry* g, double r0,
                                         double r, double theta, double t,
                                         const lw_sim_config* cfg, int k_min,
                                         int k_max, double* probs,
                                         double* ci_lo, double* ci_hi,
                                         double* stderrs, long* counts,
                                         long* accepted) {
    if (!g) return invalid("estimate_index_distribution: NULL geometry");
    if (k_min > k_max)
        return invalid("estimate_index_distribution: k_min > k_max");
    return guarded([&] {
        const loopwind::EmpiricalIndexDistribution d =
            loopwind::estimate_index_distribution(
                g->geom, {r0, r, theta, t}, to_sim(cfg), k_min, k_max);
        const std::size_t w = d.probs.size();
        for (std::size_t i = 0; i < w; ++i) {
            if (probs) probs[i] = d.probs[i];
            if (ci_lo) ci_lo[i] = d.ci_lo[i];
            if (ci_hi) ci_hi[i] = d.ci_hi[i];
            if (stderrs) stderrs[i] = d.stderrs[i];
            if (counts) counts[i] = d.counts[i];
        }
        if (accepted) *accepted = d.accepted;
    });
}

}  // extern "C"

#ifndef LOOPWIND_H
#define LOOPWIND_H

/* C interface to the winding-law library. All functions return a status
 * code; on non-zero status a thread-local message is available through
 * lw_last_error(). Output parameters may be NULL when the caller does not
 * need them. */

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum {
    LW_OK = 0,
    LW_ERR_DOMAIN = 1,   /* argument outside the mathematical domain */
    LW_ERR_NUMERIC = 2,  /* quadrature/series failed to converge */
    LW_ERR_INVALID = 3,  /* bad handle, NULL required pointer, bad name */
    LW_ERR_INTERNAL = 4
} lw_status;

/* Message for the most recent failure on this thread. */
const char* lw_last_error(void);
const char* lw_version(void);

typedef struct {
    double rel;       /* relative tolerance target */
    double abs;       /* absolute tolerance floor */
    long max_evals;   /* evaluation budget per quadrature/series */
} lw_tolerance;

/* rel 1e-10, abs 1e-14, max_evals 2e6 */
lw_tolerance lw_default_tolerance(void);

typedef struct {
    double dt;                 /* Euler step; must be <= t/100 */
    long n_paths;
    unsigned long long seed;
    double bin_halfwidth;      /* radial conditioning window */
    double angular_halfwidth;  /* fiber-angle conditioning window */
    int threads;               /* 0 = hardware concurrency */
} lw_sim_config;

lw_sim_config lw_default_sim_config(void);

/* ---- geometry handle ---- */

typedef struct lw_geometry lw_geometry;

/* name: plane | cp1 | sphere | ch1 | ads | sl2. n is ignored except for
 * sphere/ads; mu is ignored for plane/cp1/ch1. */
lw_status lw_geometry_create(const char* name, int n, double mu,
                             lw_geometry** out);
void lw_geometry_destroy(lw_geometry* g);
/* 1 if the index law has k^-2 tails, 0 for the Gaussian-tail family. */
lw_status lw_geometry_heavy_tails(const lw_geometry* g, int* out);

/* ---- heat kernels ---- */

lw_status lw_compact_kernel(double alpha, double beta, double t, double r0,
                            double r, const lw_tolerance* tol, double* out);
lw_status lw_hyperbolic_kernel(double alpha, double beta, double t, double r0,
                               double r, const lw_tolerance* tol, double* out);

/* ---- analytic winding laws ---- */

lw_status lw_conditional_cf(const lw_geometry* g, double lambda, double r0,
                            double r, double t, const lw_tolerance* tol,
                            double* out);

lw_status lw_bridge_cf(const lw_geometry* g, double lambda, double r0,
                       double r, double theta, double t,
                       const lw_tolerance* tol, double* out_re,
                       double* out_im);

lw_status lw_fiber_density(const lw_geometry* g, double r0, double r,
                           double t, double theta, const lw_tolerance* tol,
                           double* value, double* abs_err);

/* probs must have room for k_max - k_min + 1 doubles. tail_constant is NaN
 * for the Gaussian-tail geometries. */
lw_status lw_index_distribution(const lw_geometry* g, double r0, double r,
                                double theta, double t, int k_min, int k_max,
                                const lw_tolerance* tol, double* probs,
                                double* norm_defect, double* tail_constant);

lw_status lw_planar_index(double r_param, int k, const lw_tolerance* tol,
                          double* out);

lw_status lw_sl2_loop_index(double t, double mu, int k_min, int k_max,
                            const lw_tolerance* tol, double* probs,
                            double* norm_defect, double* tail_constant);

lw_status lw_ch1_longtime_index(double r0, double r, double theta, int k,
                                const lw_tolerance* tol, double* out);

lw_status lw_limit_cf(const lw_geometry* g, double lambda, double* out);

lw_status lw_ads_joint_density(int n, double mu, double t, double r0,
                               double r, double theta,
                               const lw_tolerance* tol, double* out);

lw_status lw_mu_convolution_check(int n, double mu, double r0, double r,
                                  double t, double theta,
                                  const lw_tolerance* tol, double* out);

/* ---- Monte Carlo oracle ---- */

/* out must have room for cfg->n_paths doubles. */
lw_status lw_simulate_radial(const lw_geometry* g, double r0, double t,
                             const lw_sim_config* cfg, double* out);

lw_status lw_estimate_conditional_cf(const lw_geometry* g, double lambda,
                                     double r0, double r, double t,
                                     const lw_sim_config* cfg, double* out_re,
                                     double* out_im, double* stderr_est,
                                     long* accepted);

/* Arrays must have room for k_max - k_min + 1 entries; any may be NULL. */
lw_status lw_estimate_index_distribution(const lw_geometry* g, double r0,
                                         double r, double theta, double t,
                                         const lw_sim_config* cfg, int k_min,
                                         int k_max, double* probs,
                                         double* ci_lo, double* ci_hi,
                                         double* stderrs, long* counts,
                                         long* accepted);

#ifdef __cplusplus
}
#endif

#endif /* LOOPWIND_H */

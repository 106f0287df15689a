#pragma once

#include <vector>

#include "kernels.hpp"
#include "numeric.hpp"

namespace loopwind {

/// Manifold selector. SL2(mu) is definitionally AdS(1, mu) and dispatches to
/// the same code path.
struct Geometry {
    enum class Kind { Plane, CP1, Sphere, CH1, AdS, SL2 };
    Kind kind = Kind::CP1;
    int n = 1;
    double mu = 0.0;

    static Geometry plane() { return {Kind::Plane, 1, 0.0}; }
    static Geometry cp1() { return {Kind::CP1, 1, 0.0}; }
    static Geometry sphere(int n, double mu) { return {Kind::Sphere, n, mu}; }
    static Geometry ch1() { return {Kind::CH1, 1, 0.0}; }
    static Geometry ads(int n, double mu) { return {Kind::AdS, n, mu}; }
    static Geometry sl2(double mu) { return {Kind::SL2, 1, mu}; }

    /// SL2 -> AdS(1, mu); everything else unchanged.
    Geometry canonical() const;
    /// True when the index law has k^{-2} (Cauchy-type) tails; false for the
    /// Gaussian-tailed AdS/SL2 family.
    bool heavy_tails() const;
    void validate() const;
};

/// Endpoint data (r0, r, theta, t) of a conditioned bridge; the loop case is
/// r = r0, theta = 0. theta is reduced to [0, 2*pi).
struct BridgeSpec {
    double r0 = 0.0;
    double r = 0.0;
    double theta = 0.0;
    double t = 1.0;
};

struct IndexDistribution {
    int k_min = 0;
    int k_max = 0;
    std::vector<double> probs;       // indexed k_min..k_max
    double norm_defect = 0.0;        // window + tail closure defect
    double tail_constant = 0.0;      // lim k^2 P(k) estimate; NaN if Gaussian
    double prob(int k) const { return probs.at(static_cast<std::size_t>(k - k_min)); }
};

/// E[e^{i lambda theta(t)} | r(t) = r]: real, even, 1 at lambda = 0.
/// Precomputes the lambda-independent denominator kernel so that sweeps in
/// lambda (Fourier inversion, Poisson sums) stay cheap.
class ConditionalCf {
  public:
    ConditionalCf(Geometry geom, double r0, double r, double t,
                  const Tolerance& tol = {});
    double operator()(double lambda) const;
    const Geometry& geometry() const { return geom_; }

  private:
    Geometry geom_;
    double r0_, r_, t_;
    Tolerance tol_;
    double log_denominator_;
};

double conditional_cf(Geometry geom, double lambda, double r0, double r,
                      double t, const Tolerance& tol = {});

/// Conditional density of theta(t) given r(t) = r, by numerical inversion of
/// the conditional characteristic function.
NumericResult fiber_density(Geometry geom, double r0, double r, double t,
                            double theta, const Tolerance& tol = {});

/// Independent second route for CH1: the explicit (p, u, v) triple integral.
NumericResult ch1_fiber_density_triple(double r0, double r, double t,
                                       double theta, const Tolerance& tol = {});

/// Joint density p_t(r, theta) of (radius, fiber angle) on AdS^{2n+1} with
/// respect to (sinh r)^{2n-1} cosh r dr dtheta.
double ads_joint_density(int n, double mu, double t, double r0, double r,
                         double theta, const Tolerance& tol = {});

/// Independent second route for the AdS fiber density, via the joint density
/// divided by the radial marginal.
NumericResult ads_fiber_density_direct(int n, double mu, double t, double r0,
                                       double r, double theta,
                                       const Tolerance& tol = {});

/// P(index = k | endpoint) over [k_min, k_max], normalized over the window
/// plus an analytic tail closure (k^{-2} integral bound for the Cauchy-tail
/// geometries, envelope ratio bound for the Gaussian-tail ones).
IndexDistribution index_distribution(Geometry geom, const BridgeSpec& bridge,
                                     int k_min, int k_max,
                                     const Tolerance& tol = {});

/// Bridge characteristic function E[e^{i lambda theta(t)} | endpoint] by
/// Poisson summation of the conditional CF.
complex bridge_cf(Geometry geom, double lambda, const BridgeSpec& bridge,
                  const Tolerance& tol = {});

/// Unnormalized loop-index weight for the Berger Brownian loop on SL(2, R):
/// Gaussian factor times the y-integral (integral route).
double sl2_loop_weight(double t, double mu, int k, const Tolerance& tol = {});
/// Closed form of the same weight at mu = 0 (residue evaluation of the
/// y-integral).
double sl2_loop_weight_mu0(double t, int k);
/// ln of the loop weight through the convolution form (Gaussian smoothing of
/// the residue transform). The direct oscillatory integral computes the
/// weight as a tiny difference of O(1) quantities and drowns in roundoff
/// once the Gaussian damping passes ~1e-15 of the k = 0 value; this form has
/// a positive integrand and stays accurate arbitrarily deep in the tail.
/// Requires mu > 0.
double sl2_loop_log_weight(double t, double mu, int k,
                           const Tolerance& tol = {});
IndexDistribution sl2_loop_index(double t, double mu, int k_min, int k_max,
                                 const Tolerance& tol = {});

/// Exact planar loop-index law (r_param = |z(0)|^2 / L).
double planar_index(double r_param, int k, const Tolerance& tol = {});

/// t -> infinity limit of the CH1 bridge index law (double integral).
double ch1_longtime_index(double r0, double r, double theta, int k,
                          const Tolerance& tol = {});

/// Limiting CF of the rescaled winding: theta(t)/t -> Cauchy(2) for CP1,
/// Cauchy(n) for Sphere(n, .), and theta(t)/sqrt(t) -> N(0, 1+mu^2) for
/// AdS/SL2. Unsupported for Plane and CH1.
double limit_cf(Geometry geom, double lambda);

/// |f^{(mu)}_{r,t}(theta) - (Gaussian_{mu^2 t} * f^{(0)}_{r,t})(theta)| on
/// the Sphere geometry; the fiber-speed convolution identity says this
/// vanishes.
double mu_convolution_check(int n, double mu, double r0, double r, double t,
                            double theta, const Tolerance& tol = {});

/// Reduce an angle to [0, 2*pi).
double reduce_angle(double theta);

}  // namespace loopwind

#pragma once

#include <cstdint>
#include <vector>

#include "laws.hpp"
#include "numeric.hpp"

namespace loopwind {

struct SimConfig {
    double dt = 1e-3;
    long n_paths = 100000;
    std::uint64_t seed = 0;
    double bin_halfwidth = 0.02;        // radial conditioning window
    double angular_halfwidth = 0.05;    // fiber-angle conditioning window
    int threads = 1;                    // 0 = hardware concurrency
};

struct PathSample {
    double r_end = 0.0;
    double theta_end = 0.0;
    bool accepted = false;
};

struct CfEstimate {
    complex value{0.0, 0.0};
    double stderr_est = 0.0;
    long accepted = 0;
};

struct EmpiricalIndexDistribution {
    int k_min = 0;
    int k_max = 0;
    long accepted = 0;
    std::vector<long> counts;
    std::vector<double> probs;
    std::vector<double> ci_lo;    // Wilson 95%
    std::vector<double> ci_hi;
    std::vector<double> stderrs;  // binomial standard errors
    double prob(int k) const {
        return probs.at(static_cast<std::size_t>(k - k_min));
    }
};

/// Euler-Maruyama endpoints of the radial Jacobi diffusion (cot/coth drift
/// families; 2-D Bessel for the plane), with boundary-safe stepping: steps
/// that land within a few sqrt(dt) of a boundary are replaced by the exact
/// local Bessel move for the dominant drift term, and interior proposals
/// that would exit the domain are retried with halved substeps.
std::vector<double> simulate_radial(Geometry geom, double r0, double t,
                                    const SimConfig& cfg);

/// Joint endpoints (r(t), theta(t)) for the n = 1 fibrations and the plane.
/// Conditionally on the radial path the fiber angle is a centered Gaussian
/// whose variance is an additive functional of the path (time change), so it
/// is sampled as sqrt(mu^2 t + clock) * Z; the plane accumulates the actual
/// turning angle of the 2-D path.
std::vector<PathSample> simulate_winding_pair(Geometry geom, double r0,
                                              double t, const SimConfig& cfg);

/// Ratio estimator of E[e^{i lambda theta(t)} | r(t) in bin around r] with a
/// delta-method standard error. Throws when fewer than 100 paths land in the
/// conditioning bin.
CfEstimate estimate_conditional_cf(Geometry geom, double lambda, double r0,
                                   double r, double t, const SimConfig& cfg);

/// Empirical index distribution of bin-conditioned bridges: accept paths
/// with r(t) in the radial bin and theta(t) within the angular bin of
/// theta + 2*pi*k for some k in the window; report Wilson intervals per k.
EmpiricalIndexDistribution estimate_index_distribution(Geometry geom,
                                                       const BridgeSpec& bridge,
                                                       const SimConfig& cfg,
                                                       int k_min, int k_max);

}  // namespace loopwind

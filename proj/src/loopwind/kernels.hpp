#pragma once

#include <vector>

#include "numeric.hpp"
#include "specfun.hpp"

namespace loopwind {

/// Compact Jacobi family on [0, pi/2]; the spectral series is stated for
/// alpha, beta >= 0.
struct CompactKernelParams {
    double alpha;
    double beta;
};

/// Hyperbolic Jacobi family on [0, inf); alpha > -1, beta unrestricted.
struct HyperbolicKernelParams {
    double alpha;
    double beta;
};

/// Point in affine coordinates (projective chart: any w; hyperbolic chart:
/// |w| < 1).
struct AffinePoint {
    std::vector<complex> w;
};

/// Transition density q_t^{alpha,beta}(r0, r) of the compact Jacobi
/// diffusion with respect to Lebesgue measure on [0, pi/2].
double compact_jacobi_kernel(CompactKernelParams params, double t, double r0,
                             double r, const Tolerance& tol = {});

/// The spectral series without the 2 cos^{2b+1} sin^{2a+1} weight; this is
/// the quantity the CP^n heat kernel divides back out, and it is finite on
/// the diagonal and at the chart boundaries.
double compact_series(CompactKernelParams params, double t, double x0,
                      double x, const Tolerance& tol = {});

/// Transition density of the hyperbolic Jacobi diffusion (Plancherel
/// integral over spherical functions).
double hyperbolic_jacobi_kernel(HyperbolicKernelParams params, double t,
                                double r0, double r, const Tolerance& tol = {});

/// Kernel with the e^{-(alpha+beta+1)^2 t/2} spectral gap factored out:
/// q = exp(-rho^2 t/2) * weight(r) * hyperbolic_spectral_scaled. Needed so
/// ratios of kernels at large t can be formed in log space.
double hyperbolic_spectral_scaled(HyperbolicKernelParams params, double t,
                                  double r0, double r,
                                  const Tolerance& tol = {});

/// weight(r) = (sinh r)^{2a+1} (cosh r)^{2b+1}.
double hyperbolic_weight(HyperbolicKernelParams params, double r);

/// Long-time asymptote of the hyperbolic kernel (saddle of the Plancherel
/// integral at p = 0).
double hyperbolic_kernel_asymptotic(HyperbolicKernelParams params, double t,
                                    double r0, double r);

/// Radial transition density of Brownian motion on 3-D hyperbolic space,
/// i.e. the (1/2, -1/2) hyperbolic family, evaluated through the exact H^3
/// heat kernel averaged over the endpoint sphere. Valid at any argument
/// size; used where the spectral integral would be impractical.
double h3_radial_kernel(double t, double r0, double r,
                        const Tolerance& tol = {});

/// Fubini-Study distance between affine points of CP^n (in [0, pi/2]).
double fs_distance(const AffinePoint& w0, const AffinePoint& w);

/// Bergman distance between points of the unit ball model of CH^n.
double bergman_distance(const AffinePoint& w0, const AffinePoint& w);

/// Heat kernel of CP^n with respect to Lebesgue measure in the affine chart.
double cpn_heat_kernel(int n, double t, const AffinePoint& w0,
                       const AffinePoint& w, const Tolerance& tol = {});

/// Heat kernel of CH^n with respect to Lebesgue measure on the unit ball.
double chn_heat_kernel(int n, double t, const AffinePoint& w0,
                       const AffinePoint& w, const Tolerance& tol = {});

}  // namespace loopwind

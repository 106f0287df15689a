#pragma once

#include "numeric.hpp"
#include "quadrature.hpp"

namespace loopwind {

/// Exponents (alpha, beta) of a Jacobi family. alpha > -1 always; beta > -1
/// is required for the compact-family polynomials but is unconstrained for
/// the hyperbolic family.
struct JacobiParams {
    double alpha;
    double beta;
};

/// Principal-branch log-Gamma for complex argument (Lanczos approximation
/// with reflection for Re z < 1/2). Throws domain_error at the poles.
complex log_gamma(complex z);

/// Jacobi polynomial P_m^{alpha,beta}(x) for real parameters, evaluated by
/// the terminating hypergeometric sum. `jacobi_poly_recurrence` is the
/// independent three-term recurrence route; the two must agree.
double jacobi_poly(int m, JacobiParams params, double x);
double jacobi_poly_recurrence(int m, JacobiParams params, double x);

/// Gegenbauer polynomial C_m^{alpha+1/2}(x) via the Gamma-ratio reduction to
/// P_m^{alpha,alpha}.
double gegenbauer_poly(int m, double alpha, double x);

/// Quadrature of Int_0^pi (cos 2r + i sin 2r cos eta)^m (sin eta)^{2 alpha}
/// d eta. The imaginary part cancels by eta <-> pi - eta symmetry and is
/// asserted to vanish within tolerance; the real part is returned.
NumericResult gegenbauer_via_integral(int m, double alpha, double r,
                                      const Tolerance& tol = {});

/// Gauss hypergeometric 2F1(a,b;c;x) for real x <= 0 (the only regime the
/// winding formulas need). Arguments outside the unit disk are mapped inside
/// by the Pfaff transformation; near-unit transformed arguments use the
/// z -> 1-z connection formula.
complex gauss_2f1(complex a, complex b, complex c, double x);

/// Hyperbolic spherical function Phi_p^{alpha,beta}(r) =
/// 2F1((alpha+beta+1+ip)/2, (alpha+beta+1-ip)/2; alpha+1; -sinh^2 r).
/// Real by the conjugate parameter pair; the imaginary residue is checked
/// and discarded.
double spherical_fn(JacobiParams params, double p, double r);

/// Plancherel density m_{alpha,beta}(p), evaluated in log-space.
/// m(0) = 0 exactly (1/Gamma(ip) vanishes linearly).
double plancherel_density(JacobiParams params, double p);

/// Yor's integral Phi_r(x) = (x/pi) Int_0^inf e^{-r cosh t} dt / (t^2+x^2).
double yor_phi(double r_param, double x, const Tolerance& tol = {});

}  // namespace loopwind

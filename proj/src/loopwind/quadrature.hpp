#pragma once

#include <functional>
#include <span>
#include <type_traits>
#include <vector>

#include "numeric.hpp"

namespace loopwind {

using RealFn = std::function<double(double)>;
using ComplexFn = std::function<complex(double)>;
using SeriesTerm = std::function<double(long)>;

/// Adaptive Gauss-Kronrod integration of f over (a, b). Endpoint
/// singularities of integrable type (x^{-1/2} and milder) are handled by
/// bisection; the rule never evaluates the endpoints themselves.
NumericResult integrate_interval_real(const RealFn& f, double a, double b,
                                      const Tolerance& tol = {});
ComplexResult integrate_interval_complex(const ComplexFn& f, double a,
                                         double b, const Tolerance& tol = {});

template <class F>
auto integrate_interval(const F& f, double a, double b,
                        const Tolerance& tol = {}) {
    if constexpr (std::is_convertible_v<decltype(f(0.0)), double>)
        return integrate_interval_real(f, a, b, tol);
    else
        return integrate_interval_complex(f, a, b, tol);
}

/// Integration over the whole real line for integrands with (at least)
/// Gaussian-type decay of scale `gaussian_scale_hint`. The truncation point
/// is found by probing the actual integrand magnitude, never a
/// formula-derived envelope; detected growth at the probe points raises
/// numeric_error.
NumericResult integrate_line(const RealFn& f, double gaussian_scale_hint,
                             const Tolerance& tol = {});

/// Sum of term(0) + term(1) + ... for terms eventually dominated by a
/// super-geometrically decaying envelope. Truncates when a conservative
/// envelope ratio bound on the tail falls below tolerance.
NumericResult sum_series(const SeriesTerm& term, const Tolerance& tol = {});

/// Density f(theta) = (1/pi) Int_0^inf cos(lambda theta) cf(lambda) dlambda
/// for a real, even, integrable characteristic function with cf(0) = 1.
/// For |theta| > 4*pi the integral is taken per half-period between the
/// cosine zeros and the partial sums are Aitken-accelerated.
NumericResult invert_cf(const RealFn& cf, double theta,
                        const Tolerance& tol = {});

/// Batch inversion sharing one sampling of cf across all requested theta.
/// The cf samples are taken on Gauss-Kronrod panels fine enough for the
/// fastest oscillation max|theta|; each output carries its own error
/// estimate.
std::vector<NumericResult> invert_cf_grid(const RealFn& cf,
                                          std::span<const double> thetas,
                                          const Tolerance& tol = {});

}  // namespace loopwind

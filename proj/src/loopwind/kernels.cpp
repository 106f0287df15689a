#include "kernels.hpp"

#include <algorithm>
#include <cmath>

#include "quadrature.hpp"

namespace loopwind {

double compact_series(CompactKernelParams params, double t, double x0,
                      double x, const Tolerance& tol) {
    const double alpha = params.alpha, beta = params.beta;
    if (alpha < 0.0 || beta < 0.0)
        throw domain_error("compact kernel: alpha, beta must be >= 0");
    if (t <= 0.0) throw domain_error("compact kernel: t must be > 0");
    const double s = alpha + beta + 1.0;

    // running three-term recurrence state for P_m at both arguments
    double p0_a = 1.0, p1_a = 0.0, p0_b = 1.0, p1_b = 0.0;
    auto advance = [&](long m, double xx, double& pm1, double& pm2) -> double {
        if (m == 0) return 1.0;
        if (m == 1) {
            const double v = (alpha + 1.0) + 0.5 * (s + 1.0) * (xx - 1.0);
            pm1 = v;
            return v;
        }
        const double q = 2.0 * m + alpha + beta;
        const double a1 = 2.0 * m * (m + alpha + beta) * (q - 2.0);
        const double a2 = (q - 1.0) * (alpha * alpha - beta * beta);
        const double a3 = (q - 1.0) * q * (q - 2.0);
        const double a4 = 2.0 * (m + alpha - 1.0) * (m + beta - 1.0) * q;
        const double v = ((a2 + a3 * xx) * pm1 - a4 * pm2) / a1;
        pm2 = pm1;
        pm1 = v;
        return v;
    };

    auto term = [&, t](long m) mutable -> double {
        const double pa = advance(m, x0, p1_a, p0_a);
        const double pb = advance(m, x, p1_b, p0_b);
        const double lc = std::lgamma(m + s) + std::lgamma(m + 1.0) -
                          std::lgamma(m + alpha + 1.0) -
                          std::lgamma(m + beta + 1.0);
        const double expo = -2.0 * m * (m + s) * t + lc;
        if (expo < -745.0) return 0.0;
        return (2.0 * m + s) * std::exp(expo) * pa * pb;
    };
    Tolerance series_tol = tol;
    series_tol.max_evals = 400;  // t below ~0.05 is rejected, not mis-summed
    NumericResult sum = sum_series(term, series_tol);
    return sum.value;
}

double compact_jacobi_kernel(CompactKernelParams params, double t, double r0,
                             double r, const Tolerance& tol) {
    const double weight = 2.0 *
                          std::pow(std::cos(r), 2.0 * params.beta + 1.0) *
                          std::pow(std::sin(r), 2.0 * params.alpha + 1.0);
    return weight * compact_series(params, t, std::cos(2.0 * r0),
                                   std::cos(2.0 * r), tol);
}

double hyperbolic_weight(HyperbolicKernelParams params, double r) {
    return std::pow(std::sinh(r), 2.0 * params.alpha + 1.0) *
           std::pow(std::cosh(r), 2.0 * params.beta + 1.0);
}

double hyperbolic_spectral_scaled(HyperbolicKernelParams params, double t,
                                  double r0, double r, const Tolerance& tol) {
    if (params.alpha <= -1.0)
        throw domain_error("hyperbolic kernel: alpha must be > -1");
    if (t <= 0.0) throw domain_error("hyperbolic kernel: t must be > 0");
    const JacobiParams jp{params.alpha, params.beta};

    // Gaussian damping dominates the polynomially growing Plancherel
    // density; probe for the cutoff, bounded below by 8/sqrt(t).
    double pmax = 8.0 / std::sqrt(t);
    while (std::exp(-0.5 * pmax * pmax * t) *
               (1.0 + plancherel_density(jp, pmax)) >
           0.01 * tol.abs)
        pmax *= 1.5;

    auto f = [&](double p) {
        const double damp = std::exp(-0.5 * p * p * t);
        if (damp == 0.0) return 0.0;
        const double phi0 = r0 == 0.0 ? 1.0 : spherical_fn(jp, p, r0);
        const double phi1 = spherical_fn(jp, p, r);
        return damp * phi0 * phi1 * plancherel_density(jp, p);
    };
    // Hard displacement cut: the radial diffusion has drift bounded by
    // rho (for r away from 0), so the scaled density beyond
    // |r - r0| ~ rho t + sqrt(2 t z) is below e^{-z} of its own scale;
    // at z = 90 the true value is unrepresentable against the cancelling
    // spectral summands and the quadrature would only return noise.
    const double rho = params.alpha + params.beta + 1.0;
    const double disp = std::abs(r - r0) - rho * t;
    if (disp > 0.0 && 0.5 * disp * disp / t > 90.0 + 0.5 * rho * rho * t)
        return 0.0;

    // At large radii the spherical functions oscillate in p with period
    // 2*pi/r; a single adaptive panel can alias a full oscillation and stop
    // with a bogus error estimate, so pre-split at the oscillation scale.
    const int panels = std::max(
        1, (int)std::ceil(pmax * std::max({r, r0, 1.0}) / 3.0));
    // Panels must be resolved relative to the integrand's global magnitude,
    // not an absolute tolerance: at large r the final answer lives many
    // orders below the cancelling summands, so a fixed absolute stopping
    // rule would freeze panels at noise level, while a purely relative one
    // never terminates on panels whose own integral is near zero.
    double fmax = 0.0;
    for (int i = 0; i < panels; ++i)
        fmax = std::max(fmax, std::abs(f(pmax * (i + 0.5) / panels)));

    // For beta > alpha + 1 the spectral measure acquires bound states at
    // p = i*lam_j, lam_j = beta - alpha - 1 - 2j > 0, with eigenfunction
    // 2F1(alpha+1+j, beta-j; alpha+1; -sinh^2 r) and weight
    // 2*lam_j*Gamma(alpha+1+j)*Gamma(beta-j) /
    // (Gamma(alpha+1)^2 j! Gamma(beta-alpha-j)) in this normalization
    // (residues of the Plancherel density at its upper-half-plane poles).
    // Summed before the continuous part so the panel tolerances can be
    // slackened when the bound states dominate the total.
    const double alpha = params.alpha, beta = params.beta;
    double disc = 0.0, disc_abs = 0.0;
    for (int j = 0;; ++j) {
        const double lam = beta - alpha - 1.0 - 2.0 * j;
        if (lam <= 1e-12) break;
        const double lw = std::log(2.0 * lam) + std::lgamma(alpha + 1.0 + j) +
                          std::lgamma(beta - j) -
                          2.0 * std::lgamma(alpha + 1.0) -
                          std::lgamma(j + 1.0) - std::lgamma(beta - alpha - j);
        // Pfaff: 2F1(a+j, b-j; a; -sinh^2) = cosh^{-2(b-j)} 2F1(-j, b-j; a;
        // tanh^2), a terminating sum that is stable for every r.
        auto bound = [&](double rr) {
            const double th2 = std::tanh(rr) * std::tanh(rr);
            double sum = 1.0, term = 1.0;
            for (int k = 0; k < j; ++k) {
                term *= (double(k) - j) * (beta - j + k) /
                        ((alpha + 1.0 + k) * (k + 1.0)) * th2;
                sum += term;
            }
            return std::pow(std::cosh(rr), -2.0 * (beta - j)) * sum;
        };
        const double dj = std::exp(lw + 0.5 * lam * lam * t) * bound(r0) * bound(r);
        disc += dj;
        disc_abs += std::abs(dj);
    }
    Tolerance qt = tol;
    qt.rel = 1e-13;
    qt.abs = 1e-14 *
             std::max(fmax * pmax, 2.0 * M_PI * disc_abs) / panels;
    double out = disc, abs_acc = disc_abs;
    for (int i = 0; i < panels; ++i) {
        const double a = pmax * i / panels, b = pmax * (i + 1) / panels;
        NumericResult q = integrate_interval(f, a, b, qt);
        out += q.value / (2.0 * M_PI);
        abs_acc += std::abs(q.value) / (2.0 * M_PI);
    }
    abs_acc = std::max(abs_acc, 0.1 * fmax * pmax / (2.0 * M_PI));
    // Far in the tail the continuous and bound-state parts cancel each
    // other almost completely (both grow with r while the true density
    // Gaussian-decays); a total below the cancellation floor of the
    // summands is indistinct from the (often unrepresentably small) true
    // value.
    if (std::abs(out) < 1e-12 * abs_acc) out = 0.0;
    // Physical sanity bound: in kernel units the result is a 1-D transition
    // density whose drift never exceeds 2*rho once clear of the origin, so
    // anything above the reflected-Gaussian envelope is cancellation noise
    // that slipped past the floor.
    if (out != 0.0) {
        const double qk = std::abs(out) * hyperbolic_weight(params, r) *
                          std::exp(-0.5 * rho * rho * t);
        const double d2 = std::abs(r - r0) - 2.0 * rho * t - 2.0;
        if (d2 > 0.0 &&
            qk > 50.0 * (1.0 + 1.0 / std::sqrt(t)) *
                     std::exp(-0.5 * d2 * d2 / t))
            out = 0.0;
    }
    return out;
}

double hyperbolic_jacobi_kernel(HyperbolicKernelParams params, double t,
                                double r0, double r, const Tolerance& tol) {
    const double rho = params.alpha + params.beta + 1.0;
    return std::exp(-0.5 * rho * rho * t) * hyperbolic_weight(params, r) *
           hyperbolic_spectral_scaled(params, t, r0, r, tol);
}

double hyperbolic_kernel_asymptotic(HyperbolicKernelParams params, double t,
                                    double r0, double r) {
    const double a = params.alpha, b = params.beta;
    const double rho = a + b + 1.0;
    const JacobiParams jp{a, b};
    const double phi0 = r0 == 0.0 ? 1.0 : spherical_fn(jp, 0.0, r0);
    const double phi1 = spherical_fn(jp, 0.0, r);
    const double lg = std::lgamma(0.5 * (a + b + 1.0)) +
                      std::lgamma(0.5 * (a - b + 1.0)) - std::lgamma(1.0 + a);
    return hyperbolic_weight(params, r) /
           (2.0 * std::sqrt(2.0 * M_PI) * std::pow(t, 1.5)) *
           std::exp(-0.5 * rho * rho * t) * phi0 * phi1 * std::exp(2.0 * lg);
}

double h3_radial_kernel(double t, double r0, double r, const Tolerance& tol) {
    if (t <= 0.0) throw domain_error("h3_radial_kernel: t must be > 0");
    auto p3 = [&](double d) {
        const double shape = d < 1e-8 ? 1.0 : d / std::sinh(d);
        return std::exp(-0.5 * t) * std::pow(2.0 * M_PI * t, -1.5) * shape *
               std::exp(-0.5 * d * d / t);
    };
    if (r0 < 1e-12) {
        return std::sqrt(2.0 / M_PI) * std::exp(-0.5 * t) *
               (r / std::pow(t, 1.5)) * std::exp(-0.5 * r * r / t) *
               std::sinh(r);
    }
    auto f = [&](double d) { return p3(d) * std::sinh(d); };
    NumericResult q =
        integrate_interval(f, std::abs(r - r0), r + r0, tol);
    return 2.0 * M_PI * (std::sinh(r) / std::sinh(r0)) * q.value;
}

namespace {

complex hermitian_inner(const AffinePoint& a, const AffinePoint& b) {
    // <a, b> = sum a_j conj(b_j)
    if (a.w.size() != b.w.size())
        throw domain_error("affine points have mismatched dimension");
    complex s = 0.0;
    for (std::size_t j = 0; j < a.w.size(); ++j) s += a.w[j] * std::conj(b.w[j]);
    return s;
}

double norm2(const AffinePoint& a) {
    double s = 0.0;
    for (const complex& z : a.w) s += std::norm(z);
    return s;
}

}  // namespace

double fs_distance(const AffinePoint& w0, const AffinePoint& w) {
    const double num = std::abs(1.0 + hermitian_inner(w, w0));
    const double den = std::sqrt((1.0 + norm2(w0)) * (1.0 + norm2(w)));
    const double c = std::min(1.0, num / den);
    return std::acos(c);
}

double bergman_distance(const AffinePoint& w0, const AffinePoint& w) {
    const double n0 = norm2(w0), n1 = norm2(w);
    if (n0 >= 1.0 || n1 >= 1.0)
        throw domain_error("bergman_distance: points must lie in the unit ball");
    const double num = std::abs(1.0 - hermitian_inner(w, w0));
    const double den = std::sqrt((1.0 - n0) * (1.0 - n1));
    return std::acosh(std::max(1.0, num / den));
}

double cpn_heat_kernel(int n, double t, const AffinePoint& w0,
                       const AffinePoint& w, const Tolerance& tol) {
    if (n < 1) throw domain_error("cpn_heat_kernel: n must be >= 1");
    const double d = fs_distance(w0, w);
    const double series = compact_series({double(n - 1), 0.0}, t, 1.0,
                                         std::cos(2.0 * d), tol);
    return std::tgamma(double(n)) / (2.0 * std::pow(M_PI, n)) * 2.0 * series *
           std::pow(1.0 + norm2(w), -(n + 1.0));
}

double chn_heat_kernel(int n, double t, const AffinePoint& w0,
                       const AffinePoint& w, const Tolerance& tol) {
    if (n < 1) throw domain_error("chn_heat_kernel: n must be >= 1");
    const double d = bergman_distance(w0, w);
    const HyperbolicKernelParams hp{double(n - 1), 0.0};
    const double rho = double(n);
    const double over_weight = std::exp(-0.5 * rho * rho * t) *
                               hyperbolic_spectral_scaled(hp, t, 0.0, d, tol);
    return std::tgamma(double(n)) / (2.0 * std::pow(M_PI, n)) * over_weight *
           std::pow(1.0 - norm2(w), -(n + 1.0));
}

}  // namespace loopwind

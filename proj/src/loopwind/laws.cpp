#include "laws.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <tuple>

#include "quadrature.hpp"

namespace loopwind {

double reduce_angle(double theta) {
    double r = std::fmod(theta, 2.0 * M_PI);
    if (r < 0.0) r += 2.0 * M_PI;
    if (r >= 2.0 * M_PI) r = 0.0;
    return r;
}

Geometry Geometry::canonical() const {
    if (kind == Kind::SL2) return {Kind::AdS, 1, mu};
    return *this;
}

bool Geometry::heavy_tails() const {
    const Kind k = canonical().kind;
    return k != Kind::AdS;
}

void Geometry::validate() const {
    if (n < 1) throw domain_error("geometry: n must be >= 1");
    if (mu < 0.0) throw domain_error("geometry: mu must be >= 0");
    if ((kind == Kind::Plane || kind == Kind::CP1 || kind == Kind::CH1) &&
        n != 1)
        throw domain_error("geometry: this manifold has no n parameter");
    if ((kind == Kind::Plane || kind == Kind::CP1 || kind == Kind::CH1) &&
        mu != 0.0)
        throw domain_error("geometry: this manifold has no mu parameter");
}

namespace {

void check_radial_domain(const Geometry& g, double r0, double r) {
    switch (g.kind) {
        case Geometry::Kind::CP1:
            if (r0 <= 0.0 || r0 >= M_PI_2 || r <= 0.0 || r >= M_PI_2)
                throw domain_error("radial arguments must lie in (0, pi/2)");
            break;
        case Geometry::Kind::Sphere:
            if (r0 < 0.0 || r0 >= M_PI_2 || r < 0.0 || r >= M_PI_2)
                throw domain_error("radial arguments must lie in [0, pi/2)");
            break;
        case Geometry::Kind::CH1:
            if (r0 <= 0.0 || r <= 0.0)
                throw domain_error("radial arguments must be > 0");
            break;
        case Geometry::Kind::AdS:
            if (r0 < 0.0 || r < 0.0)
                throw domain_error("radial arguments must be >= 0");
            break;
        default:
            throw domain_error("no radial fiber law for this geometry");
    }
}

double log_or_throw(double v, const char* what) {
    if (!(v > 0.0) || !std::isfinite(v))
        throw numeric_error(what, {v, 0.0, 0});
    return std::log(v);
}

}  // namespace

ConditionalCf::ConditionalCf(Geometry geom, double r0, double r, double t,
                             const Tolerance& tol)
    : geom_(geom.canonical()), r0_(r0), r_(r), t_(t), tol_(tol) {
    geom_.validate();
    if (t <= 0.0) throw domain_error("conditional_cf: t must be > 0");
    check_radial_domain(geom_, r0, r);
    const double x0 = std::cos(2.0 * r0), x = std::cos(2.0 * r);
    switch (geom_.kind) {
        case Geometry::Kind::CP1:
            log_denominator_ = log_or_throw(
                compact_series({0.0, 0.0}, t, x0, x, tol),
                "conditional_cf: denominator kernel not positive");
            break;
        case Geometry::Kind::Sphere:
            log_denominator_ = log_or_throw(
                compact_series({double(geom_.n - 1), 0.0}, t, x0, x, tol),
                "conditional_cf: denominator kernel not positive");
            break;
        case Geometry::Kind::CH1:
            log_denominator_ = log_or_throw(
                hyperbolic_spectral_scaled({0.0, 0.0}, t, r0, r, tol),
                "conditional_cf: denominator kernel not positive");
            break;
        case Geometry::Kind::AdS:
            log_denominator_ = log_or_throw(
                hyperbolic_spectral_scaled({double(geom_.n - 1), 0.0}, t, r0,
                                           r, tol),
                "conditional_cf: denominator kernel not positive");
            break;
        default:
            throw domain_error(
                "conditional_cf: the plane has no fiber CF; use planar_index");
    }
}

double ConditionalCf::operator()(double lambda) const {
    const double lam = std::abs(lambda);
    if (lam == 0.0) return 1.0;
    double lncf = 0.0;
    switch (geom_.kind) {
        case Geometry::Kind::CP1: {
            const double s = compact_series({lam, lam}, t_, std::cos(2.0 * r0_),
                                            std::cos(2.0 * r_), tol_);
            if (s <= 0.0) return 0.0;
            lncf = -2.0 * lam * (lam + 1.0) * t_ +
                   lam * std::log(0.25 * std::sin(2.0 * r0_) *
                                  std::sin(2.0 * r_)) +
                   std::log(s) - log_denominator_;
            break;
        }
        case Geometry::Kind::Sphere: {
            const double n = geom_.n, mu = geom_.mu;
            const double s =
                compact_series({n - 1.0, lam}, t_, std::cos(2.0 * r0_),
                               std::cos(2.0 * r_), tol_);
            if (s <= 0.0) return 0.0;
            lncf = -lam * (n + 0.5 * lam * mu * mu) * t_ +
                   lam * std::log(std::cos(r0_) * std::cos(r_)) + std::log(s) -
                   log_denominator_;
            break;
        }
        case Geometry::Kind::CH1: {
            const double s =
                hyperbolic_spectral_scaled({lam, -lam}, t_, r0_, r_, tol_);
            if (s <= 0.0) return 0.0;
            lncf = lam * std::log(std::tanh(r0_) * std::tanh(r_)) +
                   std::log(s) - log_denominator_;
            break;
        }
        case Geometry::Kind::AdS: {
            const double n = geom_.n, mu = geom_.mu;
            const double s = hyperbolic_spectral_scaled({n - 1.0, lam}, t_,
                                                        r0_, r_, tol_);
            if (s <= 0.0) return 0.0;
            lncf = -0.5 * lam * lam * (1.0 + mu * mu) * t_ +
                   lam * std::log(std::cosh(r0_) * std::cosh(r_)) +
                   std::log(s) - log_denominator_;
            break;
        }
        default:
            return 0.0;
    }
    if (lncf < -745.0) return 0.0;
    return std::exp(lncf);
}

double conditional_cf(Geometry geom, double lambda, double r0, double r,
                      double t, const Tolerance& tol) {
    return ConditionalCf(geom, r0, r, t, tol)(lambda);
}

namespace {

// Piecewise Chebyshev proxy for characteristic functions whose every
// evaluation runs a nested quadrature (the hyperbolic geometries). The fit is
// validated against the exact function at off-node points; segments that miss
// the target are bisected.
class ChebCache {
  public:
    static constexpr int kDeg = 20;
    ChebCache(const RealFn& f, double lo, double hi, double eps)
        : lo_(lo), hi_(hi) {
        build(f, lo, hi, eps, 0);
        std::sort(segs_.begin(), segs_.end(),
                  [](const Seg& a, const Seg& b) { return a.a < b.a; });
    }

    double operator()(double x) const {
        if (x >= hi_ || x < lo_) return 0.0;
        std::size_t lo = 0, hi = segs_.size();
        while (hi - lo > 1) {
            const std::size_t mid = (lo + hi) / 2;
            if (segs_[mid].a <= x)
                lo = mid;
            else
                hi = mid;
        }
        const Seg& s = segs_[lo];
        const double u = (2.0 * x - s.a - s.b) / (s.b - s.a);
        // Clenshaw
        double b1 = 0.0, b2 = 0.0;
        for (int j = kDeg; j >= 1; --j) {
            const double b0 = 2.0 * u * b1 - b2 + s.c[j];
            b2 = b1;
            b1 = b0;
        }
        return u * b1 - b2 + s.c[0];
    }

    double residual() const { return resid_; }
    long exact_evaluations() const { return evals_; }

  private:
    struct Seg {
        double a, b;
        std::array<double, kDeg + 1> c;
    };

    void build(const RealFn& f, double a, double b, double eps, int depth) {
        Seg seg;
        seg.a = a;
        seg.b = b;
        std::array<double, kDeg + 1> fv;
        for (int k = 0; k <= kDeg; ++k) {
            const double x = 0.5 * (a + b) +
                             0.5 * (b - a) * std::cos(M_PI * k / kDeg);
            fv[k] = f(x);
        }
        evals_ += kDeg + 1;
        for (int j = 0; j <= kDeg; ++j) {
            double s = 0.5 * (fv[0] + (j % 2 ? -1.0 : 1.0) * fv[kDeg]);
            for (int k = 1; k < kDeg; ++k)
                s += fv[k] * std::cos(M_PI * j * k / kDeg);
            seg.c[j] = 2.0 * s / kDeg;
        }
        seg.c[0] *= 0.5;
        seg.c[kDeg] *= 0.5;

        double err = std::abs(seg.c[kDeg]) + std::abs(seg.c[kDeg - 1]) +
                     std::abs(seg.c[kDeg - 2]);
        segs_.push_back(seg);
        const Seg& back = segs_.back();
        for (double u : {-0.83, -0.31, 0.27, 0.71}) {
            const double x = 0.5 * (a + b) + 0.5 * (b - a) * u;
            err = std::max(err, std::abs(f(x) - eval_seg(back, x)));
        }
        evals_ += 4;
        if (err > eps && depth < 10) {
            segs_.pop_back();
            const double mid = 0.5 * (a + b);
            build(f, a, mid, eps, depth + 1);
            build(f, mid, b, eps, depth + 1);
            return;
        }
        resid_ = std::max(resid_, err);
    }

    static double eval_seg(const Seg& s, double x) {
        const double u = (2.0 * x - s.a - s.b) / (s.b - s.a);
        double b1 = 0.0, b2 = 0.0;
        for (int j = kDeg; j >= 1; --j) {
            const double b0 = 2.0 * u * b1 - b2 + s.c[j];
            b2 = b1;
            b1 = b0;
        }
        return u * b1 - b2 + s.c[0];
    }

    std::vector<Seg> segs_;
    double lo_, hi_;
    double resid_ = 0.0;
    long evals_ = 0;
};

// Wraps a ConditionalCf for use by the inversion routines. The compact
// geometries are evaluated directly (a single spectral series each); the
// hyperbolic ones are fronted by a validated Chebyshev fit because each exact
// evaluation costs a Plancherel integral full of 2F1 calls. `extra_err` is
// the density-level error contributed by the fit.
RealFn inversion_cf(const std::shared_ptr<ConditionalCf>& cc,
                    const Tolerance& tol, double& extra_err) {
    const Geometry::Kind kind = cc->geometry().kind;
    if (kind == Geometry::Kind::CP1 || kind == Geometry::Kind::Sphere) {
        extra_err = 0.0;
        return [cc](double l) { return (*cc)(l); };
    }
    const double floor = 0.01 * std::max(tol.abs, 1e-300);
    double lmax = 1.0;
    while (((*cc)(lmax) > floor || (*cc)(0.71 * lmax) > floor) && lmax < 1e4)
        lmax *= 2.0;
    const double eps = std::max(1e-11, 1e-3 * tol.abs);
    auto cache = std::make_shared<ChebCache>(
        [cc](double l) { return (*cc)(l); }, 0.0, lmax, eps);
    extra_err = (cache->residual() + eps) * lmax / M_PI;
    return [cache](double l) { return (*cache)(std::abs(l)); };
}

}  // namespace

NumericResult fiber_density(Geometry geom, double r0, double r, double t,
                            double theta, const Tolerance& tol) {
    auto cc = std::make_shared<ConditionalCf>(geom, r0, r, t, tol);
    double extra = 0.0;
    const RealFn cf = inversion_cf(cc, tol, extra);
    NumericResult res = invert_cf(cf, theta, tol);
    res.abs_error += extra;
    return res;
}

NumericResult ch1_fiber_density_triple(double r0, double r, double t,
                                       double theta, const Tolerance& tol) {
    if (r0 <= 0.0 || r <= 0.0)
        throw domain_error("ch1 triple integral: radial arguments must be > 0");
    if (t <= 0.0) throw domain_error("ch1 triple integral: t must be > 0");
    const double shr2 = std::sinh(r) * std::sinh(r);
    const double shr02 = std::sinh(r0) * std::sinh(r0);
    const double c0 = std::log(std::tanh(r0) * std::tanh(r));

    Tolerance inner = tol;
    inner.rel = std::max(tol.rel, 1e-9);
    inner.max_evals = 200000;
    Tolerance mid = inner;
    mid.rel = std::max(tol.rel, 1e-8);
    Tolerance outer = tol;
    outer.rel = std::max(tol.rel, 1e-7);

    // u = sin^2(phi), v = sin^2(psi) absorb the |.|^{-1/2} endpoint
    // singularities; the remaining complex exponents become pure phases.
    auto uv_integral = [&](double p) -> complex {
        auto over_u = [&](double phi) -> complex {
            const double su = std::sin(phi), cu = std::cos(phi);
            const double u = su * su;
            const double l1mu = 2.0 * std::log(cu);
            const double base_u = 1.0 + u * shr02;
            const double phase_u =
                0.5 * p * (2.0 * std::log(su) - l1mu + std::log(base_u));
            const complex fu =
                std::exp(complex(0.0, phase_u)) / std::sqrt(base_u);
            auto over_v = [&](double psi) -> complex {
                const double sv = std::sin(psi), cv = std::cos(psi);
                const double v = sv * sv;
                const double l1mv = 2.0 * std::log(cv);
                const double base_v = 1.0 + v * shr2;
                const double phase_v =
                    0.5 * p * (2.0 * std::log(sv) - l1mv + std::log(base_v));
                const double L = c0 + l1mu + l1mv;
                const double cauchy = -L / (L * L + theta * theta);
                return std::exp(complex(0.0, -phase_v)) /
                       std::sqrt(base_v) * cauchy;
            };
            return fu * integrate_interval(ComplexFn(over_v), 0.0, M_PI_2,
                                           inner)
                            .value;
        };
        return 4.0 *
               integrate_interval(ComplexFn(over_u), 0.0, M_PI_2, mid).value;
    };

    // |Gamma(ip)|^2 = pi / (p sinh(pi p)), so the spectral weight is
    // p sinh(pi p) / pi; probe the damped cutoff before integrating.
    auto gamma_weight = [](double p) {
        return p * std::sinh(M_PI * p) / M_PI;
    };
    double pmax = 8.0 / std::sqrt(t);
    while (std::exp(-0.5 * pmax * pmax * t) * (1.0 + gamma_weight(pmax)) >
               1e-18 &&
           pmax < 200.0)
        pmax *= 1.5;

    auto f = [&](double p) -> complex {
        const double damp = std::exp(-0.5 * (p * p + 1.0) * t);
        if (damp == 0.0) return 0.0;
        return damp * gamma_weight(p) * uv_integral(p);
    };
    ComplexResult q = integrate_interval(ComplexFn(f), 0.0, pmax, outer);

    const double q00 = hyperbolic_jacobi_kernel({0.0, 0.0}, t, r0, r, inner);
    // the p-integral runs over the half line only (taking the real part
    // supplies the even reflection), so the full-line Plancherel constant
    // 1/(2 pi^2) gains another factor of 1/2
    const double pref = std::sinh(2.0 * r) / (4.0 * M_PI * M_PI * q00);
    const double value = pref * q.value.real();
    const double err = pref * (q.abs_error + std::abs(q.value.imag()));
    return {value, err, q.evaluations};
}

namespace {

// q_t^{n-1/2,-1/2}(0, d) / sinh^{2n}(d): the heat kernel of the
// (2n+1)-dimensional total space as a function of the base distance d of
// the endpoints (a point-pair invariant). Finite as d -> 0 because the
// kernel's weight is exactly sinh^{2n}. n = 1 has a closed form.
double ads_invariant_kernel(int n, double t, double d, const Tolerance& tol) {
    if (-0.5 * d * d / t - 0.5 * t < -745.0) return 0.0;
    if (n == 1) {
        const double shape = d < 1e-8 ? 1.0 : d / std::sinh(d);
        return std::sqrt(2.0 / M_PI) * std::exp(-0.5 * t) *
               std::pow(t, -1.5) * std::exp(-0.5 * d * d / t) * shape;
    }
    // For n >= 2 every evaluation is a spectral integral, and the joint
    // density nests this three integrals deep; tabulate per (n, t) once and
    // interpolate (Catmull-Rom) instead.
    struct Table {
        double h, dmax;
        std::vector<double> v;
    };
    static std::map<std::pair<int, double>, Table> cache;
    static std::mutex mtx;
    const auto key = std::make_pair(n, t);
    const Table* tab = nullptr;
    {
        std::lock_guard<std::mutex> lock(mtx);
        auto it = cache.find(key);
        if (it != cache.end()) tab = &it->second;
    }
    if (tab == nullptr) {
        Table fresh;
        fresh.h = 0.01 * std::max(1.0, std::sqrt(t));
        fresh.dmax = 20.0 + (n + 10.0) * std::sqrt(t) + double(n) * t;
        const std::size_t m = std::size_t(fresh.dmax / fresh.h) + 2;
        fresh.v.resize(m);
        for (std::size_t i = 0; i < m; ++i)
            fresh.v[i] =
                std::exp(-0.5 * double(n) * double(n) * t) *
                hyperbolic_spectral_scaled({n - 0.5, -0.5}, t, 0.0,
                                           double(i) * fresh.h, tol);
        std::lock_guard<std::mutex> lock(mtx);
        tab = &cache.emplace(key, std::move(fresh)).first->second;
    }
    if (d >= tab->dmax) return 0.0;
    const double u = d / tab->h;
    const std::size_t i =
        std::min(tab->v.size() - 3, std::size_t(std::max(1.0, u)));
    const double x = u - double(i);
    const double p0 = tab->v[i - 1], p1 = tab->v[i], p2 = tab->v[i + 1],
                 p3 = tab->v[i + 2];
    return p1 + 0.5 * x * (p2 - p0 +
                           x * (2.0 * p0 - 5.0 * p1 + 4.0 * p2 - p3 +
                                x * (3.0 * (p1 - p2) + p3 - p0)));
}

// Joint density of (radius, fiber angle) at time t for a start on the fiber
// axis (base distance 0), taken against sinh^{2n-1}(r) cosh(r) dr dtheta.
// theta integrates out to the base radial kernel, so the total mass is 1.
double ads_pair_density(int n, double mu, double t, double d, double theta,
                        const Tolerance& tol) {
    const double c = (1.0 + mu * mu) * t;
    Tolerance inner = tol;
    inner.rel = std::max(tol.rel, 1e-9);
    Tolerance line = tol;
    line.rel = std::max(tol.rel, 1e-8);
    const double chd = std::cosh(d);
    auto f = [&](double y) {
        const double chy = std::cosh(y);
        if (chd > 1e300 / chy) return 0.0;
        const double k =
            ads_invariant_kernel(n, t, std::acosh(chd * chy), inner);
        if (k == 0.0) return 0.0;
        return std::cos(y * theta / c) * k * std::exp(0.5 * y * y / c);
    };
    const double hint = mu > 0.0 ? std::sqrt(c) / mu : std::sqrt(t) + 1.0;
    const NumericResult q = integrate_line(f, hint, line);
    const double pref =
        std::exp(std::lgamma(n + 0.5) - std::lgamma(double(n))) /
        std::sqrt(M_PI) * std::exp(-0.5 * theta * theta / c) /
        std::sqrt(2.0 * M_PI * c);
    return pref * q.value;
}

// For a start at radius r0 > 0 the pair invariants of the endpoints are the
// base distance delta and the fiber offset theta + arg(1 - <w, conj w0>)
// (the connection phase picked up between the base points); the joint law
// at radius r averages the axis-start density over the base sphere of
// directions, where |<u, u0>|^2 ~ Beta(1, n-1) and the relative phase is
// uniform.
template <class F>
double ads_sphere_average(int n, double r0, double r, const Tolerance& tol,
                          const F& pair_fn) {
    const double th0 = std::tanh(r0), th = std::tanh(r);
    Tolerance mid = tol;
    mid.rel = std::max(tol.rel, 1e-7);
    auto over_phi = [&](double b) {
        const double sb = std::sqrt(b), so = std::sqrt(1.0 - b);
        auto g = [&](double phi) {
            const complex s = th0 * th * sb * std::exp(complex(0.0, phi));
            const AffinePoint w0{{complex(th0, 0.0), complex(0.0, 0.0)}};
            const AffinePoint w{
                {th * sb * std::exp(complex(0.0, phi)), complex(th * so, 0.0)}};
            return pair_fn(bergman_distance(w0, w), std::arg(1.0 - s));
        };
        return integrate_interval(g, 0.0, M_PI, mid).value / M_PI;
    };
    if (n == 1) return over_phi(1.0);
    auto h = [&](double b) {
        return double(n - 1) * std::pow(1.0 - b, double(n - 2)) * over_phi(b);
    };
    return integrate_interval(h, 0.0, 1.0, mid).value;
}

// mu-independent theta-marginal at radius r: the Gaussian theta-factor
// integrates against the cosine in closed form, and the connection phase
// drops out.
double ads_theta_marginal(int n, double t, double r0, double r,
                          const Tolerance& tol) {
    Tolerance inner = tol;
    inner.rel = std::max(tol.rel, 1e-9);
    Tolerance line = tol;
    line.rel = std::max(tol.rel, 1e-8);
    const double a =
        std::exp(std::lgamma(n + 0.5) - std::lgamma(double(n))) /
        std::sqrt(M_PI);
    return ads_sphere_average(
        n, r0, r, tol, [&](double delta, double) {
            const double chd = std::cosh(delta);
            auto f = [&](double y) {
                const double chy = std::cosh(y);
                if (chd > 1e300 / chy) return 0.0;
                return ads_invariant_kernel(n, t, std::acosh(chd * chy),
                                            inner);
            };
            return a * integrate_line(f, std::sqrt(t) + 1.0, line).value;
        });
}

}  // namespace

double ads_joint_density(int n, double mu, double t, double r0, double r,
                         double theta, const Tolerance& tol) {
    if (n < 1) throw domain_error("ads_joint_density: n must be >= 1");
    if (mu < 0.0) throw domain_error("ads_joint_density: mu must be >= 0");
    if (t <= 0.0) throw domain_error("ads_joint_density: t must be > 0");
    if (r0 < 0.0 || r < 0.0)
        throw domain_error("ads_joint_density: radii must be >= 0");
    // The base sphere is sampled over half the relative phase range (the
    // other half mirrors it), which flips the sign of the connection phase;
    // symmetrize explicitly since the offset theta breaks that evenness.
    return ads_sphere_average(
        n, r0, r, tol, [&](double delta, double a) {
            return 0.5 * (ads_pair_density(n, mu, t, delta, theta + a, tol) +
                          ads_pair_density(n, mu, t, delta, theta - a, tol));
        });
}

NumericResult ads_fiber_density_direct(int n, double mu, double t, double r0,
                                       double r, double theta,
                                       const Tolerance& tol) {
    const double num = ads_joint_density(n, mu, t, r0, r, theta, tol);
    const double marg = ads_theta_marginal(n, t, r0, r, tol);
    if (!(marg > 0.0))
        throw numeric_error("ads fiber density: vanishing theta-marginal",
                            {marg, 0.0, 0});
    return {num / marg, std::abs(num / marg) * 1e-6, 0};
}

namespace {

double median_of(std::vector<double> v) {
    if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
    std::sort(v.begin(), v.end());
    const std::size_t m = v.size() / 2;
    if (v.size() % 2 == 1) return v[m];
    return 0.5 * (v[m - 1] + v[m]);
}

// Analytic closure of the window sum per the proven tail behavior. `f` is
// the unnormalized per-index mass over [k_min, k_max].
double tail_bound(const std::vector<double>& f, int k_min, int k_max,
                  bool heavy, double window_sum) {
    auto heavy_side = [&](bool positive) {
        const int kk = positive ? k_max : -k_min;
        if (kk < 1) return 0.0;
        const int lo = std::max(1, (3 * kk) / 4);
        std::vector<double> c2;
        for (int k = lo; k <= kk; ++k) {
            const int idx = (positive ? k : -k) - k_min;
            c2.push_back(double(k) * double(k) * f[std::size_t(idx)]);
        }
        const double c = median_of(c2);
        return 2.0 * c / double(kk);
    };
    auto gaussian_side = [&](bool positive) {
        const int kk = positive ? k_max : -k_min;
        if (kk < 2) return 0.0;
        const double fk = f[std::size_t((positive ? kk : -kk) - k_min)];
        const double fk1 =
            f[std::size_t((positive ? kk - 1 : -(kk - 1)) - k_min)];
        if (fk <= 1e-12 * window_sum) return 0.0;
        const double q = fk / fk1;
        if (!(q < 0.999))
            throw numeric_error(
                "index window too narrow: no tail decay at the window edge; "
                "widen [k_min, k_max]",
                {window_sum, fk, long(f.size())});
        return 2.0 * fk * q / (1.0 - q);
    };
    if (heavy) return heavy_side(true) + heavy_side(false);
    return gaussian_side(true) + gaussian_side(false);
}

IndexDistribution finalize_distribution(std::vector<double> f, int k_min,
                                        int k_max, bool heavy,
                                        double exact_defect = -1.0) {
    double s = 0.0;
    for (double& v : f) {
        if (v < 0.0) v = 0.0;
        s += v;
    }
    if (!(s > 0.0))
        throw numeric_error("index distribution: window mass vanished",
                            {s, 0.0, long(f.size())});
    double t = exact_defect >= 0.0 ? exact_defect * s / (1.0 - exact_defect)
                                   : tail_bound(f, k_min, k_max, heavy, s);
    if (t > 0.02 * (s + t))
        throw numeric_error(
            "index window too narrow: the analytic tail bound exceeds 2% of "
            "the total mass; widen [k_min, k_max]",
            {s, t, long(f.size())});
    IndexDistribution out;
    out.k_min = k_min;
    out.k_max = k_max;
    out.probs.resize(f.size());
    for (std::size_t j = 0; j < f.size(); ++j) out.probs[j] = f[j] / s;
    out.norm_defect = t / (s + t);
    if (heavy) {
        std::vector<double> c2;
        for (bool pos : {true, false}) {
            const int kk = pos ? k_max : -k_min;
            for (int k = std::max(1, (3 * kk) / 4); k <= kk; ++k)
                c2.push_back(double(k) * double(k) *
                             out.probs[std::size_t((pos ? k : -k) - k_min)]);
        }
        out.tail_constant = median_of(c2);
    } else {
        out.tail_constant = std::numeric_limits<double>::quiet_NaN();
    }
    return out;
}

}  // namespace

IndexDistribution index_distribution(Geometry geom, const BridgeSpec& bridge,
                                     int k_min, int k_max,
                                     const Tolerance& tol) {
    const Geometry g = geom.canonical();
    g.validate();
    if (k_min > 0 || k_max < 0 || k_min >= k_max)
        throw domain_error("index window must satisfy k_min <= 0 <= k_max");
    const double theta = reduce_angle(bridge.theta);

    if (g.kind == Geometry::Kind::Plane) {
        if (bridge.r != bridge.r0 || theta != 0.0)
            throw domain_error(
                "plane: only the loop case (r = r0, theta = 0) has a stated "
                "index law");
        if (bridge.r0 <= 0.0 || bridge.t <= 0.0)
            throw domain_error("plane: need r0 > 0 and t > 0");
        const double rp = bridge.r0 * bridge.r0 / bridge.t;
        std::vector<double> f(std::size_t(k_max - k_min + 1));
        for (int k = k_min; k <= k_max; ++k)
            f[std::size_t(k - k_min)] = planar_index(rp, k, tol);
        double s = 0.0;
        for (double v : f) s += v;
        // the planar law is exactly normalized over all of Z
        return finalize_distribution(std::move(f), k_min, k_max, true,
                                     std::max(0.0, 1.0 - s));
    }

    auto cc = std::make_shared<ConditionalCf>(g, bridge.r0, bridge.r,
                                              bridge.t, tol);
    double extra = 0.0;
    const RealFn cf = inversion_cf(cc, tol, extra);
    std::vector<double> thetas(std::size_t(k_max - k_min + 1));
    for (int k = k_min; k <= k_max; ++k)
        thetas[std::size_t(k - k_min)] = theta + 2.0 * M_PI * k;
    const std::vector<NumericResult> res = invert_cf_grid(cf, thetas, tol);
    std::vector<double> f(res.size());
    for (std::size_t j = 0; j < res.size(); ++j) f[j] = res[j].value;
    return finalize_distribution(std::move(f), k_min, k_max, g.heavy_tails());
}

complex bridge_cf(Geometry geom, double lambda, const BridgeSpec& bridge,
                  const Tolerance& tol) {
    const Geometry g = geom.canonical();
    if (g.canonical().kind == Geometry::Kind::Plane)
        throw domain_error("bridge_cf: the plane has no fiber CF");
    ConditionalCf cc(g, bridge.r0, bridge.r, bridge.t, tol);
    const double theta = reduce_angle(bridge.theta);

    auto poisson_sum = [&](double shift) -> complex {
        complex sum = cc(shift);
        double peak = std::abs(sum.real());
        for (int dir : {1, -1}) {
            int streak = 0;
            for (int k = dir; std::abs(k) <= 300; k += dir) {
                const double v = cc(shift + k);
                peak = std::max(peak, v);
                sum += std::exp(complex(0.0, -k * theta)) * v;
                if (v < 1e-16 * std::max(peak, 1e-300)) {
                    if (++streak >= 3) break;
                } else {
                    streak = 0;
                }
            }
        }
        return sum;
    };

    const complex num = poisson_sum(lambda);
    const complex den = poisson_sum(0.0);
    if (std::abs(den) <= 0.0)
        throw numeric_error("bridge_cf: vanishing Poisson denominator",
                            {0.0, 0.0, 0});
    return num / den;
}

double sl2_loop_weight(double t, double mu, int k, const Tolerance& tol) {
    if (t <= 0.0) throw domain_error("sl2 loop: t must be > 0");
    if (mu < 0.0) throw domain_error("sl2 loop: mu must be >= 0");
    const double c = (1.0 + mu * mu) * t;
    const double freq = 2.0 * M_PI * k / c;
    auto f = [&](double y) {
        const double shape = std::abs(y) < 1e-8 ? 1.0 : y / std::sinh(y);
        return std::cos(freq * y) * shape *
               std::exp(-0.5 * mu * mu * y * y / c);
    };
    const double hint = mu > 0.0 ? std::sqrt(c) / mu : 5.0;
    const NumericResult q = integrate_line(f, hint, tol);
    const double expo = -2.0 * M_PI * M_PI * k * double(k) / c;
    return expo < -745.0 ? 0.0 : std::exp(expo) * q.value;
}

double sl2_loop_weight_mu0(double t, int k) {
    if (t <= 0.0) throw domain_error("sl2 loop: t must be > 0");
    const double ak = std::abs(double(k));
    const double x = 2.0 * M_PI * M_PI * ak / t;
    // 1 + cosh(x) = e^x (1 + e^{-x})^2 / 2, overflow-safe in log form
    const double log_den =
        x - std::log(2.0) + 2.0 * std::log1p(std::exp(-x));
    const double expo = -x * ak - log_den;
    return expo < -745.0 ? 0.0 : M_PI * M_PI * std::exp(expo);
}

double sl2_loop_log_weight(double t, double mu, int k, const Tolerance& tol) {
    if (t <= 0.0) throw domain_error("sl2 loop: t must be > 0");
    if (mu <= 0.0)
        throw domain_error("sl2 log weight: mu must be > 0 (use the closed "
                           "form at mu = 0)");
    const double c = (1.0 + mu * mu) * t;
    const double a = 2.0 * M_PI * std::abs(double(k)) / c;
    const double g = 0.5 * c / (mu * mu);  // Gaussian stiffness in xi
    auto log_cosh_term = [](double xi) {
        // ln(1 + cosh(pi xi))
        const double x = std::abs(M_PI * xi);
        return x - std::log(2.0) + 2.0 * std::log1p(std::exp(-x));
    };
    auto phi = [&](double xi) {
        return g * (a - xi) * (a - xi) + log_cosh_term(xi);
    };
    // locate the minimizer of the exponent by ternary search on [0, a+2]
    double lo = 0.0, hi = a + 2.0;
    for (int i = 0; i < 200; ++i) {
        const double m1 = lo + (hi - lo) / 3.0, m2 = hi - (hi - lo) / 3.0;
        if (phi(m1) < phi(m2))
            hi = m2;
        else
            lo = m1;
    }
    const double xs = 0.5 * (lo + hi);
    const double ps = phi(xs);
    const double span = 10.0 / std::sqrt(g) + 10.0 / M_PI;
    auto f = [&](double xi) { return std::exp(-(phi(xi) - ps)); };
    Tolerance qt = tol;
    qt.rel = std::max(tol.rel, 1e-10);
    const NumericResult q =
        integrate_interval(f, xs - span, xs + span, qt);
    return -0.5 * a * a * c + std::log(0.5 * M_PI) +
           0.5 * std::log(M_PI / (mu * mu / (2.0 * c))) - ps +
           std::log(q.value);
}

IndexDistribution sl2_loop_index(double t, double mu, int k_min, int k_max,
                                 const Tolerance& tol) {
    if (k_min > 0 || k_max < 0 || k_min >= k_max)
        throw domain_error("index window must satisfy k_min <= 0 <= k_max");
    // the weights are even in k; compute once per |k|, switching to the
    // log-stable route once the direct oscillatory integral sinks into
    // roundoff noise relative to the k = 0 weight
    const int kk_max = std::max(k_max, -k_min);
    std::vector<double> w(std::size_t(kk_max) + 1);
    w[0] = sl2_loop_weight(t, mu, 0, tol);
    for (int kk = 1; kk <= kk_max; ++kk) {
        double v = sl2_loop_weight(t, mu, kk, tol);
        if (v < 1e-10 * w[0]) {
            if (mu > 0.0) {
                const double lw = sl2_loop_log_weight(t, mu, kk, tol);
                v = lw < -745.0 ? 0.0 : std::exp(lw);
            } else {
                v = sl2_loop_weight_mu0(t, kk);
            }
        }
        w[std::size_t(kk)] = v;
    }
    std::vector<double> f(std::size_t(k_max - k_min + 1));
    for (int k = k_min; k <= k_max; ++k)
        f[std::size_t(k - k_min)] = w[std::size_t(std::abs(k))];
    return finalize_distribution(std::move(f), k_min, k_max, false);
}

double planar_index(double r_param, int k, const Tolerance& tol) {
    if (r_param <= 0.0) throw domain_error("planar_index: r_param must be > 0");
    if (k == 0)
        return 1.0 -
               2.0 * std::exp(-r_param) * yor_phi(r_param, M_PI, tol);
    const double ak = std::abs(double(k));
    return std::exp(-r_param) *
           (yor_phi(r_param, (2.0 * ak - 1.0) * M_PI, tol) -
            yor_phi(r_param, (2.0 * ak + 1.0) * M_PI, tol));
}

double ch1_longtime_index(double r0, double r, double theta, int k,
                          const Tolerance& tol) {
    if (r0 <= 0.0 || r <= 0.0)
        throw domain_error("ch1 long-time law: radial arguments must be > 0");
    theta = reduce_angle(theta);
    const double x = theta + 2.0 * M_PI * k;
    const double shr2 = std::sinh(r) * std::sinh(r);
    const double shr02 = std::sinh(r0) * std::sinh(r0);
    const double c0 = std::log(std::tanh(r0) * std::tanh(r));

    Tolerance inner = tol;
    inner.rel = std::max(tol.rel, 1e-9);
    Tolerance outer = tol;
    outer.rel = std::max(tol.rel, 1e-8);

    auto over_u = [&](double phi) {
        const double su = std::sin(phi), cu = std::cos(phi);
        const double l1mu = 2.0 * std::log(cu);
        const double wu = 1.0 / std::sqrt(1.0 + su * su * shr02);
        auto over_v = [&](double psi) {
            const double sv = std::sin(psi), cv = std::cos(psi);
            const double L = c0 + l1mu + 2.0 * std::log(cv);
            return (-L) / (L * L + x * x) /
                   std::sqrt(1.0 + sv * sv * shr2);
        };
        return wu * integrate_interval(over_v, 0.0, M_PI_2, inner).value;
    };
    const double dbl =
        4.0 * integrate_interval(over_u, 0.0, M_PI_2, outer).value;

    const AffinePoint w0{{complex(std::tanh(r0), 0.0)}};
    const AffinePoint w{{std::tanh(r) * std::exp(complex(0.0, theta))}};
    const double d = bergman_distance(w0, w);
    const double phi0 = spherical_fn({0.0, 0.0}, 0.0, d);
    return 2.0 / (M_PI * M_PI * phi0) * dbl;
}

double limit_cf(Geometry geom, double lambda) {
    const Geometry g = geom.canonical();
    g.validate();
    const double lam = std::abs(lambda);
    switch (g.kind) {
        case Geometry::Kind::CP1:
            return std::exp(-2.0 * lam);
        case Geometry::Kind::Sphere:
            return std::exp(-double(g.n) * lam);
        case Geometry::Kind::AdS:
            return std::exp(-0.5 * lam * lam * (1.0 + g.mu * g.mu));
        default:
            throw domain_error(
                "limit_cf: no rescaled limit law for this geometry");
    }
}

double mu_convolution_check(int n, double mu, double r0, double r, double t,
                            double theta, const Tolerance& tol) {
    if (mu <= 0.0)
        throw domain_error("mu_convolution_check: mu must be > 0");
    const Geometry gmu = Geometry::sphere(n, mu);
    const Geometry g0 = Geometry::sphere(n, 0.0);
    const double lhs = fiber_density(gmu, r0, r, t, theta, tol).value;

    const double sigma = mu * std::sqrt(t);
    auto cc0 = std::make_shared<ConditionalCf>(g0, r0, r, t, tol);
    double extra = 0.0;
    const RealFn cf0 = inversion_cf(cc0, tol, extra);
    if (sigma < 1e-5) {
        return std::abs(lhs - invert_cf(cf0, theta, tol).value);
    }
    Tolerance inner = tol;
    inner.rel = std::max(tol.rel, 1e-8);
    Tolerance outer = tol;
    outer.rel = std::max(tol.rel, 1e-7);
    outer.abs = std::max(tol.abs, 1e-9);
    auto g = [&](double eta) {
        const double z = (theta - eta) / sigma;
        return std::exp(-0.5 * z * z) / (sigma * std::sqrt(2.0 * M_PI)) *
               invert_cf(cf0, eta, inner).value;
    };
    const double rhs =
        integrate_interval(g, theta - 8.0 * sigma, theta + 8.0 * sigma, outer)
            .value;
    return std::abs(lhs - rhs);
}

}  // namespace loopwind

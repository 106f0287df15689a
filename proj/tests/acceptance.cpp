// Acceptance gate: one line per criterion, nonzero exit on any failure.
#include <cmath>
#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include "loopwind/kernels.hpp"
#include "loopwind/laws.hpp"
#include "loopwind/mc.hpp"
#include "loopwind/quadrature.hpp"

using namespace loopwind;

namespace {

int g_failures = 0;
std::string g_detail;

void note(const char* fmt, double a, double b) {
    char buf[160];
    std::snprintf(buf, sizeof(buf), fmt, a, b);
    if (!g_detail.empty()) g_detail += "; ";
    g_detail += buf;
}

bool close_rel(double got, double want, double eps, double floor = 0.0) {
    const double scale = std::max(std::abs(want), floor);
    if (std::abs(got - want) <= eps * scale) return true;
    note("got %.10g want %.10g", got, want);
    return false;
}

template <class Body>
void criterion(int id, const char* desc, Body&& body) {
    bool ok = false;
    g_detail.clear();
    try {
        ok = body();
    } catch (const std::exception& e) {
        g_detail = std::string("exception: ") + e.what();
    }
    if (ok) {
        std::printf("[PASS] criterion %d: %s\n", id, desc);
    } else {
        std::printf("[FAIL] criterion %d: %s%s%s\n", id, desc,
                    g_detail.empty() ? "" : " -- ", g_detail.c_str());
        ++g_failures;
    }
    std::fflush(stdout);
}

double moment(const IndexDistribution& d, double scale, int order) {
    double s = 0.0;
    for (int k = d.k_min; k <= d.k_max; ++k)
        s += d.prob(k) * std::pow(scale * k, order);
    return s;
}

struct Tuple {
    Geometry geom;
    double r0, r, t;
};

std::vector<Tuple> canonical_tuples() {
    return {{Geometry::cp1(), 0.6, 0.9, 0.8},
            {Geometry::sphere(1, 1.0), 0.4, 0.7, 0.8},
            {Geometry::sphere(2, 0.5), 0.4, 0.7, 0.8},
            {Geometry::ch1(), 0.7, 1.1, 1.0},
            {Geometry::ads(1, 0.5), 1.0, 0.9, 1.0},
            {Geometry::sl2(1.0), 0.5, 0.5, 1.0}};
}

SimConfig sim(long paths, std::uint64_t seed, double dt) {
    SimConfig c;
    c.n_paths = paths;
    c.seed = seed;
    c.dt = dt;
    c.threads = 0;
    return c;
}

}  // namespace

int main() {
    criterion(1, "residue identity for the cos * y/sinh(y) line integral",
              [] {
                  for (double a : {0.0, 0.5, 1.0, 2.0}) {
                      auto f = [a](double y) {
                          const double s =
                              std::abs(y) < 1e-8 ? 1.0 : y / std::sinh(y);
                          return std::cos(a * y) * s;
                      };
                      const double want =
                          M_PI * M_PI / (1.0 + std::cosh(M_PI * a));
                      if (!close_rel(integrate_line(f, 2.0).value, want,
                                     1e-8))
                          return false;
                  }
                  return true;
              });

    criterion(2, "SL(2,R) mu = 0 loop law: integral route vs closed form",
              [] {
                  for (double t : {1.0, 4.0, 16.0}) {
                      std::vector<double> wi(11), wc(11);
                      double si = 0.0, sc = 0.0;
                      for (int k = -5; k <= 5; ++k) {
                          wi[std::size_t(k + 5)] =
                              sl2_loop_weight(t, 0.0, std::abs(k));
                          wc[std::size_t(k + 5)] =
                              sl2_loop_weight_mu0(t, std::abs(k));
                          si += wi[std::size_t(k + 5)];
                          sc += wc[std::size_t(k + 5)];
                      }
                      for (int i = 0; i < 11; ++i) {
                          const double pi_ = wi[std::size_t(i)] / si;
                          const double pc = wc[std::size_t(i)] / sc;
                          if (std::abs(pi_ - pc) >
                              1e-8 * std::max(pc, 1e-13)) {
                              note("got %.10g want %.10g", pi_, pc);
                              return false;
                          }
                      }
                  }
                  return true;
              });

    criterion(3, "Gaussian limit of the Berger-sphere index at L = 100",
              [] {
                  const IndexDistribution d =
                      sl2_loop_index(100.0, 1.0, -20, 20);
                  const double scale =
                      2.0 * M_PI / std::sqrt(2.0 * 100.0);
                  const double var = moment(d, scale, 2);
                  const double skew =
                      moment(d, scale, 3) / std::pow(var, 1.5);
                  if (var < 0.95 || var > 1.05) {
                      note("variance %.6g (want within [0.95,1.05] of %g)",
                           var, 1.0);
                      return false;
                  }
                  if (std::abs(skew) > 0.02) {
                      note("skewness %.3g limit %.3g", skew, 0.02);
                      return false;
                  }
                  return true;
              });

    criterion(4, "kernel normalization and Chapman-Kolmogorov, both families",
              [] {
                  Tolerance q;
                  q.rel = 1e-8;
                  for (auto [a, b] :
                       {std::pair{0.0, 0.0}, {0.5, 1.7}, {1.0, 0.0}}) {
                      const CompactKernelParams p{a, b};
                      auto f = [&](double r) {
                          return compact_jacobi_kernel(p, 0.5, 0.6, r);
                      };
                      if (!close_rel(
                              integrate_interval(f, 0.0, M_PI_2, q).value,
                              1.0, 1e-6))
                          return false;
                      auto g = [&](double u) {
                          return compact_jacobi_kernel(p, 0.3, 0.6, u) *
                                 compact_jacobi_kernel(p, 0.5, u, 1.0);
                      };
                      if (!close_rel(
                              integrate_interval(g, 0.0, M_PI_2, q).value,
                              compact_jacobi_kernel(p, 0.8, 0.6, 1.0), 1e-5))
                          return false;
                  }
                  for (auto [a, b] :
                       {std::pair{0.0, 0.0}, {0.5, -0.5}, {1.0, -1.0}}) {
                      const HyperbolicKernelParams p{a, b};
                      auto f = [&](double r) {
                          return hyperbolic_jacobi_kernel(p, 0.5, 0.8, r);
                      };
                      if (!close_rel(
                              integrate_interval(f, 0.0, 14.0, q).value,
                              1.0, 1e-6))
                          return false;
                      auto g = [&](double u) {
                          return hyperbolic_jacobi_kernel(p, 0.3, 0.6, u) *
                                 hyperbolic_jacobi_kernel(p, 0.5, u, 1.0);
                      };
                      if (!close_rel(
                              integrate_interval(g, 0.0, 14.0, q).value,
                              hyperbolic_jacobi_kernel(p, 0.8, 0.6, 1.0),
                              1e-5))
                          return false;
                  }
                  return true;
              });

    criterion(5, "3-D hyperbolic closed form on a 3x3 grid", [] {
        for (double t : {0.5, 1.0, 2.0})
            for (double y : {0.5, 1.5, 3.0}) {
                const double want = std::sqrt(2.0 / M_PI) *
                                    std::exp(-0.5 * t) *
                                    (y / std::pow(t, 1.5)) *
                                    std::exp(-0.5 * y * y / t) * std::sinh(y);
                if (!close_rel(
                        hyperbolic_jacobi_kernel({0.5, -0.5}, t, 0.0, y),
                        want, 1e-8))
                    return false;
            }
        return true;
    });

    criterion(6, "long-time kernel asymptotics at t = 50 and t = 200", [] {
        for (auto [a, b] :
             {std::pair{0.0, 0.0}, {0.5, -0.5}, {1.0, -1.0}}) {
            const HyperbolicKernelParams p{a, b};
            const double r50 =
                hyperbolic_jacobi_kernel(p, 50.0, 0.8, 1.2) /
                hyperbolic_kernel_asymptotic(p, 50.0, 0.8, 1.2);
            const double r200 =
                hyperbolic_jacobi_kernel(p, 200.0, 0.8, 1.2) /
                hyperbolic_kernel_asymptotic(p, 200.0, 0.8, 1.2);
            if (std::abs(r50 - 1.0) > 0.02 ||
                std::abs(r200 - 1.0) > 0.005) {
                note("ratios %.5g %.5g", r50, r200);
                return false;
            }
        }
        return true;
    });

    criterion(7, "CF axioms and bridge lattice shift across all geometries",
              [] {
                  for (const Tuple& c : canonical_tuples()) {
                      ConditionalCf cf(c.geom, c.r0, c.r, c.t);
                      if (cf(0.0) != 1.0) return false;
                      if (std::abs(cf(1.7) - cf(-1.7)) > 1e-12) return false;
                      for (double lam : {0.5, 1.0, 2.5, 5.0}) {
                          const double v = cf(lam);
                          if (!(v > 0.0 && v <= 1.0)) {
                              note("cf(%g) = %.6g", lam, v);
                              return false;
                          }
                      }
                      const BridgeSpec b{c.r0, c.r, 1.2, c.t};
                      const complex base = bridge_cf(c.geom, 0.3, b);
                      for (int m : {1, 2, -1}) {
                          const complex want =
                              std::exp(complex(0.0, m * b.theta)) * base;
                          if (std::abs(bridge_cf(c.geom, 0.3 + m, b) -
                                       want) > 1e-8)
                              return false;
                      }
                  }
                  return true;
              });

    criterion(8, "distribution axioms and the absolute-form normalization",
              [] {
                  // window normalization + loop evenness
                  const IndexDistribution heavy = index_distribution(
                      Geometry::cp1(), {0.6, 0.6, 0.0, 0.8}, -2200, 2200);
                  const IndexDistribution berger = index_distribution(
                      Geometry::sphere(1, 1.0), {0.4, 0.4, 0.0, 0.8}, -2200,
                      2200);
                  const IndexDistribution gauss = index_distribution(
                      Geometry::ads(1, 0.5), {1.0, 1.0, 0.0, 1.0}, -12, 12);
                  for (const IndexDistribution* d :
                       {&heavy, &berger, &gauss}) {
                      if (d->norm_defect > 1e-4) {
                          note("norm defect %.3g limit %.3g", d->norm_defect,
                               1e-4);
                          return false;
                      }
                      for (int k = 1; k <= std::min(d->k_max, 8); ++k)
                          if (!close_rel(d->prob(k), d->prob(-k), 1e-6))
                              return false;
                  }

                  // absolute form of the projective-line bridge law: the
                  // stated prefactor times the wrapped fiber density must be
                  // a probability (sum to one)
                  const double r0 = 0.6, r = 0.9, theta = 1.0, t = 0.8;
                  const AffinePoint w0{{std::tan(r0)}};
                  const AffinePoint w{
                      {std::tan(r) * std::exp(complex(0.0, theta))}};
                  const double d01 = fs_distance(w0, w);
                  ConditionalCf cf(Geometry::cp1(), r0, r, t);
                  const int K = 150;
                  std::vector<double> thetas;
                  for (int n = -K; n <= K; ++n)
                      thetas.push_back(theta + 2.0 * M_PI * n);
                  const auto dens =
                      invert_cf_grid([&](double l) { return cf(l); }, thetas);
                  double wrapped = 0.0;
                  for (const NumericResult& q : dens) wrapped += q.value;
                  // close the two-sided x^-2 tail from the edge values
                  wrapped += dens.front().value * std::abs(thetas.front()) /
                             (2.0 * M_PI);
                  wrapped += dens.back().value * std::abs(thetas.back()) /
                             (2.0 * M_PI);
                  const double pref =
                      2.0 * M_PI *
                      (std::sin(2.0 * d01) / std::sin(2.0 * r)) *
                      (compact_jacobi_kernel({0.0, 0.0}, t, r0, r) /
                       compact_jacobi_kernel({0.0, 0.0}, t, 0.0, d01));
                  return close_rel(pref * wrapped, 1.0, 1e-3);
              });

    criterion(9, "index tail laws: 1/k^2 family and Gaussian family", [] {
        // k^2 P(k) stable over [20, 40] for the Cauchy-tail bridges
        const std::vector<std::pair<Geometry, BridgeSpec>> heavy = {
            {Geometry::cp1(), {0.6, 0.9, 1.0, 0.8}},
            {Geometry::ch1(), {0.7, 1.1, 1.0, 1.0}},
            {Geometry::sphere(1, 1.0), {0.4, 0.7, 1.0, 0.8}}};
        for (const auto& [g, b] : heavy) {
            const IndexDistribution d = index_distribution(g, b, -45, 45);
            double lo = 1e300, hi = 0.0;
            for (int k = 20; k <= 40; k += 5) {
                const double c = double(k) * double(k) * d.prob(k);
                lo = std::min(lo, c);
                hi = std::max(hi, c);
            }
            if (hi / lo - 1.0 > 0.10) {
                note("k^2 P(k) spread %.4g limit %.4g", hi / lo - 1.0, 0.10);
                return false;
            }
        }
        // ln P concave and quadratic for the Gaussian-tail family
        const IndexDistribution sl2 = sl2_loop_index(100.0, 1.0, -45, 45);
        const IndexDistribution ads = index_distribution(
            Geometry::ads(1, 1.0), {0.5, 0.5, 0.0, 2000.0}, -60, 60);
        for (const IndexDistribution* d : {&sl2, &ads}) {
            // least-squares quadratic fit of ln P over k in [20, 40]
            std::vector<double> ks, ys;
            for (int k = 20; k <= 40; ++k) {
                ks.push_back(double(k));
                ys.push_back(std::log(d->prob(k)));
            }
            double s[5] = {0, 0, 0, 0, 0}, m[3] = {0, 0, 0};
            for (std::size_t i = 0; i < ks.size(); ++i) {
                double p = 1.0;
                for (int j = 0; j < 5; ++j) {
                    s[j] += p;
                    if (j < 3) m[j] += p * ys[i];
                    p *= ks[i];
                }
            }
            // solve the 3x3 normal equations by Cramer's rule
            const double A[9] = {s[0], s[1], s[2], s[1], s[2],
                                 s[3], s[2], s[3], s[4]};
            auto det3 = [](const double* M) {
                return M[0] * (M[4] * M[8] - M[5] * M[7]) -
                       M[1] * (M[3] * M[8] - M[5] * M[6]) +
                       M[2] * (M[3] * M[7] - M[4] * M[6]);
            };
            const double D = det3(A);
            double coef[3];
            for (int c = 0; c < 3; ++c) {
                double M[9];
                for (int i = 0; i < 9; ++i) M[i] = A[i];
                for (int rr = 0; rr < 3; ++rr) M[rr * 3 + c] = m[rr];
                coef[c] = det3(M) / D;
            }
            if (!(coef[2] < 0.0)) {
                note("quadratic coefficient %.4g (want < %g)", coef[2], 0.0);
                return false;
            }
            for (std::size_t i = 0; i < ks.size(); ++i) {
                const double fit =
                    coef[0] + coef[1] * ks[i] + coef[2] * ks[i] * ks[i];
                if (std::abs(ys[i] - fit) > 0.02 * std::abs(ys[i])) {
                    note("ln P fit residual %.4g at k = %g",
                         std::abs(ys[i] - fit) / std::abs(ys[i]), ks[i]);
                    return false;
                }
            }
        }
        return true;
    });

    criterion(10, "fiber-speed convolution identity on the Berger sphere",
              [] {
                  const double res =
                      mu_convolution_check(1, 1.0, 0.4, 0.7, 0.8, 1.0);
                  if (res > 1e-4) {
                      note("residual %.3g limit %.3g", res, 1e-4);
                      return false;
                  }
                  return true;
              });

    criterion(11, "CH1 fiber density: inversion vs nested quadrature", [] {
        const double a1 =
            fiber_density(Geometry::ch1(), 0.7, 1.1, 1.0, 2.0).value;
        const double b1 = ch1_fiber_density_triple(0.7, 1.1, 1.0, 2.0).value;
        if (!close_rel(a1, b1, 1e-4)) return false;
        const double a2 =
            fiber_density(Geometry::ch1(), 0.5, 0.8, 1.0, 0.7).value;
        const double b2 = ch1_fiber_density_triple(0.5, 0.8, 1.0, 0.7).value;
        return close_rel(a2, b2, 1e-4);
    });

    criterion(12, "CH1 long-time index law vs the finite-t law at t = 60",
              [] {
                  const IndexDistribution d = index_distribution(
                      Geometry::ch1(), {0.7, 1.1, 1.0, 60.0}, -400, 400);
                  for (int k : {0, 1, 2}) {
                      const double lim = ch1_longtime_index(0.7, 1.1, 1.0, k);
                      if (!close_rel(d.prob(k), lim, 0.05)) return false;
                  }
                  return true;
              });

    criterion(13, "limiting rescaled CFs: Cauchy and Gaussian regimes", [] {
        const double t = 80.0;
        const complex cp =
            bridge_cf(Geometry::cp1(), 1.0 / t, {0.6, 0.6, 0.0, t});
        if (!close_rel(cp.real(), std::exp(-2.0), 0.05)) return false;
        const complex sp =
            bridge_cf(Geometry::sphere(2, 1.0), 1.0 / t, {0.4, 0.4, 0.0, t});
        if (!close_rel(sp.real(), std::exp(-2.0), 0.05)) return false;
        const double ta = 100.0;
        const IndexDistribution d = index_distribution(
            Geometry::ads(1, 0.5), {0.5, 0.5, 0.0, ta}, -16, 16);
        const double var = moment(d, 2.0 * M_PI / std::sqrt(ta), 2);
        return close_rel(var, 1.25, 0.05);
    });

    criterion(14, "Monte Carlo concordance across the geometries", [] {
        struct Case {
            Geometry geom;
            double r0, r, t;
            std::uint64_t seed;
        };
        const std::vector<Case> cases = {
            {Geometry::cp1(), 0.6, 0.9, 0.8, 101},
            {Geometry::ch1(), 0.7, 1.1, 1.0, 102},
            {Geometry::sphere(1, 1.0), 0.4, 0.7, 0.8, 103},
            {Geometry::ads(1, 1.0), 1.0, 0.9, 1.0, 104}};
        for (const Case& c : cases) {
            const double ana =
                conditional_cf(c.geom, 1.0, c.r0, c.r, c.t);
            const CfEstimate est = estimate_conditional_cf(
                c.geom, 1.0, c.r0, c.r, c.t, sim(100000, c.seed, 1e-3));
            if (std::abs(est.value.real() - ana) > 3.0 * est.stderr_est) {
                note("empirical %.5g analytic %.5g", est.value.real(), ana);
                return false;
            }
        }
        {
            // plane: Bessel-ratio conditional CF
            const double x = 1.0 * 1.0 / 1.0;
            const double ana =
                std::cyl_bessel_i(1.0, x) / std::cyl_bessel_i(0.0, x);
            const CfEstimate est = estimate_conditional_cf(
                Geometry::plane(), 1.0, 1.0, 1.0, 1.0,
                sim(100000, 105, 1e-3));
            if (std::abs(est.value.real() - ana) > 3.0 * est.stderr_est) {
                note("empirical %.5g analytic %.5g", est.value.real(), ana);
                return false;
            }
        }
        {
            // loop index on SL(2,R); the simulation cannot start at the
            // fixed point r0 = 0, so compare at a small-radius loop where
            // both routes are well defined
            const BridgeSpec loop{0.4, 0.4, 0.0, 4.0};
            const IndexDistribution ana =
                index_distribution(Geometry::sl2(1.0), loop, -6, 6);
            SimConfig cfg = sim(200000, 106, 2e-3);
            cfg.bin_halfwidth = 0.12;
            cfg.angular_halfwidth = 0.25;
            const EmpiricalIndexDistribution emp = estimate_index_distribution(
                Geometry::sl2(1.0), loop, cfg, -4, 4);
            for (int k = -2; k <= 2; ++k) {
                const double se = emp.stderrs[std::size_t(k - emp.k_min)];
                if (std::abs(emp.prob(k) - ana.prob(k)) > 3.0 * se) {
                    note("empirical %.5g analytic %.5g", emp.prob(k),
                         ana.prob(k));
                    return false;
                }
            }
        }
        {
            // planar loop vs the exact lattice law at r_param = 1
            SimConfig cfg = sim(200000, 107, 1e-3);
            cfg.bin_halfwidth = 0.05;
            cfg.angular_halfwidth = 0.2;
            const EmpiricalIndexDistribution emp = estimate_index_distribution(
                Geometry::plane(), {1.0, 1.0, 0.0, 1.0}, cfg, -5, 5);
            for (int k = -3; k <= 3; ++k) {
                const double se = emp.stderrs[std::size_t(k - emp.k_min)];
                if (std::abs(emp.prob(k) - planar_index(1.0, k)) >
                    3.0 * se) {
                    note("empirical %.5g analytic %.5g", emp.prob(k),
                         planar_index(1.0, k));
                    return false;
                }
            }
        }
        return true;
    });

    criterion(15, "AdS joint density integrates to the radial marginal", [] {
        const int n = 1;
        const double mu = 1.0, t = 1.0, r0 = 0.5, r = 0.9;
        Tolerance q;
        q.rel = 1e-6;
        auto f = [&](double th) {
            return ads_joint_density(n, mu, t, r0, r, th, q);
        };
        const double mass =
            2.0 * integrate_interval(f, 0.0, 12.0, q).value *
            std::sinh(r) * std::cosh(r);
        const double want = hyperbolic_jacobi_kernel({0.0, 0.0}, t, r0, r);
        return close_rel(mass, want, 1e-3);
    });

    std::printf("%d/15 criteria passed\n", 15 - g_failures);
    return g_failures == 0 ? 0 : 1;
}

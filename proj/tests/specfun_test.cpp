#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>

#include "loopwind/quadrature.hpp"
#include "loopwind/specfun.hpp"

using namespace loopwind;

TEST_CASE("log_gamma known values") {
    CHECK(std::abs(log_gamma(1.0)) < 1e-14);
    CHECK(std::abs(log_gamma(0.5).real() - 0.5 * std::log(M_PI)) < 1e-14);
    CHECK(std::abs(log_gamma(0.5).imag()) < 1e-14);
}

TEST_CASE("log_gamma duplication formula at z = 0.75") {
    const complex z = 0.75;
    const complex lhs = log_gamma(2.0 * z) + 0.5 * std::log(M_PI);
    const complex rhs = (2.0 * z - 1.0) * std::log(2.0) + log_gamma(z) +
                        log_gamma(z + 0.5);
    CHECK(std::abs(std::exp(lhs) - std::exp(rhs)) <
          1e-12 * std::abs(std::exp(lhs)));
}

TEST_CASE("log_gamma rejects poles") {
    CHECK_THROWS_AS(log_gamma(0.0), domain_error);
    CHECK_THROWS_AS(log_gamma(-3.0), domain_error);
}

TEST_CASE("jacobi_poly normalization at x = 1") {
    for (double alpha : {0.0, 0.5, 2.3})
        for (double beta : {0.0, 1.7})
            for (int m = 0; m <= 5; ++m) {
                const double expect =
                    std::exp(std::lgamma(m + alpha + 1.0) -
                             std::lgamma(m + 1.0) - std::lgamma(alpha + 1.0));
                CHECK(jacobi_poly(m, {alpha, beta}, 1.0) ==
                      doctest::Approx(expect).epsilon(1e-12));
            }
}

TEST_CASE("jacobi_poly degree zero and P_2^{0,0}(0)") {
    CHECK(jacobi_poly(0, {1.3, 0.4}, -0.7) == 1.0);
    CHECK(jacobi_poly(2, {0.0, 0.0}, 0.0) ==
          doctest::Approx(-0.5).epsilon(1e-14));
}

TEST_CASE("jacobi recurrence agrees with terminating sum") {
    for (double alpha : {0.0, 0.5, 2.3})
        for (double beta : {0.0, 0.3, 1.7})
            for (double x : {-0.9, -0.3, 0.0, 0.4, 0.95})
                for (int m = 0; m <= 10; ++m) {
                    const double a = jacobi_poly(m, {alpha, beta}, x);
                    const double b =
                        jacobi_poly_recurrence(m, {alpha, beta}, x);
                    // the terminating sum cancels near the sign changes, so
                    // allow a small absolute floor there
                    CHECK(std::abs(a - b) <=
                          1e-10 * std::max(1.0, std::abs(b)));
                }
}

TEST_CASE("gegenbauer normalization and Legendre specialization") {
    for (double alpha : {0.0, 1.25})
        for (int m = 0; m <= 5; ++m) {
            const double expect =
                std::exp(std::lgamma(2.0 * alpha + 1.0 + m) -
                         std::lgamma(2.0 * alpha + 1.0) -
                         std::lgamma(m + 1.0));
            CHECK(gegenbauer_poly(m, alpha, 1.0) ==
                  doctest::Approx(expect).epsilon(1e-12));
        }
    CHECK(gegenbauer_poly(0, 0.8, -0.2) == 1.0);
    // C_3^{1/2}(0.4) = Legendre P_3(0.4) = -0.44
    CHECK(gegenbauer_poly(3, 0.0, 0.4) ==
          doctest::Approx(-0.44).epsilon(1e-12));
}

TEST_CASE("gegenbauer integral representation") {
    // m = 0: the integral is the Beta integral sqrt(pi)G(a+1/2)/G(a+1)
    CHECK(gegenbauer_via_integral(0, 0.0, 0.5).value ==
          doctest::Approx(M_PI).epsilon(1e-10));
    const double a = 1.25;
    const double beta = std::sqrt(M_PI) *
                        std::exp(std::lgamma(a + 0.5) - std::lgamma(a + 1.0));
    CHECK(gegenbauer_via_integral(0, a, 1.1).value ==
          doctest::Approx(beta).epsilon(1e-10));
    // general m: equals the ratio formula
    for (int m : {1, 4, 8})
        for (double alpha : {0.0, 0.5, 1.5})
            for (double r : {0.3, 0.7, 1.2}) {
                const double lhs = gegenbauer_via_integral(m, alpha, r).value;
                const double rhs =
                    std::sqrt(M_PI) *
                    std::exp(std::lgamma(alpha + 0.5) -
                             std::lgamma(alpha + 1.0)) *
                    gegenbauer_poly(m, alpha, std::cos(2.0 * r)) /
                    gegenbauer_poly(m, alpha, 1.0);
                CHECK(lhs == doctest::Approx(rhs).epsilon(1e-9));
            }
}

TEST_CASE("gauss_2f1 basics") {
    CHECK(gauss_2f1(complex(0.3, 1.1), 0.7, 1.5, 0.0) == complex(1.0));
    CHECK_THROWS_AS(gauss_2f1(1.0, 1.0, -2.0, -0.5), domain_error);
    CHECK_THROWS_AS(gauss_2f1(1.0, 1.0, 1.0, 0.5), domain_error);
}

TEST_CASE("gauss_2f1 against the Euler integral") {
    const complex a(0.5, 0.5), b(0.5, -0.5), c(1.5, 0.0);
    const double x = -2.0;
    // G(c)/(G(b)G(c-b)) Int_0^1 t^{b-1}(1-t)^{c-b-1}(1-x t)^{-a} dt
    auto f = [&](double t) -> complex {
        return std::pow(complex(t), b - 1.0) *
               std::pow(complex(1.0 - t), c - b - 1.0) *
               std::pow(complex(1.0 - x * t), -a);
    };
    const complex pre = std::exp(log_gamma(c) - log_gamma(b) -
                                 log_gamma(c - b));
    const complex euler =
        pre * integrate_interval(ComplexFn(f), 0.0, 1.0).value;
    const complex v = gauss_2f1(a, b, c, x);
    CHECK(std::abs(v - euler) < 1e-9);
    CHECK(std::abs(v - complex(0.6443239188818581, 0.0)) < 1e-10);
}

TEST_CASE("gauss_2f1 cosine specialization") {
    // 2F1(ip/2, -ip/2; 1/2; -sinh^2 r) = cos(p r)
    const double p = 1.3, r = 0.8;
    const complex v = gauss_2f1(complex(0.0, 0.5 * p), complex(0.0, -0.5 * p),
                                0.5, -std::sinh(r) * std::sinh(r));
    CHECK(std::abs(v - std::cos(p * r)) < 1e-9);
}

TEST_CASE("spherical_fn normalization and flat derivative at 0") {
    for (double p : {0.4, 1.3})
        for (double alpha : {0.0, 0.5})
            for (double beta : {-0.5, 0.0, 2.0})
                CHECK(spherical_fn({alpha, beta}, p, 0.0) == 1.0);
    // even extension: central difference across 0 vanishes
    const double h = 1e-4;
    auto phi = [](double x) {
        return spherical_fn({0.5, -0.5}, 1.1, std::abs(x));
    };
    CHECK(std::abs((phi(h) - phi(-h)) / (2.0 * h)) < 1e-6);
    // and the one-sided slope is itself O(h)
    CHECK(std::abs(phi(h) - phi(0.0)) / h < 1e-2);
}

TEST_CASE("spherical_fn satisfies the radial eigen-equation") {
    const JacobiParams jp{0.0, 0.0};
    const double p = 1.1, r = 0.9, rho = 1.0, h = 1e-4;
    auto phi = [&](double x) { return spherical_fn(jp, p, x); };
    const double d1 = (phi(r + h) - phi(r - h)) / (2.0 * h);
    const double d2 = (phi(r + h) - 2.0 * phi(r) + phi(r - h)) / (h * h);
    const double gen = 0.5 * (d2 + (1.0 / std::tanh(r) + std::tanh(r)) * d1);
    CHECK(std::abs(gen + 0.5 * (p * p + rho * rho) * phi(r)) < 1e-6);
}

TEST_CASE("spherical_fn large-r series branch is continuous at the seam") {
    // direct 2F1 just below r = 5, series just above; both must agree
    for (double p : {0.3, 1.7, 4.0}) {
        const double lo = spherical_fn({0.0, 2.2}, p, 4.999999);
        const double hi = spherical_fn({0.0, 2.2}, p, 5.000001);
        CHECK(lo == doctest::Approx(hi).epsilon(1e-7));
    }
}

TEST_CASE("plancherel_density values and limits") {
    CHECK(plancherel_density({0.7, -0.3}, 0.0) == 0.0);
    // frozen high-precision Gamma oracle
    CHECK(plancherel_density({0.0, 0.0}, 1.0) ==
          doctest::Approx(5.762638079910058).epsilon(1e-10));
    // small-p law m(p)/p^2 -> |G((a+b+1)/2)G((a-b+1)/2)/G(1+a)|^2
    const double p = 1e-4;
    CHECK(plancherel_density({0.3, -0.2}, p) / (p * p) ==
          doctest::Approx(4.869412211894144).epsilon(1e-6));
}

TEST_CASE("plancherel_density nonnegative and even") {
    for (double p : {0.3, 1.0, 4.2}) {
        const double v = plancherel_density({0.5, -0.5}, p);
        CHECK(v >= 0.0);
        CHECK(plancherel_density({0.5, -0.5}, -p) == v);
    }
}

TEST_CASE("yor_phi parity, bounds, monotonicity") {
    const double v = yor_phi(1.0, M_PI);
    CHECK(yor_phi(1.0, -M_PI) == doctest::Approx(-v).epsilon(1e-12));
    CHECK(v > 0.0);
    CHECK(v < 0.5 * std::exp(-1.0));
    CHECK(v > yor_phi(1.0, 3.0 * M_PI));
    CHECK_THROWS_AS(yor_phi(-1.0, M_PI), domain_error);
    CHECK_THROWS_AS(yor_phi(1.0, 0.0), domain_error);
}

TEST_CASE("determinism: identical inputs give identical outputs") {
    CHECK(spherical_fn({0.0, 1.3}, 0.9, 2.0) ==
          spherical_fn({0.0, 1.3}, 0.9, 2.0));
    CHECK(jacobi_poly(7, {0.4, 0.9}, 0.3) == jacobi_poly(7, {0.4, 0.9}, 0.3));
}

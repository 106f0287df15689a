#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "loopwind/kernels.hpp"
#include "loopwind/laws.hpp"
#include "loopwind/mc.hpp"
#include "loopwind/quadrature.hpp"

using namespace loopwind;

namespace {

SimConfig cfg(long paths, std::uint64_t seed, double dt = 1e-3) {
    SimConfig c;
    c.n_paths = paths;
    c.seed = seed;
    c.dt = dt;
    c.threads = 0;
    return c;
}

}  // namespace

TEST_CASE("seed determinism and domain safety") {
    const auto a = simulate_radial(Geometry::cp1(), 0.6, 0.5, cfg(2000, 7));
    const auto b = simulate_radial(Geometry::cp1(), 0.6, 0.5, cfg(2000, 7));
    CHECK(a == b);
    const auto c = simulate_radial(Geometry::cp1(), 0.6, 0.5, cfg(2000, 8));
    CHECK(a != c);
    for (double r : a) {
        CHECK(r > 0.0);
        CHECK(r < M_PI_2);
    }
}

TEST_CASE("drift pushes away from the boundary") {
    const auto ends =
        simulate_radial(Geometry::cp1(), 0.1, 0.05, cfg(4000, 3, 1e-4));
    double mean = 0.0;
    for (double r : ends) mean += r;
    mean /= double(ends.size());
    CHECK(mean > 0.1);
}

TEST_CASE("radial endpoints match the compact kernel") {
    const double r0 = 0.6, t = 0.5;
    const long n = 60000;
    const auto ends =
        simulate_radial(Geometry::cp1(), r0, t, cfg(n, 11, 5e-4));
    const int nbins = 8;
    const double lo = 0.15, hi = 1.45, w = (hi - lo) / nbins;
    std::vector<long> counts(nbins, 0);
    for (double r : ends) {
        const int b = int((r - lo) / w);
        if (r >= lo && b >= 0 && b < nbins) ++counts[std::size_t(b)];
    }
    for (int b = 0; b < nbins; ++b) {
        auto f = [&](double r) {
            return compact_jacobi_kernel({0.0, 0.0}, t, r0, r);
        };
        const double p =
            integrate_interval(f, lo + b * w, lo + (b + 1) * w).value;
        const double se = std::sqrt(p * (1.0 - p) / double(n));
        const double emp = double(counts[std::size_t(b)]) / double(n);
        CHECK(std::abs(emp - p) < 3.5 * se + 1e-4);
    }
}

TEST_CASE("estimate_conditional_cf basics") {
    const auto z =
        estimate_conditional_cf(Geometry::cp1(), 0.0, 0.6, 0.9, 0.8,
                                cfg(20000, 5));
    CHECK(z.value == complex(1.0, 0.0));
    CHECK(z.stderr_est == 0.0);
    const auto p =
        estimate_conditional_cf(Geometry::cp1(), 1.0, 0.6, 0.9, 0.8,
                                cfg(20000, 5));
    const auto m =
        estimate_conditional_cf(Geometry::cp1(), -1.0, 0.6, 0.9, 0.8,
                                cfg(20000, 5));
    CHECK(std::abs(m.value - std::conj(p.value)) < 1e-12);
}

TEST_CASE("empirical CF matches the analytic CF (CP1 and CH1)") {
    {
        const double ana = conditional_cf(Geometry::cp1(), 1.0, 0.6, 0.9, 0.8);
        const auto est =
            estimate_conditional_cf(Geometry::cp1(), 1.0, 0.6, 0.9, 0.8,
                                    cfg(100000, 42));
        CHECK(std::abs(est.value.real() - ana) < 3.0 * est.stderr_est);
    }
    {
        const double ana = conditional_cf(Geometry::ch1(), 1.0, 0.7, 1.1, 1.0);
        const auto est =
            estimate_conditional_cf(Geometry::ch1(), 1.0, 0.7, 1.1, 1.0,
                                    cfg(100000, 43));
        CHECK(std::abs(est.value.real() - ana) < 3.0 * est.stderr_est);
    }
}

TEST_CASE("sphere radial marginal is mu-independent") {
    const long n = 30000;
    auto a = simulate_radial(Geometry::sphere(1, 0.0), 0.4, 0.8, cfg(n, 21));
    auto b = simulate_radial(Geometry::sphere(1, 1.0), 0.4, 0.8, cfg(n, 22));
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    // two-sample Kolmogorov-Smirnov
    double ks = 0.0;
    std::size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        if (a[i] <= b[j])
            ++i;
        else
            ++j;
        ks = std::max(ks, std::abs(double(i) - double(j)) / double(n));
    }
    const double crit_1pct = 1.628 * std::sqrt(2.0 / double(n));
    CHECK(ks < crit_1pct);
}

TEST_CASE("empirical index distribution: normalization and loop symmetry") {
    const auto d = estimate_index_distribution(
        Geometry::cp1(), {0.6, 0.6, 0.0, 0.8}, cfg(120000, 33), -3, 3);
    double s = 0.0;
    for (double p : d.probs) s += p;
    CHECK(s == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(d.accepted > 100);
    for (int k = 1; k <= 2; ++k) {
        const double se = d.stderrs[std::size_t(k + 3)] +
                          d.stderrs[std::size_t(-k + 3)];
        CHECK(std::abs(d.prob(k) - d.prob(-k)) < 3.0 * se + 1e-3);
    }
}

TEST_CASE("halving dt moves estimates by less than a standard error") {
    const auto coarse =
        estimate_conditional_cf(Geometry::ch1(), 1.0, 0.7, 1.1, 1.0,
                                cfg(60000, 9, 2e-3));
    const auto fine =
        estimate_conditional_cf(Geometry::ch1(), 1.0, 0.7, 1.1, 1.0,
                                cfg(60000, 10, 1e-3));
    CHECK(std::abs(coarse.value.real() - fine.value.real()) <
          coarse.stderr_est + fine.stderr_est);
}

TEST_CASE("insufficient statistics raises") {
    CHECK_THROWS_AS(estimate_conditional_cf(Geometry::cp1(), 1.0, 0.6, 1.5,
                                            0.8, cfg(200, 1)),
                    numeric_error);
}

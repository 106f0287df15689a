#include "quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

namespace loopwind {

namespace {

// 15-point Kronrod extension of the 7-point Gauss rule (QUADPACK values).
constexpr double kXgk[8] = {
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000};

constexpr double kWgk[8] = {
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714};

constexpr double kWg[4] = {
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327};

template <typename T>
struct Panel {
    double a, b;
    T integral;
    double err;
};

inline bool finite_value(double v) { return std::isfinite(v); }
inline bool finite_value(const complex& v) {
    return std::isfinite(v.real()) && std::isfinite(v.imag());
}

// Node evaluation tolerant of integrable endpoint singularities: when a
// node of a panel deep inside the bisection stack rounds onto the singular
// point itself, step the sample toward the panel center until the integrand
// is finite again.
template <typename T, typename F>
T eval_node(const F& f, double x, double c) {
    T v = f(x);
    for (int guard = 0; !finite_value(v) && guard < 60; ++guard) {
        double nx = 0.5 * (x + c);
        if (nx == x) nx = std::nextafter(x, c);
        if (nx == x) break;
        x = nx;
        v = f(x);
    }
    return v;
}

template <typename T, typename F>
Panel<T> gk15(const F& f, double a, double b) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    const T fc = eval_node<T>(f, c, a);
    T resk = kWgk[7] * fc;
    T resg = kWg[3] * fc;
    for (int j = 0; j < 7; ++j) {
        // anchor the outer nodes to the nearest endpoint so that panels
        // hugging an integrable singularity never round onto it
        const double off = h * (1.0 - kXgk[j]);
        const T fsum =
            eval_node<T>(f, a + off, b) + eval_node<T>(f, b - off, a);
        resk += kWgk[j] * fsum;
        if (j % 2 == 1) resg += kWg[j / 2] * fsum;
    }
    Panel<T> p;
    p.a = a;
    p.b = b;
    p.integral = h * resk;
    p.err = std::abs(h * (resk - resg));
    return p;
}

template <typename T, typename F>
auto adaptive(const F& f, double a, double b, const Tolerance& tol) {
    auto cmp = [](const Panel<T>& x, const Panel<T>& y) { return x.err < y.err; };
    std::priority_queue<Panel<T>, std::vector<Panel<T>>, decltype(cmp)> heap(cmp);
    long evals = 15;
    heap.push(gk15<T>(f, a, b));
    T total = heap.top().integral;
    double toterr = heap.top().err;
    while (toterr > std::max(tol.abs, tol.rel * std::abs(total)) &&
           heap.size() < 100000) {
        if (evals + 30 > tol.max_evals) {
            NumericResult best{std::abs(total), toterr, evals};
            throw numeric_error("integrate_interval: max_evals exceeded", best);
        }
        Panel<T> worst = heap.top();
        heap.pop();
        total -= worst.integral;
        toterr -= worst.err;
        const double mid = 0.5 * (worst.a + worst.b);
        if (mid <= worst.a || mid >= worst.b) {
            // interval exhausted at machine precision
            total += worst.integral;
            toterr += worst.err;
            break;
        }
        Panel<T> left = gk15<T>(f, worst.a, mid);
        Panel<T> right = gk15<T>(f, mid, worst.b);
        evals += 30;
        total += left.integral + right.integral;
        toterr += left.err + right.err;
        heap.push(left);
        heap.push(right);
    }
    struct Out {
        T value;
        double err;
        long evals;
    };
    return Out{total, toterr, evals};
}

}  // namespace

NumericResult integrate_interval_real(const RealFn& f, double a, double b,
                                      const Tolerance& tol) {
    auto r = adaptive<double>(f, a, b, tol);
    return {r.value, r.err, r.evals};
}

ComplexResult integrate_interval_complex(const ComplexFn& f, double a,
                                         double b, const Tolerance& tol) {
    auto r = adaptive<complex>(f, a, b, tol);
    return {r.value, r.err, r.evals};
}

NumericResult integrate_line(const RealFn& f, double gaussian_scale_hint,
                             const Tolerance& tol) {
    const double floor = 0.01 * tol.abs;
    double radius = 4.0 * gaussian_scale_hint;
    const double cap = 1e5 * gaussian_scale_hint;
    auto big = [&](double x) {
        return std::abs(f(x)) > floor || std::abs(f(-x)) > floor;
    };
    while (big(radius) || big(0.71 * radius)) {
        const double mag_in = std::max(std::abs(f(0.5 * radius)),
                                       std::abs(f(-0.5 * radius)));
        const double mag_out = std::max(std::abs(f(radius)), std::abs(f(-radius)));
        if (radius > cap) {
            if (mag_out > mag_in && mag_out > floor)
                throw numeric_error("integrate_line: integrand not decaying",
                                    {0.0, mag_out, 8});
            break;
        }
        radius *= 2.0;
    }
    Tolerance half = tol;
    half.max_evals = tol.max_evals / 2;
    NumericResult lo = integrate_interval(f, -radius, 0.0, half);
    NumericResult hi = integrate_interval(f, 0.0, radius, half);
    return {lo.value + hi.value, lo.abs_error + hi.abs_error + 2.0 * radius * floor,
            lo.evaluations + hi.evaluations};
}

NumericResult sum_series(const SeriesTerm& term, const Tolerance& tol) {
    double sum = 0.0;
    double prev = 0.0;
    int consecutive_small = 0;
    int leading_zeros = 0;
    long m = 0;
    const long cap = std::min<long>(tol.max_evals, 100000);
    for (; m < cap; ++m) {
        const double t = term(m);
        sum += t;
        const double thresh = 0.1 * std::max(tol.abs, tol.rel * std::abs(sum));
        if (t == 0.0 && sum == 0.0) {
            if (++leading_zeros >= 6) return {0.0, 0.0, m + 1};
            continue;
        }
        if (m > 0 && std::abs(t) <= thresh && std::abs(prev) <= thresh) {
            if (++consecutive_small >= 2) {
                double q = prev != 0.0 ? std::abs(t / prev) : 0.0;
                q = std::min(q, 0.9);
                const double tail = std::abs(t) * q / (1.0 - q);
                return {sum, tail + thresh, m + 1};
            }
        } else {
            consecutive_small = 0;
        }
        prev = t;
    }
    throw numeric_error("sum_series: no decay detected within max terms",
                        {sum, std::abs(prev), m});
}

namespace {

// Largest lambda at which |cf| is still above the requested floor.
double probe_cf_support(const RealFn& cf, double floor) {
    double lmax = 1.0;
    while ((std::abs(cf(lmax)) > floor || std::abs(cf(0.71 * lmax)) > floor) &&
           lmax < 1e6)
        lmax *= 2.0;
    return lmax;
}

}  // namespace

NumericResult invert_cf(const RealFn& cf, double theta, const Tolerance& tol) {
    const double floor = 0.01 * std::max(tol.abs, 1e-300);
    const double lmax = probe_cf_support(cf, floor);
    const double at = std::abs(theta);
    const double pi = M_PI;

    if (at <= 4.0 * pi) {
        auto g = [&](double l) { return std::cos(l * theta) * cf(l); };
        NumericResult r = integrate_interval(g, 0.0, lmax, tol);
        return {r.value / pi, r.abs_error / pi + lmax * floor, r.evaluations + 8};
    }

    // Half-period panels between the zeros of cos(lambda theta), summed with
    // Aitken acceleration of the partial sums for the error estimate.
    auto g = [&](double l) { return std::cos(l * theta) * cf(l); };
    const double h = pi / at;
    double sum = 0.0, err = 0.0;
    long evals = 8;
    double s1 = 0.0, s2 = 0.0, s3 = 0.0;  // last three partial sums
    double accel = 0.0;
    double edge = 0.5 * h;
    {
        Panel<double> p0 = gk15<double>(g, 0.0, edge);
        sum += p0.integral;
        err += p0.err;
        evals += 15;
    }
    long panels = 0;
    const long max_panels = tol.max_evals / 15;
    double last_panel = 1e300;
    while (edge < lmax + h && panels < max_panels) {
        Panel<double> p = gk15<double>(g, edge, edge + h);
        edge += h;
        sum += p.integral;
        err += p.err;
        evals += 15;
        ++panels;
        last_panel = std::abs(p.integral);
        s1 = s2;
        s2 = s3;
        s3 = sum;
        if (panels >= 3) {
            const double d1 = s2 - s1, d2 = s3 - s2;
            const double denom = d2 - d1;
            accel = std::abs(denom) > 1e-300 ? s3 - d2 * d2 / denom : s3;
        }
        if (last_panel < floor && std::abs(cf(edge)) < floor) break;
    }
    err += last_panel + (panels >= 3 ? std::abs(accel - sum) : 0.0);
    return {sum / pi, err / pi, evals};
}

std::vector<NumericResult> invert_cf_grid(const RealFn& cf,
                                          std::span<const double> thetas,
                                          const Tolerance& tol) {
    const double floor = 0.01 * std::max(tol.abs, 1e-300);
    const double lmax = probe_cf_support(cf, floor);
    double tmax = 1.0;
    for (double th : thetas) tmax = std::max(tmax, std::abs(th));
    const double h = std::min(lmax / 16.0, M_PI / tmax);
    const long npanels = static_cast<long>(std::ceil(lmax / h));

    // Sample cf once at all Kronrod nodes.
    std::vector<double> nodes, samples;
    nodes.reserve(npanels * 15);
    for (long p = 0; p < npanels; ++p) {
        const double a = p * h, b = (p + 1) * h;
        const double c = 0.5 * (a + b), hw = 0.5 * (b - a);
        for (int j = 0; j < 7; ++j) {
            nodes.push_back(c - hw * kXgk[j]);
            nodes.push_back(c + hw * kXgk[j]);
        }
        nodes.push_back(c);
    }
    samples.reserve(nodes.size());
    for (double x : nodes) samples.push_back(cf(x));

    std::vector<NumericResult> out;
    out.reserve(thetas.size());
    const double hw = 0.5 * h;
    for (double th : thetas) {
        double total = 0.0, errsum = 0.0;
        std::size_t idx = 0;
        for (long p = 0; p < npanels; ++p) {
            double resk = 0.0, resg = 0.0;
            for (int j = 0; j < 7; ++j) {
                const double fa = std::cos(nodes[idx] * th) * samples[idx];
                ++idx;
                const double fb = std::cos(nodes[idx] * th) * samples[idx];
                ++idx;
                resk += kWgk[j] * (fa + fb);
                if (j % 2 == 1) resg += kWg[j / 2] * (fa + fb);
            }
            const double fc = std::cos(nodes[idx] * th) * samples[idx];
            ++idx;
            resk += kWgk[7] * fc;
            resg += kWg[3] * fc;
            total += hw * resk;
            errsum += std::abs(hw * (resk - resg));
        }
        out.push_back({total / M_PI, (errsum + lmax * floor) / M_PI,
                       static_cast<long>(nodes.size())});
    }
    return out;
}

}  // namespace loopwind

#include "mc.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <exception>
#include <mutex>
#include <thread>

namespace loopwind {

namespace {

// splitmix64; self-contained so streams are identical across platforms
std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

struct Rng {
    std::uint64_t state;
    bool have_spare = false;
    double spare = 0.0;

    explicit Rng(std::uint64_t s) : state(s) {}

    std::uint64_t next() {
        state += 0x9e3779b97f4a7c15ull;
        std::uint64_t z = state;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }
    double u01() {
        // (0, 1): top 53 bits, shifted off zero
        return (double(next() >> 11) + 0.5) * 0x1p-53;
    }
    double normal() {
        if (have_spare) {
            have_spare = false;
            return spare;
        }
        const double u = u01(), v = u01();
        const double rad = std::sqrt(-2.0 * std::log(u));
        const double ang = 2.0 * M_PI * v;
        spare = rad * std::sin(ang);
        have_spare = true;
        return rad * std::cos(ang);
    }
};

std::uint64_t path_seed(std::uint64_t master, long j) {
    return mix64(master ^ mix64(static_cast<std::uint64_t>(j) + 1));
}

struct RadialModel {
    bool compact = false;   // domain (0, pi/2) vs (0, inf)
    double c0 = 0.5;        // drift ~ c0 / r near 0; Bessel dimension 2*c0 + 1
    int bessel_dims = 2;    // nearest even embedding dimension, 2n for c0 = n - 1/2
    double (*drift)(double r, int n) = nullptr;
    int n = 1;

    double drift_at(double r) const { return drift(r, n); }
};

double drift_compact(double r, int n) {
    return (n - 0.5) / std::tan(r) - 0.5 * std::tan(r);
}
double drift_hyperbolic(double r, int n) {
    return (n - 0.5) / std::tanh(r) + 0.5 * std::tanh(r);
}
double drift_plane(double r, int) { return 0.5 / r; }

RadialModel radial_model(const Geometry& geom) {
    const Geometry g = geom.canonical();
    RadialModel m;
    m.n = g.n;
    switch (g.kind) {
        case Geometry::Kind::Plane:
            m.compact = false;
            m.c0 = 0.5;
            m.bessel_dims = 2;
            m.drift = drift_plane;
            break;
        case Geometry::Kind::CP1:
        case Geometry::Kind::Sphere:
            m.compact = true;
            m.c0 = g.n - 0.5;
            m.bessel_dims = 2 * g.n;
            m.drift = drift_compact;
            break;
        case Geometry::Kind::CH1:
        case Geometry::Kind::AdS:
        case Geometry::Kind::SL2:
            m.compact = false;
            m.c0 = g.n - 0.5;
            m.bessel_dims = 2 * g.n;
            m.drift = drift_hyperbolic;
            break;
    }
    return m;
}

// Exact local move for the dominant c/r drift: norm of a d-dimensional
// Gaussian step around the current radius.
double bessel_step(double r, double h, int dims, Rng& rng) {
    const double sh = std::sqrt(h);
    double s = r + sh * rng.normal();
    double q = s * s;
    for (int i = 1; i < dims; ++i) {
        const double g = sh * rng.normal();
        q += g * g;
    }
    double out = std::sqrt(q);
    if (out <= 0.0) out = 1e-300;
    return out;
}

double step_radial(const RadialModel& m, double r, double h, Rng& rng,
                   int depth) {
    if (depth > 30)
        throw numeric_error("radial step: substep cascade exhausted", {r, 0.0, 0});
    const double guard = 4.0 * std::sqrt(h);
    if (r < guard) return bessel_step(r, h, m.bessel_dims, rng);
    if (m.compact && M_PI_2 - r < guard) {
        // reflected coordinate s = pi/2 - r is locally a 2-D Bessel
        const double s = bessel_step(M_PI_2 - r, h, 2, rng);
        if (s < M_PI_2) return M_PI_2 - s;
        // bounced past the centre; fall through to substepping
    } else {
        const double prop = r + m.drift_at(r) * h + std::sqrt(h) * rng.normal();
        if (prop > 0.0 && (!m.compact || prop < M_PI_2)) return prop;
    }
    const double mid = step_radial(m, r, 0.5 * h, rng, depth + 1);
    return step_radial(m, mid, 0.5 * h, rng, depth + 1);
}

void check_sim_inputs(const Geometry& geom, double r0, double t,
                      const SimConfig& cfg) {
    geom.validate();
    if (t <= 0.0) throw domain_error("simulate: t must be > 0");
    if (!(cfg.dt > 0.0) || cfg.dt > t / 100.0)
        throw domain_error("simulate: dt must satisfy 0 < dt <= t/100");
    if (cfg.n_paths < 1) throw domain_error("simulate: n_paths must be >= 1");
    if (cfg.bin_halfwidth <= 0.0 || cfg.angular_halfwidth <= 0.0)
        throw domain_error("simulate: bin halfwidths must be > 0");
    const Geometry g = geom.canonical();
    const bool compact =
        g.kind == Geometry::Kind::CP1 || g.kind == Geometry::Kind::Sphere;
    if (r0 < 0.0 || (compact && r0 >= M_PI_2))
        throw domain_error("simulate: r0 outside the radial domain");
    if (r0 == 0.0 &&
        (g.kind == Geometry::Kind::CP1 || g.kind == Geometry::Kind::CH1 ||
         g.kind == Geometry::Kind::Plane))
        throw domain_error("simulate: r0 must be > 0 for this geometry");
}

int thread_count(const SimConfig& cfg) {
    int t = cfg.threads;
    if (t <= 0) t = static_cast<int>(std::thread::hardware_concurrency());
    if (t < 1) t = 1;
    return t;
}

// Runs body(j, rng) for each path index with a per-path deterministic
// substream; results must be written by index so the output is independent
// of the worker count.
template <class Body>
void parallel_paths(long n_paths, std::uint64_t seed, int threads,
                    const Body& body) {
    if (threads <= 1 || n_paths < 2 * threads) {
        for (long j = 0; j < n_paths; ++j) {
            Rng rng(path_seed(seed, j));
            body(j, rng);
        }
        return;
    }
    std::exception_ptr err;
    std::mutex err_mu;
    std::vector<std::thread> pool;
    const long chunk = (n_paths + threads - 1) / threads;
    for (int w = 0; w < threads; ++w) {
        const long lo = w * chunk, hi = std::min(n_paths, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([&, lo, hi] {
            try {
                for (long j = lo; j < hi; ++j) {
                    Rng rng(path_seed(seed, j));
                    body(j, rng);
                }
            } catch (...) {
                std::lock_guard<std::mutex> lk(err_mu);
                if (!err) err = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    if (err) std::rethrow_exception(err);
}

// Fiber-angle variance rate given the radius. Conditionally on the radial
// path theta(t) is centered Gaussian (the fiber/winding angle is a Brownian
// motion run at the clock integral of this rate; the sign conventions of the
// two fibrations do not matter for the law), so one endpoint draw
// sqrt(clock) * Z reproduces the joint endpoint law.
double angle_rate(const Geometry& g, double r) {
    switch (g.kind) {
        case Geometry::Kind::CP1: {
            const double s = std::sin(2.0 * r);
            return 4.0 / (s * s);
        }
        case Geometry::Kind::CH1: {
            const double s = std::sinh(2.0 * r);
            return 4.0 / (s * s);
        }
        case Geometry::Kind::Sphere: {
            const double v = std::tan(r);
            return g.mu * g.mu + v * v;  // theta = mu B - int sin^2 r dphi
        }
        default: {  // AdS / SL2
            const double v = std::tanh(r);
            return g.mu * g.mu + v * v;  // theta = mu B + int sinh^2 r dphi
        }
    }
}

PathSample one_plane_path(double r0, double t, double dt, Rng& rng) {
    // winding of the 2-D path itself; increments stay well below |z| except
    // on near-origin passes, which carry negligible mass at moderate r0^2/t
    double x = r0, y = 0.0, theta = 0.0, s = 0.0;
    while (s < t) {
        const double h = std::min(dt, t - s);
        const double sh = std::sqrt(h);
        const double nx = x + sh * rng.normal();
        const double ny = y + sh * rng.normal();
        theta += std::atan2(x * ny - y * nx, x * nx + y * ny);
        x = nx;
        y = ny;
        s += h;
    }
    return {std::hypot(x, y), theta, true};
}

PathSample one_fiber_path(const Geometry& g, const RadialModel& m, double r0,
                          double t, double dt, Rng& rng) {
    double r = r0, s = 0.0, clock = 0.0;
    while (s < t) {
        const double h = std::min(dt, t - s);
        const double rn = step_radial(m, r, h, rng, 0);
        clock += 0.5 * (angle_rate(g, r) + angle_rate(g, rn)) * h;
        r = rn;
        s += h;
    }
    const double theta = std::sqrt(clock) * rng.normal();
    return {r, theta, true};
}

}  // namespace

std::vector<double> simulate_radial(Geometry geom, double r0, double t,
                                    const SimConfig& cfg) {
    check_sim_inputs(geom, r0, t, cfg);
    const RadialModel m = radial_model(geom);
    std::vector<double> out(static_cast<std::size_t>(cfg.n_paths));
    parallel_paths(cfg.n_paths, cfg.seed, thread_count(cfg),
                   [&](long j, Rng& rng) {
                       double r = r0, s = 0.0;
                       while (s < t) {
                           const double h = std::min(cfg.dt, t - s);
                           r = step_radial(m, r, h, rng, 0);
                           s += h;
                       }
                       out[static_cast<std::size_t>(j)] = r;
                   });
    return out;
}

std::vector<PathSample> simulate_winding_pair(Geometry geom, double r0,
                                              double t, const SimConfig& cfg) {
    check_sim_inputs(geom, r0, t, cfg);
    const Geometry g = geom.canonical();
    if (g.kind != Geometry::Kind::Plane && g.n != 1)
        throw domain_error("simulate_winding_pair: only n = 1 fibrations");
    const RadialModel m = radial_model(g);
    std::vector<PathSample> out(static_cast<std::size_t>(cfg.n_paths));
    parallel_paths(cfg.n_paths, cfg.seed, thread_count(cfg),
                   [&](long j, Rng& rng) {
                       out[static_cast<std::size_t>(j)] =
                           g.kind == Geometry::Kind::Plane
                               ? one_plane_path(r0, t, cfg.dt, rng)
                               : one_fiber_path(g, m, r0, t, cfg.dt, rng);
                   });
    return out;
}

CfEstimate estimate_conditional_cf(Geometry geom, double lambda, double r0,
                                   double r, double t, const SimConfig& cfg) {
    const std::vector<PathSample> paths =
        simulate_winding_pair(geom, r0, t, cfg);
    complex sum = 0.0;
    long m = 0;
    std::vector<complex> vals;
    vals.reserve(paths.size() / 4 + 16);
    for (const PathSample& p : paths) {
        if (std::abs(p.r_end - r) > cfg.bin_halfwidth) continue;
        const complex v = std::polar(1.0, lambda * p.theta_end);
        sum += v;
        vals.push_back(v);
        ++m;
    }
    if (m < 100)
        throw numeric_error(
            "estimate_conditional_cf: fewer than 100 paths in the bin",
            {double(m), 0.0, 0});
    CfEstimate est;
    est.accepted = m;
    if (lambda == 0.0) {
        est.value = 1.0;
        est.stderr_est = 0.0;
        return est;
    }
    est.value = sum / double(m);
    double var = 0.0;
    for (const complex& v : vals) var += std::norm(v - est.value);
    var /= double(m > 1 ? m - 1 : 1);
    est.stderr_est = std::sqrt(var / double(m));
    return est;
}

EmpiricalIndexDistribution estimate_index_distribution(Geometry geom,
                                                       const BridgeSpec& bridge,
                                                       const SimConfig& cfg,
                                                       int k_min, int k_max) {
    if (k_min > k_max)
        throw domain_error("estimate_index_distribution: k_min > k_max");
    const std::vector<PathSample> paths =
        simulate_winding_pair(geom, bridge.r0, bridge.t, cfg);
    const double theta_ref = reduce_angle(bridge.theta);
    const std::size_t width = static_cast<std::size_t>(k_max - k_min + 1);
    std::vector<long> counts(width, 0);
    long m = 0;
    for (const PathSample& p : paths) {
        if (std::abs(p.r_end - bridge.r) > cfg.bin_halfwidth) continue;
        const double delta = p.theta_end - theta_ref;
        const long k = std::lround(delta / (2.0 * M_PI));
        if (std::abs(delta - 2.0 * M_PI * double(k)) > cfg.angular_halfwidth)
            continue;
        if (k < k_min || k > k_max) continue;
        ++counts[static_cast<std::size_t>(k - k_min)];
        ++m;
    }
    if (m < 100)
        throw numeric_error(
            "estimate_index_distribution: fewer than 100 paths in the bin",
            {double(m), 0.0, 0});
    EmpiricalIndexDistribution out;
    out.k_min = k_min;
    out.k_max = k_max;
    out.accepted = m;
    out.counts = counts;
    out.probs.resize(width);
    out.ci_lo.resize(width);
    out.ci_hi.resize(width);
    out.stderrs.resize(width);
    const double z = 1.959963984540054;  // Wilson 95%
    const double mm = double(m), z2 = z * z;
    for (std::size_t i = 0; i < width; ++i) {
        const double p = double(counts[i]) / mm;
        out.probs[i] = p;
        out.stderrs[i] = std::sqrt(p * (1.0 - p) / mm);
        const double denom = 1.0 + z2 / mm;
        const double centre = (p + z2 / (2.0 * mm)) / denom;
        const double half =
            z / denom * std::sqrt(p * (1.0 - p) / mm + z2 / (4.0 * mm * mm));
        out.ci_lo[i] = std::max(0.0, centre - half);
        out.ci_hi[i] = std::min(1.0, centre + half);
    }
    return out;
}

}  // namespace loopwind

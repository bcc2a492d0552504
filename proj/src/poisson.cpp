#include "gbpd/poisson.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "gbpd/transform.hpp"

namespace gbpd {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) { return splitmix64(base + index); }

Rng::Rng(std::uint64_t seed) : engine_(splitmix64(seed)) {}

double Rng::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

double Rng::normal() {
    const double u1 = 1.0 - uniform();  // (0, 1]
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::uint64_t Rng::poisson(double mean) {
    if (!(mean >= 0.0) || !std::isfinite(mean)) fail(ErrorCode::InvalidArgument, "Poisson mean must be finite and >= 0");
    std::uint64_t k = 0;
    double arrival = 0.0;
    while (true) {
        arrival -= std::log(1.0 - uniform());
        if (arrival > mean) return k;
        ++k;
    }
}

Mat random_rotation(int dim, Rng& rng) {
    Mat q(dim);
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) q(i, j) = rng.normal();
    // Modified Gram-Schmidt on columns; positive R diagonal makes Q Haar on O(d).
    for (int j = 0; j < dim; ++j) {
        for (int k = 0; k < j; ++k) {
            double proj = 0.0;
            for (int i = 0; i < dim; ++i) proj += q(i, k) * q(i, j);
            for (int i = 0; i < dim; ++i) q(i, j) -= proj * q(i, k);
        }
        double norm = 0.0;
        for (int i = 0; i < dim; ++i) norm += q(i, j) * q(i, j);
        norm = std::sqrt(norm);
        for (int i = 0; i < dim; ++i) q(i, j) /= norm;
    }
    if (lu_inverse(q).det < 0.0)
        for (int i = 0; i < dim; ++i) q(i, 0) = -q(i, 0);
    return q;
}

void MarkModel::validate() const {
    if (!(r_min > 0.0) || !(r_min <= r_max) || !std::isfinite(r_max))
        fail(ErrorCode::InvalidArgument, "mark model needs 0 < r_min <= r_max < inf");
    if (!(w_max >= 0.0) || !std::isfinite(w_max)) fail(ErrorCode::InvalidArgument, "mark model needs 0 <= w_max < inf");
}

void PoissonConfig::validate() const {
    if (!(intensity > 0.0) || !std::isfinite(intensity))
        fail(ErrorCode::InvalidArgument, "intensity must be positive and finite");
    if (window.dim() == 0) fail(ErrorCode::InvalidArgument, "window is not set");
    if (!(window.volume() > 0.0)) fail(ErrorCode::InvalidArgument, "window must have positive volume");
    if (!(halo >= 0.0) || !std::isfinite(halo)) fail(ErrorCode::InvalidArgument, "halo must be finite and >= 0");
}

std::vector<Generator> sample_marked_points(const PoissonConfig& cfg, const MarkModel& marks) {
    cfg.validate();
    marks.validate();
    const int d = cfg.window.dim();
    const double r = cfg.halo;
    Vec lo = cfg.window.lower, hi = cfg.window.upper;
    double box_volume = 1.0;
    for (int a = 0; a < d; ++a) {
        lo[a] -= r;
        hi[a] += r;
        box_volume *= hi[a] - lo[a];
    }
    Rng rng(cfg.seed);
    const std::uint64_t count = rng.poisson(cfg.intensity * box_volume);
    const double log_rmin = std::log(marks.r_min);
    const double log_rmax = std::log(marks.r_max);

    std::vector<Generator> out;
    for (std::uint64_t k = 0; k < count; ++k) {
        Vec s(d);
        for (int a = 0; a < d; ++a) s[a] = rng.uniform(lo[a], hi[a]);
        double gap2 = 0.0;
        for (int a = 0; a < d; ++a) {
            const double g = std::max({cfg.window.lower[a] - s[a], 0.0, s[a] - cfg.window.upper[a]});
            gap2 += g * g;
        }
        if (gap2 > r * r) continue;

        const Mat q = random_rotation(d, rng);
        Vec inv_axes2(d);
        for (int a = 0; a < d; ++a) {
            const double axis = std::exp(rng.uniform(log_rmin, log_rmax));
            inv_axes2[a] = 1.0 / (axis * axis);
        }
        const Mat m = (q * Mat::diagonal(inv_axes2) * q.transpose()).symmetrized();
        const double w = marks.w_max * rng.uniform();
        out.emplace_back(s, SpdMatrix(m), w);
    }
    return out;
}

GeneratorSet sample_generators(const PoissonConfig& cfg, const MarkModel& marks) {
    auto items = sample_marked_points(cfg, marks);
    if (items.empty()) fail(ErrorCode::InvalidArgument, "Poisson realization contains no generators");
    return GeneratorSet(std::move(items));
}

namespace {

// Bisection for an increasing function with f(lo) <= 0 <= f(hi), run until the
// bracket cannot shrink further; returns the endpoint with smaller |f|.
template <class Fn>
double bisect_increasing(Fn&& f, double lo, double hi) {
    double flo = f(lo), fhi = f(hi);
    if (flo >= 0.0) return lo;
    if (fhi <= 0.0) return hi;
    for (int iter = 0; iter < 2000; ++iter) {
        const double mid = lo + 0.5 * (hi - lo);
        if (mid <= lo || mid >= hi) break;
        const double fm = f(mid);
        if (fm == 0.0) return mid;
        if (fm < 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
            fhi = fm;
        }
    }
    return std::abs(flo) <= std::abs(fhi) ? lo : hi;
}

double volume_or_zero(const Generator& g, double t) { return t + g.weight > 0.0 ? ellipsoid_volume(g, t) : 0.0; }

}  // namespace

double mean_n1(const GeneratorSet& set, double intensity, double t) {
    if (!(intensity >= 0.0)) fail(ErrorCode::InvalidArgument, "intensity must be >= 0");
    double sum = 0.0;
    for (const auto& g : set) sum += ellipsoid_volume(g, t);
    return intensity * (sum / static_cast<double>(set.size()));
}

double mean_nR(double intensity, const AxisBox& window, double halo) {
    const int d = window.dim();
    check_dim(d);
    if (!(halo >= 0.0)) fail(ErrorCode::InvalidArgument, "halo must be >= 0");
    // Steiner: V(W ⊕ R B) = Σ_j κ_{d-j} R^{d-j} V_j(W); for a box V_j is the
    // j-th elementary symmetric polynomial of the side lengths.
    std::vector<double> elem(static_cast<std::size_t>(d + 1), 0.0);
    elem[0] = 1.0;
    for (int a = 0; a < d; ++a) {
        const double side = window.upper[a] - window.lower[a];
        for (int j = a + 1; j >= 1; --j) elem[static_cast<std::size_t>(j)] += side * elem[static_cast<std::size_t>(j - 1)];
    }
    double volume = 0.0;
    for (int j = 0; j <= d; ++j) {
        const int k = d - j;
        const double ball = k == 0 ? 1.0 : unit_ball_volume(k);
        volume += ball * std::pow(halo, k) * elem[static_cast<std::size_t>(j)];
    }
    return intensity * volume;
}

double mean_total(double n1, double nR) { return n1 + std::exp(-n1) * (nR - n1); }

double optimal_n1(double nR) {
    if (!(nR >= 0.0) || !std::isfinite(nR)) fail(ErrorCode::InvalidArgument, "n_R must be finite and >= 0");
    const double rhs = nR + 1.0;
    return bisect_increasing([&](double x) { return std::exp(x) + x - rhs; }, 0.0, std::log(rhs));
}

CompletedOptimum optimal_n1_completed(double nR, double c) {
    if (!(nR >= 0.0) || !std::isfinite(nR)) fail(ErrorCode::InvalidArgument, "n_R must be finite and >= 0");
    if (!(c >= 1.0) || !std::isfinite(c)) fail(ErrorCode::InvalidArgument, "c must be finite and >= 1");
    const double rhs = nR + 1.0;
    CompletedOptimum out;
    out.n1_bound = std::log(rhs) - std::log(c);
    out.total_bound = c * (std::log(rhs) + 1.0 - std::log(c));
    if (rhs < c) {
        out.feasible = false;
        out.n1 = 0.0;
        return out;
    }
    out.n1 = bisect_increasing([&](double x) { return c * std::exp(x) + x - rhs; }, 0.0, out.n1_bound);
    return out;
}

double solve_t_for_n1(double target, const GeneratorSet& set, double intensity) {
    if (!(target > 0.0) || !std::isfinite(target)) fail(ErrorCode::InvalidArgument, "target n1 must be positive");
    if (!(intensity > 0.0)) fail(ErrorCode::InvalidArgument, "intensity must be positive");
    auto n1_at = [&](double t) {
        double sum = 0.0;
        for (const auto& g : set) sum += volume_or_zero(g, t);
        return intensity * (sum / static_cast<double>(set.size()));
    };
    const double lo = std::max(0.0, -set.min_weight());
    if (n1_at(lo) >= target)
        fail(ErrorCode::InfeasibleTarget, "n1 already exceeds the target for every t > 0");
    double hi = std::max(1.0, 2.0 * lo);
    while (n1_at(hi) < target) {
        hi *= 2.0;
        if (!std::isfinite(hi)) fail(ErrorCode::InfeasibleTarget, "no finite t reaches the target n1");
    }
    return bisect_increasing([&](double t) { return n1_at(t) - target; }, lo, hi);
}

double box_ellipsoid_ratio(const GeneratorSet& set, double t) {
    double box = 0.0, ellipsoid = 0.0;
    for (const auto& g : set) {
        box += bounding_box(g, t).volume();
        ellipsoid += ellipsoid_volume(g, t);
    }
    return box / ellipsoid;
}

namespace {

struct Accumulator {
    double sum = 0.0, sum2 = 0.0;
    std::size_t count = 0;
    void add(double v) {
        sum += v;
        sum2 += v * v;
        ++count;
    }
    double mean() const { return count ? sum / static_cast<double>(count) : 0.0; }
    // Standard error of the mean across samples.
    double se() const {
        if (count < 2) return 0.0;
        const double m = mean();
        const double var = std::max(0.0, (sum2 - static_cast<double>(count) * m * m) / static_cast<double>(count - 1));
        return std::sqrt(var / static_cast<double>(count));
    }
};

}  // namespace

ComplexityReport verify_complexity(const PoissonConfig& cfg, const MarkModel& marks, const GridSpec& grid, double t,
                                   std::size_t reps, const RenderOptions& options) {
    cfg.validate();
    marks.validate();
    if (grid.dim() != cfg.window.dim()) fail(ErrorCode::DimensionMismatch, "grid and window differ in dimension");
    if (!(t > 0.0)) fail(ErrorCode::NonpositiveT, "t must be positive");
    if (reps == 0) fail(ErrorCode::InvalidArgument, "reps must be positive");

    const int d = grid.dim();
    ComplexityReport rep;
    rep.t = t;
    rep.reps = reps;
    rep.intensity = cfg.intensity;
    rep.erosion = std::sqrt(t + marks.w_max) * marks.r_max;
    rep.nR = mean_nR(cfg.intensity, cfg.window, cfg.halo);

    std::vector<std::size_t> measured;
    for (std::size_t p = 0; p < grid.total(); ++p) {
        const Vec x = grid.point(p);
        bool inside = true;
        for (int a = 0; a < d && inside; ++a)
            inside = x[a] >= cfg.window.lower[a] + rep.erosion && x[a] <= cfg.window.upper[a] - rep.erosion;
        if (inside) measured.push_back(p);
    }
    if (measured.empty()) fail(ErrorCode::InvalidArgument, "eroded measurement window contains no grid points");
    rep.measured_points = measured.size();

    Accumulator n1_pred, c_acc, brute, hits, uncovered, step2, total, total_box;
    RenderOptions opts = options;
    opts.record_trace = true;
    for (std::size_t r = 0; r < reps; ++r) {
        PoissonConfig rcfg = cfg;
        rcfg.seed = derive_seed(cfg.seed, r);
        auto items = sample_marked_points(rcfg, marks);
        const double n = static_cast<double>(items.size());
        brute.add(n);
        if (items.empty()) {
            rep.notes.push_back("realization " + std::to_string(r) + " was empty");
            hits.add(0.0);
            uncovered.add(1.0);
            step2.add(0.0);
            total.add(0.0);
            total_box.add(0.0);
            continue;
        }
        const GeneratorSet set(std::move(items));
        n1_pred.add(mean_n1(set, cfg.intensity, t));
        c_acc.add(box_ellipsoid_ratio(set, t));
        const RenderResult res = render_improved(grid, set, t, opts);
        double h = 0.0, u = 0.0, v = 0.0;
        for (std::size_t p : measured) {
            h += res.trace.hits[p];
            v += res.trace.visits[p];
            if (res.trace.hits[p] == 0) u += 1.0;
        }
        const double m = static_cast<double>(measured.size());
        hits.add(h / m);
        uncovered.add(u / m);
        step2.add(u * n / m);
        total.add((h + u * n) / m);
        total_box.add((v + u * n) / m);
    }

    rep.n1 = n1_pred.mean();
    rep.n2 = std::exp(-rep.n1) * (rep.nR - rep.n1);
    rep.n = mean_total(rep.n1, rep.nR);
    rep.void_probability = std::exp(-rep.n1);
    rep.n1_emp = hits.mean();
    rep.n1_se = hits.se();
    rep.uncovered_emp = uncovered.mean();
    rep.uncovered_se = uncovered.se();
    rep.n2_emp = step2.mean();
    rep.n2_se = step2.se();
    rep.n_emp = total.mean();
    rep.n_se = total.se();
    rep.n_box_emp = total_box.mean();
    rep.n_box_se = total_box.se();
    rep.brute_emp = brute.mean();
    rep.c = std::max(1.0, c_acc.mean());
    rep.completed_bound = rep.c * rep.n1 + rep.n2;
    rep.optimal_bound = optimal_n1_completed(rep.nR, rep.c).total_bound;
    if (rep.n1 > rep.nR) rep.notes.push_back("n1 exceeds n_R: t is beyond the model's useful range");
    rep.notes.push_back("step-1 coverage uses only generators seeded in W + R B^d; residual edge bias not corrected");
    return rep;
}

}  // namespace gbpd

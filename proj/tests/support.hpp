#pragma once

// Test-side helpers: random instances and reference computations written
// without the library's linear algebra, so they can check it independently.

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <random>
#include <vector>

#include "gbpd/geometry.hpp"
#include "gbpd/render.hpp"

namespace testing {

using gbpd::Generator;
using gbpd::GeneratorSet;
using gbpd::Mat;
using gbpd::SpdMatrix;
using gbpd::Vec;

struct Random {
    std::mt19937_64 engine;
    explicit Random(std::uint64_t seed) : engine(seed) {}

    double uniform(double lo = 0.0, double hi = 1.0) { return std::uniform_real_distribution<double>(lo, hi)(engine); }
    double normal() { return std::normal_distribution<double>(0.0, 1.0)(engine); }
    int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(engine); }

    Vec vec(int d, double lo, double hi) {
        Vec v(d);
        for (int i = 0; i < d; ++i) v[i] = uniform(lo, hi);
        return v;
    }

    // Q diag(λ) Qᵀ with λ spread over [lo, hi] and a random orthonormal Q.
    Mat spd(int d, double lo = 0.5, double hi = 4.0) {
        Mat q = orthogonal(d);
        Mat out(d);
        std::vector<double> lam(static_cast<std::size_t>(d));
        for (auto& l : lam) l = uniform(lo, hi);
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) {
                double s = 0.0;
                for (int k = 0; k < d; ++k) s += q(i, k) * lam[static_cast<std::size_t>(k)] * q(j, k);
                out(i, j) = s;
            }
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < i; ++j) out(i, j) = out(j, i);
        return out;
    }

    Mat orthogonal(int d) {
        Mat q(d);
        for (int c = 0; c < d; ++c) {
            std::vector<double> v(static_cast<std::size_t>(d));
            for (auto& x : v) x = normal();
            for (int p = 0; p < c; ++p) {
                double proj = 0.0;
                for (int r = 0; r < d; ++r) proj += v[static_cast<std::size_t>(r)] * q(r, p);
                for (int r = 0; r < d; ++r) v[static_cast<std::size_t>(r)] -= proj * q(r, p);
            }
            double n = 0.0;
            for (double x : v) n += x * x;
            n = std::sqrt(n);
            for (int r = 0; r < d; ++r) q(r, c) = v[static_cast<std::size_t>(r)] / n;
        }
        return q;
    }

    Mat general(int d) {
        for (;;) {
            Mat a(d);
            for (int i = 0; i < d; ++i)
                for (int j = 0; j < d; ++j) a(i, j) = uniform(-1.0, 1.0) + (i == j ? 1.5 : 0.0);
            if (std::abs(determinant(a)) > 0.1) return a;
        }
    }

    Generator generator(int d, double lo, double hi, double w_max, double m_lo = 0.5, double m_hi = 4.0) {
        return Generator(vec(d, lo, hi), SpdMatrix(spd(d, m_lo, m_hi)), uniform(0.0, w_max));
    }

    GeneratorSet set(int n, int d, double lo, double hi, double w_max, double m_lo = 0.5, double m_hi = 4.0) {
        std::vector<Generator> g;
        for (int i = 0; i < n; ++i) g.push_back(generator(d, lo, hi, w_max, m_lo, m_hi));
        return GeneratorSet(std::move(g));
    }

    static double determinant(const Mat& a) {
        const int d = a.dim();
        std::vector<long double> m(static_cast<std::size_t>(d * d));
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) m[static_cast<std::size_t>(i * d + j)] = a(i, j);
        long double det = 1.0L;
        for (int c = 0; c < d; ++c) {
            int p = c;
            for (int r = c + 1; r < d; ++r)
                if (std::fabs(m[static_cast<std::size_t>(r * d + c)]) > std::fabs(m[static_cast<std::size_t>(p * d + c)])) p = r;
            if (m[static_cast<std::size_t>(p * d + c)] == 0.0L) return 0.0;
            if (p != c) {
                for (int j = 0; j < d; ++j) std::swap(m[static_cast<std::size_t>(p * d + j)], m[static_cast<std::size_t>(c * d + j)]);
                det = -det;
            }
            det *= m[static_cast<std::size_t>(c * d + c)];
            for (int r = c + 1; r < d; ++r) {
                const long double f = m[static_cast<std::size_t>(r * d + c)] / m[static_cast<std::size_t>(c * d + c)];
                for (int j = c; j < d; ++j) m[static_cast<std::size_t>(r * d + j)] -= f * m[static_cast<std::size_t>(c * d + j)];
            }
        }
        return static_cast<double>(det);
    }
};

// Gauss-Jordan inverse in long double.
inline std::vector<long double> oracle_inverse(const Mat& a) {
    const int d = a.dim();
    const auto at = [d](int i, int j) { return static_cast<std::size_t>(i * 2 * d + j); };
    std::vector<long double> m(static_cast<std::size_t>(2 * d * d));
    for (int i = 0; i < d; ++i) {
        for (int j = 0; j < d; ++j) m[at(i, j)] = a(i, j);
        m[at(i, d + i)] = 1.0L;
    }
    for (int c = 0; c < d; ++c) {
        int p = c;
        for (int r = c + 1; r < d; ++r)
            if (std::fabs(m[at(r, c)]) > std::fabs(m[at(p, c)])) p = r;
        for (int j = 0; j < 2 * d; ++j) std::swap(m[at(p, j)], m[at(c, j)]);
        const long double piv = m[at(c, c)];
        for (int j = 0; j < 2 * d; ++j) m[at(c, j)] /= piv;
        for (int r = 0; r < d; ++r) {
            if (r == c) continue;
            const long double f = m[at(r, c)];
            for (int j = 0; j < 2 * d; ++j) m[at(r, j)] -= f * m[at(c, j)];
        }
    }
    std::vector<long double> inv(static_cast<std::size_t>(d * d));
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) inv[static_cast<std::size_t>(i * d + j)] = m[at(i, d + j)];
    return inv;
}

// Σ_ij (x_i - s_i) M_ij (x_j - s_j) - w, summed over (i, j) in long double.
inline double oracle_dist(const Vec& x, const Generator& g) {
    const int d = g.dim();
    long double q = 0.0L;
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
            q += (static_cast<long double>(x[i]) - g.seed[i]) * g.aniso(i, j) * (static_cast<long double>(x[j]) - g.seed[j]);
    return static_cast<double>(q - g.weight);
}

// Checks that `label` attains the minimum oracle distance at x up to a
// relative rounding allowance. Returns true when the choice is admissible.
inline bool label_is_nearest(const Vec& x, const GeneratorSet& set, std::uint32_t label, double rel = 1e-12) {
    double best = std::numeric_limits<double>::infinity();
    double scale = 0.0;
    for (const auto& g : set) {
        const double v = oracle_dist(x, g);
        best = std::min(best, v);
        scale = std::max(scale, std::abs(v) + std::abs(g.weight));
    }
    if (label >= set.size()) return false;
    return oracle_dist(x, set[label]) <= best + rel * (scale + 1.0);
}

// Plain bisection on an increasing function.
inline double oracle_bisect(const std::function<double(double)>& f, double lo, double hi, int iters = 200) {
    for (int i = 0; i < iters; ++i) {
        const double mid = 0.5 * (lo + hi);
        (f(mid) < 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

// Monte-Carlo volume of {x : oracle quadratic form <= t + w} inside `box`.
inline double oracle_mc_volume(const Generator& g, double t, const gbpd::AxisBox& box, std::size_t samples, Random& rng) {
    std::size_t hits = 0;
    for (std::size_t i = 0; i < samples; ++i) {
        Vec x(g.dim());
        for (int a = 0; a < g.dim(); ++a) x[a] = rng.uniform(box.lower[a], box.upper[a]);
        if (oracle_dist(x, g) <= t) ++hits;
    }
    return box.volume() * static_cast<double>(hits) / static_cast<double>(samples);
}

inline gbpd::GridSpec square_grid(int d, std::size_t n, double lo = 0.0, double hi = 1.0) {
    Vec origin(d), spacing(d);
    for (int a = 0; a < d; ++a) {
        origin[a] = lo;
        spacing[a] = (hi - lo) / static_cast<double>(n);
    }
    return gbpd::GridSpec(origin, spacing, std::vector<std::size_t>(static_cast<std::size_t>(d), n));
}

}  // namespace testing

#include "gbpd/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace gbpd {

namespace {

// Inverse of an SPD matrix from its Cholesky factor: M⁻¹ = L⁻ᵀ L⁻¹.
Mat inverse_from_cholesky(const Mat& lower) {
    const int d = lower.dim();
    Mat linv(d);
    for (int j = 0; j < d; ++j) {
        linv(j, j) = 1.0 / lower(j, j);
        for (int i = j + 1; i < d; ++i) {
            double s = 0.0;
            for (int k = j; k < i; ++k) s -= lower(i, k) * linv(k, j);
            linv(i, j) = s / lower(i, i);
        }
    }
    Mat inv(d);
    for (int i = 0; i < d; ++i)
        for (int j = i; j < d; ++j) {
            double s = 0.0;
            for (int k = j; k < d; ++k) s += linv(k, i) * linv(k, j);
            inv(i, j) = s;
            inv(j, i) = s;
        }
    return inv;
}

void require_positive_radius(const Generator& g, double t) {
    if (!(t + g.weight > 0.0))
        fail(ErrorCode::NonpositiveRadius,
             "t + w must be positive (t=" + std::to_string(t) + ", w=" + std::to_string(g.weight) + ")");
}

}  // namespace

SpdMatrix::SpdMatrix(const Mat& entries) {
    const int d = entries.dim();
    check_dim(d);
    const double scale = entries.max_abs();
    for (int i = 0; i < d; ++i)
        for (int j = i + 1; j < d; ++j)
            if (std::abs(entries(i, j) - entries(j, i)) > kSymmetryTolerance * scale)
                fail(ErrorCode::NotSymmetric, "matrix is not symmetric at (" + std::to_string(i) + "," +
                                                  std::to_string(j) + ")");
    entries_ = entries.symmetrized();
    Mat lower;
    if (!cholesky(entries_, lower)) fail(ErrorCode::NotPositiveDefinite, "matrix is not positive definite");
    inverse_ = inverse_from_cholesky(lower);
    det_ = 1.0;
    for (int i = 0; i < d; ++i) det_ *= lower(i, i) * lower(i, i);
}

SpdMatrix spd_check(const Mat& entries) { return SpdMatrix(entries); }

Generator::Generator(Vec seed_, SpdMatrix aniso_, double weight_)
    : seed(seed_), aniso(std::move(aniso_)), weight(weight_) {
    if (seed.dim() != aniso.dim())
        fail(ErrorCode::DimensionMismatch, "seed has dimension " + std::to_string(seed.dim()) +
                                               " but anisotropy matrix has " + std::to_string(aniso.dim()));
}

GeneratorSet::GeneratorSet(std::vector<Generator> items) : items_(std::move(items)) {
    if (items_.empty()) fail(ErrorCode::InvalidArgument, "generator set must not be empty");
    dim_ = items_.front().dim();
    for (const auto& g : items_)
        if (g.dim() != dim_) fail(ErrorCode::DimensionMismatch, "generators of mixed dimension in one set");
}

double GeneratorSet::min_weight() const {
    double m = items_.front().weight;
    for (const auto& g : items_) m = std::min(m, g.weight);
    return m;
}

double GeneratorSet::max_weight() const {
    double m = items_.front().weight;
    for (const auto& g : items_) m = std::max(m, g.weight);
    return m;
}

AxisBox::AxisBox(Vec lower_, Vec upper_) : lower(lower_), upper(upper_) {
    if (lower.dim() != upper.dim()) fail(ErrorCode::DimensionMismatch, "box corners differ in dimension");
    for (int i = 0; i < lower.dim(); ++i)
        if (!(lower[i] <= upper[i])) fail(ErrorCode::InvalidArgument, "box lower corner exceeds upper corner");
}

Vec AxisBox::half_widths() const {
    Vec h(dim());
    for (int i = 0; i < dim(); ++i) h[i] = 0.5 * (upper[i] - lower[i]);
    return h;
}

double AxisBox::volume() const {
    double v = 1.0;
    for (int i = 0; i < dim(); ++i) v *= upper[i] - lower[i];
    return v;
}

double dist(const Vec& x, const Generator& g) {
    if (x.dim() != g.dim()) fail(ErrorCode::DimensionMismatch, "point and generator differ in dimension");
    return dist_unchecked(x.values(), g);
}

bool ellipsoid_contains(const Vec& x, const Generator& g, double t) {
    if (x.dim() != g.dim()) fail(ErrorCode::DimensionMismatch, "point and generator differ in dimension");
    require_positive_radius(g, t);
    return quadratic_form(x.values(), g) <= t + g.weight;
}

AxisBox bounding_box(const Generator& g, double t) {
    require_positive_radius(g, t);
    const int d = g.dim();
    const double radius2 = t + g.weight;
    Vec lo(d), hi(d);
    for (int i = 0; i < d; ++i) {
        const double half = std::sqrt(radius2 * g.aniso.inverse()(i, i));
        lo[i] = g.seed[i] - half;
        hi[i] = g.seed[i] + half;
    }
    return AxisBox(lo, hi);
}

double unit_ball_volume(int dim) {
    check_dim(dim);
    constexpr double pi = std::numbers::pi;
    switch (dim) {
        case 1: return 2.0;
        case 2: return pi;
        case 3: return 4.0 * pi / 3.0;
        default: return pi * pi / 2.0;
    }
}

double ellipsoid_volume(const Generator& g, double t) {
    require_positive_radius(g, t);
    const int d = g.dim();
    return unit_ball_volume(d) * std::pow(t + g.weight, 0.5 * d) / std::sqrt(g.aniso.det());
}

std::vector<int> complement_indices(int dim, std::span<const int> fixed) {
    if (fixed.empty() || static_cast<int>(fixed.size()) >= dim)
        fail(ErrorCode::InvalidIndexSet, "index set must be a non-empty proper subset of the axes");
    std::vector<bool> used(static_cast<std::size_t>(dim), false);
    for (int k : fixed) {
        if (k < 0 || k >= dim) fail(ErrorCode::InvalidIndexSet, "axis index " + std::to_string(k) + " out of range");
        if (used[static_cast<std::size_t>(k)]) fail(ErrorCode::InvalidIndexSet, "duplicate axis index");
        used[static_cast<std::size_t>(k)] = true;
    }
    std::vector<int> rest;
    for (int i = 0; i < dim; ++i)
        if (!used[static_cast<std::size_t>(i)]) rest.push_back(i);
    return rest;
}

Mat schur_complement(const SpdMatrix& m, std::span<const int> fixed) {
    const std::vector<int> free = complement_indices(m.dim(), fixed);
    const Mat& e = m.entries();
    const SpdMatrix free_block(submatrix(e, free));
    const Mat& free_inv = free_block.inverse();
    const int nk = static_cast<int>(fixed.size());
    const int nf = static_cast<int>(free.size());
    Mat out(nk);
    for (int a = 0; a < nk; ++a)
        for (int b = 0; b < nk; ++b) {
            double s = 0.0;
            for (int i = 0; i < nf; ++i)
                for (int j = 0; j < nf; ++j)
                    s += e(free[static_cast<std::size_t>(i)], fixed[static_cast<std::size_t>(a)]) * free_inv(i, j) *
                         e(free[static_cast<std::size_t>(j)], fixed[static_cast<std::size_t>(b)]);
            out(a, b) = e(fixed[static_cast<std::size_t>(a)], fixed[static_cast<std::size_t>(b)]) - s;
        }
    return out.symmetrized();
}

}  // namespace gbpd

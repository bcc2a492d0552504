#pragma once

// Core GBPD primitives: validated anisotropy matrices, generators, the
// distance (x-s)ᵀM(x-s) - w and the E_t neighbourhood geometry.

#include <cstddef>
#include <span>
#include <vector>

#include "gbpd/linalg.hpp"

namespace gbpd {

// Symmetric positive-definite d×d matrix. The Cholesky factor, inverse and
// determinant are computed once at construction from the same factorization.
class SpdMatrix {
public:
    // Relative asymmetry tolerated (and removed by averaging) at construction.
    static constexpr double kSymmetryTolerance = 1e-12;

    SpdMatrix() = default;
    // Throws NotSymmetric or NotPositiveDefinite.
    explicit SpdMatrix(const Mat& entries);
    static SpdMatrix identity(int dim) { return SpdMatrix(Mat::identity(dim)); }

    int dim() const { return entries_.dim(); }
    const Mat& entries() const { return entries_; }
    double operator()(int i, int j) const { return entries_(i, j); }
    const Mat& inverse() const { return inverse_; }
    double det() const { return det_; }

private:
    Mat entries_;
    Mat inverse_;
    double det_ = 0.0;
};

// Validates and symmetrizes raw entries.
SpdMatrix spd_check(const Mat& entries);

struct Generator {
    Vec seed;
    SpdMatrix aniso;
    double weight = 0.0;

    Generator() = default;
    Generator(Vec seed_, SpdMatrix aniso_, double weight_);
    int dim() const { return seed.dim(); }
};

// Non-empty ordered list of generators of one dimension; the position of an
// item is its label.
class GeneratorSet {
public:
    GeneratorSet() = default;
    explicit GeneratorSet(std::vector<Generator> items);

    int dim() const { return dim_; }
    std::size_t size() const { return items_.size(); }
    const Generator& operator[](std::size_t i) const { return items_[i]; }
    const std::vector<Generator>& items() const { return items_; }
    auto begin() const { return items_.begin(); }
    auto end() const { return items_.end(); }

    double min_weight() const;
    double max_weight() const;

private:
    int dim_ = 0;
    std::vector<Generator> items_;
};

struct AxisBox {
    Vec lower;
    Vec upper;

    AxisBox() = default;
    AxisBox(Vec lower_, Vec upper_);
    int dim() const { return lower.dim(); }
    Vec half_widths() const;
    double volume() const;
};

// (x-s)ᵀ M (x-s), accumulated row by row in index order. Every renderer path
// goes through this so equal inputs produce bit-identical results.
inline double quadratic_form(std::span<const double> x, const Generator& g) {
    const int d = g.dim();
    double diff[kMaxDim];
    for (int i = 0; i < d; ++i) diff[i] = x[static_cast<std::size_t>(i)] - g.seed[i];
    double q = 0.0;
    for (int i = 0; i < d; ++i) {
        double row = 0.0;
        for (int j = 0; j < d; ++j) row += g.aniso(i, j) * diff[j];
        q += diff[i] * row;
    }
    return q;
}

inline double dist_unchecked(std::span<const double> x, const Generator& g) {
    return quadratic_form(x, g) - g.weight;
}

double dist(const Vec& x, const Generator& g);

// dist(x,g) <= t, evaluated as (x-s)ᵀM(x-s) <= t+w. Throws NonpositiveRadius
// when t + w <= 0.
bool ellipsoid_contains(const Vec& x, const Generator& g, double t);

// Smallest axis-aligned box around E_t: half-width sqrt((t+w)(M⁻¹)ᵢᵢ).
AxisBox bounding_box(const Generator& g, double t);

// Volume of the unit d-ball.
double unit_ball_volume(int dim);

// κ_d (t+w)^{d/2} / sqrt(det M)
double ellipsoid_volume(const Generator& g, double t);

// M_{K,K} - M_{¬K,K}ᵀ M_{¬K,¬K}⁻¹ M_{¬K,K} for 0-based index set K (a
// non-empty proper subset of {0..d-1}). Throws InvalidIndexSet.
Mat schur_complement(const SpdMatrix& m, std::span<const int> fixed);

// Complement of `fixed` in {0..dim-1}, ascending. Validates `fixed`.
std::vector<int> complement_indices(int dim, std::span<const int> fixed);

}  // namespace gbpd

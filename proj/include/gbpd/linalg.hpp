#pragma once

// Small dense linear algebra for dimensions 1..4. Everything is stored inline
// (no heap) and the dimension is a runtime value checked against kMaxDim.

#include <array>
#include <cstddef>
#include <initializer_list>
#include <span>

#include "gbpd/error.hpp"

namespace gbpd {

inline constexpr int kMaxDim = 4;

void check_dim(int dim);

class Vec {
public:
    Vec() = default;
    explicit Vec(int dim);
    Vec(std::initializer_list<double> values);
    static Vec from_span(std::span<const double> values);

    int dim() const { return dim_; }
    double& operator[](int i) { return data_[static_cast<std::size_t>(i)]; }
    double operator[](int i) const { return data_[static_cast<std::size_t>(i)]; }
    std::span<const double> values() const { return {data_.data(), static_cast<std::size_t>(dim_)}; }

    Vec& operator+=(const Vec& other);
    Vec& operator-=(const Vec& other);
    Vec& operator*=(double a);

    friend bool operator==(const Vec& a, const Vec& b);

private:
    int dim_ = 0;
    std::array<double, kMaxDim> data_{};
};

Vec operator+(Vec a, const Vec& b);
Vec operator-(Vec a, const Vec& b);
Vec operator*(double a, Vec v);
double dot(const Vec& a, const Vec& b);

// Square matrix, row-major.
class Mat {
public:
    Mat() = default;
    explicit Mat(int dim);
    // Row-major nested initializer, e.g. Mat{{2, 1}, {1, 3}}.
    Mat(std::initializer_list<std::initializer_list<double>> rows);
    static Mat identity(int dim);
    static Mat diagonal(const Vec& diag);
    static Mat from_row_major(int dim, std::span<const double> values);

    int dim() const { return dim_; }
    double& operator()(int i, int j) { return data_[static_cast<std::size_t>(i * kMaxDim + j)]; }
    double operator()(int i, int j) const { return data_[static_cast<std::size_t>(i * kMaxDim + j)]; }

    Mat transpose() const;
    // (A + Aᵀ)/2
    Mat symmetrized() const;
    double max_abs() const;

    friend bool operator==(const Mat& a, const Mat& b);

private:
    int dim_ = 0;
    std::array<double, kMaxDim * kMaxDim> data_{};
};

Mat operator*(const Mat& a, const Mat& b);
Mat operator*(double a, Mat m);
Mat operator+(const Mat& a, const Mat& b);
Mat operator-(const Mat& a, const Mat& b);
Vec operator*(const Mat& m, const Vec& v);

// Lower-triangular Cholesky factor L with M = L Lᵀ. Returns false when a
// pivot is not strictly positive.
bool cholesky(const Mat& m, Mat& lower);

// LU with partial pivoting; throws SingularMatrix when |det| <= min_abs_det.
struct LuResult {
    Mat inverse;
    double det = 0.0;
};
LuResult lu_inverse(const Mat& a, double min_abs_det = 0.0);

// Principal submatrix for an index list (0-based).
Mat submatrix(const Mat& m, std::span<const int> rows);

}  // namespace gbpd

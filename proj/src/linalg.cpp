#include "gbpd/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

namespace gbpd {

void check_dim(int dim) {
    if (dim < 1 || dim > kMaxDim)
        fail(ErrorCode::UnsupportedDimension,
             "dimension " + std::to_string(dim) + " outside supported range 1.." + std::to_string(kMaxDim));
}

Vec::Vec(int dim) : dim_(dim) { check_dim(dim); }

Vec::Vec(std::initializer_list<double> values) : dim_(static_cast<int>(values.size())) {
    check_dim(dim_);
    std::copy(values.begin(), values.end(), data_.begin());
}

Vec Vec::from_span(std::span<const double> values) {
    Vec v(static_cast<int>(values.size()));
    std::copy(values.begin(), values.end(), v.data_.begin());
    return v;
}

Vec& Vec::operator+=(const Vec& other) {
    if (dim_ != other.dim_) fail(ErrorCode::DimensionMismatch, "vector dimension mismatch");
    for (int i = 0; i < dim_; ++i) (*this)[i] += other[i];
    return *this;
}

Vec& Vec::operator-=(const Vec& other) {
    if (dim_ != other.dim_) fail(ErrorCode::DimensionMismatch, "vector dimension mismatch");
    for (int i = 0; i < dim_; ++i) (*this)[i] -= other[i];
    return *this;
}

Vec& Vec::operator*=(double a) {
    for (int i = 0; i < dim_; ++i) (*this)[i] *= a;
    return *this;
}

bool operator==(const Vec& a, const Vec& b) {
    if (a.dim_ != b.dim_) return false;
    for (int i = 0; i < a.dim_; ++i)
        if (a[i] != b[i]) return false;
    return true;
}

Vec operator+(Vec a, const Vec& b) { return a += b; }
Vec operator-(Vec a, const Vec& b) { return a -= b; }
Vec operator*(double a, Vec v) { return v *= a; }

double dot(const Vec& a, const Vec& b) {
    if (a.dim() != b.dim()) fail(ErrorCode::DimensionMismatch, "vector dimension mismatch");
    double s = 0.0;
    for (int i = 0; i < a.dim(); ++i) s += a[i] * b[i];
    return s;
}

Mat::Mat(int dim) : dim_(dim) { check_dim(dim); }

Mat::Mat(std::initializer_list<std::initializer_list<double>> rows) : dim_(static_cast<int>(rows.size())) {
    check_dim(dim_);
    int i = 0;
    for (const auto& row : rows) {
        if (static_cast<int>(row.size()) != dim_) fail(ErrorCode::DimensionMismatch, "matrix is not square");
        int j = 0;
        for (double v : row) (*this)(i, j++) = v;
        ++i;
    }
}

Mat Mat::identity(int dim) {
    Mat m(dim);
    for (int i = 0; i < dim; ++i) m(i, i) = 1.0;
    return m;
}

Mat Mat::diagonal(const Vec& diag) {
    Mat m(diag.dim());
    for (int i = 0; i < diag.dim(); ++i) m(i, i) = diag[i];
    return m;
}

Mat Mat::from_row_major(int dim, std::span<const double> values) {
    Mat m(dim);
    if (values.size() != static_cast<std::size_t>(dim * dim))
        fail(ErrorCode::DimensionMismatch, "expected " + std::to_string(dim * dim) + " matrix entries");
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) m(i, j) = values[static_cast<std::size_t>(i * dim + j)];
    return m;
}

Mat Mat::transpose() const {
    Mat t(dim_);
    for (int i = 0; i < dim_; ++i)
        for (int j = 0; j < dim_; ++j) t(j, i) = (*this)(i, j);
    return t;
}

Mat Mat::symmetrized() const {
    Mat s(dim_);
    for (int i = 0; i < dim_; ++i) {
        s(i, i) = (*this)(i, i);
        for (int j = i + 1; j < dim_; ++j) {
            const double v = 0.5 * ((*this)(i, j) + (*this)(j, i));
            s(i, j) = v;
            s(j, i) = v;
        }
    }
    return s;
}

double Mat::max_abs() const {
    double m = 0.0;
    for (int i = 0; i < dim_; ++i)
        for (int j = 0; j < dim_; ++j) m = std::max(m, std::abs((*this)(i, j)));
    return m;
}

bool operator==(const Mat& a, const Mat& b) {
    if (a.dim_ != b.dim_) return false;
    for (int i = 0; i < a.dim_; ++i)
        for (int j = 0; j < a.dim_; ++j)
            if (a(i, j) != b(i, j)) return false;
    return true;
}

Mat operator*(const Mat& a, const Mat& b) {
    if (a.dim() != b.dim()) fail(ErrorCode::DimensionMismatch, "matrix dimension mismatch");
    const int d = a.dim();
    Mat c(d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
            double s = 0.0;
            for (int k = 0; k < d; ++k) s += a(i, k) * b(k, j);
            c(i, j) = s;
        }
    return c;
}

Mat operator*(double a, Mat m) {
    for (int i = 0; i < m.dim(); ++i)
        for (int j = 0; j < m.dim(); ++j) m(i, j) *= a;
    return m;
}

Mat operator+(const Mat& a, const Mat& b) {
    if (a.dim() != b.dim()) fail(ErrorCode::DimensionMismatch, "matrix dimension mismatch");
    Mat c = a;
    for (int i = 0; i < a.dim(); ++i)
        for (int j = 0; j < a.dim(); ++j) c(i, j) += b(i, j);
    return c;
}

Mat operator-(const Mat& a, const Mat& b) { return a + (-1.0) * b; }

Vec operator*(const Mat& m, const Vec& v) {
    if (m.dim() != v.dim()) fail(ErrorCode::DimensionMismatch, "matrix/vector dimension mismatch");
    Vec r(v.dim());
    for (int i = 0; i < m.dim(); ++i) {
        double s = 0.0;
        for (int j = 0; j < m.dim(); ++j) s += m(i, j) * v[j];
        r[i] = s;
    }
    return r;
}

bool cholesky(const Mat& m, Mat& lower) {
    const int d = m.dim();
    lower = Mat(d);
    for (int j = 0; j < d; ++j) {
        double pivot = m(j, j);
        for (int k = 0; k < j; ++k) pivot -= lower(j, k) * lower(j, k);
        if (!(pivot > 0.0)) return false;
        const double ljj = std::sqrt(pivot);
        lower(j, j) = ljj;
        for (int i = j + 1; i < d; ++i) {
            double s = m(i, j);
            for (int k = 0; k < j; ++k) s -= lower(i, k) * lower(j, k);
            lower(i, j) = s / ljj;
        }
    }
    return true;
}

LuResult lu_inverse(const Mat& a, double min_abs_det) {
    const int d = a.dim();
    Mat lu = a;
    std::array<int, kMaxDim> perm{};
    for (int i = 0; i < d; ++i) perm[static_cast<std::size_t>(i)] = i;
    double det = 1.0;
    for (int col = 0; col < d; ++col) {
        int piv = col;
        for (int r = col + 1; r < d; ++r)
            if (std::abs(lu(r, col)) > std::abs(lu(piv, col))) piv = r;
        if (lu(piv, col) == 0.0) fail(ErrorCode::SingularMatrix, "matrix is singular");
        if (piv != col) {
            for (int j = 0; j < d; ++j) std::swap(lu(piv, j), lu(col, j));
            std::swap(perm[static_cast<std::size_t>(piv)], perm[static_cast<std::size_t>(col)]);
            det = -det;
        }
        det *= lu(col, col);
        for (int r = col + 1; r < d; ++r) {
            lu(r, col) /= lu(col, col);
            for (int j = col + 1; j < d; ++j) lu(r, j) -= lu(r, col) * lu(col, j);
        }
    }
    if (!(std::abs(det) > min_abs_det)) fail(ErrorCode::SingularMatrix, "matrix is singular (|det| too small)");

    LuResult out{Mat(d), det};
    for (int c = 0; c < d; ++c) {
        std::array<double, kMaxDim> x{};
        for (int i = 0; i < d; ++i) {
            double s = perm[static_cast<std::size_t>(i)] == c ? 1.0 : 0.0;
            for (int k = 0; k < i; ++k) s -= lu(i, k) * x[static_cast<std::size_t>(k)];
            x[static_cast<std::size_t>(i)] = s;
        }
        for (int i = d - 1; i >= 0; --i) {
            double s = x[static_cast<std::size_t>(i)];
            for (int k = i + 1; k < d; ++k) s -= lu(i, k) * x[static_cast<std::size_t>(k)];
            x[static_cast<std::size_t>(i)] = s / lu(i, i);
        }
        for (int i = 0; i < d; ++i) out.inverse(i, c) = x[static_cast<std::size_t>(i)];
    }
    return out;
}

Mat submatrix(const Mat& m, std::span<const int> rows) {
    Mat s(static_cast<int>(rows.size()));
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < rows.size(); ++j)
            s(static_cast<int>(i), static_cast<int>(j)) = m(rows[i], rows[j]);
    return s;
}

}  // namespace gbpd

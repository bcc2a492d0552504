#include "gbpd/section.hpp"

#include <algorithm>
#include <numeric>
#include <string>
#include <utility>

namespace gbpd {

FlatSpec::FlatSpec(int dim, std::vector<int> axes, std::vector<double> values) : dim_(dim) {
    check_dim(dim);
    if (axes.size() != values.size())
        fail(ErrorCode::InvalidFlat, "flat has " + std::to_string(axes.size()) + " axes but " +
                                         std::to_string(values.size()) + " values");
    std::vector<std::size_t> order(axes.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return axes[a] < axes[b]; });
    for (std::size_t i : order) {
        axes_.push_back(axes[i]);
        values_.push_back(values[i]);
    }
    try {
        free_ = complement_indices(dim, axes_);
    } catch (const Error& e) {
        fail(ErrorCode::InvalidFlat, std::string("invalid flat: ") + e.what());
    }
}

Vec FlatSpec::embed(const Vec& reduced) const {
    if (reduced.dim() != reduced_dim()) fail(ErrorCode::DimensionMismatch, "point does not match flat dimension");
    Vec x(dim_);
    for (std::size_t i = 0; i < axes_.size(); ++i) x[axes_[i]] = values_[i];
    for (std::size_t i = 0; i < free_.size(); ++i) x[free_[i]] = reduced[static_cast<int>(i)];
    return x;
}

Vec FlatSpec::project(const Vec& x) const {
    if (x.dim() != dim_) fail(ErrorCode::DimensionMismatch, "point does not match flat ambient dimension");
    Vec r(reduced_dim());
    for (std::size_t i = 0; i < free_.size(); ++i) r[static_cast<int>(i)] = x[free_[i]];
    return r;
}

Generator section_affine(const Generator& g, const FlatSpec& flat) {
    if (g.dim() != flat.dim())
        fail(ErrorCode::DimensionMismatch, "generator dimension " + std::to_string(g.dim()) +
                                               " does not match flat dimension " + std::to_string(flat.dim()));
    const auto& fixed = flat.axes();
    const auto& free = flat.free_axes();
    const int nk = static_cast<int>(fixed.size());
    const int nf = static_cast<int>(free.size());
    const Mat& m = g.aniso.entries();

    std::vector<double> offset(fixed.size());
    for (std::size_t a = 0; a < fixed.size(); ++a) offset[a] = flat.values()[a] - g.seed[fixed[a]];

    const SpdMatrix free_block(submatrix(m, free));

    // M_FK (h_K - s_K)
    Vec coupling(nf);
    for (int i = 0; i < nf; ++i) {
        double s = 0.0;
        for (int a = 0; a < nk; ++a) s += m(free[static_cast<std::size_t>(i)], fixed[static_cast<std::size_t>(a)]) *
                                          offset[static_cast<std::size_t>(a)];
        coupling[i] = s;
    }
    const Vec shift = free_block.inverse() * coupling;
    Vec seed(nf);
    for (int i = 0; i < nf; ++i) seed[i] = g.seed[free[static_cast<std::size_t>(i)]] - shift[i];

    const Mat schur = schur_complement(g.aniso, fixed);
    double form = 0.0;
    for (int a = 0; a < nk; ++a)
        for (int b = 0; b < nk; ++b)
            form += offset[static_cast<std::size_t>(a)] * schur(a, b) * offset[static_cast<std::size_t>(b)];

    return Generator(seed, free_block, g.weight - form);
}

Generator section_hyperplane(const Generator& g, int axis, double h) {
    if (g.dim() < 2) fail(ErrorCode::InvalidFlat, "hyperplane sections need dimension >= 2");
    return section_affine(g, FlatSpec(g.dim(), {axis}, {h}));
}

GeneratorSet section_set(const GeneratorSet& set, const FlatSpec& flat) {
    std::vector<Generator> out;
    out.reserve(set.size());
    for (const auto& g : set) out.push_back(section_affine(g, flat));
    return GeneratorSet(std::move(out));
}

}  // namespace gbpd

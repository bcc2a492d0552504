#include "gbpd/transform.hpp"

#include <cmath>
#include <string>
#include <utility>
#include <vector>

namespace gbpd {

namespace {

template <class Fn>
GeneratorSet map_items(const GeneratorSet& set, Fn&& fn) {
    std::vector<Generator> out;
    out.reserve(set.size());
    for (const auto& g : set) out.push_back(fn(g));
    return GeneratorSet(std::move(out));
}

void require_dim(const GeneratorSet& set, int dim, const char* what) {
    if (set.dim() != dim)
        fail(ErrorCode::DimensionMismatch, std::string(what) + " has dimension " + std::to_string(dim) +
                                               ", generator set has " + std::to_string(set.dim()));
}

void require_positive_factor(double a) {
    if (!(a > 0.0) || !std::isfinite(a))
        fail(ErrorCode::InvalidArgument, "scale factor must be positive and finite");
}

}  // namespace

GeneratorSet translate(const GeneratorSet& set, const Vec& offset) {
    require_dim(set, offset.dim(), "offset");
    return map_items(set, [&](const Generator& g) { return Generator(g.seed + offset, g.aniso, g.weight); });
}

GeneratorSet rotate(const GeneratorSet& set, const Mat& rotation) {
    require_dim(set, rotation.dim(), "rotation");
    const Mat ut = rotation.transpose();
    const double deviation = (ut * rotation - Mat::identity(rotation.dim())).max_abs();
    if (deviation > kOrthogonalityTolerance)
        fail(ErrorCode::NotOrthogonal, "matrix is not orthogonal (max |UᵀU - I| = " + std::to_string(deviation) + ")");
    return map_items(set, [&](const Generator& g) {
        return Generator(rotation * g.seed, SpdMatrix((rotation * g.aniso.entries() * ut).symmetrized()), g.weight);
    });
}

GeneratorSet scale(const GeneratorSet& set, double factor, ScaleForm form) {
    require_positive_factor(factor);
    if (form == ScaleForm::Weight) {
        const double w_factor = factor * factor;
        return map_items(set, [&](const Generator& g) {
            return Generator(factor * g.seed, g.aniso, w_factor * g.weight);
        });
    }
    // Entry order (inv·m)·inv matches distort() with A = aI bit for bit.
    const double inv = 1.0 / factor;
    return map_items(set, [&](const Generator& g) {
        Mat m = g.aniso.entries();
        for (int i = 0; i < m.dim(); ++i)
            for (int j = 0; j < m.dim(); ++j) m(i, j) = (inv * m(i, j)) * inv;
        return Generator(factor * g.seed, SpdMatrix(m), g.weight);
    });
}

GeneratorSet distort(const GeneratorSet& set, const Mat& a) {
    require_dim(set, a.dim(), "distortion");
    const LuResult lu = lu_inverse(a, kMinAbsDeterminant);
    const Mat& a_inv = lu.inverse;
    const Mat a_inv_t = a_inv.transpose();
    return map_items(set, [&](const Generator& g) {
        return Generator(a * g.seed, SpdMatrix((a_inv_t * g.aniso.entries() * a_inv).symmetrized()), g.weight);
    });
}

GeneratorSet shift_weights(const GeneratorSet& set, double v) {
    return map_items(set, [&](const Generator& g) { return Generator(g.seed, g.aniso, g.weight + v); });
}

GeneratorSet scale_weights(const GeneratorSet& set, double a) {
    require_positive_factor(a);
    return map_items(set, [&](const Generator& g) {
        return Generator(g.seed, SpdMatrix(a * g.aniso.entries()), a * g.weight);
    });
}

GeneratorSet normalize_nonnegative(const GeneratorSet& set) {
    const double lowest = set.min_weight();
    if (lowest >= 0.0) return set;
    return shift_weights(set, -lowest);
}

}  // namespace gbpd

#pragma once

// Structure-preserving maps on generator sets. Each returns a new set with the
// same label order, so the image of cell i is cell i of the result.

#include "gbpd/geometry.hpp"

namespace gbpd {

enum class ScaleForm {
    Matrix,  // (a s, a⁻² M, w)
    Weight,  // (a s, M, a² w)
};

inline constexpr double kOrthogonalityTolerance = 1e-10;
inline constexpr double kMinAbsDeterminant = 1e-12;

GeneratorSet translate(const GeneratorSet& set, const Vec& offset);

// `rotation` must satisfy ‖UᵀU − I‖_max <= 1e-10 (NotOrthogonal otherwise).
GeneratorSet rotate(const GeneratorSet& set, const Mat& rotation);

GeneratorSet scale(const GeneratorSet& set, double factor, ScaleForm form);

// (A s, A⁻ᵀ M A⁻¹, w); throws SingularMatrix for |det A| <= 1e-12.
GeneratorSet distort(const GeneratorSet& set, const Mat& a);

// Weights shifted by v: same tessellation.
GeneratorSet shift_weights(const GeneratorSet& set, double v);

// (M, w) -> (aM, aw): same tessellation.
GeneratorSet scale_weights(const GeneratorSet& set, double a);

// Shift so the minimum weight is exactly zero; identity when no weight is
// negative.
GeneratorSet normalize_nonnegative(const GeneratorSet& set);

}  // namespace gbpd

#pragma once

// Restriction of generators to coordinate-aligned flats
// H_K = {x : x_k = h_k, k in K}. Within H_K the distance to (s, M, w) is again
// a GBPD distance in the free coordinates with
//   seed    s_F - M_FF⁻¹ M_FK (h_K - s_K)
//   matrix  M_FF
//   weight  w - (h_K - s_K)ᵀ S (h_K - s_K),  S = Schur complement of M_FF.
// Free coordinates keep their original relative order.
//
// For arbitrary flats rotate first (see transform.hpp) so the flat becomes
// axis-aligned, then section.

#include <span>
#include <vector>

#include "gbpd/geometry.hpp"

namespace gbpd {

class FlatSpec {
public:
    FlatSpec() = default;
    // `axes` are 0-based and need not be sorted; they are stored sorted with
    // their values permuted alongside.
    FlatSpec(int dim, std::vector<int> axes, std::vector<double> values);

    int dim() const { return dim_; }
    int reduced_dim() const { return dim_ - static_cast<int>(axes_.size()); }
    const std::vector<int>& axes() const { return axes_; }
    const std::vector<double>& values() const { return values_; }
    const std::vector<int>& free_axes() const { return free_; }

    // Embeds a point of the flat given in free coordinates.
    Vec embed(const Vec& reduced) const;
    // Drops the fixed coordinates of x.
    Vec project(const Vec& x) const;

private:
    int dim_ = 0;
    std::vector<int> axes_;
    std::vector<double> values_;
    std::vector<int> free_;
};

Generator section_affine(const Generator& g, const FlatSpec& flat);

// The hyperplane x_axis = h (0-based axis); identical to section_affine with a
// single fixed axis.
Generator section_hyperplane(const Generator& g, int axis, double h);

// Every generator is reduced, including those whose cells miss the flat.
GeneratorSet section_set(const GeneratorSet& set, const FlatSpec& flat);

}  // namespace gbpd

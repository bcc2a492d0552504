#pragma once

// Rasterization of a GBPD onto a regular grid of pixel/voxel centers.
//
// Labels are resolved under the total order (distance, generator index): the
// smallest distance wins and ties go to the lower index. All renderers share
// this order and the same distance arithmetic, so their outputs are
// bit-identical for identical inputs, independent of thread count.

#include <array>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <vector>

#include "gbpd/geometry.hpp"

namespace gbpd {

inline constexpr std::uint32_t kNoLabel = std::numeric_limits<std::uint32_t>::max();

// Point (i_0..i_{d-1}) sits at origin + (i_j + 1/2) spacing_j. Linear indices
// run with axis 0 fastest.
class GridSpec {
public:
    GridSpec() = default;
    GridSpec(Vec origin, Vec spacing, std::vector<std::size_t> counts);

    int dim() const { return origin_.dim(); }
    const Vec& origin() const { return origin_; }
    const Vec& spacing() const { return spacing_; }
    std::size_t count(int axis) const { return counts_[static_cast<std::size_t>(axis)]; }
    std::vector<std::size_t> counts() const;
    std::size_t total() const { return total_; }

    double coord(int axis, std::size_t i) const {
        return origin_[axis] + (static_cast<double>(i) + 0.5) * spacing_[axis];
    }
    std::array<std::size_t, kMaxDim> unravel(std::size_t linear) const;
    Vec point(std::size_t linear) const;
    // Window [origin, origin + counts·spacing].
    AxisBox window() const;

private:
    Vec origin_;
    Vec spacing_;
    std::array<std::size_t, kMaxDim> counts_{};
    std::size_t total_ = 0;
};

struct IndexRange {
    std::size_t begin = 0;
    std::size_t end = 0;
    bool empty() const { return begin >= end; }
    std::size_t size() const { return empty() ? 0 : end - begin; }
};

// Half-open per-axis ranges of the centers inside the (closed) box, clipped to
// the grid; empty on an axis when the box falls between centers or outside.
std::vector<IndexRange> grid_points_in_box(const GridSpec& grid, const AxisBox& box);

struct LabelImage {
    GridSpec grid;
    std::vector<std::uint32_t> labels;
    std::vector<double> best_dist;
};

struct RenderStats {
    std::size_t generators = 0;
    std::size_t points = 0;
    double t = 0.0;  // 0 for brute force
    std::uint64_t step1_evals = 0;   // distance evaluations over bounding boxes
    std::uint64_t step1_hits = 0;    // of those, dist <= t
    std::uint64_t step2_evals = 0;   // fallback brute-force evaluations
    std::uint64_t step2_points = 0;  // points untouched by step 1
    std::uint64_t skipped_generators = 0;  // section renderer: failed the hit test
};

// Optional per-point counters from step 1.
struct RenderTrace {
    std::vector<std::uint32_t> hits;    // generators with dist <= t
    std::vector<std::uint32_t> visits;  // generators whose box contains the point
};

struct RenderOptions {
    unsigned threads = 1;
    bool record_trace = false;
};

struct RenderResult {
    LabelImage image;
    RenderStats stats;
    RenderTrace trace;  // empty unless requested
};

RenderResult render_brute_force(const GridSpec& grid, const GeneratorSet& set, const RenderOptions& options = {});

// Two-step renderer: each generator scans its E_t bounding box, then any point
// no E_t reached falls back to brute force. Requires all weights >= 0
// (NegativeWeight) and t > 0 (NonpositiveT).
RenderResult render_improved(const GridSpec& grid, const GeneratorSet& set, double t,
                             const RenderOptions& options = {});

// Renders the section of a d-dimensional set by the hyperplane x_axis = h
// (0-based axis) on a (d-1)-dimensional grid in the free coordinates.
// Generators whose E_t misses the hyperplane skip step 1 but still take part
// in the fallback. Output equals render_brute_force on the sectioned set.
RenderResult render_section_improved(const GridSpec& grid, const GeneratorSet& set, int axis, double h, double t,
                                     const RenderOptions& options = {});

// Brute-force label of an arbitrary point under the shared total order.
std::uint32_t nearest_generator(const Vec& x, const GeneratorSet& set);

}  // namespace gbpd

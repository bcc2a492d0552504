#include "gbpd/render.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <thread>

#include "gbpd/section.hpp"

namespace gbpd {

GridSpec::GridSpec(Vec origin, Vec spacing, std::vector<std::size_t> counts) : origin_(origin), spacing_(spacing) {
    const int d = origin.dim();
    if (spacing.dim() != d || static_cast<int>(counts.size()) != d)
        fail(ErrorCode::DimensionMismatch, "grid origin, spacing and counts must share one dimension");
    total_ = 1;
    for (int a = 0; a < d; ++a) {
        if (!(spacing[a] > 0.0) || !std::isfinite(spacing[a]))
            fail(ErrorCode::InvalidArgument, "grid spacing must be positive");
        if (counts[static_cast<std::size_t>(a)] == 0) fail(ErrorCode::InvalidArgument, "grid counts must be positive");
        counts_[static_cast<std::size_t>(a)] = counts[static_cast<std::size_t>(a)];
        total_ *= counts[static_cast<std::size_t>(a)];
    }
}

std::vector<std::size_t> GridSpec::counts() const {
    return {counts_.begin(), counts_.begin() + dim()};
}

std::array<std::size_t, kMaxDim> GridSpec::unravel(std::size_t linear) const {
    std::array<std::size_t, kMaxDim> idx{};
    for (int a = 0; a < dim(); ++a) {
        idx[static_cast<std::size_t>(a)] = linear % count(a);
        linear /= count(a);
    }
    return idx;
}

Vec GridSpec::point(std::size_t linear) const {
    const auto idx = unravel(linear);
    Vec x(dim());
    for (int a = 0; a < dim(); ++a) x[a] = coord(a, idx[static_cast<std::size_t>(a)]);
    return x;
}

AxisBox GridSpec::window() const {
    Vec hi(dim());
    for (int a = 0; a < dim(); ++a) hi[a] = origin_[a] + static_cast<double>(count(a)) * spacing_[a];
    return AxisBox(origin_, hi);
}

std::vector<IndexRange> grid_points_in_box(const GridSpec& grid, const AxisBox& box) {
    if (box.dim() != grid.dim()) fail(ErrorCode::DimensionMismatch, "box and grid differ in dimension");
    std::vector<IndexRange> ranges(static_cast<std::size_t>(grid.dim()));
    for (int a = 0; a < grid.dim(); ++a) {
        const std::size_t n = grid.count(a);
        const double lo = box.lower[a];
        const double hi = box.upper[a];
        // Estimate from the closed form, then settle against coord() itself so
        // membership agrees exactly with the coordinates the renderers use.
        auto guess = [&](double v) {
            const double f = std::ceil((v - grid.origin()[a]) / grid.spacing()[a] - 0.5);
            if (!(f > 0.0)) return std::size_t{0};
            if (f >= static_cast<double>(n)) return n;
            return static_cast<std::size_t>(f);
        };
        std::size_t b = guess(lo);
        while (b > 0 && grid.coord(a, b - 1) >= lo) --b;
        while (b < n && grid.coord(a, b) < lo) ++b;
        std::size_t e = std::max(b, guess(hi));
        while (e > b && grid.coord(a, e - 1) > hi) --e;
        while (e < n && grid.coord(a, e) <= hi) ++e;
        ranges[static_cast<std::size_t>(a)] = {b, e};
    }
    return ranges;
}

namespace {

// Flat copy of a generator for the inner loops. dist() must round exactly like
// quadratic_form() in geometry.hpp: same operation order, no contraction.
template <int D>
struct Packed {
    double seed[D];
    double m[D * D];
    double weight;

    explicit Packed(const Generator& g) : weight(g.weight) {
        for (int i = 0; i < D; ++i) {
            seed[i] = g.seed[i];
            for (int j = 0; j < D; ++j) m[i * D + j] = g.aniso(i, j);
        }
    }

    double dist(const double* x) const {
        double diff[D];
        for (int i = 0; i < D; ++i) diff[i] = x[i] - seed[i];
        double q = 0.0;
        for (int i = 0; i < D; ++i) {
            double row = 0.0;
            for (int j = 0; j < D; ++j) row += m[i * D + j] * diff[j];
            q += diff[i] * row;
        }
        return q - weight;
    }
};

// Run fn(worker) on `workers` threads (inline when there is one).
void run_workers(unsigned workers, const std::function<void(unsigned)>& fn) {
    if (workers <= 1) {
        fn(0);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(fn, w);
    for (auto& th : pool) th.join();
}

std::pair<std::size_t, std::size_t> chunk(std::size_t total, unsigned parts, unsigned index) {
    const std::size_t base = total / parts;
    const std::size_t extra = total % parts;
    const std::size_t begin = index * base + std::min<std::size_t>(index, extra);
    return {begin, begin + base + (index < extra ? 1 : 0)};
}

struct WorkerCounts {
    std::uint64_t step1_evals = 0;
    std::uint64_t step1_hits = 0;
    std::uint64_t step2_evals = 0;
    std::uint64_t step2_points = 0;
};

template <int D>
class Rasterizer {
public:
    Rasterizer(const GridSpec& grid, const GeneratorSet& set, const RenderOptions& options)
        : grid_(grid), options_(options) {
        packed_.reserve(set.size());
        for (const auto& g : set) packed_.emplace_back(g);
        for (int a = 0; a < D; ++a) {
            auto& c = coords_[a];
            c.resize(grid.count(a));
            for (std::size_t i = 0; i < c.size(); ++i) c[i] = grid.coord(a, i);
        }
        for (int a = 0; a < D; ++a) stride_[a] = a == 0 ? 1 : stride_[a - 1] * grid.count(a - 1);
    }

    RenderResult run(const std::vector<std::vector<IndexRange>>* boxes, double t) {
        RenderResult out;
        out.image.grid = grid_;
        out.image.labels.assign(grid_.total(), kNoLabel);
        out.image.best_dist.assign(grid_.total(), std::numeric_limits<double>::infinity());
        if (options_.record_trace) {
            out.trace.hits.assign(grid_.total(), 0);
            out.trace.visits.assign(grid_.total(), 0);
        }
        const unsigned threads = std::max(1u, options_.threads);
        std::vector<WorkerCounts> counts(threads);

        if (boxes) {
            // Workers own disjoint slabs of the last axis, so every point has a
            // single writer and the per-point minimum is schedule independent.
            const std::size_t slabs = grid_.count(D - 1);
            const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(threads, slabs));
            run_workers(workers, [&](unsigned w) {
                const auto [lo, hi] = chunk(slabs, workers, w);
                step1(*boxes, t, lo, hi, out, counts[w]);
            });
        }

        const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(threads, grid_.total()));
        run_workers(workers, [&](unsigned w) {
            const auto [lo, hi] = chunk(grid_.total(), workers, w);
            step2(lo, hi, out, counts[w]);
        });

        out.stats.generators = packed_.size();
        out.stats.points = grid_.total();
        out.stats.t = boxes ? t : 0.0;
        for (const auto& c : counts) {
            out.stats.step1_evals += c.step1_evals;
            out.stats.step1_hits += c.step1_hits;
            out.stats.step2_evals += c.step2_evals;
            out.stats.step2_points += c.step2_points;
        }
        return out;
    }

private:
    void step1(const std::vector<std::vector<IndexRange>>& boxes, double t, std::size_t slab_lo,
               std::size_t slab_hi, RenderResult& out, WorkerCounts& counts) const {
        auto& labels = out.image.labels;
        auto& best = out.image.best_dist;
        const bool trace = options_.record_trace;
        for (std::size_t gi = 0; gi < packed_.size(); ++gi) {
            const auto& ranges = boxes[gi];
            if (ranges.empty()) continue;  // inactive generator
            std::array<IndexRange, D> r;
            bool empty = false;
            for (int a = 0; a < D; ++a) {
                r[a] = ranges[static_cast<std::size_t>(a)];
                if (a == D - 1) r[a] = {std::max(r[a].begin, slab_lo), std::min(r[a].end, slab_hi)};
                empty = empty || r[a].empty();
            }
            if (empty) continue;
            const Packed<D>& g = packed_[gi];
            const auto label = static_cast<std::uint32_t>(gi);
            std::array<std::size_t, D> idx;
            for (int a = 0; a < D; ++a) idx[a] = r[a].begin;
            double x[D];
            while (true) {
                std::size_t base = 0;
                for (int a = 1; a < D; ++a) {
                    x[a] = coords_[a][idx[a]];
                    base += idx[a] * stride_[a];
                }
                for (std::size_t i0 = r[0].begin; i0 < r[0].end; ++i0) {
                    x[0] = coords_[0][i0];
                    const std::size_t p = base + i0;
                    const double d = g.dist(x);
                    ++counts.step1_evals;
                    if (trace) ++out.trace.visits[p];
                    if (d <= t) {
                        ++counts.step1_hits;
                        if (trace) ++out.trace.hits[p];
                        if (d < best[p] || (d == best[p] && label < labels[p])) {
                            best[p] = d;
                            labels[p] = label;
                        }
                    }
                }
                int a = 1;
                for (; a < D; ++a) {
                    if (++idx[a] < r[a].end) break;
                    idx[a] = r[a].begin;
                }
                if (a >= D) break;
            }
        }
    }

    void step2(std::size_t lo, std::size_t hi, RenderResult& out, WorkerCounts& counts) const {
        auto& labels = out.image.labels;
        auto& best = out.image.best_dist;
        const std::size_t n = packed_.size();
        double x[D];
        for (std::size_t p = lo; p < hi; ++p) {
            if (labels[p] != kNoLabel) continue;
            std::size_t rest = p;
            for (int a = 0; a < D; ++a) {
                x[a] = coords_[a][rest % grid_.count(a)];
                rest /= grid_.count(a);
            }
            double bd = packed_[0].dist(x);
            std::uint32_t bl = 0;
            for (std::size_t gi = 1; gi < n; ++gi) {
                const double d = packed_[gi].dist(x);
                if (d < bd) {
                    bd = d;
                    bl = static_cast<std::uint32_t>(gi);
                }
            }
            labels[p] = bl;
            best[p] = bd;
            counts.step2_evals += n;
            ++counts.step2_points;
        }
    }

    const GridSpec& grid_;
    RenderOptions options_;
    std::vector<Packed<D>> packed_;
    std::array<std::vector<double>, D> coords_;
    std::array<std::size_t, D> stride_{};
};

template <class Fn>
RenderResult dispatch(int dim, Fn&& fn) {
    switch (dim) {
        case 1: return fn.template operator()<1>();
        case 2: return fn.template operator()<2>();
        case 3: return fn.template operator()<3>();
        case 4: return fn.template operator()<4>();
        default: fail(ErrorCode::UnsupportedDimension, "unsupported dimension " + std::to_string(dim));
    }
}

void check_render_inputs(const GridSpec& grid, const GeneratorSet& set) {
    if (grid.dim() != set.dim())
        fail(ErrorCode::DimensionMismatch, "grid dimension " + std::to_string(grid.dim()) +
                                               " does not match generator dimension " + std::to_string(set.dim()));
    if (set.size() >= kNoLabel) fail(ErrorCode::InvalidArgument, "too many generators for 32-bit labels");
}

void check_improved_inputs(const GeneratorSet& set, double t) {
    if (!(t > 0.0) || !std::isfinite(t)) fail(ErrorCode::NonpositiveT, "t must be positive and finite");
    if (set.min_weight() < 0.0)
        fail(ErrorCode::NegativeWeight, "improved renderer requires non-negative weights (normalize first)");
}

// Scan ranges for one generator's E_t box, widened by a relative hair so that
// any point whose computed distance is <= t is enumerated even when the box
// corners round inward.
std::vector<IndexRange> scan_ranges(const GridSpec& grid, const Generator& g, double t) {
    const AxisBox box = bounding_box(g, t);
    Vec lo = box.lower, hi = box.upper;
    for (int a = 0; a < g.dim(); ++a) {
        const double pad = 1e-10 * (0.5 * (hi[a] - lo[a]) + std::abs(g.seed[a]));
        lo[a] -= pad;
        hi[a] += pad;
    }
    return grid_points_in_box(grid, AxisBox(lo, hi));
}

}  // namespace

RenderResult render_brute_force(const GridSpec& grid, const GeneratorSet& set, const RenderOptions& options) {
    check_render_inputs(grid, set);
    return dispatch(grid.dim(), [&]<int D>() { return Rasterizer<D>(grid, set, options).run(nullptr, 0.0); });
}

RenderResult render_improved(const GridSpec& grid, const GeneratorSet& set, double t, const RenderOptions& options) {
    check_render_inputs(grid, set);
    check_improved_inputs(set, t);
    std::vector<std::vector<IndexRange>> boxes;
    boxes.reserve(set.size());
    for (const auto& g : set) boxes.push_back(scan_ranges(grid, g, t));
    return dispatch(grid.dim(), [&]<int D>() { return Rasterizer<D>(grid, set, options).run(&boxes, t); });
}

RenderResult render_section_improved(const GridSpec& grid, const GeneratorSet& set, int axis, double h, double t,
                                     const RenderOptions& options) {
    if (set.dim() < 2) fail(ErrorCode::InvalidFlat, "hyperplane sections need dimension >= 2");
    check_improved_inputs(set, t);
    const FlatSpec flat(set.dim(), {axis}, {h});
    const GeneratorSet reduced = section_set(set, flat);
    check_render_inputs(grid, reduced);

    std::vector<std::vector<IndexRange>> boxes(set.size());
    std::uint64_t skipped = 0;
    for (std::size_t i = 0; i < set.size(); ++i) {
        const Generator& g = set[i];
        const double offset = h - g.seed[axis];
        // E_t meets the hyperplane in a set of positive measure iff
        // (h - s_k)² < (t + w)(M⁻¹)_kk. The small slack only admits
        // borderline cases, which the reduced-radius check below settles.
        const bool hit = offset * offset < (t + g.weight) * g.aniso.inverse()(axis, axis) * (1.0 + 1e-12);
        const Generator& r = reduced[i];
        if (!hit || !(t + r.weight > 0.0)) {
            ++skipped;
            continue;
        }
        boxes[i] = scan_ranges(grid, r, t);
    }
    RenderResult out =
        dispatch(grid.dim(), [&]<int D>() { return Rasterizer<D>(grid, reduced, options).run(&boxes, t); });
    out.stats.skipped_generators = skipped;
    return out;
}

std::uint32_t nearest_generator(const Vec& x, const GeneratorSet& set) {
    if (x.dim() != set.dim()) fail(ErrorCode::DimensionMismatch, "point and generator set differ in dimension");
    double bd = dist_unchecked(x.values(), set[0]);
    std::uint32_t bl = 0;
    for (std::size_t i = 1; i < set.size(); ++i) {
        const double d = dist_unchecked(x.values(), set[i]);
        if (d < bd) {
            bd = d;
            bl = static_cast<std::uint32_t>(i);
        }
    }
    return bl;
}

}  // namespace gbpd

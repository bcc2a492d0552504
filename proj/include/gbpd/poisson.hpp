#pragma once

// Marked stationary Poisson generators and the cost model of the two-step
// renderer.
//
// With n̄₁ = λ E[V_d(E_t)] the mean number of ellipsoids covering a point and
// n̄_R = λ V_d(W ⊕ R B^d) the mean number of generators considered, the
// expected distance evaluations per point are
//     n̄ = n̄₁ + exp(-n̄₁) (n̄_R - n̄₁),
// minimized where exp(n̄₁) + n̄₁ = n̄_R + 1. Counting whole bounding boxes
// instead of ellipsoids inflates step 1 by at most a factor c, giving the
// optimum c exp(n̄₁) + n̄₁ = n̄_R + 1.

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "gbpd/geometry.hpp"
#include "gbpd/render.hpp"

namespace gbpd {

// 64-bit Mersenne Twister (std::mt19937_64, whose output sequence is fixed by
// the standard) with hand-written variate transforms, so a seed reproduces
// the same stream on every conforming platform. Seeds are whitened through
// splitmix64 first.
class Rng {
public:
    explicit Rng(std::uint64_t seed);

    std::uint64_t next_u64() { return engine_(); }
    // Uniform on [0, 1) with 53 random bits.
    double uniform();
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    // Standard normal (Box-Muller, one value per call).
    double normal();
    // Poisson variate by counting unit-rate exponential arrivals in [0, mean].
    std::uint64_t poisson(double mean);

private:
    std::mt19937_64 engine_;
};

std::uint64_t splitmix64(std::uint64_t x);
// Seed for realization `index` derived from a base seed.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index);

// Haar-distributed rotation in SO(d).
Mat random_rotation(int dim, Rng& rng);

struct MarkModel {
    double r_min = 1.0;  // semi-axis bounds of {x : xᵀMx <= 1}
    double r_max = 1.0;
    double w_max = 0.0;  // weights uniform on [0, w_max]

    void validate() const;
};

struct PoissonConfig {
    double intensity = 1.0;  // λ, seeds per unit volume
    AxisBox window;
    double halo = 0.0;  // R
    std::uint64_t seed = 0;

    void validate() const;
};

// Seeds of one realization restricted to W ⊕ R B^d, with marks. May be empty.
// Seeds are drawn in the dilated box W ⊕ [-R, R]^d and thinned to the exact
// dilation, which keeps the count Poisson with mean λ V_d(W ⊕ R B^d).
std::vector<Generator> sample_marked_points(const PoissonConfig& cfg, const MarkModel& marks);

// As above; throws InvalidArgument when the realization is empty.
GeneratorSet sample_generators(const PoissonConfig& cfg, const MarkModel& marks);

// λ × mean ellipsoid volume over the set's marks (plug-in estimate).
double mean_n1(const GeneratorSet& set, double intensity, double t);

// λ V_d(W ⊕ R B^d) by the Steiner formula for a box.
double mean_nR(double intensity, const AxisBox& window, double halo);

// n̄₁ + exp(-n̄₁)(n̄_R - n̄₁). Defined for any inputs; values with n̄₁ > n̄_R
// are outside the model's meaningful range.
double mean_total(double n1, double nR);

// Root of exp(x) + x = n̄_R + 1 on [0, log(n̄_R + 1)], bisected to full
// double precision. Throws InvalidArgument for n̄_R < 0.
double optimal_n1(double nR);

struct CompletedOptimum {
    double n1 = 0.0;            // root of c exp(x) + x = n̄_R + 1
    double n1_bound = 0.0;      // log(n̄_R + 1) - log(c)
    double total_bound = 0.0;   // c (log(n̄_R + 1) + 1 - log(c))
    bool feasible = true;       // false when n̄_R + 1 < c (n1 is then 0)
};
CompletedOptimum optimal_n1_completed(double nR, double c);

// The t > 0 with mean_n1(set, λ, t) = target. Throws InvalidArgument for
// target <= 0 and InfeasibleTarget when every t > 0 already exceeds target.
double solve_t_for_n1(double target, const GeneratorSet& set, double intensity);

// Mean bounding-box volume over mean ellipsoid volume (>= 1).
double box_ellipsoid_ratio(const GeneratorSet& set, double t);

struct ComplexityReport {
    double t = 0.0;
    std::size_t reps = 0;
    double intensity = 0.0;
    double erosion = 0.0;              // measurement window shrink radius
    std::size_t measured_points = 0;   // per realization

    // Predictions (n̄₁ averaged over the realized marks of all reps).
    double nR = 0.0;
    double n1 = 0.0;
    double n2 = 0.0;
    double n = 0.0;
    double void_probability = 0.0;     // exp(-n̄₁)

    // Empirical per-point means over the measurement window, with standard
    // errors across realizations.
    double n1_emp = 0.0, n1_se = 0.0;
    double uncovered_emp = 0.0, uncovered_se = 0.0;
    double n2_emp = 0.0, n2_se = 0.0;
    double n_emp = 0.0, n_se = 0.0;       // step-1 hits + step-2 evals
    double n_box_emp = 0.0, n_box_se = 0.0;  // step-1 box evals + step-2 evals
    double brute_emp = 0.0;               // realized generator count

    double c = 0.0;               // E[V(B_t)] / E[V(E_t)], realized marks
    double completed_bound = 0.0; // c n̄₁ + exp(-n̄₁)(n̄_R - n̄₁)
    double optimal_bound = 0.0;   // c (log(n̄_R + 1) + 1 - log c)

    std::vector<std::string> notes;
};

// Renders `reps` independent realizations (seed derive_seed(cfg.seed, r))
// with render_improved at threshold t and compares the step counters at the
// grid points of W eroded by sqrt(t + w_max) r_max against the predictions.
ComplexityReport verify_complexity(const PoissonConfig& cfg, const MarkModel& marks, const GridSpec& grid, double t,
                                   std::size_t reps, const RenderOptions& options = {});

}  // namespace gbpd

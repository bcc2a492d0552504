#include <doctest.h>

#include <cmath>
#include <numbers>

#include "gbpd/error.hpp"
#include "gbpd/poisson.hpp"
#include "support.hpp"

using namespace gbpd;
using std::numbers::pi;
using testing::Random;

namespace {

GeneratorSet unit_disk_set(double w = 0.0) { return GeneratorSet({Generator(Vec{0, 0}, SpdMatrix::identity(2), w)}); }

PoissonConfig square_config(double intensity, double halo, std::uint64_t seed) {
    PoissonConfig cfg;
    cfg.intensity = intensity;
    cfg.window = AxisBox(Vec{0, 0}, Vec{1, 1});
    cfg.halo = halo;
    cfg.seed = seed;
    return cfg;
}

}  // namespace

TEST_CASE("rng is reproducible and well behaved") {
    Rng a(42), b(42), c(43);
    for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
    CHECK(Rng(42).next_u64() != c.next_u64());
    CHECK(derive_seed(1, 0) != derive_seed(1, 1));
    CHECK(derive_seed(7, 3) == derive_seed(7, 3));
    Rng r(1);
    double s = 0, s2 = 0, n = 0;
    const int N = 200000;
    for (int i = 0; i < N; ++i) {
        const double u = r.uniform();
        CHECK((u >= 0.0 && u < 1.0));
        s += u;
        const double z = r.normal();
        n += z;
        s2 += z * z;
    }
    CHECK(s / N == doctest::Approx(0.5).epsilon(0.01));
    CHECK(n / N == doctest::Approx(0.0).scale(1.0).epsilon(0.01));
    CHECK(s2 / N == doctest::Approx(1.0).epsilon(0.01));
    double ps = 0;
    for (int i = 0; i < 20000; ++i) ps += static_cast<double>(r.poisson(3.5));
    CHECK(ps / 20000 == doctest::Approx(3.5).epsilon(0.02));
    CHECK(r.poisson(0.0) == 0);
}

TEST_CASE("random rotations are proper orthogonal") {
    Rng r(5);
    for (int d = 1; d <= 4; ++d)
        for (int i = 0; i < 50; ++i) {
            const Mat q = random_rotation(d, r);
            const Mat p = q.transpose() * q;
            for (int a = 0; a < d; ++a)
                for (int b = 0; b < d; ++b) CHECK(p(a, b) == doctest::Approx(a == b ? 1.0 : 0.0).scale(1.0).epsilon(1e-12));
            CHECK(Random::determinant(q) == doctest::Approx(1.0).epsilon(1e-12));
        }
}

TEST_CASE("config validation") {
    MarkModel m;
    m.r_min = 0.0;
    CHECK_THROWS_AS(m.validate(), Error);
    m.r_min = 2.0;
    m.r_max = 1.0;
    CHECK_THROWS_AS(m.validate(), Error);
    m.r_max = 3.0;
    m.w_max = -1.0;
    CHECK_THROWS_AS(m.validate(), Error);
    PoissonConfig c = square_config(0.0, 0.0, 0);
    CHECK_THROWS_AS(c.validate(), Error);
    c = square_config(1.0, -1.0, 0);
    CHECK_THROWS_AS(c.validate(), Error);
}

TEST_CASE("sample count has Poisson mean lambda V") {
    const PoissonConfig base = square_config(30.0, 0.2, 0);
    MarkModel marks;
    marks.r_min = 0.01;
    marks.r_max = 0.05;
    const double mean = mean_nR(base.intensity, base.window, base.halo);
    const int draws = 10000;
    double s = 0.0;
    for (int i = 0; i < draws; ++i) {
        PoissonConfig cfg = base;
        cfg.seed = static_cast<std::uint64_t>(i);
        s += static_cast<double>(sample_marked_points(cfg, marks).size());
    }
    const double se = std::sqrt(mean / draws);
    CHECK(std::abs(s / draws - mean) < 3 * se);
}

TEST_CASE("sampled marks respect the model") {
    PoissonConfig cfg = square_config(500.0, 0.1, 9);
    MarkModel marks;
    marks.r_min = 0.02;
    marks.r_max = 0.08;
    marks.w_max = 0.3;
    const GeneratorSet set = sample_generators(cfg, marks);
    for (const auto& g : set) {
        // semi-axes 1/sqrt(eig M); eig via 2x2 closed form
        const double a = g.aniso(0, 0), b = g.aniso(1, 1), c = g.aniso(0, 1);
        const double mid = 0.5 * (a + b), rad = std::sqrt(0.25 * (a - b) * (a - b) + c * c);
        CHECK(1.0 / std::sqrt(mid - rad) <= marks.r_max * (1 + 1e-12));
        CHECK(1.0 / std::sqrt(mid + rad) >= marks.r_min * (1 - 1e-12));
        CHECK((g.weight >= 0.0 && g.weight <= marks.w_max));
        // inside W ⊕ R B²
        const double dx = std::max({0.0, -g.seed[0], g.seed[0] - 1.0});
        const double dy = std::max({0.0, -g.seed[1], g.seed[1] - 1.0});
        CHECK(dx * dx + dy * dy <= 0.01 * (1 + 1e-12));
    }
    MarkModel iso;
    iso.r_min = iso.r_max = 0.05;
    for (const auto& g : sample_generators(cfg, iso)) {
        CHECK(g.aniso(0, 0) == doctest::Approx(400.0).epsilon(1e-12));
        CHECK(g.aniso(0, 1) == doctest::Approx(0.0).scale(400.0).epsilon(1e-12));
        CHECK(g.weight == 0.0);
        // ball of radius r sqrt(t)
        CHECK(bounding_box(g, 4.0).half_widths()[0] == doctest::Approx(0.1).epsilon(1e-12));
    }
    PoissonConfig empty = square_config(1e-6, 0.0, 1);
    CHECK(sample_marked_points(empty, iso).empty());
    CHECK_THROWS_AS(sample_generators(empty, iso), Error);
    CHECK(sample_generators(cfg, marks).size() == set.size());
}

TEST_CASE("mean_n1") {
    CHECK(mean_n1(unit_disk_set(), 3.0, 2.0) == doctest::Approx(3.0 * pi * 2.0).epsilon(1e-15));
    CHECK(mean_n1(unit_disk_set(), 0.0, 2.0) == 0.0);
    CHECK_THROWS_AS(mean_n1(unit_disk_set(), 1.0, 0.0), Error);
    double prev = 0.0;
    Random rng(50);
    const GeneratorSet set = rng.set(10, 3, 0, 1, 0.5);
    for (double t = 0.01; t < 5; t *= 1.3) {
        const double v = mean_n1(set, 10.0, t);
        CHECK(v > prev);
        prev = v;
    }
}

TEST_CASE("mean_n1 matches germ-grain coverage counts") {
    PoissonConfig cfg;
    cfg.intensity = 300.0;
    cfg.window = AxisBox(Vec{0, 0}, Vec{1, 1});
    MarkModel marks;
    marks.r_min = 0.02;
    marks.r_max = 0.08;
    marks.w_max = 0.5;
    // pick t so that λ E[V] is about 2 for this mark law
    const double t = 1.5;
    cfg.halo = std::sqrt(t + marks.w_max) * marks.r_max;
    Random rng(51);
    double covered = 0.0, predicted = 0.0;
    const int reps = 200, probes = 50;
    for (int r = 0; r < reps; ++r) {
        cfg.seed = derive_seed(77, static_cast<std::uint64_t>(r));
        const GeneratorSet set = sample_generators(cfg, marks);
        predicted += mean_n1(set, cfg.intensity, t);
        for (int i = 0; i < probes; ++i) {
            const Vec x = rng.vec(2, 0, 1);
            for (const auto& g : set) covered += testing::oracle_dist(x, g) <= t;
        }
    }
    predicted /= reps;
    CHECK(predicted > 1.0);
    CHECK(predicted < 4.0);
    CHECK(covered / (reps * probes) == doctest::Approx(predicted).epsilon(0.05));
}

TEST_CASE("mean_nR Steiner volume") {
    const AxisBox sq(Vec{0, 0}, Vec{1, 1});
    CHECK(mean_nR(2.0, sq, 0.0) == 2.0);
    CHECK(mean_nR(1.0, sq, 1.0) == doctest::Approx(1 + 4 + pi).epsilon(1e-15));
    const AxisBox cube(Vec{0, 0, 0}, Vec{1, 1, 1});
    CHECK(mean_nR(1.0, cube, 1.0) == doctest::Approx(1 + 6 + 3 * pi + 4 * pi / 3).epsilon(1e-15));
    const AxisBox rect(Vec{0, 0}, Vec{2, 3});
    CHECK(mean_nR(1.0, rect, 0.5) == doctest::Approx(6 + 2 * 5 * 0.5 + pi * 0.25).epsilon(1e-15));
    CHECK_THROWS_AS(mean_nR(1.0, sq, -1.0), Error);

    // Monte Carlo point-in-dilation oracle
    Random rng(52);
    for (int d : {2, 3}) {
        Vec lo(d), hi(d);
        for (int a = 0; a < d; ++a) hi[a] = 0.5 + a * 0.4;
        const AxisBox w(lo, hi);
        const double R = 0.6;
        Vec blo(d), bhi(d);
        double bvol = 1.0;
        for (int a = 0; a < d; ++a) {
            blo[a] = -R;
            bhi[a] = hi[a] + R;
            bvol *= bhi[a] - blo[a];
        }
        const int N = 400000;
        int in = 0;
        for (int i = 0; i < N; ++i) {
            double q = 0;
            for (int a = 0; a < d; ++a) {
                const double x = rng.uniform(blo[a], bhi[a]);
                const double e = std::max({0.0, -x, x - hi[a]});
                q += e * e;
            }
            in += q <= R * R;
        }
        CHECK(mean_nR(1.0, w, R) == doctest::Approx(bvol * in / N).epsilon(0.01));
    }
}

TEST_CASE("mean_total") {
    CHECK(mean_total(0.0, 42.0) == 42.0);
    CHECK(mean_total(1.0, 10.0) == doctest::Approx(4.3109149705429815).epsilon(1e-15));
    CHECK(mean_total(60.0, 100.0) == doctest::Approx(60.0).epsilon(1e-20));
}

TEST_CASE("optimal_n1") {
    CHECK(optimal_n1(0.0) == 0.0);
    CHECK(optimal_n1(std::exp(1.0)) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(optimal_n1(100.0) == doctest::Approx(4.568829494840816).epsilon(1e-14));
    const double oracle = testing::oracle_bisect([](double x) { return std::exp(x) + x - 101.0; }, 0, 10);
    CHECK(optimal_n1(100.0) == doctest::Approx(oracle).epsilon(1e-14));
    for (double nR : {0.0, 1.0, 10.0, 1e2, 1e3, 1e6}) {
        const double x = optimal_n1(nR);
        CHECK(std::abs(std::exp(x) + x - (nR + 1)) <= 1e-9);
        CHECK(x <= std::log(nR + 1));
        CHECK(mean_total(x, nR) <= std::log(nR + 1) + 1 + 1e-12);
    }
    CHECK_THROWS_AS(optimal_n1(-1.0), Error);
}

TEST_CASE("optimal_n1_completed") {
    for (double nR : {0.0, 1.0, 10.0, 1e2, 1e3, 1e6}) CHECK(optimal_n1_completed(nR, 1.0).n1 == optimal_n1(nR));
    const auto c2 = optimal_n1_completed(100.0, 2.0);
    CHECK(c2.n1 == doctest::Approx(3.8827716083666113).epsilon(1e-14));
    const double oracle = testing::oracle_bisect([](double x) { return 2 * std::exp(x) + x - 101.0; }, 0, 10);
    CHECK(c2.n1 == doctest::Approx(oracle).epsilon(1e-14));
    CHECK(c2.n1 <= c2.n1_bound);
    CHECK(c2.total_bound == doctest::Approx(2 * (std::log(101.0) + 1 - std::log(2.0))).epsilon(1e-15));
    CHECK(c2.feasible);
    const auto edge = optimal_n1_completed(9.0, 10.0);
    CHECK(edge.feasible);
    CHECK(edge.n1 == doctest::Approx(0.0).scale(1.0).epsilon(1e-15));
    const auto inf = optimal_n1_completed(5.0, 10.0);
    CHECK_FALSE(inf.feasible);
    CHECK(inf.n1 == 0.0);
    CHECK_THROWS_AS(optimal_n1_completed(10.0, 0.5), Error);
}

TEST_CASE("solve_t_for_n1") {
    CHECK(solve_t_for_n1(2.0, unit_disk_set(), 5.0) == doctest::Approx(2.0 / (5.0 * pi)).epsilon(1e-12));
    std::vector<Generator> same;
    for (int i = 0; i < 4; ++i) same.emplace_back(Vec{0.1 * i, 0}, SpdMatrix::identity(2), 0.05);
    const GeneratorSet w0(same);
    CHECK(solve_t_for_n1(3.0, w0, 5.0) == doctest::Approx(3.0 / (5.0 * pi) - 0.05).epsilon(1e-12));
    Random rng(53);
    for (int trial = 0; trial < 20; ++trial) {
        const GeneratorSet set = rng.set(20, 1 + trial % 3, 0, 1, 0.4);
        const double t0 = rng.uniform(0.1, 2.0);
        const double target = mean_n1(set, 40.0, t0);
        const double t = solve_t_for_n1(target, set, 40.0);
        CHECK(t == doctest::Approx(t0).epsilon(1e-9));
        CHECK(mean_n1(set, 40.0, t) == doctest::Approx(target).epsilon(1e-9));
    }
    CHECK_THROWS_AS(solve_t_for_n1(0.0, unit_disk_set(), 1.0), Error);
    // with w = 1 the smallest admissible t already gives n1 = π·λ
    try {
        solve_t_for_n1(1.0, unit_disk_set(1.0), 1.0);
        FAIL("expected InfeasibleTarget");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::InfeasibleTarget);
    }
}

TEST_CASE("box to ellipsoid ratio") {
    CHECK(box_ellipsoid_ratio(unit_disk_set(), 0.7) == doctest::Approx(4 / pi).epsilon(1e-14));
    const GeneratorSet ball({Generator(Vec{0, 0, 0}, SpdMatrix::identity(3), 0.0)});
    CHECK(box_ellipsoid_ratio(ball, 2.0) == doctest::Approx(6 / pi).epsilon(1e-14));
    const GeneratorSet aniso({Generator(Vec{0, 0}, SpdMatrix(Mat{{2, 1}, {1, 3}}), 0.0)});
    CHECK(box_ellipsoid_ratio(aniso, 1.0) >= 4 / pi - 1e-12);
}

TEST_CASE("verify_complexity smoke") {
    const PoissonConfig cfg = square_config(100.0, 0.1, 3);
    MarkModel marks;
    marks.r_min = marks.r_max = 0.05;
    const GridSpec grid = testing::square_grid(2, 16);
    const auto rep = verify_complexity(cfg, marks, grid, 1.0, 1);
    CHECK(rep.reps == 1);
    CHECK(rep.nR == doctest::Approx(mean_nR(100.0, cfg.window, 0.1)));
    CHECK(rep.n1 == doctest::Approx(100.0 * pi * 0.0025).epsilon(1e-12));
    CHECK(rep.n == doctest::Approx(mean_total(rep.n1, rep.nR)));
    CHECK(rep.measured_points > 0);
    CHECK(rep.brute_emp > 0);
    CHECK(rep.c == doctest::Approx(4 / pi).epsilon(1e-12));
    CHECK(rep.void_probability == doctest::Approx(std::exp(-rep.n1)));

    // nearly empty coverage: step 2 dominates
    const PoissonConfig sparse = square_config(20.0, 0.0, 4);
    const auto low = verify_complexity(sparse, marks, grid, 1e-4, 3);
    CHECK(low.uncovered_emp > 0.99);
    CHECK(low.n2_emp == doctest::Approx(low.brute_emp).epsilon(0.02));
}

#include <doctest.h>

#include <cmath>

#include "midstar/linalg.hpp"
#include "midstar/oracles.hpp"
#include "midstar/semiclassics.hpp"
#include "midstar/starprod.hpp"
#include "midstar/verify.hpp"

using namespace midstar;

namespace {
const Space kR2half = Space::euclidean(0.5);

GeneratingFunction quad_g1() {
    return GeneratingFunction::quadratic({{{0.4, 0.1}, {0.1, 0.3}}}, {0.2, -0.1}, 0.3);
}
GeneratingFunction quad_g2() {
    return GeneratingFunction::quadratic({{{0.2, -0.05}, {-0.05, 0.5}}}, {-0.3, 0.4}, -0.2);
}
}  // namespace

TEST_CASE("callable generating functions are validated") {
    auto ok = GeneratingFunction::callable(
        [](const Vec2& x) { return x.x * x.x + 0.5 * x.y; },
        [](const Vec2& x) { return Vec2{2 * x.x, 0.5}; },
        [](const Vec2&) { return Mat<2>{{{2.0, 0.0}, {0.0, 0.0}}}; });
    CHECK(ok.value({1, 2}) == doctest::Approx(2.0));

    CHECK_THROWS_AS(GeneratingFunction::callable(
                        [](const Vec2& x) { return x.x; },
                        [](const Vec2&) { return Vec2{0.0, 1.0}; },  // wrong gradient
                        [](const Vec2&) { return Mat<2>{}; }),
                    ValidationError);
}

TEST_CASE("newton converges in at most two steps on quadratic data") {
    Point m = Point::r2(0.3, -0.6);
    ComposeResult r = compose(kR2half, quad_g1(), quad_g2(), m);
    CHECK(r.iterations <= 2);

    // Far starting point still lands in 2 iterations (linear stationarity).
    ComposeResult far = compose(kR2half, quad_g1(), quad_g2(), m,
                                std::make_pair(Point::r2(5, 5), Point::r2(-4, 3)));
    CHECK(far.iterations <= 2);
    CHECK(far.value == doctest::Approx(r.value).epsilon(1e-12));

    // Gradient vanishes at the reported stationary point (checked by FD).
    auto phi = [&](Vec2 a, Vec2 b) {
        return quad_g1().value(a) + quad_g2().value(b) +
               area_from_midpoints(kR2half,
                                   MidpointTriple{m, Point::r2(a.x, a.y), Point::r2(b.x, b.y)});
    };
    Vec2 a = r.stationary_m12.pq(), b = r.stationary_m23.pq();
    double h = 1e-6;
    CHECK(std::abs(phi({a.x + h, a.y}, b) - phi({a.x - h, a.y}, b)) / (2 * h) < 1e-8);
    CHECK(std::abs(phi(a, {b.x, b.y + h}) - phi(a, {b.x, b.y - h})) / (2 * h) < 1e-8);
}

TEST_CASE("g2 = 0 composes to g1(m)") {
    auto zero = GeneratingFunction::quadratic({}, {0, 0}, 0.0);
    Point m = Point::r2(0.7, -0.4);
    ComposeResult r = compose(kR2half, quad_g1(), zero, m);
    CHECK(r.value == doctest::Approx(quad_g1().value(m.pq())).epsilon(1e-12));
    // The first stationary leg sits at m itself.
    CHECK((r.stationary_m12.pq() - m.pq()).norm() < 1e-10);
}

TEST_CASE("linear forms compose to (a+b).m - a x b / 2") {
    Rng rng(77);
    for (int i = 0; i < 40; ++i) {
        Vec2 a{rng.uniform(-1.5, 1.5), rng.uniform(-1.5, 1.5)};
        Vec2 b{rng.uniform(-1.5, 1.5), rng.uniform(-1.5, 1.5)};
        Point m = Point::r2(rng.uniform(-1, 1), rng.uniform(-1, 1));
        ComposeResult r = compose(kR2half, GeneratingFunction::linear(a),
                                  GeneratingFunction::linear(b), m);
        double expect = (a + b).dot(m.pq()) - 0.5 * a.cross(b);
        CHECK(r.value == doctest::Approx(expect).epsilon(1e-10));
    }
}

TEST_CASE("quadratic compose matches the hand-assembled linear system") {
    // Stationarity of g1(a) + g2(b) + 2 (a - m) x (b - m) is linear:
    //   [Q1   2J^T] [a]   [q1 lin terms]
    //   [2J   Q2  ] [b] = [q2 lin terms],  J = [[0,-1],[1,0]].
    Mat<2> q1{{{0.4, 0.1}, {0.1, 0.3}}};
    Mat<2> q2{{{0.2, -0.05}, {-0.05, 0.5}}};
    Vec2 b1{0.2, -0.1}, b2{-0.3, 0.4};
    Point m = Point::r2(0.25, -0.15);

    Mat<4> K{};
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
            K[i][j] = q1[i][j];
            K[2 + i][2 + j] = q2[i][j];
        }
    // grad_a S = -2 J (b - m) -> coupling block -2J acting on b.
    K[0][3] = 2.0;
    K[1][2] = -2.0;
    K[3][0] = 2.0;
    K[2][1] = -2.0;
    std::array<double, 4> rhs{-b1.x + 2.0 * m.x.y, -b1.y - 2.0 * m.x.x,
                              -b2.x - 2.0 * m.x.y, -b2.y + 2.0 * m.x.x};
    auto z = lu_solve<4>(K, rhs);
    Vec2 a{z[0], z[1]}, b{z[2], z[3]};
    auto g1 = GeneratingFunction::quadratic(q1, b1, 0.3);
    auto g2 = GeneratingFunction::quadratic(q2, b2, -0.2);
    double expect = g1.value(a) + g2.value(b) + 2.0 * (a - m.pq()).cross(b - m.pq());

    ComposeResult r = compose(kR2half, g1, g2, m);
    CHECK(r.value == doctest::Approx(expect).epsilon(1e-8));
    CHECK((r.stationary_m12.pq() - a).norm() < 1e-8);
    CHECK((r.stationary_m23.pq() - b).norm() < 1e-8);
}

TEST_CASE("swap symmetry of the composition") {
    Rng rng(123);
    Point m = Point::r2(0.2, 0.4);
    for (int i = 0; i < 50; ++i) {
        Vec2 a{rng.uniform(-1, 1), rng.uniform(-1, 1)};
        Vec2 b{rng.uniform(-1, 1), rng.uniform(-1, 1)};
        auto la = GeneratingFunction::linear(a);
        auto lb = GeneratingFunction::linear(b);
        ComposeResult ab = compose(kR2half, la, lb, m);
        ComposeResult ba = compose(kR2half, lb, la, m);
        double lhs = ab.value + ba.value;
        double rhs = la.value(ab.stationary_m12.pq()) + lb.value(ab.stationary_m23.pq()) +
                     lb.value(ba.stationary_m12.pq()) + la.value(ba.stationary_m23.pq());
        CHECK(std::abs(lhs - rhs) < 1e-10);
        // The sum of the two stationary areas cancels.
        CHECK(ab.value + ba.value == doctest::Approx((a + b).dot(m.pq()) * 2.0).epsilon(1e-10));
    }
}

TEST_CASE("singular hessian is reported") {
    // H = [[2I, 2J^T],[2J, 2I]] has det (2*2 - 4)^2 = 0.
    Mat<2> q{{{2.0, 0.0}, {0.0, 2.0}}};
    auto g1 = GeneratingFunction::quadratic(q, {0, 0}, 0.0);
    auto g2 = GeneratingFunction::quadratic(q, {0.1, 0.1}, 0.0);
    Point m = Point::r2(0, 0);
    CHECK_THROWS_AS(compose(kR2half, g1, g2, m), SingularHessianError);
}

TEST_CASE("stationary phase estimate: zero phases reduce to the damped product") {
    auto zero = GeneratingFunction::quadratic({}, {0, 0}, 0.0);
    double hbar = 0.5;
    DampingSpec d1{{0.2, 0.0}, 1.2};
    DampingSpec d2{{-0.1, 0.3}, 0.9};
    Point m = Point::r2(0.15, -0.05);
    Complex est = stationary_phase_estimate(Space::euclidean(hbar), zero, zero, m, hbar, d1, d2);
    // With zero phases the fields are plain gaussians, so the exact closed
    // form applies.
    GaussianExpForm oracle =
        gaussian_moyal({d1.center, d1.width, 1.0}, {d2.center, d2.width, 1.0}, hbar);
    Complex expect = oracle.eval(m.pq());
    CHECK(std::abs(est - expect) < 1e-10 * std::abs(expect));
}

TEST_CASE("stationary phase estimate matches the engine on quadratic data") {
    double hbar = 0.5;
    Space r2 = Space::euclidean(hbar);
    Mat<2> q1{{{0.3, 0.1}, {0.1, 0.25}}};
    Mat<2> q2{{{-0.2, 0.05}, {0.05, 0.4}}};
    Vec2 b1{0.3, -0.2}, b2{0.1, 0.25};
    double c1 = 0.1, c2 = -0.3;
    auto g1 = GeneratingFunction::quadratic(q1, b1, c1);
    auto g2 = GeneratingFunction::quadratic(q2, b2, c2);
    Point m = Point::r2(0.1, 0.05);
    DampingSpec d1{{0.0, 0.0}, 3.0};
    DampingSpec d2{{0.0, 0.0}, 3.0};

    Complex est = stationary_phase_estimate(r2, g1, g2, m, hbar, d1, d2);

    auto phase1 = [q1, b1, c1](const Point& p) {
        double x = p.x.x, y = p.x.y;
        return 0.5 * (q1[0][0] * x * x + 2 * q1[0][1] * x * y + q1[1][1] * y * y) + b1.x * x +
               b1.y * y + c1;
    };
    auto phase2 = [q2, b2, c2](const Point& p) {
        double x = p.x.x, y = p.x.y;
        return 0.5 * (q2[0][0] * x * x + 2 * q2[0][1] * x * y + q2[1][1] * y * y) + b2.x * x +
               b2.y * y + c2;
    };
    ScalarField f1 =
        ScalarField::oscillatory_exp(phase1, hbar, Point::r2(d1.center.x, d1.center.y), d1.width);
    ScalarField f2 =
        ScalarField::oscillatory_exp(phase2, hbar, Point::r2(d2.center.x, d2.center.y), d2.width);

    QuadratureSpec spec;
    spec.resolution = 24;
    spec.refinement_levels = 3;
    spec.truncation_radius = 11.0;
    StarResult engine = star(r2, f1, f2, m, spec);
    CAPTURE(engine.refine_error);
    CHECK(std::abs(engine.value - est) < 1e-3 * std::abs(est));

    // The pure (undamped) estimate uses the signature-phase prefactor and
    // stays within the damping perturbation of the engine value.
    Complex pure = stationary_phase_estimate(r2, g1, g2, m, hbar);
    CHECK(std::abs(pure - est) < 0.05 * std::abs(est));
    CHECK(std::arg(pure * std::conj(est)) < 0.05);
}

TEST_CASE("estimate phase equals the composed value modulo 2 pi") {
    double hbar = 0.5;
    auto g1 = quad_g1();
    auto g2 = quad_g2();
    Point m = Point::r2(0.3, 0.2);
    ComposeResult cr = compose(kR2half, g1, g2, m);
    Complex pure = stationary_phase_estimate(kR2half, g1, g2, m, hbar);
    // Strip the signature phase and compare the oscillatory part.
    Complex osc = pure / std::abs(pure);
    Complex expect = std::exp(Complex(0, cr.value / hbar + M_PI * cr.hessian_signature / 4.0));
    CHECK(std::abs(osc - expect) < 1e-10);
}

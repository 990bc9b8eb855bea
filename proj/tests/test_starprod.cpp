#include <doctest.h>

#include <cmath>

#include "midstar/linalg.hpp"
#include "midstar/oracles.hpp"
#include "midstar/starprod.hpp"

using namespace midstar;

namespace {

QuadratureSpec quick_spec(int res, int levels, double radius) {
    QuadratureSpec s;
    s.resolution = res;
    s.refinement_levels = levels;
    s.truncation_radius = radius;
    return s;
}

}  // namespace

TEST_CASE("quadrature spec validation") {
    QuadratureSpec s;
    s.resolution = 4;
    CHECK_THROWS_AS(s.validate(), ValidationError);
    s.resolution = 16;
    s.refinement_levels = 1;
    CHECK_THROWS_AS(s.validate(), ValidationError);
}

TEST_CASE("zero fields give zero") {
    Space r2 = Space::euclidean(0.5);
    ScalarField z = ScalarField::zero(SpaceKind::Euclidean2);
    QuadratureSpec spec = quick_spec(8, 2, 4.0);
    StarResult a = two_point_product(r2, z, z, Point::r2(-1, 0), Point::r2(1, 0), spec);
    CHECK(std::abs(a.value) == 0.0);
    CHECK(a.refine_error == 0.0);
    StarResult b = star(r2, z, z, Point::r2(0, 0), spec);
    CHECK(std::abs(b.value) == 0.0);
    StarResult c = star_midpoint_form(r2, z, z, Point::r2(0, 0), spec);
    CHECK(std::abs(c.value) == 0.0);
    CHECK(b.samples_used > 0);
}

TEST_CASE("two-point product: degenerate endpoints give a real positive value") {
    Space r2 = Space::euclidean(0.5);
    Point m = Point::r2(0.3, -0.2);
    ScalarField f1 = ScalarField::gaussian_bump(Point::r2(0.1, 0.0), 1.0);
    ScalarField f2 = ScalarField::gaussian_bump(Point::r2(-0.2, 0.1), 1.0);
    StarResult r = two_point_product(r2, f1, f2, m, m, quick_spec(16, 3, 9.0));
    CHECK(std::abs(r.value.imag()) < 1e-12);
    CHECK(r.value.real() > 0.0);
}

TEST_CASE("two-point product matches the reduced gaussian integral") {
    // With gaussian factors the m2 integrand is a 2-dim complex gaussian:
    //   f1((m1+m2)/2) = exp(-|m2 - u1|^2 k1 / 2),  u1 = 2 c1 - m1,  k1 = 1/(4 w1^2)
    //   phase        = [m2 x d - m1 x d] / (2 hbar),  d = m3 - m1.
    Space r2 = Space::euclidean(0.5);
    double hbar = r2.hbar();
    Point m1 = Point::r2(-0.6, 0.1);
    Point m3 = Point::r2(0.6, -0.3);
    Vec2 c1{0.2, 0.1}, c2{-0.1, 0.3};
    double w1 = 1.0, w2 = 0.8;
    ScalarField f1 = ScalarField::gaussian_bump(Point::r2(c1.x, c1.y), w1);
    ScalarField f2 = ScalarField::gaussian_bump(Point::r2(c2.x, c2.y), w2);

    Vec2 u1 = 2.0 * c1 - m1.pq();
    Vec2 u2 = 2.0 * c2 - m3.pq();
    double k1 = 1.0 / (4.0 * w1 * w1), k2 = 1.0 / (4.0 * w2 * w2);
    Vec2 d = m3.pq() - m1.pq();
    CMat<2> A{};
    A[0][0] = A[1][1] = k1 + k2;
    CVecN<2> b{k1 * u1.x + k2 * u2.x + Complex(0, 0.5 / hbar) * d.y,
               k1 * u1.y + k2 * u2.y - Complex(0, 0.5 / hbar) * d.x};
    Complex c0 = -0.5 * (k1 * u1.dot(u1) + k2 * u2.dot(u2)) -
                 Complex(0, 0.5 / hbar) * m1.pq().cross(d);
    Complex oracle = gaussian_integral<2>(A, b, c0);

    StarResult got = two_point_product(r2, f1, f2, m1, m3, quick_spec(32, 3, 10.0));
    CHECK(std::abs(got.value - oracle) < 1e-6 * std::max(1.0, std::abs(oracle)));
    CHECK(got.refine_error < 1e-6);
}

TEST_CASE("star reproduces the gaussian moyal closed form") {
    Space r2 = Space::euclidean(0.5);
    GaussianParams g1{{0.4, 0.1}, 1.0, 1.0};
    GaussianParams g2{{-0.2, 0.3}, 1.0, 1.0};
    ScalarField f1 = ScalarField::gaussian_bump(Point::r2(g1.center.x, g1.center.y), 1.0);
    ScalarField f2 = ScalarField::gaussian_bump(Point::r2(g2.center.x, g2.center.y), 1.0);
    GaussianExpForm oracle = gaussian_moyal(g1, g2, r2.hbar());

    QuadratureSpec spec = quick_spec(16, 3, 7.0);
    for (const Vec2& at : {Vec2{0, 0}, Vec2{0.5, -0.4}}) {
        StarResult r = star(r2, f1, f2, Point::r2(at.x, at.y), spec);
        Complex expect = oracle.eval(at);
        CAPTURE(at.x);
        CAPTURE(at.y);
        CHECK(std::abs(r.value - expect) < 1e-3 * std::abs(expect));
    }
}

TEST_CASE("star against a wide window approximates the identity") {
    Space r2 = Space::euclidean(0.5);
    ScalarField f1 = ScalarField::gaussian_bump(Point::r2(0.2, -0.1), 1.0);
    ScalarField window = ScalarField::gaussian_bump(Point::r2(0, 0), 30.0);
    Point m = Point::r2(0.4, 0.3);
    StarResult r = star(r2, f1, window, m, quick_spec(16, 3, 7.0));
    Complex expect = f1(r2, m);
    CHECK(std::abs(r.value - expect) < 5e-3 * std::abs(expect));
    StarResult l = star(r2, window, f1, m, quick_spec(16, 3, 7.0));
    CHECK(std::abs(l.value - expect) < 5e-3 * std::abs(expect));
}

TEST_CASE("star tends to the pointwise product as hbar shrinks") {
    Vec2 c1{0.25, 0.1}, c2{-0.25, 0.4};
    ScalarField f1 = ScalarField::gaussian_bump(Point::r2(c1.x, c1.y), 0.9);
    ScalarField f2 = ScalarField::gaussian_bump(Point::r2(c2.x, c2.y), 0.9);
    Point m = Point::r2(0.1, -0.2);
    QuadratureSpec spec = quick_spec(16, 3, 5.0);

    double errs[3];
    int k = 0;
    for (double hbar : {0.8, 0.4, 0.2}) {
        Space r2 = Space::euclidean(hbar);
        StarResult r = star(r2, f1, f2, m, spec);
        Complex fg = f1(r2, m) * f2(r2, m);
        errs[k++] = std::abs(r.value - fg);
    }
    double order1 = std::log2(errs[0] / errs[1]);
    double order2 = std::log2(errs[1] / errs[2]);
    CAPTURE(errs[0]);
    CAPTURE(errs[1]);
    CAPTURE(errs[2]);
    CHECK(order1 >= 0.9);
    CHECK(order2 >= 0.9);
}

TEST_CASE("conjugation symmetry for real fields") {
    Space r2 = Space::euclidean(0.5);
    ScalarField f1 = ScalarField::gaussian_bump(Point::r2(0.3, 0.2), 0.9);
    EmbeddingPoly poly{{{0, 0, 0, 0.5}, {1, 0, 0, 1.0}, {0, 1, 0, -0.4}}};
    ScalarField f2 = ScalarField::damped_polynomial(poly, Point::r2(-0.1, 0.1), 0.9);
    Point m = Point::r2(0.05, 0.15);
    QuadratureSpec spec = quick_spec(12, 2, 5.0);
    StarResult ab = star(r2, f1, f2, m, spec);
    StarResult ba = star(r2, f2, f1, m, spec);
    CHECK(std::abs(ab.value - std::conj(ba.value)) < 1e-8);
}

TEST_CASE("chord and midpoint charts agree on the plane") {
    Space r2 = Space::euclidean(0.5);
    ScalarField f1 = ScalarField::gaussian_bump(Point::r2(0.3, 0.0), 0.8);
    ScalarField f2 = ScalarField::gaussian_bump(Point::r2(-0.2, 0.2), 0.8);
    Point m = Point::r2(0.1, 0.1);
    QuadratureSpec spec = quick_spec(18, 3, 5.0);
    StarResult chord = star(r2, f1, f2, m, spec);
    StarResult mid = star_midpoint_form(r2, f1, f2, m, spec);
    CHECK(std::abs(chord.value - mid.value) <= chord.refine_error + mid.refine_error);
}

TEST_CASE("sphere star runs and respects conjugation symmetry") {
    Space s2 = Space::sphere(0.5);
    Point pole = make_point(s2, {0, 0, 1});
    ScalarField f1 = ScalarField::gaussian_bump(pole, 0.4);
    ScalarField f2 =
        ScalarField::gaussian_bump(make_point(s2, {std::sin(0.3), 0, std::cos(0.3)}), 0.4);
    QuadratureSpec spec = quick_spec(8, 2, 3.0);
    StarResult r = star(s2, f1, f2, pole, spec);
    CHECK(std::isfinite(r.value.real()));
    CHECK(std::isfinite(r.value.imag()));
    CHECK(r.samples_used > 0);
    StarResult c = star(s2, f2, f1, pole, spec);
    CHECK(std::abs(r.value - std::conj(c.value)) < 1e-10);
}

TEST_CASE("bit-identical results for any worker count") {
    Space r2 = Space::euclidean(0.5);
    ScalarField f1 = ScalarField::gaussian_bump(Point::r2(0.3, 0.0), 1.0);
    ScalarField f2 = ScalarField::gaussian_bump(Point::r2(0.0, -0.4), 1.0);
    Point m = Point::r2(0.0, 0.1);
    QuadratureSpec spec = quick_spec(12, 2, 5.0);
    StarResult one = star(r2, f1, f2, m, spec, 1);
    StarResult three = star(r2, f1, f2, m, spec, 3);
    StarResult eight = star(r2, f1, f2, m, spec, 8);
    CHECK(one.value.real() == three.value.real());
    CHECK(one.value.imag() == three.value.imag());
    CHECK(one.value.real() == eight.value.real());
    CHECK(one.value.imag() == eight.value.imag());
}

TEST_CASE("non-convergence gate") {
    Space r2 = Space::euclidean(0.5);
    ScalarField f1 = ScalarField::gaussian_bump(Point::r2(0, 0), 1.0);
    QuadratureSpec spec = quick_spec(8, 2, 6.0);
    spec.max_refine_error = 1e-30;
    CHECK_THROWS_AS(star(r2, f1, f1, Point::r2(0, 0), spec), NonConvergentError);
}

TEST_CASE("undamped oscillatory fields are rejected") {
    Space r2 = Space::euclidean(0.5);
    ScalarField osc = ScalarField::oscillatory_exp([](const Point& p) { return p.x.x; }, 0.5);
    ScalarField f = ScalarField::gaussian_bump(Point::r2(0, 0), 1.0);
    CHECK_THROWS_AS(star(r2, osc, f, Point::r2(0, 0), QuadratureSpec{}), ValidationError);
}

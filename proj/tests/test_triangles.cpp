#include <doctest.h>

#include <cmath>

#include "midstar/oracles.hpp"
#include "midstar/triangles.hpp"
#include "midstar/verify.hpp"

using namespace midstar;

namespace {
const Space kR2 = Space::euclidean();
const Space kH2 = Space::hyperbolic();
const Space kS2 = Space::sphere(0.5);

Point h2(double x, double y, double z) { return make_point(kH2, {x, y, z}); }
Point s2(double x, double y, double z) { return make_point(kS2, {x, y, z}); }

const CornerTriple kOctant{s2(1, 0, 0), s2(0, 1, 0), s2(0, 0, 1)};
}  // namespace

TEST_CASE("area from corners: frozen values") {
    CHECK(area_from_corners(kS2, kOctant) == doctest::Approx(M_PI / 2).epsilon(1e-14));

    Point p = h2(std::sinh(0.6), 0, std::cosh(0.6));
    CHECK(area_from_corners(kH2, {p, p, p}) == doctest::Approx(0.0));

    // Angle-defect value 2 atan(sinh^2 1 / (1 + 2 cosh 1 + cosh^2 1)).
    CornerTriple t{h2(0, 0, 1), h2(std::sinh(1.0), 0, std::cosh(1.0)),
                   h2(0, std::sinh(1.0), std::cosh(1.0))};
    double expect = 0.42078396163807286;
    CHECK(area_from_corners(kH2, t) == doctest::Approx(expect).epsilon(1e-14));
    CHECK(excess_area(kH2, t) == doctest::Approx(expect).epsilon(1e-10));

    CHECK_THROWS_AS(area_from_corners(kS2, {s2(0, 0, 1), s2(0, 0, -1), s2(1, 0, 0)}),
                    SideTooLongError);
}

TEST_CASE("eta sign majority rule") {
    CHECK(eta_sign(0.5, 0.2, 0.9) == 1);
    CHECK(eta_sign(0.5, 0.2, -0.1) == 1);
    CHECK(eta_sign(0.0, 0.0, 0.0) == 0);
    CHECK(eta_sign(-0.4, -0.1, 0.7) == -1);
    CHECK(eta_sign(0.4, -0.1, 0.0) == 0);
    CHECK(eta_sign(0.4, 0.1, 0.0) == 1);
}

TEST_CASE("area from midpoints: frozen values") {
    double c = 1.0 / std::sqrt(2.0);
    MidpointTriple oct{s2(0, c, c), s2(c, 0, c), s2(c, c, 0)};
    double det = det3(oct.alpha.x, oct.beta.x, oct.gamma.x);
    CHECK(det == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-14));
    CHECK(area_from_midpoints(kS2, oct) == doctest::Approx(M_PI / 2).epsilon(1e-13));

    Point p = s2(0.3, -0.4, std::sqrt(0.75));
    CHECK(area_from_midpoints(kS2, {p, p, p}) == doctest::Approx(0.0));

    // Octant midpoints are the midpoints of the octant corners, in order.
    MidpointTriple from_corners = midpoints_from_corners(kS2, kOctant);
    CHECK((from_corners.alpha.x - s2(c, c, 0).x).norm() < 1e-14);
    CHECK((from_corners.beta.x - s2(0, c, c).x).norm() < 1e-14);
    CHECK((from_corners.gamma.x - s2(c, 0, c).x).norm() < 1e-14);
    CHECK(area_from_midpoints(kS2, from_corners) ==
          doctest::Approx(area_from_corners(kS2, kOctant)).epsilon(1e-13));

    CHECK_THROWS_AS(
        area_from_midpoints(kH2, {h2(0, 0, 1), h2(std::sinh(2.0), 0, std::cosh(2.0)),
                                  h2(0, std::sinh(2.0), std::cosh(2.0))}),
        OutsideWError);
}

TEST_CASE("in_W predicates") {
    Point pole = h2(0, 0, 1);
    CHECK(in_W(kH2, pole, pole, pole));
    Point b = h2(std::sinh(2.0), 0, std::cosh(2.0));
    Point g = h2(0, std::sinh(2.0), std::cosh(2.0));
    double det = det3(pole.x, b.x, g.x);
    CHECK(det == doctest::Approx(std::sinh(2.0) * std::sinh(2.0)).epsilon(1e-14));
    CHECK_FALSE(in_W(kH2, pole, b, g));

    // Sphere: equal-sign condition; (+, +, -) fails.
    Point a = s2(1, 0, 0);
    Point bb = s2(0.1, std::sqrt(1 - 0.01 - 0.25), 0.5);
    Point gg = s2(-0.9, std::sqrt(1 - 0.81 - 0.01), -0.1);
    double s_ab = a.x.dot(bb.x), s_bg = bb.x.dot(gg.x), s_ga = gg.x.dot(a.x);
    REQUIRE(s_ab > 0);
    REQUIRE(s_ga < 0);
    (void)s_bg;
    CHECK_FALSE(in_W(kS2, a, bb, gg));

    CHECK(in_W(kR2, Point::r2(0, 0), Point::r2(100, -3), Point::r2(2, 7)));
}

TEST_CASE("amplitude values and divergence") {
    Point p = h2(0, 0, 1);
    CHECK(amplitude(kH2, p, p, p) == doctest::Approx(16.0).epsilon(1e-14));
    Point ps = s2(0.6, 0, 0.8);
    CHECK(amplitude(kS2, ps, ps, ps) == doctest::Approx(16.0).epsilon(1e-14));
    CHECK(amplitude(kR2, Point::r2(0, 0), Point::r2(1, 2), Point::r2(-3, 1)) == 16.0);

    // Monotone divergence as det^2 -> 1.
    double prev = 0.0;
    for (double t : {0.6, 0.75, 0.86, 0.879}) {
        Point b = h2(std::sinh(t), 0, std::cosh(t));
        Point g = h2(0, std::sinh(t), std::cosh(t));
        double a = amplitude(kH2, p, b, g);
        CHECK(a > prev);
        prev = a;
    }
    CHECK(prev > 1e3);

    Point b = h2(std::sinh(2.0), 0, std::cosh(2.0));
    Point g = h2(0, std::sinh(2.0), std::cosh(2.0));
    CHECK_THROWS_AS(amplitude(kH2, p, b, g), OutsideWError);
}

TEST_CASE("corner recovery: frozen examples") {
    CornerTriple r = corners_from_midpoints(
        kR2, {Point::r2(0, 0), Point::r2(1, 0), Point::r2(0, 1)});
    CHECK(r.a.x.x == doctest::Approx(-1.0));
    CHECK(r.a.x.y == doctest::Approx(1.0));
    CHECK(r.b.x.x == doctest::Approx(1.0));
    CHECK(r.b.x.y == doctest::Approx(-1.0));
    CHECK(r.c.x.x == doctest::Approx(1.0));
    CHECK(r.c.x.y == doctest::Approx(1.0));

    double c = 1.0 / std::sqrt(2.0);
    CornerTriple oct = corners_from_midpoints(kS2, {s2(c, c, 0), s2(0, c, c), s2(c, 0, c)});
    CHECK((oct.a.x - Vec3{1, 0, 0}).norm() < 1e-10);
    CHECK((oct.b.x - Vec3{0, 1, 0}).norm() < 1e-10);
    CHECK((oct.c.x - Vec3{0, 0, 1}).norm() < 1e-10);

    CHECK_THROWS_AS(corners_from_midpoints(kS2, {s2(1, 0, 0), s2(0, 1, 0), s2(0, 0, 1)}),
                    DegenerateMidpointsError);

    // Fully degenerate triple has the unique triangle a = b = c = p.
    Point p = s2(0.2, 0.3, std::sqrt(1 - 0.13));
    CornerTriple deg = corners_from_midpoints(kS2, {p, p, p});
    CHECK((deg.a.x - p.x).norm() < 1e-12);
    CHECK((deg.b.x - p.x).norm() < 1e-12);
}

TEST_CASE("midpoints from corners ordering and degenerate case") {
    MidpointTriple m = midpoints_from_corners(kR2, {Point::r2(0, 0), Point::r2(2, 0),
                                                    Point::r2(0, 2)});
    CHECK(m.alpha.x.x == doctest::Approx(1.0));
    CHECK(m.alpha.x.y == doctest::Approx(0.0));
    CHECK(m.beta.x.x == doctest::Approx(1.0));
    CHECK(m.beta.x.y == doctest::Approx(1.0));
    CHECK(m.gamma.x.x == doctest::Approx(0.0));
    CHECK(m.gamma.x.y == doctest::Approx(1.0));

    Point p = s2(0, 0.6, 0.8);
    MidpointTriple d = midpoints_from_corners(kS2, {p, p, p});
    CHECK((d.alpha.x - p.x).norm() < 1e-15);
}

TEST_CASE("psi map") {
    auto [a, b] = psi_map(kR2, Point::r2(0, 0), {1, 0, 0}, Point::r2(0, 1));
    CHECK(a.x.x == doctest::Approx(-0.5));
    CHECK(a.x.y == doctest::Approx(0.5));
    CHECK(b.x.x == doctest::Approx(0.5));
    CHECK(b.x.y == doctest::Approx(0.5));

    Point base = Point::r2(0.7, -0.2);
    auto [c, d] = psi_map(kR2, base, {0, 0, 0}, base);
    CHECK((c.x - base.x).norm() < 1e-15);
    CHECK((d.x - base.x).norm() < 1e-15);

    CHECK_THROWS_AS(psi_map(kS2, s2(0, 0, 1), {2.0, 0, 0}, s2(1, 0, 0)), OutsideUError);

    // Planar Jacobian of Psi is 1/4 everywhere.
    CHECK(jacobian_fd(kR2, Point::r2(0.3, 0.1), {0.4, -0.2, 0}, Point::r2(-0.5, 0.8)) ==
          doctest::Approx(0.25).epsilon(1e-8));
}

TEST_CASE("orientation antisymmetry and midpoint consistency") {
    Rng rng(1234);
    for (const Space& space : {kR2, kH2, kS2}) {
        double worst_swap = 0.0, worst_mid = 0.0, worst_round = 0.0;
        for (int i = 0; i < 1000; ++i) {
            CornerTriple t = random_triangle(rng, space, 1.2);
            double ar = area_from_corners(space, t);
            worst_swap = std::max(worst_swap,
                                  std::abs(ar + area_from_corners(space, {t.a, t.c, t.b})));
            MidpointTriple m = midpoints_from_corners(space, t);
            worst_mid = std::max(worst_mid, std::abs(area_from_midpoints(space, m) - ar));
            CornerTriple back = corners_from_midpoints(space, m);
            worst_round = std::max({worst_round, (back.a.x - t.a.x).norm(),
                                    (back.b.x - t.b.x).norm(), (back.c.x - t.c.x).norm()});
        }
        CAPTURE(space_name(space.kind()));
        CHECK(worst_swap < 1e-12);
        CHECK(worst_mid < 1e-9);
        CHECK(worst_round < 1e-8);
    }
}

TEST_CASE("sphere: sign coherence and det bound") {
    Rng rng(99);
    for (int i = 0; i < 1000; ++i) {
        CornerTriple t = random_triangle(rng, kS2, 1.4);
        MidpointTriple m = midpoints_from_corners(kS2, t);
        double pab = m.alpha.x.dot(m.beta.x);
        double pbg = m.beta.x.dot(m.gamma.x);
        double pga = m.gamma.x.dot(m.alpha.x);
        int e = eta_sign(pab, pbg, pga);
        CHECK(e != 0);
        CHECK(pab * e > 0);
        CHECK(pbg * e > 0);
        CHECK(pga * e > 0);
        double det = det3(m.alpha.x, m.beta.x, m.gamma.x);
        CHECK(det * det <= 1.0 + 1e-14);
    }
    // Random unit triples (not necessarily midpoints) also satisfy the bound.
    for (int i = 0; i < 1000; ++i) {
        Point a = random_point(rng, kS2, 3.1);
        Point b = random_point(rng, kS2, 3.1);
        Point c = random_point(rng, kS2, 3.1);
        double det = det3(a.x, b.x, c.x);
        CHECK(det * det <= 1.0 + 1e-14);
    }
}

TEST_CASE("amplitude density identity") {
    Rng rng(4242);
    for (const Space& space : {kH2, kS2}) {
        int done = 0;
        while (done < 60) {
            Point m = random_point(rng, space, 1.0);
            Frame fr = tangent_frame(space, m);
            double rmax = space.kind() == SpaceKind::Sphere2 ? 1.3 : 1.6;
            double r = rng.uniform(0.05, rmax);
            double psi = rng.uniform(0.0, 2 * M_PI);
            Vec3 v = from_fiber(fr, {r * std::cos(psi), r * std::sin(psi)});
            Point m2 = random_point(rng, space, 1.3);
            try {
                auto [mp, ms] = psi_map(space, m, v, m2);
                if (!in_W(space, m, mp, ms)) continue;
                double a = amplitude(space, m, mp, ms);
                double jac = std::abs(jacobian_fd(space, m, v, m2));
                double dv = dv_density(space, Tangent{m, v});
                CAPTURE(space_name(space.kind()));
                CHECK(std::abs(a * jac - dv) / dv < 1e-4);
                ++done;
            } catch (const Error&) {
                continue;
            }
        }
    }
}

TEST_CASE("flat limit of areas and amplitude") {
    for (const Space& space : {kH2, kS2}) {
        Point o{space.kind(), {0, 0, 1}};
        Frame fr = tangent_frame(space, o);
        Vec2 w[3] = {{0.8, 0.2}, {-0.4, 0.9}, {-0.1, -0.6}};
        double flat = 0.5 * (w[1] - w[0]).cross(w[2] - w[0]);
        double prev_err = 0.0, prev_amp = 0.0;
        int k = 0;
        for (double t : {1e-1, 1e-2, 1e-3}) {
            CornerTriple tri{exp_map(space, o, from_fiber(fr, w[0] * t)),
                             exp_map(space, o, from_fiber(fr, w[1] * t)),
                             exp_map(space, o, from_fiber(fr, w[2] * t))};
            double err = std::abs(area_from_corners(space, tri) / (flat * t * t) - 1.0);
            MidpointTriple m = midpoints_from_corners(space, tri);
            double amp_err = std::abs(amplitude(space, m.alpha, m.beta, m.gamma) - 16.0);
            if (k > 0) {
                CHECK(std::log10(prev_err / err) >= 1.9);
                CHECK(std::log10(prev_amp / amp_err) >= 1.9);
            }
            prev_err = err;
            prev_amp = amp_err;
            ++k;
        }
    }
}

TEST_CASE("psi injectivity spot check") {
    // Local injectivity: distinct nearby inputs map to distinct midpoint pairs.
    Rng rng(31);
    for (const Space& space : {kH2, kS2}) {
        for (int i = 0; i < 50; ++i) {
            Point m = random_point(rng, space, 0.8);
            Frame fr = tangent_frame(space, m);
            Vec2 u{rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};
            Point m2 = random_point(rng, space, 1.0);
            Point m2b = random_point(rng, space, 1.0);
            Vec2 ub{rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};
            if ((ub - u).norm() < 1e-3 && distance(space, m2, m2b) < 1e-3) continue;
            auto p1 = psi_map(space, m, from_fiber(fr, u), m2);
            auto p2 = psi_map(space, m, from_fiber(fr, ub), m2b);
            bool same = (p1.first.x - p2.first.x).norm() < 1e-9 &&
                        (p1.second.x - p2.second.x).norm() < 1e-9;
            CHECK_FALSE(same);
        }
    }
}

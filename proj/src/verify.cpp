#include "midstar/verify.hpp"

#include <cmath>
#include <functional>

#include "midstar/oracles.hpp"
#include "midstar/semiclassics.hpp"
#include "midstar/starprod.hpp"

namespace midstar {

namespace {

Point chart_origin(const Space& space) {
    if (space.kind() == SpaceKind::Euclidean2) return Point::r2(0, 0);
    return Point{space.kind(), {0, 0, 1}};
}

struct Recorder {
    std::string suite;
    std::vector<VerifyRow>& rows;

    void check(const std::string& case_id, const std::string& quantity, double expected,
               double got, double tol) {
        double err = std::abs(got - expected);
        rows.push_back({suite, case_id, quantity, expected, got, err, err <= tol});
    }
    void check_flag(const std::string& case_id, const std::string& quantity, bool ok) {
        rows.push_back({suite, case_id, quantity, 1.0, ok ? 1.0 : 0.0, ok ? 0.0 : 1.0, ok});
    }
};

void geometry_suite(Rng& rng, std::vector<VerifyRow>& rows) {
    Recorder rec{"geometry", rows};
    const Space spaces[3] = {Space::euclidean(), Space::hyperbolic(), Space::sphere(0.5)};
    for (const Space& space : spaces) {
        const char* sn = space_name(space.kind());
        double worst_roundtrip = 0.0, worst_mid = 0.0, worst_iso = 0.0, worst_chord = 0.0;
        for (int i = 0; i < 200; ++i) {
            Point m = random_point(rng, space, 1.5);
            Frame fr = tangent_frame(space, m);
            double r = rng.uniform(0.0, space.kind() == SpaceKind::Sphere2 ? 1.4 : 2.5);
            double psi = rng.uniform(0.0, 2.0 * M_PI);
            Vec3 v = from_fiber(fr, {r * std::cos(psi), r * std::sin(psi)});
            Point p = exp_map(space, m, v);
            Vec3 back = log_map(space, m, p).v;
            worst_roundtrip = std::max(worst_roundtrip, (back - v).norm());

            auto [mid_chord, vt] = chord_decompose(space, exp_map(space, m, -v), p);
            worst_mid = std::max(worst_mid, (mid_chord.x - m.x).norm());
            worst_chord = std::max(worst_chord, (vt.v - v).norm());

            Point a = random_point(rng, space, 1.5);
            Point b = random_point(rng, space, 1.5);
            Point sa = geodesic_symmetry(space, m, a);
            Point sb = geodesic_symmetry(space, m, b);
            worst_iso = std::max(worst_iso, std::abs(distance(space, sa, sb) - distance(space, a, b)));
            Point back2 = geodesic_symmetry(space, m, sa);
            worst_iso = std::max(worst_iso, (back2.x - a.x).norm());
        }
        rec.check(sn, "exp_log_roundtrip", 0.0, worst_roundtrip, 1e-10);
        rec.check(sn, "chord_midpoint", 0.0, worst_mid, 1e-10);
        rec.check(sn, "chord_roundtrip", 0.0, worst_chord, 1e-10);
        rec.check(sn, "symmetry_isometry_involution", 0.0, worst_iso, 1e-10);

        // Constraint drift over 1000 chained maps.
        Point p = random_point(rng, space, 1.0);
        for (int i = 0; i < 1000; ++i) {
            Frame fr = tangent_frame(space, p);
            Vec3 v = from_fiber(fr, {rng.uniform(-0.3, 0.3), rng.uniform(-0.3, 0.3)});
            p = exp_map(space, p, v);
            if (distance(space, p, chart_origin(space)) > 2.0)
                p = midpoint(space, p, chart_origin(space));
        }
        double drift = 0.0;
        if (space.kind() == SpaceKind::Sphere2) drift = std::abs(p.x.dot(p.x) - 1.0);
        if (space.kind() == SpaceKind::Hyperbolic2)
            drift = std::abs(p.x.z * p.x.z - p.x.x * p.x.x - p.x.y * p.x.y - 1.0);
        rec.check(sn, "constraint_drift_1000_ops", 0.0, drift, 1e-10);

        // dv density at the zero section; the planar calibration value is 4.
        Point m = random_point(rng, space, 1.0);
        Frame fr = tangent_frame(space, m);
        double dv0 = dv_density(space, Tangent{m, from_fiber(fr, {1e-9, 0})});
        rec.check(sn, "dv_flat_limit", 4.0, dv0, 1e-6);
    }
}

void triangles_suite(Rng& rng, std::vector<VerifyRow>& rows) {
    Recorder rec{"triangles", rows};
    const Space spaces[3] = {Space::euclidean(), Space::hyperbolic(), Space::sphere(0.5)};
    for (const Space& space : spaces) {
        const char* sn = space_name(space.kind());
        double worst_anti = 0.0, worst_mid = 0.0, worst_round = 0.0, worst_det = 0.0;
        bool signs_ok = true;
        for (int i = 0; i < 300; ++i) {
            CornerTriple t = random_triangle(rng, space, 1.2);
            double area = area_from_corners(space, t);
            double swapped = area_from_corners(space, {t.b, t.a, t.c});
            worst_anti = std::max(worst_anti, std::abs(area + swapped));

            MidpointTriple m = midpoints_from_corners(space, t);
            worst_mid = std::max(worst_mid, std::abs(area_from_midpoints(space, m) - area));

            if (space.kind() == SpaceKind::Sphere2) {
                double pab = m.alpha.x.dot(m.beta.x);
                double pbg = m.beta.x.dot(m.gamma.x);
                double pga = m.gamma.x.dot(m.alpha.x);
                int s1 = pab > 0 ? 1 : (pab < 0 ? -1 : 0);
                int s2 = pbg > 0 ? 1 : (pbg < 0 ? -1 : 0);
                int s3 = pga > 0 ? 1 : (pga < 0 ? -1 : 0);
                if (!(s1 == s2 && s2 == s3)) signs_ok = false;
                double det = det3(m.alpha.x, m.beta.x, m.gamma.x);
                worst_det = std::max(worst_det, det * det - 1.0);
            }

            CornerTriple back = corners_from_midpoints(space, m);
            worst_round = std::max({worst_round, (back.a.x - t.a.x).norm(),
                                    (back.b.x - t.b.x).norm(), (back.c.x - t.c.x).norm()});
        }
        rec.check(sn, "orientation_antisymmetry", 0.0, worst_anti, 1e-12);
        rec.check(sn, "midpoint_area_consistency", 0.0, worst_mid, 1e-9);
        rec.check(sn, "corner_recovery_roundtrip", 0.0, worst_round, 1e-8);
        if (space.kind() == SpaceKind::Sphere2) {
            rec.check_flag(sn, "equal_sign_condition", signs_ok);
            rec.check(sn, "det_bound", 0.0, std::max(worst_det, 0.0), 1e-14);
        }
    }

    // Amplitude density identity on the curved spaces.
    for (const Space& space : {Space::hyperbolic(), Space::sphere(0.5)}) {
        const char* sn = space_name(space.kind());
        double worst = 0.0;
        int done = 0;
        while (done < 25) {
            Point m = random_point(rng, space, 1.0);
            Frame fr = tangent_frame(space, m);
            double r = rng.uniform(0.05, space.kind() == SpaceKind::Sphere2 ? 1.2 : 1.5);
            double psi = rng.uniform(0.0, 2.0 * M_PI);
            Vec3 v = from_fiber(fr, {r * std::cos(psi), r * std::sin(psi)});
            Point m2 = random_point(rng, space, 1.2);
            try {
                auto [mp, ms] = psi_map(space, m, v, m2);
                if (!in_W(space, m, mp, ms)) continue;
                double a = amplitude(space, m, mp, ms);
                double jac = std::abs(jacobian_fd(space, m, v, m2));
                double dv = dv_density(space, Tangent{m, v});
                worst = std::max(worst, std::abs(a * jac - dv) / dv);
                ++done;
            } catch (const Error&) {
                continue;
            }
        }
        rec.check(sn, "amplitude_density_identity_rel", 0.0, worst, 1e-4);
    }

    // Flat limit of scaled triangles.
    for (const Space& space : {Space::hyperbolic(), Space::sphere(0.5)}) {
        const char* sn = space_name(space.kind());
        Point o = chart_origin(space);
        Frame fr = tangent_frame(space, o);
        Vec2 w[3] = {{0.9, 0.1}, {-0.3, 0.8}, {-0.2, -0.7}};
        double flat = 0.0;
        {
            Vec2 e1 = w[1] - w[0], e2 = w[2] - w[0];
            flat = 0.5 * e1.cross(e2);
        }
        double errs[3], amp_errs[3];
        double scales[3] = {1e-1, 1e-2, 1e-3};
        for (int k = 0; k < 3; ++k) {
            double t = scales[k];
            CornerTriple tri{exp_map(space, o, from_fiber(fr, w[0] * t)),
                             exp_map(space, o, from_fiber(fr, w[1] * t)),
                             exp_map(space, o, from_fiber(fr, w[2] * t))};
            double ratio = area_from_corners(space, tri) / (flat * t * t);
            errs[k] = std::abs(ratio - 1.0);
            MidpointTriple m = midpoints_from_corners(space, tri);
            amp_errs[k] = std::abs(amplitude(space, m.alpha, m.beta, m.gamma) - 16.0);
        }
        double order1 = std::log10(errs[0] / errs[1]);
        double order2 = std::log10(errs[1] / errs[2]);
        rec.check_flag(sn, "flat_area_order_ge_1.9", std::min(order1, order2) >= 1.9);
        double aorder = std::log10(amp_errs[0] / amp_errs[1]);
        rec.check_flag(sn, "flat_amplitude_order_ge_1.9", aorder >= 1.9);
        rec.check(sn, "flat_amplitude_value", 16.0, 16.0 + amp_errs[2], 1e-4);
    }
}

void oracles_suite(Rng& rng, std::vector<VerifyRow>& rows) {
    Recorder rec{"oracles", rows};
    const Space spaces[3] = {Space::euclidean(), Space::hyperbolic(), Space::sphere(0.5)};
    for (const Space& space : spaces) {
        const char* sn = space_name(space.kind());
        double worst_excess = 0.0, worst_stokes = 0.0;
        for (int i = 0; i < 100; ++i) {
            CornerTriple t = random_triangle(rng, space, 1.2);
            double area = area_from_corners(space, t);
            worst_excess = std::max(worst_excess,
                                    std::abs(excess_area(space, t) - std::abs(area)));
            worst_stokes = std::max(worst_stokes,
                                    std::abs(stokes_area(space, t, 4000) - area));
        }
        rec.check(sn, "excess_vs_corners", 0.0, worst_excess, 1e-8);
        rec.check(sn, "stokes_vs_corners", 0.0, worst_stokes, 1e-6);
    }

    double worst_lambda = 0.0, worst_compose = 0.0;
    for (int i = 0; i < 300; ++i) {
        Space r2 = Space::euclidean(0.7);
        Point a = random_point(rng, r2, 3.0);
        Point b = random_point(rng, r2, 3.0);
        Point c = random_point(rng, r2, 3.0);
        double lam = lambda_phase_r2(a, b, c, r2.hbar());
        double st = area_from_corners(r2, {a, b, c}) / r2.hbar();
        worst_lambda = std::max(worst_lambda,
                                std::abs(std::exp(Complex(0, lam)) - std::exp(Complex(0, st))));
        double sum = so_phase_r2(a.x.x, a.x.y, b.x.x, b.x.y, r2.hbar()) +
                     so_phase_r2(b.x.x, b.x.y, c.x.x, c.x.y, r2.hbar()) +
                     so_phase_r2(c.x.x, c.x.y, a.x.x, a.x.y, r2.hbar());
        worst_compose = std::max(worst_compose, std::abs(sum - lam));
    }
    rec.check("r2", "lambda_vs_engine_phase", 0.0, worst_lambda, 1e-12);
    rec.check("r2", "so_composition_vs_lambda", 0.0, worst_compose, 1e-12);

    Poly2 p = Poly2::monomial(1, 0), q = Poly2::monomial(0, 1);
    double hbar = 0.5;
    Poly2 comm = moyal_series(p, q, hbar) + moyal_series(q, p, hbar).scaled(-1.0);
    rec.check("r2", "moyal_commutator_im", hbar, comm.coef(0, 0).imag(), 1e-15);
    rec.check("r2", "moyal_commutator_re", 0.0, comm.coef(0, 0).real(), 1e-15);
}

void starprod_suite(Rng& rng, std::vector<VerifyRow>& rows) {
    Recorder rec{"starprod", rows};
    Space r2 = Space::euclidean(0.5);
    QuadratureSpec spec;
    spec.resolution = 12;
    spec.refinement_levels = 2;
    spec.truncation_radius = 5.0;

    ScalarField f1 = ScalarField::gaussian_bump(Point::r2(0.2, -0.1), 1.0);
    ScalarField f2 = ScalarField::gaussian_bump(Point::r2(-0.3, 0.2), 1.0);
    Point at = Point::r2(rng.uniform(-0.3, 0.3), rng.uniform(-0.3, 0.3));

    StarResult ab = star(r2, f1, f2, at, spec);
    StarResult ba = star(r2, f2, f1, at, spec);
    rec.check("r2", "conjugation_symmetry", 0.0, std::abs(ab.value - std::conj(ba.value)), 1e-8);

    StarResult two = star(r2, f1, f2, at, spec, 2);
    bool identical = two.value.real() == ab.value.real() && two.value.imag() == ab.value.imag();
    rec.check_flag("r2", "thread_count_determinism", identical);

    StarResult mid = star_midpoint_form(r2, f1, f2, at, spec);
    rec.check("r2", "chart_equivalence", 0.0, std::abs(mid.value - ab.value),
              2.0 * (mid.refine_error + ab.refine_error) + 1e-9);
}

void semiclassics_suite(Rng& rng, std::vector<VerifyRow>& rows) {
    Recorder rec{"semiclassics", rows};
    Space r2 = Space::euclidean(0.5);
    Point at = Point::r2(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0));

    auto g1 = GeneratingFunction::quadratic({{{0.4, 0.1}, {0.1, 0.3}}}, {0.2, -0.1}, 0.3);
    auto g2 = GeneratingFunction::quadratic({{{0.2, -0.05}, {-0.05, 0.5}}}, {-0.3, 0.4}, -0.2);
    ComposeResult cr = compose(r2, g1, g2, at);
    rec.check_flag("r2", "newton_quadratic_two_steps", cr.iterations <= 2);

    double worst = 0.0;
    for (int i = 0; i < 50; ++i) {
        Vec2 a{rng.uniform(-1, 1), rng.uniform(-1, 1)};
        Vec2 b{rng.uniform(-1, 1), rng.uniform(-1, 1)};
        auto la = GeneratingFunction::linear(a);
        auto lb = GeneratingFunction::linear(b);
        ComposeResult ab = compose(r2, la, lb, at);
        ComposeResult ba = compose(r2, lb, la, at);
        double lhs = ab.value + ba.value;
        double rhs = la.value(ab.stationary_m12.pq()) + lb.value(ab.stationary_m23.pq()) +
                     lb.value(ba.stationary_m12.pq()) + la.value(ba.stationary_m23.pq());
        worst = std::max(worst, std::abs(lhs - rhs));
    }
    rec.check("r2", "swap_symmetry_identity", 0.0, worst, 1e-10);
}

}  // namespace

Point random_point(Rng& rng, const Space& space, double rho_max) {
    if (space.kind() == SpaceKind::Euclidean2)
        return Point::r2(rng.uniform(-rho_max, rho_max), rng.uniform(-rho_max, rho_max));
    Point o = chart_origin(space);
    Frame fr = tangent_frame(space, o);
    double r = rho_max * std::sqrt(rng.uniform());
    double phi = rng.uniform(0.0, 2.0 * M_PI);
    return exp_map(space, o, from_fiber(fr, {r * std::cos(phi), r * std::sin(phi)}));
}

CornerTriple random_triangle(Rng& rng, const Space& space, double rho_max) {
    for (;;) {
        Point a = random_point(rng, space, rho_max);
        Point b = random_point(rng, space, rho_max);
        Point c = random_point(rng, space, rho_max);
        if (distance(space, a, b) < 1e-2 || distance(space, b, c) < 1e-2 ||
            distance(space, c, a) < 1e-2)
            continue;
        if (space.curved()) {
            double det = det3(a.x, b.x, c.x);
            if (std::abs(det) < 1e-3) continue;
        } else {
            double area = 0.5 * std::abs((b.pq() - a.pq()).cross(c.pq() - a.pq()));
            if (area < 1e-3) continue;
        }
        return {a, b, c};
    }
}

std::vector<std::string> verify_suites() {
    return {"geometry", "triangles", "oracles", "starprod", "semiclassics"};
}

std::vector<VerifyRow> run_suite(const std::string& suite, std::uint64_t seed) {
    std::vector<VerifyRow> rows;
    Rng rng(seed);
    bool all = suite == "all";
    bool known = all;
    if (all || suite == "geometry") { geometry_suite(rng, rows); known = true; }
    if (all || suite == "triangles") { triangles_suite(rng, rows); known = true; }
    if (all || suite == "oracles") { oracles_suite(rng, rows); known = true; }
    if (all || suite == "starprod") { starprod_suite(rng, rows); known = true; }
    if (all || suite == "semiclassics") { semiclassics_suite(rng, rows); known = true; }
    if (!known) throw ValidationError("unknown verify suite: " + suite);
    return rows;
}

}  // namespace midstar

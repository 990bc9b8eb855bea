#include "midstar/geometry.hpp"

#include <cmath>
#include <string>

namespace midstar {

namespace {

constexpr double kSurfaceTol = 1e-12;
constexpr double kAntipodalTol = 1e-12;
constexpr double kFrameDegenerate = 1e-3;


Vec3 renormalize(SpaceKind kind, const Vec3& p) {
    switch (kind) {
        case SpaceKind::Euclidean2:
            return {p.x, p.y, 0.0};
        case SpaceKind::Sphere2:
            return p * (1.0 / p.norm());
        case SpaceKind::Hyperbolic2: {
            double q = p.z * p.z - p.x * p.x - p.y * p.y;
            Vec3 r = p * (1.0 / std::sqrt(q));
            return r.z > 0 ? r : -r;
        }
    }
    return p;
}

Point unchecked(SpaceKind kind, const Vec3& p) { return Point{kind, renormalize(kind, p)}; }

}  // namespace

const char* space_name(SpaceKind kind) {
    switch (kind) {
        case SpaceKind::Euclidean2: return "r2";
        case SpaceKind::Hyperbolic2: return "h2";
        case SpaceKind::Sphere2: return "s2";
    }
    return "?";
}

Space::Space(SpaceKind kind, double hbar) : kind_(kind), hbar_(hbar) {
    if (!(hbar > 0.0)) throw ValidationError("hbar must be positive");
    if (kind == SpaceKind::Sphere2) {
        double n = 2.0 / hbar;
        if (std::abs(n - std::round(n)) > 1e-9 || std::round(n) < 1.0)
            throw QuantizationError("on the sphere hbar must equal 2/n for a positive integer n; got " +
                                    std::to_string(hbar));
    }
}

Space Space::euclidean(double hbar) { return Space(SpaceKind::Euclidean2, hbar); }
Space Space::hyperbolic(double hbar) { return Space(SpaceKind::Hyperbolic2, hbar); }
Space Space::sphere(double hbar) { return Space(SpaceKind::Sphere2, hbar); }
Space Space::make(SpaceKind kind, double hbar) { return Space(kind, hbar); }

Point make_point(const Space& space, const Vec3& coords) {
    switch (space.kind()) {
        case SpaceKind::Euclidean2:
            if (coords.z != 0.0) throw ValidationError("planar points have two coordinates");
            break;
        case SpaceKind::Hyperbolic2: {
            double c = coords.z * coords.z - coords.x * coords.x - coords.y * coords.y;
            // Tolerance scales with z^2: the form is a difference of squares,
            // so far out on the sheet its roundoff grows with the coordinates.
            if (std::abs(c - 1.0) > kSurfaceTol * std::max(1.0, coords.z * coords.z) ||
                coords.z <= 0.0)
                throw ValidationError("point not on the upper hyperboloid sheet");
            break;
        }
        case SpaceKind::Sphere2:
            if (std::abs(coords.dot(coords) - 1.0) > kSurfaceTol)
                throw ValidationError("point not on the unit sphere");
            break;
    }
    return unchecked(space.kind(), coords);
}

double inner(const Space& space, const Vec3& a, const Vec3& b) {
    switch (space.kind()) {
        case SpaceKind::Euclidean2: return a.x * b.x + a.y * b.y;
        case SpaceKind::Hyperbolic2: return a.z * b.z - a.x * b.x - a.y * b.y;
        case SpaceKind::Sphere2: return a.dot(b);
    }
    return 0.0;
}

double metric_dot(const Space& space, const Vec3& a, const Vec3& b) {
    double ip = inner(space, a, b);
    return space.kind() == SpaceKind::Hyperbolic2 ? -ip : ip;
}

double tangent_norm(const Space& space, const Vec3& v) {
    double n2 = metric_dot(space, v, v);
    return n2 > 0.0 ? std::sqrt(n2) : 0.0;
}

Tangent make_tangent(const Space& space, const Point& base, const Vec3& v) {
    if (base.kind != space.kind()) throw ValidationError("point belongs to another space");
    if (space.curved() && std::abs(inner(space, v, base.x)) > kSurfaceTol)
        throw ValidationError("vector not tangent at base point");
    if (space.kind() == SpaceKind::Euclidean2 && v.z != 0.0)
        throw ValidationError("planar tangents have two coordinates");
    return Tangent{base, v};
}

Frame tangent_frame(const Space& space, const Point& m) {
    switch (space.kind()) {
        case SpaceKind::Euclidean2:
            return {{1, 0, 0}, {0, 1, 0}};
        case SpaceKind::Sphere2: {
            Vec3 ref{0, 0, 1};
            Vec3 w = ref - m.x * ref.dot(m.x);
            if (w.norm() < kFrameDegenerate) {
                ref = Vec3{1, 0, 0};
                w = ref - m.x * ref.dot(m.x);
            }
            Vec3 e1 = w * (1.0 / w.norm());
            return {e1, m.x.cross(e1)};
        }
        case SpaceKind::Hyperbolic2: {
            // <e_x | m>_L = -m.x.x, so the projection never degenerates.
            Vec3 ref{1, 0, 0};
            Vec3 w = ref - m.x * inner(space, ref, m.x);
            Vec3 e1 = w * (1.0 / tangent_norm(space, w));
            Vec3 c = e1.cross(m.x);
            return {e1, {-c.x, -c.y, c.z}};
        }
    }
    return {};
}

Point exp_map(const Space& space, const Point& m, const Vec3& v) {
    switch (space.kind()) {
        case SpaceKind::Euclidean2:
            return unchecked(space.kind(), m.x + v);
        case SpaceKind::Sphere2: {
            double r = v.norm();
            if (r == 0.0) return m;
            return unchecked(space.kind(), std::cos(r) * m.x + (std::sin(r) / r) * v);
        }
        case SpaceKind::Hyperbolic2: {
            double r = tangent_norm(space, v);
            if (r == 0.0) return m;
            return unchecked(space.kind(), std::cosh(r) * m.x + (std::sinh(r) / r) * v);
        }
    }
    return m;
}

Tangent log_map(const Space& space, const Point& m1, const Point& m2) {
    switch (space.kind()) {
        case SpaceKind::Euclidean2:
            return {m1, m2.x - m1.x};
        case SpaceKind::Sphere2: {
            double c = m1.x.dot(m2.x);
            if (c <= -1.0 + kAntipodalTol)
                throw AntipodalPairError("log_map undefined for antipodal points");
            Vec3 u = m2.x - c * m1.x;
            double s = u.norm();
            if (s == 0.0) return {m1, {0, 0, 0}};
            double d = std::atan2(s, c);
            return {m1, (d / s) * u};
        }
        case SpaceKind::Hyperbolic2: {
            double c = inner(space, m1.x, m2.x);
            Vec3 u = m2.x - c * m1.x;
            double s = tangent_norm(space, u);
            if (s == 0.0) return {m1, {0, 0, 0}};
            double d = std::asinh(s);
            return {m1, (d / s) * u};
        }
    }
    return {m1, {0, 0, 0}};
}

double distance(const Space& space, const Point& m1, const Point& m2) {
    switch (space.kind()) {
        case SpaceKind::Euclidean2:
            return (m2.x - m1.x).norm();
        case SpaceKind::Sphere2: {
            double c = m1.x.dot(m2.x);
            Vec3 u = m2.x - c * m1.x;
            return std::atan2(u.norm(), c);
        }
        case SpaceKind::Hyperbolic2: {
            double c = inner(space, m1.x, m2.x);
            Vec3 u = m2.x - c * m1.x;
            return std::asinh(tangent_norm(space, u));
        }
    }
    return 0.0;
}

Point midpoint(const Space& space, const Point& m1, const Point& m2) {
    switch (space.kind()) {
        case SpaceKind::Euclidean2:
            return unchecked(space.kind(), (m1.x + m2.x) * 0.5);
        case SpaceKind::Sphere2: {
            if (m1.x.dot(m2.x) <= -1.0 + kAntipodalTol)
                throw AntipodalPairError("midpoint undefined for antipodal points");
            return unchecked(space.kind(), m1.x + m2.x);
        }
        case SpaceKind::Hyperbolic2:
            return unchecked(space.kind(), m1.x + m2.x);
    }
    return m1;
}

Point geodesic_symmetry(const Space& space, const Point& p, const Point& x) {
    if (space.kind() == SpaceKind::Euclidean2)
        return unchecked(space.kind(), 2.0 * p.x - x.x);
    return unchecked(space.kind(), 2.0 * inner(space, p.x, x.x) * p.x - x.x);
}

std::pair<Point, Point> chord_map(const Space& space, const Point& m, const Vec3& v) {
    return {exp_map(space, m, -v), exp_map(space, m, v)};
}

std::pair<Point, Tangent> chord_decompose(const Space& space, const Point& m1, const Point& m2) {
    Point m = midpoint(space, m1, m2);
    Tangent v = log_map(space, m, m2);
    return {m, v};
}

bool in_U(const Space& space, const Tangent& t) {
    if (space.kind() != SpaceKind::Sphere2) return true;
    return tangent_norm(space, t.v) < M_PI / 2.0;
}

Vec3 parallel_transport(const Space& space, const Point& m, const Vec3& dir, double s,
                        const Vec3& w) {
    if (space.kind() == SpaceKind::Euclidean2) return w;
    double a = metric_dot(space, w, dir);
    Vec3 gp;  // unit tangent of the geodesic at distance s
    if (space.kind() == SpaceKind::Sphere2)
        gp = -std::sin(s) * m.x + std::cos(s) * dir;
    else
        gp = std::sinh(s) * m.x + std::cosh(s) * dir;
    return a * gp + (w - a * dir);
}

Vec2 to_fiber(const Space& space, const Point& m, const Frame& f, const Vec3& v) {
    (void)m;
    return {metric_dot(space, v, f.e1), metric_dot(space, v, f.e2)};
}

Vec3 from_fiber(const Frame& f, const Vec2& u) { return u.x * f.e1 + u.y * f.e2; }

namespace {

// Area two-form of the model space at y, evaluated on embedding vectors.
double area_form(const Space& space, const Vec3& y, const Vec3& a, const Vec3& b) {
    if (space.kind() == SpaceKind::Euclidean2) return a.x * b.y - a.y * b.x;
    return det3(y, a, b);
}

}  // namespace

double dv_density(const Space& space, const Tangent& t, double step) {
    if (!in_U(space, t)) throw OutsideUError("dv density requested outside U");
    if (space.kind() == SpaceKind::Euclidean2) return 4.0;

    const Point& m = t.base;
    Frame fr = tangent_frame(space, m);
    Vec2 u0 = to_fiber(space, m, fr, t.v);

    // Chord map in the chart (x1, x2, u1, u2): base moves in normal
    // coordinates, the fiber frame follows by parallel transport.
    auto G = [&](double x1, double x2, double u1, double u2) {
        Vec3 xv = x1 * fr.e1 + x2 * fr.e2;
        double s = tangent_norm(space, xv);
        Point base = exp_map(space, m, xv);
        Vec3 f1 = fr.e1, f2 = fr.e2;
        if (s > 0.0) {
            Vec3 dir = xv * (1.0 / s);
            f1 = parallel_transport(space, m, dir, s, fr.e1);
            f2 = parallel_transport(space, m, dir, s, fr.e2);
        }
        Vec3 vv = u1 * f1 + u2 * f2;
        return chord_map(space, base, vv);
    };

    std::array<double, 4> c{0.0, 0.0, u0.x, u0.y};
    std::array<std::pair<Vec3, Vec3>, 4> d;
    for (int i = 0; i < 4; ++i) {
        auto cp = c, cm = c;
        cp[i] += step;
        cm[i] -= step;
        auto Fp = G(cp[0], cp[1], cp[2], cp[3]);
        auto Fm = G(cm[0], cm[1], cm[2], cm[3]);
        d[i] = {(Fp.first.x - Fm.first.x) * (0.5 / step),
                (Fp.second.x - Fm.second.x) * (0.5 / step)};
    }
    auto F0 = G(c[0], c[1], c[2], c[3]);

    double om[4][4];
    for (int i = 0; i < 4; ++i)
        for (int j = i + 1; j < 4; ++j) {
            om[i][j] = area_form(space, F0.first.x, d[i].first, d[j].first) -
                       area_form(space, F0.second.x, d[i].second, d[j].second);
        }
    double pf = om[0][1] * om[2][3] - om[0][2] * om[1][3] + om[0][3] * om[1][2];
    return std::abs(pf);
}

}  // namespace midstar

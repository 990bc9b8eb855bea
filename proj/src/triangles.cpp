#include "midstar/triangles.hpp"

#include <algorithm>
#include <cmath>

#include "midstar/linalg.hpp"

namespace midstar {

namespace {

constexpr double kAntipodalTol = 1e-12;
constexpr double kBoundaryTol = 1e-12;
constexpr double kEigenGapTol = 1e-9;

int sign_of(double v) { return v > 0.0 ? 1 : (v < 0.0 ? -1 : 0); }

double shoelace(const Point& a, const Point& b, const Point& c) {
    return 0.5 * (b.pq() - a.pq()).cross(c.pq() - a.pq());
}

// Reflection through p as a 3x3 matrix acting on embedding coordinates.
Mat<3> reflection_matrix(const Space& space, const Point& p) {
    Mat<3> s{};
    double g[3] = {p.x.x, p.x.y, p.x.z};
    // 2 <p|x> p - x = (2 p eta(p)^T - I) x with eta the form's sign pattern.
    double sx = space.kind() == SpaceKind::Hyperbolic2 ? -1.0 : 1.0;
    double diag[3] = {sx, sx, 1.0};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) s[i][j] = 2.0 * g[i] * diag[j] * g[j] - (i == j ? 1.0 : 0.0);
    return s;
}

Mat<3> matmul3(const Mat<3>& a, const Mat<3>& b) {
    Mat<3> r{};
    for (int i = 0; i < 3; ++i)
        for (int k = 0; k < 3; ++k)
            for (int j = 0; j < 3; ++j) r[i][j] += a[i][k] * b[k][j];
    return r;
}

}  // namespace

bool MidpointTriple::in_domain(const Space& space) const {
    double d = det3(alpha.x, beta.x, gamma.x);
    (void)space;
    return d * d < 1.0;
}

double area_from_corners(const Space& space, const CornerTriple& t) {
    if (space.kind() == SpaceKind::Euclidean2) return shoelace(t.a, t.b, t.c);
    if (space.kind() == SpaceKind::Sphere2) {
        double pab = t.a.x.dot(t.b.x), pbc = t.b.x.dot(t.c.x), pca = t.c.x.dot(t.a.x);
        if (pab <= -1.0 + kAntipodalTol || pbc <= -1.0 + kAntipodalTol ||
            pca <= -1.0 + kAntipodalTol)
            throw SideTooLongError("spherical triangle side reaches length pi");
        double det = det3(t.a.x, t.b.x, t.c.x);
        return 2.0 * std::atan2(det, 1.0 + pab + pbc + pca);
    }
    double pab = inner(space, t.a.x, t.b.x);
    double pbc = inner(space, t.b.x, t.c.x);
    double pca = inner(space, t.c.x, t.a.x);
    double det = det3(t.a.x, t.b.x, t.c.x);
    return 2.0 * std::atan2(det, 1.0 + pab + pbc + pca);
}

int eta_sign(double p_ab, double p_bg, double p_ga) {
    int s1 = sign_of(p_ab), s2 = sign_of(p_bg), s3 = sign_of(p_ga);
    if (s1 == s2 || s1 == s3) return s1;
    if (s2 == s3) return s2;
    return 0;
}

double area_from_midpoints(const Space& space, const MidpointTriple& m) {
    if (space.kind() == SpaceKind::Euclidean2)
        return 4.0 * shoelace(m.alpha, m.beta, m.gamma);

    double det = det3(m.alpha.x, m.beta.x, m.gamma.x);
    if (space.kind() == SpaceKind::Hyperbolic2) {
        if (det * det >= 1.0)
            throw OutsideWError("midpoint triple outside the hyperbolic domain (det^2 >= 1)");
        return 2.0 * std::asin(det);
    }

    double pab = m.alpha.x.dot(m.beta.x);
    double pbg = m.beta.x.dot(m.gamma.x);
    double pga = m.gamma.x.dot(m.alpha.x);
    int eta = eta_sign(pab, pbg, pga);
    if (eta == 0 && !(pab == 0.0 && pbg == 0.0 && pga == 0.0))
        throw OutsideWError("spherical midpoint triple with no majority sign");
    double rest = 1.0 - det * det;
    double re = eta * std::sqrt(std::max(rest, 0.0));
    return 2.0 * std::atan2(det, re);
}

bool in_W(const Space& space, const Point& base, const Point& m12, const Point& m23) {
    switch (space.kind()) {
        case SpaceKind::Euclidean2:
            return true;
        case SpaceKind::Hyperbolic2: {
            double det = det3(base.x, m12.x, m23.x);
            return det * det < 1.0;
        }
        case SpaceKind::Sphere2: {
            int s1 = sign_of(m12.x.dot(m23.x));
            int s2 = sign_of(base.x.dot(m12.x));
            int s3 = sign_of(base.x.dot(m23.x));
            return s1 == s2 && s2 == s3;
        }
    }
    return false;
}

double amplitude(const Space& space, const Point& base, const Point& m12, const Point& m23) {
    if (space.kind() == SpaceKind::Euclidean2) return 16.0;
    if (!in_W(space, base, m12, m23)) throw OutsideWError("amplitude requested outside W");
    double det = det3(base.x, m12.x, m23.x);
    double rest = 1.0 - det * det;
    if (rest < kBoundaryTol)
        throw BoundaryDivergenceError("amplitude diverges on the boundary of W");
    double pab = inner(space, base.x, m12.x);
    double pbg = inner(space, m12.x, m23.x);
    double pga = inner(space, m23.x, base.x);
    double prod = pab * pbg * pga;
    if (space.kind() == SpaceKind::Sphere2) prod = std::abs(prod);
    return 16.0 * prod * std::pow(rest, -2.5);
}

MidpointTriple midpoints_from_corners(const Space& space, const CornerTriple& t) {
    return {midpoint(space, t.a, t.b), midpoint(space, t.b, t.c), midpoint(space, t.c, t.a)};
}

CornerTriple corners_from_midpoints(const Space& space, const MidpointTriple& m) {
    if (space.kind() == SpaceKind::Euclidean2) {
        Vec2 a = m.alpha.pq() - m.beta.pq() + m.gamma.pq();
        Vec2 b = 2.0 * m.alpha.pq() - a;
        Vec2 c = 2.0 * m.beta.pq() - b;
        return {Point::r2(a.x, a.y), Point::r2(b.x, b.y), Point::r2(c.x, c.y)};
    }

    // Corner a is fixed by the composed reflection M = S_gamma S_beta S_alpha.
    Mat<3> comp = matmul3(reflection_matrix(space, m.gamma),
                          matmul3(reflection_matrix(space, m.beta),
                                  reflection_matrix(space, m.alpha)));
    Mat<3> n{};
    double nscale = 0.0;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            n[i][j] = comp[i][j] - (i == j ? 1.0 : 0.0);
            nscale = std::max(nscale, std::abs(n[i][j]));
        }
    Mat<3> ntn{};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            for (int k = 0; k < 3; ++k) ntn[i][j] += n[k][i] * n[k][j];
    auto eig = jacobi_eigen<3>(ntn);
    double s1 = std::sqrt(std::max(eig.values[0], 0.0));
    double s2 = std::sqrt(std::max(eig.values[1], 0.0));
    double s3 = std::sqrt(std::max(eig.values[2], 0.0));
    // Rank of M - I below 2 means a whole family of fixed directions.
    if (s2 <= kEigenGapTol * std::max(1.0, s3))
        throw DegenerateMidpointsError("midpoints admit a family of triangles");
    Vec3 axis{eig.vectors[0][0], eig.vectors[1][0], eig.vectors[2][0]};
    (void)s1;

    if (space.kind() == SpaceKind::Hyperbolic2) {
        if (!m.in_domain(space))
            throw OutsideWError("hyperbolic midpoints with det^2 >= 1 have no triangle");
        double q = inner(space, axis, axis);
        if (q <= 0.0)
            throw OutsideWError("fixed direction of the composed reflection is not timelike");
        Vec3 av = axis * (1.0 / std::sqrt(q));
        if (av.z < 0) av = -av;
        Point a{SpaceKind::Hyperbolic2, av};
        Point b = geodesic_symmetry(space, m.alpha, a);
        Point c = geodesic_symmetry(space, m.beta, b);
        return {a, b, c};
    }

    // Sphere: both signs of the axis are fixed points; the corner matching the
    // short-side midpoint convention has <alpha|a>, <beta|b>, <gamma|c> > 0.
    Vec3 av = axis * (1.0 / axis.norm());
    for (int attempt = 0; attempt < 2; ++attempt) {
        Point a{SpaceKind::Sphere2, attempt == 0 ? av : -av};
        Point b = geodesic_symmetry(space, m.alpha, a);
        Point c = geodesic_symmetry(space, m.beta, b);
        if (m.alpha.x.dot(a.x) > 0.0 && m.beta.x.dot(b.x) > 0.0 && m.gamma.x.dot(c.x) > 0.0)
            return {a, b, c};
    }
    throw OutsideWError("no triangle with sides below pi matches the midpoints");
}

std::pair<Point, Point> psi_map(const Space& space, const Point& base, const Vec3& v,
                                const Point& m2) {
    Tangent t = make_tangent(space, base, v);
    if (!in_U(space, t)) throw OutsideUError("psi_map requested outside U");
    auto [m1, m3] = chord_map(space, base, v);
    return {midpoint(space, m1, m2), midpoint(space, m2, m3)};
}

}  // namespace midstar

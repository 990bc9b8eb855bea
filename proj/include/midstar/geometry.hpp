#pragma once

#include <utility>

#include "midstar/errors.hpp"
#include "midstar/vec.hpp"

namespace midstar {

enum class SpaceKind { Euclidean2, Hyperbolic2, Sphere2 };

const char* space_name(SpaceKind kind);

/// One of the three model spaces together with its deformation parameter.
/// On the sphere the symplectic form has total mass 4*pi, so hbar is
/// restricted to 2/n with n a positive integer.
class Space {
  public:
    static Space euclidean(double hbar = 1.0);
    static Space hyperbolic(double hbar = 1.0);
    static Space sphere(double hbar);
    static Space make(SpaceKind kind, double hbar);

    SpaceKind kind() const { return kind_; }
    double hbar() const { return hbar_; }
    bool curved() const { return kind_ != SpaceKind::Euclidean2; }

  private:
    Space(SpaceKind kind, double hbar);

    SpaceKind kind_;
    double hbar_;
};

/// A point of a model space in embedding coordinates.
/// Euclidean2 stores (p, q, 0); Hyperbolic2 lies on z^2 - x^2 - y^2 = 1, z > 0;
/// Sphere2 on x^2 + y^2 + z^2 = 1.  Surface membership is validated to 1e-12
/// on construction.
struct Point {
    SpaceKind kind = SpaceKind::Euclidean2;
    Vec3 x;

    static Point r2(double p, double q) { return Point{SpaceKind::Euclidean2, {p, q, 0.0}}; }
    Vec2 pq() const { return {x.x, x.y}; }
};

Point make_point(const Space& space, const Vec3& coords);

/// Tangent vector at a base point; for the curved spaces the vector must be
/// orthogonal to the base under the space's bilinear form (tolerance 1e-12).
struct Tangent {
    Point base;
    Vec3 v;
};

Tangent make_tangent(const Space& space, const Point& base, const Vec3& v);

/// Deterministic orthonormal tangent frame at a point, oriented so that
/// det(m, e1, e2) = +1 on the curved spaces.  Produced by Gram-Schmidt of a
/// fixed reference axis (e_z on the sphere, e_x on the hyperboloid) against
/// the base point; near the sphere's poles, where e_z degenerates, the
/// fallback axis e_x is used instead (threshold 1e-3 on the projected norm).
struct Frame {
    Vec3 e1;
    Vec3 e2;
};

Frame tangent_frame(const Space& space, const Point& m);

/// Bilinear form of the embedding: Lorentzian zz'-xx'-yy' on Hyperbolic2,
/// Euclidean dot on Sphere2, planar dot on Euclidean2.
double inner(const Space& space, const Vec3& a, const Vec3& b);

/// Positive-definite metric on tangent vectors (equals -inner on Hyperbolic2).
double metric_dot(const Space& space, const Vec3& a, const Vec3& b);
double tangent_norm(const Space& space, const Vec3& v);

Point exp_map(const Space& space, const Point& m, const Vec3& v);
inline Point exp_map(const Space& space, const Tangent& t) { return exp_map(space, t.base, t.v); }

/// Inverse of exp_map along the short geodesic; throws AntipodalPair on the
/// sphere's cut locus.
Tangent log_map(const Space& space, const Point& m1, const Point& m2);

double distance(const Space& space, const Point& m1, const Point& m2);

Point midpoint(const Space& space, const Point& m1, const Point& m2);

/// Point reflection through p; an involutive isometry reversing geodesics.
Point geodesic_symmetry(const Space& space, const Point& p, const Point& x);

/// The chord map F(m, v) = (exp_m(-v), exp_m(v)).
std::pair<Point, Point> chord_map(const Space& space, const Point& m, const Vec3& v);

/// Inverse of the chord map on its injectivity domain: returns (m, v) with
/// exp_m(-v) = m1 and exp_m(v) = m2.
std::pair<Point, Tangent> chord_decompose(const Space& space, const Point& m1, const Point& m2);

/// Injectivity domain of the chord map: everything on the plane and the
/// hyperboloid, |v| < pi/2 on the sphere.
bool in_U(const Space& space, const Tangent& t);

/// Density of the fiber measure dv at (m, v) relative to Lebesgue measure in
/// the tangent_frame coordinates of T_mM, computed from a central-difference
/// Jacobian of the chord map against the product Liouville structure
/// (the planar value is the constant 4).  Perturbed fiber frames are obtained
/// by parallel transport along radial geodesics, which leaves the density
/// unchanged but keeps the finite differences smooth.
double dv_density(const Space& space, const Tangent& t, double step = 1e-5);

// Fiber-chart helpers: coordinates of a tangent vector in the frame at m.
Vec2 to_fiber(const Space& space, const Point& m, const Frame& f, const Vec3& v);
Vec3 from_fiber(const Frame& f, const Vec2& u);

/// Parallel transport of tangent vector w from m along the geodesic
/// exp_m(t * dir) to distance s (dir must be unit).
Vec3 parallel_transport(const Space& space, const Point& m, const Vec3& dir, double s,
                        const Vec3& w);

}  // namespace midstar

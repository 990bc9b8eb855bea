#pragma once

#include "midstar/geometry.hpp"

namespace midstar {

/// Ordered geodesic-triangle corners; the listed order fixes the orientation.
struct CornerTriple {
    Point a;
    Point b;
    Point c;
};

/// Ordered side midpoints: alpha = mid(a,b), beta = mid(b,c), gamma = mid(c,a).
struct MidpointTriple {
    Point alpha;
    Point beta;
    Point gamma;

    /// On the hyperboloid the reachable triples satisfy det(alpha beta gamma)^2 < 1.
    bool in_domain(const Space& space) const;
};

/// Oriented symplectic area of the geodesic triangle traversed a -> b -> c.
/// Curved spaces use 2*Arg(1 + <a|b> + <b|c> + <c|a> + i det(abc)); the plane
/// uses the signed shoelace area.  On the sphere this is the triangle whose
/// sides all have length < pi; longer configurations are refused.
double area_from_corners(const Space& space, const CornerTriple& t);

/// Majority sign among the three midpoint scalar products; 0 when no strict
/// majority exists (exact sign semantics, no tolerance).
int eta_sign(double p_ab, double p_bg, double p_ga);

/// Oriented area of the triangle recovered from its side midpoints.
/// Hyperboloid: 2*arcsin(det); sphere: 2*Arg(eta*sqrt(1-det^2) + i*det);
/// plane: four times the shoelace area of the midpoint triangle.
double area_from_midpoints(const Space& space, const MidpointTriple& m);

/// Membership in W_base for the midpoint pair (m12, m23): det^2 < 1 on the
/// hyperboloid, equal signs of the three scalar products on the sphere,
/// everything on the plane.
bool in_W(const Space& space, const Point& base, const Point& m12, const Point& m23);

/// Amplitude density A(base, m12, m23) relating the midpoint-pair measure to
/// the fiber measure.  Constant 16 on the plane.
double amplitude(const Space& space, const Point& base, const Point& m12, const Point& m23);

MidpointTriple midpoints_from_corners(const Space& space, const CornerTriple& t);

/// Inverts the midpoint map.  On the curved spaces corner a is found as the
/// fixed vector of the composed reflection S_gamma S_beta S_alpha (eigenvalue
/// 1 of a 3x3 linear map); DegenerateMidpoints is raised when that eigenspace
/// is not one-dimensional.
CornerTriple corners_from_midpoints(const Space& space, const MidpointTriple& m);

/// The map Psi: (v, m2) -> (mid(m1, m2), mid(m2, m3)) with (m1, m3) = F(base, v).
std::pair<Point, Point> psi_map(const Space& space, const Point& base, const Vec3& v,
                                const Point& m2);

}  // namespace midstar

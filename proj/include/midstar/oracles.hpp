#pragma once

#include <vector>

#include "midstar/linalg.hpp"
#include "midstar/triangles.hpp"

namespace midstar {

/// Bivariate polynomial in (p, q) with complex coefficients.
class Poly2 {
  public:
    Poly2() = default;
    /// coef[i][j] multiplies p^i q^j.
    explicit Poly2(std::vector<std::vector<Complex>> coef);
    static Poly2 monomial(int i, int j, Complex c = 1.0);

    int degree() const;
    Complex coef(int i, int j) const;
    Complex eval(double p, double q) const;
    Poly2 deriv_p() const;
    Poly2 deriv_q() const;
    Poly2 operator+(const Poly2& o) const;
    Poly2 operator*(const Poly2& o) const;
    Poly2 scaled(Complex s) const;
    bool near(const Poly2& o, double tol) const;

  private:
    std::vector<std::vector<Complex>> c_;  // c_[i][j] * p^i q^j
    void trim();
};

/// Exact Moyal product of two polynomials (the bidifferential series
/// terminates); convention fixed so that p * q - q * p = i hbar.
Poly2 moyal_series(const Poly2& f1, const Poly2& f2, double hbar);

/// Poisson bracket {f, g} = f_p g_q - f_q g_p.
Poly2 poisson_bracket(const Poly2& f, const Poly2& g);

struct GaussianParams {
    Vec2 center;
    double width = 1.0;
    double amplitude = 1.0;
};

/// Closed form of the planar deformed product of two Gaussians:
/// value(m) = prefactor * exp(-m^T Q m / 2 + r . m + s).
struct GaussianExpForm {
    CMat<2> q{};
    CVecN<2> r{};
    Complex s = 0.0;
    Complex prefactor = 1.0;

    Complex eval(const Vec2& m) const;
};

GaussianExpForm gaussian_moyal(const GaussianParams& g1, const GaussianParams& g2, double hbar);

/// Unsigned triangle area from classical angle formulas: spherical excess,
/// hyperbolic defect, Heron on the plane.  Shares no code with the engine's
/// area formulas.
double excess_area(const Space& space, const CornerTriple& t);

/// Oriented triangle area from the definition: a symplectic-potential line
/// integral on the plane and the hyperboloid (where the area form is exact),
/// a fan of geodesic sub-triangles measured by l'Huilier on the sphere.
/// The hyperbolic potential is taken in geodesic polar coordinates about
/// `pole` (default: the hyperboloid apex).
double stokes_area(const Space& space, const CornerTriple& t, int n_steps);
double stokes_area(const Space& space, const CornerTriple& t, int n_steps, const Point& pole);

/// Phase of the planar horizontal section over the pair (p1,q1) -> (p2,q2):
/// (p1 + p2)(q2 - q1) / (2 hbar).
double so_phase_r2(double p1, double q1, double p2, double q2, double hbar);

/// Triangle holonomy phase on the plane; equals the sum of the three
/// so_phase_r2 legs around m1 -> m2 -> m3 -> m1 and exp(i lambda) equals the
/// engine's kernel phase factor.
double lambda_phase_r2(const Point& m1, const Point& m2, const Point& m3, double hbar);

/// Central-difference determinant of Psi at (base, v, m2) in normal
/// coordinates anchored at the evaluated points (all chart densities are 1
/// there, so A * |jacobian| = dv holds pointwise); 1/4 on the plane.
double jacobian_fd(const Space& space, const Point& base, const Vec3& v, const Point& m2,
                   double step = 1e-5);

}  // namespace midstar

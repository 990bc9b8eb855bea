#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "midstar/geometry.hpp"

namespace midstar {

/// Polynomial in the embedding coordinates; on the plane the variables are
/// (p, q), on the curved spaces (x, y, z).
struct EmbeddingPoly {
    // term = coef * x^i y^j z^k, exponents packed as {i, j, k}.
    struct Term {
        int i = 0, j = 0, k = 0;
        double coef = 0.0;
    };
    std::vector<Term> terms;

    double eval(const Vec3& x) const;
    Vec3 gradient(const Vec3& x) const;  // embedding gradient
    static EmbeddingPoly constant(double c) { return {{{0, 0, 0, c}}}; }
};

/// Complex-valued function on a model space, restricted to a family with
/// controlled decay so the product integrals exist.
class ScalarField {
  public:
    /// exp(-d(x, center)^2 / (2 width^2))
    static ScalarField gaussian_bump(const Point& center, double width);

    /// P(x) * exp(-d(x, center)^2 / (2 width^2))
    static ScalarField damped_polynomial(EmbeddingPoly poly, const Point& center, double width);

    /// exp(i g(x) / hbar), optionally carrying a Gaussian damping factor
    /// exp(-d(x, center)^2 / (2 width^2)) so the integrals converge.
    static ScalarField oscillatory_exp(std::function<double(const Point&)> phase, double hbar,
                                       const Point& damp_center, double damp_width);
    static ScalarField oscillatory_exp(std::function<double(const Point&)> phase, double hbar);

    static ScalarField zero(SpaceKind kind);

    Complex operator()(const Space& space, const Point& x) const;

    /// Planar gradient (d/dp, d/dq); implemented for the real families on
    /// Euclidean2 (used by the semiclassical-order oracles).
    Vec2 gradient_r2(const Point& x) const;

    bool integrable() const { return integrable_; }

  private:
    ScalarField() = default;

    enum class Family { Zero, Gaussian, DampedPoly, Oscillatory };
    Family family_ = Family::Zero;
    SpaceKind kind_ = SpaceKind::Euclidean2;
    Point center_;
    double width_ = 1.0;
    EmbeddingPoly poly_;
    std::function<double(const Point&)> phase_;
    double phase_hbar_ = 1.0;
    bool damped_ = false;
    bool integrable_ = true;
};

}  // namespace midstar

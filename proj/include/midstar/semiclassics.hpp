#pragma once

#include <functional>
#include <optional>

#include "midstar/geometry.hpp"
#include "midstar/linalg.hpp"

namespace midstar {

/// Real generating function on the space's chart: global (p, q) coordinates
/// on the plane, normal coordinates about the composition base point on the
/// curved spaces.
class GeneratingFunction {
  public:
    static GeneratingFunction linear(const Vec2& covector);
    static GeneratingFunction quadratic(const Mat<2>& form, const Vec2& covector, double constant);
    /// User-supplied value/gradient/hessian; consistency is spot-checked by
    /// finite differences at five seeded points (tolerance 1e-5).
    static GeneratingFunction callable(std::function<double(const Vec2&)> value,
                                       std::function<Vec2(const Vec2&)> gradient,
                                       std::function<Mat<2>(const Vec2&)> hessian);

    double value(const Vec2& x) const;
    Vec2 gradient(const Vec2& x) const;
    Mat<2> hessian(const Vec2& x) const;

  private:
    GeneratingFunction() = default;
    std::function<double(const Vec2&)> value_;
    std::function<Vec2(const Vec2&)> grad_;
    std::function<Mat<2>(const Vec2&)> hess_;
};

struct ComposeResult {
    double value = 0.0;             // (g1 /\ g2)(m)
    Point stationary_m12;           // m' at the stationary point
    Point stationary_m23;           // m''
    int hessian_signature = 0;      // n(+) - n(-) of the 4x4 phase Hessian
    int iterations = 0;
};

/// Stationary value of g1(m') + g2(m'') + S(m, m', m'') by Newton iteration
/// in the fixed charts; the default initial guess is m' = m'' = m.
ComposeResult compose(const Space& space, const GeneratingFunction& g1,
                      const GeneratingFunction& g2, const Point& m,
                      std::optional<std::pair<Point, Point>> initial = std::nullopt);

/// Optional Gaussian damping factor attached to an oscillatory field.
struct DampingSpec {
    Vec2 center;
    double width;
};

/// Leading-order stationary-phase value of the deformed product of
/// exp(i g1 / hbar) and exp(i g2 / hbar) at m: the normalized amplitude at
/// the stationary point times the Hessian-determinant prefactor with its
/// signature phase.  When Gaussian dampings are supplied they are carried
/// through the quadratic model exactly, which reproduces the engine on
/// quadratic data.
Complex stationary_phase_estimate(const Space& space, const GeneratingFunction& g1,
                                  const GeneratingFunction& g2, const Point& m, double hbar,
                                  std::optional<DampingSpec> damp1 = std::nullopt,
                                  std::optional<DampingSpec> damp2 = std::nullopt);

}  // namespace midstar

#include "midstar/fields.hpp"

#include <cmath>

namespace midstar {

double EmbeddingPoly::eval(const Vec3& x) const {
    double s = 0.0;
    for (const auto& t : terms)
        s += t.coef * std::pow(x.x, t.i) * std::pow(x.y, t.j) * std::pow(x.z, t.k);
    return s;
}

Vec3 EmbeddingPoly::gradient(const Vec3& x) const {
    Vec3 g{};
    for (const auto& t : terms) {
        if (t.i > 0) g.x += t.coef * t.i * std::pow(x.x, t.i - 1) * std::pow(x.y, t.j) * std::pow(x.z, t.k);
        if (t.j > 0) g.y += t.coef * t.j * std::pow(x.x, t.i) * std::pow(x.y, t.j - 1) * std::pow(x.z, t.k);
        if (t.k > 0) g.z += t.coef * t.k * std::pow(x.x, t.i) * std::pow(x.y, t.j) * std::pow(x.z, t.k - 1);
    }
    return g;
}

ScalarField ScalarField::gaussian_bump(const Point& center, double width) {
    if (!(width > 0.0)) throw ValidationError("gaussian width must be positive");
    ScalarField f;
    f.family_ = Family::Gaussian;
    f.kind_ = center.kind;
    f.center_ = center;
    f.width_ = width;
    return f;
}

ScalarField ScalarField::damped_polynomial(EmbeddingPoly poly, const Point& center, double width) {
    if (!(width > 0.0)) throw ValidationError("damping width must be positive");
    ScalarField f;
    f.family_ = Family::DampedPoly;
    f.kind_ = center.kind;
    f.center_ = center;
    f.width_ = width;
    f.poly_ = std::move(poly);
    return f;
}

ScalarField ScalarField::oscillatory_exp(std::function<double(const Point&)> phase, double hbar,
                                         const Point& damp_center, double damp_width) {
    if (!(damp_width > 0.0)) throw ValidationError("damping width must be positive");
    ScalarField f;
    f.family_ = Family::Oscillatory;
    f.kind_ = damp_center.kind;
    f.center_ = damp_center;
    f.width_ = damp_width;
    f.phase_ = std::move(phase);
    f.phase_hbar_ = hbar;
    f.damped_ = true;
    return f;
}

ScalarField ScalarField::oscillatory_exp(std::function<double(const Point&)> phase, double hbar) {
    ScalarField f;
    f.family_ = Family::Oscillatory;
    f.phase_ = std::move(phase);
    f.phase_hbar_ = hbar;
    f.damped_ = false;
    f.integrable_ = false;
    return f;
}

ScalarField ScalarField::zero(SpaceKind kind) {
    ScalarField f;
    f.kind_ = kind;
    return f;
}

namespace {

double distance_sq(const Space& space, const Point& a, const Point& b) {
    if (space.kind() == SpaceKind::Euclidean2) {
        double dx = a.x.x - b.x.x, dy = a.x.y - b.x.y;
        return dx * dx + dy * dy;
    }
    double d = distance(space, a, b);
    return d * d;
}

}  // namespace

Complex ScalarField::operator()(const Space& space, const Point& x) const {
    switch (family_) {
        case Family::Zero:
            return 0.0;
        case Family::Gaussian:
            return std::exp(-distance_sq(space, center_, x) / (2.0 * width_ * width_));
        case Family::DampedPoly:
            return poly_.eval(x.x) *
                   std::exp(-distance_sq(space, center_, x) / (2.0 * width_ * width_));
        case Family::Oscillatory: {
            Complex v = std::exp(Complex(0.0, phase_(x) / phase_hbar_));
            if (damped_)
                v *= std::exp(-distance_sq(space, center_, x) / (2.0 * width_ * width_));
            return v;
        }
    }
    return 0.0;
}

Vec2 ScalarField::gradient_r2(const Point& x) const {
    if (kind_ != SpaceKind::Euclidean2)
        throw ValidationError("analytic gradient only available on the plane");
    Vec2 rel = x.pq() - center_.pq();
    double damp = std::exp(-rel.dot(rel) / (2.0 * width_ * width_));
    switch (family_) {
        case Family::Zero:
            return {0.0, 0.0};
        case Family::Gaussian:
            return rel * (-damp / (width_ * width_));
        case Family::DampedPoly: {
            Vec3 g3 = poly_.gradient(x.x);
            double p = poly_.eval(x.x);
            Vec2 g{g3.x, g3.y};
            return g * damp + rel * (-p * damp / (width_ * width_));
        }
        case Family::Oscillatory:
            throw ValidationError("oscillatory fields have no real gradient");
    }
    return {0.0, 0.0};
}

}  // namespace midstar

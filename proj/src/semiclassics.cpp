#include "midstar/semiclassics.hpp"

#include <cmath>
#include <random>

#include "midstar/triangles.hpp"

namespace midstar {

namespace {

constexpr int kMaxNewton = 50;
constexpr int kMaxHalvings = 20;
constexpr double kGradTol = 1e-10;
constexpr double kFdStep = 1e-5;

Point chart_point(const Space& space, const Point& m, const Frame& fr, const Vec2& z) {
    if (space.kind() == SpaceKind::Euclidean2) return Point::r2(z.x, z.y);
    return exp_map(space, m, from_fiber(fr, z));
}

Vec2 chart_coords(const Space& space, const Point& m, const Frame& fr, const Point& p) {
    if (space.kind() == SpaceKind::Euclidean2) return p.pq();
    return to_fiber(space, m, fr, log_map(space, m, p).v);
}

struct PhaseModel {
    const Space& space;
    const GeneratingFunction& g1;
    const GeneratingFunction& g2;
    const Point& m;
    Frame fr;

    double area(const Vec2& z1, const Vec2& z2) const {
        Point mp = chart_point(space, m, fr, z1);
        Point ms = chart_point(space, m, fr, z2);
        return area_from_midpoints(space, MidpointTriple{m, mp, ms});
    }

    double value(const std::array<double, 4>& z) const {
        Vec2 z1{z[0], z[1]}, z2{z[2], z[3]};
        return g1.value(z1) + g2.value(z2) + area(z1, z2);
    }

    std::array<double, 4> gradient(const std::array<double, 4>& z) const {
        Vec2 z1{z[0], z[1]}, z2{z[2], z[3]};
        Vec2 d1 = g1.gradient(z1), d2 = g2.gradient(z2);
        std::array<double, 4> g{d1.x, d1.y, d2.x, d2.y};
        if (space.kind() == SpaceKind::Euclidean2) {
            // S = 4 * shoelace(m, m', m''): grad_{m'} S = -2 J (m'' - m), grad_{m''} S = 2 J (m' - m).
            Vec2 a = z1 - m.pq(), b = z2 - m.pq();
            g[0] += 2.0 * b.y;
            g[1] += -2.0 * b.x;
            g[2] += -2.0 * a.y;
            g[3] += 2.0 * a.x;
            return g;
        }
        for (int i = 0; i < 4; ++i) {
            auto zp = z, zm = z;
            zp[i] += kFdStep;
            zm[i] -= kFdStep;
            g[i] += (value_area(zp) - value_area(zm)) / (2.0 * kFdStep);
        }
        return g;
    }

    double value_area(const std::array<double, 4>& z) const {
        return area({z[0], z[1]}, {z[2], z[3]});
    }

    Mat<4> hessian(const std::array<double, 4>& z) const {
        Mat<4> h{};
        Vec2 z1{z[0], z[1]}, z2{z[2], z[3]};
        Mat<2> h1 = g1.hessian(z1), h2 = g2.hessian(z2);
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) {
                h[i][j] = h1[i][j];
                h[2 + i][2 + j] = h2[i][j];
            }
        if (space.kind() == SpaceKind::Euclidean2) {
            // Cross blocks of the area term: d(grad_{m'} S)/dm'' = -2J.
            h[0][3] += 2.0;
            h[1][2] += -2.0;
            h[3][0] += 2.0;
            h[2][1] += -2.0;
            return h;
        }
        for (int i = 0; i < 4; ++i) {
            for (int j = i; j < 4; ++j) {
                double v;
                if (i == j) {
                    auto zp = z, zm = z;
                    zp[i] += kFdStep;
                    zm[i] -= kFdStep;
                    v = (value_area(zp) - 2.0 * value_area(z) + value_area(zm)) /
                        (kFdStep * kFdStep);
                } else {
                    auto zpp = z, zpm = z, zmp = z, zmm = z;
                    zpp[i] += kFdStep; zpp[j] += kFdStep;
                    zpm[i] += kFdStep; zpm[j] -= kFdStep;
                    zmp[i] -= kFdStep; zmp[j] += kFdStep;
                    zmm[i] -= kFdStep; zmm[j] -= kFdStep;
                    v = (value_area(zpp) - value_area(zpm) - value_area(zmp) + value_area(zmm)) /
                        (4.0 * kFdStep * kFdStep);
                }
                h[i][j] += v;
                if (i != j) h[j][i] += v;
            }
        }
        return h;
    }

    bool inside(const std::array<double, 4>& z) const {
        Point mp = chart_point(space, m, fr, {z[0], z[1]});
        Point ms = chart_point(space, m, fr, {z[2], z[3]});
        return in_W(space, m, mp, ms);
    }
};

}  // namespace

GeneratingFunction GeneratingFunction::linear(const Vec2& covector) {
    GeneratingFunction g;
    Vec2 a = covector;
    g.value_ = [a](const Vec2& x) { return a.dot(x); };
    g.grad_ = [a](const Vec2&) { return a; };
    g.hess_ = [](const Vec2&) { return Mat<2>{}; };
    return g;
}

GeneratingFunction GeneratingFunction::quadratic(const Mat<2>& form, const Vec2& covector,
                                                 double constant) {
    if (std::abs(form[0][1] - form[1][0]) > 1e-14)
        throw ValidationError("quadratic form must be symmetric");
    GeneratingFunction g;
    Mat<2> q = form;
    Vec2 b = covector;
    g.value_ = [q, b, constant](const Vec2& x) {
        return 0.5 * (x.x * (q[0][0] * x.x + q[0][1] * x.y) +
                      x.y * (q[1][0] * x.x + q[1][1] * x.y)) +
               b.dot(x) + constant;
    };
    g.grad_ = [q, b](const Vec2& x) {
        return Vec2{q[0][0] * x.x + q[0][1] * x.y + b.x, q[1][0] * x.x + q[1][1] * x.y + b.y};
    };
    g.hess_ = [q](const Vec2&) { return q; };
    return g;
}

GeneratingFunction GeneratingFunction::callable(std::function<double(const Vec2&)> value,
                                                std::function<Vec2(const Vec2&)> gradient,
                                                std::function<Mat<2>(const Vec2&)> hessian) {
    std::mt19937_64 rng(0x6d696473u);
    auto uniform = [&rng] { return 2.0 * (double(rng() >> 11) * 0x1.0p-53) - 1.0; };
    for (int trial = 0; trial < 5; ++trial) {
        Vec2 x{2.0 * uniform(), 2.0 * uniform()};
        const double h = 1e-6;
        Vec2 g = gradient(x);
        double fdx = (value({x.x + h, x.y}) - value({x.x - h, x.y})) / (2 * h);
        double fdy = (value({x.x, x.y + h}) - value({x.x, x.y - h})) / (2 * h);
        if (std::abs(g.x - fdx) > 1e-5 * std::max(1.0, std::abs(fdx)) ||
            std::abs(g.y - fdy) > 1e-5 * std::max(1.0, std::abs(fdy)))
            throw ValidationError("gradient inconsistent with value by finite differences");
        Mat<2> hs = hessian(x);
        Vec2 gp = gradient({x.x + h, x.y}), gm = gradient({x.x - h, x.y});
        double hxx = (gp.x - gm.x) / (2 * h), hxy = (gp.y - gm.y) / (2 * h);
        if (std::abs(hs[0][0] - hxx) > 1e-5 * std::max(1.0, std::abs(hxx)) ||
            std::abs(hs[0][1] - hxy) > 1e-5 * std::max(1.0, std::abs(hxy)))
            throw ValidationError("hessian inconsistent with gradient by finite differences");
    }
    GeneratingFunction g;
    g.value_ = std::move(value);
    g.grad_ = std::move(gradient);
    g.hess_ = std::move(hessian);
    return g;
}

double GeneratingFunction::value(const Vec2& x) const { return value_(x); }
Vec2 GeneratingFunction::gradient(const Vec2& x) const { return grad_(x); }
Mat<2> GeneratingFunction::hessian(const Vec2& x) const { return hess_(x); }

ComposeResult compose(const Space& space, const GeneratingFunction& g1,
                      const GeneratingFunction& g2, const Point& m,
                      std::optional<std::pair<Point, Point>> initial) {
    PhaseModel model{space, g1, g2, m, tangent_frame(space, m)};
    std::array<double, 4> z{};
    if (initial) {
        Vec2 a = chart_coords(space, m, model.fr, initial->first);
        Vec2 b = chart_coords(space, m, model.fr, initial->second);
        z = {a.x, a.y, b.x, b.y};
    } else {
        Vec2 a = chart_coords(space, m, model.fr, m);
        z = {a.x, a.y, a.x, a.y};
    }
    if (!model.inside(z)) throw LeftDomainError("initial guess outside W");

    int iter = 0;
    for (;; ++iter) {
        if (iter >= kMaxNewton) throw NoConvergenceError("Newton iteration limit reached");
        auto g = model.gradient(z);
        double gn = std::sqrt(g[0] * g[0] + g[1] * g[1] + g[2] * g[2] + g[3] * g[3]);
        if (gn < kGradTol) break;
        auto h = model.hessian(z);
        auto delta = lu_solve<4>(h, {-g[0], -g[1], -g[2], -g[3]});
        double scale = 1.0;
        int halvings = 0;
        std::array<double, 4> trial;
        for (;; ++halvings) {
            if (halvings > kMaxHalvings)
                throw LeftDomainError("Newton step cannot stay inside W");
            for (int i = 0; i < 4; ++i) trial[i] = z[i] + scale * delta[i];
            if (model.inside(trial)) break;
            scale *= 0.5;
        }
        z = trial;
    }

    ComposeResult out;
    out.value = model.value(z);
    out.stationary_m12 = chart_point(space, m, model.fr, {z[0], z[1]});
    out.stationary_m23 = chart_point(space, m, model.fr, {z[2], z[3]});
    out.iterations = iter;
    auto h = model.hessian(z);
    auto eig = jacobi_eigen<4>(h);
    double scale = std::max({std::abs(eig.values[0]), std::abs(eig.values[3]), 1e-30});
    int sig = 0;
    for (double lam : eig.values) {
        if (std::abs(lam) < 1e-12 * scale)
            throw SingularHessianError("phase Hessian singular at the stationary point");
        sig += lam > 0 ? 1 : -1;
    }
    out.hessian_signature = sig;
    return out;
}

Complex stationary_phase_estimate(const Space& space, const GeneratingFunction& g1,
                                  const GeneratingFunction& g2, const Point& m, double hbar,
                                  std::optional<DampingSpec> damp1,
                                  std::optional<DampingSpec> damp2) {
    ComposeResult st = compose(space, g1, g2, m);
    PhaseModel model{space, g1, g2, m, tangent_frame(space, m)};
    Vec2 z1 = chart_coords(space, m, model.fr, st.stationary_m12);
    Vec2 z2 = chart_coords(space, m, model.fr, st.stationary_m23);
    std::array<double, 4> z{z1.x, z1.y, z2.x, z2.y};
    Mat<4> hphi = model.hessian(z);

    double amp = amplitude(space, m, st.stationary_m12, st.stationary_m23);
    double norm = 1.0 / (M_PI * hbar * M_PI * hbar) / 16.0;
    Complex osc = std::exp(Complex(0.0, st.value / hbar));

    if (!damp1 && !damp2) {
        auto eig = jacobi_eigen<4>(hphi);
        double det = 1.0;
        for (double lam : eig.values) det *= lam;
        Complex sig_phase = std::exp(Complex(0.0, M_PI * st.hessian_signature / 4.0));
        double pref = (2.0 * M_PI * hbar) * (2.0 * M_PI * hbar) / std::sqrt(std::abs(det));
        return norm * amp * pref * sig_phase * osc;
    }

    // Quadratic model with the Gaussian dampings carried exactly:
    // integral of exp(i d^T Hphi d / (2 hbar) - D(z* + d)) around the
    // stationary point.
    CMat<4> a{};
    CVecN<4> b{};
    double d0 = 0.0;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) a[i][j] = Complex(0.0, -1.0 / hbar) * hphi[i][j];
    auto add_damp = [&](const DampingSpec& d, int off, const Vec2& at) {
        double iw2 = 1.0 / (d.width * d.width);
        Vec2 rel = at - d.center;
        d0 += 0.5 * rel.dot(rel) * iw2;
        b[off] += -rel.x * iw2;
        b[off + 1] += -rel.y * iw2;
        a[off][off] += iw2;
        a[off + 1][off + 1] += iw2;
    };
    if (damp1) add_damp(*damp1, 0, z1);
    if (damp2) add_damp(*damp2, 2, z2);
    Complex gauss = gaussian_integral<4>(a, b, 0.0);
    return norm * amp * std::exp(-d0) * gauss * osc;
}

}  // namespace midstar

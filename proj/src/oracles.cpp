#include "midstar/oracles.hpp"

#include <algorithm>
#include <cmath>

namespace midstar {

namespace {

constexpr int kMoyalDegreeCap = 12;

double binom(int n, int k) {
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

// Solves the complex 4x4 system a x = b with magnitude pivoting.
CVecN<4> csolve4(CMat<4> a, CVecN<4> b) {
    for (int col = 0; col < 4; ++col) {
        int piv = col;
        for (int r = col + 1; r < 4; ++r)
            if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
        if (std::abs(a[piv][col]) < 1e-300) throw IllConditionedError("singular quadratic form");
        std::swap(a[col], a[piv]);
        std::swap(b[col], b[piv]);
        for (int r = col + 1; r < 4; ++r) {
            Complex f = a[r][col] / a[col][col];
            for (int c = col; c < 4; ++c) a[r][c] -= f * a[col][c];
            b[r] -= f * b[col];
        }
    }
    CVecN<4> x{};
    for (int r = 3; r >= 0; --r) {
        Complex s = b[r];
        for (int c = r + 1; c < 4; ++c) s -= a[r][c] * x[c];
        x[r] = s / a[r][r];
    }
    return x;
}

}  // namespace

Poly2::Poly2(std::vector<std::vector<Complex>> coef) : c_(std::move(coef)) { trim(); }

Poly2 Poly2::monomial(int i, int j, Complex c) {
    std::vector<std::vector<Complex>> m(i + 1, std::vector<Complex>(j + 1, 0.0));
    m[i][j] = c;
    return Poly2(std::move(m));
}

void Poly2::trim() {
    while (!c_.empty()) {
        bool zero = true;
        for (const auto& v : c_.back())
            if (v != 0.0) zero = false;
        if (!zero) break;
        c_.pop_back();
    }
}

int Poly2::degree() const {
    int d = -1;
    for (std::size_t i = 0; i < c_.size(); ++i)
        for (std::size_t j = 0; j < c_[i].size(); ++j)
            if (c_[i][j] != 0.0) d = std::max(d, static_cast<int>(i + j));
    return d;
}

Complex Poly2::coef(int i, int j) const {
    if (i < 0 || j < 0 || i >= static_cast<int>(c_.size())) return 0.0;
    if (j >= static_cast<int>(c_[i].size())) return 0.0;
    return c_[i][j];
}

Complex Poly2::eval(double p, double q) const {
    Complex s = 0.0;
    for (std::size_t i = 0; i < c_.size(); ++i)
        for (std::size_t j = 0; j < c_[i].size(); ++j)
            if (c_[i][j] != 0.0) s += c_[i][j] * std::pow(p, double(i)) * std::pow(q, double(j));
    return s;
}

Poly2 Poly2::deriv_p() const {
    if (c_.size() <= 1) return Poly2();
    std::vector<std::vector<Complex>> d(c_.size() - 1);
    for (std::size_t i = 1; i < c_.size(); ++i) {
        d[i - 1].assign(c_[i].size(), 0.0);
        for (std::size_t j = 0; j < c_[i].size(); ++j) d[i - 1][j] = double(i) * c_[i][j];
    }
    return Poly2(std::move(d));
}

Poly2 Poly2::deriv_q() const {
    std::vector<std::vector<Complex>> d(c_.size());
    bool any = false;
    for (std::size_t i = 0; i < c_.size(); ++i) {
        if (c_[i].size() <= 1) continue;
        d[i].assign(c_[i].size() - 1, 0.0);
        for (std::size_t j = 1; j < c_[i].size(); ++j) {
            d[i][j - 1] = double(j) * c_[i][j];
            any = true;
        }
    }
    if (!any) return Poly2();
    return Poly2(std::move(d));
}

Poly2 Poly2::operator+(const Poly2& o) const {
    std::vector<std::vector<Complex>> s(std::max(c_.size(), o.c_.size()));
    for (std::size_t i = 0; i < s.size(); ++i) {
        std::size_t w = 0;
        if (i < c_.size()) w = std::max(w, c_[i].size());
        if (i < o.c_.size()) w = std::max(w, o.c_[i].size());
        s[i].assign(w, 0.0);
        for (std::size_t j = 0; j < w; ++j)
            s[i][j] = coef(int(i), int(j)) + o.coef(int(i), int(j));
    }
    return Poly2(std::move(s));
}

Poly2 Poly2::operator*(const Poly2& o) const {
    if (c_.empty() || o.c_.empty()) return Poly2();
    std::vector<std::vector<Complex>> s(c_.size() + o.c_.size() - 1);
    std::size_t w = 0;
    for (const auto& row : c_) w = std::max(w, row.size());
    std::size_t w2 = 0;
    for (const auto& row : o.c_) w2 = std::max(w2, row.size());
    for (auto& row : s) row.assign(w + w2 - 1, 0.0);
    for (std::size_t i = 0; i < c_.size(); ++i)
        for (std::size_t j = 0; j < c_[i].size(); ++j) {
            if (c_[i][j] == 0.0) continue;
            for (std::size_t k = 0; k < o.c_.size(); ++k)
                for (std::size_t l = 0; l < o.c_[k].size(); ++l)
                    s[i + k][j + l] += c_[i][j] * o.c_[k][l];
        }
    return Poly2(std::move(s));
}

Poly2 Poly2::scaled(Complex f) const {
    auto s = c_;
    for (auto& row : s)
        for (auto& v : row) v *= f;
    return Poly2(std::move(s));
}

bool Poly2::near(const Poly2& o, double tol) const {
    int n = std::max<int>(int(c_.size()), int(o.c_.size()));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < 2 * n; ++j)
            if (std::abs(coef(i, j) - o.coef(i, j)) > tol) return false;
    return true;
}

Poly2 poisson_bracket(const Poly2& f, const Poly2& g) {
    return f.deriv_p() * g.deriv_q() + (f.deriv_q() * g.deriv_p()).scaled(-1.0);
}

Poly2 moyal_series(const Poly2& f1, const Poly2& f2, double hbar) {
    if (f1.degree() > kMoyalDegreeCap || f2.degree() > kMoyalDegreeCap)
        throw DegreeTooHighError("moyal series limited to total degree 12");
    int kmax = std::max(0, std::min(f1.degree(), f2.degree()));
    Poly2 result;
    Complex step(0.0, hbar / 2.0);  // (i hbar / 2)
    Complex factor = 1.0;
    double kfact = 1.0;
    // Precompute iterated derivatives d_p^a d_q^b once per operand.
    std::vector<std::vector<Poly2>> df(kmax + 1, std::vector<Poly2>(kmax + 1));
    std::vector<std::vector<Poly2>> dg(kmax + 1, std::vector<Poly2>(kmax + 1));
    df[0][0] = f1;
    dg[0][0] = f2;
    for (int a = 0; a <= kmax; ++a)
        for (int b = 0; b <= kmax - a; ++b) {
            if (a == 0 && b == 0) continue;
            if (a > 0) {
                df[a][b] = df[a - 1][b].deriv_p();
                dg[a][b] = dg[a - 1][b].deriv_p();
            } else {
                df[a][b] = df[a][b - 1].deriv_q();
                dg[a][b] = dg[a][b - 1].deriv_q();
            }
        }
    for (int k = 0; k <= kmax; ++k) {
        if (k > 0) {
            factor *= step;
            kfact *= k;
        }
        Poly2 term;
        for (int j = 0; j <= k; ++j) {
            double c = binom(k, j) * ((j % 2) ? -1.0 : 1.0);
            term = term + (df[k - j][j] * dg[j][k - j]).scaled(c);
        }
        result = result + term.scaled(factor / kfact);
    }
    return result;
}

Complex GaussianExpForm::eval(const Vec2& m) const {
    CVecN<2> mv{m.x, m.y};
    Complex e = s;
    for (int i = 0; i < 2; ++i) {
        e += r[i] * mv[i];
        for (int j = 0; j < 2; ++j) e -= 0.5 * mv[i] * q[i][j] * mv[j];
    }
    return prefactor * std::exp(e);
}

GaussianExpForm gaussian_moyal(const GaussianParams& g1, const GaussianParams& g2, double hbar) {
    if (!(g1.width > 0.0) || !(g2.width > 0.0))
        throw ValidationError("gaussian widths must be positive");
    const double m1 = 1.0 / (g1.width * g1.width);
    const double m2 = 1.0 / (g2.width * g2.width);
    const Complex ik(0.0, 2.0 / hbar);  // 2i/hbar multiplying a x b

    // Quadratic form of the double integral over (a, b) = (y - m, z - m):
    // exponent = -a^T M1 a / 2 - b^T M2 b / 2 + (2i/hbar) a x b + linear terms.
    CMat<4> A{};
    A[0][0] = A[1][1] = m1;
    A[2][2] = A[3][3] = m2;
    // -u^T A u / 2 cross part equals +(2i/hbar)(a_p b_q - a_q b_p).
    A[0][3] = A[3][0] = -ik;
    A[1][2] = A[2][1] = ik;

    // G stacks (M1; M2); h = (M1 c1; M2 c2).
    double G[4][2] = {{m1, 0}, {0, m1}, {m2, 0}, {0, m2}};
    CVecN<4> h{m1 * g1.center.x, m1 * g1.center.y, m2 * g2.center.x, m2 * g2.center.y};

    CVecN<4> x0 = csolve4(A, CVecN<4>{G[0][0], G[1][0], G[2][0], G[3][0]});
    CVecN<4> x1 = csolve4(A, CVecN<4>{G[0][1], G[1][1], G[2][1], G[3][1]});
    CVecN<4> xh = csolve4(A, h);

    GaussianExpForm out;
    // Q = M1 + M2 - G^T A^{-1} G
    CMat<2> gtag{};
    for (int i = 0; i < 2; ++i)
        for (int k = 0; k < 4; ++k) {
            gtag[i][0] += G[k][i] * x0[k];
            gtag[i][1] += G[k][i] * x1[k];
        }
    out.q[0][0] = (m1 + m2) - gtag[0][0];
    out.q[0][1] = -gtag[0][1];
    out.q[1][0] = -gtag[1][0];
    out.q[1][1] = (m1 + m2) - gtag[1][1];
    // r = (M1 c1 + M2 c2) - G^T A^{-1} h
    out.r[0] = m1 * g1.center.x + m2 * g2.center.x;
    out.r[1] = m1 * g1.center.y + m2 * g2.center.y;
    for (int k = 0; k < 4; ++k) {
        out.r[0] -= G[k][0] * xh[k];
        out.r[1] -= G[k][1] * xh[k];
    }
    // s = h^T A^{-1} h / 2 - (c1^T M1 c1 + c2^T M2 c2) / 2
    Complex hq = 0.0;
    for (int k = 0; k < 4; ++k) hq += h[k] * xh[k];
    double cc = m1 * g1.center.dot(g1.center) + m2 * g2.center.dot(g2.center);
    out.s = 0.5 * hq - 0.5 * cc;

    // prefactor = amp1 amp2 (pi hbar)^{-2} (2 pi)^2 det(A)^{-1/2}; the branch
    // comes from the LDL pivots (Re A is positive definite).
    Complex value_at_zero = gaussian_integral<4>(A, CVecN<4>{0, 0, 0, 0}, 0.0);
    out.prefactor = g1.amplitude * g2.amplitude * value_at_zero / (M_PI * hbar * M_PI * hbar);
    return out;
}

double excess_area(const Space& space, const CornerTriple& t) {
    auto corner_angle = [&](const Point& at, const Point& u1, const Point& u2) {
        Vec3 a = log_map(space, at, u1).v;
        Vec3 b = log_map(space, at, u2).v;
        double na = tangent_norm(space, a), nb = tangent_norm(space, b);
        if (na < 1e-14 || nb < 1e-14) throw DegenerateTriangleError("coincident corners");
        double c = metric_dot(space, a, b) / (na * nb);
        return std::acos(std::clamp(c, -1.0, 1.0));
    };
    if (space.kind() == SpaceKind::Euclidean2) {
        // Heron from side lengths.
        double a = distance(space, t.b, t.c);
        double b = distance(space, t.c, t.a);
        double c = distance(space, t.a, t.b);
        if (a < 1e-14 || b < 1e-14 || c < 1e-14)
            throw DegenerateTriangleError("coincident corners");
        double s = 0.5 * (a + b + c);
        double h = s * (s - a) * (s - b) * (s - c);
        return std::sqrt(std::max(h, 0.0));
    }
    double sum = corner_angle(t.a, t.b, t.c) + corner_angle(t.b, t.c, t.a) +
                 corner_angle(t.c, t.a, t.b);
    return space.kind() == SpaceKind::Sphere2 ? sum - M_PI : M_PI - sum;
}

namespace {

// Unsigned spherical triangle area by l'Huilier's theorem.
double lhuilier(const Vec3& a, const Vec3& b, const Vec3& c) {
    auto side = [](const Vec3& u, const Vec3& v) {
        Vec3 w = v - u * u.dot(v);
        return std::atan2(w.norm(), u.dot(v));
    };
    double sa = side(b, c), sb = side(c, a), sc = side(a, b);
    double s = 0.5 * (sa + sb + sc);
    double t = std::tan(0.5 * s) * std::tan(0.5 * (s - sa)) * std::tan(0.5 * (s - sb)) *
               std::tan(0.5 * (s - sc));
    return 4.0 * std::atan(std::sqrt(std::max(t, 0.0)));
}

}  // namespace

double stokes_area(const Space& space, const CornerTriple& t, int n_steps) {
    Point pole = space.kind() == SpaceKind::Euclidean2 ? Point::r2(0, 0)
                                                       : Point{space.kind(), {0, 0, 1}};
    return stokes_area(space, t, n_steps, pole);
}

double stokes_area(const Space& space, const CornerTriple& t, int n_steps, const Point& pole) {
    if (n_steps < 100) throw ValidationError("stokes_area needs n_steps >= 100");
    const Point corners[3] = {t.a, t.b, t.c};

    if (space.kind() == SpaceKind::Sphere2) {
        // Fan of geodesic sub-triangles about the normalized centroid; the fan
        // tiles the triangle exactly, so only roundoff remains.
        Vec3 csum = t.a.x + t.b.x + t.c.x;
        Vec3 o = csum.norm() > 1e-9 ? csum * (1.0 / csum.norm()) : t.a.x;
        double area = 0.0;
        for (int e = 0; e < 3; ++e) {
            const Point& p = corners[e];
            const Point& q = corners[(e + 1) % 3];
            Vec3 leg = log_map(space, p, q).v;
            Vec3 prev = p.x;
            for (int i = 1; i <= n_steps; ++i) {
                Vec3 cur = exp_map(space, p, leg * (double(i) / n_steps)).x;
                double piece = lhuilier(o, prev, cur);
                double orient = det3(o, prev, cur);
                area += std::copysign(piece, orient);
                prev = cur;
            }
        }
        return area;
    }

    // Plane / hyperboloid: line integral of a primitive of the area form.
    // Plane: p dq.  Hyperboloid: (cosh(rho) - 1) d(phi) in geodesic polar
    // coordinates about `pole`.
    double total = 0.0;
    if (space.kind() == SpaceKind::Euclidean2) {
        for (int e = 0; e < 3; ++e) {
            const Point& p = corners[e];
            const Point& q = corners[(e + 1) % 3];
            for (int i = 0; i < n_steps; ++i) {
                double t0 = double(i) / n_steps, t1 = double(i + 1) / n_steps;
                Vec2 x0 = p.pq() + (q.pq() - p.pq()) * t0;
                Vec2 x1 = p.pq() + (q.pq() - p.pq()) * t1;
                Vec2 xm = (x0 + x1) * 0.5;
                total += xm.x * (x1.y - x0.y);
            }
        }
        return total;
    }
    Frame fr = tangent_frame(space, pole);
    auto polar = [&](const Point& x) {
        Vec2 u = to_fiber(space, pole, fr, log_map(space, pole, x).v);
        return std::pair<double, double>{u.norm(), std::atan2(u.y, u.x)};
    };
    for (int e = 0; e < 3; ++e) {
        const Point& p = corners[e];
        const Point& q = corners[(e + 1) % 3];
        Vec3 leg = log_map(space, p, q).v;
        auto prev = polar(p);
        for (int i = 1; i <= n_steps; ++i) {
            Point mid_pt = exp_map(space, p, leg * ((i - 0.5) / n_steps));
            auto cur = polar(exp_map(space, p, leg * (double(i) / n_steps)));
            double dphi = std::remainder(cur.second - prev.second, 2.0 * M_PI);
            total += (std::cosh(polar(mid_pt).first) - 1.0) * dphi;
            prev = cur;
        }
    }
    return total;
}

double so_phase_r2(double p1, double q1, double p2, double q2, double hbar) {
    return (p1 + p2) * (q2 - q1) / (2.0 * hbar);
}

double lambda_phase_r2(const Point& m1, const Point& m2, const Point& m3, double hbar) {
    return so_phase_r2(m1.x.x, m1.x.y, m2.x.x, m2.x.y, hbar) +
           so_phase_r2(m2.x.x, m2.x.y, m3.x.x, m3.x.y, hbar) +
           so_phase_r2(m3.x.x, m3.x.y, m1.x.x, m1.x.y, hbar);
}

double jacobian_fd(const Space& space, const Point& base, const Vec3& v, const Point& m2,
                   double step) {
    if (step < 1e-7 || step > 1e-3) throw ValidationError("jacobian step outside [1e-7, 1e-3]");
    Tangent tv = make_tangent(space, base, v);
    if (!in_U(space, tv)) throw OutsideUError("jacobian requested outside U");

    Frame fb = tangent_frame(space, base);
    Frame fm = tangent_frame(space, m2);
    Vec2 u0 = to_fiber(space, base, fb, v);

    auto psi = [&](double u1, double u2, double x1, double x2) {
        Vec3 vv = from_fiber(fb, {u1, u2});
        Point mm2 = exp_map(space, m2, from_fiber(fm, {x1, x2}));
        auto [a, b] = chord_map(space, base, vv);
        return std::pair<Point, Point>{midpoint(space, a, mm2), midpoint(space, mm2, b)};
    };
    auto [mp0, ms0] = psi(u0.x, u0.y, 0.0, 0.0);
    Frame f1 = tangent_frame(space, mp0);
    Frame f2 = tangent_frame(space, ms0);
    auto coords = [&](const std::pair<Point, Point>& pr) {
        Vec2 y1 = to_fiber(space, mp0, f1, log_map(space, mp0, pr.first).v);
        Vec2 y2 = to_fiber(space, ms0, f2, log_map(space, ms0, pr.second).v);
        return std::array<double, 4>{y1.x, y1.y, y2.x, y2.y};
    };

    Mat<4> jac{};
    std::array<double, 4> c0{u0.x, u0.y, 0.0, 0.0};
    double colnorm = 1.0;
    for (int i = 0; i < 4; ++i) {
        auto cp = c0, cm = c0;
        cp[i] += step;
        cm[i] -= step;
        auto yp = coords(psi(cp[0], cp[1], cp[2], cp[3]));
        auto ym = coords(psi(cm[0], cm[1], cm[2], cm[3]));
        double n2 = 0.0;
        for (int r = 0; r < 4; ++r) {
            jac[r][i] = (yp[r] - ym[r]) / (2.0 * step);
            n2 += jac[r][i] * jac[r][i];
        }
        colnorm *= std::sqrt(n2);
    }
    double det = determinant<4>(jac);
    if (std::abs(det) < 1e-10 * std::max(colnorm, 1e-30))
        throw NearSingularError("Psi jacobian is numerically singular");
    return det;
}

}  // namespace midstar

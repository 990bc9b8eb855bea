#include "midstar/starprod.hpp"

#include <chrono>
#include <cmath>
#include <future>
#include <vector>

#include "midstar/triangles.hpp"

namespace midstar {

namespace {

constexpr double kAntipodalTol = 1e-12;
constexpr std::int64_t kLeafBlock = 4096;

void check_fields(const ScalarField& f1, const ScalarField& f2) {
    if (!f1.integrable() || !f2.integrable())
        throw ValidationError("star integrands must be absolutely integrable "
                              "(oscillatory fields need Gaussian damping)");
}

// Fixed-tree pairwise reduction over [lo, hi); the split points depend only on
// the range, so the result is bit-identical for any worker count.  The
// evaluator takes the pair (outer, inner) of the flattened index over an
// outer x inner grid; the leaf loop carries the decomposition instead of
// dividing per node.
template <typename F>
Complex pairwise_sum(const F& eval, std::int64_t lo, std::int64_t hi, std::int64_t inner) {
    if (hi - lo <= kLeafBlock) {
        std::int64_t outer_i = lo / inner, inner_i = lo % inner;
        Complex acc = 0.0;
        for (std::int64_t i = lo; i < hi; ++i) {
            acc += eval(outer_i, inner_i);
            if (++inner_i == inner) {
                inner_i = 0;
                ++outer_i;
            }
        }
        return acc;
    }
    std::int64_t mid = lo + (hi - lo) / 2;
    return pairwise_sum(eval, lo, mid, inner) + pairwise_sum(eval, mid, hi, inner);
}

template <typename F>
Complex pairwise_sum_parallel(const F& eval, std::int64_t lo, std::int64_t hi,
                              std::int64_t inner, int budget) {
    if (budget <= 1 || hi - lo <= kLeafBlock) return pairwise_sum(eval, lo, hi, inner);
    std::int64_t mid = lo + (hi - lo) / 2;
    int left_budget = budget / 2;
    auto right = std::async(std::launch::async, [&] {
        return pairwise_sum_parallel(eval, mid, hi, inner, budget - left_budget);
    });
    Complex l = pairwise_sum_parallel(eval, lo, mid, inner, left_budget);
    return l + right.get();
}

struct VNode {
    Point m1;
    Point m3;
    double weight;  // chart measure times dv density
};

struct MNode {
    Point p;
    double weight;  // Liouville measure in the chart
};

// Tangent-fiber grid over T_mM cap U with the dv weights folded in.
std::vector<VNode> v_grid(const Space& space, const Point& m, int n, double radius) {
    std::vector<VNode> nodes;
    Frame fr = tangent_frame(space, m);
    if (space.kind() == SpaceKind::Euclidean2) {
        double h = 2.0 * radius / n;
        nodes.reserve(static_cast<std::size_t>(n) * n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                Vec3 v{-radius + (i + 0.5) * h, -radius + (j + 0.5) * h, 0.0};
                auto [m1, m3] = chord_map(space, m, v);
                nodes.push_back({m1, m3, 4.0 * h * h});
            }
        return nodes;
    }
    double rmax = space.kind() == SpaceKind::Sphere2 ? M_PI / 2.0 : radius;
    int nr = n, npsi = 2 * n;
    double hr = rmax / nr, hpsi = 2.0 * M_PI / npsi;
    nodes.reserve(static_cast<std::size_t>(nr) * npsi);
    for (int i = 0; i < nr; ++i) {
        double r = (i + 0.5) * hr;
        for (int j = 0; j < npsi; ++j) {
            double psi = (j + 0.5) * hpsi;
            Vec3 v = from_fiber(fr, {r * std::cos(psi), r * std::sin(psi)});
            double dv = dv_density(space, Tangent{m, v});
            auto [m1, m3] = chord_map(space, m, v);
            nodes.push_back({m1, m3, dv * r * hr * hpsi});
        }
    }
    return nodes;
}

// Surface grid centered at c: box on the plane, geodesic polar on the
// hyperboloid, latitude-longitude on the sphere.
std::vector<MNode> surface_grid(const Space& space, const Point& c, int n, double radius) {
    std::vector<MNode> nodes;
    Frame fr = tangent_frame(space, c);
    switch (space.kind()) {
        case SpaceKind::Euclidean2: {
            double h = 2.0 * radius / n;
            nodes.reserve(static_cast<std::size_t>(n) * n);
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) {
                    Point p = Point::r2(c.x.x - radius + (i + 0.5) * h,
                                        c.x.y - radius + (j + 0.5) * h);
                    nodes.push_back({p, h * h});
                }
            return nodes;
        }
        case SpaceKind::Hyperbolic2: {
            int nr = n, nphi = 2 * n;
            double hr = radius / nr, hphi = 2.0 * M_PI / nphi;
            nodes.reserve(static_cast<std::size_t>(nr) * nphi);
            for (int i = 0; i < nr; ++i) {
                double rho = (i + 0.5) * hr;
                for (int j = 0; j < nphi; ++j) {
                    double phi = (j + 0.5) * hphi;
                    Vec3 v = from_fiber(fr, {rho * std::cos(phi), rho * std::sin(phi)});
                    nodes.push_back({exp_map(space, c, v), std::sinh(rho) * hr * hphi});
                }
            }
            return nodes;
        }
        case SpaceKind::Sphere2: {
            int nth = n, nphi = 2 * n;
            double hth = M_PI / nth, hphi = 2.0 * M_PI / nphi;
            nodes.reserve(static_cast<std::size_t>(nth) * nphi);
            for (int i = 0; i < nth; ++i) {
                double th = (i + 0.5) * hth;
                for (int j = 0; j < nphi; ++j) {
                    double phi = (j + 0.5) * hphi;
                    Vec3 v = from_fiber(fr, {th * std::cos(phi), th * std::sin(phi)});
                    nodes.push_back({exp_map(space, c, v), std::sin(th) * hth * hphi});
                }
            }
            return nodes;
        }
    }
    return nodes;
}

bool near_antipodal(const Space& space, const Point& a, const Point& b) {
    return space.kind() == SpaceKind::Sphere2 && a.x.dot(b.x) <= -1.0 + kAntipodalTol;
}

double kernel_phase(const Space& space, const Point& m1, const Point& m2, const Point& m3) {
    return area_from_corners(space, CornerTriple{m1, m2, m3});
}

template <typename Integrate>
StarResult refine_loop(const QuadratureSpec& spec, const Integrate& integrate) {
    spec.validate();
    StarResult out;
    Complex prev = 0.0;
    for (int level = 0; level < spec.refinement_levels; ++level) {
        int n = spec.resolution << level;
        auto t0 = std::chrono::steady_clock::now();
        auto [value, samples] = integrate(n);
        auto t1 = std::chrono::steady_clock::now();
        out.samples_used += samples;
        out.levels.push_back(
            {n, value, samples, std::chrono::duration<double, std::milli>(t1 - t0).count()});
        if (level == spec.refinement_levels - 1) out.refine_error = std::abs(value - prev);
        prev = value;
        out.value = value;
    }
    if (spec.max_refine_error && out.refine_error > *spec.max_refine_error)
        throw NonConvergentError("refinement difference " + std::to_string(out.refine_error) +
                                 " exceeds requested bound");
    return out;
}

}  // namespace

void QuadratureSpec::validate() const {
    if (resolution < 8) throw ValidationError("quadrature resolution must be at least 8");
    if (refinement_levels < 2) throw ValidationError("at least 2 refinement levels are required");
    if (!(truncation_radius > 0.0)) throw ValidationError("truncation radius must be positive");
    if (!(collar >= 0.0)) throw ValidationError("collar must be nonnegative");
}

double star_normalization(double hbar) {
    return 1.0 / (M_PI * hbar * M_PI * hbar) / 16.0;
}

StarResult two_point_product(const Space& space, const ScalarField& f1, const ScalarField& f2,
                             const Point& m1, const Point& m3, const QuadratureSpec& spec,
                             int threads) {
    check_fields(f1, f2);
    if (near_antipodal(space, m1, m3))
        throw AntipodalPairError("two-point product endpoints are antipodal");
    const double hbar = space.hbar();
    Point center = midpoint(space, m1, m3);

    auto integrate = [&](int n) -> std::pair<Complex, std::int64_t> {
        auto m2s = surface_grid(space, center, n, spec.truncation_radius);
        auto eval = [&](std::int64_t, std::int64_t idx) -> Complex {
            const MNode& node = m2s[static_cast<std::size_t>(idx)];
            if (near_antipodal(space, node.p, m1) || near_antipodal(space, node.p, m3))
                return 0.0;
            Point a = midpoint(space, m1, node.p);
            Point b = midpoint(space, node.p, m3);
            Complex fv = f1(space, a) * f2(space, b);
            double phase = kernel_phase(space, m1, node.p, m3) / hbar;
            return fv * std::polar(node.weight, phase);
        };
        std::int64_t count = static_cast<std::int64_t>(m2s.size());
        Complex v = pairwise_sum_parallel(eval, 0, count, count, threads);
        return {v, count};
    };
    return refine_loop(spec, integrate);
}

StarResult star(const Space& space, const ScalarField& f1, const ScalarField& f2, const Point& m,
                const QuadratureSpec& spec, int threads) {
    check_fields(f1, f2);
    const double hbar = space.hbar();
    const double norm = star_normalization(hbar);

    auto integrate = [&](int n) -> std::pair<Complex, std::int64_t> {
        auto vs = v_grid(space, m, n, spec.truncation_radius);
        auto m2s = surface_grid(space, m, n, spec.truncation_radius);
        const std::int64_t nv = static_cast<std::int64_t>(vs.size());
        const std::int64_t nm = static_cast<std::int64_t>(m2s.size());
        auto eval = [&](std::int64_t iv, std::int64_t im) -> Complex {
            const VNode& vn = vs[static_cast<std::size_t>(iv)];
            const MNode& mn = m2s[static_cast<std::size_t>(im)];
            if (near_antipodal(space, mn.p, vn.m1) || near_antipodal(space, mn.p, vn.m3))
                return 0.0;
            Point a = midpoint(space, vn.m1, mn.p);
            Point b = midpoint(space, mn.p, vn.m3);
            Complex fv = f1(space, a) * f2(space, b);
            double phase = kernel_phase(space, vn.m1, mn.p, vn.m3) / hbar;
            return fv * std::polar(vn.weight * mn.weight, phase);
        };
        Complex v = pairwise_sum_parallel(eval, 0, nv * nm, nm, threads);
        return {norm * v, nv * nm};
    };
    return refine_loop(spec, integrate);
}

StarResult star_midpoint_form(const Space& space, const ScalarField& f1, const ScalarField& f2,
                              const Point& m, const QuadratureSpec& spec, int threads) {
    check_fields(f1, f2);
    const double hbar = space.hbar();
    const double norm = star_normalization(hbar);

    auto integrate = [&](int n) -> std::pair<Complex, std::int64_t> {
        auto grid = surface_grid(space, m, n, spec.truncation_radius);
        const std::int64_t ng = static_cast<std::int64_t>(grid.size());
        auto eval = [&](std::int64_t i1, std::int64_t i2) -> Complex {
            const MNode& n1 = grid[static_cast<std::size_t>(i1)];
            const MNode& n2 = grid[static_cast<std::size_t>(i2)];
            double a;
            double phase;
            if (space.kind() == SpaceKind::Euclidean2) {
                a = 16.0;
                phase = area_from_midpoints(space, MidpointTriple{m, n1.p, n2.p}) / hbar;
            } else {
                if (!in_W(space, m, n1.p, n2.p)) return 0.0;
                double det = det3(m.x, n1.p.x, n2.p.x);
                double rest = 1.0 - det * det;
                if (rest < spec.collar) return 0.0;
                double pab = inner(space, m.x, n1.p.x);
                double pbg = inner(space, n1.p.x, n2.p.x);
                double pga = inner(space, n2.p.x, m.x);
                double prod = pab * pbg * pga;
                if (space.kind() == SpaceKind::Sphere2) prod = std::abs(prod);
                a = 16.0 * prod * std::pow(rest, -2.5);
                if (space.kind() == SpaceKind::Hyperbolic2) {
                    phase = 2.0 * std::asin(det) / hbar;
                } else {
                    int eta = eta_sign(pab, pbg, pga);
                    phase = 2.0 * std::atan2(det, eta * std::sqrt(std::max(rest, 0.0))) / hbar;
                }
            }
            Complex fv = f1(space, n1.p) * f2(space, n2.p);
            return fv * std::polar(a * n1.weight * n2.weight, phase);
        };
        Complex v = pairwise_sum_parallel(eval, 0, ng * ng, ng, threads);
        return {norm * v, ng * ng};
    };
    return refine_loop(spec, integrate);
}

}  // namespace midstar

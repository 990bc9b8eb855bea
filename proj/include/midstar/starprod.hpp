#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "midstar/fields.hpp"
#include "midstar/geometry.hpp"

namespace midstar {

/// Deterministic tensor-midpoint quadrature controls with dyadic refinement.
/// `resolution` is the coarsest per-axis node count; level k uses
/// resolution * 2^k nodes per axis and the reported value is the finest level.
struct QuadratureSpec {
    int resolution = 24;
    double truncation_radius = 8.0;  // geodesic units; ignored on the sphere
    int refinement_levels = 3;
    double collar = 1e-6;  // midpoint-form cutoff on 1 - det^2 near the amplitude divergence
    std::optional<double> max_refine_error;  // when set, exceeding it raises NonConvergent

    void validate() const;
};

struct LevelSample {
    int resolution = 0;
    Complex value;
    std::int64_t samples = 0;
    double wall_ms = 0.0;
};

struct StarResult {
    Complex value;
    double refine_error = 0.0;  // |finest - second finest|
    std::int64_t samples_used = 0;
    std::vector<LevelSample> levels;  // one entry per refinement level
};

/// Normalization N(hbar) applied to the deformed product so the planar engine
/// reproduces the standard Weyl kernel (N * 16 = (pi hbar)^-2).
double star_normalization(double hbar);

/// Two-point product g(m1, m3): integral over m2 of
/// f1(mid(m1,m2)) f2(mid(m2,m3)) exp(i S(m1,m2,m3)/hbar) with Liouville
/// measure; the phase is the oriented triangle area of the loop m1->m2->m3.
StarResult two_point_product(const Space& space, const ScalarField& f1, const ScalarField& f2,
                             const Point& m1, const Point& m3, const QuadratureSpec& spec,
                             int threads = 1);

/// The deformed product evaluated in the chord chart: integral over
/// (v, m2) in (T_mM cap U) x M of the two-point integrand against dv dm2,
/// times star_normalization(hbar).
StarResult star(const Space& space, const ScalarField& f1, const ScalarField& f2, const Point& m,
                const QuadratureSpec& spec, int threads = 1);

/// The same product computed in the midpoint chart (validation path):
/// integral over W_m of f1(m') f2(m'') exp(i S(m,m',m'')/hbar) A(m,m',m'')
/// with the collar cutoff excluding the amplitude divergence.
StarResult star_midpoint_form(const Space& space, const ScalarField& f1, const ScalarField& f2,
                              const Point& m, const QuadratureSpec& spec, int threads = 1);

}  // namespace midstar

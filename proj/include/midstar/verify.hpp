#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "midstar/geometry.hpp"
#include "midstar/triangles.hpp"

namespace midstar {

/// Portable deterministic uniforms (identical streams for identical seeds on
/// any platform, unlike std::uniform_real_distribution).
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}
    double uniform() { return double(eng_() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    std::uint64_t bits() { return eng_(); }

  private:
    std::mt19937_64 eng_;
};

/// Random point within geodesic radius rho_max of the chart origin
/// (box [-rho_max, rho_max]^2 on the plane).
Point random_point(Rng& rng, const Space& space, double rho_max);

/// Random non-degenerate corner triple; on the sphere all sides < pi and
/// |det| bounded away from zero so midpoint recovery is well-conditioned.
CornerTriple random_triangle(Rng& rng, const Space& space, double rho_max);

struct VerifyRow {
    std::string suite;
    std::string case_id;
    std::string quantity;
    double expected = 0.0;
    double got = 0.0;
    double abs_err = 0.0;
    bool pass = false;
};

std::vector<std::string> verify_suites();

/// Runs one named suite ("geometry", "triangles", "oracles", "starprod",
/// "semiclassics", or "all") with the given seed.
std::vector<VerifyRow> run_suite(const std::string& suite, std::uint64_t seed);

}  // namespace midstar

#include "lfsgeo/bounds.hpp"

#include <cmath>

#include "lfsgeo/errors.hpp"
#include "lfsgeo/manifolds.hpp"

namespace lfsgeo::bounds {

namespace {

void require(bool ok, const char* what) {
    if (!ok) throw DomainError(what);
}

// 1 - sqrt(1 - t^2), written to avoid cancellation at small t.
double gap_improved(double t) { return t * t / (1.0 + std::sqrt(1.0 - t * t)); }

} // namespace

double f_of_t(double t) {
    require(t >= 0.0 && t < 1.0, "f_of_t: t must be in [0, 1)");
    const double c = 2.0 + 3.0 * t + 2.0 * t * t;
    return (c * c + 4.0 * t + 5.0) / (2.0 - 2.0 * t);
}

double thm1i(double t) {
    require(t >= 0.0 && t <= 0.25, "thm1i: t must be in [0, 1/4]");
    return t * f_of_t(t);
}

double thm1ii(double t) {
    require(t >= 0.0 && t <= 19.0 / 200.0, "thm1ii: t must be in [0, 19/200]");
    if (t == 0.0) return 0.0;
    const double g = gap_improved(t);
    const double h = t + (t + g) * (1.0 + t);
    return (0.5 * t * t + 0.5 * h * h + g * (1.0 + t)) / (t * (1.0 - t));
}

double amenta_dey(double t) {
    require(t >= 0.0 && t <= 1.0 / 3.0, "amenta_dey: t must be in [0, 1/3]");
    return t / (1.0 - t);
}

double nsw(double t) {
    require(t >= 0.0 && t <= 0.5, "nsw: t must be in [0, 1/2]");
    return 2.0 * std::sqrt(t * (1.0 - t));
}

double bsw(double t) {
    require(t >= 0.0 && t <= 0.5, "bsw: t must be in [0, 1/2]");
    return 2.0 * t * std::sqrt(1.0 - t * t);
}

double lem1_point_to_tangent(double t) {
    require(t >= 0.0 && t < 1.0, "lem1: t must be in [0, 1)");
    return 0.5 * t * t;
}

double lem2_tangent_to_manifold(double t) {
    require(t >= 0.0 && t <= 0.25, "lem2: t must be in [0, 1/4]");
    return 2.0 * t * t;
}

double improved_tangent_to_manifold(double t) {
    require(t >= 0.0 && t <= 19.0 / 200.0, "lem2imp: t must be in [0, 19/200]");
    return gap_improved(t);
}

bool BoundSpec::in_domain(double t) const {
    if (min_inclusive ? (t < t_min) : (t <= t_min)) return false;
    if (max_inclusive ? (t > t_max) : (t >= t_max)) return false;
    return true;
}

double BoundSpec::evaluate_checked(double t) const {
    if (!in_domain(t)) {
        throw DomainError(id + ": t=" + std::to_string(t) + " outside validity domain");
    }
    return evaluate(t);
}

const std::vector<BoundSpec>& registry() {
    using K = Kind;
    using N = Normalization;
    static const std::vector<BoundSpec> specs = {
        {"thm1i", K::tangent_variation, 0.0, false, 0.25, true, N::lfs_local, &thm1i},
        {"thm1ii", K::tangent_variation, 0.0, false, 19.0 / 200.0, true, N::lfs_local, &thm1ii, true},
        {"ad", K::tangent_variation, 0.0, false, 1.0 / 3.0, true, N::lfs_local, &amenta_dey},
        {"nsw", K::tangent_variation, 0.0, false, 0.5, true, N::reach_global, &nsw},
        {"bsw", K::tangent_variation, 0.0, false, 0.5, true, N::reach_global, &bsw},
        {"lem1", K::point_to_tangent, 0.0, false, 1.0, false, N::lfs_local, &lem1_point_to_tangent},
        {"lem2", K::tangent_to_manifold, 0.0, false, 0.25, true, N::lfs_local, &lem2_tangent_to_manifold},
        {"lem2imp", K::tangent_to_manifold, 0.0, false, 19.0 / 200.0, true, N::lfs_local,
         &improved_tangent_to_manifold},
        {"sphere_lower", K::lower_bound, 0.0, true, 2.0, true, N::lfs_local, &sphere_exact_variation},
    };
    return specs;
}

const BoundSpec& by_id(const std::string& id) {
    for (const auto& spec : registry()) {
        if (spec.id == id) return spec;
    }
    throw ConfigError("unknown bound id: " + id);
}

} // namespace lfsgeo::bounds

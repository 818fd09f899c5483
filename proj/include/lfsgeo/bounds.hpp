#pragma once

#include <string>
#include <vector>

namespace lfsgeo::bounds {

// Bound formulas as plain functions of the normalized distance t.
// Each accepts the closed extension t = 0 (where every bound vanishes) and
// throws DomainError outside its validity interval; no clamping.

/// f(t) = ((2 + 3t + 2t^2)^2 + 4t + 5) / (2 - 2t), for 0 <= t < 1.
double f_of_t(double t);

/// Tangent variation bound t * f(t), valid for t <= 1/4.
double thm1i(double t);

/// Tangent variation bound with asymptotic slope 3, valid for t <= 19/200.
/// Closed form of the same estimate chain as thm1i with the improved
/// tangent-to-surface gap (see docs/thm1ii_closed_form.md):
///   g(t) = 1 - sqrt(1 - t^2)
///   h(t) = t + (t + g(t)) (1 + t)
///   bound(t) = (t^2/2 + h(t)^2/2 + g(t)(1 + t)) / (t (1 - t))
double thm1ii(double t);

/// t / (1 - t); two-dimensional submanifolds of R^3, valid for t <= 1/3.
double amenta_dey(double t);

/// 2 sqrt(t (1 - t)); t normalized by the reach, valid for t <= 1/2.
double nsw(double t);

/// 2 t sqrt(1 - t^2); t normalized by the reach, valid for t <= 1/2.
double bsw(double t);

/// Point-to-tangent bound t^2 / 2 (units of lfs(p)), valid for t < 1.
double lem1_point_to_tangent(double t);

/// Tangent-to-manifold bound 2 t^2 (units of lfs(p)), valid for t <= 1/4.
double lem2_tangent_to_manifold(double t);

/// Improved tangent-to-manifold bound 1 - sqrt(1 - t^2), valid for t <= 19/200.
double improved_tangent_to_manifold(double t);

enum class Kind {
    tangent_variation,  // bounds sin angle(T_p, T_q)
    point_to_tangent,   // bounds dist(q, T_p) / lfs(p)
    tangent_to_manifold,// bounds dist(x, M) / lfs(p) for x in T_p
    lower_bound,        // exact sphere variation; a floor, not a ceiling
};

enum class Normalization { lfs_local, reach_global };

/// A named bound with its validity interval (t_min, t_max] (open at zero;
/// lem1 is open at both ends, sphere_lower closed at both).
struct BoundSpec {
    std::string id;
    Kind kind;
    double t_min = 0.0;
    bool min_inclusive = false;
    double t_max = 0.0;
    bool max_inclusive = true;
    Normalization normalization = Normalization::lfs_local;
    double (*evaluate)(double) = nullptr;
    // True for bounds whose closed form is our own derivation rather than a
    // formula quoted from the literature; reports surface this flag.
    bool reconstructed = false;

    bool in_domain(double t) const;
    /// evaluate() guarded by in_domain(); throws DomainError outside.
    double evaluate_checked(double t) const;
};

/// All bounds addressable by id: thm1i, thm1ii, ad, nsw, bsw, lem1, lem2,
/// lem2imp, sphere_lower.
const std::vector<BoundSpec>& registry();

/// Lookup by id; throws ConfigError for unknown ids.
const BoundSpec& by_id(const std::string& id);

} // namespace lfsgeo::bounds

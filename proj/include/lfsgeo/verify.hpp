#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "lfsgeo/manifolds.hpp"

namespace lfsgeo::verify {

// Monte-Carlo certification harness: samples point pairs on a manifold at
// prescribed normalized distances, measures the true tangent variation and
// the point/tangent gap distances, and checks every requested bound within
// its validity interval.

struct BoundCheckResult {
    double bound_value = 0.0;
    bool satisfied = false;
    // measured / bound for upper bounds, bound / measured for the lower
    // bound; <= 1 + tol exactly when satisfied.
    double tightness = 0.0;
};

struct PairObservation {
    double t = 0.0;            // achieved |p - q| / lfs(p)
    double sin_angle = 0.0;    // sin of largest angle(T_p, T_q)
    double dist_q_to_tangent = 0.0; // |q - projection onto affine T_p| (length)
    double lfs_p = 0.0;
    double lfs_q = 0.0;
    std::map<std::string, BoundCheckResult> per_bound; // in-domain checks only
};

struct BoundTally {
    long long checked = 0;     // observations inside the bound's t-domain
    long long violations = 0;
    double max_tightness = 0.0;
    std::array<long long, 32> histogram{}; // tightness buckets on [0,1], top bucket clamps
};

struct VerifyOptions {
    long long n_pairs = 10000;
    double t_min = 0.0;        // exclusive lower edge of the sampled range
    double t_max = 0.25;       // inclusive upper edge
    std::uint64_t seed = 0;
    // Check ids: any registry bound id, plus "eq4" (the chained two-step
    // probe inequality; see eq4_intermediate_check). Empty = every registry
    // bound applicable to the manifold (the sphere-exact floor only where it
    // is a floor: circle and sphere).
    std::vector<std::string> checks;
    unsigned threads = 0;      // 0 = hardware concurrency
    double tolerance = -1.0;   // relative; < 0 selects 1e-9 analytic / 1e-3 oracle
    // Negative-control hook: scale the named bound before comparison.
    std::string corrupt_bound;
    double corrupt_factor = 0.5;
    bool collect_observations = false;
};

struct VerificationReport {
    std::string manifold;
    std::map<std::string, double> parameters;
    long long n_pairs = 0;     // requested budget
    long long n_failed = 0;    // pair constructions that raised Unreachable
    std::uint64_t seed = 0;
    double t_min = 0.0;
    double t_max = 0.0;
    double tolerance = 0.0;
    std::vector<std::pair<std::string, BoundTally>> checks; // sorted by id
    std::vector<std::string> reconstructed; // checked bounds that are our own closed form
    std::vector<PairObservation> observations; // populated only on request
    // Measured but deliberately excluded from to_json(): identical inputs
    // must produce byte-identical reports.
    double wall_ms = 0.0;

    const BoundTally* find(const std::string& id) const;
    long long total_violations() const;
    std::string to_json() const;
    // One row per in-domain (observation, bound) pair; requires
    // collect_observations. Columns: t, sin_angle, bound_id, bound_value,
    // tightness, satisfied.
    void write_csv(std::ostream& out) const;
};

VerificationReport verify_tangent_bounds(const Manifold& m, const VerifyOptions& options);
VerificationReport verify_tangent_bounds(const Manifold& m, long long n_pairs,
                                         double t_min, double t_max,
                                         std::uint64_t seed);

// Chained two-step probe: for each pair (p, q) at normalized distance t and
// a random unit tangent direction u at q, checks
//   dist(q + t lfs(q) u, T_p) <= t^2/2 ((2+3t+2t^2)^2 + 4(1+t)) lfs(p)
// on t in (0, 1/4].
VerificationReport eq4_intermediate_check(const Manifold& m, long long n_pairs,
                                          std::uint64_t seed);

struct SandwichReport {
    std::string manifold;
    std::map<std::string, double> parameters;
    long long n_pairs = 0;
    long long n_failed = 0;
    std::uint64_t seed = 0;
    double tolerance = 0.0;
    long long violations = 0;
    // Largest signed relative overshoot of either inequality over all pairs:
    //   max( (1-t) lfs(p) - lfs(q), lfs(q) - (1+t) lfs(p) ) / lfs(p).
    // Negative means every pair held with room to spare.
    double max_rel_excess = -std::numeric_limits<double>::infinity();
    double wall_ms = 0.0;

    std::string to_json() const;
};

// Checks (1-t) lfs(p) <= lfs(q) <= (1+t) lfs(p) on pairs with t < 1.
SandwichReport verify_lipschitz_sandwich(const Manifold& m, long long n_pairs,
                                         std::uint64_t seed);

struct ProjectionReport {
    std::string manifold;
    std::map<std::string, double> parameters;
    std::uint64_t seed = 0;
    long long n_probe = 0;
    double r = 0.0;        // lfs(p) / 10: radius of the manifold patch
    double r_prime = 0.0;  // 19 lfs(p) / 200: covered tangent-ball radius
    double tolerance = 0.0;

    // (i) injectivity probe. contraction_floor is 1 - (1/9 + 6/10): one minus
    // the angle bound between chords in the patch and the tangent plane.
    double contraction_floor = 0.0;
    long long pair_probes = 0;
    long long collapse_violations = 0;
    double min_projected_ratio = std::numeric_limits<double>::infinity();
    bool no_collapse_observed = false; // statistical probe, not a proof

    // (ii) coverage probe: preimage found for every tangent-ball point.
    long long coverage_probes = 0;
    long long coverage_failures = 0;
    double max_preimage_residual = 0.0;
    bool coverage_ok = false;

    // (iii) height of the preimage above the tangent plane.
    long long height_checks = 0;
    long long height_violations = 0;
    double max_height_tightness = 0.0;
    bool height_ok = false;

    double wall_ms = 0.0;

    std::string to_json() const;
};

// Probes the orthogonal projection of the patch {x on M : |x - p| <= lfs(p)/10}
// onto the affine tangent plane at p:
//   (i)  no collapse: projected distances stay >= contraction_floor * |x - y|,
//   (ii) the tangent ball of radius 19 lfs(p)/200 is covered by the projection,
//   (iii) each preimage sits within t^2 lfs(p) / (1 + sqrt(1 - t^2)) of the plane.
// coverage_radius_scale widens (ii)'s probe ball beyond its default r_prime
// (heights are then only checked where the height bound applies, t <= 19/200).
// Codimension-1 manifolds only.
ProjectionReport verify_projection_lemma(const Manifold& m, const ManifoldPoint& p,
                                         long long n_probe, std::uint64_t seed,
                                         double coverage_radius_scale = 1.0);

} // namespace lfsgeo::verify

#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "lfsgeo/kdtree.hpp"
#include "lfsgeo/subspace.hpp"

namespace lfsgeo::pointcloud {

// Finite samples of a manifold: estimation of tangent spaces (local PCA) and
// local feature size (shrinking ball), plus an audit that re-runs the bound
// checks with estimated quantities to show how estimator noise inflates
// apparent violations.

class PointCloud {
public:
    // All points must share one dimension N >= 1 and n >= N + 1.
    explicit PointCloud(std::vector<Eigen::VectorXd> points);

    // One point per line, whitespace-separated coordinates; blank lines
    // skipped; optional "# dim N" header pins the expected dimension.
    static PointCloud load(std::istream& in);
    static PointCloud load_file(const std::string& path);
    void save(std::ostream& out) const;
    void save_file(const std::string& path) const;

    int ambient_dim() const { return dim_; }
    std::size_t size() const { return tree_.size(); }
    const Eigen::VectorXd& point(std::size_t i) const { return tree_.point(i); }
    const KdTree& index() const { return tree_; }
    const Eigen::VectorXd& centroid() const { return centroid_; }
    // Half the diagonal of the bounding box; default shrinking-ball seed.
    double half_extent() const { return half_extent_; }

private:
    int dim_;
    KdTree tree_;
    Eigen::VectorXd centroid_;
    double half_extent_;
};

struct TangentEstimate {
    SubspaceBasis basis;            // N x m, top principal directions
    Eigen::VectorXd eigenvalues;    // all N, descending
    int dim = 0;                    // m actually used
    double spectral_gap = 0.0;      // eigenvalues[m-1] / eigenvalues[m]
    bool reliable = false;          // spectral_gap >= 10
};

// Local PCA over the k nearest neighbors (query included). m = 0 picks the
// dimension with the largest spectral gap; otherwise the top-m directions
// are returned and DegenerateNeighborhood is raised when the neighborhood
// has rank below m.
TangentEstimate estimate_tangent(const PointCloud& cloud, std::size_t query,
                                 int k, int m = 0);

// Unit normal for codimension-1 clouds: the least-variance principal
// direction, oriented away from the cloud centroid (adequate for the
// star-shaped test shapes; recorded limitation).
Eigen::VectorXd estimate_normal(const PointCloud& cloud, std::size_t query, int k);

// Shrinking-ball local feature size: starting from initial_radius, a ball
// tangent to the query point along its estimated normal shrinks through the
// nearest sample it contains until empty; the converged radius approximates
// the distance to the medial axis on that side. Returns the min over the two
// normal directions. Codimension must be 1 (pass intrinsic_dim to override
// the ambient-minus-one default). Throws NoConvergence after 100 shrink
// steps and DegenerateNeighborhood on duplicate points.
double estimate_lfs(const PointCloud& cloud, std::size_t query,
                    double initial_radius, int k = 12, int intrinsic_dim = -1);

struct AuditOptions {
    int k = 12;
    long long n_pairs = 2000;
    std::uint64_t seed = 0;
    double t_min = 0.05;
    double t_max = 0.25;
    // Bound ids to audit; sine-of-angle and point-to-tangent kinds only.
    std::vector<std::string> checks = {"thm1i"};
    double initial_radius = 0.0; // 0 = cloud half extent
    // Exact-value injection: when set, replaces the estimator. With both
    // hooks supplied the audit reduces to the analytic check (0 violations).
    std::function<SubspaceBasis(const Eigen::VectorXd&)> exact_tangent;
    std::function<double(const Eigen::VectorXd&)> exact_lfs;
};

struct AuditCheckTally {
    long long checked = 0;
    long long apparent_violations = 0;
    double max_ratio = 0.0; // measured / bound
};

struct AuditReport {
    std::size_t cloud_size = 0;
    int ambient_dim = 0;
    int k = 0;
    long long n_pairs = 0;   // attempted
    long long n_skipped = 0; // no partner in the t-window, or estimator failure
    std::uint64_t seed = 0;
    double t_min = 0.0;
    double t_max = 0.0;
    std::vector<std::pair<std::string, AuditCheckTally>> checks; // sorted by id
    long long checked_total = 0;
    long long violations_total = 0;
    double violation_rate = 0.0; // violations_total / checked_total
    // Fraction of tangent estimates passing the spectral-gap test; estimates
    // flagged unreliable below 0.9.
    double gap_pass_fraction = 1.0;
    bool estimates_unreliable = false;
    double wall_ms = 0.0; // not serialized

    std::string to_json() const;
};

AuditReport empirical_bound_audit(const PointCloud& cloud, const AuditOptions& options);
AuditReport empirical_bound_audit(const PointCloud& cloud, int k, long long n_pairs,
                                  std::uint64_t seed);

} // namespace lfsgeo::pointcloud

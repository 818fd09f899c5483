#pragma once

#include <cmath>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "lfsgeo/errors.hpp"
#include "lfsgeo/rng.hpp"
#include "lfsgeo/subspace.hpp"

namespace lfsgeo {

enum class LfsSource { analytic, oracle };

/// A point on a manifold together with its tangent space and feature size.
struct ManifoldPoint {
    Eigen::VectorXd position;
    SubspaceBasis tangent;
    double lfs = 0.0;
    LfsSource lfs_source = LfsSource::analytic;
};

/// Smooth compact submanifold of R^N with samplers and feature-size queries.
///
/// Every shape in the zoo knows its exact tangent space and either an exact
/// local feature size or a certified numerical stand-in (`lfs_source()` says
/// which). `sample_pair_at_t` produces a second surface point at a prescribed
/// normalized distance t = |p-q| / lfs(p) from a given one; the achieved t is
/// exact to 1e-9 * lfs(p) or the call throws Unreachable.
class Manifold {
public:
    virtual ~Manifold() = default;

    const std::string& name() const { return name_; }
    int ambient_dim() const { return ambient_dim_; }
    int intrinsic_dim() const { return intrinsic_dim_; }
    double reach() const { return reach_; }
    /// Largest normalized distance `sample_pair_at_t` accepts for this shape.
    double t_max() const { return t_max_; }
    LfsSource lfs_source() const { return lfs_source_; }
    const std::map<std::string, double>& parameters() const { return params_; }

    /// Uniform-area random surface point.
    ManifoldPoint sample_point(RngStream& rng) const { return make_point(sample_position(rng)); }

    /// Attach tangent space and feature size to an on-surface position.
    ManifoldPoint make_point(const Eigen::VectorXd& position) const {
        return ManifoldPoint{position, tangent_at(position), lfs(position), lfs_source_};
    }

    virtual Eigen::VectorXd sample_position(RngStream& rng) const = 0;
    virtual SubspaceBasis tangent_at(const Eigen::VectorXd& p) const = 0;
    virtual Eigen::VectorXd unit_normal_at(const Eigen::VectorXd& p) const = 0;

    /// Local feature size: distance from the surface point to the medial axis.
    virtual double lfs(const Eigen::VectorXd& p) const = 0;

    /// Distance from an arbitrary ambient point to the medial axis.
    virtual double medial_distance(const Eigen::VectorXd& x) const = 0;

    /// Signed on-surface residual; |implicit| <= 1e-12 certifies membership.
    virtual double implicit(const Eigen::VectorXd& x) const = 0;

    /// Euclidean distance from an arbitrary ambient point to the surface.
    virtual double distance_to(const Eigen::VectorXd& x) const = 0;

    /// Discrete model of the medial axis with sample spacing <= resolution.
    /// Minimum distance to this set over-estimates the true feature size and
    /// converges to it from above as the resolution shrinks.
    virtual std::vector<Eigen::VectorXd> medial_samples(double resolution) const {
        (void)resolution;
        throw OracleUnavailable("no medial-axis description registered for " + name_);
    }

    /// Second surface point q with |p-q| = t * lfs(p) along a random on-surface
    /// path from p. Throws DomainError for t outside (0, t_max], Unreachable if
    /// no path attains the chord after the retry budget.
    ManifoldPoint sample_pair_at_t(const ManifoldPoint& p, double t, RngStream& rng) const;

    /// On-surface curve from p in a random direction; eval(0) == p and the
    /// chord |eval(s) - p| should reach any feasible target for some random
    /// direction with s in (0, s_max].
    struct Path {
        std::function<Eigen::VectorXd(double)> eval;
        double s_max = 0.0;
    };

protected:
    Manifold(std::string name, int ambient_dim, int intrinsic_dim, double reach, double t_max,
             LfsSource source, std::map<std::string, double> params)
        : name_(std::move(name)),
          ambient_dim_(ambient_dim),
          intrinsic_dim_(intrinsic_dim),
          reach_(reach),
          t_max_(t_max),
          lfs_source_(source),
          params_(std::move(params)) {}

    virtual Path make_path(const Eigen::VectorXd& p, double target_chord, RngStream& rng) const = 0;

private:
    std::string name_;
    int ambient_dim_;
    int intrinsic_dim_;
    double reach_;
    double t_max_;
    LfsSource lfs_source_;
    std::map<std::string, double> params_;
};

namespace detail {
/// Finds s with |path.eval(s) - origin| = target via scan + bisection.
/// Returns false when no scan point reaches the target chord.
bool solve_chord(const Manifold::Path& path, const Eigen::VectorXd& origin, double target,
                 double tol, double& s_out);

/// Orthonormal basis of the hyperplane orthogonal to a unit vector
/// (Householder complement; columns are exactly orthonormal).
Eigen::MatrixXd hyperplane_basis(const Eigen::VectorXd& unit_normal);

/// Distance from y to the axis-aligned ellipsoid sum (x_i/semi_axes_i)^2 = 1,
/// any dimension, interior or exterior query, zero components handled (the
/// off-axis feet these create are considered). Fills `nearest` if non-null.
double nearest_on_axis_aligned_ellipsoid(const Eigen::VectorXd& semi_axes,
                                         const Eigen::VectorXd& y,
                                         Eigen::VectorXd* nearest = nullptr);
} // namespace detail

/// Circle of the given radius in R^2, centered at the origin.
class Circle final : public Manifold {
public:
    explicit Circle(double radius);

    Eigen::VectorXd sample_position(RngStream& rng) const override;
    SubspaceBasis tangent_at(const Eigen::VectorXd& p) const override;
    Eigen::VectorXd unit_normal_at(const Eigen::VectorXd& p) const override;
    double lfs(const Eigen::VectorXd&) const override { return radius_; }
    double medial_distance(const Eigen::VectorXd& x) const override { return x.norm(); }
    double implicit(const Eigen::VectorXd& x) const override { return x.norm() - radius_; }
    double distance_to(const Eigen::VectorXd& x) const override {
        return std::abs(implicit(x));
    }
    std::vector<Eigen::VectorXd> medial_samples(double resolution) const override;

protected:
    Path make_path(const Eigen::VectorXd& p, double target_chord, RngStream& rng) const override;

private:
    double radius_;
};

/// Round sphere S^{N-1} of the given radius in R^N, 2 <= N <= 16.
class Sphere final : public Manifold {
public:
    Sphere(int ambient_dim, double radius);

    Eigen::VectorXd sample_position(RngStream& rng) const override;
    SubspaceBasis tangent_at(const Eigen::VectorXd& p) const override;
    Eigen::VectorXd unit_normal_at(const Eigen::VectorXd& p) const override;
    double lfs(const Eigen::VectorXd&) const override { return radius_; }
    double medial_distance(const Eigen::VectorXd& x) const override { return x.norm(); }
    double implicit(const Eigen::VectorXd& x) const override { return x.norm() - radius_; }
    double distance_to(const Eigen::VectorXd& x) const override {
        return std::abs(implicit(x));
    }
    std::vector<Eigen::VectorXd> medial_samples(double resolution) const override;

protected:
    Path make_path(const Eigen::VectorXd& p, double target_chord, RngStream& rng) const override;

private:
    double radius_;
};

/// Torus of revolution about the z-axis: spine radius R, tube radius r,
/// restricted to the fat regime R > 2r where the feature size is r everywhere.
class Torus final : public Manifold {
public:
    Torus(double spine_radius, double tube_radius);

    Eigen::VectorXd sample_position(RngStream& rng) const override;
    SubspaceBasis tangent_at(const Eigen::VectorXd& p) const override;
    Eigen::VectorXd unit_normal_at(const Eigen::VectorXd& p) const override;
    double lfs(const Eigen::VectorXd& p) const override;
    double medial_distance(const Eigen::VectorXd& x) const override;
    double implicit(const Eigen::VectorXd& x) const override;
    double distance_to(const Eigen::VectorXd& x) const override {
        return std::abs(implicit(x));
    }
    std::vector<Eigen::VectorXd> medial_samples(double resolution) const override;

protected:
    Path make_path(const Eigen::VectorXd& p, double target_chord, RngStream& rng) const override;

private:
    double R_, r_;
};

/// Triaxial ellipsoid x^2/a^2 + y^2/b^2 + z^2/c^2 = 1 with a > b > c > 0.
///
/// The feature size comes from a dense sampled model of the medial surface
/// (an elliptical disk in the z = 0 plane); `medial_step` controls the sample
/// spacing and thereby the oracle accuracy (error is O(step^2) near the disk
/// interior, dominated in practice by the bisected rim points).
class Ellipsoid final : public Manifold {
public:
    Ellipsoid(double a, double b, double c, double medial_step = 1e-3);
    ~Ellipsoid() override;

    Eigen::VectorXd sample_position(RngStream& rng) const override;
    SubspaceBasis tangent_at(const Eigen::VectorXd& p) const override;
    Eigen::VectorXd unit_normal_at(const Eigen::VectorXd& p) const override;
    double lfs(const Eigen::VectorXd& p) const override;
    double medial_distance(const Eigen::VectorXd& x) const override;
    double implicit(const Eigen::VectorXd& x) const override;
    double distance_to(const Eigen::VectorXd& x) const override;

    std::vector<Eigen::VectorXd> medial_samples(double resolution) const override;

    /// Half-extents of the medial disk along x and y.
    double medial_half_x() const { return alpha_; }
    double medial_half_y() const { return beta_; }

protected:
    Path make_path(const Eigen::VectorXd& p, double target_chord, RngStream& rng) const override;

private:
    const class KdTree& medial_tree() const;

    double a_, b_, c_;
    double alpha_, beta_;
    double medial_step_;
    mutable std::shared_ptr<const class KdTree> medial_;
    mutable std::once_flag medial_once_;
};

/// Brute-force feature-size evaluator: distance to the manifold's sampled
/// medial set at a fixed resolution, backed by a nearest-neighbor tree.
class MedialSampleOracle {
public:
    MedialSampleOracle(const Manifold& m, double resolution);
    ~MedialSampleOracle();
    MedialSampleOracle(MedialSampleOracle&&) noexcept;

    double operator()(const Eigen::VectorXd& x) const;
    std::size_t sample_count() const;

private:
    std::unique_ptr<class KdTree> tree_;
};

/// Factory keyed by shape name; unknown names throw UnsupportedShape, unknown
/// or invalid parameter keys throw ConfigError.
///
/// Shapes and parameters (defaults in parentheses):
///   circle     radius (1)
///   sphere     radius (1), n (3)           ambient dimension, 2..16
///   torus      R (2), r (0.5)              requires R > 2r
///   ellipsoid  a (1.5), b (1), c (0.75),   requires a > b > c > 0
///              medial_step (1e-3)
std::shared_ptr<const Manifold> make_manifold(const std::string& name,
                                              const std::map<std::string, double>& params = {});

/// Exact tangent variation between two unit-sphere points at chord distance t:
/// t * sqrt(1 - t^2/4), valid for t in [0, 2].
double sphere_exact_variation(double t);

} // namespace lfsgeo

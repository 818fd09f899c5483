#include "lfsgeo/manifolds.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "lfsgeo/kdtree.hpp"

namespace lfsgeo {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::string format_double(double v) {
    std::ostringstream os;
    os << v;
    return os.str();
}

} // namespace

namespace detail {

Eigen::MatrixXd hyperplane_basis(const Eigen::VectorXd& unit_normal) {
    const auto n = static_cast<int>(unit_normal.size());
    Eigen::VectorXd v = unit_normal;
    v[0] += v[0] >= 0.0 ? 1.0 : -1.0; // reflector mapping the normal onto the first axis
    const double scale = 2.0 / v.squaredNorm();
    Eigen::MatrixXd basis(n, n - 1);
    for (int j = 1; j < n; ++j) {
        basis.col(j - 1) = -(scale * v[j]) * v;
        basis(j, j - 1) += 1.0;
    }
    return basis;
}

bool solve_chord(const Manifold::Path& path, const Eigen::VectorXd& origin, double target,
                 double slack, double& s_out) {
    constexpr int kScan = 256;
    constexpr int kBisect = 80;
    double s_prev = 0.0;
    double best_s = 0.0, best_chord = 0.0;
    double s_hit = -1.0;
    for (int i = 1; i <= kScan; ++i) {
        const double s = path.s_max * static_cast<double>(i) / kScan;
        const double chord = (path.eval(s) - origin).norm();
        if (chord > best_chord) {
            best_chord = chord;
            best_s = s;
        }
        if (chord >= target) {
            s_hit = s;
            break;
        }
        s_prev = s;
    }
    if (s_hit < 0.0) {
        // No scan point reaches the target; accept the maximum if it falls
        // within the caller's slack (covers targets at the chord's supremum).
        if (best_chord >= target - slack) {
            s_out = best_s;
            return true;
        }
        return false;
    }
    double lo = s_prev, hi = s_hit;
    for (int i = 0; i < kBisect; ++i) {
        const double mid = 0.5 * (lo + hi);
        ((path.eval(mid) - origin).norm() >= target ? hi : lo) = mid;
    }
    s_out = hi;
    return true;
}

double nearest_on_axis_aligned_ellipsoid(const Eigen::VectorXd& semi_axes,
                                         const Eigen::VectorXd& y_in, Eigen::VectorXd* nearest) {
    const auto d = static_cast<int>(semi_axes.size());
    const Eigen::VectorXd& e = semi_axes;
    const Eigen::VectorXd y = y_in.cwiseAbs();

    std::vector<int> nz, zero;
    for (int i = 0; i < d; ++i) (y[i] > 0.0 ? nz : zero).push_back(i);

    double best = std::numeric_limits<double>::infinity();
    Eigen::VectorXd bx = Eigen::VectorXd::Zero(d);

    if (nz.empty()) {
        int k = 0;
        e.minCoeff(&k);
        best = e[k];
        bx[k] = e[k];
    } else {
        // Interior/exterior foot with all zero components pinned at zero:
        // x_i = e_i^2 y_i / (t + e_i^2) with t the root of the constraint.
        double t_lo = -std::numeric_limits<double>::infinity();
        double bracket = 0.0;
        for (int i : nz) {
            t_lo = std::max(t_lo, e[i] * y[i] - e[i] * e[i]);
            bracket += e[i] * y[i] * e[i] * y[i];
        }
        double t_hi = std::max(t_lo, std::sqrt(bracket)) + 1.0;
        const auto constraint = [&](double t) {
            double s = 0.0;
            for (int i : nz) {
                const double term = e[i] * y[i] / (t + e[i] * e[i]);
                s += term * term;
            }
            return s - 1.0;
        };
        for (int it = 0; it < 160; ++it) {
            const double mid = 0.5 * (t_lo + t_hi);
            (constraint(mid) >= 0.0 ? t_lo : t_hi) = mid;
        }
        const double t = 0.5 * (t_lo + t_hi);
        double dist2 = 0.0;
        for (int i : nz) {
            bx[i] = e[i] * e[i] * y[i] / (t + e[i] * e[i]);
            const double diff = y[i] * t / (t + e[i] * e[i]);
            dist2 += diff * diff;
        }
        best = std::sqrt(dist2);
    }

    // Feet that leave a zero component: require t = -e_j^2, feasible only when
    // the remaining coordinates fit strictly inside the sub-ellipsoid.
    for (int j : zero) {
        const double ej2 = e[j] * e[j];
        double on_sub = 0.0, dist2 = 0.0;
        Eigen::VectorXd x = Eigen::VectorXd::Zero(d);
        bool feasible = true;
        for (int i : nz) {
            const double denom = e[i] * e[i] - ej2;
            if (denom <= 0.0) {
                feasible = false;
                break;
            }
            x[i] = e[i] * e[i] * y[i] / denom;
            const double ratio = x[i] / e[i];
            on_sub += ratio * ratio;
            dist2 += (y[i] - x[i]) * (y[i] - x[i]);
        }
        if (!feasible || on_sub >= 1.0) continue;
        x[j] = e[j] * std::sqrt(1.0 - on_sub);
        dist2 += x[j] * x[j];
        if (const double dist = std::sqrt(dist2); dist < best) {
            best = dist;
            bx = x;
        }
    }

    if (nearest) {
        nearest->resize(d);
        for (int i = 0; i < d; ++i) (*nearest)[i] = y_in[i] < 0.0 ? -bx[i] : bx[i];
    }
    return best;
}

} // namespace detail

ManifoldPoint Manifold::sample_pair_at_t(const ManifoldPoint& p, double t, RngStream& rng) const {
    if (!(t > 0.0) || t > t_max_)
        throw DomainError("sample_pair_at_t: t=" + format_double(t) + " outside (0, " +
                          format_double(t_max_) + "] for " + name_);
    const double target = t * p.lfs;
    const double tol = 1e-9 * p.lfs;
    constexpr int kRetries = 32;
    for (int attempt = 0; attempt < kRetries; ++attempt) {
        const Path path = make_path(p.position, target, rng);
        double s = 0.0;
        if (!detail::solve_chord(path, p.position, target, 0.1 * tol, s)) continue;
        Eigen::VectorXd q = path.eval(s);
        if (std::abs((q - p.position).norm() - target) <= tol) return make_point(q);
    }
    throw Unreachable("no point at chord " + format_double(target) + " from the given point on " +
                      name_ + " after retries");
}

// ---------------------------------------------------------------------------
// Circle

Circle::Circle(double radius)
    : Manifold("circle", 2, 1, radius, 2.0, LfsSource::analytic, {{"radius", radius}}),
      radius_(radius) {
    if (!(radius > 0.0)) throw ConfigError("circle radius must be positive");
}

Eigen::VectorXd Circle::sample_position(RngStream& rng) const {
    return radius_ * rng.unit_vector(2);
}

SubspaceBasis Circle::tangent_at(const Eigen::VectorXd& p) const {
    Eigen::MatrixXd t(2, 1);
    const double norm = p.norm();
    t << -p[1] / norm, p[0] / norm;
    return SubspaceBasis(t);
}

Eigen::VectorXd Circle::unit_normal_at(const Eigen::VectorXd& p) const { return p / p.norm(); }

std::vector<Eigen::VectorXd> Circle::medial_samples(double) const {
    return {Eigen::VectorXd::Zero(2)};
}

Manifold::Path Circle::make_path(const Eigen::VectorXd& p, double, RngStream& rng) const {
    const double phi = std::atan2(p[1], p[0]);
    const double dir = rng.uniform01() < 0.5 ? 1.0 : -1.0;
    const double rho = radius_;
    return {[phi, dir, rho](double s) {
                Eigen::VectorXd q(2);
                q << rho * std::cos(phi + dir * s), rho * std::sin(phi + dir * s);
                return q;
            },
            std::numbers::pi};
}

// ---------------------------------------------------------------------------
// Sphere

Sphere::Sphere(int ambient_dim, double radius)
    : Manifold("sphere", ambient_dim, ambient_dim - 1, radius, 2.0, LfsSource::analytic,
               {{"n", static_cast<double>(ambient_dim)}, {"radius", radius}}),
      radius_(radius) {
    if (ambient_dim < 2 || ambient_dim > 16)
        throw ConfigError("sphere ambient dimension must be in [2, 16]");
    if (!(radius > 0.0)) throw ConfigError("sphere radius must be positive");
}

Eigen::VectorXd Sphere::sample_position(RngStream& rng) const {
    return radius_ * rng.unit_vector(ambient_dim());
}

SubspaceBasis Sphere::tangent_at(const Eigen::VectorXd& p) const {
    return SubspaceBasis(detail::hyperplane_basis(p / p.norm()));
}

Eigen::VectorXd Sphere::unit_normal_at(const Eigen::VectorXd& p) const { return p / p.norm(); }

std::vector<Eigen::VectorXd> Sphere::medial_samples(double) const {
    return {Eigen::VectorXd::Zero(ambient_dim())};
}

Manifold::Path Sphere::make_path(const Eigen::VectorXd& p, double, RngStream& rng) const {
    const Eigen::VectorXd n = p / p.norm();
    Eigen::VectorXd u;
    do {
        u = rng.gaussian_vector(ambient_dim());
        u -= n * n.dot(u);
    } while (u.norm() < 1e-8);
    u.normalize();
    const double rho = radius_;
    return {[n, u, rho](double s) -> Eigen::VectorXd {
                return rho * (std::cos(s) * n + std::sin(s) * u);
            },
            std::numbers::pi};
}

// ---------------------------------------------------------------------------
// Torus

Torus::Torus(double spine_radius, double tube_radius)
    : Manifold("torus", 3, 2, tube_radius, 2.0, LfsSource::analytic,
               {{"R", spine_radius}, {"r_minor", tube_radius}}),
      R_(spine_radius),
      r_(tube_radius) {
    if (!(tube_radius > 0.0) || !(spine_radius > 2.0 * tube_radius))
        throw ConfigError("torus requires R > 2*r_minor > 0");
}

Eigen::VectorXd Torus::sample_position(RngStream& rng) const {
    const double u = rng.uniform(0.0, kTwoPi);
    double v = 0.0;
    do {
        v = rng.uniform(0.0, kTwoPi);
    } while (rng.uniform01() * (R_ + r_) >= R_ + r_ * std::cos(v));
    Eigen::VectorXd p(3);
    p << (R_ + r_ * std::cos(v)) * std::cos(u), (R_ + r_ * std::cos(v)) * std::sin(u),
        r_ * std::sin(v);
    return p;
}

SubspaceBasis Torus::tangent_at(const Eigen::VectorXd& p) const {
    const double rho = std::hypot(p[0], p[1]);
    const double cu = p[0] / rho, su = p[1] / rho;
    const double cv = (rho - R_) / r_, sv = p[2] / r_;
    Eigen::MatrixXd t(3, 2);
    t << -su, -sv * cu, cu, -sv * su, 0.0, cv;
    return SubspaceBasis(t);
}

Eigen::VectorXd Torus::unit_normal_at(const Eigen::VectorXd& p) const {
    const double rho = std::hypot(p[0], p[1]);
    const double cv = (rho - R_) / r_, sv = p[2] / r_;
    Eigen::VectorXd n(3);
    n << cv * p[0] / rho, cv * p[1] / rho, sv;
    return n;
}

double Torus::lfs(const Eigen::VectorXd& p) const {
    return std::min(r_, std::hypot(p[0], p[1]));
}

double Torus::medial_distance(const Eigen::VectorXd& x) const {
    const double rho = std::hypot(x[0], x[1]);
    return std::min(std::hypot(rho - R_, x[2]), rho);
}

double Torus::implicit(const Eigen::VectorXd& x) const {
    return std::hypot(std::hypot(x[0], x[1]) - R_, x[2]) - r_;
}

std::vector<Eigen::VectorXd> Torus::medial_samples(double resolution) const {
    std::vector<Eigen::VectorXd> samples;
    const auto n_spine = static_cast<int>(std::ceil(kTwoPi * R_ / resolution));
    for (int i = 0; i < n_spine; ++i) {
        const double theta = kTwoPi * i / n_spine;
        Eigen::VectorXd s(3);
        s << R_ * std::cos(theta), R_ * std::sin(theta), 0.0;
        samples.push_back(std::move(s));
    }
    const double half_height = 2.0 * r_;
    const auto n_axis = static_cast<int>(std::ceil(2.0 * half_height / resolution));
    for (int i = 0; i <= n_axis; ++i) {
        Eigen::VectorXd s(3);
        s << 0.0, 0.0, -half_height + 2.0 * half_height * i / n_axis;
        samples.push_back(std::move(s));
    }
    return samples;
}

Manifold::Path Torus::make_path(const Eigen::VectorXd& p, double, RngStream& rng) const {
    const double rho = std::hypot(p[0], p[1]);
    const double u0 = std::atan2(p[1], p[0]);
    const double v0 = std::atan2(p[2] / r_, (rho - R_) / r_);
    const double psi = rng.uniform(0.0, kTwoPi);
    // Unit initial speed: parameter rates scaled by the metric factors.
    const double du = std::cos(psi) / (R_ + r_ * std::cos(v0));
    const double dv = std::sin(psi) / r_;
    const double R = R_, r = r_;
    return {[u0, v0, du, dv, R, r](double s) {
                const double u = u0 + s * du, v = v0 + s * dv;
                Eigen::VectorXd q(3);
                q << (R + r * std::cos(v)) * std::cos(u), (R + r * std::cos(v)) * std::sin(u),
                    r * std::sin(v);
                return q;
            },
            kTwoPi * (R_ + r_)};
}

// ---------------------------------------------------------------------------
// Ellipsoid

namespace {

/// Quarter-plane sample of the ellipsoid's medial surface (the elliptical
/// disk in z = 0 with half-extents (a^2-c^2)/a, (b^2-c^2)/b), produced by
/// nearest-point multiplicity detection: a planar point belongs to the medial
/// set exactly when its nearest surface point leaves the plane (the mirror
/// image is then equally near). Rows/columns are filled up to a rim point
/// located by bisecting that predicate; exact rim vertices are appended.
std::vector<Eigen::VectorXd> build_medial_quarter(double a, double b, double c, double step) {
    Eigen::VectorXd axes(3);
    axes << a, b, c;
    const auto is_medial = [&](double mx, double my) {
        Eigen::VectorXd query(3), foot;
        query << mx, my, 0.0;
        detail::nearest_on_axis_aligned_ellipsoid(axes, query, &foot);
        return foot[2] != 0.0;
    };
    const auto rim_bisect = [&](double fixed, bool row, double lo_in, double hi_in) {
        double lo = lo_in, hi = hi_in; // predicate true at lo, false at hi
        for (int i = 0; i < 60; ++i) {
            const double mid = 0.5 * (lo + hi);
            if (row ? is_medial(mid, fixed) : is_medial(fixed, mid))
                lo = mid;
            else
                hi = mid;
        }
        return lo;
    };

    const double alpha = (a * a - c * c) / a;
    const double beta = (b * b - c * c) / b;
    std::vector<Eigen::VectorXd> out;
    const auto push = [&out](double x, double y) {
        Eigen::VectorXd s(3);
        s << x, y, 0.0;
        out.push_back(std::move(s));
    };

    const auto rows = static_cast<int>(std::floor(beta / step));
    for (int j = 0; j <= rows; ++j) {
        const double y = j * step;
        if (!is_medial(0.0, y)) continue;
        const double rim = rim_bisect(y, /*row=*/true, 0.0, alpha * 1.01);
        for (int i = 0; i * step < rim; ++i) push(i * step, y);
        push(rim, y);
    }
    // The fill assumes each row's medial section is a single interval
    // starting at x = 0; spot-check that on a subsample of grid points.
    for (std::size_t i = 0; i < out.size(); i += 97)
        if (out[i][0] != 0.0 && !is_medial(0.5 * out[i][0], out[i][1]))
            throw OracleUnavailable("medial sampling self-check failed");

    const auto cols = static_cast<int>(std::floor(alpha / step));
    for (int i = 0; i <= cols; ++i) {
        const double x = i * step;
        if (!is_medial(x, 0.0)) continue;
        push(x, rim_bisect(x, /*row=*/false, 0.0, beta * 1.01));
    }
    push(alpha, 0.0);
    push(0.0, beta);
    return out;
}

Eigen::VectorXd fold_to_footprint(const Eigen::VectorXd& x) {
    Eigen::VectorXd q(2);
    q << std::abs(x[0]), std::abs(x[1]);
    return q;
}

} // namespace

Ellipsoid::Ellipsoid(double a, double b, double c, double medial_step)
    : Manifold("ellipsoid", 3, 2, c * c / a, 1.0, LfsSource::oracle,
               {{"a", a}, {"b", b}, {"c", c}, {"medial_step", medial_step}}),
      a_(a),
      b_(b),
      c_(c),
      alpha_((a * a - c * c) / a),
      beta_((b * b - c * c) / b),
      medial_step_(medial_step) {
    if (!(a > b && b > c && c > 0.0))
        throw ConfigError("ellipsoid requires semi-axes a > b > c > 0");
    if (!(medial_step > 0.0) || medial_step > 0.1)
        throw ConfigError("ellipsoid medial_step must be in (0, 0.1]");
}

Ellipsoid::~Ellipsoid() = default;

const KdTree& Ellipsoid::medial_tree() const {
    std::call_once(medial_once_, [this] {
        // Every medial sample sits in the z = 0 plane, so the query distance
        // splits as planar^2 + z^2 and the index only needs the planar
        // footprints. Indexing the 3D points instead would be exact too, but
        // a surface query is at least the reach away from the whole plane, a
        // radius that swallows every splitting plane: the search can prune
        // nothing and degenerates to a linear scan of the sample set.
        const std::vector<Eigen::VectorXd> quarter =
            build_medial_quarter(a_, b_, c_, medial_step_);
        std::vector<Eigen::VectorXd> flat;
        flat.reserve(quarter.size());
        for (const auto& s : quarter) flat.push_back(fold_to_footprint(s));
        medial_ = std::make_shared<const KdTree>(std::move(flat));
    });
    return *medial_;
}

Eigen::VectorXd Ellipsoid::sample_position(RngStream& rng) const {
    for (;;) {
        const Eigen::VectorXd x = rng.unit_vector(3);
        // Area density of the sphere-to-ellipsoid pushforward, normalized by
        // its maximum a*b (attained at the poles).
        const double density =
            std::sqrt(std::pow(b_ * c_ * x[0], 2) + std::pow(a_ * c_ * x[1], 2) +
                      std::pow(a_ * b_ * x[2], 2)) /
            (a_ * b_);
        if (rng.uniform01() < density) {
            Eigen::VectorXd p(3);
            p << a_ * x[0], b_ * x[1], c_ * x[2];
            return p;
        }
    }
}

SubspaceBasis Ellipsoid::tangent_at(const Eigen::VectorXd& p) const {
    return SubspaceBasis(detail::hyperplane_basis(unit_normal_at(p)));
}

Eigen::VectorXd Ellipsoid::unit_normal_at(const Eigen::VectorXd& p) const {
    Eigen::VectorXd n(3);
    n << p[0] / (a_ * a_), p[1] / (b_ * b_), p[2] / (c_ * c_);
    return n / n.norm();
}

double Ellipsoid::lfs(const Eigen::VectorXd& p) const { return medial_distance(p); }

double Ellipsoid::medial_distance(const Eigen::VectorXd& x) const {
    const double planar = medial_tree().nearest(fold_to_footprint(x)).distance;
    return std::hypot(planar, x[2]);
}

double Ellipsoid::implicit(const Eigen::VectorXd& x) const {
    const double q = std::pow(x[0] / a_, 2) + std::pow(x[1] / b_, 2) + std::pow(x[2] / c_, 2);
    return std::sqrt(q) - 1.0;
}

double Ellipsoid::distance_to(const Eigen::VectorXd& x) const {
    Eigen::VectorXd axes(3);
    axes << a_, b_, c_;
    return detail::nearest_on_axis_aligned_ellipsoid(axes, x);
}

std::vector<Eigen::VectorXd> Ellipsoid::medial_samples(double resolution) const {
    std::vector<Eigen::VectorXd> quarter = build_medial_quarter(a_, b_, c_, resolution);
    std::vector<Eigen::VectorXd> full;
    full.reserve(4 * quarter.size());
    for (const auto& s : quarter) {
        full.push_back(s);
        if (s[0] > 0.0) full.push_back((Eigen::VectorXd(3) << -s[0], s[1], 0.0).finished());
        if (s[1] > 0.0) full.push_back((Eigen::VectorXd(3) << s[0], -s[1], 0.0).finished());
        if (s[0] > 0.0 && s[1] > 0.0)
            full.push_back((Eigen::VectorXd(3) << -s[0], -s[1], 0.0).finished());
    }
    return full;
}

Manifold::Path Ellipsoid::make_path(const Eigen::VectorXd& p, double, RngStream& rng) const {
    const Eigen::MatrixXd tangent = detail::hyperplane_basis(unit_normal_at(p));
    const double psi = rng.uniform(0.0, kTwoPi);
    const Eigen::VectorXd d = std::cos(psi) * tangent.col(0) + std::sin(psi) * tangent.col(1);
    const double a = a_, b = b_, c = c_;
    return {[p, d, a, b, c](double s) -> Eigen::VectorXd {
                const Eigen::VectorXd y = p + s * d;
                const double q = std::pow(y[0] / a, 2) + std::pow(y[1] / b, 2) +
                                 std::pow(y[2] / c, 2);
                return y / std::sqrt(q);
            },
            8.0 * a_};
}

// ---------------------------------------------------------------------------
// Oracle and factory

MedialSampleOracle::MedialSampleOracle(const Manifold& m, double resolution)
    : tree_(std::make_unique<KdTree>(m.medial_samples(resolution))) {}

MedialSampleOracle::~MedialSampleOracle() = default;
MedialSampleOracle::MedialSampleOracle(MedialSampleOracle&&) noexcept = default;

double MedialSampleOracle::operator()(const Eigen::VectorXd& x) const {
    return tree_->nearest(x).distance;
}

std::size_t MedialSampleOracle::sample_count() const { return tree_->size(); }

namespace {

double take(std::map<std::string, double>& params, const std::string& key, double fallback) {
    const auto it = params.find(key);
    if (it == params.end()) return fallback;
    const double v = it->second;
    params.erase(it);
    return v;
}

void reject_leftovers(const std::map<std::string, double>& params, const std::string& shape) {
    if (params.empty()) return;
    throw ConfigError("unknown parameter '" + params.begin()->first + "' for shape " + shape);
}

} // namespace

std::shared_ptr<const Manifold> make_manifold(const std::string& name,
                                              const std::map<std::string, double>& params) {
    std::map<std::string, double> rest = params;
    if (name == "circle") {
        const double radius = take(rest, "radius", 1.0);
        reject_leftovers(rest, name);
        return std::make_shared<Circle>(radius);
    }
    if (name == "sphere") {
        const double radius = take(rest, "radius", 1.0);
        const double n = take(rest, "n", 3.0);
        reject_leftovers(rest, name);
        if (std::abs(n - std::round(n)) > 1e-9)
            throw ConfigError("sphere parameter n must be an integer");
        return std::make_shared<Sphere>(static_cast<int>(std::round(n)), radius);
    }
    if (name == "torus") {
        const double spine = take(rest, "R", 2.0);
        const double tube = take(rest, "r_minor", 0.5);
        reject_leftovers(rest, name);
        return std::make_shared<Torus>(spine, tube);
    }
    if (name == "ellipsoid") {
        const double a = take(rest, "a", 1.5);
        const double b = take(rest, "b", 1.0);
        const double c = take(rest, "c", 0.75);
        const double step = take(rest, "medial_step", 1e-3);
        reject_leftovers(rest, name);
        return std::make_shared<Ellipsoid>(a, b, c, step);
    }
    throw UnsupportedShape("unknown manifold: " + name);
}

double sphere_exact_variation(double t) {
    if (!(t >= 0.0) || t > 2.0)
        throw DomainError("sphere_exact_variation: t must lie in [0, 2]");
    return t * std::sqrt(1.0 - t * t / 4.0);
}

} // namespace lfsgeo

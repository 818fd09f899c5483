#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "lfsgeo/manifolds.hpp"
#include "lfsgeo/rng.hpp"
#include "lfsgeo/subspace.hpp"

using namespace lfsgeo;

namespace {

Eigen::VectorXd vec3(double x, double y, double z) {
    Eigen::VectorXd v(3);
    v << x, y, z;
    return v;
}

// Shared default-resolution ellipsoid; the medial model is built once.
const Ellipsoid& default_ellipsoid() {
    static const Ellipsoid ell(1.5, 1.0, 0.75);
    return ell;
}

double max_abs_dot(const Eigen::MatrixXd& tangent, const Eigen::VectorXd& normal) {
    return (tangent.transpose() * normal).cwiseAbs().maxCoeff();
}

} // namespace

TEST_CASE("circle: exact tangent, feature size, and chord construction") {
    Circle circle(1.0);
    RngStream rng(3);
    for (int i = 0; i < 200; ++i) {
        const ManifoldPoint p = circle.sample_point(rng);
        CHECK(std::abs(circle.implicit(p.position)) <= 1e-12);
        CHECK(p.lfs == 1.0);
        CHECK(p.lfs_source == LfsSource::analytic);
        const double phi = std::atan2(p.position[1], p.position[0]);
        Eigen::VectorXd expected(2);
        expected << -std::sin(phi), std::cos(phi);
        CHECK(sin_angle_between(p.tangent, orthonormalize({expected})) <= 1e-12);
    }

    // chord 1 on the unit circle subtends 60 degrees
    const ManifoldPoint p = circle.make_point((Eigen::VectorXd(2) << 1.0, 0.0).finished());
    const ManifoldPoint q = circle.sample_pair_at_t(p, 1.0, rng);
    CHECK(std::abs(q.position[0] - 0.5) <= 1e-9);
    CHECK(std::abs(std::abs(q.position[1]) - std::sqrt(3.0) / 2.0) <= 1e-9);

    CHECK(circle.medial_distance(p.position) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(circle.t_max() == 2.0);
    CHECK(circle.reach() == 1.0);
    CHECK_THROWS_AS(Circle(0.0), ConfigError);
}

TEST_CASE("sphere: membership, tangents, and pair chords across dimensions") {
    RngStream rng(5);
    for (int n : {2, 3, 8, 16}) {
        Sphere sphere(n, 1.0);
        CHECK(sphere.intrinsic_dim() == n - 1);
        for (int i = 0; i < 50; ++i) {
            const ManifoldPoint p = sphere.sample_point(rng);
            CHECK(std::abs(sphere.implicit(p.position)) <= 1e-12);
            CHECK(p.lfs == 1.0);
            CHECK(p.tangent.dim() == n - 1);
            CHECK(max_abs_dot(p.tangent.basis(), p.position) <= 1e-12);

            const double t = 0.001 + 1.8 * rng.uniform01();
            const ManifoldPoint q = sphere.sample_pair_at_t(p, t, rng);
            CHECK(std::abs((p.position - q.position).norm() - t) <= 1e-9);
            CHECK(std::abs(sphere.implicit(q.position)) <= 1e-12);
        }
    }
    CHECK_THROWS_AS(Sphere(1, 1.0), ConfigError);
    CHECK_THROWS_AS(Sphere(17, 1.0), ConfigError);
}

TEST_CASE("sphere: measured tangent variation matches the closed form") {
    RngStream rng(9);
    Sphere sphere(3, 1.0);
    for (int i = 0; i < 500; ++i) {
        const ManifoldPoint p = sphere.sample_point(rng);
        const double t = 0.001 + 1.9 * rng.uniform01();
        const ManifoldPoint q = sphere.sample_pair_at_t(p, t, rng);
        const double achieved = (p.position - q.position).norm();
        const double measured = sin_angle_between(p.tangent, q.tangent);
        CHECK(std::abs(measured - sphere_exact_variation(achieved)) <= 1e-9);
    }
}

TEST_CASE("sphere_exact_variation closed form") {
    CHECK(sphere_exact_variation(0.0) == 0.0);
    CHECK(sphere_exact_variation(1.0) == doctest::Approx(std::sqrt(3.0) / 2.0).epsilon(1e-15));
    CHECK(sphere_exact_variation(0.5) ==
          doctest::Approx(0.4841229182759271106474).epsilon(1e-15));
    CHECK(sphere_exact_variation(std::sqrt(2.0)) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(sphere_exact_variation(2.0) <= 1e-7); // sqrt rounding at the closed end
    CHECK_THROWS_AS(sphere_exact_variation(-0.1), DomainError);
    CHECK_THROWS_AS(sphere_exact_variation(2.1), DomainError);
}

TEST_CASE("torus: geometry at the equators and generic points") {
    Torus torus(2.0, 0.5);
    CHECK(torus.reach() == 0.5);
    CHECK_THROWS_AS(Torus(1.0, 0.5), ConfigError); // needs R > 2 r_minor

    const ManifoldPoint outer = torus.make_point(vec3(2.5, 0.0, 0.0));
    CHECK(outer.lfs == 0.5);
    const ManifoldPoint inner = torus.make_point(vec3(1.5, 0.0, 0.0));
    CHECK(inner.lfs == 0.5); // min(r_minor, distance to the axis) = min(0.5, 1.5)
    CHECK(torus.medial_distance(outer.position) == doctest::Approx(0.5).epsilon(1e-15));

    RngStream rng(17);
    for (int i = 0; i < 200; ++i) {
        const ManifoldPoint p = torus.sample_point(rng);
        CHECK(std::abs(torus.implicit(p.position)) <= 1e-12);
        CHECK(p.lfs == 0.5);
        CHECK(p.tangent.dim() == 2);
        CHECK(max_abs_dot(p.tangent.basis(), torus.unit_normal_at(p.position)) <= 1e-12);

        const double t = 0.001 + 1.9 * rng.uniform01();
        const ManifoldPoint q = torus.sample_pair_at_t(p, t, rng);
        CHECK(std::abs((p.position - q.position).norm() - t * p.lfs) <= 1e-9 * p.lfs);
        CHECK(std::abs(torus.implicit(q.position)) <= 1e-12);
    }
}

TEST_CASE("sampled medial model agrees with closed-form feature size") {
    RngStream rng(29);
    for (const char* name : {"circle", "sphere", "torus"}) {
        const auto m = make_manifold(name);
        MedialSampleOracle oracle(*m, 1e-4);
        for (int i = 0; i < 50; ++i) {
            const ManifoldPoint p = m->sample_point(rng);
            CHECK(std::abs(oracle(p.position) - p.lfs) <= 1e-6);
            CHECK(oracle(p.position) >= p.lfs - 1e-12); // sampled model overestimates
        }
    }
}

TEST_CASE("ellipsoid nearest-point distances at frozen queries") {
    Eigen::VectorXd axes = vec3(1.5, 1.0, 0.75);
    Eigen::VectorXd foot;

    CHECK(detail::nearest_on_axis_aligned_ellipsoid(axes, vec3(2, 0, 0), &foot) ==
          doctest::Approx(0.5).epsilon(1e-12));
    CHECK((foot - vec3(1.5, 0, 0)).norm() <= 1e-12);

    CHECK(detail::nearest_on_axis_aligned_ellipsoid(axes, vec3(0, 0, 0), &foot) ==
          doctest::Approx(0.75).epsilon(1e-12));

    CHECK(detail::nearest_on_axis_aligned_ellipsoid(axes, vec3(0, 0, 0.2)) ==
          doctest::Approx(0.55).epsilon(1e-12));

    CHECK(detail::nearest_on_axis_aligned_ellipsoid(axes, vec3(0.5, 0.1, 0), &foot) ==
          doctest::Approx(0.682868599226471834351).epsilon(1e-12));
    CHECK(foot[0] == doctest::Approx(2.0 / 3.0).epsilon(1e-10));
    CHECK(std::abs(foot[2]) == doctest::Approx(0.6496161434161316103479).epsilon(1e-10));

    CHECK(detail::nearest_on_axis_aligned_ellipsoid(axes, vec3(2, 0.3, 0.4)) ==
          doctest::Approx(0.6200436002042705591002).epsilon(1e-12));

    CHECK(detail::nearest_on_axis_aligned_ellipsoid(axes, vec3(0.1, -0.2, 0.05), &foot) ==
          doctest::Approx(0.6656529734503582308662).epsilon(1e-12));
    CHECK(foot[1] < 0.0); // foot follows the query's sign

    Eigen::VectorXd axes2(2), foot2;
    axes2 << 1.5, 1.0;
    Eigen::VectorXd q2(2);
    q2 << 0.5, 0.1;
    CHECK(detail::nearest_on_axis_aligned_ellipsoid(axes2, q2, &foot2) ==
          doctest::Approx(0.803793598220947291994).epsilon(1e-12));
}

TEST_CASE("ellipsoid nearest point satisfies first-order optimality") {
    Ellipsoid ell(1.5, 1.0, 0.75, 5e-3);
    Eigen::VectorXd axes = vec3(1.5, 1.0, 0.75);
    RngStream rng(31);
    for (int i = 0; i < 200; ++i) {
        const Eigen::VectorXd y = 2.0 * rng.gaussian_vector(3);
        Eigen::VectorXd foot;
        const double dist = detail::nearest_on_axis_aligned_ellipsoid(axes, y, &foot);
        CHECK(std::abs(ell.implicit(foot)) <= 1e-10);
        CHECK(std::abs(dist - (y - foot).norm()) <= 1e-12);
        if (dist > 1e-8) {
            // displacement is parallel to the surface normal at the foot
            const Eigen::VectorXd n = ell.unit_normal_at(foot);
            const Eigen::VectorXd d = (y - foot) / dist;
            CHECK(std::abs(std::abs(n.dot(d)) - 1.0) <= 1e-9);
        }
        CHECK(ell.distance_to(y) == dist);
    }
}

TEST_CASE("ellipsoid medial model: disk geometry and frozen feature sizes") {
    const Ellipsoid& ell = default_ellipsoid();
    CHECK(ell.medial_half_x() == doctest::Approx(1.125).epsilon(1e-15));
    CHECK(ell.medial_half_y() == doctest::Approx(0.4375).epsilon(1e-15));
    CHECK(ell.reach() == doctest::Approx(0.375).epsilon(1e-15));

    // medial samples live in the z = 0 disk
    for (const auto& s : ell.medial_samples(0.02)) {
        CHECK(s[2] == 0.0);
        const double w = std::pow(s[0] / 1.125, 2) + std::pow(s[1] / 0.4375, 2);
        CHECK(w <= 1.0 + 1e-7);
    }

    // vertices of the disk are exact, so these two are machine precision
    CHECK(ell.lfs(vec3(1.5, 0, 0)) == doctest::Approx(0.375).epsilon(1e-12));
    CHECK(ell.lfs(vec3(0, 0, 0.75)) == doctest::Approx(0.75).epsilon(1e-12));

    // generic surface points, expected values from the closed-form disk
    // distance evaluated in extended precision
    const struct {
        double th, ph, expect;
    } cases[] = {
        {0.3, 0.7, 0.4604643721163792985855},
        {1.2, 2.1, 0.6990293144754197622526},
        {-0.8, 4.0, 0.5651197638465479438196},
        {0.05, 0.02, 0.375070782325887051579},
        {1.5607, 3.1, 0.7499617743941838391417},
    };
    for (const auto& c : cases) {
        const Eigen::VectorXd p = vec3(1.5 * std::cos(c.th) * std::cos(c.ph),
                                       1.0 * std::cos(c.th) * std::sin(c.ph),
                                       0.75 * std::sin(c.th));
        CHECK(std::abs(ell.lfs(p) - c.expect) <= 5e-5);
        CHECK(ell.lfs(p) >= c.expect - 1e-9); // converges from above
    }
}

TEST_CASE("ellipsoid: sampling, tangents, and pair chords") {
    const Ellipsoid& ell = default_ellipsoid();
    RngStream rng(37);
    int octants[8] = {0};
    for (int i = 0; i < 2000; ++i) {
        const Eigen::VectorXd x = ell.sample_position(rng);
        CHECK(std::abs(ell.implicit(x)) <= 1e-12);
        octants[(x[0] > 0) * 4 + (x[1] > 0) * 2 + (x[2] > 0)]++;
    }
    for (int count : octants) CHECK(count > 0);

    for (int i = 0; i < 30; ++i) {
        const ManifoldPoint p = ell.sample_point(rng);
        CHECK(p.lfs_source == LfsSource::oracle);
        CHECK(p.lfs > 0.37);
        CHECK(max_abs_dot(p.tangent.basis(), ell.unit_normal_at(p.position)) <= 1e-12);
        for (double t : {0.05, 0.3, 0.9}) {
            const ManifoldPoint q = ell.sample_pair_at_t(p, t, rng);
            CHECK(std::abs((p.position - q.position).norm() - t * p.lfs) <= 1e-9 * p.lfs);
            CHECK(std::abs(ell.implicit(q.position)) <= 1e-12);
        }
    }
    CHECK_THROWS_AS(Ellipsoid(1.0, 1.0, 0.75), ConfigError); // axes must be strict
}

TEST_CASE("feature size is Lipschitz and sandwiched along sampled pairs") {
    RngStream rng(41);
    for (const char* name : {"circle", "sphere", "torus", "ellipsoid"}) {
        const auto m = make_manifold(name);
        const double slack = m->lfs_source() == LfsSource::oracle ? 1e-4 : 1e-12;
        for (int i = 0; i < (m->lfs_source() == LfsSource::oracle ? 60 : 200); ++i) {
            const ManifoldPoint p = m->sample_point(rng);
            const double t = 0.001 + 0.9 * rng.uniform01();
            const ManifoldPoint q = m->sample_pair_at_t(p, t, rng);
            const double chord = (p.position - q.position).norm();
            CHECK(std::abs(p.lfs - q.lfs) <= chord + 2.0 * slack);
            CHECK(q.lfs >= (1.0 - t) * p.lfs - 2.0 * slack);
            CHECK(q.lfs <= (1.0 + t) * p.lfs + 2.0 * slack);
        }
    }
}

TEST_CASE("smallest sampled feature size approaches the reach") {
    RngStream rng(43);
    for (const char* name : {"circle", "sphere", "torus", "ellipsoid"}) {
        const auto m = make_manifold(name);
        double lo = std::numeric_limits<double>::infinity();
        for (int i = 0; i < 2000; ++i) lo = std::min(lo, m->sample_point(rng).lfs);
        CHECK(lo >= m->reach() - 1e-9);
        CHECK(lo <= m->reach() * 1.5); // the infimum is approached, not hidden
    }
}

TEST_CASE("feature size never exceeds distance to any medial sample") {
    RngStream rng(47);
    for (const char* name : {"circle", "sphere", "torus", "ellipsoid"}) {
        const auto m = make_manifold(name);
        const auto samples = m->medial_samples(0.01);
        const double slack = m->lfs_source() == LfsSource::oracle ? 1e-4 : 1e-12;
        for (int i = 0; i < 20; ++i) {
            const ManifoldPoint p = m->sample_point(rng);
            for (const auto& a : samples) CHECK(p.lfs <= (p.position - a).norm() + slack);
        }
    }
}

TEST_CASE("factory: defaults, overrides, and rejection") {
    CHECK(make_manifold("sphere")->ambient_dim() == 3);
    CHECK(make_manifold("sphere", {{"n", 8.0}})->ambient_dim() == 8);
    CHECK(make_manifold("circle", {{"radius", 2.5}})->reach() == 2.5);
    CHECK(make_manifold("torus")->parameters().at("r_minor") == 0.5);
    CHECK(make_manifold("ellipsoid")->parameters().at("a") == 1.5);

    CHECK_THROWS_AS(make_manifold("klein_bottle"), UnsupportedShape);
    CHECK_THROWS_AS(make_manifold("sphere", {{"m", 3.0}}), ConfigError);
    CHECK_THROWS_AS(make_manifold("sphere", {{"n", 3.5}}), ConfigError);
    CHECK_THROWS_AS(make_manifold("torus", {{"R", 0.9}}), ConfigError);
}

TEST_CASE("pair construction rejects t outside the feasible range") {
    Circle circle(1.0);
    RngStream rng(53);
    const ManifoldPoint p = circle.sample_point(rng);
    CHECK_THROWS_AS(circle.sample_pair_at_t(p, 0.0, rng), DomainError);
    CHECK_THROWS_AS(circle.sample_pair_at_t(p, 2.0001, rng), DomainError);
}

namespace {

// A deliberately crippled shape whose search paths go nowhere: exercises the
// retry-then-fail contract of the pair sampler.
class StuckCircle final : public Manifold {
public:
    StuckCircle() : Manifold("stuck", 2, 1, 1.0, 2.0, LfsSource::analytic, {}) {}

    Eigen::VectorXd sample_position(RngStream& rng) const override {
        return rng.unit_vector(2);
    }
    SubspaceBasis tangent_at(const Eigen::VectorXd& p) const override {
        Eigen::MatrixXd t(2, 1);
        t << -p[1], p[0];
        return SubspaceBasis(t / p.norm());
    }
    Eigen::VectorXd unit_normal_at(const Eigen::VectorXd& p) const override {
        return p / p.norm();
    }
    double lfs(const Eigen::VectorXd&) const override { return 1.0; }
    double medial_distance(const Eigen::VectorXd& x) const override { return x.norm(); }
    double implicit(const Eigen::VectorXd& x) const override { return x.norm() - 1.0; }
    double distance_to(const Eigen::VectorXd& x) const override { return std::abs(implicit(x)); }

protected:
    Path make_path(const Eigen::VectorXd& p, double, RngStream&) const override {
        return {[p](double) { return p; }, 1.0};
    }
};

} // namespace

TEST_CASE("pair construction fails loudly when the chord is never attained") {
    StuckCircle stuck;
    RngStream rng(59);
    const ManifoldPoint p = stuck.sample_point(rng);
    CHECK_THROWS_AS(stuck.sample_pair_at_t(p, 0.5, rng), Unreachable);
}

TEST_CASE("chord solver reports unreachable targets") {
    Manifold::Path arc{[](double s) {
                           Eigen::VectorXd q(2);
                           q << std::cos(s), std::sin(s);
                           return q;
                       },
                       std::numbers::pi};
    Eigen::VectorXd origin(2);
    origin << 1.0, 0.0;
    double s = 0.0;
    CHECK(detail::solve_chord(arc, origin, 3.0, 1e-12, s) == false);
    CHECK(detail::solve_chord(arc, origin, 2.0, 1e-10, s)); // supremum accepted via slack
    CHECK(detail::solve_chord(arc, origin, 1.0, 1e-12, s));
    CHECK(std::abs(2.0 * std::sin(s / 2.0) - 1.0) <= 1e-12);
}

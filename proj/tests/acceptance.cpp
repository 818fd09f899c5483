// Acceptance harness: one line per criterion, PASS/FAIL, nonzero exit when
// anything fails. Each criterion is self-contained and runs with fixed seeds
// so the verdict is reproducible bit for bit.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <string>
#include <vector>

#include "lfsgeo/bounds.hpp"
#include "lfsgeo/manifolds.hpp"
#include "lfsgeo/pointcloud.hpp"
#include "lfsgeo/rng.hpp"
#include "lfsgeo/subspace.hpp"
#include "lfsgeo/verify.hpp"

using namespace lfsgeo;

namespace {

int g_failures = 0;

void criterion(int id, const std::string& label,
               const std::function<bool(std::string&)>& body) {
    const auto start = std::chrono::steady_clock::now();
    bool ok = false;
    std::string detail;
    try {
        ok = body(detail);
    } catch (const std::exception& e) {
        detail = std::string("exception: ") + e.what();
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    if (!ok) ++g_failures;
    std::printf("%s  %2d  %-58s  [%6.1f s]%s%s\n", ok ? "PASS" : "FAIL", id,
                label.c_str(), secs, detail.empty() ? "" : "  -- ",
                detail.c_str());
    std::fflush(stdout);
}

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    return v[v.size() / 2];
}

} // namespace

int main() {
    const auto sphere2 = make_manifold("sphere", {{"n", 2}});
    const auto sphere = make_manifold("sphere"); // S^2 in R^3
    const auto circle = make_manifold("circle");
    const auto torus = make_manifold("torus");
    const auto ellipsoid = make_manifold("ellipsoid");

    criterion(1, "prefactor: exact 4.5 at zero, below 6 up to 0.1", [&](std::string& detail) {
        const auto t0 = std::chrono::steady_clock::now();
        if (bounds::f_of_t(0.0) != 4.5) {
            detail = "f(0) != 4.5";
            return false;
        }
        for (long long i = 1; i <= 10000; ++i) {
            const double t = static_cast<double>(i) * 1e-5;
            if (!(bounds::f_of_t(t) < 6.0)) {
                detail = "f(" + std::to_string(t) + ") >= 6";
                return false;
            }
        }
        const double secs = std::chrono::duration<double>(
                                std::chrono::steady_clock::now() - t0)
                                .count();
        if (secs >= 1.0) {
            detail = "took " + std::to_string(secs) + " s (budget 1 s)";
            return false;
        }
        return true;
    });

    criterion(2, "small-t slopes: 4.5, 3, 2, 1", [&](std::string& detail) {
        const double t = 1e-6;
        const struct {
            const char* id;
            double slope;
        } cases[] = {{"thm1i", 4.5}, {"thm1ii", 3.0}, {"bsw", 2.0}, {"ad", 1.0}};
        for (const auto& c : cases) {
            const double ratio = bounds::by_id(c.id).evaluate(t) / t;
            if (std::abs(ratio - c.slope) > 1e-4) {
                detail = std::string(c.id) + " slope " + std::to_string(ratio);
                return false;
            }
        }
        return true;
    });

    criterion(3, "sphere family: measured variation matches closed form", [&](std::string& detail) {
        const auto t0 = std::chrono::steady_clock::now();
        for (const int n : {2, 3, 8, 16}) {
            const auto m = make_manifold("sphere", {{"n", n}});
            verify::VerifyOptions opt;
            opt.n_pairs = 10000;
            opt.t_min = 0.0;
            opt.t_max = 1.0;
            opt.seed = 300 + static_cast<std::uint64_t>(n);
            opt.checks = {"lem1"};
            opt.collect_observations = true;
            const auto report = verify::verify_tangent_bounds(*m, opt);
            double worst = 0.0;
            for (const auto& obs : report.observations) {
                worst = std::max(worst, std::abs(obs.sin_angle -
                                                 sphere_exact_variation(obs.t)));
            }
            if (worst > 1e-9) {
                detail = "N=" + std::to_string(n) + " deviation " +
                         std::to_string(worst);
                return false;
            }
        }
        const double secs = std::chrono::duration<double>(
                                std::chrono::steady_clock::now() - t0)
                                .count();
        if (secs >= 30.0) {
            detail = "took " + std::to_string(secs) + " s (budget 30 s)";
            return false;
        }
        return true;
    });

    criterion(4, "zero violations across bounds and shapes, 1e5 pairs each", [&](std::string& detail) {
        const auto t0 = std::chrono::steady_clock::now();
        const struct {
            const char* id;
            double t_hi;
        } checks[] = {{"thm1i", 0.25},   {"thm1ii", 19.0 / 200.0},
                      {"lem1", 1.0 - 1e-9}, {"lem2", 0.25},
                      {"lem2imp", 19.0 / 200.0}, {"eq4", 0.25}};
        const std::shared_ptr<const Manifold> shapes[] = {sphere, torus, ellipsoid};
        std::uint64_t seed = 400;
        for (const auto& shape : shapes) {
            for (const auto& c : checks) {
                verify::VerifyOptions opt;
                opt.n_pairs = 100000;
                opt.t_min = 0.0;
                opt.t_max = std::min(c.t_hi, shape->t_max());
                opt.seed = seed++;
                opt.checks = {c.id};
                const auto report = verify::verify_tangent_bounds(*shape, opt);
                const auto* tally = report.find(c.id);
                if (report.total_violations() != 0 || tally == nullptr) {
                    detail = shape->name() + "/" + c.id + ": " +
                             std::to_string(report.total_violations()) +
                             " violations";
                    return false;
                }
                if (tally->checked < 99000) {
                    detail = shape->name() + "/" + c.id + ": only " +
                             std::to_string(tally->checked) + " pairs in domain";
                    return false;
                }
            }
        }
        const double secs = std::chrono::duration<double>(
                                std::chrono::steady_clock::now() - t0)
                                .count();
        if (secs >= 300.0) {
            detail = "took " + std::to_string(secs) + " s (budget 300 s)";
            return false;
        }
        return true;
    });

    criterion(5, "equality anchors: circle point gap and sphere height", [&](std::string& detail) {
        verify::VerifyOptions opt;
        opt.n_pairs = 20000;
        opt.t_min = 0.01;
        opt.t_max = 0.999;
        opt.seed = 500;
        opt.checks = {"lem1"};
        const auto report = verify::verify_tangent_bounds(*circle, opt);
        const auto* tally = report.find("lem1");
        if (tally == nullptr || std::abs(tally->max_tightness - 1.0) > 1e-9) {
            detail = "circle gap tightness " +
                     std::to_string(tally ? tally->max_tightness : -1.0);
            return false;
        }
        RngStream rng(501);
        const ManifoldPoint p = sphere->sample_point(rng);
        const auto proj = verify::verify_projection_lemma(*sphere, p, 2000, 502);
        if (std::abs(proj.max_height_tightness - 1.0) > 1e-9) {
            detail = "sphere height tightness " +
                     std::to_string(proj.max_height_tightness);
            return false;
        }
        return true;
    });

    criterion(6, "feature size stays within the Lipschitz sandwich", [&](std::string& detail) {
        const std::shared_ptr<const Manifold> shapes[] = {circle, sphere, torus,
                                                          ellipsoid};
        std::uint64_t seed = 600;
        for (const auto& shape : shapes) {
            const auto report = verify::verify_lipschitz_sandwich(*shape, 10000, seed++);
            if (report.violations != 0) {
                detail = shape->name() + ": " + std::to_string(report.violations) +
                         " violations";
                return false;
            }
        }
        return true;
    });

    criterion(7, "tangent patch: injective, onto, below the height bound", [&](std::string& detail) {
        const std::shared_ptr<const Manifold> shapes[] = {sphere, torus};
        std::uint64_t seed = 700;
        for (const auto& shape : shapes) {
            RngStream rng(seed++);
            const ManifoldPoint p = shape->sample_point(rng);
            const auto report =
                verify::verify_projection_lemma(*shape, p, 10000, seed++);
            if (report.collapse_violations != 0 || report.coverage_failures != 0 ||
                report.height_violations != 0) {
                detail = shape->name() + ": collapse " +
                         std::to_string(report.collapse_violations) + ", coverage " +
                         std::to_string(report.coverage_failures) + ", height " +
                         std::to_string(report.height_violations);
                return false;
            }
        }
        return true;
    });

    criterion(8, "variation is genuinely linear in t on the 2-sphere", [&](std::string& detail) {
        RngStream rng(800);
        double worst = 2.0;
        for (int i = 0; i <= 24; ++i) {
            const double t = 0.01 + (0.25 - 0.01) * i / 24.0;
            for (int pair = 0; pair < 40; ++pair) {
                const ManifoldPoint p = sphere->sample_point(rng);
                const ManifoldPoint q = sphere->sample_pair_at_t(p, t, rng);
                const double ratio = sin_angle_between(p.tangent, q.tangent) / t;
                worst = std::min(worst, ratio);
            }
        }
        if (worst < 0.96) {
            detail = "min sin/t = " + std::to_string(worst);
            return false;
        }
        return true;
    });

    criterion(9, "estimators converge on clouds", [&](std::string& detail) {
        double previous = 1e9;
        double last = 0.0;
        for (const std::size_t n : {1000u, 4000u, 16000u}) {
            RngStream srng(900 + n);
            std::vector<Eigen::VectorXd> pts;
            pts.reserve(n);
            for (std::size_t i = 0; i < n; ++i) pts.push_back(circle->sample_position(srng));
            const pointcloud::PointCloud cloud(std::move(pts));
            RngStream qrng(901);
            std::vector<double> errors;
            for (int trial = 0; trial < 400; ++trial) {
                const std::size_t i = qrng.index(cloud.size());
                errors.push_back(std::abs(pointcloud::estimate_lfs(cloud, i, 3.0) - 1.0));
            }
            last = median(errors);
            if (last >= previous) {
                detail = "circle medians stopped decreasing at n=" + std::to_string(n);
                return false;
            }
            previous = last;
        }
        if (last >= 0.05) {
            detail = "circle median " + std::to_string(last) + " at n=16000";
            return false;
        }

        RngStream srng(950);
        std::vector<Eigen::VectorXd> pts;
        pts.reserve(50000);
        for (int i = 0; i < 50000; ++i) pts.push_back(sphere->sample_position(srng));
        const pointcloud::PointCloud cloud(std::move(pts));
        RngStream qrng(951);
        std::vector<double> angles;
        for (int trial = 0; trial < 400; ++trial) {
            const std::size_t i = qrng.index(cloud.size());
            const auto est = pointcloud::estimate_tangent(cloud, i, 20, 2);
            angles.push_back(angle_between(est.basis, sphere->tangent_at(cloud.point(i))));
        }
        if (median(angles) >= 0.01) {
            detail = "sphere tangent median " + std::to_string(median(angles)) + " rad";
            return false;
        }
        return true;
    });

    criterion(10, "harness can fail: corrupted bound trips the checks", [&](std::string& detail) {
        verify::VerifyOptions opt;
        opt.n_pairs = 1000;
        opt.t_min = 0.0;
        opt.t_max = 0.9;
        opt.seed = 1000;
        opt.checks = {"lem1"};
        opt.corrupt_bound = "lem1";
        opt.corrupt_factor = 0.5;
        const auto report = verify::verify_tangent_bounds(*circle, opt);
        if (report.total_violations() == 0) {
            detail = "corrupted bound produced no violations";
            return false;
        }
        const std::string cmd =
            std::string(LFSGEO_CLI_PATH) +
            " verify --manifold circle --bound lem1 --n 1000 --seed 7"
            " --corrupt-bound lem1 --out /dev/null 2>/dev/null";
        const int status = std::system(cmd.c_str());
        const int exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
        if (exit_code != 1) {
            detail = "CLI exit code " + std::to_string(exit_code) + ", wanted 1";
            return false;
        }
        return true;
    });

    std::printf("%s: %d %s failed\n", g_failures == 0 ? "OK" : "FAILED",
                g_failures, g_failures == 1 ? "criterion" : "criteria");
    return g_failures == 0 ? 0 : 1;
}

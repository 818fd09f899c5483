// Command-line frontend: reproducible experiment runs emitting CSV/JSON.
//
// Subcommands
//   bounds   tabulate every registered bound on a t grid (CSV)
//   verify   Monte-Carlo bound verification on an analytic shape (JSON [+CSV])
//   project  tangent-patch projection checks at a random base point (JSON)
//   cloud    estimator audit on a point cloud (JSON [+CSV])
//
// Exit codes: 0 clean, 1 violations found, 2 configuration error, 3 runtime
// failure. Errors print one machine-readable JSON object on stderr. Reports
// are byte-stable for a fixed config; wall time goes to stderr, never into
// the report.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "lfsgeo/bounds.hpp"
#include "lfsgeo/errors.hpp"
#include "lfsgeo/manifolds.hpp"
#include "lfsgeo/pointcloud.hpp"
#include "lfsgeo/rng.hpp"
#include "lfsgeo/verify.hpp"
#include "lfsgeo/version.hpp"

namespace {

using lfsgeo::ConfigError;

struct RunConfig {
    std::string manifold = "sphere";
    std::map<std::string, double> params;
    std::vector<std::string> bound_ids;
    long long n = 0; // per-subcommand default applied in main
    double t_min = 0.0;
    double t_max = 0.0;
    std::uint64_t seed = 0;
    std::string out;        // report path; empty = stdout
    std::string csv;        // observation/estimate CSV path; empty = skip
    unsigned threads = 0;   // 0 = hardware concurrency
    double tolerance = -1.0; // < 0 = per-command default
    std::string corrupt_bound;
    double corrupt_factor = 0.5;
    std::string cloud;   // input cloud file; empty = sample from manifold
    long long points = 5000; // sampled cloud size when no file is given
    int k = 12;
    double radius = 0.0; // shrinking-ball start; 0 = cloud half extent
    std::string config_path;
};

double parse_double(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        const double x = std::stod(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
        return x;
    } catch (const std::exception&) {
        throw ConfigError("config: bad number for '" + key + "': " + value);
    }
}

long long parse_int(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        const long long x = std::stoll(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
        return x;
    } catch (const std::exception&) {
        throw ConfigError("config: bad integer for '" + key + "': " + value);
    }
}

std::pair<std::string, double> parse_param(const std::string& text) {
    const auto eq = text.find('=');
    if (eq == std::string::npos || eq == 0) {
        throw ConfigError("expected name=value, got '" + text + "'");
    }
    return {text.substr(0, eq), parse_double(text, text.substr(eq + 1))};
}

// Flat key=value file; '#' starts a comment; unknown keys are rejected.
// `provided` lists keys already fixed by command-line flags, which win.
void apply_config_file(RunConfig& cfg, const std::set<std::string>& provided) {
    std::ifstream in(cfg.config_path);
    if (!in) throw ConfigError("config: cannot open " + cfg.config_path);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos) continue;
        const auto last = line.find_last_not_of(" \t\r");
        line = line.substr(first, last - first + 1);
        const auto eq = line.find('=');
        if (eq == std::string::npos || eq == 0) {
            throw ConfigError("config: line " + std::to_string(line_no) +
                              " is not key=value");
        }
        std::string key = line.substr(0, eq);
        std::string value = line.substr(eq + 1);
        const auto kend = key.find_last_not_of(" \t");
        key = key.substr(0, kend + 1);
        const auto vstart = value.find_first_not_of(" \t");
        value = vstart == std::string::npos ? "" : value.substr(vstart);

        if (key.rfind("param.", 0) == 0) {
            const std::string name = key.substr(6);
            if (name.empty()) throw ConfigError("config: empty parameter name");
            if (!provided.count("param." + name)) {
                cfg.params[name] = parse_double(key, value);
            }
            continue;
        }
        if (key == "manifold") {
            if (!provided.count(key)) cfg.manifold = value;
        } else if (key == "bound") {
            if (!provided.count(key)) {
                cfg.bound_ids.clear();
                std::stringstream ss(value);
                std::string id;
                while (std::getline(ss, id, ',')) {
                    if (!id.empty()) cfg.bound_ids.push_back(id);
                }
            }
        } else if (key == "n") {
            if (!provided.count(key)) cfg.n = parse_int(key, value);
        } else if (key == "tmin") {
            if (!provided.count(key)) cfg.t_min = parse_double(key, value);
        } else if (key == "tmax") {
            if (!provided.count(key)) cfg.t_max = parse_double(key, value);
        } else if (key == "seed") {
            if (!provided.count(key)) {
                cfg.seed = static_cast<std::uint64_t>(parse_int(key, value));
            }
        } else if (key == "out") {
            if (!provided.count(key)) cfg.out = value;
        } else if (key == "csv") {
            if (!provided.count(key)) cfg.csv = value;
        } else if (key == "threads") {
            if (!provided.count(key)) {
                cfg.threads = static_cast<unsigned>(parse_int(key, value));
            }
        } else if (key == "tolerance") {
            if (!provided.count(key)) cfg.tolerance = parse_double(key, value);
        } else if (key == "corrupt_bound") {
            if (!provided.count(key)) cfg.corrupt_bound = value;
        } else if (key == "corrupt_factor") {
            if (!provided.count(key)) cfg.corrupt_factor = parse_double(key, value);
        } else if (key == "cloud") {
            if (!provided.count(key)) cfg.cloud = value;
        } else if (key == "points") {
            if (!provided.count(key)) cfg.points = parse_int(key, value);
        } else if (key == "k") {
            if (!provided.count(key)) cfg.k = static_cast<int>(parse_int(key, value));
        } else if (key == "radius") {
            if (!provided.count(key)) cfg.radius = parse_double(key, value);
        } else {
            throw ConfigError("config: unknown key '" + key + "' at line " +
                              std::to_string(line_no));
        }
    }
}

void write_text(const std::string& path, const std::string& text) {
    if (path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write " + path);
    out << text;
}

std::string fmt17(double x) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

// ---------------------------------------------------------------- bounds --

int cmd_bounds(const RunConfig& cfg) {
    if (!(cfg.t_min >= 0.0) || !(cfg.t_max < 1.0) || cfg.t_max < cfg.t_min ||
        cfg.n < 1) {
        throw ConfigError("bounds: grid must satisfy 0 <= tmin <= tmax < 1, n >= 1");
    }
    static const char* kColumns[] = {"thm1i", "thm1ii", "ad",
                                     "nsw",   "bsw",    "sphere_lower"};
    std::ostringstream table;
    table << "t";
    for (const char* id : kColumns) table << ',' << id;
    table << '\n';
    for (long long i = 0; i < cfg.n; ++i) {
        const double t =
            cfg.n == 1 ? cfg.t_min
                       : cfg.t_min + (cfg.t_max - cfg.t_min) *
                                         static_cast<double>(i) /
                                         static_cast<double>(cfg.n - 1);
        table << fmt17(t);
        for (const char* id : kColumns) {
            const auto& spec = lfsgeo::bounds::by_id(id);
            table << ',';
            if (t == 0.0) {
                table << '0'; // every bound vanishes in the t -> 0 limit
            } else if (spec.in_domain(t)) {
                table << fmt17(spec.evaluate(t));
            } // out of domain: empty cell
        }
        table << '\n';
    }
    write_text(cfg.out, table.str());
    return 0;
}

// ---------------------------------------------------------------- verify --

int cmd_verify(const RunConfig& cfg) {
    const auto m = lfsgeo::make_manifold(cfg.manifold, cfg.params);
    lfsgeo::verify::VerifyOptions opt;
    opt.n_pairs = cfg.n;
    opt.t_min = cfg.t_min;
    opt.t_max = cfg.t_max;
    opt.seed = cfg.seed;
    opt.checks = cfg.bound_ids;
    opt.threads = cfg.threads;
    opt.tolerance = cfg.tolerance;
    opt.corrupt_bound = cfg.corrupt_bound;
    opt.corrupt_factor = cfg.corrupt_factor;
    opt.collect_observations = !cfg.csv.empty();

    const auto report = lfsgeo::verify::verify_tangent_bounds(*m, opt);
    write_text(cfg.out, report.to_json() + "\n");
    if (!cfg.csv.empty()) {
        std::ofstream out(cfg.csv);
        if (!out) throw ConfigError("cannot write " + cfg.csv);
        report.write_csv(out);
    }
    std::fprintf(stderr, "wall_ms=%.3f\n", report.wall_ms);
    return report.total_violations() == 0 ? 0 : 1;
}

// --------------------------------------------------------------- project --

int cmd_project(const RunConfig& cfg) {
    const auto m = lfsgeo::make_manifold(cfg.manifold, cfg.params);
    lfsgeo::RngStream prng = lfsgeo::derive_stream(cfg.seed, 0x62617365); // base point
    const lfsgeo::ManifoldPoint p = m->sample_point(prng);
    const auto report =
        lfsgeo::verify::verify_projection_lemma(*m, p, cfg.n, cfg.seed);
    write_text(cfg.out, report.to_json() + "\n");
    std::fprintf(stderr, "wall_ms=%.3f\n", report.wall_ms);
    const long long violations = report.collapse_violations +
                                 report.coverage_failures +
                                 report.height_violations;
    return violations == 0 ? 0 : 1;
}

// ----------------------------------------------------------------- cloud --

int cmd_cloud(const RunConfig& cfg) {
    std::optional<lfsgeo::pointcloud::PointCloud> cloud;
    if (!cfg.cloud.empty()) {
        cloud.emplace(lfsgeo::pointcloud::PointCloud::load_file(cfg.cloud));
    } else {
        const auto m = lfsgeo::make_manifold(cfg.manifold, cfg.params);
        if (cfg.points < 1) throw ConfigError("cloud: points must be >= 1");
        lfsgeo::RngStream rng = lfsgeo::derive_stream(cfg.seed, 0x636c6f75); // cloud
        std::vector<Eigen::VectorXd> pts;
        pts.reserve(static_cast<std::size_t>(cfg.points));
        for (long long i = 0; i < cfg.points; ++i) {
            pts.push_back(m->sample_position(rng));
        }
        cloud.emplace(std::move(pts));
    }

    lfsgeo::pointcloud::AuditOptions opt;
    opt.k = cfg.k;
    opt.n_pairs = cfg.n;
    opt.seed = cfg.seed;
    opt.t_min = cfg.t_min;
    opt.t_max = cfg.t_max;
    if (!cfg.bound_ids.empty()) opt.checks = cfg.bound_ids;
    opt.initial_radius = cfg.radius;

    const auto report = lfsgeo::pointcloud::empirical_bound_audit(*cloud, opt);
    write_text(cfg.out, report.to_json() + "\n");

    if (!cfg.csv.empty()) {
        std::ofstream out(cfg.csv);
        if (!out) throw ConfigError("cannot write " + cfg.csv);
        const double r0 = cfg.radius > 0.0 ? cfg.radius : cloud->half_extent();
        out << "index,lfs,tangent_dim,spectral_gap,reliable\n";
        for (std::size_t i = 0; i < cloud->size(); ++i) {
            out << i << ',';
            try {
                out << fmt17(lfsgeo::pointcloud::estimate_lfs(*cloud, i, r0, cfg.k));
            } catch (const lfsgeo::Error&) {
            }
            out << ',';
            try {
                const auto est =
                    lfsgeo::pointcloud::estimate_tangent(*cloud, i, cfg.k);
                out << est.dim << ',' << fmt17(est.spectral_gap) << ','
                    << (est.reliable ? 1 : 0);
            } catch (const lfsgeo::Error&) {
                out << ",,";
            }
            out << '\n';
        }
    }
    std::fprintf(stderr, "wall_ms=%.3f\n", report.wall_ms);
    const double rate_limit = cfg.tolerance >= 0.0 ? cfg.tolerance : 0.01;
    return report.violation_rate < rate_limit ? 0 : 1;
}

// ------------------------------------------------------------------ main --

void add_common_flags(CLI::App* sub, RunConfig& cfg,
                      std::vector<std::string>& raw_params) {
    sub->add_option("--manifold", cfg.manifold, "Shape name (circle, sphere, torus, ellipsoid)");
    sub->add_option("--param", raw_params, "Shape parameter name=value (repeatable)");
    sub->add_option("--bound", cfg.bound_ids, "Bound id to check (repeatable)");
    sub->add_option("--n", cfg.n, "Sample count");
    sub->add_option("--tmin", cfg.t_min, "Lower end of the t window");
    sub->add_option("--tmax", cfg.t_max, "Upper end of the t window");
    sub->add_option("--seed", cfg.seed, "RNG seed (reports embed it)");
    sub->add_option("--out", cfg.out, "Report path (default: stdout)");
    sub->add_option("--csv", cfg.csv, "Secondary CSV output path");
    sub->add_option("--threads", cfg.threads, "Worker cap; 0 = all cores");
    sub->add_option("--tolerance", cfg.tolerance, "Override the violation tolerance");
    sub->add_option("--config", cfg.config_path, "key=value config file; flags win");
}

int emit_error(const char* type, const std::string& message, int code) {
    nlohmann::ordered_json err;
    err["type"] = type;
    err["message"] = message;
    std::cerr << err.dump() << '\n';
    return code;
}

std::set<std::string> provided_keys(const CLI::App* sub,
                                    const std::vector<std::string>& raw_params) {
    static const std::pair<const char*, const char*> kMap[] = {
        {"--manifold", "manifold"},   {"--bound", "bound"},
        {"--n", "n"},                 {"--tmin", "tmin"},
        {"--tmax", "tmax"},           {"--seed", "seed"},
        {"--out", "out"},             {"--csv", "csv"},
        {"--threads", "threads"},     {"--tolerance", "tolerance"},
        {"--corrupt-bound", "corrupt_bound"},
        {"--corrupt-factor", "corrupt_factor"},
        {"--cloud", "cloud"},         {"--points", "points"},
        {"--k", "k"},                 {"--radius", "radius"},
    };
    std::set<std::string> provided;
    for (const auto& [flag, key] : kMap) {
        if (sub->get_option_no_throw(flag) && sub->count(flag) > 0) {
            provided.insert(key);
        }
    }
    for (const auto& text : raw_params) {
        provided.insert("param." + parse_param(text).first);
    }
    return provided;
}

} // namespace

int main(int argc, char** argv) {
    RunConfig cfg;
    std::vector<std::string> raw_params;

    if (const char* env = std::getenv("LFSGEO_THREADS")) {
        try {
            cfg.threads = static_cast<unsigned>(parse_int("LFSGEO_THREADS", env));
        } catch (const ConfigError& e) {
            return emit_error("config_error", e.what(), 2);
        }
    }

    CLI::App app{"Feature-size geometry toolkit: tangent-variation bounds, "
                 "Monte-Carlo verification, point-cloud estimator audits"};
    app.set_version_flag("--version", lfsgeo::kVersion);
    app.require_subcommand(1);

    CLI::App* bounds = app.add_subcommand("bounds", "Tabulate all bounds on a t grid (CSV)");
    CLI::App* verify = app.add_subcommand("verify", "Monte-Carlo bound verification (JSON report)");
    CLI::App* project = app.add_subcommand("project", "Tangent-patch projection checks (JSON report)");
    CLI::App* cloud = app.add_subcommand("cloud", "Point-cloud estimator audit (JSON report)");

    add_common_flags(bounds, cfg, raw_params);
    add_common_flags(verify, cfg, raw_params);
    add_common_flags(project, cfg, raw_params);
    add_common_flags(cloud, cfg, raw_params);

    verify->add_option("--corrupt-bound", cfg.corrupt_bound,
                       "Test hook: scale this bound before checking");
    verify->add_option("--corrupt-factor", cfg.corrupt_factor,
                       "Scale factor for --corrupt-bound (default 0.5)");
    cloud->add_option("--cloud", cfg.cloud, "Input cloud file (default: sample the manifold)");
    cloud->add_option("--points", cfg.points, "Sampled cloud size when no file is given");
    cloud->add_option("--k", cfg.k, "Neighborhood size for the estimators");
    cloud->add_option("--radius", cfg.radius, "Shrinking-ball start radius; 0 = cloud half extent");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        return emit_error("config_error", e.what(), 2);
    }

    CLI::App* sub = app.get_subcommands().front();
    try {
        // Per-command defaults for values the user did not pin down.
        const bool has_n = sub->count("--n") > 0;
        const bool has_tmin = sub->count("--tmin") > 0;
        const bool has_tmax = sub->count("--tmax") > 0;
        if (sub == bounds) {
            if (!has_n) cfg.n = 51;
            if (!has_tmax) cfg.t_max = 0.5;
        } else if (sub == verify) {
            if (!has_n) cfg.n = 10000;
            if (!has_tmax) cfg.t_max = 0.25;
        } else if (sub == project) {
            if (!has_n) cfg.n = 10000;
        } else {
            if (!has_n) cfg.n = 2000;
            if (!has_tmin) cfg.t_min = 0.05;
            if (!has_tmax) cfg.t_max = 0.25;
        }

        for (const auto& text : raw_params) {
            const auto [name, value] = parse_param(text);
            cfg.params[name] = value;
        }
        if (!cfg.config_path.empty()) {
            apply_config_file(cfg, provided_keys(sub, raw_params));
        }

        if (sub == bounds) return cmd_bounds(cfg);
        if (sub == verify) return cmd_verify(cfg);
        if (sub == project) return cmd_project(cfg);
        return cmd_cloud(cfg);
    } catch (const ConfigError& e) {
        return emit_error("config_error", e.what(), 2);
    } catch (const lfsgeo::DomainError& e) {
        return emit_error("config_error", e.what(), 2);
    } catch (const lfsgeo::UnsupportedShape& e) {
        return emit_error("config_error", e.what(), 2);
    } catch (const lfsgeo::Error& e) {
        return emit_error("runtime_error", e.what(), 3);
    } catch (const std::exception& e) {
        return emit_error("runtime_error", e.what(), 3);
    }
}

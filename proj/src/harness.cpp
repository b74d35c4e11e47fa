#include "avgcase/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include "json.hpp"

#include "avgcase/errors.hpp"
#include "avgcase/optimizers.hpp"
#include "avgcase/problems.hpp"

namespace avgcase {

namespace {

using nlohmann::json;

std::string strf(const char* fmt, ...) {
    va_list ap;
    va_start(ap, fmt);
    char buf[512];
    std::vsnprintf(buf, sizeof(buf), fmt, ap);
    va_end(ap);
    return buf;
}

std::uint64_t fnv1a64(const std::string& s) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

const char* kMetricNames[3] = {"fgap", "gradsq", "distsq"};

// --- strict JSON access -------------------------------------------------

void require_object(const json& j, const char* where) {
    if (!j.is_object()) {
        throw ConfigError(strf("%s: expected an object", where));
    }
}

void check_keys(const json& obj, const char* where,
                std::initializer_list<const char*> allowed) {
    for (const auto& item : obj.items()) {
        bool ok = false;
        for (const char* k : allowed) {
            if (item.key() == k) {
                ok = true;
                break;
            }
        }
        if (!ok) {
            throw ConfigError(
                strf("%s: unknown key \"%s\"", where, item.key().c_str()));
        }
    }
}

double get_num(const json& obj, const char* where, const char* key,
               bool required, double fallback) {
    if (!obj.contains(key)) {
        if (required) throw ConfigError(strf("%s: missing key \"%s\"", where, key));
        return fallback;
    }
    const json& v = obj.at(key);
    if (!v.is_number()) {
        throw ConfigError(strf("%s: \"%s\" must be a number", where, key));
    }
    return v.get<double>();
}

long long get_int(const json& obj, const char* where, const char* key,
                  bool required, long long fallback) {
    if (!obj.contains(key)) {
        if (required) throw ConfigError(strf("%s: missing key \"%s\"", where, key));
        return fallback;
    }
    const json& v = obj.at(key);
    if (!v.is_number_integer()) {
        throw ConfigError(strf("%s: \"%s\" must be an integer", where, key));
    }
    return v.get<long long>();
}

std::string get_str(const json& obj, const char* where, const char* key,
                    bool required, const std::string& fallback) {
    if (!obj.contains(key)) {
        if (required) throw ConfigError(strf("%s: missing key \"%s\"", where, key));
        return fallback;
    }
    const json& v = obj.at(key);
    if (!v.is_string()) {
        throw ConfigError(strf("%s: \"%s\" must be a string", where, key));
    }
    return v.get<std::string>();
}

bool get_bool(const json& obj, const char* where, const char* key,
              bool fallback) {
    if (!obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (!v.is_boolean()) {
        throw ConfigError(strf("%s: \"%s\" must be a boolean", where, key));
    }
    return v.get<bool>();
}

// --- config sections ----------------------------------------------------

SpectralDistribution parse_distribution(const json& j) {
    require_object(j, "distribution");
    std::string type = get_str(j, "distribution", "type", true, "");
    try {
        if (type == "beta") {
            check_keys(j, "distribution", {"type", "tau", "xi", "L"});
            return SpectralDistribution::beta_dist(
                get_num(j, "distribution", "tau", true, 0.0),
                get_num(j, "distribution", "xi", true, 0.0),
                get_num(j, "distribution", "L", false, 1.0));
        }
        if (type == "marchenko_pastur" || type == "mp") {
            check_keys(j, "distribution", {"type", "r", "sigma2"});
            return SpectralDistribution::marchenko_pastur(
                get_num(j, "distribution", "r", false, 1.0),
                get_num(j, "distribution", "sigma2", false, 1.0));
        }
        if (type == "gamma") {
            check_keys(j, "distribution", {"type", "alpha"});
            return SpectralDistribution::gamma_dist(
                get_num(j, "distribution", "alpha", true, 0.0));
        }
        if (type == "empirical") {
            check_keys(j, "distribution", {"type", "file", "eigenvalues"});
            bool has_file = j.contains("file");
            bool has_vals = j.contains("eigenvalues");
            if (has_file == has_vals) {
                throw ConfigError(
                    "distribution: empirical needs exactly one of "
                    "\"file\" and \"eigenvalues\"");
            }
            if (has_file) {
                return SpectralDistribution::empirical_from_file(
                    get_str(j, "distribution", "file", true, ""));
            }
            const json& arr = j.at("eigenvalues");
            if (!arr.is_array()) {
                throw ConfigError("distribution: \"eigenvalues\" must be an array");
            }
            std::vector<double> vals;
            vals.reserve(arr.size());
            for (const json& v : arr) {
                if (!v.is_number()) {
                    throw ConfigError(
                        "distribution: \"eigenvalues\" entries must be numbers");
                }
                vals.push_back(v.get<double>());
            }
            return SpectralDistribution::empirical(std::move(vals));
        }
    } catch (const ConfigError&) {
        throw;
    } catch (const Error& e) {
        throw ConfigError(std::string("distribution: ") + e.what());
    }
    throw ConfigError(strf("distribution: unknown type \"%s\"", type.c_str()));
}

GeneratorSpec parse_generator(const json& j) {
    require_object(j, "generator");
    GeneratorSpec g;
    std::string type = get_str(j, "generator", "type", true, "");
    if (type == "spectrum") {
        check_keys(j, "generator", {"type", "d"});
        g.kind = GeneratorSpec::Kind::spectrum;
        long long d = get_int(j, "generator", "d", true, 0);
        if (d < 1) throw ConfigError("generator: d must be >= 1");
        g.d = static_cast<int>(d);
        return g;
    }
    if (type == "gram") {
        check_keys(j, "generator", {"type", "d", "n", "sigma2"});
        g.kind = GeneratorSpec::Kind::gram;
        long long d = get_int(j, "generator", "d", true, 0);
        long long n = get_int(j, "generator", "n", true, 0);
        if (d < 1 || n < 1) throw ConfigError("generator: d and n must be >= 1");
        g.d = static_cast<int>(d);
        g.n = static_cast<int>(n);
        g.sigma2 = get_num(j, "generator", "sigma2", false, 1.0);
        if (!(g.sigma2 > 0.0)) throw ConfigError("generator: sigma2 must be > 0");
        return g;
    }
    throw ConfigError(strf("generator: unknown type \"%s\"", type.c_str()));
}

MethodEntry parse_method_object(const json& j, int index) {
    std::string where = strf("methods[%d]", index);
    require_object(j, where.c_str());
    MethodEntry e;
    std::string name = get_str(j, where.c_str(), "name", true, "");
    if (name == "gcm") {
        check_keys(j, where.c_str(), {"name", "alpha", "beta", "L"});
        e.kind = Method::Kind::gcm;
        e.alpha = get_num(j, where.c_str(), "alpha", true, 0.0);
        e.beta = get_num(j, where.c_str(), "beta", true, 0.0);
    } else if (name == "laguerre") {
        check_keys(j, where.c_str(), {"name", "alpha"});
        e.kind = Method::Kind::laguerre;
        e.alpha = get_num(j, where.c_str(), "alpha", true, 0.0);
    } else if (name == "nesterov") {
        check_keys(j, where.c_str(), {"name", "L"});
        e.kind = Method::Kind::nesterov;
    } else if (name == "gd") {
        check_keys(j, where.c_str(), {"name", "L"});
        e.kind = Method::Kind::gd;
    } else {
        throw ConfigError(
            strf("%s: unknown method \"%s\"", where.c_str(), name.c_str()));
    }
    if (j.contains("L")) {
        e.L = get_num(j, where.c_str(), "L", true, 0.0);
        e.has_L = true;
        if (!(e.L > 0.0)) {
            throw ConfigError(strf("%s: L must be > 0", where.c_str()));
        }
    }
    try {
        e.resolve(e.has_L ? e.L : 1.0);
    } catch (const Error& err) {
        throw ConfigError(where + ": " + err.what());
    }
    return e;
}

json distribution_json(const SpectralDistribution& d) {
    switch (d.kind) {
        case SpectralDistribution::Kind::beta:
            return json{{"type", "beta"}, {"tau", d.tau}, {"xi", d.xi}, {"L", d.L}};
        case SpectralDistribution::Kind::marchenko_pastur:
            return json{{"type", "marchenko_pastur"}, {"r", d.r}, {"sigma2", d.sigma2}};
        case SpectralDistribution::Kind::gamma:
            return json{{"type", "gamma"}, {"alpha", d.alpha}};
        case SpectralDistribution::Kind::empirical:
        default:
            return json{{"type", "empirical"}, {"eigenvalues", d.eigenvalues}};
    }
}

json generator_json(const GeneratorSpec& g) {
    if (g.kind == GeneratorSpec::Kind::spectrum) {
        return json{{"type", "spectrum"}, {"d", g.d}};
    }
    return json{{"type", "gram"}, {"d", g.d}, {"n", g.n}, {"sigma2", g.sigma2}};
}

json method_json(const MethodEntry& e) {
    json j;
    switch (e.kind) {
        case Method::Kind::gcm:
            j = json{{"name", "gcm"}, {"alpha", e.alpha}, {"beta", e.beta}};
            break;
        case Method::Kind::laguerre:
            j = json{{"name", "laguerre"}, {"alpha", e.alpha}};
            break;
        case Method::Kind::nesterov:
            j = json{{"name", "nesterov"}};
            break;
        case Method::Kind::gd:
        default:
            j = json{{"name", "gd"}};
            break;
    }
    if (e.has_L) j["L"] = e.L;
    return j;
}

// Experiment-defining fields only (out_dir and workers do not affect
// results and are excluded, so the hash identifies the experiment).
json canonical_config(const ExperimentConfig& c) {
    json methods = json::array();
    for (const MethodEntry& e : c.methods) methods.push_back(method_json(e));
    return json{{"T", c.T},
                {"distribution", distribution_json(c.distribution)},
                {"fit", json{{"window", c.fit.window},
                             {"include_log", c.fit.include_log}}},
                {"generator", generator_json(c.generator)},
                {"master_seed", c.master_seed},
                {"methods", methods},
                {"seeds", c.seeds}};
}

} // namespace

std::string GeneratorSpec::describe() const {
    if (kind == Kind::spectrum) return strf("spectrum(d=%d)", d);
    return strf("gram(n=%d, d=%d, sigma2=%g)", n, d, sigma2);
}

Method MethodEntry::resolve(double instance_L) const {
    double use_L = has_L ? L : instance_L;
    switch (kind) {
        case Method::Kind::gcm:
            return Method::gcm(alpha, beta, use_L);
        case Method::Kind::laguerre:
            return Method::laguerre(alpha);
        case Method::Kind::nesterov:
            return Method::nesterov(use_L);
        case Method::Kind::gd:
        default:
            return Method::gd(use_L);
    }
}

std::string MethodEntry::label() const {
    std::string base;
    switch (kind) {
        case Method::Kind::gcm:
            base = strf("gcm_a%g_b%g", alpha, beta);
            break;
        case Method::Kind::laguerre:
            base = strf("laguerre_a%g", alpha);
            break;
        case Method::Kind::nesterov:
            base = "nesterov";
            break;
        case Method::Kind::gd:
        default:
            base = "gd";
            break;
    }
    if (has_L) base += strf("_L%g", L);
    return base;
}

ExperimentConfig parse_config(const std::string& json_text) {
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    require_object(root, "config");
    check_keys(root, "config",
               {"distribution", "generator", "methods", "T", "master_seed",
                "num_seeds", "seeds", "out_dir", "workers", "fit"});
    ExperimentConfig c;
    if (!root.contains("distribution")) {
        throw ConfigError("config: missing key \"distribution\"");
    }
    c.distribution = parse_distribution(root.at("distribution"));
    if (!root.contains("generator")) {
        throw ConfigError("config: missing key \"generator\"");
    }
    c.generator = parse_generator(root.at("generator"));

    if (!root.contains("methods") || !root.at("methods").is_array() ||
        root.at("methods").empty()) {
        throw ConfigError("config: \"methods\" must be a non-empty array");
    }
    int idx = 0;
    for (const json& m : root.at("methods")) {
        c.methods.push_back(parse_method_object(m, idx++));
    }
    for (size_t i = 0; i < c.methods.size(); ++i) {
        for (size_t k = i + 1; k < c.methods.size(); ++k) {
            if (c.methods[i].label() == c.methods[k].label()) {
                throw ConfigError("config: duplicate method entry \"" +
                                  c.methods[i].label() + "\"");
            }
        }
    }

    long long T = get_int(root, "config", "T", true, 0);
    if (T < 1) throw ConfigError("config: T must be >= 1");
    c.T = static_cast<int>(T);

    long long master = get_int(root, "config", "master_seed", false, 1234);
    c.master_seed = static_cast<std::uint64_t>(master);

    if (root.contains("seeds") && root.contains("num_seeds")) {
        throw ConfigError("config: give either \"seeds\" or \"num_seeds\", not both");
    }
    if (root.contains("seeds")) {
        const json& arr = root.at("seeds");
        if (!arr.is_array() || arr.empty()) {
            throw ConfigError("config: \"seeds\" must be a non-empty array");
        }
        for (const json& v : arr) {
            if (!v.is_number_integer() || v.get<long long>() < 0) {
                throw ConfigError("config: seeds must be nonnegative integers");
            }
            c.seeds.push_back(v.get<std::uint64_t>());
        }
    } else {
        long long n = get_int(root, "config", "num_seeds", false, 8);
        if (n < 1) throw ConfigError("config: num_seeds must be >= 1");
        for (long long i = 0; i < n; ++i) {
            c.seeds.push_back(static_cast<std::uint64_t>(i));
        }
    }
    {
        std::vector<std::uint64_t> sorted = c.seeds;
        std::sort(sorted.begin(), sorted.end());
        if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
            throw ConfigError("config: seeds must be distinct");
        }
    }

    c.out_dir = get_str(root, "config", "out_dir", false, "out");
    long long workers = get_int(root, "config", "workers", false, 1);
    if (workers < 1) throw ConfigError("config: workers must be >= 1");
    c.workers = static_cast<int>(workers);

    if (root.contains("fit")) {
        const json& f = root.at("fit");
        require_object(f, "fit");
        check_keys(f, "fit", {"window", "include_log"});
        long long w = get_int(f, "fit", "window", false, 700);
        if (w < 2) throw ConfigError("fit: window must be >= 2");
        c.fit.window = static_cast<int>(w);
        c.fit.include_log = get_bool(f, "fit", "include_log", false);
    }

    // Cross-section consistency.
    if (c.generator.kind == GeneratorSpec::Kind::gram) {
        if (c.distribution.kind != SpectralDistribution::Kind::marchenko_pastur) {
            throw ConfigError(
                "config: the gram generator realizes a Marchenko-Pastur "
                "spectral law; declare a marchenko_pastur distribution");
        }
        if (c.generator.n < c.generator.d) {
            throw ConfigError(
                "config: gram with n < d realizes an atom at zero, outside "
                "the supported bulk law");
        }
        // The d x d Gram matrix built from n >= d samples realizes the bulk
        // law with ratio d/n and scale sigma2 * n/d; these reduce to the
        // generator's own parameters only at n = d.
        double r = static_cast<double>(c.generator.d) / c.generator.n;
        double s2 = c.generator.sigma2 * c.generator.n / c.generator.d;
        if (std::fabs(c.distribution.r - r) > 1e-9) {
            throw ConfigError(strf(
                "config: gram(n=%d, d=%d) realizes spectral ratio d/n = %g, "
                "but the distribution declares r = %g",
                c.generator.n, c.generator.d, r, c.distribution.r));
        }
        if (std::fabs(c.distribution.sigma2 - s2) > 1e-9) {
            throw ConfigError(strf(
                "config: gram(n=%d, d=%d, sigma2=%g) realizes spectral scale "
                "%g, but the distribution declares sigma2 = %g",
                c.generator.n, c.generator.d, c.generator.sigma2, s2,
                c.distribution.sigma2));
        }
    }
    if (c.distribution.kind == SpectralDistribution::Kind::empirical &&
        c.generator.kind == GeneratorSpec::Kind::spectrum &&
        c.generator.d != static_cast<int>(c.distribution.eigenvalues.size())) {
        throw ConfigError(strf(
            "config: empirical distribution has %zu eigenvalues but d = %d",
            c.distribution.eigenvalues.size(), c.generator.d));
    }
    return c;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

std::string config_hash(const ExperimentConfig& config) {
    return strf("%016llx",
                static_cast<unsigned long long>(
                    fnv1a64(canonical_config(config).dump())));
}

TheoryRate theory_rate(const SpectralDistribution& dist,
                       const MethodEntry& method, int objective_l) {
    TheoryRate out;
    if (objective_l != 1 && objective_l != 2) return out;
    double tau = 0.0, xi = 0.0;
    bool edge_family = false;
    if (dist.kind == SpectralDistribution::Kind::beta) {
        tau = dist.tau;
        xi = dist.xi;
        edge_family = true;
    } else if (dist.kind == SpectralDistribution::Kind::marchenko_pastur) {
        // Only at r = 1 does the left edge touch zero with a -1/2 power.
        // For r < 1 the spectrum is gapped away from zero, decay is
        // geometric, and the polynomial rate table does not apply.
        if (std::fabs(dist.r - 1.0) <= 1e-9) {
            tau = 0.5;
            xi = -0.5;
            edge_family = true;
        }
    }
    switch (method.kind) {
        case Method::Kind::gcm:
            if (edge_family) {
                out.rate = gcm_avg_exponent(method.alpha, method.beta, tau, xi,
                                            objective_l);
                out.known = true;
            }
            break;
        case Method::Kind::nesterov:
            if (edge_family) {
                out.rate = nesterov_avg_exponent(xi, objective_l);
                out.known = true;
            }
            break;
        case Method::Kind::gd:
            if (edge_family) {
                out.rate = gd_avg_exponent(xi, objective_l);
                out.known = true;
            }
            break;
        case Method::Kind::laguerre:
            // Rate known only for the tuned family on a gamma spectrum.
            if (dist.kind == SpectralDistribution::Kind::gamma &&
                objective_l == 1 &&
                std::fabs(method.alpha - (dist.alpha + 2.0)) <= 1e-9) {
                out.rate = laguerre_exponent(dist.alpha);
                out.known = true;
            }
            break;
    }
    return out;
}

namespace {

struct SlopeRecord {
    bool present = false;
    SlopeFit fit;
    std::string error;
};

struct RunRecord {
    std::string label;
    std::uint64_t seed = 0;
    std::string traj_file; // empty when no file was written
    bool diverged = false;
    int divergence_t = -1;
    std::string error; // non-divergence failure
    SlopeRecord slopes[3];
    std::vector<double> metric[3]; // fgap, gradsq, distsq
    double wall_ms = 0.0;
};

void run_one_seed(const ExperimentConfig& cfg, int seed_pos,
                  std::vector<RunRecord>& out) {
    namespace fs = std::filesystem;
    const std::uint64_t seed = cfg.seeds[seed_pos];
    Rng rng = Rng::substream(cfg.master_seed, seed);
    QuadraticProblem problem;
    std::string build_error;
    try {
        if (cfg.generator.kind == GeneratorSpec::Kind::gram) {
            problem = gram_problem(cfg.generator.n, cfg.generator.d,
                                   cfg.generator.sigma2, rng);
        } else {
            problem = spectrum_problem(
                sample_eigenvalues(cfg.distribution, cfg.generator.d, rng), rng);
        }
    } catch (const Error& e) {
        build_error = e.what();
    }
    for (size_t m = 0; m < cfg.methods.size(); ++m) {
        const MethodEntry& entry = cfg.methods[m];
        RunRecord& rec = out[m];
        rec.label = entry.label();
        rec.seed = seed;
        if (!build_error.empty()) {
            rec.error = "problem generation failed: " + build_error;
            continue;
        }
        auto t0 = std::chrono::steady_clock::now();
        try {
            Method method = entry.resolve(problem.L_instance);
            rec.traj_file = rec.label + strf("_s%llu.csv",
                                             static_cast<unsigned long long>(seed));
            fs::path path = fs::path(cfg.out_dir) / rec.traj_file;
            try {
                Trajectory traj = run_method(problem, method, cfg.T);
                traj.seed = seed;
                std::ofstream f(path);
                if (!f) throw IoError("cannot write " + path.string());
                write_trajectory_csv(traj, f);
                rec.metric[0] = std::move(traj.fgap);
                rec.metric[1] = std::move(traj.gradsq);
                rec.metric[2] = std::move(traj.distsq);
                for (int i = 0; i < 3; ++i) {
                    try {
                        rec.slopes[i].fit = fit_slope(rec.metric[i], cfg.fit.window,
                                                      cfg.fit.include_log);
                        rec.slopes[i].present = true;
                    } catch (const Error& e) {
                        rec.slopes[i].error = e.what();
                    }
                }
            } catch (const DivergenceError& e) {
                rec.diverged = true;
                rec.divergence_t = e.last_finite_t;
                std::ofstream f(path);
                if (!f) throw IoError("cannot write " + path.string());
                f << "# method: " << method.describe() << "\n";
                f << "# provenance: " << problem.provenance << "\n";
                f << "# seed: " << seed << "\n";
                f << "# diverged_at: " << e.last_finite_t + 1 << "\n";
                f << "t,fgap,gradsq,distsq\n";
            }
        } catch (const Error& e) {
            rec.error = e.what();
            rec.traj_file.clear();
        }
        rec.wall_ms = std::chrono::duration<double, std::milli>(
                          std::chrono::steady_clock::now() - t0)
                          .count();
    }
}

json slope_json(const SlopeRecord& s) {
    if (!s.present) {
        if (s.error.empty()) return nullptr;
        return json{{"error", s.error}};
    }
    return json{{"slope", s.fit.slope},
                {"std_error", s.fit.std_error},
                {"window_first", s.fit.window_first},
                {"window_last", s.fit.window_last},
                {"log_corrected", s.fit.log_corrected},
                {"shrunk", s.fit.shrunk}};
}

} // namespace

int cmd_run(const ExperimentConfig& cfg, std::ostream& log) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(cfg.out_dir, ec);
    if (ec) {
        throw IoError("cannot create output directory " + cfg.out_dir + ": " +
                      ec.message());
    }
    const int S = static_cast<int>(cfg.seeds.size());
    const int M = static_cast<int>(cfg.methods.size());
    log << "suite: " << cfg.distribution.describe() << " via "
        << cfg.generator.describe() << ", T=" << cfg.T << ", " << S
        << " seed(s), " << M << " method(s)\n";
    auto suite_t0 = std::chrono::steady_clock::now();

    std::vector<std::vector<RunRecord>> rec(S, std::vector<RunRecord>(M));
    std::atomic<int> next{0};
    auto worker = [&]() {
        for (;;) {
            int k = next.fetch_add(1);
            if (k >= S) return;
            run_one_seed(cfg, k, rec[k]);
        }
    };
    int W = std::min(cfg.workers, S);
    if (W <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(W);
        for (int i = 0; i < W; ++i) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    bool any_bad = false;
    for (int k = 0; k < S; ++k) {
        for (int m = 0; m < M; ++m) {
            const RunRecord& r = rec[k][m];
            log << "  seed " << r.seed << " " << r.label << ": ";
            if (r.diverged) {
                log << "diverged at t=" << r.divergence_t + 1;
                any_bad = true;
            } else if (!r.error.empty()) {
                log << "error: " << r.error;
                any_bad = true;
            } else if (r.slopes[0].present) {
                log << strf("slope(fgap) %.4f (se %.4f)", r.slopes[0].fit.slope,
                            r.slopes[0].fit.std_error);
            } else {
                log << "no slope: " << r.slopes[0].error;
            }
            log << strf(" [%.1f s]\n", r.wall_ms / 1000.0);
        }
    }

    // Per-method aggregation: trajectory CSV of geometric means and log-sd
    // across clean runs, then slope statistics.
    json aggregate = json::array();
    for (int m = 0; m < M; ++m) {
        const std::string label = cfg.methods[m].label();
        std::vector<const RunRecord*> clean;
        for (int k = 0; k < S; ++k) {
            const RunRecord& r = rec[k][m];
            if (!r.diverged && r.error.empty()) clean.push_back(&r);
        }
        std::string agg_file;
        if (!clean.empty()) {
            agg_file = "aggregate_" + label + ".csv";
            std::ofstream f(fs::path(cfg.out_dir) / agg_file);
            if (!f) throw IoError("cannot write aggregate CSV for " + label);
            f << "# distribution: " << cfg.distribution.describe() << "\n";
            f << "# generator: " << cfg.generator.describe() << "\n";
            f << "# method: " << label << "\n";
            f << "# runs: " << clean.size() << "\n";
            f << "t,fgap_geomean,fgap_logsd,gradsq_geomean,gradsq_logsd,"
                 "distsq_geomean,distsq_logsd\n";
            const size_t n_t = clean.front()->metric[0].size();
            for (size_t t = 0; t < n_t; ++t) {
                f << t;
                for (int i = 0; i < 3; ++i) {
                    double sum = 0.0, sum2 = 0.0;
                    bool ok = true;
                    for (const RunRecord* r : clean) {
                        double v = r->metric[i][t];
                        if (!(v > 0.0) || !std::isfinite(v)) {
                            ok = false;
                            break;
                        }
                        double lv = std::log(v);
                        sum += lv;
                        sum2 += lv * lv;
                    }
                    if (!ok) {
                        f << ",nan,nan";
                        continue;
                    }
                    double k_runs = static_cast<double>(clean.size());
                    double mean = sum / k_runs;
                    double var = 0.0;
                    if (clean.size() > 1) {
                        var = std::max(0.0, (sum2 - k_runs * mean * mean) /
                                                (k_runs - 1.0));
                    }
                    f << strf(",%.17g,%.17g", std::exp(mean), std::sqrt(var));
                }
                f << "\n";
            }
        }
        for (int i = 0; i < 3; ++i) {
            std::vector<double> slopes;
            for (const RunRecord* r : clean) {
                if (r->slopes[i].present) slopes.push_back(r->slopes[i].fit.slope);
            }
            json entry;
            entry["method"] = label;
            entry["metric"] = kMetricNames[i];
            entry["num_runs"] = slopes.size();
            if (!slopes.empty()) {
                double mean = 0.0;
                for (double s : slopes) mean += s;
                mean /= static_cast<double>(slopes.size());
                double var = 0.0;
                if (slopes.size() > 1) {
                    for (double s : slopes) var += (s - mean) * (s - mean);
                    var /= static_cast<double>(slopes.size() - 1);
                }
                entry["mean_slope"] = mean;
                entry["sd_slope"] = std::sqrt(var);
            } else {
                entry["mean_slope"] = nullptr;
                entry["sd_slope"] = nullptr;
            }
            int l = i == 0 ? 1 : (i == 1 ? 2 : 0);
            TheoryRate th = theory_rate(cfg.distribution, cfg.methods[m], l);
            if (th.known) {
                entry["theory"] = json{{"exponent", th.rate.exponent},
                                       {"log_factor", th.rate.log_factor},
                                       {"regime", th.rate.regime}};
            } else {
                entry["theory"] = nullptr;
            }
            entry["aggregate_csv"] = agg_file.empty() ? json(nullptr) : json(agg_file);
            aggregate.push_back(entry);
            if (i == 0 && !slopes.empty()) {
                log << "  aggregate " << label << " fgap: mean slope "
                    << strf("%.4f", entry["mean_slope"].get<double>());
                if (th.known) {
                    log << strf(" vs theory %g%s [%s]", th.rate.exponent,
                                th.rate.log_factor ? " (log)" : "",
                                th.rate.regime.c_str());
                }
                log << "\n";
            }
        }
    }

    json manifest;
    manifest["tool_version"] = kToolVersion;
    manifest["config_hash"] = config_hash(cfg);
    manifest["config"] = canonical_config(cfg);
    manifest["distribution"] = cfg.distribution.describe();
    manifest["generator"] = cfg.generator.describe();
    json runs = json::array();
    for (int k = 0; k < S; ++k) {
        for (int m = 0; m < M; ++m) {
            const RunRecord& r = rec[k][m];
            json jr;
            jr["method"] = r.label;
            jr["seed"] = r.seed;
            jr["trajectory"] =
                r.traj_file.empty() ? json(nullptr) : json(r.traj_file);
            jr["diverged"] = r.diverged;
            jr["divergence_t"] =
                r.diverged ? json(r.divergence_t + 1) : json(nullptr);
            jr["error"] = r.error.empty() ? json(nullptr) : json(r.error);
            json slopes;
            for (int i = 0; i < 3; ++i) {
                slopes[kMetricNames[i]] = slope_json(r.slopes[i]);
            }
            jr["slopes"] = slopes;
            jr["wall_ms"] = r.wall_ms;
            runs.push_back(jr);
        }
    }
    manifest["runs"] = runs;
    manifest["aggregate"] = aggregate;
    manifest["total_wall_ms"] =
        std::chrono::duration<double, std::milli>(
            std::chrono::steady_clock::now() - suite_t0)
            .count();
    fs::path mpath = fs::path(cfg.out_dir) / "manifest.json";
    {
        std::ofstream f(mpath);
        if (!f) throw IoError("cannot write " + mpath.string());
        f << manifest.dump(2) << "\n";
    }
    log << "manifest: " << mpath.string() << "\n";
    return any_bad ? 2 : 0;
}

int cmd_quadrature(const SpectralDistribution& dist, const Method& method,
                   int T, int objective_l, const FitOptions& fit,
                   std::ostream& csv_out, std::ostream& log) {
    if (objective_l < 0 || objective_l > 2) {
        throw ArgumentError("quadrature: -l must be 0, 1, or 2");
    }
    std::vector<double> metric[3];
    for (int l = 0; l < 3; ++l) metric[l] = expected_metric(dist, method, l, T);
    csv_out << "# kind: quadrature expectation (per dimension)\n";
    csv_out << "# distribution: " << dist.describe() << "\n";
    csv_out << "# method: " << method.describe() << "\n";
    // metric_l0 = distsq, metric_l1 = fgap (with its half factor),
    // metric_l2 = gradsq.
    csv_out << "t,metric_l0,metric_l1,metric_l2\n";
    for (int t = 0; t <= T; ++t) {
        csv_out << strf("%d,%.17g,%.17g,%.17g\n", t, metric[0][t], metric[1][t],
                        metric[2][t]);
    }
    const char* name = objective_l == 0 ? "distsq"
                       : objective_l == 1 ? "fgap"
                                          : "gradsq";
    try {
        SlopeFit f = fit_slope(metric[objective_l], fit.window, fit.include_log);
        log << strf("slope(%s) = %.6f (se %.2g), window [%d, %d]%s", name,
                    f.slope, f.std_error, f.window_first, f.window_last,
                    f.log_corrected ? ", log-corrected" : "");
        MethodEntry entry;
        entry.kind = method.kind;
        entry.alpha = method.alpha;
        entry.beta = method.beta;
        TheoryRate th = theory_rate(dist, entry, objective_l);
        if (th.known) {
            log << strf("; theory %g%s [%s]", th.rate.exponent,
                        th.rate.log_factor ? " (log)" : "",
                        th.rate.regime.c_str());
        }
        log << "\n";
        return 0;
    } catch (const ArgumentError& e) {
        log << "no slope for " << name << ": " << e.what() << "\n";
        return 2;
    }
}

int cmd_rates(double tau, double xi, const std::vector<MethodEntry>& methods,
              int objective_l, std::ostream& out) {
    out << "method,objective,exponent,log_factor,regime\n";
    for (const MethodEntry& m : methods) {
        RateSpec r;
        switch (m.kind) {
            case Method::Kind::gcm:
                r = gcm_avg_exponent(m.alpha, m.beta, tau, xi, objective_l);
                break;
            case Method::Kind::nesterov:
                r = nesterov_avg_exponent(xi, objective_l);
                break;
            case Method::Kind::gd:
                r = gd_avg_exponent(xi, objective_l);
                break;
            case Method::Kind::laguerre:
                throw ArgumentError(
                    "rates: the Laguerre family is tied to the gamma spectral "
                    "family, not to edge exponents (tau, xi)");
        }
        out << strf("%s,%d,%.17g,%d,%s\n", m.label().c_str(), objective_l,
                    r.exponent, r.log_factor ? 1 : 0, r.regime.c_str());
    }
    return 0;
}

int cmd_rates_grid(double tau, double xi, int objective_l, std::ostream& out) {
    out << "alpha,beta,exponent,log_factor,converges\n";
    for (int i = 1; i <= 100; ++i) {
        double alpha = static_cast<double>(5 * i - 100) / 100.0;
        for (int j = 1; j <= 100; ++j) {
            double beta = static_cast<double>(5 * j - 100) / 100.0;
            RateSpec r = gcm_avg_exponent(alpha, beta, tau, xi, objective_l);
            out << strf("%.17g,%.17g,%.17g,%d,%d\n", alpha, beta, r.exponent,
                        r.log_factor ? 1 : 0, r.exponent < 0.0 ? 1 : 0);
        }
    }
    return 0;
}

int cmd_compare(const std::string& manifest_path, double tol,
                const std::string& metric, std::ostream& out) {
    bool valid_metric = false;
    for (const char* name : kMetricNames) {
        if (metric == name) valid_metric = true;
    }
    if (!valid_metric) {
        throw ArgumentError("compare: metric must be fgap, gradsq, or distsq");
    }
    std::ifstream in(manifest_path);
    if (!in) throw IoError("cannot open manifest " + manifest_path);
    json manifest;
    try {
        manifest = json::parse(in);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("manifest: ") + e.what());
    }
    out << "method,metric,empirical,theory,delta,status\n";
    if (!manifest.contains("runs") || manifest.at("runs").empty()) {
        return 0;
    }
    // A method whose every run diverged is reported as such.
    auto all_diverged = [&](const std::string& label) {
        bool saw = false;
        for (const json& r : manifest.at("runs")) {
            if (r.value("method", "") != label) continue;
            saw = true;
            if (!r.value("diverged", false)) return false;
        }
        return saw;
    };
    bool any_fail = false;
    if (!manifest.contains("aggregate")) {
        throw ConfigError("manifest: missing \"aggregate\" section");
    }
    for (const json& entry : manifest.at("aggregate")) {
        if (entry.value("metric", "") != metric) continue;
        std::string label = entry.value("method", "");
        const json& slope = entry.at("mean_slope");
        const json& theory = entry.at("theory");
        if (slope.is_null()) {
            out << label << "," << metric << ",,,,"
                << (all_diverged(label) ? "diverged" : "no-slope") << "\n";
            continue;
        }
        if (theory.is_null()) {
            out << strf("%s,%s,%.6g,,,no-theory\n", label.c_str(),
                        metric.c_str(), slope.get<double>());
            continue;
        }
        double expo = theory.at("exponent").get<double>();
        double delta = slope.get<double>() - expo;
        bool pass = std::fabs(delta) <= tol;
        any_fail = any_fail || !pass;
        out << strf("%s,%s,%.6g,%.6g,%.6g,%s\n", label.c_str(), metric.c_str(),
                    slope.get<double>(), expo, delta, pass ? "pass" : "fail");
    }
    return any_fail ? 3 : 0;
}

MethodEntry parse_method_spec(const std::string& text) {
    MethodEntry e;
    std::string body = text;
    size_t at = body.find('@');
    if (at != std::string::npos) {
        char* end = nullptr;
        std::string ls = body.substr(at + 1);
        e.L = std::strtod(ls.c_str(), &end);
        if (ls.empty() || end != ls.c_str() + ls.size() || !(e.L > 0.0)) {
            throw ArgumentError("method spec: bad L in \"" + text + "\"");
        }
        e.has_L = true;
        body = body.substr(0, at);
    }
    std::string name = body;
    std::vector<double> params;
    size_t colon = body.find(':');
    if (colon != std::string::npos) {
        name = body.substr(0, colon);
        std::string rest = body.substr(colon + 1);
        std::istringstream ss(rest);
        std::string tok;
        while (std::getline(ss, tok, ',')) {
            char* end = nullptr;
            double v = std::strtod(tok.c_str(), &end);
            if (tok.empty() || end != tok.c_str() + tok.size()) {
                throw ArgumentError("method spec: bad parameter in \"" + text +
                                    "\"");
            }
            params.push_back(v);
        }
    }
    auto expect = [&](size_t n) {
        if (params.size() != n) {
            throw ArgumentError(strf(
                "method spec \"%s\": expected %zu parameter(s), got %zu",
                text.c_str(), n, params.size()));
        }
    };
    if (name == "gcm") {
        expect(2);
        e.kind = Method::Kind::gcm;
        e.alpha = params[0];
        e.beta = params[1];
    } else if (name == "laguerre") {
        expect(1);
        e.kind = Method::Kind::laguerre;
        e.alpha = params[0];
    } else if (name == "nesterov") {
        expect(0);
        e.kind = Method::Kind::nesterov;
    } else if (name == "gd") {
        expect(0);
        e.kind = Method::Kind::gd;
    } else {
        throw ArgumentError("method spec: unknown method \"" + name + "\"");
    }
    e.resolve(e.has_L ? e.L : 1.0); // validate parameters eagerly
    return e;
}

} // namespace avgcase

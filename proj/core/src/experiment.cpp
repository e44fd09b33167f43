#include "gpgad/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <functional>
#include <sstream>

#include <nlohmann/json.hpp>

#include "gpgad/problems.hpp"
#include "gpgad/rng.hpp"

namespace gpgad {

namespace {

using json = nlohmann::ordered_json;

std::string fmt(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string fmt(const Vec& v) {
    std::string s;
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        if (i) s += ", ";
        s += fmt(v[i]);
    }
    return s;
}

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

double to_double(const std::string& s) {
    const std::string t = trim(s);
    if (t == "inf" || t == "+inf") return std::numeric_limits<double>::infinity();
    double v = 0.0;
    const auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc() || p != t.data() + t.size() || t.empty()) throw InputError("not a number: '" + t + "'");
    return v;
}

template <class Int>
Int to_int(const std::string& s) {
    const std::string t = trim(s);
    Int v{};
    const auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc() || p != t.data() + t.size() || t.empty()) throw InputError("not an integer: '" + t + "'");
    return v;
}

Vec to_vec(const std::string& s) {
    std::string t = s;
    std::replace(t.begin(), t.end(), ',', ' ');
    std::istringstream in(t);
    std::vector<double> vals;
    std::string tok;
    while (in >> tok) vals.push_back(to_double(tok));
    if (vals.empty()) throw InputError("empty vector");
    return Eigen::Map<Vec>(vals.data(), static_cast<Eigen::Index>(vals.size()));
}

struct KeySpec {
    std::string name;
    std::function<void(ExperimentConfig&, const std::string&)> set;
    std::function<std::string(const ExperimentConfig&)> get;
    std::function<bool(const ExperimentConfig&)> valid;
};

int problem_dim(const std::string& name) {
    try {
        return make_problem(name).dim();
    } catch (const InputError&) {
        return -1;
    }
}

const std::vector<KeySpec>& key_specs() {
    using C = ExperimentConfig;
    static const std::vector<KeySpec> specs = {
        {"problem", [](C& c, const std::string& v) { c.problem = trim(v); },
         [](const C& c) { return c.problem; }, [](const C& c) { return problem_dim(c.problem) > 0; }},
        {"mode",
         [](C& c, const std::string& v) {
             const std::string t = trim(v);
             if (t == "reference") c.mode = RunMode::reference;
             else if (t == "agpr") c.mode = RunMode::agpr;
             else throw InputError("mode must be reference or agpr");
         },
         [](const C& c) { return std::string(c.mode == RunMode::reference ? "reference" : "agpr"); },
         [](const C&) { return true; }},
        {"start", [](C& c, const std::string& v) { c.start = to_vec(v); }, [](const C& c) { return fmt(c.start); },
         [](const C& c) { return c.start.size() == problem_dim(c.problem) && c.start.allFinite(); }},
        {"v0",
         [](C& c, const std::string& v) {
             if (trim(v) == "seeded-default") c.v0.reset();
             else c.v0 = to_vec(v);
         },
         [](const C& c) { return c.v0 ? fmt(*c.v0) : std::string("seeded-default"); },
         [](const C& c) {
             return !c.v0 || (c.v0->size() == problem_dim(c.problem) && c.v0->allFinite() && c.v0->norm() > 0.0);
         }},
        {"dt", [](C& c, const std::string& v) { c.gad.dt = to_double(v); }, [](const C& c) { return fmt(c.gad.dt); },
         [](const C& c) { return c.gad.dt > 0.0 && std::isfinite(c.gad.dt); }},
        {"tol", [](C& c, const std::string& v) { c.gad.tol = to_double(v); }, [](const C& c) { return fmt(c.gad.tol); },
         [](const C& c) { return c.gad.tol > 0.0 && std::isfinite(c.gad.tol); }},
        {"t_max", [](C& c, const std::string& v) { c.gad.t_max = to_int<long>(v); },
         [](const C& c) { return std::to_string(c.gad.t_max); }, [](const C& c) { return c.gad.t_max >= 1; }},
        {"noise_var", [](C& c, const std::string& v) { c.al.noise_var = to_double(v); },
         [](const C& c) { return fmt(c.al.noise_var); },
         [](const C& c) { return c.al.noise_var >= 0.0 && std::isfinite(c.al.noise_var); }},
        {"sigma_sur", [](C& c, const std::string& v) { c.al.sigma_sur = to_double(v); },
         [](const C& c) { return fmt(c.al.sigma_sur); }, [](const C& c) { return c.al.sigma_sur > 0.0; }},
        {"N0", [](C& c, const std::string& v) { c.al.n0 = to_int<int>(v); },
         [](const C& c) { return std::to_string(c.al.n0); }, [](const C& c) { return c.al.n0 >= 3; }},
        {"N_D", [](C& c, const std::string& v) { c.al.n_design = to_int<int>(v); },
         [](const C& c) { return std::to_string(c.al.n_design); }, [](const C& c) { return c.al.n_design >= 1; }},
        {"n_paths", [](C& c, const std::string& v) { c.al.n_paths = to_int<int>(v); },
         [](const C& c) { return std::to_string(c.al.n_paths); }, [](const C& c) { return c.al.n_paths >= 1; }},
        {"horizon_T", [](C& c, const std::string& v) { c.al.horizon_T = to_double(v); },
         [](const C& c) { return fmt(c.al.horizon_T); },
         [](const C& c) { return c.al.horizon_T > 0.0 && std::isfinite(c.al.horizon_T); }},
        {"design_dt", [](C& c, const std::string& v) { c.al.design_dt = to_double(v); },
         [](const C& c) { return fmt(c.al.design_dt); },
         [](const C& c) { return c.al.design_dt > 0.0 && std::isfinite(c.al.design_dt); }},
        {"init_spread", [](C& c, const std::string& v) { c.al.init_spread = to_double(v); },
         [](const C& c) { return fmt(c.al.init_spread); },
         [](const C& c) { return c.al.init_spread > 0.0 && std::isfinite(c.al.init_spread); }},
        {"mle_budget", [](C& c, const std::string& v) { c.al.mle_budget = to_int<int>(v); },
         [](const C& c) { return std::to_string(c.al.mle_budget); }, [](const C& c) { return c.al.mle_budget >= 0; }},
        {"max_cost", [](C& c, const std::string& v) { c.al.max_cost = to_int<long>(v); },
         [](const C& c) { return std::to_string(c.al.max_cost); }, [](const C& c) { return c.al.max_cost >= 0; }},
        {"mle_starts", [](C& c, const std::string& v) { c.al.mle_starts = to_int<int>(v); },
         [](const C& c) { return std::to_string(c.al.mle_starts); }, [](const C& c) { return c.al.mle_starts >= 1; }},
        {"spsa.a", [](C& c, const std::string& v) { c.al.spsa.a = to_double(v); },
         [](const C& c) { return fmt(c.al.spsa.a); }, [](const C& c) { return c.al.spsa.a > 0.0; }},
        {"spsa.A", [](C& c, const std::string& v) { c.al.spsa.A = to_double(v); },
         [](const C& c) { return fmt(c.al.spsa.A); }, [](const C& c) { return c.al.spsa.A >= 0.0; }},
        {"spsa.alpha", [](C& c, const std::string& v) { c.al.spsa.alpha = to_double(v); },
         [](const C& c) { return fmt(c.al.spsa.alpha); }, [](const C& c) { return c.al.spsa.alpha > 0.0; }},
        {"spsa.c", [](C& c, const std::string& v) { c.al.spsa.c = to_double(v); },
         [](const C& c) { return fmt(c.al.spsa.c); }, [](const C& c) { return c.al.spsa.c > 0.0; }},
        {"spsa.gamma", [](C& c, const std::string& v) { c.al.spsa.gamma = to_double(v); },
         [](const C& c) { return fmt(c.al.spsa.gamma); }, [](const C& c) { return c.al.spsa.gamma > 0.0; }},
        {"spsa.iters", [](C& c, const std::string& v) { c.al.spsa.iters = to_int<int>(v); },
         [](const C& c) { return std::to_string(c.al.spsa.iters); }, [](const C& c) { return c.al.spsa.iters >= 0; }},
        {"seed", [](C& c, const std::string& v) { c.seed = to_int<std::uint64_t>(v); },
         [](const C& c) { return std::to_string(c.seed); }, [](const C&) { return true; }},
        {"output_dir", [](C& c, const std::string& v) { c.output_dir = trim(v); },
         [](const C& c) { return c.output_dir; }, [](const C& c) { return !c.output_dir.empty(); }},
    };
    return specs;
}

const KeySpec* find_key(const std::string& name) {
    for (const auto& k : key_specs())
        if (k.name == name) return &k;
    return nullptr;
}

std::string join(const std::vector<std::string>& v) {
    std::string s;
    for (const auto& x : v) s += (s.empty() ? "" : ", ") + x;
    return s;
}

std::filesystem::path fresh_directory(const ExperimentConfig& cfg) {
    namespace fs = std::filesystem;
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char stamp[32];
    std::strftime(stamp, sizeof stamp, "%Y%m%dT%H%M%SZ", &tm);
    const std::string base = cfg.problem + "-" + std::string(cfg.mode == RunMode::agpr ? "agpr" : "reference") + "-" +
                             stamp + "-seed" + std::to_string(cfg.seed);
    fs::create_directories(cfg.output_dir);
    for (int k = 0;; ++k) {
        const fs::path dir = fs::path(cfg.output_dir) / (k == 0 ? base : base + "-" + std::to_string(k));
        if (fs::create_directory(dir)) return dir;
    }
}

std::ofstream open_out(const std::filesystem::path& p) {
    std::ofstream out(p);
    if (!out) throw std::runtime_error("cannot write " + p.string());
    return out;
}

void write_trajectory(const std::filesystem::path& p, const std::vector<GadState>& traj, int d) {
    auto out = open_out(p);
    out << "step";
    for (int i = 0; i < d; ++i) out << ",x" << i;
    for (int i = 0; i < d; ++i) out << ",v" << i;
    out << "\n";
    for (const auto& s : traj) {
        out << s.step;
        for (int i = 0; i < d; ++i) out << "," << fmt(s.x[i]);
        for (int i = 0; i < d; ++i) out << "," << fmt(s.v[i]);
        out << "\n";
    }
}

void write_designs(const std::filesystem::path& p, const std::vector<DesignRecord>& designs, int d, int label_size) {
    auto out = open_out(p);
    out << "update,step";
    for (int i = 0; i < d; ++i) out << ",x" << i;
    if (label_size == 1) out << ",y";
    else
        for (int i = 0; i < label_size; ++i) out << ",y" << i;
    out << "\n";
    for (const auto& rec : designs)
        for (Eigen::Index r = 0; r < rec.points.rows(); ++r) {
            out << rec.update << "," << rec.step;
            for (int i = 0; i < d; ++i) out << "," << fmt(rec.points(r, i));
            for (int i = 0; i < label_size; ++i) out << "," << fmt(rec.labels(r, i));
            out << "\n";
        }
}

json to_json(const Vec& v) { return json(std::vector<double>(v.data(), v.data() + v.size())); }

std::string point_text(const json& arr, const char* spec) {
    std::string s = "(";
    for (std::size_t i = 0; i < arr.size(); ++i) {
        char buf[32];
        std::snprintf(buf, sizeof buf, spec, arr.at(i).get<double>());
        s += (i ? ", " : "") + std::string(buf);
    }
    return s + ")";
}

}  // namespace

const std::vector<std::string>& ExperimentConfig::keys() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> n;
        for (const auto& k : key_specs()) n.push_back(k.name);
        return n;
    }();
    return names;
}

void ExperimentConfig::set(const std::string& key, const std::string& value) {
    const KeySpec* spec = find_key(key);
    if (!spec) throw ConfigError("unknown configuration key: " + key, {key});
    try {
        spec->set(*this, value);
    } catch (const InputError& e) {
        throw ConfigError("invalid value for " + key + ": " + e.what(), {key});
    }
}

void ExperimentConfig::validate() const {
    std::vector<std::string> bad;
    for (const auto& k : key_specs())
        if (!k.valid(*this)) bad.push_back(k.name);
    if (!bad.empty()) throw ConfigError("invalid configuration keys: " + join(bad), bad);
}

ExperimentConfig ExperimentConfig::parse(std::string_view text) {
    ExperimentConfig cfg;
    std::vector<std::string> bad;
    std::vector<std::string> seen;
    std::istringstream in{std::string(text)};
    std::string line;
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        if (trim(line).empty()) continue;
        const auto eq = line.find('=');
        const std::string key = trim(line.substr(0, eq));
        if (eq == std::string::npos || key.empty()) {
            bad.push_back(trim(line));
            continue;
        }
        if (std::find(seen.begin(), seen.end(), key) != seen.end()) {
            bad.push_back(key);
            continue;
        }
        seen.push_back(key);
        try {
            cfg.set(key, line.substr(eq + 1));
        } catch (const ConfigError&) {
            bad.push_back(key);
        }
    }
    try {
        cfg.validate();
    } catch (const ConfigError& e) {
        for (const auto& k : e.keys())
            if (std::find(bad.begin(), bad.end(), k) == bad.end()) bad.push_back(k);
    }
    if (!bad.empty()) throw ConfigError("invalid configuration keys: " + join(bad), bad);
    return cfg;
}

ExperimentConfig ExperimentConfig::load(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw std::runtime_error("cannot read " + file.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse(ss.str());
}

std::map<std::string, std::string> ExperimentConfig::resolved() const {
    std::map<std::string, std::string> m;
    for (const auto& k : key_specs()) m[k.name] = k.get(*this);
    return m;
}

std::string ExperimentConfig::to_text() const {
    std::string s;
    for (const auto& k : key_specs()) s += k.name + " = " + k.get(*this) + "\n";
    return s;
}

ExperimentOutcome execute(const ExperimentConfig& cfg) {
    cfg.validate();
    const Problem problem = make_problem(cfg.problem);
    const int d = problem.dim();
    GadState start{cfg.start, cfg.v0 ? Vec(cfg.v0->normalized()) : default_direction(d, derive_seed(cfg.seed, "v0")), 0};

    ExperimentOutcome out;
    const auto t0 = std::chrono::steady_clock::now();
    if (cfg.mode == RunMode::agpr) {
        out.result = run_agpr_gad(problem, start, cfg.gad, cfg.al, cfg.seed);
    } else {
        Rng noise(derive_seed(cfg.seed, "noise"));
        const DerivativeProvider provider = [&](const Vec& x) {
            return observed_derivatives(problem, x, cfg.al.noise_var, noise);
        };
        try {
            out.result = run_reference_gad(provider, start, cfg.gad);
        } catch (const GadDivergenceError& e) {
            out.result.trajectory = e.trajectory();
            out.result.x_sp = e.trajectory().back().x;
            out.result.cost = static_cast<long>(e.trajectory().size());
            out.result.stop_reason = "diverged";
        }
    }
    out.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    out.evaluations = problem.eval_count();
    return out;
}

ExperimentOutcome run_experiment(const ExperimentConfig& cfg) {
    cfg.validate();
    ExperimentOutcome out = execute(cfg);
    const int d = static_cast<int>(cfg.start.size());
    out.directory = fresh_directory(cfg);

    write_trajectory(out.directory / "trajectory.csv", out.result.trajectory, d);
    if (cfg.mode == RunMode::agpr) {
        const int label_size = out.result.designs.empty() ? 1 : static_cast<int>(out.result.designs.front().labels.cols());
        write_designs(out.directory / "designs.csv", out.result.designs, d, label_size);
    }

    json report;
    report["problem"] = cfg.problem;
    report["mode"] = cfg.mode == RunMode::agpr ? "agpr" : "reference";
    report["start"] = to_json(cfg.start);
    report["x_sp"] = to_json(out.result.x_sp);
    report["converged"] = out.result.converged;
    report["stop_reason"] = out.result.stop_reason;
    report["cost"] = out.result.cost;
    report["evaluations"] = out.evaluations;
    report["updates"] = out.result.updates;
    report["steps"] = out.result.trajectory.empty() ? 0 : out.result.trajectory.back().step;
    report["wall_time_s"] = out.wall_seconds;
    report["seed"] = cfg.seed;
    json resolved = json::object();
    for (const auto& [k, v] : cfg.resolved()) resolved[k] = v;
    report["config"] = resolved;
    auto f = open_out(out.directory / "report.json");
    f << report.dump(2) << "\n";
    return out;
}

void emit_table(const std::vector<std::filesystem::path>& reports, std::ostream& out) {
    struct Row {
        std::string problem, line;
    };
    std::vector<Row> rows;
    std::vector<std::string> warnings;
    for (const auto& path : reports) {
        try {
            std::ifstream in(path);
            if (!in) throw std::runtime_error("cannot read file");
            const json r = json::parse(in);
            const std::string mode = r.at("mode").get<std::string>();
            const std::string method = mode == "agpr" ? "aGPR-GAD" : mode == "reference" ? "GAD" : throw std::runtime_error("unknown mode");
            const std::string line = r.at("problem").get<std::string>() + ",\"" + point_text(r.at("start"), "%.2f") +
                                     "\"," + method + ",\"" + point_text(r.at("x_sp"), "%.4f") + "\"," +
                                     std::to_string(r.at("cost").get<long>());
            rows.push_back({r.at("problem").get<std::string>(), line});
        } catch (const std::exception& e) {
            warnings.push_back(path.string() + ": " + e.what());
        }
    }
    std::stable_sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) { return a.problem < b.problem; });
    out << "problem,initial_point,method,x_sp,cost\n";
    for (const auto& r : rows) out << r.line << "\n";
    for (const auto& w : warnings) out << "# warning: skipped " << w << "\n";
}

}  // namespace gpgad

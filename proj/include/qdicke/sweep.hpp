// sweep.hpp — parameter-grid sweeps, figure data, oracle comparison tables and their
// CSV / JSON-lines serialization

#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <mutex>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "qdicke/finite_size.hpp"
#include "qdicke/keyvalue.hpp"
#include "qdicke/meanfield.hpp"
#include "qdicke/model.hpp"
#include "qdicke/spectrum.hpp"

namespace qdicke {

inline constexpr const char* kToolName = "qdicke";
inline constexpr const char* kToolVersion = "1.0.0";
inline constexpr const char* kWorkersEnv = "QDICKE_WORKERS";

/// Invalid sweep/figure/oracle request; `fields` names every offending input.
class SpecError : public std::invalid_argument {
public:
    explicit SpecError(std::vector<std::string> f)
        : std::invalid_argument(join(f)), fields(std::move(f)) {}
    std::vector<std::string> fields;

private:
    static std::string join(const std::vector<std::string>& f) {
        std::string s = "invalid spec:";
        for (const auto& x : f) s += " " + x + ";";
        return s;
    }
};

// ---------------------------------------------------------------------------------------
// Worker pool

inline int default_workers() {
    if (const char* env = std::getenv(kWorkersEnv)) {
        try {
            const int n = std::stoi(env);
            if (n >= 1) return n;
        } catch (const std::exception&) {
        }
    }
    return int(std::max(1u, std::thread::hardware_concurrency()));
}

/// Runs fn(i) for i in [0, count) on `workers` threads. The first exception is rethrown.
inline void parallel_for(std::size_t count, int workers, const std::function<void(std::size_t)>& fn) {
    workers = std::max(1, std::min<int>(workers, int(std::max<std::size_t>(count, 1))));
    if (workers == 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < count; i = next++) {
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard lock(error_mutex);
                    if (!error) error = std::current_exception();
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

// ---------------------------------------------------------------------------------------
// CSV helpers

namespace csv {

inline std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}
inline std::string opt(const std::optional<double>& v) { return v ? num(*v) : std::string(); }
inline std::string opt(const std::optional<bool>& v) {
    return v ? std::string(*v ? "true" : "false") : std::string();
}
inline std::string opt(const std::optional<int>& v) { return v ? std::to_string(*v) : std::string(); }
inline std::string opt(const std::optional<std::string>& v) { return v.value_or(std::string()); }

inline void row(std::ostream& os, const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) os << (i ? "," : "") << cells[i];
    os << '\n';
}

} // namespace csv

// 64-bit FNV-1a; stable across platforms, used only to fingerprint specs.
inline std::string fnv1a_hex(const std::string& s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

inline std::string utc_timestamp() {
    const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

// ---------------------------------------------------------------------------------------
// Sweep specification

enum class Task { Phase, OrderParams, Landscape, Spectrum, Derivatives, ExactDiag };

inline const char* task_name(Task t) {
    switch (t) {
    case Task::Phase: return "phase";
    case Task::OrderParams: return "order_params";
    case Task::Landscape: return "landscape";
    case Task::Spectrum: return "spectrum";
    case Task::Derivatives: return "derivatives";
    case Task::ExactDiag: return "exact_diag";
    }
    return "?";
}

inline std::optional<Task> task_from_name(const std::string& s) {
    for (Task t : {Task::Phase, Task::OrderParams, Task::Landscape, Task::Spectrum,
                   Task::Derivatives, Task::ExactDiag})
        if (s == task_name(t)) return t;
    return std::nullopt;
}

struct Axis {
    double min{0.0};
    double max{2.0};
    int steps{101};

    double at(int i) const { return min + (max - min) * double(i) / double(steps - 1); }
};

struct SweepSpec {
    Axis omega_E;
    Axis omega_M;
    double omega{1.0};
    double omega0{1.0};
    int n_spins{1};
    std::set<Task> tasks;
    std::string output{"sweep.csv"};
    std::string manifest;          // defaults to <output>.manifest.jsonl
    int workers{1};
    int landscape_steps{51};
    double derivative_step{1e-4};  // times omega
    int ed_cutoff_factor{4};

    std::string manifest_path() const {
        return manifest.empty() ? output + ".manifest.jsonl" : manifest;
    }

    void validate() const {
        std::vector<std::string> bad;
        auto check_axis = [&](const Axis& a, const std::string& name) {
            if (a.steps < 2) bad.push_back(name + "_steps: need >= 2");
            if (!(a.max > a.min)) bad.push_back(name + "_min/max: empty range");
            if (!(a.min >= 0.0)) bad.push_back(name + "_min: couplings must be >= 0");
        };
        check_axis(omega_E, "omega_e");
        check_axis(omega_M, "omega_m");
        if (!(omega > 0.0)) bad.push_back("omega: must be > 0");
        if (!(omega0 > 0.0)) bad.push_back("omega0: must be > 0");
        if (n_spins < 1) bad.push_back("n_spins: must be >= 1");
        if (tasks.empty()) bad.push_back("tasks: empty task set");
        if (workers < 1) bad.push_back("workers: must be >= 1");
        if (landscape_steps < 2) bad.push_back("landscape_steps: need >= 2");
        if (!(derivative_step > 0.0)) bad.push_back("derivative_step: must be > 0");
        if (ed_cutoff_factor < 1) bad.push_back("ed_cutoff_factor: must be >= 1");
        if (output.empty()) bad.push_back("output: empty path");
        if (!bad.empty()) throw SpecError(bad);
    }

    // Everything that determines the data; output paths and worker count are excluded.
    nlohmann::json canonical() const {
        nlohmann::json t = nlohmann::json::array();
        for (Task k : tasks) t.push_back(task_name(k));
        return {{"omega_e", {omega_E.min, omega_E.max, omega_E.steps}},
                {"omega_m", {omega_M.min, omega_M.max, omega_M.steps}},
                {"omega", omega},
                {"omega0", omega0},
                {"n_spins", n_spins},
                {"tasks", t},
                {"landscape_steps", landscape_steps},
                {"derivative_step", derivative_step},
                {"ed_cutoff_factor", ed_cutoff_factor}};
    }

    std::string hash() const { return fnv1a_hex(canonical().dump()); }
};

/// Applies a key-value document onto `spec`; unknown keys and malformed values are collected
/// into one SpecError.
inline void apply_document(SweepSpec& spec, const kv::Document& doc) {
    std::vector<std::string> bad;
    for (const auto& [key, value] : doc) {
        try {
            if (key == "omega_e_min") spec.omega_E.min = kv::to_double(key, value);
            else if (key == "omega_e_max") spec.omega_E.max = kv::to_double(key, value);
            else if (key == "omega_e_steps") spec.omega_E.steps = kv::to_int(key, value);
            else if (key == "omega_m_min") spec.omega_M.min = kv::to_double(key, value);
            else if (key == "omega_m_max") spec.omega_M.max = kv::to_double(key, value);
            else if (key == "omega_m_steps") spec.omega_M.steps = kv::to_int(key, value);
            else if (key == "omega") spec.omega = kv::to_double(key, value);
            else if (key == "omega0") spec.omega0 = kv::to_double(key, value);
            else if (key == "n_spins") spec.n_spins = kv::to_int(key, value);
            else if (key == "output") spec.output = value;
            else if (key == "manifest") spec.manifest = value;
            else if (key == "workers") spec.workers = kv::to_int(key, value);
            else if (key == "landscape_steps") spec.landscape_steps = kv::to_int(key, value);
            else if (key == "derivative_step") spec.derivative_step = kv::to_double(key, value);
            else if (key == "ed_cutoff_factor") spec.ed_cutoff_factor = kv::to_int(key, value);
            else if (key == "tasks") {
                spec.tasks.clear();
                for (const auto& name : kv::split_list(value)) {
                    if (auto t = task_from_name(name)) spec.tasks.insert(*t);
                    else bad.push_back("tasks: unknown task " + name);
                }
            } else bad.push_back(key + ": unknown key");
        } catch (const std::invalid_argument& e) {
            bad.push_back(e.what());
        }
    }
    if (!bad.empty()) throw SpecError(bad);
}

// ---------------------------------------------------------------------------------------
// Rows

/// One grid point. Fields of tasks that were not requested stay empty.
struct ResultRow {
    double omega_E{0.0};
    double omega_M{0.0};
    std::optional<std::string> phase;
    std::optional<double> alpha_abs;  // |alpha| / sqrt(N)
    std::optional<double> beta_abs;   // |beta| / sqrt(N)
    std::optional<double> beta_arg;
    std::optional<double> energy;     // min E_G / N
    std::optional<double> eps_minus;
    std::optional<double> eps_plus;
    std::optional<bool> goldstone;
    std::optional<bool> critical;
    std::optional<bool> amplitude;
    std::optional<double> dE_dOmegaE;
    std::optional<double> dE_dOmegaM;
    std::optional<double> d2E_dOmegaE2;
    std::optional<double> d2E_dOmegaM2;
    std::optional<double> landscape_min_energy;
    std::optional<int> landscape_min_cells;
    std::optional<int> ed_fock_cutoff;
    std::optional<double> ed_energy_per_spin;
    std::optional<double> ed_gap;
    std::optional<double> ed_parity_splitting;
};

inline const std::vector<std::string>& result_header() {
    static const std::vector<std::string> h{
        "omega_E", "omega_M", "phase", "alpha_abs", "beta_abs", "beta_arg", "energy",
        "eps_minus", "eps_plus", "goldstone", "critical", "amplitude", "dE_dOmegaE",
        "dE_dOmegaM", "d2E_dOmegaE2", "d2E_dOmegaM2", "landscape_min_energy",
        "landscape_min_cells", "ed_fock_cutoff", "ed_energy_per_spin", "ed_gap",
        "ed_parity_splitting"};
    return h;
}

inline void write_row(std::ostream& os, const ResultRow& r) {
    using csv::num;
    using csv::opt;
    csv::row(os, {num(r.omega_E), num(r.omega_M), opt(r.phase), opt(r.alpha_abs),
                  opt(r.beta_abs), opt(r.beta_arg), opt(r.energy), opt(r.eps_minus),
                  opt(r.eps_plus), opt(r.goldstone), opt(r.critical), opt(r.amplitude),
                  opt(r.dE_dOmegaE), opt(r.dE_dOmegaM), opt(r.d2E_dOmegaE2),
                  opt(r.d2E_dOmegaM2), opt(r.landscape_min_energy), opt(r.landscape_min_cells),
                  opt(r.ed_fock_cutoff), opt(r.ed_energy_per_spin), opt(r.ed_gap),
                  opt(r.ed_parity_splitting)});
}

struct EnergyDerivatives {
    double d_E{0.0}, d_M{0.0}, d2_E{0.0}, d2_M{0.0};
};

/// Central differences of min E_G / N in each coupling. The energy depends on the couplings
/// only through their squares, so steps below zero are reflected.
inline EnergyDerivatives energy_derivatives(const ModelParams& p, double step) {
    auto e = [&](double dE, double dM) {
        ModelParams q = p;
        q.omega_E = std::abs(p.omega_E + dE);
        q.omega_M = std::abs(p.omega_M + dM);
        return minimum_energy_per_spin(q);
    };
    const double h = step * p.omega;
    const double e0 = e(0, 0);
    const double ep = e(h, 0), em = e(-h, 0), mp = e(0, h), mm = e(0, -h);
    return {(ep - em) / (2 * h), (mp - mm) / (2 * h), (ep - 2 * e0 + em) / (h * h),
            (mp - 2 * e0 + mm) / (h * h)};
}

inline ResultRow compute_row(const SweepSpec& spec, double oe, double om) {
    ResultRow r;
    r.omega_E = oe;
    r.omega_M = om;
    const ModelParams p{spec.omega, spec.omega0, oe, om, spec.n_spins};
    const auto has = [&](Task t) { return spec.tasks.count(t) > 0; };

    if (has(Task::Phase)) r.phase = std::string(phase_name(classify_phase(p)));
    if (has(Task::OrderParams)) {
        const auto sol = analytic_order_parameters(p);
        const auto& m = sol.minima.front();
        r.alpha_abs = std::abs(m.alpha_scaled());
        r.beta_abs = std::abs(m.beta_scaled());
        r.beta_arg = std::abs(m.beta) > 0.0 ? std::arg(m.beta) : 0.0;
        r.energy = sol.energy_per_spin();
    }
    if (has(Task::Spectrum)) {
        const auto s = polariton_energies(p);
        const auto f = mode_flags(p, s);
        r.eps_minus = s.eps_minus;
        r.eps_plus = s.eps_plus;
        r.goldstone = f.goldstone;
        r.critical = f.critical;
        r.amplitude = f.amplitude;
    }
    if (has(Task::Derivatives)) {
        const auto d = energy_derivatives(p, spec.derivative_step);
        r.dE_dOmegaE = d.d_E;
        r.dE_dOmegaM = d.d_M;
        r.d2E_dOmegaE2 = d.d2_E;
        r.d2E_dOmegaM2 = d.d2_M;
    }
    if (has(Task::Landscape)) {
        const auto g = landscape(p, {spec.landscape_steps, spec.landscape_steps, 1.0});
        r.landscape_min_energy = g.min_energy();
        r.landscape_min_cells = int(g.min_cells().size());
    }
    if (has(Task::ExactDiag)) {
        CutoffOptions co;
        co.initial_factor = spec.ed_cutoff_factor;
        const auto cs = converged_spectrum(p, co);
        r.ed_fock_cutoff = cs.fock_cutoff;
        r.ed_energy_per_spin = cs.spectrum.energy_per_spin;
        r.ed_gap = cs.spectrum.gap;
        r.ed_parity_splitting = cs.spectrum.parity_splitting();
    }
    return r;
}

inline nlohmann::json tolerance_record() {
    const MinimizerOptions mo;
    const TransitionOptions to;
    return {{"tol_sym", kSymmetryTolerance},
            {"gapless", kGaplessTolerance},
            {"negative_eps2_clamp", kNegativeEps2Clamp},
            {"minimizer_gradient", mo.gradient_tol},
            {"minimizer_dedupe", mo.dedupe_distance},
            {"transition_step", to.step},
            {"transition_first_threshold", to.first_threshold},
            {"transition_second_threshold", to.second_threshold},
            {"ed_residual", kResidualTolerance},
            {"ed_degeneracy", kDegeneracyTolerance},
            {"ed_cutoff_rel_tol", CutoffOptions{}.rel_tol}};
}

struct SweepResult {
    std::vector<ResultRow> rows;  // omega_E outer, omega_M inner
    nlohmann::json manifest;
};

/// Evaluates every grid point; rows come back in row-major (omega_E outer) order regardless
/// of the worker count.
inline SweepResult run_sweep(const SweepSpec& spec) {
    spec.validate();
    const std::size_t nE = std::size_t(spec.omega_E.steps);
    const std::size_t nM = std::size_t(spec.omega_M.steps);
    SweepResult res;
    res.rows.resize(nE * nM);
    parallel_for(nE * nM, spec.workers, [&](std::size_t i) {
        res.rows[i] = compute_row(spec, spec.omega_E.at(int(i / nM)), spec.omega_M.at(int(i % nM)));
    });
    nlohmann::json tasks = nlohmann::json::array();
    for (Task t : spec.tasks) tasks.push_back(task_name(t));
    res.manifest = {{"tool", kToolName},
                    {"version", kToolVersion},
                    {"kind", "sweep"},
                    {"spec_hash", spec.hash()},
                    {"spec", spec.canonical()},
                    {"tasks", tasks},
                    {"rows", res.rows.size()},
                    {"tolerances", tolerance_record()},
                    {"timestamp", utc_timestamp()}};
    return res;
}

inline void write_sweep_csv(std::ostream& os, const std::vector<ResultRow>& rows) {
    csv::row(os, result_header());
    for (const auto& r : rows) write_row(os, r);
}

namespace detail {

inline std::ofstream open_output(const std::string& path) {
    const std::filesystem::path p(path);
    if (p.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(p.parent_path(), ec);
    }
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot write " + path);
    return os;
}

inline void write_manifest(const std::string& path, const nlohmann::json& m) {
    auto os = open_output(path);
    os << m.dump() << '\n';
    if (!os) throw std::runtime_error("cannot write " + path);
}

} // namespace detail

/// Runs the sweep and writes the CSV and its manifest.
inline SweepResult run_sweep_to_files(const SweepSpec& spec) {
    auto res = run_sweep(spec);
    {
        auto os = detail::open_output(spec.output);
        write_sweep_csv(os, res.rows);
        if (!os) throw std::runtime_error("cannot write " + spec.output);
    }
    detail::write_manifest(spec.manifest_path(), res.manifest);
    return res;
}

// ---------------------------------------------------------------------------------------
// Figure data

inline const std::vector<std::string>& figure_names() {
    static const std::vector<std::string> n{"symmetry_diagram", "phase_diagram", "landscape_a",
                                            "landscape_b",      "landscape_c",   "landscape_d",
                                            "derivatives",      "polariton_lower",
                                            "polariton_upper"};
    return n;
}

struct FigureOptions {
    std::string out_dir{"."};
    int steps{101};            // per coupling axis
    double max_coupling{2.0};  // couplings span [0, max] in units of omega
    int landscape_steps{201};
    int n_spins{1};
    int workers{1};
};

// Resonant parameters (omega = omega0 = 1, critical coupling 0.5) of the four landscape panels.
inline ModelParams landscape_panel(char panel, int n_spins = 1) {
    switch (panel) {
    case 'a': return {1.0, 1.0, 0.1, 0.3, n_spins};
    case 'b': return {1.0, 1.0, 1.0, 1.0, n_spins};
    case 'c': return {1.0, 1.0, 1.0, 1.5, n_spins};
    case 'd': return {1.0, 1.0, 1.5, 1.0, n_spins};
    default: throw std::invalid_argument(std::string("unknown landscape panel ") + panel);
    }
}

inline void write_landscape_csv(std::ostream& os, const LandscapeGrid& g) {
    csv::row(os, {"re_beta", "im_beta", "energy"});
    for (std::size_t i = 0; i < g.re_beta_axis.size(); ++i)
        for (std::size_t j = 0; j < g.im_beta_axis.size(); ++j)
            csv::row(os, {csv::num(g.re_beta_axis[i]), csv::num(g.im_beta_axis[j]),
                          g.valid(i, j) ? csv::num(g.at(i, j)) : std::string()});
}

/// Writes <out_dir>/<name>.csv and <name>.manifest.jsonl; returns the CSV path.
inline std::string reproduce_figure(const std::string& name, const FigureOptions& opt = {}) {
    if (std::find(figure_names().begin(), figure_names().end(), name) == figure_names().end())
        throw SpecError({"figure: unknown name " + name});
    std::vector<std::string> bad;
    if (opt.steps < 2) bad.push_back("steps: need >= 2");
    if (!(opt.max_coupling > 0.0)) bad.push_back("max_coupling: must be > 0");
    if (opt.landscape_steps < 2) bad.push_back("landscape_steps: need >= 2");
    if (opt.n_spins < 1) bad.push_back("n_spins: must be >= 1");
    if (!bad.empty()) throw SpecError(bad);

    const std::string path = (std::filesystem::path(opt.out_dir) / (name + ".csv")).string();
    nlohmann::json manifest = {{"tool", kToolName},   {"version", kToolVersion},
                               {"kind", "figure"},    {"figure", name},
                               {"omega", 1.0},        {"omega0", 1.0},
                               {"omega_cr", 0.5},     {"n_spins", opt.n_spins},
                               {"tolerances", tolerance_record()}};
    auto os = detail::open_output(path);

    if (name.rfind("landscape_", 0) == 0) {
        const auto p = landscape_panel(name.back(), opt.n_spins);
        write_landscape_csv(os, landscape(p, {opt.landscape_steps, opt.landscape_steps, 1.0}));
        manifest["omega_E"] = p.omega_E;
        manifest["omega_M"] = p.omega_M;
        manifest["phase"] = phase_name(classify_phase(p));
    } else {
        SweepSpec spec;
        spec.omega_E = spec.omega_M = Axis{0.0, opt.max_coupling, opt.steps};
        spec.n_spins = opt.n_spins;
        spec.workers = opt.workers;
        std::vector<std::string> header{"omega_E", "omega_M"};
        if (name == "symmetry_diagram") {
            spec.tasks = {Task::Phase};
            header.insert(header.end(), {"symmetry", "broken", "phase"});
        } else if (name == "phase_diagram") {
            spec.tasks = {Task::Phase, Task::OrderParams};
            header.insert(header.end(), {"phase", "alpha_abs", "beta_abs", "energy"});
        } else if (name == "derivatives") {
            spec.tasks = {Task::Derivatives};
            header.insert(header.end(), {"dE_dOmegaE", "dE_dOmegaM", "d2E_dOmegaE2", "d2E_dOmegaM2"});
        } else {
            spec.tasks = {Task::Spectrum, Task::Phase};
            if (name == "polariton_lower") header.insert(header.end(), {"eps_minus", "goldstone", "critical"});
            else header.insert(header.end(), {"eps_plus", "amplitude"});
        }
        manifest["grid"] = {{"min", 0.0}, {"max", opt.max_coupling}, {"steps", opt.steps}};
        const auto res = run_sweep(spec);
        csv::row(os, header);
        for (const auto& r : res.rows) {
            std::vector<std::string> c{csv::num(r.omega_E), csv::num(r.omega_M)};
            if (name == "symmetry_diagram") {
                const Phase ph = phase_from_name(*r.phase);
                const bool u1 = std::abs(r.omega_E - r.omega_M) <= kSymmetryTolerance;
                const char* broken = ph == Phase::Normal     ? "none"
                                     : ph == Phase::Electric ? "T_E"
                                     : ph == Phase::Magnetic ? "T_M"
                                                             : "U1";
                c.insert(c.end(), {u1 ? "U1" : "Z2", broken, *r.phase});
            } else if (name == "phase_diagram") {
                c.insert(c.end(), {*r.phase, csv::opt(r.alpha_abs), csv::opt(r.beta_abs), csv::opt(r.energy)});
            } else if (name == "derivatives") {
                c.insert(c.end(), {csv::opt(r.dE_dOmegaE), csv::opt(r.dE_dOmegaM),
                                   csv::opt(r.d2E_dOmegaE2), csv::opt(r.d2E_dOmegaM2)});
            } else if (name == "polariton_lower") {
                c.insert(c.end(), {csv::opt(r.eps_minus), csv::opt(r.goldstone), csv::opt(r.critical)});
            } else {
                c.insert(c.end(), {csv::opt(r.eps_plus), csv::opt(r.amplitude)});
            }
            csv::row(os, c);
        }
    }
    if (!os) throw std::runtime_error("cannot write " + path);
    manifest["timestamp"] = utc_timestamp();
    detail::write_manifest(
        (std::filesystem::path(opt.out_dir) / (name + ".manifest.jsonl")).string(), manifest);
    return path;
}

// ---------------------------------------------------------------------------------------
// ED vs mean-field comparison

struct OracleRow {
    double omega_E{0.0};
    double omega_M{0.0};
    std::string phase;
    int n_spins{0};
    std::optional<ConvergenceRow> row;
    double eps_minus{0.0};
    std::string error;
    std::string verdict;  // per point: pass / fail / error
};

struct OracleOptions {
    double omega{1.0};
    double omega0{1.0};
    CutoffOptions cutoff;
    int workers{1};
};

/// ED energy density and gap against mean field for every (point, N). Solver failures are
/// recorded per row and do not stop the run.
inline std::vector<OracleRow> oracle_report(const std::vector<std::array<double, 2>>& points,
                                            const std::vector<int>& n_list,
                                            const OracleOptions& opt = {}) {
    std::vector<std::string> bad;
    if (points.empty()) bad.push_back("points: empty");
    if (n_list.empty()) bad.push_back("n_list: empty");
    if (!std::is_sorted(n_list.begin(), n_list.end()) ||
        std::adjacent_find(n_list.begin(), n_list.end()) != n_list.end())
        bad.push_back("n_list: must be strictly ascending");
    for (int n : n_list)
        if (n < 1) bad.push_back("n_list: N must be >= 1");
    if (!(opt.omega > 0.0) || !(opt.omega0 > 0.0)) bad.push_back("omega/omega0: must be > 0");
    for (const auto& pt : points)
        if (!(pt[0] >= 0.0) || !(pt[1] >= 0.0)) bad.push_back("points: couplings must be >= 0");
    if (!bad.empty()) throw SpecError(bad);

    std::vector<OracleRow> rows(points.size() * n_list.size());
    parallel_for(rows.size(), opt.workers, [&](std::size_t i) {
        const auto& pt = points[i / n_list.size()];
        const int n = n_list[i % n_list.size()];
        const ModelParams p{opt.omega, opt.omega0, pt[0], pt[1], n};
        OracleRow& r = rows[i];
        r.omega_E = pt[0];
        r.omega_M = pt[1];
        r.n_spins = n;
        r.phase = std::string(phase_name(classify_phase(p)));
        r.eps_minus = polariton_energies(p).eps_minus;
        try {
            r.row = convergence_row(p, n, opt.cutoff);
        } catch (const std::exception& e) {
            r.error = e.what();
        }
    });

    for (std::size_t k = 0; k < points.size(); ++k) {
        const auto first = rows.begin() + std::ptrdiff_t(k * n_list.size());
        const auto last = first + std::ptrdiff_t(n_list.size());
        std::string verdict;
        if (std::any_of(first, last, [](const OracleRow& r) { return !r.row; })) {
            verdict = "error";
        } else {
            ConvergenceTable t;
            t.params = {opt.omega, opt.omega0, points[k][0], points[k][1], n_list.front()};
            t.phase = classify_phase(t.params);
            for (auto it = first; it != last; ++it) t.rows.push_back(*it->row);
            assess_convergence(t);
            verdict = t.passed() ? "pass" : "fail";
        }
        for (auto it = first; it != last; ++it) it->verdict = verdict;
    }
    return rows;
}

inline void write_oracle_csv(std::ostream& os, const std::vector<OracleRow>& rows) {
    csv::row(os, {"omega_E", "omega_M", "phase", "N", "fock_cutoff", "E0_per_N", "EMF_per_N",
                  "deviation", "gap", "eps_minus", "parity_splitting", "verdict", "error"});
    for (const auto& r : rows) {
        auto f = [&](auto member) {
            return r.row ? csv::num((*r.row).*member) : std::string();
        };
        std::string err = r.error;
        std::replace(err.begin(), err.end(), ',', ';');
        csv::row(os, {csv::num(r.omega_E), csv::num(r.omega_M), r.phase, std::to_string(r.n_spins),
                      r.row ? std::to_string(r.row->fock_cutoff) : std::string(),
                      f(&ConvergenceRow::energy_per_spin), f(&ConvergenceRow::meanfield_per_spin),
                      f(&ConvergenceRow::deviation), f(&ConvergenceRow::gap),
                      csv::num(r.eps_minus), f(&ConvergenceRow::parity_splitting), r.verdict, err});
    }
}

} // namespace qdicke

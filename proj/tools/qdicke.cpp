// qdicke — batch front-end: sweeps, figure data, ED oracle reports and circuit mapping

#include <array>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qdicke/qdicke.hpp"

namespace {

enum ExitCode { kOk = 0, kFailure = 1, kValidation = 2, kSolver = 3 };

std::vector<std::array<double, 2>> parse_points(const std::vector<std::string>& raw) {
    std::vector<std::array<double, 2>> pts;
    for (const auto& s : raw) {
        const auto v = qdicke::kv::to_doubles("point", s);
        if (v.size() != 2) throw qdicke::SpecError({"point: expected omega_E,omega_M, got " + s});
        pts.push_back({v[0], v[1]});
    }
    return pts;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Two-quadrature Dicke model: phase diagram, spectra, ED oracle, circuit mapping"};
    app.require_subcommand(1);
    app.set_version_flag("--version", qdicke::kToolVersion);

    // sweep
    auto* sweep = app.add_subcommand("sweep", "Evaluate tasks over an (omega_E, omega_M) grid");
    std::string spec_file;
    std::vector<double> e_range, m_range;
    int e_steps = 0, m_steps = 0, n_spins = 0, workers = 0, landscape_steps = 0;
    double omega = 0.0, omega0 = 0.0;
    std::string tasks, output, manifest;
    sweep->add_option("--spec", spec_file, "Key-value spec file (flags override it)")->check(CLI::ExistingFile);
    auto* o_er = sweep->add_option("--omega-e-range", e_range, "min,max of omega_E")->delimiter(',')->expected(2);
    auto* o_mr = sweep->add_option("--omega-m-range", m_range, "min,max of omega_M")->delimiter(',')->expected(2);
    auto* o_es = sweep->add_option("--omega-e-steps", e_steps, "grid points along omega_E");
    auto* o_ms = sweep->add_option("--omega-m-steps", m_steps, "grid points along omega_M");
    auto* o_w = sweep->add_option("--omega", omega, "boson frequency");
    auto* o_w0 = sweep->add_option("--omega0", omega0, "two-level frequency");
    auto* o_n = sweep->add_option("-N,--n-spins", n_spins, "number of two-level systems");
    auto* o_t = sweep->add_option("--tasks", tasks,
                                  "comma list of phase,order_params,landscape,spectrum,derivatives,exact_diag");
    auto* o_out = sweep->add_option("-o,--output", output, "CSV output path");
    auto* o_man = sweep->add_option("--manifest", manifest, "manifest path (default <output>.manifest.jsonl)");
    auto* o_workers = sweep->add_option("-j,--workers", workers, "worker threads (default $QDICKE_WORKERS or all cores)");
    auto* o_ls = sweep->add_option("--landscape-steps", landscape_steps, "landscape grid points per axis");

    // figure
    auto* figure = app.add_subcommand("figure", "Write the data behind one figure");
    std::string fig_name;
    qdicke::FigureOptions fig;
    figure->add_option("name", fig_name, "figure name")->required();
    figure->add_option("--out-dir", fig.out_dir, "output directory");
    figure->add_option("--steps", fig.steps, "grid points per coupling axis");
    figure->add_option("--max-coupling", fig.max_coupling, "largest coupling (units of omega)");
    figure->add_option("--landscape-steps", fig.landscape_steps, "landscape grid points per axis");
    figure->add_option("-N,--n-spins", fig.n_spins, "number of two-level systems");
    auto* f_workers = figure->add_option("-j,--workers", fig.workers, "worker threads");

    // oracle
    auto* oracle = app.add_subcommand("oracle", "Compare exact diagonalization with mean field");
    std::vector<std::string> points_raw{"0.1,0.3", "1,0", "1,1"};
    std::vector<int> n_list{4, 8, 12, 16};
    qdicke::OracleOptions oopt;
    std::string oracle_out = "-";
    oracle->add_option("--point", points_raw, "omega_E,omega_M (repeatable)");
    oracle->add_option("--n-list", n_list, "ascending N values")->delimiter(',');
    oracle->add_option("--omega", oopt.omega, "boson frequency");
    oracle->add_option("--omega0", oopt.omega0, "two-level frequency");
    oracle->add_option("--cutoff-tol", oopt.cutoff.rel_tol, "relative E0 change accepted on cutoff growth");
    auto* or_workers = oracle->add_option("-j,--workers", oopt.workers, "worker threads");
    oracle->add_option("-o,--output", oracle_out, "CSV output path ('-' for stdout)");

    // circuit
    auto* circ = app.add_subcommand("circuit", "Map a circuit description onto model parameters");
    std::string circuit_file;
    std::string circuit_out = "-";
    int n_atoms = 0;
    double kappa_q = -1.0, kappa_l = -1.0, ratio = -1.0;
    circ->add_option("file", circuit_file, "key-value circuit document")->required()->check(CLI::ExistingFile);
    auto* c_n = circ->add_option("--n-atoms", n_atoms, "number of identical artificial atoms");
    auto* c_kq = circ->add_option("--kappa-q", kappa_q, "g_E = kappa_Q G_Q / hbar");
    auto* c_kl = circ->add_option("--kappa-l", kappa_l, "g_M = kappa_L G_L / hbar");
    auto* c_r = circ->add_option("--validity-ratio", ratio, "threshold for C_r >> C_g, C_J and L_r >> L_1, L_2");
    circ->add_option("-o,--output", circuit_out, "JSON report path ('-' for stdout)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (sweep->parsed()) {
            qdicke::SweepSpec spec;
            spec.workers = qdicke::default_workers();
            if (!spec_file.empty()) qdicke::apply_document(spec, qdicke::kv::parse_file(spec_file));
            if (o_er->count()) { spec.omega_E.min = e_range[0]; spec.omega_E.max = e_range[1]; }
            if (o_mr->count()) { spec.omega_M.min = m_range[0]; spec.omega_M.max = m_range[1]; }
            if (o_es->count()) spec.omega_E.steps = e_steps;
            if (o_ms->count()) spec.omega_M.steps = m_steps;
            if (o_w->count()) spec.omega = omega;
            if (o_w0->count()) spec.omega0 = omega0;
            if (o_n->count()) spec.n_spins = n_spins;
            if (o_out->count()) spec.output = output;
            if (o_man->count()) spec.manifest = manifest;
            if (o_workers->count()) spec.workers = workers;
            if (o_ls->count()) spec.landscape_steps = landscape_steps;
            if (o_t->count()) {
                qdicke::kv::Document d{{"tasks", tasks}};
                qdicke::apply_document(spec, d);
            }
            const auto res = qdicke::run_sweep_to_files(spec);
            std::cerr << "wrote " << res.rows.size() << " rows to " << spec.output << " (spec "
                      << spec.hash() << ")\n";
        } else if (figure->parsed()) {
            if (!f_workers->count()) fig.workers = qdicke::default_workers();
            std::cerr << "wrote " << qdicke::reproduce_figure(fig_name, fig) << '\n';
        } else if (oracle->parsed()) {
            if (!or_workers->count()) oopt.workers = qdicke::default_workers();
            const auto rows = qdicke::oracle_report(parse_points(points_raw), n_list, oopt);
            bool all_pass = true;
            for (const auto& r : rows) all_pass = all_pass && r.verdict == "pass";
            if (oracle_out == "-") {
                qdicke::write_oracle_csv(std::cout, rows);
            } else {
                std::ofstream os(oracle_out);
                if (!os) throw std::runtime_error("cannot write " + oracle_out);
                qdicke::write_oracle_csv(os, rows);
            }
            if (!all_pass) {
                std::cerr << "oracle: at least one point failed or errored\n";
                return kSolver;
            }
        } else if (circ->parsed()) {
            auto doc = qdicke::circuit::parse_circuit(qdicke::kv::parse_file(circuit_file));
            if (c_n->count()) doc.n_atoms = n_atoms;
            if (c_kq->count()) doc.options.kappa_Q = kappa_q;
            if (c_kl->count()) doc.options.kappa_L = kappa_l;
            if (c_r->count()) doc.options.ratio_threshold = ratio;
            auto report = qdicke::circuit::circuit_report(doc);
            const qdicke::ModelParams mp{report["model"]["omega"], report["model"]["omega0"],
                                         report["model"]["omega_E"], report["model"]["omega_M"],
                                         report["model"]["n_spins"]};
            report["model"]["phase"] = qdicke::phase_name(qdicke::classify_phase(mp));
            if (circuit_out == "-") {
                std::cout << report.dump(2) << '\n';
            } else {
                std::ofstream os(circuit_out);
                if (!os) throw std::runtime_error("cannot write " + circuit_out);
                os << report.dump(2) << '\n';
            }
        }
    } catch (const qdicke::SpecError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kValidation;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kValidation;
    } catch (const std::domain_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kValidation;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kSolver;
    }
    return kOk;
}

// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "qdicke/qdicke.hpp"

using namespace qdicke;

namespace {

struct Outcome {
    bool pass{false};
    std::string detail;
};

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

// 1. Normal boundaries at exactly 0.5, located within one 1e-3 step.
Outcome critical_boundary() {
    const double step = 1e-3;
    bool ok = classify_phase({1, 1, 0.5, 0.2, 1}) == Phase::Normal &&
              classify_phase({1, 1, std::nextafter(0.5, 1.0), 0.2, 1}) == Phase::Electric &&
              classify_phase({1, 1, 0.2, 0.5, 1}) == Phase::Normal &&
              classify_phase({1, 1, 0.2, std::nextafter(0.5, 1.0), 1}) == Phase::Magnetic;
    double worst = 0.0;
    for (bool electric : {true, false}) {
        for (double fixed : {0.0, 0.2, 0.45}) {
            std::optional<double> found;
            for (int i = 0; i <= 2000; ++i) {
                const double w = i * step;
                const ModelParams p{1, 1, electric ? w : fixed, electric ? fixed : w, 1};
                if (classify_phase(p) != Phase::Normal) {
                    found = w;
                    break;
                }
            }
            if (!found) return {false, "no boundary found"};
            // The first non-Normal sample and the one before it bracket the boundary.
            ok = ok && *found - step <= 0.5 && 0.5 < *found;
            worst = std::max(worst, std::abs(*found - 0.5));
        }
    }
    return {ok, fmt("boundary bracketed by adjacent samples, max |located - 0.5| = %.3g (step %.0e)",
                    worst, step)};
}

// 2. Numerical minimizer against the closed forms on a 20x20 grid over [0, 2]^2.
Outcome order_parameter_oracle() {
    double worst_e = 0.0, worst_c = 0.0;
    bool labels = true;
    for (int n : {1, 4}) {
        const double rt = std::sqrt(double(n));
        for (int i = 0; i < 20; ++i)
            for (int j = 0; j < 20; ++j) {
                const ModelParams p{1.0, 1.0, 2.0 * i / 19.0, 2.0 * j / 19.0, n};
                const auto a = analytic_order_parameters(p);
                const auto m = minimize_numerically(p);
                labels = labels && a.phase == m.phase;
                worst_e = std::max(worst_e, std::abs(a.energy - m.energy) / (n * p.omega));
                for (const auto& mm : m.minima) {
                    worst_c = std::max(worst_c, std::abs(std::abs(mm.alpha) - std::abs(a.minima[0].alpha)) / rt);
                    worst_c = std::max(worst_c, std::abs(std::abs(mm.beta) - std::abs(a.minima[0].beta)) / rt);
                }
            }
    }
    return {labels && worst_e <= 1e-9 && worst_c <= 1e-6,
            fmt("max energy err %.2e*N*w (limit 1e-9), max coherence err %.2e*sqrt(N) (limit 1e-6)",
                worst_e, worst_c)};
}

// 3. Flat ring at omega_E = omega_M = omega.
Outcome mexican_hat() {
    double worst = 0.0;
    for (int n : {1, 10, 100}) {
        const ModelParams p{1, 1, 1, 1, n};
        const auto s = analytic_order_parameters(p);
        double lo = 1e300, hi = -1e300;
        for (int k = 0; k < 360; ++k) {
            const auto op = s.valley_point(2 * std::numbers::pi * k / 360.0);
            const double e = ground_energy(op.alpha, op.beta, p);
            lo = std::min(lo, e), hi = std::max(hi, e);
        }
        worst = std::max(worst, (hi - lo) / (n * p.omega));
    }
    return {worst < 1e-10, fmt("max-min over 360 angles = %.2e*N*w (limit 1e-10)", worst)};
}

// 4. Transition orders with 10x margins.
Outcome transition_orders() {
    const ModelParams base{1, 1, 0, 0, 1};
    bool ok = true;
    std::string d;
    for (double fixed : {0.0, 0.2, 0.4}) {
        const auto r = transition_order({0.3, fixed, 0.8, fixed}, base);
        const bool good = r.order == TransitionOrder::Second &&
                          r.second_jump >= 10 * r.second_threshold &&
                          r.first_jump * 10 <= r.first_threshold;
        ok = ok && good;
        d += fmt("N->E(M=%.1f): %s d2 jump %.3g/%.0e; ", fixed, std::string(order_name(r.order)).c_str(),
                 r.second_jump, r.second_threshold);
    }
    const auto m = transition_order({0.2, 0.3, 0.2, 0.8}, base);
    ok = ok && m.order == TransitionOrder::Second && m.second_jump >= 10 * m.second_threshold &&
         m.first_jump * 10 <= m.first_threshold;
    const auto f = transition_order({0.8, 1.0, 1.2, 1.0}, base);
    ok = ok && f.order == TransitionOrder::First && f.first_jump >= 10 * f.first_threshold &&
         f.crossing && std::abs((*f.crossing)[0] - 1.0) < 1e-6;
    d += fmt("diagonal at 1: %s d1 jump %.4g/%.0e", std::string(order_name(f.order)).c_str(), f.first_jump,
             f.first_threshold);
    return {ok, d};
}

// 5. Goldstone and amplitude modes on the diagonal; rotating-only branches in the Normal region.
Outcome goldstone_amplitude() {
    double worst_minus = 0.0, min_plus = 1e300;
    for (int i = 0; i <= 1500; ++i) {
        const double w = 0.5 + 1.5 * i / 1500.0;
        const auto s = polariton_energies({1, 1, w, w, 1});
        worst_minus = std::max(worst_minus, s.eps_minus);
        min_plus = std::min(min_plus, s.eps_plus);
    }
    double worst_tc = 0.0;
    for (int i = 0; i <= 500; ++i) {
        const double w = 0.5 * i / 500.0;
        const auto s = polariton_energies({1, 1, w, w, 1});
        worst_tc = std::max(worst_tc, std::abs(s.eps_plus - (1 + 2 * w)) / (1 + 2 * w));
        if (w < 0.5) worst_tc = std::max(worst_tc, std::abs(s.eps_minus - (1 - 2 * w)) / (1 - 2 * w));
        else worst_tc = std::max(worst_tc, std::abs(s.eps_minus - (1 - 2 * w)));
    }
    return {worst_minus <= 1e-8 && min_plus > 0.0 && worst_tc <= 1e-12,
            fmt("max eps- %.2e (limit 1e-8), min eps+ %.4g, omega +- 2W rel err %.2e (limit 1e-12)",
                worst_minus, min_plus, worst_tc)};
}

// 6. Parity and U(1) commutators at N = 8, n_max = 32.
Outcome symmetry_commutators() {
    const SpinBosonBasis basis(8, 32);
    const auto sym = symmetry_operators(basis);
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> u(0.0, 2.0);
    double worst_parity = 0.0;
    for (int i = 0; i < 20; ++i) {
        const auto h = build_hamiltonian({1, 1, u(rng), u(rng), 8}, basis);
        worst_parity = std::max(worst_parity, commutator_norm(h, sym.parity) / h.norm());
    }
    double worst_u1 = 0.0, least_broken = 1e300;
    for (double w : {0.3, 0.5, 1.0, 1.7}) {
        const auto h = build_hamiltonian({1, 1, w, w, 8}, basis);
        worst_u1 = std::max(worst_u1, commutator_norm(h, sym.u1_generator, true) / h.norm());
    }
    for (auto [e, m] : {std::pair{1.0, 0.5}, {0.5, 1.0}, {0.7, 0.2}, {1.5, 2.0}}) {
        const auto h = build_hamiltonian({1, 1, e, m, 8}, basis);
        least_broken = std::min(least_broken, commutator_norm(h, sym.u1_generator, true) / h.norm());
    }
    return {worst_parity < 1e-12 && worst_u1 < 1e-12 && least_broken > 1e-3,
            fmt("[H,Pi] %.1e (limit 1e-12), [H,N] diagonal %.1e (limit 1e-12), off-diagonal >= %.3g (limit 1e-3)",
                worst_parity, worst_u1, least_broken)};
}

// 7. ED energy density approaches mean field monotonically; the doublet closes.
Outcome meanfield_convergence_check() {
    const std::vector<int> ns{4, 8, 12, 16};
    bool ok = true;
    std::string d;
    for (auto [e, m, tag] : {std::tuple{0.1, 0.3, "Normal"}, {1.0, 0.0, "Electric"}, {1.0, 1.0, "diagonal"}}) {
        const auto t = meanfield_convergence({1, 1, e, m, 1}, ns);
        ok = ok && t.passed();
        d += std::string(tag) + ": dev";
        for (const auto& r : t.rows) d += fmt(" %.3g", r.deviation);
        if (t.phase == Phase::Electric) {
            d += " split";
            for (const auto& r : t.rows) d += fmt(" %.2g", r.parity_splitting);
        }
        d += t.passed() ? " ok; " : " FAILED; ";
    }
    return {ok, d};
}

// 8. Electric/Magnetic duality of labels and branches on a 15x15 grid.
Outcome duality() {
    double worst = 0.0;
    bool labels = true;
    for (int i = 0; i < 15; ++i)
        for (int j = 0; j < 15; ++j) {
            const ModelParams p{1, 1, 2.0 * i / 14.0, 2.0 * j / 14.0, 1};
            const auto a = polariton_energies(p);
            const auto b = polariton_energies(p.swapped());
            labels = labels && b.phase == dual_phase(a.phase) && classify_phase(p.swapped()) == dual_phase(classify_phase(p));
            // Relative to the branch itself, with omega as the floor for closed branches.
            worst = std::max(worst, std::abs(a.eps_minus - b.eps_minus) / std::max(a.eps_minus, p.omega));
            worst = std::max(worst, std::abs(a.eps_plus - b.eps_plus) / std::max(a.eps_plus, p.omega));
        }
    return {labels && worst <= 1e-10, fmt("labels swap: %s, max rel branch diff %.2e (limit 1e-10)",
                                          labels ? "yes" : "no", worst)};
}

// 9. Circuit identities and homogeneity.
Outcome circuit_identities() {
    circuit::CircuitParams c;
    c.C_r = 5e-12, c.C_g = 3e-15, c.C_J = 3e-15;
    c.L_r = 2e-9, c.L_1 = 7e-12, c.L_2 = 7e-12;
    c.E_J = 1e-24;
    const auto l = circuit::lumped_energies(c);
    double worst = std::max(std::abs(l.G_Q - l.E_Cr) / l.E_Cr, std::abs(l.G_L - l.E_Lr) / l.E_Lr);
    for (double s : {0.25, 3.0, 17.0}) {
        auto cs = c;
        cs.C_r *= s, cs.C_g *= s, cs.C_J *= s;
        const auto a = circuit::lumped_energies(cs);
        worst = std::max({worst, std::abs(a.E_Cr * s - l.E_Cr) / l.E_Cr, std::abs(a.E_CJ * s - l.E_CJ) / l.E_CJ,
                          std::abs(a.G_Q * s - l.G_Q) / l.G_Q});
        auto ls = c;
        ls.L_r *= s, ls.L_1 *= s, ls.L_2 *= s;
        const auto b = circuit::lumped_energies(ls);
        worst = std::max({worst, std::abs(b.E_Lr * s - l.E_Lr) / l.E_Lr, std::abs(b.G_L * s - l.G_L) / l.G_L,
                          std::abs(b.E_LJ - l.E_LJ) / l.E_LJ});
        const auto ea = circuit::effective_model(a, c.E_J, c.phi_ext);
        const auto e0 = circuit::effective_model(l, c.E_J, c.phi_ext);
        worst = std::max(worst, std::abs(ea.omega_res * std::sqrt(s) - e0.omega_res) / e0.omega_res);
    }
    return {worst <= 1e-12, fmt("max rel err %.2e (limit 1e-12)", worst)};
}

// 10. Sweep output independent of the worker count.
Outcome determinism() {
    SweepSpec s;
    s.omega_E = s.omega_M = Axis{0.0, 2.0, 41};
    s.tasks = {Task::Phase, Task::OrderParams, Task::Spectrum, Task::Derivatives};
    auto render = [&](int workers) {
        s.workers = workers;
        std::ostringstream os;
        write_sweep_csv(os, run_sweep(s).rows);
        return os.str();
    };
    const auto one = render(1);
    const auto eight = render(8);
    return {one == eight, fmt("%zu bytes, identical: %s", one.size(), one == eight ? "yes" : "no")};
}

} // namespace

int main() {
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
        {"critical boundary", critical_boundary},
        {"order-parameter oracle equivalence", order_parameter_oracle},
        {"mexican-hat flatness", mexican_hat},
        {"transition orders", transition_orders},
        {"goldstone and amplitude modes", goldstone_amplitude},
        {"symmetry commutators", symmetry_commutators},
        {"mean-field convergence", meanfield_convergence_check},
        {"duality", duality},
        {"circuit identities", circuit_identities},
        {"determinism", determinism},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::printf("%s %2zu %s [%.2fs] %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, sec,
                    o.detail.c_str());
        std::fflush(stdout);
        failed += !o.pass;
    }
    std::printf("%d/%zu criteria passed\n", int(criteria.size()) - failed, criteria.size());
    return failed ? 1 : 0;
}

// circuit.hpp — lumped-element energies of the capacitively and inductively coupled
// Josephson-atom / resonator circuit, and the mapping onto ModelParams

#pragma once

#include <cmath>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "qdicke/keyvalue.hpp"
#include "qdicke/model.hpp"

namespace qdicke::circuit {

inline constexpr double kElementaryCharge = 1.602176634e-19;  // C
inline constexpr double kPlanck = 6.62607015e-34;             // J s

/// SI element values of one resonator cell and its artificial atom.
struct CircuitParams {
    double C_r{0.0}, C_g{0.0}, C_J{0.0};  // F
    double L_r{0.0}, L_1{0.0}, L_2{0.0};  // H
    double E_J{0.0};                      // J
    double phi_ext{std::numbers::pi};     // rad
    double e{kElementaryCharge};
    double h{kPlanck};

    void validate() const {
        std::string bad;
        auto need = [&](double v, const char* name) {
            if (!(v > 0.0)) bad += std::string(bad.empty() ? "" : ", ") + name;
        };
        need(C_r, "c_r"); need(C_g, "c_g"); need(C_J, "c_j");
        need(L_r, "l_r"); need(L_1, "l_1"); need(L_2, "l_2");
        need(e, "e"); need(h, "h");
        if (!(E_J >= 0.0)) bad += std::string(bad.empty() ? "" : ", ") + "e_j";
        if (!bad.empty()) throw std::domain_error("circuit elements must be positive: " + bad);
    }

    double hbar() const { return h / (2.0 * std::numbers::pi); }
};

struct Validity {
    double ratio_threshold{100.0};
    double capacitive_ratio{0.0};  // C_r / max(C_g, C_J)
    double inductive_ratio{0.0};   // L_r / max(L_1, L_2)
    bool cap_ok{false};
    bool ind_ok{false};
};

struct LumpedEnergies {
    double E_Cr{0.0}, E_Lr{0.0}, E_CJ{0.0}, E_LJ{0.0}, G_Q{0.0}, G_L{0.0};  // J
    double hbar{kPlanck / (2.0 * std::numbers::pi)};
    Validity validity;
};

/// Energies of the circuit Hamiltonian in the C_r >> C_g, C_J and L_r >> L_1, L_2 regime:
///   E_Cr = 2e^2/C_r                 E_Lr = (h/2e)^2 / 2L_r
///   E_CJ = 2e^2/(C_g + C_J)         E_LJ = (h/2e)^2 (L_r + L_1) / 2(L_1 + L_2)
///   G_Q  = 4e^2 C_g / C_r(C_g + C_J) G_L = (h/2e)^2 L_1 / L_r(L_1 + L_2)
/// E_LJ is kept in this form although it carries units of flux^2 rather than energy.
inline LumpedEnergies lumped_energies(const CircuitParams& c, double ratio_threshold = 100.0) {
    c.validate();
    if (!(ratio_threshold > 0.0)) throw std::domain_error("ratio threshold must be positive");
    const double e2 = c.e * c.e;
    const double phi0 = c.h / (2.0 * c.e);
    const double phi02 = phi0 * phi0;
    LumpedEnergies out;
    out.E_Cr = 2.0 * e2 / c.C_r;
    out.E_Lr = phi02 / (2.0 * c.L_r);
    out.E_CJ = 2.0 * e2 / (c.C_g + c.C_J);
    out.E_LJ = phi02 * (c.L_r + c.L_1) / (2.0 * (c.L_1 + c.L_2));
    out.G_Q = 4.0 * e2 * c.C_g / (c.C_r * (c.C_g + c.C_J));
    out.G_L = phi02 * c.L_1 / (c.L_r * (c.L_1 + c.L_2));
    out.hbar = c.hbar();

    auto& v = out.validity;
    v.ratio_threshold = ratio_threshold;
    v.capacitive_ratio = c.C_r / std::max(c.C_g, c.C_J);
    v.inductive_ratio = c.L_r / std::max(c.L_1, c.L_2);
    v.cap_ok = v.capacitive_ratio >= ratio_threshold;
    v.ind_ok = v.inductive_ratio >= ratio_threshold;
    return out;
}

struct MappingOptions {
    double kappa_Q{1.0};  // g_E = kappa_Q G_Q / hbar
    double kappa_L{1.0};  // g_M = kappa_L G_L / hbar
    double ratio_threshold{100.0};
    double phi_tolerance{1e-9};
};

enum class Provenance { Formula, Convention, FormulaDimensionSuspect };

inline const char* provenance_name(Provenance p) {
    switch (p) {
    case Provenance::Formula: return "formula";
    case Provenance::Convention: return "convention-dependent";
    case Provenance::FormulaDimensionSuspect: return "formula-as-printed-dimension-suspect";
    }
    return "?";
}

struct EffectiveParams {
    double omega_res{0.0};  // rad/s
    double omega_J{0.0};    // rad/s
    double g_E{0.0};        // rad/s, per atom
    double g_M{0.0};        // rad/s, per atom
    std::vector<std::string> warnings;
};

class UnsupportedRegime : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Single-mode, two-level reduction at the sweet spot. Frequencies follow the LC
/// convention hbar*omega = 2 sqrt(E_C E_L) for a cell E_C N^2 + E_L phi^2.
inline EffectiveParams effective_model(const LumpedEnergies& l, double E_J, double phi_ext,
                                       const MappingOptions& opt = {}) {
    if (std::abs(phi_ext - std::numbers::pi) > opt.phi_tolerance)
        throw UnsupportedRegime("effective_model: only the sweet spot phi_ext = pi is supported");
    if (!(E_J >= 0.0)) throw std::domain_error("effective_model: E_J must be non-negative");
    if (!(opt.kappa_Q >= 0.0) || !(opt.kappa_L >= 0.0))
        throw std::domain_error("effective_model: kappa factors must be non-negative");
    EffectiveParams out;
    out.omega_res = 2.0 * std::sqrt(l.E_Cr * l.E_Lr) / l.hbar;
    out.omega_J = 2.0 * std::sqrt(l.E_CJ * l.E_LJ) / l.hbar;
    out.g_E = opt.kappa_Q * std::abs(l.G_Q) / l.hbar;
    out.g_M = opt.kappa_L * std::abs(l.G_L) / l.hbar;
    if (!l.validity.cap_ok)
        out.warnings.push_back("C_r is not >> C_g, C_J at the configured ratio threshold");
    if (!l.validity.ind_ok)
        out.warnings.push_back("L_r is not >> L_1, L_2 at the configured ratio threshold");
    return out;
}

/// Identical atoms: sum_j g (a + a^dag) sigma_x^j = (sqrt(N) g / sqrt(N)) (a + a^dag)(J+ + J-),
/// so the collective couplings are sqrt(N) times the per-atom ones. Frequencies are expressed
/// in units of `reference` (rad/s); by default omega_res, giving omega = 1.
inline ModelParams model_from_effective(const EffectiveParams& eff, int n_atoms,
                                        std::optional<double> reference = std::nullopt) {
    if (n_atoms < 1) throw std::domain_error("model_from_effective: n_atoms must be >= 1");
    const double ref = reference.value_or(eff.omega_res);
    if (!(ref > 0.0)) throw std::domain_error("model_from_effective: reference frequency must be positive");
    const double rt = std::sqrt(double(n_atoms));
    ModelParams p;
    p.omega = eff.omega_res / ref;
    p.omega0 = eff.omega_J / ref;
    p.omega_E = rt * eff.g_E / ref;
    p.omega_M = rt * eff.g_M / ref;
    p.n_spins = n_atoms;
    p.validate();
    return p;
}

inline ModelParams model_from_circuit(const CircuitParams& c, int n_atoms,
                                      const MappingOptions& opt = {}) {
    const auto l = lumped_energies(c, opt.ratio_threshold);
    return model_from_effective(effective_model(l, c.E_J, c.phi_ext, opt), n_atoms);
}

// ---------------------------------------------------------------------------------------
// Documents

struct CircuitDocument {
    CircuitParams circuit;
    MappingOptions options;
    int n_atoms{1};
};

/// Flat key-value circuit description: c_r, c_g, c_j, l_r, l_1, l_2, e_j, phi_ext (SI), plus
/// optional n_atoms, kappa_q, kappa_l, validity_ratio.
inline CircuitDocument parse_circuit(const kv::Document& doc) {
    CircuitDocument out;
    auto& c = out.circuit;
    const std::vector<std::pair<const char*, double*>> required{
        {"c_r", &c.C_r}, {"c_g", &c.C_g}, {"c_j", &c.C_J}, {"l_r", &c.L_r},
        {"l_1", &c.L_1}, {"l_2", &c.L_2}, {"e_j", &c.E_J}, {"phi_ext", &c.phi_ext}};
    std::string missing;
    for (auto [key, dst] : required) {
        auto it = doc.find(key);
        if (it == doc.end()) missing += std::string(missing.empty() ? "" : ", ") + key;
        else *dst = kv::to_double(key, it->second);
    }
    if (!missing.empty()) throw std::invalid_argument("circuit document missing: " + missing);
    for (const auto& [key, value] : doc) {
        if (key == "n_atoms") out.n_atoms = kv::to_int(key, value);
        else if (key == "kappa_q") out.options.kappa_Q = kv::to_double(key, value);
        else if (key == "kappa_l") out.options.kappa_L = kv::to_double(key, value);
        else if (key == "validity_ratio") out.options.ratio_threshold = kv::to_double(key, value);
        else {
            bool known = false;
            for (auto [k, d] : required) known = known || key == k;
            if (!known) throw std::invalid_argument("circuit document: unknown key " + key);
        }
    }
    return out;
}

namespace detail {

inline nlohmann::json field(double v, const char* unit, Provenance p) {
    return {{"value", v}, {"unit", unit}, {"provenance", provenance_name(p)}};
}

} // namespace detail

/// Parameter report with a provenance flag per field.
inline nlohmann::json circuit_report(const CircuitDocument& doc) {
    using detail::field;
    const auto l = lumped_energies(doc.circuit, doc.options.ratio_threshold);
    const auto eff = effective_model(l, doc.circuit.E_J, doc.circuit.phi_ext, doc.options);
    const auto mp = model_from_effective(eff, doc.n_atoms);

    nlohmann::json r;
    r["lumped"] = {
        {"E_Cr", field(l.E_Cr, "J", Provenance::Formula)},
        {"E_Lr", field(l.E_Lr, "J", Provenance::Formula)},
        {"E_CJ", field(l.E_CJ, "J", Provenance::Formula)},
        {"E_LJ", field(l.E_LJ, "Wb^2", Provenance::FormulaDimensionSuspect)},
        {"G_Q", field(l.G_Q, "J", Provenance::Formula)},
        {"G_L", field(l.G_L, "J", Provenance::Formula)},
    };
    r["validity"] = {{"ratio_threshold", l.validity.ratio_threshold},
                     {"capacitive_ratio", l.validity.capacitive_ratio},
                     {"inductive_ratio", l.validity.inductive_ratio},
                     {"cap_ok", l.validity.cap_ok},
                     {"ind_ok", l.validity.ind_ok}};
    r["effective"] = {
        {"omega_res", field(eff.omega_res, "rad/s", Provenance::Convention)},
        {"omega_J", field(eff.omega_J, "rad/s", Provenance::Convention)},
        {"g_E", field(eff.g_E, "rad/s", Provenance::Convention)},
        {"g_M", field(eff.g_M, "rad/s", Provenance::Convention)},
        {"kappa_Q", doc.options.kappa_Q},
        {"kappa_L", doc.options.kappa_L},
        {"E_J", field(doc.circuit.E_J, "J", Provenance::Formula)},
        {"phi_ext", doc.circuit.phi_ext},
    };
    r["model"] = {{"units", "omega_res"},
                  {"omega", mp.omega},
                  {"omega0", mp.omega0},
                  {"omega_E", mp.omega_E},
                  {"omega_M", mp.omega_M},
                  {"n_spins", mp.n_spins},
                  {"omega_cr", critical_coupling(mp.omega, mp.omega0)}};
    r["warnings"] = eff.warnings;
    return r;
}

} // namespace qdicke::circuit

// model.hpp — parameters, critical couplings and phase labels of the two-quadrature Dicke model

#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace qdicke {

// Frequencies are in units of a caller-chosen reference (hbar = 1), usually omega = 1.
struct ModelParams {
    double omega{1.0};    // boson mode frequency
    double omega0{1.0};   // two-level transition frequency
    double omega_E{0.0};  // coupling to the (a + a^dag) quadrature
    double omega_M{0.0};  // coupling to the (a - a^dag) quadrature
    int n_spins{1};       // N

    void validate() const {
        if (!(omega > 0.0) || !(omega0 > 0.0))
            throw std::domain_error("ModelParams: omega and omega0 must be positive");
        if (!(omega_E >= 0.0) || !(omega_M >= 0.0))
            throw std::domain_error("ModelParams: couplings must be non-negative");
        if (n_spins < 1)
            throw std::domain_error("ModelParams: n_spins must be >= 1");
    }

    // Same model with the two quadrature couplings exchanged.
    ModelParams swapped() const {
        ModelParams p = *this;
        p.omega_E = omega_M;
        p.omega_M = omega_E;
        return p;
    }
};

enum class Phase { Normal, Electric, Magnetic, EM };

inline std::string_view phase_name(Phase p) {
    switch (p) {
    case Phase::Normal: return "Normal";
    case Phase::Electric: return "Electric";
    case Phase::Magnetic: return "Magnetic";
    case Phase::EM: return "EM";
    }
    return "?";
}

inline Phase phase_from_name(std::string_view s) {
    if (s == "Normal") return Phase::Normal;
    if (s == "Electric") return Phase::Electric;
    if (s == "Magnetic") return Phase::Magnetic;
    if (s == "EM") return Phase::EM;
    throw std::invalid_argument("unknown phase label: " + std::string(s));
}

// Electric <-> Magnetic relabelling induced by omega_E <-> omega_M.
inline Phase dual_phase(Phase p) {
    if (p == Phase::Electric) return Phase::Magnetic;
    if (p == Phase::Magnetic) return Phase::Electric;
    return p;
}

/// Critical coupling sqrt(omega * omega0) / 2 shared by both quadratures.
inline double critical_coupling(double omega, double omega0) {
    if (!(omega > 0.0) || !(omega0 > 0.0))
        throw std::domain_error("critical_coupling: frequencies must be positive");
    return 0.5 * std::sqrt(omega * omega0);
}

inline double mu_factor(double omega, double omega0, double coupling) {
    return omega * omega0 / (4.0 * coupling * coupling);
}

struct CriticalQuantities {
    std::optional<double> mu_E;  // omega*omega0 / (4 omega_E^2), absent when omega_E == 0
    std::optional<double> mu_M;
    double omega_cr{0.0};
};

inline CriticalQuantities critical_quantities(const ModelParams& p) {
    p.validate();
    CriticalQuantities q;
    q.omega_cr = critical_coupling(p.omega, p.omega0);
    if (p.omega_E > 0.0) q.mu_E = mu_factor(p.omega, p.omega0, p.omega_E);
    if (p.omega_M > 0.0) q.mu_M = mu_factor(p.omega, p.omega0, p.omega_M);
    return q;
}

struct MuFactors {
    std::optional<double> mu_E;
    std::optional<double> mu_M;
};

inline MuFactors mu_factors(const ModelParams& p) {
    auto q = critical_quantities(p);
    return {q.mu_E, q.mu_M};
}

} // namespace qdicke

// spectrum.hpp — polariton branches of the quadratic fluctuation Hamiltonian in each phase

#pragma once

#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

#include "qdicke/meanfield.hpp"
#include "qdicke/model.hpp"

namespace qdicke {

struct TildeParams {
    double omega0{0.0};
    double omega_E{0.0};
    double omega_M{0.0};
};

// Negative eps^2 above this magnitude means the wrong branch was used.
inline constexpr double kNegativeEps2Clamp = 1e-12;
// Lower branch below this (times omega) is gapless.
inline constexpr double kGaplessTolerance = 1e-8;

namespace detail {

// The EM line is evaluated with the substitution of the dominant coupling; on the exact
// diagonal the Electric and Magnetic substitutions give the same branches.
inline Phase substitution_phase(const ModelParams& p, Phase phase) {
    if (phase != Phase::EM) return phase;
    return p.omega_E >= p.omega_M ? Phase::Electric : Phase::Magnetic;
}

} // namespace detail

/// Phase-dependent (omega0~, omega_E~, omega_M~) entering the polariton formula.
inline TildeParams tilde_substitution(const ModelParams& p, Phase phase) {
    p.validate();
    switch (detail::substitution_phase(p, phase)) {
    case Phase::Normal:
        return {p.omega0, p.omega_E, p.omega_M};
    case Phase::Electric: {
        if (!(p.omega_E > 0.0)) throw std::domain_error("tilde_substitution: mu_E undefined");
        const double mu = mu_factor(p.omega, p.omega0, p.omega_E);
        return {p.omega0 / mu, p.omega_E * mu, p.omega_M};
    }
    case Phase::Magnetic: {
        if (!(p.omega_M > 0.0)) throw std::domain_error("tilde_substitution: mu_M undefined");
        const double mu = mu_factor(p.omega, p.omega0, p.omega_M);
        return {p.omega0 / mu, p.omega_E, p.omega_M * mu};
    }
    case Phase::EM: break;
    }
    throw std::logic_error("tilde_substitution: unreachable");
}

struct PolaritonSpectrum {
    double eps_minus{0.0};
    double eps_plus{0.0};
    Phase phase{Phase::Normal};
    TildeParams tilde;
};

namespace detail {

// (omega omega0~ - 4 omega_E~^2)(omega omega0~ - 4 omega_M~^2) = eps_-^2 eps_+^2, with each
// factor written so that it vanishes exactly on the critical lines and on the diagonal.
inline double branch_product(const ModelParams& p, Phase sub) {
    const double e = p.omega_E;
    const double m = p.omega_M;
    switch (sub) {
    case Phase::Normal: {
        const double cr = critical_coupling(p.omega, p.omega0);
        return 16.0 * (cr - e) * (cr + e) * (cr - m) * (cr + m);
    }
    case Phase::Electric: {
        const double mu = mu_factor(p.omega, p.omega0, e);
        return 16.0 * e * e * (1.0 - mu) * (1.0 + mu) * (e - m) * (e + m);
    }
    case Phase::Magnetic: {
        const double mu = mu_factor(p.omega, p.omega0, m);
        return 16.0 * m * m * (1.0 - mu) * (1.0 + mu) * (m - e) * (m + e);
    }
    case Phase::EM: break;
    }
    throw std::logic_error("branch_product: unreachable");
}

} // namespace detail

/// Polariton energies
///   eps_+-^2 = 1/2 { 8 E~ M~ + w^2 + w0~^2 +- sqrt[(w^2 - w0~^2)^2 + 16 (E~ w0~ + M~ w)(E~ w + M~ w0~)] }
/// for the phase of `p`. The upper root is taken directly; the lower one from the product of
/// the roots, which stays accurate where the branch closes.
inline PolaritonSpectrum polariton_energies(const ModelParams& p) {
    PolaritonSpectrum out;
    out.phase = classify_phase(p);
    out.tilde = tilde_substitution(p, out.phase);
    const double w = p.omega;
    const double w0 = out.tilde.omega0;
    const double a = out.tilde.omega_E;
    const double b = out.tilde.omega_M;

    const double sum = 8.0 * a * b + w * w + w0 * w0;
    const double diff = w * w - w0 * w0;
    const double radicand = diff * diff + 16.0 * (a * w0 + b * w) * (a * w + b * w0);
    const double plus2 = 0.5 * (sum + std::sqrt(radicand));
    const double minus2 = detail::branch_product(p, detail::substitution_phase(p, out.phase)) / plus2;

    if (minus2 < -kNegativeEps2Clamp || plus2 < -kNegativeEps2Clamp)
        throw std::logic_error("polariton_energies: negative squared energy, inconsistent phase");
    out.eps_minus = std::sqrt(std::max(minus2, 0.0));
    out.eps_plus = std::sqrt(std::max(plus2, 0.0));
    return out;
}

struct ModeFlags {
    bool goldstone{false};  // gapless lower branch on the U(1)-broken diagonal
    bool critical{false};   // gapless lower branch on a second-order line
    bool amplitude{false};  // finite upper branch accompanying a Goldstone point
};

struct ModeScanPoint {
    ModelParams params;
    PolaritonSpectrum spectrum;
    ModeFlags flags;
};

inline ModeFlags mode_flags(const ModelParams& p, const PolaritonSpectrum& s) {
    const double tol = kGaplessTolerance * p.omega;
    ModeFlags f;
    const bool gapless = s.eps_minus < tol;
    f.goldstone = gapless && s.phase == Phase::EM;
    f.critical = gapless && s.phase != Phase::EM;
    f.amplitude = f.goldstone && s.eps_plus > tol;
    return f;
}

inline std::vector<ModeScanPoint> mode_scan(std::span<const ModelParams> grid) {
    std::vector<ModeScanPoint> out;
    out.reserve(grid.size());
    for (const auto& p : grid) {
        auto s = polariton_energies(p);
        out.push_back({p, s, mode_flags(p, s)});
    }
    return out;
}

} // namespace qdicke

// meanfield.hpp — Holstein-Primakoff mean-field energy, order parameters, landscapes and
// transition-order detection

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "qdicke/model.hpp"

namespace qdicke {

using cplx = std::complex<double>;

// |omega_E - omega_M| below this (times omega) is the EM line.
inline constexpr double kSymmetryTolerance = 1e-9;

/// Phase of the thermodynamic-limit ground state. Points exactly on the critical coupling
/// belong to the Normal branch.
inline Phase classify_phase(const ModelParams& p, double tol_sym = kSymmetryTolerance) {
    p.validate();
    const double cr = critical_coupling(p.omega, p.omega0);
    if (p.omega_E <= cr && p.omega_M <= cr) return Phase::Normal;
    if (std::abs(p.omega_E - p.omega_M) <= tol_sym * p.omega) return Phase::EM;
    return p.omega_E > p.omega_M ? Phase::Electric : Phase::Magnetic;
}

namespace detail {

// sqrt(1 - |beta|^2 / N) with the domain check; tiny negative rounding is clamped.
inline double hp_factor(cplx beta, int n_spins) {
    const double x = 1.0 - std::norm(beta) / n_spins;
    if (x < -1e-14) throw std::domain_error("mean-field energy: |beta|^2 exceeds N");
    return std::sqrt(std::max(x, 0.0));
}

} // namespace detail

/// Mean-field ground-state energy E_G (extensive, without the constant -N omega0 / 2).
inline double ground_energy(cplx alpha, cplx beta, const ModelParams& p) {
    const double s = detail::hp_factor(beta, p.n_spins);
    const cplx ac = std::conj(alpha);
    const cplx bc = std::conj(beta);
    const cplx coupling =
        p.omega_E * (alpha + ac) * (beta + bc) + p.omega_M * (alpha - ac) * (bc - beta);
    return p.omega * std::norm(alpha) + p.omega0 * std::norm(beta) + coupling.real() * s;
}

/// Boson coherence that minimizes E_G at fixed beta.
inline cplx eliminate_alpha(cplx beta, const ModelParams& p) {
    const double s = detail::hp_factor(beta, p.n_spins);
    const cplx bc = std::conj(beta);
    return -((p.omega_E / p.omega) * (beta + bc) + (p.omega_M / p.omega) * (beta - bc)) * s;
}

/// E_G(beta, beta*) after eliminating alpha.
inline double reduced_energy(cplx beta, const ModelParams& p) {
    return ground_energy(eliminate_alpha(beta, p), beta, p);
}

/// Reduced energy per spin in scaled coordinates beta / sqrt(N) = x + i y, written out in
/// closed form together with its gradient. Used by the minimizer.
struct ReducedFunctional {
    ModelParams params;

    double value(double x, double y) const {
        const double r2 = x * x + y * y;
        const double w = params.omega_E * params.omega_E * x * x +
                         params.omega_M * params.omega_M * y * y;
        return params.omega0 * r2 - 4.0 / params.omega * (1.0 - r2) * w;
    }

    std::array<double, 2> gradient(double x, double y) const {
        const double r2 = x * x + y * y;
        const double e2 = params.omega_E * params.omega_E;
        const double m2 = params.omega_M * params.omega_M;
        const double w = e2 * x * x + m2 * y * y;
        const double k = 8.0 / params.omega;
        return {2.0 * params.omega0 * x + k * x * w - k * (1.0 - r2) * e2 * x,
                2.0 * params.omega0 * y + k * y * w - k * (1.0 - r2) * m2 * y};
    }

    // Symmetric Hessian as {xx, xy, yy}.
    std::array<double, 3> hessian(double x, double y) const {
        const double r2 = x * x + y * y;
        const double e2 = params.omega_E * params.omega_E;
        const double m2 = params.omega_M * params.omega_M;
        const double w = e2 * x * x + m2 * y * y;
        const double k = 8.0 / params.omega;
        const double c = 2.0 * params.omega0 + k * w;
        return {c + 4.0 * k * e2 * x * x - k * (1.0 - r2) * e2, 2.0 * k * x * y * (e2 + m2),
                c + 4.0 * k * m2 * y * y - k * (1.0 - r2) * m2};
    }
};

struct OrderParameters {
    cplx alpha;  // <a>
    cplx beta;   // <b>
    Phase phase{Phase::Normal};
    std::optional<double> theta;  // valley angle, EM only
    int n_spins{1};

    cplx alpha_scaled() const { return alpha / std::sqrt(double(n_spins)); }
    cplx beta_scaled() const { return beta / std::sqrt(double(n_spins)); }
};

struct MeanFieldSolution {
    Phase phase{Phase::Normal};
    std::vector<OrderParameters> minima;
    bool continuous_family{false};  // true in EM: minima[0] is the theta = 0 member of a circle
    double energy{0.0};             // E_G at the minimum
    int n_spins{1};

    double energy_per_spin() const { return energy / n_spins; }

    // Member of the EM valley at angle theta; both coherences rotate by e^{i theta}.
    OrderParameters valley_point(double theta) const {
        if (!continuous_family) throw std::logic_error("valley_point: not a U(1) family");
        OrderParameters op = minima.front();
        const cplx rot = std::polar(1.0, theta);
        op.alpha *= rot;
        op.beta *= rot;
        op.theta = theta;
        return op;
    }
};

/// Closed-form order parameters of the four phases.
///
/// Electric: (alpha, beta) = (-/+ (omega_E/omega) sqrt(N(1 - mu_E^2)), +/- sqrt(N(1 - mu_E)/2)).
/// Magnetic: same on the imaginary axis with mu_M. EM: a circle e^{i theta}(alpha0, beta0).
/// The relative sign of alpha and beta is picked by evaluating both pairings.
inline MeanFieldSolution analytic_order_parameters(const ModelParams& p) {
    MeanFieldSolution sol;
    sol.phase = classify_phase(p);
    sol.n_spins = p.n_spins;
    const double n = p.n_spins;

    if (sol.phase == Phase::Normal) {
        sol.minima.push_back({0.0, 0.0, Phase::Normal, std::nullopt, p.n_spins});
        return sol;
    }

    const bool magnetic = sol.phase == Phase::Magnetic;
    const double coupling = sol.phase == Phase::EM ? std::max(p.omega_E, p.omega_M)
                            : magnetic             ? p.omega_M
                                                   : p.omega_E;
    const double mu = mu_factor(p.omega, p.omega0, coupling);
    const double amp_alpha = coupling / p.omega * std::sqrt(n * (1.0 - mu * mu));
    const double amp_beta = std::sqrt(0.5 * n * (1.0 - mu));
    const cplx axis = magnetic ? cplx(0.0, 1.0) : cplx(1.0, 0.0);

    const cplx beta = amp_beta * axis;
    const cplx alpha_anti = -amp_alpha * axis;
    const cplx alpha = ground_energy(alpha_anti, beta, p) <= ground_energy(-alpha_anti, beta, p)
                           ? alpha_anti
                           : -alpha_anti;
    sol.energy = ground_energy(alpha, beta, p);

    if (sol.phase == Phase::EM) {
        sol.continuous_family = true;
        sol.minima.push_back({alpha, beta, Phase::EM, 0.0, p.n_spins});
    } else {
        sol.minima.push_back({alpha, beta, sol.phase, std::nullopt, p.n_spins});
        sol.minima.push_back({-alpha, -beta, sol.phase, std::nullopt, p.n_spins});
    }
    return sol;
}

/// Minimized E_G / N from the closed forms.
inline double minimum_energy_per_spin(const ModelParams& p) {
    return analytic_order_parameters(p).energy_per_spin();
}

struct MinimizerOptions {
    std::vector<double> radii{0.3, 0.7, 0.95};  // start radii in units of sqrt(N)
    int starts_per_radius{8};
    double gradient_tol{1e-12};   // on the scaled gradient, times omega
    double dedupe_distance{1e-6}; // in units of sqrt(N)
    double energy_window{1e-10};  // minima within this of the best (per spin, times omega) are kept
    int max_iterations{500};
};

struct NumericalMinimum {
    double x{0.0};
    double y{0.0};
    double value{0.0};
    double gradient_norm{0.0};
    int iterations{0};
    bool converged{false};
};

namespace detail {

inline double lowest_eigenvalue(const std::array<double, 3>& h) {
    const double m = 0.5 * (h[0] + h[2]);
    const double d = 0.5 * (h[0] - h[2]);
    return m - std::hypot(d, h[1]);
}

} // namespace detail

/// Newton iteration on the unit disk, with the Hessian shifted to be positive definite where
/// it is not and a backtracking line search. Steps are accepted on the Armijo condition or,
/// once energy differences sink below rounding, on a decreasing gradient.
inline NumericalMinimum descend(const ReducedFunctional& f, double x, double y,
                                const MinimizerOptions& opt) {
    constexpr double eps = std::numeric_limits<double>::epsilon();
    const double tol = opt.gradient_tol * f.params.omega;
    NumericalMinimum out;
    double fx = f.value(x, y);
    auto g = f.gradient(x, y);
    double gn = std::hypot(g[0], g[1]);

    int it = 0;
    for (; it < opt.max_iterations && gn >= tol; ++it) {
        auto h = f.hessian(x, y);
        const double scale = std::abs(h[0]) + std::abs(h[2]) + f.params.omega0;
        const double floor = 1e-8 * scale;
        const double lo = detail::lowest_eigenvalue(h);
        if (lo < floor) {
            h[0] += floor - lo;
            h[2] += floor - lo;
        }
        const double det = h[0] * h[2] - h[1] * h[1];
        const double dx = -(h[2] * g[0] - h[1] * g[1]) / det;
        const double dy = -(h[0] * g[1] - h[1] * g[0]) / det;
        const double slope = g[0] * dx + g[1] * dy;

        bool accepted = false;
        double t = 1.0;
        for (int bt = 0; bt < 80; ++bt, t *= 0.5) {
            const double nx = x + t * dx;
            const double ny = y + t * dy;
            if (nx * nx + ny * ny > 1.0) continue;
            const double fn = f.value(nx, ny);
            const auto gnew = f.gradient(nx, ny);
            const double gnn = std::hypot(gnew[0], gnew[1]);
            const bool armijo = fn <= fx + 1e-4 * t * slope;
            const bool noise = fn - fx <= 16.0 * eps * std::max(std::abs(fx), f.params.omega0) &&
                               gnn < gn;
            if (armijo || noise) {
                x = nx;
                y = ny;
                fx = fn;
                g = gnew;
                gn = gnn;
                accepted = true;
                break;
            }
        }
        if (!accepted) break;
    }
    out.x = x;
    out.y = y;
    out.value = fx;
    out.gradient_norm = gn;
    out.iterations = it;
    // Stationary points that are not minima (the origin above the critical coupling) are
    // not reported.
    const auto h = f.hessian(x, y);
    const double scale = std::abs(h[0]) + std::abs(h[2]) + f.params.omega0;
    out.converged = gn < tol && detail::lowest_eigenvalue(h) >= -1e-8 * scale;
    return out;
}

// Phase read off the geometry of a set of minima (independent of classify_phase).
inline Phase infer_phase(const std::vector<OrderParameters>& minima, double scale_tol = 1e-6) {
    if (minima.size() == 1 && std::abs(minima[0].beta_scaled()) < scale_tol) return Phase::Normal;
    if (minima.size() > 2) return Phase::EM;
    bool real_axis = true;
    bool imag_axis = true;
    for (const auto& m : minima) {
        const cplx b = m.beta_scaled();
        real_axis = real_axis && std::abs(b.imag()) < scale_tol;
        imag_axis = imag_axis && std::abs(b.real()) < scale_tol;
    }
    if (real_axis) return Phase::Electric;
    if (imag_axis) return Phase::Magnetic;
    return Phase::EM;
}

/// Multi-start minimization of the reduced functional; returns all distinct global minima.
inline MeanFieldSolution minimize_numerically(const ModelParams& p,
                                              const MinimizerOptions& opt = {}) {
    p.validate();
    const ReducedFunctional f{p};
    std::vector<std::array<double, 2>> starts{{0.0, 0.0}};
    for (double r : opt.radii) {
        for (int k = 0; k < opt.starts_per_radius; ++k) {
            const double th = (k + 0.5) * 2.0 * std::numbers::pi / opt.starts_per_radius;
            starts.push_back({r * std::cos(th), r * std::sin(th)});
        }
    }

    std::vector<NumericalMinimum> found;
    for (const auto& s : starts) {
        auto m = descend(f, s[0], s[1], opt);
        if (m.converged) found.push_back(m);
    }
    if (found.empty()) throw std::runtime_error("minimize_numerically: no start converged");

    double best = found.front().value;
    for (const auto& m : found) best = std::min(best, m.value);

    std::vector<NumericalMinimum> distinct;
    for (const auto& m : found) {
        if (m.value > best + opt.energy_window * p.omega) continue;
        const bool dup = std::any_of(distinct.begin(), distinct.end(), [&](const auto& d) {
            return std::hypot(d.x - m.x, d.y - m.y) < opt.dedupe_distance;
        });
        if (!dup) distinct.push_back(m);
    }

    MeanFieldSolution sol;
    sol.n_spins = p.n_spins;
    const double rt = std::sqrt(double(p.n_spins));
    for (const auto& m : distinct) {
        const cplx beta(rt * m.x, rt * m.y);
        sol.minima.push_back({eliminate_alpha(beta, p), beta, Phase::Normal, std::nullopt,
                              p.n_spins});
    }
    sol.phase = infer_phase(sol.minima);
    for (auto& m : sol.minima) {
        m.phase = sol.phase;
        if (sol.phase == Phase::EM) m.theta = std::arg(m.beta);
    }
    sol.continuous_family = sol.phase == Phase::EM;
    sol.energy = reduced_energy(sol.minima.front().beta, p);
    return sol;
}

// ---------------------------------------------------------------------------------------
// Energy landscape in the (Re beta, Im beta) / sqrt(N) plane

struct GridSpec {
    int n_re{201};
    int n_im{201};
    double extent{1.0};  // axes span [-extent, extent]

    void validate() const {
        if (n_re < 2 || n_im < 2) throw std::invalid_argument("GridSpec: need >= 2 points per axis");
        if (!(extent > 0.0)) throw std::invalid_argument("GridSpec: extent must be positive");
    }
};

struct LandscapeGrid {
    std::vector<double> re_beta_axis;  // beta / sqrt(N)
    std::vector<double> im_beta_axis;
    std::vector<double> energy;        // E_G / N, row-major [i_re][i_im]; NaN outside |beta|^2 <= N

    double at(std::size_t i_re, std::size_t i_im) const {
        return energy[i_re * im_beta_axis.size() + i_im];
    }
    bool valid(std::size_t i_re, std::size_t i_im) const { return !std::isnan(at(i_re, i_im)); }

    double min_energy() const {
        double m = std::numeric_limits<double>::infinity();
        for (double e : energy)
            if (!std::isnan(e)) m = std::min(m, e);
        return m;
    }

    // Cells whose energy ties the grid minimum within rel_tol.
    std::vector<std::array<std::size_t, 2>> min_cells(double rel_tol = 1e-13) const {
        const double m = min_energy();
        const double tol = rel_tol * std::max(std::abs(m), 1e-300);
        std::vector<std::array<std::size_t, 2>> cells;
        for (std::size_t i = 0; i < re_beta_axis.size(); ++i)
            for (std::size_t j = 0; j < im_beta_axis.size(); ++j)
                if (valid(i, j) && at(i, j) <= m + tol) cells.push_back({i, j});
        return cells;
    }
};

namespace detail {

// Symmetric axis: the sample at index n-1-i is exactly the negative of sample i.
inline std::vector<double> symmetric_axis(int n, double extent) {
    std::vector<double> axis(n);
    for (int i = 0; i < n; ++i) axis[i] = extent * double(2 * i - (n - 1)) / double(n - 1);
    return axis;
}

} // namespace detail

/// E_G(beta, beta*) / N sampled after eliminating alpha.
inline LandscapeGrid landscape(const ModelParams& p, const GridSpec& grid = {}) {
    p.validate();
    grid.validate();
    LandscapeGrid out;
    out.re_beta_axis = detail::symmetric_axis(grid.n_re, grid.extent);
    out.im_beta_axis = detail::symmetric_axis(grid.n_im, grid.extent);
    out.energy.resize(std::size_t(grid.n_re) * grid.n_im);
    const double rt = std::sqrt(double(p.n_spins));
    for (int i = 0; i < grid.n_re; ++i) {
        for (int j = 0; j < grid.n_im; ++j) {
            const double x = out.re_beta_axis[i];
            const double y = out.im_beta_axis[j];
            double e = std::numeric_limits<double>::quiet_NaN();
            if (x * x + y * y <= 1.0) e = reduced_energy(cplx(rt * x, rt * y), p) / p.n_spins;
            out.energy[std::size_t(i) * grid.n_im + j] = e;
        }
    }
    return out;
}

// ---------------------------------------------------------------------------------------
// Transition order from one-sided derivatives of the minimized energy

enum class TransitionOrder { None, First, Second };

inline std::string_view order_name(TransitionOrder o) {
    switch (o) {
    case TransitionOrder::None: return "none";
    case TransitionOrder::First: return "first";
    case TransitionOrder::Second: return "second";
    }
    return "?";
}

// Straight line in the (omega_E, omega_M) plane.
struct CouplingPath {
    double start_E{0.0};
    double start_M{0.0};
    double end_E{0.0};
    double end_M{0.0};

    double length() const { return std::hypot(end_E - start_E, end_M - start_M); }
};

struct TransitionOptions {
    double step{1e-3};               // stencil spacing, times omega
    double first_threshold{1e-3};    // jump of d(E_G/N)/ds
    double second_threshold{1e-2};   // jump of d2(E_G/N)/ds2, times 1/omega
    int samples{2001};
};

struct TransitionReport {
    CouplingPath path;
    std::optional<std::array<double, 2>> crossing;  // (omega_E, omega_M)
    Phase before{Phase::Normal};
    Phase after{Phase::Normal};
    TransitionOrder order{TransitionOrder::None};
    double first_jump{0.0};
    double second_jump{0.0};
    double first_threshold{0.0};
    double second_threshold{0.0};
};

/// Locates the single boundary crossed by `path` and classifies it from the jumps of the
/// first and second directional derivatives of the minimized E_G / N, each estimated with
/// five-point one-sided stencils on either side of the crossing.
inline TransitionReport transition_order(const CouplingPath& path, const ModelParams& base,
                                         const TransitionOptions& opt = {}) {
    base.validate();
    TransitionReport rep;
    rep.path = path;
    rep.first_threshold = opt.first_threshold;
    rep.second_threshold = opt.second_threshold / base.omega;

    const double len = path.length();
    if (!(len > 0.0)) throw std::invalid_argument("transition_order: degenerate path");
    const double dE = (path.end_E - path.start_E) / len;
    const double dM = (path.end_M - path.start_M) / len;

    auto at = [&](double s) {
        ModelParams q = base;
        q.omega_E = std::max(0.0, path.start_E + s * dE);
        q.omega_M = std::max(0.0, path.start_M + s * dM);
        return q;
    };
    auto label = [&](double s) { return classify_phase(at(s)); };

    // Sampled label sequence, with repeated labels collapsed and an isolated EM sample
    // between Electric and Magnetic absorbed into that crossing.
    struct Run { Phase phase; double first_s; double last_s; };
    std::vector<Run> runs;
    for (int i = 0; i < opt.samples; ++i) {
        const double s = len * double(i) / double(opt.samples - 1);
        const Phase ph = label(s);
        if (runs.empty() || runs.back().phase != ph) runs.push_back({ph, s, s});
        else runs.back().last_s = s;
    }
    for (std::size_t i = 1; i + 1 < runs.size();) {
        const bool sandwiched = runs[i].phase == Phase::EM && runs[i - 1].phase != Phase::EM &&
                                runs[i + 1].phase != Phase::EM &&
                                runs[i - 1].phase != Phase::Normal &&
                                runs[i + 1].phase != Phase::Normal;
        if (sandwiched) runs.erase(runs.begin() + std::ptrdiff_t(i));
        else ++i;
    }
    if (runs.size() == 1) {
        rep.before = rep.after = runs.front().phase;
        return rep;
    }
    if (runs.size() > 2)
        throw std::invalid_argument("transition_order: path crosses more than one boundary");

    rep.before = runs[0].phase;
    rep.after = runs[1].phase;
    double lo = runs[0].last_s;
    double hi = runs[1].first_s;
    for (int i = 0; i < 200 && hi - lo > 0.0; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        (label(mid) == rep.before ? lo : hi) = mid;
    }
    const double sc = lo;
    const auto cp = at(sc);
    rep.crossing = std::array<double, 2>{cp.omega_E, cp.omega_M};

    const double h = opt.step * base.omega;
    auto energy = [&](double s) { return minimum_energy_per_spin(at(s)); };
    // Nodes at distances h..5h on either side, so no node sits on the kink itself (which
    // is only resolved to the EM band width); derivatives are extrapolated to the crossing.
    std::array<double, 5> left{}, right{};
    for (int k = 0; k < 5; ++k) {
        left[k] = energy(sc - (k + 1) * h);
        right[k] = energy(sc + (k + 1) * h);
    }
    auto d1_forward = [h](const std::array<double, 5>& f) {
        return (-77.0 * f[0] + 214.0 * f[1] - 234.0 * f[2] + 122.0 * f[3] - 25.0 * f[4]) /
               (12.0 * h);
    };
    auto d2_one_sided = [h](const std::array<double, 5>& f) {
        return (71.0 * f[0] - 236.0 * f[1] + 294.0 * f[2] - 164.0 * f[3] + 35.0 * f[4]) /
               (12.0 * h * h);
    };
    const double d1_right = d1_forward(right);
    const double d1_left = -d1_forward(left);
    rep.first_jump = std::abs(d1_right - d1_left);
    rep.second_jump = std::abs(d2_one_sided(right) - d2_one_sided(left));

    if (rep.first_jump > rep.first_threshold) rep.order = TransitionOrder::First;
    else if (rep.second_jump > rep.second_threshold) rep.order = TransitionOrder::Second;
    return rep;
}

} // namespace qdicke

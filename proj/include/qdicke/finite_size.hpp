// finite_size.hpp — exact diagonalization of the two-quadrature model in the collective
// spin (j = N/2) x truncated Fock basis

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "qdicke/meanfield.hpp"
#include "qdicke/model.hpp"

namespace qdicke {

/// |n> (x) |j, m> with n in [0, fock_cutoff], m = k - N/2, k in [0, N].
/// Flat index = n * (N + 1) + k.
struct SpinBosonBasis {
    int n_spins{1};
    int fock_cutoff{1};

    SpinBosonBasis() = default;
    SpinBosonBasis(int n, int cutoff) : n_spins(n), fock_cutoff(cutoff) {
        if (n < 1) throw std::invalid_argument("SpinBosonBasis: n_spins must be >= 1");
        if (cutoff < 0) throw std::invalid_argument("SpinBosonBasis: fock_cutoff must be >= 0");
    }

    std::size_t spin_dimension() const { return std::size_t(n_spins) + 1; }
    std::size_t dimension() const { return spin_dimension() * (std::size_t(fock_cutoff) + 1); }

    std::size_t index(int n, int k) const {
        return std::size_t(n) * spin_dimension() + std::size_t(k);
    }
    // (n, k) of a flat index.
    std::pair<int, int> state(std::size_t i) const {
        return {int(i / spin_dimension()), int(i % spin_dimension())};
    }
    double jz(int k) const { return k - 0.5 * n_spins; }

    // <k+1| J+ |k> = sqrt(j(j+1) - m(m+1)) = sqrt((N - k)(k + 1))
    double j_plus(int k) const { return std::sqrt(double(n_spins - k) * double(k + 1)); }

    int parity(std::size_t i) const {
        auto [n, k] = state(i);
        return ((n + k) % 2 == 0) ? 1 : -1;
    }
    // Eigenvalue of a^dag a + J_z + N/2, the total excitation number.
    int excitations(std::size_t i) const {
        auto [n, k] = state(i);
        return n + k;
    }
};

struct MatrixEntry {
    std::size_t row{0};
    std::size_t col{0};
    double value{0.0};
};

struct SparseHamiltonian {
    SpinBosonBasis basis;
    ModelParams params;
    std::vector<MatrixEntry> entries;  // both triangles stored

    std::size_t dimension() const { return basis.dimension(); }

    Eigen::SparseMatrix<double> matrix() const {
        std::vector<Eigen::Triplet<double>> t;
        t.reserve(entries.size());
        for (const auto& e : entries) t.emplace_back(Eigen::Index(e.row), Eigen::Index(e.col), e.value);
        const auto d = Eigen::Index(dimension());
        Eigen::SparseMatrix<double> m(d, d);
        m.setFromTriplets(t.begin(), t.end());
        return m;
    }

    Eigen::MatrixXd dense() const { return Eigen::MatrixXd(matrix()); }

    // Frobenius norm; used as ||H|| in all relative tolerances of this module.
    double norm() const {
        double s = 0.0;
        for (const auto& e : entries) s += e.value * e.value;
        return std::sqrt(s);
    }
};

/// Matrix of
///   w0 J_z + w a^dag a + (W_E/sqrt N)(a + a^dag)(J+ + J-) + (W_M/sqrt N)(a - a^dag)(J+ - J-).
/// Expanded, the couplings are (W_E + W_M)/sqrt N on a J+ + a^dag J- and (W_E - W_M)/sqrt N on
/// a^dag J+ + a J-; both products of real matrices, so H is real symmetric.
inline SparseHamiltonian build_hamiltonian(const ModelParams& p, const SpinBosonBasis& basis) {
    p.validate();
    if (p.n_spins != basis.n_spins)
        throw std::invalid_argument("build_hamiltonian: params and basis disagree on N");
    SparseHamiltonian h{basis, p, {}};
    const double rt = std::sqrt(double(p.n_spins));
    const double g_rot = (p.omega_E + p.omega_M) / rt;
    const double g_counter = (p.omega_E - p.omega_M) / rt;
    const int nmax = basis.fock_cutoff;
    const int ns = basis.n_spins;
    h.entries.reserve(basis.dimension() * 5);

    auto add_pair = [&](std::size_t i, std::size_t j, double v) {
        if (v == 0.0) return;
        h.entries.push_back({i, j, v});
        h.entries.push_back({j, i, v});
    };

    for (int n = 0; n <= nmax; ++n) {
        for (int k = 0; k <= ns; ++k) {
            const std::size_t i = basis.index(n, k);
            const double diag = p.omega0 * basis.jz(k) + p.omega * n;
            if (diag != 0.0) h.entries.push_back({i, i, diag});
            if (k == ns) continue;
            const double jp = basis.j_plus(k);
            // a J+ : |n, k> -> sqrt(n) |n-1, k+1>
            if (n > 0) add_pair(basis.index(n - 1, k + 1), i, g_rot * std::sqrt(double(n)) * jp);
            // a^dag J+ : |n, k> -> sqrt(n+1) |n+1, k+1>
            if (n < nmax)
                add_pair(basis.index(n + 1, k + 1), i, g_counter * std::sqrt(double(n + 1)) * jp);
        }
    }
    return h;
}

// ---------------------------------------------------------------------------------------
// Symmetries

// psi -> U conj(psi) with diagonal U.
struct AntiunitaryOperator {
    Eigen::VectorXd unitary_diagonal;

    Eigen::MatrixXcd transform(const Eigen::MatrixXcd& op) const {
        const auto u = unitary_diagonal.asDiagonal();
        return u * op.conjugate() * u;  // U real diagonal, U^-1 = U
    }
};

struct SymmetryOperators {
    Eigen::VectorXd parity;          // diagonal of exp(i pi (a^dag a + J_z + N/2)), entries +-1
    Eigen::VectorXd u1_generator;    // diagonal of a^dag a + J_z
    AntiunitaryOperator t_E;         // Pi K: flips (a + a^dag) and J_x
    AntiunitaryOperator t_M;         // K: flips i(a - a^dag) and J_y
};

inline SymmetryOperators symmetry_operators(const SpinBosonBasis& basis) {
    const auto d = Eigen::Index(basis.dimension());
    SymmetryOperators s;
    s.parity.resize(d);
    s.u1_generator.resize(d);
    for (Eigen::Index i = 0; i < d; ++i) {
        auto [n, k] = basis.state(std::size_t(i));
        s.parity[i] = basis.parity(std::size_t(i));
        s.u1_generator[i] = n + basis.jz(k);
    }
    s.t_E.unitary_diagonal = s.parity;
    s.t_M.unitary_diagonal = Eigen::VectorXd::Ones(d);
    return s;
}

/// Frobenius norm of [H, D] for diagonal D, optionally restricted to Fock levels below the
/// cutoff (the truncated ladder operators violate the algebra at the top level).
inline double commutator_norm(const SparseHamiltonian& h, const Eigen::VectorXd& diag,
                              bool below_cutoff = false) {
    double s = 0.0;
    for (const auto& e : h.entries) {
        if (below_cutoff && (h.basis.state(e.row).first == h.basis.fock_cutoff ||
                             h.basis.state(e.col).first == h.basis.fock_cutoff))
            continue;
        const double c = e.value * (diag[Eigen::Index(e.col)] - diag[Eigen::Index(e.row)]);
        s += c * c;
    }
    return std::sqrt(s);
}

struct BlockStructure {
    double off_block_norm{0.0};
    std::size_t block_count{0};
};

/// Frobenius weight of H between different labels, and the number of distinct labels.
inline BlockStructure block_structure(const SparseHamiltonian& h, const std::vector<int>& labels) {
    BlockStructure b;
    double s = 0.0;
    for (const auto& e : h.entries)
        if (labels[e.row] != labels[e.col]) s += e.value * e.value;
    b.off_block_norm = std::sqrt(s);
    b.block_count = std::set<int>(labels.begin(), labels.end()).size();
    return b;
}

inline std::vector<int> parity_labels(const SpinBosonBasis& basis) {
    std::vector<int> l(basis.dimension());
    for (std::size_t i = 0; i < l.size(); ++i) l[i] = basis.parity(i);
    return l;
}

inline std::vector<int> excitation_labels(const SpinBosonBasis& basis) {
    std::vector<int> l(basis.dimension());
    for (std::size_t i = 0; i < l.size(); ++i) l[i] = basis.excitations(i);
    return l;
}

// ---------------------------------------------------------------------------------------
// Eigensolver

struct EigenPairs {
    Eigen::VectorXd values;   // ascending
    Eigen::MatrixXd vectors;  // columns
};

namespace detail {

inline EigenPairs dense_lowest(const Eigen::MatrixXd& a, int k) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a);
    if (es.info() != Eigen::Success) throw std::runtime_error("dense eigensolver failed");
    const int m = std::min<int>(k, int(a.rows()));
    return {es.eigenvalues().head(m), es.eigenvectors().leftCols(m)};
}

} // namespace detail

struct LanczosOptions {
    double residual_tol{1e-12};   // relative to ||A||
    int max_steps{1000};
    int dense_below{64};          // dimensions at or below this go straight to the dense solver
    int dense_fallback_below{2000};
    std::uint64_t seed{0x5eed};
};

/// Lowest k eigenpairs of a real symmetric sparse matrix: Lanczos with full
/// reorthogonalization, dense solver for small matrices or when Lanczos fails.
inline EigenPairs lowest_eigenpairs(const Eigen::SparseMatrix<double>& a, int k, double a_norm,
                                    const LanczosOptions& opt = {}) {
    const Eigen::Index dim = a.rows();
    if (k < 1) throw std::invalid_argument("lowest_eigenpairs: k must be >= 1");
    if (dim <= opt.dense_below || 4 * k >= dim) return detail::dense_lowest(Eigen::MatrixXd(a), k);

    const Eigen::Index max_steps = std::min<Eigen::Index>(dim, opt.max_steps);
    Eigen::MatrixXd v(dim, max_steps);
    std::vector<double> alpha, beta;
    std::mt19937_64 rng(opt.seed);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    Eigen::VectorXd q(dim);
    for (Eigen::Index i = 0; i < dim; ++i) q[i] = uni(rng);
    q.normalize();
    const double scale = std::max(a_norm, std::numeric_limits<double>::min());

    for (Eigen::Index j = 0; j < max_steps; ++j) {
        v.col(j) = q;
        Eigen::VectorXd w = a * q;
        const double aj = q.dot(w);
        alpha.push_back(aj);
        for (int pass = 0; pass < 2; ++pass) {
            const Eigen::VectorXd c = v.leftCols(j + 1).transpose() * w;
            w.noalias() -= v.leftCols(j + 1) * c;
        }
        const double bj = w.norm();
        beta.push_back(bj);

        const Eigen::Index m = j + 1;
        const bool exhausted = bj < 1e-13 * scale;
        if (m >= k && (m % 10 == 0 || exhausted || m == max_steps)) {
            Eigen::MatrixXd t = Eigen::MatrixXd::Zero(m, m);
            for (Eigen::Index i = 0; i < m; ++i) {
                t(i, i) = alpha[std::size_t(i)];
                if (i + 1 < m) t(i, i + 1) = t(i + 1, i) = beta[std::size_t(i)];
            }
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(t);
            bool ok = true;
            for (int i = 0; i < k; ++i)
                ok = ok && std::abs(bj * es.eigenvectors()(m - 1, i)) < opt.residual_tol * scale;
            if (ok) {
                EigenPairs out{es.eigenvalues().head(k), v.leftCols(m) * es.eigenvectors().leftCols(k)};
                for (int i = 0; i < k; ++i) out.vectors.col(i).normalize();
                return out;
            }
            if (exhausted) break;
        }
        q = w / bj;
    }
    if (dim < opt.dense_fallback_below) return detail::dense_lowest(Eigen::MatrixXd(a), k);
    throw std::runtime_error("lowest_eigenpairs: Lanczos did not converge");
}

struct SpectralResult {
    std::vector<double> eigenvalues;     // lowest k, ascending
    std::vector<int> parities;           // parity sector of each eigenvalue
    std::vector<double> residuals;       // ||H psi - E psi|| per pair
    Eigen::MatrixXd ground_vectors;      // states degenerate with E0 at the tolerance
    double energy_per_spin{0.0};         // E0 / N
    double gap{0.0};                     // E1 - E0
    int degeneracy{1};
    double sector_ground[2]{0.0, 0.0};   // lowest energy with parity +1, -1
    double hamiltonian_norm{0.0};

    double ground_energy() const { return eigenvalues.front(); }
    double parity_splitting() const { return std::abs(sector_ground[0] - sector_ground[1]); }
};

inline constexpr double kDegeneracyTolerance = 1e-7;   // times ||H||
inline constexpr double kResidualTolerance = 1e-9;     // times ||H||

/// Lowest k eigenpairs. H commutes with the parity, so each parity block is solved on its
/// own and the results merged; parity doublets are then resolved regardless of splitting.
inline SpectralResult ground_spectrum(const SparseHamiltonian& h, int k,
                                      const LanczosOptions& opt = {}) {
    if (k < 2) throw std::invalid_argument("ground_spectrum: k must be >= 2");
    const auto full = h.matrix();
    const double hn = h.norm();
    const auto labels = parity_labels(h.basis);

    struct Pair { double value; int parity; Eigen::VectorXd vec; };
    std::vector<Pair> pairs;
    SpectralResult r;
    r.hamiltonian_norm = hn;

    for (int sector : {1, -1}) {
        std::vector<Eigen::Index> idx;
        std::vector<Eigen::Index> pos(h.dimension(), -1);
        for (std::size_t i = 0; i < labels.size(); ++i)
            if (labels[i] == sector) {
                pos[i] = Eigen::Index(idx.size());
                idx.push_back(Eigen::Index(i));
            }
        if (idx.empty()) continue;
        std::vector<Eigen::Triplet<double>> t;
        for (const auto& e : h.entries)
            if (pos[e.row] >= 0 && pos[e.col] >= 0) t.emplace_back(pos[e.row], pos[e.col], e.value);
        Eigen::SparseMatrix<double> block(Eigen::Index(idx.size()), Eigen::Index(idx.size()));
        block.setFromTriplets(t.begin(), t.end());

        const int kk = std::min<int>(k, int(idx.size()));
        auto ep = lowest_eigenpairs(block, kk, hn, opt);
        r.sector_ground[sector == 1 ? 0 : 1] = ep.values[0];
        for (Eigen::Index c = 0; c < ep.values.size(); ++c) {
            Eigen::VectorXd v = Eigen::VectorXd::Zero(Eigen::Index(h.dimension()));
            for (std::size_t i = 0; i < idx.size(); ++i) v[idx[i]] = ep.vectors(Eigen::Index(i), c);
            pairs.push_back({ep.values[c], sector, std::move(v)});
        }
    }
    std::stable_sort(pairs.begin(), pairs.end(),
                     [](const Pair& a, const Pair& b) { return a.value < b.value; });
    if (pairs.size() > std::size_t(k)) pairs.resize(std::size_t(k));

    const double e0 = pairs.front().value;
    std::vector<Eigen::Index> ground;
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        r.eigenvalues.push_back(pairs[i].value);
        r.parities.push_back(pairs[i].parity);
        const double res = (full * pairs[i].vec - pairs[i].value * pairs[i].vec).norm();
        r.residuals.push_back(res);
        if (!(res < kResidualTolerance * hn))
            throw std::runtime_error("ground_spectrum: eigenpair residual above tolerance");
        if (pairs[i].value - e0 <= kDegeneracyTolerance * hn) ground.push_back(Eigen::Index(i));
    }
    r.degeneracy = int(ground.size());
    r.ground_vectors.resize(Eigen::Index(h.dimension()), Eigen::Index(ground.size()));
    for (std::size_t c = 0; c < ground.size(); ++c)
        r.ground_vectors.col(Eigen::Index(c)) = pairs[std::size_t(ground[c])].vec;
    r.energy_per_spin = e0 / h.params.n_spins;
    r.gap = r.eigenvalues.size() > 1 ? r.eigenvalues[1] - e0 : 0.0;
    return r;
}

// ---------------------------------------------------------------------------------------
// Fock-cutoff convergence

struct CutoffOptions {
    int k{4};
    double initial_factor{4.0};   // n_max = factor * N to start
    double growth{1.25};
    double rel_tol{1e-8};
    int max_escalations{10};
    std::size_t max_dimension{20000};
};

class CutoffNotConverged : public std::runtime_error {
public:
    CutoffNotConverged(double previous, double last)
        : std::runtime_error(message(previous, last)), previous_estimate(previous),
          last_estimate(last) {}
    double previous_estimate;
    double last_estimate;

private:
    static std::string message(double a, double b) {
        std::ostringstream os;
        os.precision(17);
        os << "Fock cutoff did not converge: E0 estimates " << a << " and " << b;
        return os.str();
    }
};

struct ConvergedSpectrum {
    SpectralResult spectrum;
    int fock_cutoff{0};
    double previous_ground_energy{0.0};
};

/// Raises n_max by `growth` until E0 moves by less than rel_tol * |E0|.
inline ConvergedSpectrum converged_spectrum(const ModelParams& p, const CutoffOptions& opt = {}) {
    p.validate();
    int cutoff = std::max(1, int(std::ceil(opt.initial_factor * p.n_spins)));
    auto current = ground_spectrum(build_hamiltonian(p, SpinBosonBasis(p.n_spins, cutoff)), opt.k);
    for (int step = 0; step < opt.max_escalations; ++step) {
        const int next = std::max(cutoff + 1, int(std::ceil(opt.growth * cutoff)));
        const SpinBosonBasis basis(p.n_spins, next);
        if (basis.dimension() > opt.max_dimension) break;
        auto refined = ground_spectrum(build_hamiltonian(p, basis), opt.k);
        const double e_old = current.ground_energy();
        const double e_new = refined.ground_energy();
        if (std::abs(e_new - e_old) < opt.rel_tol * std::max(std::abs(e_new), 1.0))
            return {std::move(refined), next, e_old};
        current = std::move(refined);
        cutoff = next;
        if (step + 1 == opt.max_escalations) throw CutoffNotConverged(e_old, e_new);
    }
    throw CutoffNotConverged(current.ground_energy(), current.ground_energy());
}

// ---------------------------------------------------------------------------------------
// Comparison with the mean-field energy

struct ConvergenceRow {
    int n_spins{0};
    int fock_cutoff{0};
    double energy_per_spin{0.0};      // E0 / N
    double meanfield_per_spin{0.0};   // E_MF / N = min E_G / N - omega0 / 2
    double deviation{0.0};
    double gap{0.0};
    double parity_splitting{0.0};
};

struct ConvergenceTable {
    ModelParams params;
    Phase phase{Phase::Normal};
    std::vector<ConvergenceRow> rows;
    bool deviation_monotone{true};
    bool energy_sign_ok{true};
    bool splitting_decreasing{true};  // superradiant phases only
    double bound_constant{0.0};       // max_N  N (E0/N - E_MF/N)

    bool passed() const {
        const bool doublet = phase == Phase::Electric || phase == Phase::Magnetic;
        return deviation_monotone && energy_sign_ok && (!doublet || splitting_decreasing);
    }
};

// Splittings below this fraction of |E0| are at the eigensolver's resolution.
inline constexpr double kSplittingFloor = 1e-12;
inline constexpr double kMonotoneSlack = 1e-12;

/// One ED row at size n compared with the mean-field energy density.
inline ConvergenceRow convergence_row(const ModelParams& p, int n, const CutoffOptions& opt = {}) {
    ModelParams q = p;
    q.n_spins = n;
    auto cs = converged_spectrum(q, opt);
    ConvergenceRow row;
    row.n_spins = n;
    row.fock_cutoff = cs.fock_cutoff;
    row.energy_per_spin = cs.spectrum.energy_per_spin;
    row.meanfield_per_spin = minimum_energy_per_spin(q) - 0.5 * q.omega0;
    row.deviation = std::abs(row.energy_per_spin - row.meanfield_per_spin);
    row.gap = cs.spectrum.gap;
    row.parity_splitting = cs.spectrum.parity_splitting();
    return row;
}

/// Fills the verdict fields of a table from its rows (ascending N).
inline void assess_convergence(ConvergenceTable& t) {
    t.deviation_monotone = true;
    t.energy_sign_ok = true;
    t.splitting_decreasing = true;
    t.bound_constant = -std::numeric_limits<double>::infinity();
    const double half = 0.5 * t.params.omega0;
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
        const auto& row = t.rows[i];
        t.bound_constant = std::max(
            t.bound_constant, row.n_spins * (row.energy_per_spin - row.meanfield_per_spin));
        if (t.phase == Phase::Normal)
            t.energy_sign_ok = t.energy_sign_ok && row.energy_per_spin <= -half + kMonotoneSlack;
        else
            t.energy_sign_ok = t.energy_sign_ok && row.energy_per_spin < -half;
        if (i == 0) continue;
        const auto& prev = t.rows[i - 1];
        t.deviation_monotone = t.deviation_monotone && row.deviation <= prev.deviation + kMonotoneSlack;
        const double floor = kSplittingFloor * std::abs(row.energy_per_spin * row.n_spins);
        const bool both_unresolved = prev.parity_splitting < floor && row.parity_splitting < floor;
        t.splitting_decreasing = t.splitting_decreasing &&
                                 (row.parity_splitting < prev.parity_splitting || both_unresolved);
    }
}

/// ED ground energies per spin for each N against the mean-field value.
inline ConvergenceTable meanfield_convergence(const ModelParams& p, const std::vector<int>& n_list,
                                              const CutoffOptions& opt = {}) {
    if (n_list.empty()) throw std::invalid_argument("meanfield_convergence: empty N list");
    if (!std::is_sorted(n_list.begin(), n_list.end()) ||
        std::adjacent_find(n_list.begin(), n_list.end()) != n_list.end())
        throw std::invalid_argument("meanfield_convergence: N list must be strictly ascending");
    ConvergenceTable t;
    t.params = p;
    t.phase = classify_phase(p);
    for (int n : n_list) t.rows.push_back(convergence_row(p, n, opt));
    assess_convergence(t);
    return t;
}

} // namespace qdicke

#include <cmath>
#include <complex>

#include <gtest/gtest.h>

#include "qdicke/finite_size.hpp"

using namespace qdicke;

namespace {

Eigen::MatrixXd kron(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
    Eigen::MatrixXd out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

struct Ops {
    Eigen::MatrixXd a, jp, jz;
};

Ops single_ops(int n_spins, int cutoff) {
    Ops o;
    o.a = Eigen::MatrixXd::Zero(cutoff + 1, cutoff + 1);
    for (int n = 1; n <= cutoff; ++n) o.a(n - 1, n) = std::sqrt(double(n));
    const double j = 0.5 * n_spins;
    o.jp = Eigen::MatrixXd::Zero(n_spins + 1, n_spins + 1);
    o.jz = Eigen::MatrixXd::Zero(n_spins + 1, n_spins + 1);
    for (int k = 0; k <= n_spins; ++k) {
        const double m = k - j;
        o.jz(k, k) = m;
        if (k < n_spins) o.jp(k + 1, k) = std::sqrt(j * (j + 1) - m * (m + 1));
    }
    return o;
}

// H written in the quadrature form with Kronecker products; independent of the
// rotating / counter-rotating expansion used by the library.
Eigen::MatrixXd kronecker_hamiltonian(const ModelParams& p, int cutoff) {
    const auto o = single_ops(p.n_spins, cutoff);
    const Eigen::MatrixXd ib = Eigen::MatrixXd::Identity(cutoff + 1, cutoff + 1);
    const Eigen::MatrixXd is = Eigen::MatrixXd::Identity(p.n_spins + 1, p.n_spins + 1);
    const Eigen::MatrixXd ad = o.a.transpose();
    const Eigen::MatrixXd jm = o.jp.transpose();
    const double rt = std::sqrt(double(p.n_spins));
    return p.omega0 * kron(ib, o.jz) + p.omega * kron(ad * o.a, is) +
           p.omega_E / rt * kron(o.a + ad, o.jp + jm) + p.omega_M / rt * kron(o.a - ad, o.jp - jm);
}

Eigen::MatrixXcd quadrature_x(const SpinBosonBasis& b) {
    const auto o = single_ops(b.n_spins, b.fock_cutoff);
    return kron(o.a + o.a.transpose(), Eigen::MatrixXd::Identity(b.n_spins + 1, b.n_spins + 1))
        .cast<std::complex<double>>();
}

Eigen::MatrixXcd quadrature_p(const SpinBosonBasis& b) {
    const auto o = single_ops(b.n_spins, b.fock_cutoff);
    const Eigen::MatrixXd d =
        kron(o.a - o.a.transpose(), Eigen::MatrixXd::Identity(b.n_spins + 1, b.n_spins + 1));
    return std::complex<double>(0, 1) * d.cast<std::complex<double>>();
}

Eigen::MatrixXcd spin_x(const SpinBosonBasis& b) {
    const auto o = single_ops(b.n_spins, b.fock_cutoff);
    const Eigen::MatrixXd ib = Eigen::MatrixXd::Identity(b.fock_cutoff + 1, b.fock_cutoff + 1);
    return (0.5 * kron(ib, o.jp + o.jp.transpose())).cast<std::complex<double>>();
}

Eigen::MatrixXcd spin_y(const SpinBosonBasis& b) {
    const auto o = single_ops(b.n_spins, b.fock_cutoff);
    const Eigen::MatrixXd ib = Eigen::MatrixXd::Identity(b.fock_cutoff + 1, b.fock_cutoff + 1);
    return std::complex<double>(0, -0.5) * kron(ib, o.jp - o.jp.transpose()).cast<std::complex<double>>();
}

} // namespace

TEST(Basis, IndexRoundTripAndLabels) {
    const SpinBosonBasis b(3, 4);
    EXPECT_EQ(b.dimension(), 20u);
    for (std::size_t i = 0; i < b.dimension(); ++i) {
        auto [n, k] = b.state(i);
        EXPECT_EQ(b.index(n, k), i);
        EXPECT_EQ(b.excitations(i), n + k);
        EXPECT_EQ(b.parity(i), (n + k) % 2 ? -1 : 1);
    }
    EXPECT_DOUBLE_EQ(b.j_plus(0), std::sqrt(3.0));
    EXPECT_DOUBLE_EQ(b.j_plus(1), 2.0);
    EXPECT_THROW(SpinBosonBasis(0, 3), std::invalid_argument);
}

TEST(Hamiltonian, SingleSpinOneBosonByHand) {
    const ModelParams p{1.3, 0.7, 0.4, 0.1, 1};
    const auto h = build_hamiltonian(p, SpinBosonBasis(1, 1)).dense();
    Eigen::Matrix4d ref = Eigen::Matrix4d::Zero();
    ref(0, 0) = -0.35;
    ref(1, 1) = 0.35;
    ref(2, 2) = 1.3 - 0.35;
    ref(3, 3) = 1.3 + 0.35;
    ref(1, 2) = ref(2, 1) = 0.5;  // a J+ : |1,down> -> |0,up>
    ref(0, 3) = ref(3, 0) = 0.3;  // a^dag J+ : |0,down> -> |1,up>
    EXPECT_LT((h - ref).norm(), 1e-15);
}

TEST(Hamiltonian, MatchesKroneckerOracle) {
    for (const ModelParams& p : {ModelParams{1.0, 1.0, 0.7, 0.3, 3}, ModelParams{1.4, 0.6, 0.2, 1.1, 3},
                                 ModelParams{0.9, 1.2, 1.0, 1.0, 4}}) {
        const auto h = build_hamiltonian(p, SpinBosonBasis(p.n_spins, 5)).dense();
        const auto ref = kronecker_hamiltonian(p, 5);
        EXPECT_LT((h - ref).norm(), 1e-13 * ref.norm());
    }
}

TEST(Hamiltonian, SymmetricWithFrobeniusNorm) {
    const auto h = build_hamiltonian({1.0, 1.0, 0.8, 0.5, 4}, SpinBosonBasis(4, 10));
    const auto d = h.dense();
    EXPECT_EQ((d - d.transpose()).norm(), 0.0);
    EXPECT_NEAR(h.norm(), d.norm(), 1e-12 * d.norm());
}

TEST(Symmetries, ParitySquaresToIdentityAndCommutes) {
    const SpinBosonBasis b(4, 9);
    const auto s = symmetry_operators(b);
    EXPECT_EQ((s.parity.array().square() - 1.0).abs().maxCoeff(), 0.0);
    for (const ModelParams& p : {ModelParams{1, 1, 0.9, 0.1, 4}, ModelParams{1, 1, 1.0, 1.0, 4}}) {
        const auto h = build_hamiltonian(p, b);
        EXPECT_LT(commutator_norm(h, s.parity), 1e-12 * h.norm());
        const auto blocks = block_structure(h, parity_labels(b));
        EXPECT_EQ(blocks.off_block_norm, 0.0);
        EXPECT_EQ(blocks.block_count, 2u);
    }
}

TEST(Symmetries, U1OnlyOnTheDiagonal) {
    const SpinBosonBasis b(4, 9);
    const auto s = symmetry_operators(b);
    const auto diag = build_hamiltonian({1, 1, 0.8, 0.8, 4}, b);
    EXPECT_LT(commutator_norm(diag, s.u1_generator), 1e-12 * diag.norm());
    const auto blocks = block_structure(diag, excitation_labels(b));
    EXPECT_EQ(blocks.off_block_norm, 0.0);
    EXPECT_EQ(blocks.block_count, std::size_t(b.fock_cutoff + b.n_spins + 1));

    const auto off = build_hamiltonian({1, 1, 0.8, 0.5, 4}, b);
    EXPECT_GT(commutator_norm(off, s.u1_generator), 1e-3 * off.norm());
}

TEST(Symmetries, AntiunitaryActionsOnQuadratures) {
    const SpinBosonBasis b(3, 6);
    const auto s = symmetry_operators(b);
    const auto x = quadrature_x(b), pq = quadrature_p(b), jx = spin_x(b), jy = spin_y(b);
    // T_E flips (a + a^dag) and J_x; T_M flips i(a - a^dag) and J_y.
    EXPECT_LT((s.t_E.transform(x) + x).norm(), 1e-14);
    EXPECT_LT((s.t_E.transform(jx) + jx).norm(), 1e-14);
    EXPECT_LT((s.t_E.transform(pq) - pq).norm(), 1e-14);
    EXPECT_LT((s.t_E.transform(jy) - jy).norm(), 1e-14);
    EXPECT_LT((s.t_M.transform(pq) + pq).norm(), 1e-14);
    EXPECT_LT((s.t_M.transform(jy) + jy).norm(), 1e-14);
    EXPECT_LT((s.t_M.transform(x) - x).norm(), 1e-14);
    EXPECT_LT((s.t_M.transform(jx) - jx).norm(), 1e-14);
    // The two antiunitaries compose to the parity.
    EXPECT_EQ((s.t_E.unitary_diagonal.cwiseProduct(s.t_M.unitary_diagonal) - s.parity).norm(), 0.0);

    const Eigen::MatrixXcd h =
        build_hamiltonian({1.1, 0.9, 0.7, 0.4, 3}, b).dense().cast<std::complex<double>>();
    EXPECT_LT((s.t_E.transform(h) - h).norm(), 1e-13 * h.norm());
    EXPECT_LT((s.t_M.transform(h) - h).norm(), 1e-13 * h.norm());
}

TEST(Eigensolver, LanczosAgreesWithDense) {
    const auto h = build_hamiltonian({1, 1, 0.9, 0.4, 6}, SpinBosonBasis(6, 300));
    const auto m = h.matrix();
    LanczosOptions opt;
    opt.dense_below = 0;
    opt.dense_fallback_below = 0;
    const auto lz = lowest_eigenpairs(m, 4, h.norm(), opt);
    const auto dn = detail::dense_lowest(Eigen::MatrixXd(m), 4);
    ASSERT_EQ(lz.values.size(), 4);
    for (int i = 0; i < 4; ++i) EXPECT_NEAR(lz.values[i], dn.values[i], 1e-10 * h.norm());
}

TEST(Eigensolver, SmallBlocksUseDenseDirectly) {
    Eigen::SparseMatrix<double> a(3, 3);
    a.insert(0, 0) = 2.0;
    a.insert(1, 1) = -1.0;
    a.insert(2, 2) = 0.5;
    const auto ep = lowest_eigenpairs(a, 2, 1.0);
    EXPECT_DOUBLE_EQ(ep.values[0], -1.0);
    EXPECT_DOUBLE_EQ(ep.values[1], 0.5);
    EXPECT_THROW(lowest_eigenpairs(a, 0, 1.0), std::invalid_argument);
}

TEST(GroundSpectrum, DecoupledLimit) {
    for (int n : {1, 2, 5}) {
        const ModelParams p{1.3, 0.8, 0.0, 0.0, n};
        const auto r = ground_spectrum(build_hamiltonian(p, SpinBosonBasis(n, 6)), 3);
        EXPECT_NEAR(r.ground_energy(), -0.4 * n, 1e-12);
        EXPECT_NEAR(r.gap, 0.8, 1e-12);
        EXPECT_EQ(r.degeneracy, 1);
        EXPECT_EQ(r.parities[0], 1);
    }
}

TEST(GroundSpectrum, RotatingOnlyDiagonalIsExact) {
    for (int n : {2, 4, 8}) {
        const auto cs = converged_spectrum({1, 1, 0.2, 0.2, n});
        EXPECT_NEAR(cs.spectrum.ground_energy(), -0.5 * n, 1e-12 * n);
        EXPECT_NEAR(cs.spectrum.gap, 0.6, 1e-10);
    }
}

TEST(GroundSpectrum, NormalGapApproachesLowerPolariton) {
    const double eps = 0.56568542494923803;
    double prev = 1.0;
    for (int n : {2, 4, 8, 12}) {
        const auto cs = converged_spectrum({1, 1, 0.1, 0.3, n});
        const double d = std::abs(cs.spectrum.gap - eps);
        EXPECT_LT(d, prev);
        prev = d;
    }
    EXPECT_LT(prev, 5e-3);
}

TEST(GroundSpectrum, SuperradiantDoubletCloses) {
    double prev = 1.0;
    for (int n : {4, 8, 12}) {
        const auto cs = converged_spectrum({1, 1, 1.0, 0.0, n});
        const double s = cs.spectrum.parity_splitting();
        EXPECT_LT(s, prev);
        prev = s;
    }
    const auto cs = converged_spectrum({1, 1, 1.0, 0.0, 12});
    EXPECT_EQ(cs.spectrum.degeneracy, 2);
    EXPECT_NE(cs.spectrum.parities[0], cs.spectrum.parities[1]);
}

TEST(GroundSpectrum, SwapInvariance) {
    const auto a = converged_spectrum({1, 1, 0.9, 0.3, 4});
    const auto b = converged_spectrum({1, 1, 0.3, 0.9, 4});
    ASSERT_EQ(a.spectrum.eigenvalues.size(), b.spectrum.eigenvalues.size());
    for (std::size_t i = 0; i < a.spectrum.eigenvalues.size(); ++i)
        EXPECT_NEAR(a.spectrum.eigenvalues[i], b.spectrum.eigenvalues[i], 1e-9);
}

TEST(GroundSpectrum, RejectsFewerThanTwoStates) {
    EXPECT_THROW(ground_spectrum(build_hamiltonian({1, 1, 0.1, 0.1, 2}, SpinBosonBasis(2, 4)), 1),
                 std::invalid_argument);
}

TEST(CutoffConvergence, ReportsBothEstimatesWhenItStops) {
    CutoffOptions opt;
    opt.initial_factor = 1.0;
    opt.rel_tol = 1e-300;
    opt.max_escalations = 2;
    try {
        converged_spectrum({1, 1, 1.2, 0.2, 2}, opt);
        FAIL() << "expected CutoffNotConverged";
    } catch (const CutoffNotConverged& e) {
        EXPECT_TRUE(std::isfinite(e.previous_estimate));
        EXPECT_TRUE(std::isfinite(e.last_estimate));
        EXPECT_LE(e.last_estimate, e.previous_estimate + 1e-12);
    }
}

TEST(CutoffConvergence, CapsTheDimension) {
    CutoffOptions opt;
    opt.max_dimension = 10;
    EXPECT_THROW(converged_spectrum({1, 1, 1.2, 0.2, 2}, opt), CutoffNotConverged);
}

TEST(MeanfieldConvergence, NormalPointIsMonotone) {
    const auto t = meanfield_convergence({1, 1, 0.1, 0.3, 1}, {2, 4, 6, 8});
    EXPECT_TRUE(t.passed());
    for (const auto& r : t.rows) EXPECT_LE(r.energy_per_spin, -0.5 + 1e-12);
    EXPECT_LE(t.bound_constant, 0.0);
}

TEST(MeanfieldConvergence, ElectricPointPasses) {
    const auto t = meanfield_convergence({1, 1, 1.0, 0.0, 1}, {4, 8});
    EXPECT_EQ(t.phase, Phase::Electric);
    EXPECT_TRUE(t.deviation_monotone);
    EXPECT_TRUE(t.splitting_decreasing);
    EXPECT_TRUE(t.passed());
}

TEST(MeanfieldConvergence, SplittingBelowFloorCountsAsResolved) {
    ConvergenceTable t;
    t.params = {1, 1, 1.0, 0.2, 1};
    t.phase = Phase::Electric;
    t.rows = {{12, 0, -1.2, -1.19, 0.01, 0.0, 1e-16}, {16, 0, -1.2, -1.195, 0.005, 0.0, 2e-16}};
    assess_convergence(t);
    EXPECT_TRUE(t.splitting_decreasing);
    t.rows[1].parity_splitting = 1e-3;
    assess_convergence(t);
    EXPECT_FALSE(t.splitting_decreasing);
}

TEST(MeanfieldConvergence, RejectsBadSizeLists) {
    EXPECT_THROW(meanfield_convergence({1, 1, 0.1, 0.1, 1}, {}), std::invalid_argument);
    EXPECT_THROW(meanfield_convergence({1, 1, 0.1, 0.1, 1}, {4, 2}), std::invalid_argument);
    EXPECT_THROW(meanfield_convergence({1, 1, 0.1, 0.1, 1}, {2, 2}), std::invalid_argument);
}

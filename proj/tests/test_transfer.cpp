#include "xxz/algebra.hpp"
#include "xxz/bethe.hpp"
#include "xxz/transfer.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace xxz;

namespace {

Real rel_err(const OperatorMatrix& a, const OperatorMatrix& b) {
    Real scale = max_abs(a) + max_abs(b);
    if (scale == Real(0)) scale = Real(1);
    return max_abs(OperatorMatrix(a - b)) / scale;
}

OperatorMatrix kron(const OperatorMatrix& a, const OperatorMatrix& b) {
    OperatorMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

Complex rand_c(std::mt19937& rng) {
    std::uniform_real_distribution<double> d(-0.8, 0.8);
    return Complex(Real(d(rng)), Real(d(rng)));
}

class TransferTest : public ::testing::Test {
protected:
    ScopedPrecision guard{80};
};

TEST_F(TransferTest, RMatrixAtZeroIsPermutation) {
    const Complex eta(Real(1) / 5, Real(2) / 7);
    OperatorMatrix r = r_matrix(Complex(), eta);
    OperatorMatrix perm = OperatorMatrix::Zero(4, 4);
    perm(0, 0) = perm(3, 3) = perm(1, 2) = perm(2, 1) = Complex(Real(1), Real(0));
    EXPECT_LT(rel_err(r, OperatorMatrix(sh(eta) * perm)), pow10(-70));
}

TEST_F(TransferTest, RMatrixAtaZeroEta) {
    const Complex u(Real(1) / 3, Real(1) / 9);
    OperatorMatrix r = r_matrix(u, Complex());
    OperatorMatrix diag = OperatorMatrix::Zero(4, 4);
    diag(0, 0) = diag(3, 3) = sh(u);
    diag(1, 1) = diag(2, 2) = sh(u);
    EXPECT_LT(rel_err(r, diag), pow10(-70));
}

TEST_F(TransferTest, YangBaxterEquation) {
    std::mt19937 rng(42);
    const Complex eta(Real(1) / 3, Real(1) / 5);
    OperatorMatrix id2 = OperatorMatrix::Identity(2, 2);
    for (int trial = 0; trial < 10; ++trial) {
        const Complex u = rand_c(rng), v = rand_c(rng);
        OperatorMatrix r12 = kron(r_matrix(u - v, eta), id2);
        OperatorMatrix r23 = kron(id2, r_matrix(v, eta));
        // R13 acts on spaces 1 and 3: permute space 2 <-> 3 around R12-form
        OperatorMatrix p23 = OperatorMatrix::Zero(8, 8);
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b)
                for (int c = 0; c < 2; ++c)
                    p23(4 * a + 2 * c + b, 4 * a + 2 * b + c) = Complex(Real(1), Real(0));
        OperatorMatrix r13 = p23 * kron(r_matrix(u, eta), id2) * p23;
        OperatorMatrix lhs = r12 * r13 * r23;
        OperatorMatrix rhs = r23 * r13 * r12;
        EXPECT_LT(rel_err(lhs, rhs), pow10(-65));
    }
}

TEST_F(TransferTest, KMatricesAtZero) {
    const Complex eta(Real(1) / 4, Real(3) / 5);
    auto [kp, km] = k_matrices(Complex(), eta);
    EXPECT_LT(rel_err(km, OperatorMatrix::Identity(2, 2)), pow10(-70));
    EXPECT_LT(abs(kp(0, 0) - exp(-eta)), pow10(-70));
    EXPECT_LT(abs(kp(1, 1) - exp(eta)), pow10(-70));
    EXPECT_LT(abs(kp(0, 1)) + abs(kp(1, 0)), pow10(-75));
}

TEST_F(TransferTest, ReflectionEquation) {
    // R12(u-v) K1(u) R12(u+v) K2(v) = K2(v) R12(u+v) K1(u) R12(u-v);
    // K+ satisfies the same relation through K+(u) = K-(-u-eta).
    std::mt19937 rng(43);
    const Complex eta(Real(2) / 7, Real(1) / 3);
    OperatorMatrix id2 = OperatorMatrix::Identity(2, 2);
    for (int trial = 0; trial < 10; ++trial) {
        const Complex u = rand_c(rng), v = rand_c(rng);
        auto [kpu, kmu] = k_matrices(u, eta);
        auto [kpv, kmv] = k_matrices(v, eta);
        OperatorMatrix k1 = kron(kmu, id2), k2 = kron(id2, kmv);
        OperatorMatrix lhs = r_matrix(u - v, eta) * k1 * r_matrix(u + v, eta) * k2;
        OperatorMatrix rhs = k2 * r_matrix(u + v, eta) * k1 * r_matrix(u - v, eta);
        EXPECT_LT(rel_err(lhs, rhs), pow10(-65));
        auto [kp_dual, km_dual] = k_matrices(-u - eta, eta);
        EXPECT_LT(rel_err(kpu, km_dual), pow10(-70));
    }
}

TEST_F(TransferTest, TransferCommutesAtDifferentSpectralParameters) {
    std::mt19937 rng(44);
    ChainContext ctx = ChainContext::generic(3, Complex(Real(1) / 3, Real(2) / 5));
    for (int trial = 0; trial < 3; ++trial) {
        const Complex u = rand_c(rng), v = rand_c(rng);
        OperatorMatrix tu = transfer(u, ctx), tv = transfer(v, ctx);
        EXPECT_LT(rel_err(tu * tv, tv * tu), pow10(-65));
    }
}

TEST_F(TransferTest, QuantumGroupSymmetryOfTransfer) {
    std::mt19937 rng(45);
    for (const auto& ctx : {ChainContext::generic(3, Complex(Real(1) / 4, Real(1) / 6)),
                            ChainContext::root_of_unity(3, 2)}) {
        const Complex u = rand_c(rng);
        OperatorMatrix t = transfer(u, ctx);
        for (QGKind kind : {QGKind::E, QGKind::F, QGKind::K}) {
            OperatorMatrix g = qg_generator(kind, ctx);
            EXPECT_LT(rel_err(t * g, g * t), pow10(-65));
        }
        OperatorMatrix sz = s_z_operator(ctx);
        EXPECT_LT(rel_err(t * sz, sz * t), pow10(-65));
    }
}

TEST_F(TransferTest, TransferBlockDiagonalInSz) {
    ChainContext ctx = ChainContext::generic(4, Complex(Real(1) / 3, Real(1) / 7));
    OperatorMatrix t = transfer(Complex(Real(1) / 5, Real(1) / 9), ctx);
    const Real scale = max_abs(t);
    for (int i = 0; i < ctx.dim(); ++i)
        for (int j = 0; j < ctx.dim(); ++j)
            if (std::popcount(unsigned(i)) != std::popcount(unsigned(j)))
                EXPECT_LT(abs(t(i, j)), scale * pow10(-70));
}

TEST_F(TransferTest, ReferenceStateEigenvalueMatchesTQ) {
    std::mt19937 rng(46);
    for (int N : {2, 3, 4}) {
        ChainContext ctx = ChainContext::generic(N, Complex(Real(1) / 3, Real(2) / 7));
        const Complex u = rand_c(rng);
        StateVector tv = transfer_apply(u, ctx, reference_state(ctx));
        const Complex lam = tq_eigenvalue(u, {}, ctx);
        EXPECT_LT(abs(tv(0) - lam), pow10(-65) * abs(lam));
        for (int i = 1; i < ctx.dim(); ++i)
            EXPECT_LT(abs(tv(i)), pow10(-65) * abs(lam));
    }
}

TEST_F(TransferTest, HamiltonianSpectrumN2Generic) {
    ChainContext ctx = ChainContext::generic(2, Complex(Real(1) / 5, Real(1) / 3));
    const Complex q = ctx.q();
    const Complex two_q = q + Real(1) / q;
    OperatorMatrix H = hamiltonian(ctx);
    // triplet (1,0,0,0), (0,q^-1,1,0), (0,0,0,1) at E1 = [2]_q/2,
    // singlet (0,-q,1,0) at E0 = -3[2]_q/2
    std::vector<std::pair<StateVector, Complex>> cases;
    StateVector v1 = StateVector::Zero(4); v1(0) = Complex(Real(1), Real(0));
    StateVector v2 = StateVector::Zero(4); v2(1) = Real(1) / q; v2(2) = Complex(Real(1), Real(0));
    StateVector v3 = StateVector::Zero(4); v3(3) = Complex(Real(1), Real(0));
    StateVector v4 = StateVector::Zero(4); v4(1) = -q; v4(2) = Complex(Real(1), Real(0));
    cases.push_back({v1, two_q / 2});
    cases.push_back({v2, two_q / 2});
    cases.push_back({v3, two_q / 2});
    cases.push_back({v4, Real(-3) * two_q / 2});
    for (auto& [v, e] : cases) {
        StateVector hv = hamiltonian_apply(ctx, v);
        EXPECT_LT(magnitude_of(StateVector(hv - e * v)), pow10(-70));
    }
}

TEST_F(TransferTest, HamiltonianJordanBlockAtQEqualI) {
    ChainContext ctx = ChainContext::root_of_unity(2, 2);
    // w = (0,1,0,0): H w is proportional to F|Omega> at q=i, H^2 w = 0
    StateVector w = StateVector::Zero(4);
    w(1) = Complex(Real(1), Real(0));
    StateVector hw = hamiltonian_apply(ctx, w);
    StateVector hhw = hamiltonian_apply(ctx, hw);
    EXPECT_LT(magnitude_of(hhw), pow10(-70));
    EXPECT_GT(magnitude_of(hw), Real(1));
    StateVector f_omega = qg_apply(QGKind::F, ctx, reference_state(ctx));
    // collinearity: hw x f_omega = 0 componentwise
    const Complex ratio = hw(2) / f_omega(2);
    EXPECT_LT(magnitude_of(StateVector(hw - ratio * f_omega)), pow10(-70));
}

TEST_F(TransferTest, HamiltonianCommutesWithTransfer) {
    std::mt19937 rng(47);
    ChainContext ctx = ChainContext::root_of_unity(3, 3);
    OperatorMatrix H = hamiltonian(ctx);
    OperatorMatrix t = transfer(rand_c(rng), ctx);
    EXPECT_LT(rel_err(H * t, t * H), pow10(-65));
}

TEST_F(TransferTest, ShiftedBCommutesAndLowersSz) {
    std::mt19937 rng(48);
    ChainContext ctx = ChainContext::generic(3, Complex(Real(1) / 4, Real(1) / 5));
    const Complex u = rand_c(rng), v = rand_c(rng);
    StateVector omega = reference_state(ctx);
    StateVector uv = shifted_b_apply(u, ctx, shifted_b_apply(v, ctx, omega));
    StateVector vu = shifted_b_apply(v, ctx, shifted_b_apply(u, ctx, omega));
    EXPECT_LT(magnitude_of(StateVector(uv - vu)),
              pow10(-65) * (magnitude_of(uv) + Real(1)));
    StateVector bv = shifted_b_apply(u, ctx, omega);
    EXPECT_EQ(s_z_sector(ctx, bv), Real(ctx.N) / 2 - 1);
}

TEST_F(TransferTest, BPrimeMatchesAnalyticDerivativeOnReference)
{
    // B(u)|Omega> entries are analytic; compare the extrapolated derivative
    // against a tight secant at a much smaller step.
    ChainContext ctx = ChainContext::generic(2, Complex(Real(1) / 3, Real(1) / 8));
    const Complex u(Real(1) / 3, Real(1) / 7);
    StateVector omega = reference_state(ctx);
    StateVector d = b_prime_apply(u, ctx, omega);
    // single secant at the rounding/truncation sweet spot h ~ 1e-27
    const Real h = pow10(-27);
    StateVector secant =
        (apply_B(u + h, ctx, omega) - apply_B(u - h, ctx, omega)) / (2 * h);
    EXPECT_LT(magnitude_of(StateVector(d - secant)), pow10(-50));
    // two independent Richardson families agree far beyond any single secant
    std::vector<LimitSample<StateVector>> fam;
    for (int k = 0; k < 4; ++k) {
        const Real hk = Real(3) * pow10(-10) * pow(Real(2), -k);
        fam.push_back({Complex(hk, Real(0)),
                       StateVector((apply_B(u + hk, ctx, omega) -
                                    apply_B(u - hk, ctx, omega)) / (2 * hk))});
    }
    StateVector d2 = extrapolate_limit(fam, true, pow10(-40)).value;
    EXPECT_LT(magnitude_of(StateVector(d - d2)), pow10(-60));
}

}  // namespace

#ifndef XXZ_TRANSFER_HPP
#define XXZ_TRANSFER_HPP

#include "xxz/chain.hpp"

#include <array>
#include <vector>

namespace xxz {

// R(u) in the aux (x) site basis {|00>,|01>,|10>,|11>}.
inline OperatorMatrix r_matrix(const Complex& u, const Complex& eta) {
    OperatorMatrix r = OperatorMatrix::Zero(4, 4);
    const Complex a = sh(u + eta), b = sh(u), c = sh(eta);
    r(0, 0) = a; r(3, 3) = a;
    r(1, 1) = b; r(2, 2) = b;
    r(1, 2) = c; r(2, 1) = c;
    return r;
}

// K+ = diag(e^{-u-eta}, e^{u+eta}), K- = diag(e^u, e^{-u}).
inline std::pair<OperatorMatrix, OperatorMatrix> k_matrices(const Complex& u,
                                                            const Complex& eta) {
    OperatorMatrix kp = OperatorMatrix::Zero(2, 2), km = OperatorMatrix::Zero(2, 2);
    kp(0, 0) = exp(-u - eta); kp(1, 1) = exp(u + eta);
    km(0, 0) = exp(u);        km(1, 1) = exp(-u);
    return {kp, km};
}

// Element of C^2_aux (x) C^{2^N}: chain vectors for aux-up and aux-down.
struct AuxPair {
    StateVector up, dn;
};

namespace detail {

inline void apply_r_site(AuxPair& w, int site, int N, const Complex& shu,
                         const Complex& shup, const Complex& she) {
    const int bit = 1 << (N - site);
    const int dim = 1 << N;
    for (int i0 = 0; i0 < dim; ++i0) {
        if (i0 & bit) continue;
        const int i1 = i0 | bit;
        const Complex t0 = w.up(i0), t1 = w.up(i1);
        const Complex b0 = w.dn(i0), b1 = w.dn(i1);
        w.up(i0) = shup * t0;
        w.up(i1) = shu * t1 + she * b0;
        w.dn(i0) = she * t1 + shu * b0;
        w.dn(i1) = shup * b1;
    }
}

}  // namespace detail

// U_a(u) = T_a(u) K^-_a(u) That_a(u) applied to an aux (x) chain vector.
inline AuxPair double_row_apply(const Complex& u, const ChainContext& ctx,
                                AuxPair w) {
    const Complex shu = sh(u), shup = sh(u + ctx.eta), she = sh(ctx.eta);
    // That_a = R_{aN} ... R_{a1}: site 1 first
    for (int k = 1; k <= ctx.N; ++k)
        detail::apply_r_site(w, k, ctx.N, shu, shup, she);
    w.up *= exp(u);
    w.dn *= exp(-u);
    // T_a = R_{a1} ... R_{aN}: site N first
    for (int k = ctx.N; k >= 1; --k)
        detail::apply_r_site(w, k, ctx.N, shu, shup, she);
    return w;
}

inline StateVector apply_A(const Complex& u, const ChainContext& ctx,
                           const StateVector& v) {
    AuxPair w{v, StateVector::Zero(ctx.dim())};
    return double_row_apply(u, ctx, std::move(w)).up;
}

inline StateVector apply_C(const Complex& u, const ChainContext& ctx,
                           const StateVector& v) {
    AuxPair w{v, StateVector::Zero(ctx.dim())};
    return double_row_apply(u, ctx, std::move(w)).dn;
}

inline StateVector apply_B(const Complex& u, const ChainContext& ctx,
                           const StateVector& v) {
    AuxPair w{StateVector::Zero(ctx.dim()), v};
    return double_row_apply(u, ctx, std::move(w)).up;
}

inline StateVector apply_U22(const Complex& u, const ChainContext& ctx,
                             const StateVector& v) {
    AuxPair w{StateVector::Zero(ctx.dim()), v};
    return double_row_apply(u, ctx, std::move(w)).dn;
}

// D(u) = U22(u) - sh(eta)/sh(2u+eta) A(u).
inline StateVector apply_D(const Complex& u, const ChainContext& ctx,
                           const StateVector& v) {
    const Complex coef = sh(ctx.eta) / sh(Real(2) * u + ctx.eta);
    return apply_U22(u, ctx, v) - coef * apply_A(u, ctx, v);
}

// t(u) = tr_a K^+_a U_a = e^{-u-eta} A + e^{u+eta} U22.
inline StateVector transfer_apply(const Complex& u, const ChainContext& ctx,
                                  const StateVector& v) {
    AuxPair wa{v, StateVector::Zero(ctx.dim())};
    AuxPair wb{StateVector::Zero(ctx.dim()), v};
    const StateVector a = double_row_apply(u, ctx, std::move(wa)).up;
    const StateVector d = double_row_apply(u, ctx, std::move(wb)).dn;
    return exp(-u - ctx.eta) * a + exp(u + ctx.eta) * d;
}

namespace detail {

template <class Apply>
OperatorMatrix matrix_from_apply(const ChainContext& ctx, Apply&& f) {
    OperatorMatrix m(ctx.dim(), ctx.dim());
    StateVector e = StateVector::Zero(ctx.dim());
    for (int c = 0; c < ctx.dim(); ++c) {
        e(c) = Complex(Real(1), Real(0));
        m.col(c) = f(e);
        e(c) = Complex();
    }
    return m;
}

}  // namespace detail

inline OperatorMatrix transfer(const Complex& u, const ChainContext& ctx) {
    return detail::matrix_from_apply(
        ctx, [&](const StateVector& v) { return transfer_apply(u, ctx, v); });
}

inline OperatorMatrix b_operator(const Complex& u, const ChainContext& ctx) {
    return detail::matrix_from_apply(
        ctx, [&](const StateVector& v) { return apply_B(u, ctx, v); });
}

// Shifted creation operator: script-B(lambda) = B(lambda - eta/2).
inline StateVector shifted_b_apply(const Complex& lambda, const ChainContext& ctx,
                                   const StateVector& v) {
    return apply_B(lambda - ctx.eta / 2, ctx, v);
}

inline OperatorMatrix shifted_b(const Complex& lambda, const ChainContext& ctx) {
    return b_operator(lambda - ctx.eta / 2, ctx);
}

// B'(u) by Richardson-extrapolated central differences (even series in h).
inline StateVector b_prime_apply(const Complex& u, const ChainContext& ctx,
                                 const StateVector& v) {
    const Real h0 = pow10(-10);
    std::vector<LimitSample<StateVector>> samples;
    for (int k = 0; k < 4; ++k) {
        const Real h = h0 * pow(Real(2), -k);
        StateVector d = (apply_B(u + h, ctx, v) - apply_B(u - h, ctx, v)) / (2 * h);
        samples.push_back({Complex(h, Real(0)), std::move(d)});
    }
    const Real tol = pow10(-static_cast<long>(ctx.prec.digits) / 2);
    return extrapolate_limit(samples, /*even_powers=*/true, tol).value;
}

// H = sum_k [sx sx + sy sy + (q+1/q)/2 sz sz] - (q-1/q)/2 (sz_1 - sz_N).
inline StateVector hamiltonian_apply(const ChainContext& ctx, const StateVector& v) {
    const int N = ctx.N;
    const Complex q = ctx.q();
    const Complex jz = (q + Real(1) / q) / 2;
    const Complex hb = (q - Real(1) / q) / 2;
    StateVector out = StateVector::Zero(ctx.dim());
    for (int i = 0; i < ctx.dim(); ++i) {
        if (v(i) == Complex()) continue;
        Complex diag(Real(0), Real(0));
        for (int k = 1; k < N; ++k) {
            const int sk = sigma_z(i, k, N), sk1 = sigma_z(i, k + 1, N);
            diag += jz * Real(sk * sk1);
            if (sk != sk1) {
                // sx sx + sy sy exchanges the antiparallel pair with weight 2
                const int j = i ^ (1 << (N - k)) ^ (1 << (N - k - 1));
                out(j) += Real(2) * v(i);
            }
        }
        diag -= hb * Real(sigma_z(i, 1, N) - sigma_z(i, N, N));
        out(i) += diag * v(i);
    }
    return out;
}

inline OperatorMatrix hamiltonian(const ChainContext& ctx) {
    return detail::matrix_from_apply(
        ctx, [&](const StateVector& v) { return hamiltonian_apply(ctx, v); });
}

}  // namespace xxz

#endif

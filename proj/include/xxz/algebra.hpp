#ifndef XXZ_ALGEBRA_HPP
#define XXZ_ALGEBRA_HPP

#include "xxz/chain.hpp"
#include "xxz/qnumbers.hpp"

#include <vector>

namespace xxz {

enum class QGKind { E, F, K };

// E = sum_k sigma+_k (x) q^{sigma^z} tail, F = q^{-sigma^z} head (x) sigma-_k,
// K = (x)_k q^{sigma^z_k}, in the site-1-is-MSB basis.
inline StateVector qg_apply(QGKind kind, const ChainContext& ctx,
                            const StateVector& v) {
    const int N = ctx.N;
    const Complex q = ctx.q();
    StateVector out = StateVector::Zero(ctx.dim());
    if (kind == QGKind::K) {
        for (int i = 0; i < ctx.dim(); ++i)
            out(i) = v(i) * pow(q, static_cast<int>(two_sz_of_index(i, N)));
        return out;
    }
    for (int i = 0; i < ctx.dim(); ++i) {
        if (v(i) == Complex()) continue;
        if (kind == QGKind::E) {
            // raise at site k (down -> up), tail weight q^{sum_{j>k} sigma^z_j}
            int tail = 0;
            for (int k = N; k >= 1; --k) {
                if (spin_bit(i, k, N) == 1) {
                    const int j = i & ~(1 << (N - k));
                    out(j) += v(i) * pow(q, tail);
                }
                tail += sigma_z(i, k, N);
            }
        } else {
            // lower at site k (up -> down), head weight q^{-sum_{j<k} sigma^z_j}
            int head = 0;
            for (int k = 1; k <= N; ++k) {
                if (spin_bit(i, k, N) == 0) {
                    const int j = i | (1 << (N - k));
                    out(j) += v(i) * pow(q, -head);
                }
                head += sigma_z(i, k, N);
            }
        }
    }
    return out;
}

inline OperatorMatrix qg_generator(QGKind kind, const ChainContext& ctx) {
    OperatorMatrix m(ctx.dim(), ctx.dim());
    StateVector e = StateVector::Zero(ctx.dim());
    for (int c = 0; c < ctx.dim(); ++c) {
        e(c) = Complex(Real(1), Real(0));
        m.col(c) = qg_apply(kind, ctx, e);
        e(c) = Complex();
    }
    return m;
}

enum class DividedKind { e, f, h };

struct DividedPowers {
    OperatorMatrix e, f, h;
};

// Divided powers at the root of unity, by the regulated limit: evaluate
// e = K^p E^p / [p]_q!, f = (-1)^p F^p / [p]_q! at eta = i(pi/p - eps^2) and
// extrapolate eps -> 0 (the ratio is analytic in eps^2).
inline DividedPowers divided_powers(const ChainContext& ctx) {
    if (ctx.p < 2)
        throw std::invalid_argument("divided_powers: root-of-unity context required");
    const int p = ctx.p;
    const int n_samples = 6;
    const Real eps0 = pow10(-6);
    std::vector<LimitSample<OperatorMatrix>> es, fs;
    for (int s = 0; s < n_samples; ++s) {
        const Real eps = eps0 * pow(Real(2), -s);
        const Complex eta_eps = imag_unit() * (pi() / Real(p) - eps * eps);
        ChainContext cg = ctx.with_eta(eta_eps);
        const Complex fac = q_factorial(p, cg.q());
        OperatorMatrix E = qg_generator(QGKind::E, cg);
        OperatorMatrix F = qg_generator(QGKind::F, cg);
        OperatorMatrix K = qg_generator(QGKind::K, cg);
        OperatorMatrix Ep = E, Fp = F;
        for (int k = 1; k < p; ++k) { Ep = Ep * E; Fp = Fp * F; }
        OperatorMatrix Kp = K;
        for (int k = 1; k < p; ++k) Kp = Kp * K;
        const Real sign = (p % 2 == 0) ? Real(1) : Real(-1);
        es.push_back({Complex(eps, Real(0)), OperatorMatrix(Kp * Ep / fac)});
        fs.push_back({Complex(eps, Real(0)), OperatorMatrix(sign * Fp / fac)});
    }
    const Real tol = pow10(-static_cast<long>(ctx.prec.digits) / 2);
    DividedPowers out;
    out.e = extrapolate_limit(es, /*even_powers=*/true, tol).value;
    out.f = extrapolate_limit(fs, /*even_powers=*/true, tol).value;
    out.h = (out.e * out.f - out.f * out.e) / Real(2);
    return out;
}

inline const OperatorMatrix& divided_power(DividedKind kind, const DividedPowers& dp) {
    switch (kind) {
        case DividedKind::e: return dp.e;
        case DividedKind::f: return dp.f;
        default: return dp.h;
    }
}

}  // namespace xxz

#endif

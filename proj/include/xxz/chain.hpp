#ifndef XXZ_CHAIN_HPP
#define XXZ_CHAIN_HPP

#include "xxz/precision.hpp"
#include "xxz/extrapolate.hpp"

#include <bit>
#include <stdexcept>

namespace xxz {

// Basis convention: index bit (N-k) holds the spin at site k (site 1 is the
// most significant bit); bit value 0 is spin up, so (1,0,...,0) = |up...up>.
struct ChainContext {
    int N = 1;
    Complex eta;
    PrecisionContext prec;
    int p = 0;  // 0 for generic anisotropy, >= 2 when eta = i*pi/p exactly

    int dim() const { return 1 << N; }
    Complex q() const { return exp(eta); }
    Complex eta0() const { return imag_unit() * pi() / Real(p); }

    static ChainContext root_of_unity(int N, int p, unsigned digits = 80) {
        if (p < 2) throw std::invalid_argument("root_of_unity: p must be >= 2");
        ChainContext c;
        c.N = N;
        c.p = p;
        c.prec = PrecisionContext::make(digits);
        c.eta = imag_unit() * pi() / Real(p);
        return c;
    }

    static ChainContext generic(int N, const Complex& eta, unsigned digits = 80) {
        ChainContext c;
        c.N = N;
        c.prec = PrecisionContext::make(digits);
        c.eta = eta;
        return c;
    }

    // eta = i*pi/p with p real; used for continuation in p (no string filter).
    static ChainContext real_p(int N, const Real& p_real, unsigned digits = 80) {
        ChainContext c;
        c.N = N;
        c.prec = PrecisionContext::make(digits);
        c.eta = imag_unit() * pi() / p_real;
        return c;
    }

    ChainContext with_eta(const Complex& new_eta) const {
        ChainContext c = *this;
        c.eta = new_eta;
        c.p = 0;
        return c;
    }
};

inline int spin_bit(int index, int site, int N) {  // site is 1-based
    return (index >> (N - site)) & 1;
}

// sigma^z value (+1 up / -1 down) at a site.
inline int sigma_z(int index, int site, int N) {
    return spin_bit(index, site, N) ? -1 : 1;
}

inline StateVector reference_state(const ChainContext& ctx) {
    StateVector v = StateVector::Zero(ctx.dim());
    v(0) = Complex(Real(1), Real(0));
    return v;
}

inline Real two_sz_of_index(int index, int N) {
    return Real(N - 2 * std::popcount(static_cast<unsigned>(index)));
}

inline OperatorMatrix s_z_operator(const ChainContext& ctx) {
    OperatorMatrix m = OperatorMatrix::Zero(ctx.dim(), ctx.dim());
    for (int i = 0; i < ctx.dim(); ++i)
        m(i, i) = Complex(two_sz_of_index(i, ctx.N) / 2, Real(0));
    return m;
}

inline StateVector s_z_apply(const ChainContext& ctx, const StateVector& v) {
    StateVector out(ctx.dim());
    for (int i = 0; i < ctx.dim(); ++i)
        out(i) = v(i) * (two_sz_of_index(i, ctx.N) / 2);
    return out;
}

// The S^z eigenvalue of a vector supported on a single magnetization sector;
// throws if the support straddles sectors.
inline Real s_z_sector(const ChainContext& ctx, const StateVector& v) {
    Real scale(0);
    for (int i = 0; i < ctx.dim(); ++i) {
        const Real a = abs(v(i));
        if (a > scale) scale = a;
    }
    const Real tol = scale * pow10(-static_cast<long>(ctx.prec.digits) / 2);
    int found = INT_MIN;
    for (int i = 0; i < ctx.dim(); ++i) {
        if (abs(v(i)) <= tol) continue;
        const int tsz = ctx.N - 2 * std::popcount(static_cast<unsigned>(i));
        if (found == INT_MIN) found = tsz;
        else if (found != tsz)
            throw std::runtime_error("s_z_sector: vector straddles S^z sectors");
    }
    if (found == INT_MIN) throw std::runtime_error("s_z_sector: zero vector");
    return Real(found) / 2;
}

inline StateVector normalized_max_entry(const StateVector& v) {
    Eigen::Index at = 0;
    Real best(0);
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        const Real a = abs(v(i));
        if (a > best) { best = a; at = i; }
    }
    if (best == Real(0)) return v;
    return v / v(at);
}

}  // namespace xxz

#endif

#ifndef XXZ_QNUMBERS_HPP
#define XXZ_QNUMBERS_HPP

#include "xxz/precision.hpp"

namespace xxz {

// [n]_q = (q^n - q^{-n}) / (q - q^{-1}); at q = +-1 the limit value n.
inline Complex q_number(long n, const Complex& q) {
    const Complex den = q - Real(1) / q;
    if (abs(den) < pow10(-static_cast<long>(Real::default_precision()) / 2))
        return Complex(Real(n), Real(0));
    const Complex qn = pow(q, static_cast<int>(n));
    return (qn - Real(1) / qn) / den;
}

inline Complex q_factorial(long n, const Complex& q) {
    Complex out(Real(1), Real(0));
    for (long k = 1; k <= n; ++k) out *= q_number(k, q);
    return out;
}

}  // namespace xxz

#endif

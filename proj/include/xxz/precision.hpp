#ifndef XXZ_PRECISION_HPP
#define XXZ_PRECISION_HPP

#include <boost/multiprecision/mpfr.hpp>
#include <boost/multiprecision/complex_adaptor.hpp>
#include <boost/math/constants/constants.hpp>

#include <stdexcept>
#include <string>

namespace xxz {

namespace mp = boost::multiprecision;

// Runtime-precision real and complex scalars. Precision is a thread-local
// default (decimal digits) set through Real::default_precision.
using Real = mp::number<mp::mpfr_float_backend<0>, mp::et_off>;
using Complex = mp::number<mp::complex_adaptor<mp::mpfr_float_backend<0>>, mp::et_off>;

inline Real pi() { return boost::math::constants::pi<Real>(); }

inline Complex imag_unit() { return Complex(Real(0), Real(1)); }

inline Real pow10(long e) { return pow(Real(10), e); }

// Working precision plus the acceptance threshold used by limit extrapolation.
struct PrecisionContext {
    unsigned digits = 80;
    Real limit_tolerance;

    static PrecisionContext make(unsigned digits) {
        if (digits < 30)
            throw std::invalid_argument("PrecisionContext: digits must be >= 30");
        PrecisionContext p;
        p.digits = digits;
        p.limit_tolerance = pow(Real(10), -static_cast<long>(digits) + 10);
        return p;
    }
};

// RAII guard: sets the thread default precision, restores on scope exit.
class ScopedPrecision {
public:
    explicit ScopedPrecision(unsigned digits)
        : saved_(Real::default_precision()) {
        Real::default_precision(digits);
    }
    ~ScopedPrecision() { Real::default_precision(saved_); }
    ScopedPrecision(const ScopedPrecision&) = delete;
    ScopedPrecision& operator=(const ScopedPrecision&) = delete;

private:
    unsigned saved_;
};

inline Complex sh(const Complex& z) { return sinh(z); }
inline Complex ch(const Complex& z) { return cosh(z); }
inline Complex cth(const Complex& z) { return cosh(z) / sinh(z); }

// Precision is a property of each number object and sticks through
// assignments, so values computed under a lower-precision scope must be
// re-padded before high-precision work continues with them.
inline Real at_working_precision(const Real& x) {
    Real y(x);
    y.precision(Real::default_precision());
    return y;
}

inline Complex at_working_precision(const Complex& z) {
    return Complex(at_working_precision(z.real()), at_working_precision(z.imag()));
}

}  // namespace xxz

#endif

#ifndef XXZ_EXTRAPOLATE_HPP
#define XXZ_EXTRAPOLATE_HPP

#include "xxz/precision.hpp"

#include <boost/multiprecision/eigen.hpp>

#include <Eigen/Dense>

#include <stdexcept>
#include <vector>

namespace xxz {

using StateVector = Eigen::Matrix<Complex, Eigen::Dynamic, 1>;
using OperatorMatrix = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic>;

template <class T>
struct LimitSample {
    Complex parameter;  // the regulator value (mu or omega), magnitude decreasing
    T value;
};

template <class T>
struct LimitResult {
    T value;
    Real uncertainty;  // difference between the last two extrapolants
    bool converged = false;
};

struct NonConvergedLimit : std::runtime_error {
    explicit NonConvergedLimit(const std::string& what) : std::runtime_error(what) {}
};

inline Real magnitude_of(const Complex& z) { return abs(z); }

inline Real magnitude_of(const StateVector& v) {
    Real s(0);
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        const Real a = abs(v(i));
        s += a * a;
    }
    return sqrt(s);
}

inline Real magnitude_of(const OperatorMatrix& m) {
    Real s(0);
    for (Eigen::Index j = 0; j < m.cols(); ++j)
        for (Eigen::Index i = 0; i < m.rows(); ++i) {
            const Real a = abs(m(i, j));
            s += a * a;
        }
    return sqrt(s);
}

inline Real max_abs(const StateVector& v) {
    Real best(0);
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        const Real a = abs(v(i));
        if (a > best) best = a;
    }
    return best;
}

inline Real max_abs(const OperatorMatrix& m) {
    Real best(0);
    for (Eigen::Index j = 0; j < m.cols(); ++j)
        for (Eigen::Index i = 0; i < m.rows(); ++i) {
            const Real a = abs(m(i, j));
            if (a > best) best = a;
        }
    return best;
}

// Richardson tableau for f(x) = f0 + c1*t + c2*t^2 + ..., t = x^power_step,
// sampled at a geometric sequence x_k with t-ratio q = ratio^power_step.
// Returns the highest-order extrapolant and the last correction size.
template <class T>
LimitResult<T> richardson(const std::vector<T>& values, const Real& t_ratio,
                          const Real& tolerance) {
    const std::size_t m = values.size();
    if (m < 3) throw std::invalid_argument("richardson: need at least 3 samples");
    std::vector<T> row = values;
    T prev_best = values.back();
    for (std::size_t j = 1; j < m; ++j) {
        const Real qj = pow(t_ratio, static_cast<long>(j));
        std::vector<T> next;
        next.reserve(m - j);
        for (std::size_t k = 0; k + 1 < row.size(); ++k)
            next.push_back((row[k + 1] - qj * row[k]) / (Real(1) - qj));
        prev_best = row.back();
        row = std::move(next);
    }
    LimitResult<T> out;
    out.value = row.front();
    out.uncertainty = magnitude_of(static_cast<T>(row.front() - prev_best));
    Real scale = magnitude_of(out.value);
    if (scale < Real(1)) scale = Real(1);
    out.converged = out.uncertainty <= tolerance * scale;
    return out;
}

// Extrapolates samples f(x_k) to x -> 0. The parameters must form a geometric
// sequence of strictly decreasing magnitude. When even_powers is set the error
// series is assumed to run in x^2 (power_step = 2); power_step can be raised
// further for series in x^{2p'}.
template <class T>
LimitResult<T> extrapolate_limit(const std::vector<LimitSample<T>>& samples,
                                 bool even_powers, const Real& tolerance,
                                 unsigned power_step_override = 0) {
    if (samples.size() < 3)
        throw std::invalid_argument("extrapolate_limit: need at least 3 samples");
    const Complex ratio_c = samples[1].parameter / samples[0].parameter;
    const Real ratio = abs(ratio_c);
    if (!(ratio < Real(1)))
        throw std::invalid_argument("extrapolate_limit: parameters must decrease");
    for (std::size_t k = 2; k < samples.size(); ++k) {
        const Real rk = abs(samples[k].parameter / samples[k - 1].parameter);
        if (abs(rk - ratio) > Real("1e-12") * ratio)
            throw std::invalid_argument("extrapolate_limit: parameters not geometric");
    }
    unsigned power = power_step_override ? power_step_override : (even_powers ? 2u : 1u);
    const Real t_ratio = pow(ratio, static_cast<long>(power));
    std::vector<T> vals;
    vals.reserve(samples.size());
    for (const auto& s : samples) vals.push_back(s.value);
    LimitResult<T> out = richardson(vals, t_ratio, tolerance);
    if (!out.converged)
        throw NonConvergedLimit("extrapolate_limit: extrapolants did not settle "
                                "within tolerance (series order or precision "
                                "insufficient)");
    return out;
}

}  // namespace xxz

#endif

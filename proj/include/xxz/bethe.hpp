#ifndef XXZ_BETHE_HPP
#define XXZ_BETHE_HPP

#include "xxz/chain.hpp"
#include "xxz/transfer.hpp"

#include <algorithm>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace xxz {

struct BetheSolution {
    std::vector<Complex> roots;
    bool admissible = false;
    std::string reason;  // set when inadmissible
    bool contains_exact_p_string = false;

    int M() const { return static_cast<int>(roots.size()); }
};

inline Complex q_function(const Complex& u, const std::vector<Complex>& roots,
                          const Complex& eta) {
    Complex out(Real(1), Real(0));
    for (const auto& l : roots)
        out *= sh(u - l + eta / 2) * sh(u + l + eta / 2);
    return out;
}

namespace detail {

// LHS and RHS of the Bethe equation for root k, in product form.
inline std::pair<Complex, Complex> bae_sides(const std::vector<Complex>& roots,
                                             std::size_t k, int N,
                                             const Complex& eta) {
    const Complex lk = roots[k];
    Complex lhs = pow(sh(lk + eta / 2), 2 * N);
    Complex rhs = pow(sh(lk - eta / 2), 2 * N);
    for (std::size_t j = 0; j < roots.size(); ++j) {
        if (j == k) continue;
        const Complex lj = roots[j];
        lhs *= sh(lk - lj - eta) * sh(lk + lj - eta);
        rhs *= sh(lk - lj + eta) * sh(lk + lj + eta);
    }
    return {lhs, rhs};
}

}  // namespace detail

inline std::vector<Complex> bethe_residuals(const std::vector<Complex>& roots,
                                            const ChainContext& ctx) {
    std::vector<Complex> out;
    out.reserve(roots.size());
    const Real pole_tol = pow10(-static_cast<long>(ctx.prec.digits));
    for (std::size_t k = 0; k < roots.size(); ++k) {
        auto [lhs, rhs] = detail::bae_sides(roots, k, ctx.N, ctx.eta);
        if (abs(lhs) < pole_tol && abs(rhs) < pole_tol)
            throw std::runtime_error("bethe_residuals: degenerate configuration "
                                     "(0/0 in the Bethe equations)");
        out.push_back(lhs - rhs);
    }
    return out;
}

// max_k |LHS_k/RHS_k - 1|; infinity when a side degenerates.
inline Real bae_ratio_residual(const std::vector<Complex>& roots,
                               const ChainContext& ctx) {
    Real worst(0);
    for (std::size_t k = 0; k < roots.size(); ++k) {
        auto [lhs, rhs] = detail::bae_sides(roots, k, ctx.N, ctx.eta);
        if (rhs == Complex()) return Real("1e100");
        const Real r = abs(lhs / rhs - Real(1));
        if (r > worst) worst = r;
    }
    return worst;
}

namespace detail {

// Jacobian of log(LHS_k/RHS_k) with respect to the roots.
inline OperatorMatrix bae_log_jacobian(const std::vector<Complex>& roots, int N,
                                       const Complex& eta) {
    const int M = static_cast<int>(roots.size());
    OperatorMatrix J(M, M);
    for (int k = 0; k < M; ++k) {
        const Complex lk = roots[k];
        Complex diag = Real(2 * N) * (cth(lk + eta / 2) - cth(lk - eta / 2));
        for (int l = 0; l < M; ++l) {
            if (l == k) continue;
            const Complex ll = roots[l];
            diag += cth(lk - ll - eta) + cth(lk + ll - eta)
                  - cth(lk - ll + eta) - cth(lk + ll + eta);
            J(k, l) = -cth(lk - ll - eta) + cth(lk + ll - eta)
                    + cth(lk - ll + eta) - cth(lk + ll + eta);
        }
        J(k, k) = diag;
    }
    return J;
}

}  // namespace detail

struct NewtonOptions {
    int max_iters = 80;
    Real step_cap = Real(3) / 10;
    Real target;  // residual |ratio-1| target
};

// Damped Newton on the log of the Bethe-equation ratio. Returns the final
// residual, or nullopt when the iteration breaks down.
inline std::optional<Real> newton_polish(std::vector<Complex>& roots,
                                         const ChainContext& ctx,
                                         const NewtonOptions& opt) {
    const int M = static_cast<int>(roots.size());
    if (M == 0) return Real(0);
    for (auto& r : roots) r = at_working_precision(r);
    for (int it = 0; it < opt.max_iters; ++it) {
        StateVector F(M);
        Real worst(0);
        for (int k = 0; k < M; ++k) {
            auto [lhs, rhs] = detail::bae_sides(roots, static_cast<std::size_t>(k),
                                                ctx.N, ctx.eta);
            if (rhs == Complex() || lhs == Complex()) return std::nullopt;
            const Complex g = lhs / rhs;
            F(k) = log(g);
            const Real r = abs(g - Real(1));
            if (r > worst) worst = r;
        }
        if (worst <= opt.target) return worst;
        OperatorMatrix J = detail::bae_log_jacobian(roots, ctx.N, ctx.eta);
        Eigen::FullPivLU<OperatorMatrix> lu(J);
        if (lu.rank() < M) return std::nullopt;
        StateVector delta = lu.solve(F);
        Real mx(0);
        for (int k = 0; k < M; ++k) mx = std::max(mx, abs(delta(k)));
        if (mx > Real(50)) return std::nullopt;
        const Real scale = mx > opt.step_cap ? opt.step_cap / mx : Real(1);
        for (int k = 0; k < M; ++k) roots[k] -= scale * delta(k);
    }
    return bae_ratio_residual(roots, ctx);
}

// Fold a root into Im in (-pi/2, pi/2], Re >= 0 using the lambda -> lambda+i*pi
// and lambda -> -lambda symmetries of the Bethe equations.
inline Complex canonical_root(const Complex& l) {
    Real re = l.real(), im = l.imag();
    const Real P = pi();
    const Real edge = Real("1e-12");
    Real k = floor(im / P + Real(1) / 2);
    im -= k * P;
    if (im <= -P / 2 + edge) im += P;
    if (im > P / 2 + edge) im -= P;
    const Real axis_tol = Real("1e-9");
    if (re < -axis_tol) {
        re = -re;
        im = -im;
        if (im <= -P / 2) im += P;
        if (im > P / 2) im -= P;
    } else if (abs(re) <= axis_tol) {
        im = abs(im);
    }
    return Complex(re, im);
}

inline std::vector<Complex> canonical_roots(std::vector<Complex> roots) {
    for (auto& r : roots) r = canonical_root(r);
    std::sort(roots.begin(), roots.end(), [](const Complex& a, const Complex& b) {
        if (a.real() != b.real()) return a.real() < b.real();
        return a.imag() < b.imag();
    });
    return roots;
}

// Admissibility: every root in one of the two half-strip regions, pairwise
// distinct, and (at a root of unity) no exact complete p-string subset.
inline void classify_admissibility(BetheSolution& sol, int p,
                                   const ChainContext& ctx) {
    (void)ctx;
    const Real P = pi();
    const Real tol = Real("1e-8");
    sol.admissible = true;
    sol.reason.clear();
    sol.contains_exact_p_string = false;
    std::vector<Complex> rs;
    rs.reserve(sol.roots.size());
    for (const auto& r : sol.roots) rs.push_back(canonical_root(r));
    for (const auto& r : rs) {
        const Real re = r.real(), im = r.imag();
        const bool region_a = re > tol && im > -P / 2 + tol && im <= P / 2 + tol;
        const bool region_b = abs(re) <= tol && im > tol && im < P / 2 - tol;
        if (!(region_a || region_b)) {
            sol.admissible = false;
            sol.reason = "root outside admissible regions";
            return;
        }
    }
    for (std::size_t i = 0; i < rs.size(); ++i)
        for (std::size_t j = i + 1; j < rs.size(); ++j)
            if (abs(rs[i] - rs[j]) < tol) {
                sol.admissible = false;
                sol.reason = "coincident roots";
                return;
            }
    if (p >= 2 && static_cast<int>(rs.size()) >= p) {
        // search for a subset {v, v+i*pi/p, ..., v+(p-1) i*pi/p} modulo i*pi
        const int M = static_cast<int>(rs.size());
        std::vector<int> idx(p);
        std::function<bool(int, int)> scan = [&](int start, int depth) -> bool {
            if (depth == p) {
                const Real re0 = rs[idx[0]].real();
                for (int t = 1; t < p; ++t)
                    if (abs(rs[idx[t]].real() - re0) > tol) return false;
                std::vector<int> klass(p, 0);
                const Real im0 = rs[idx[0]].imag();
                for (int t = 0; t < p; ++t) {
                    Real d = (rs[idx[t]].imag() - im0) * Real(p) / P;
                    Real rd = floor(d + Real(1) / 2);
                    if (abs(d - rd) > tol * Real(p)) return false;
                    long cls = ((static_cast<long>(rd) % p) + p) % p;
                    klass[static_cast<int>(cls)]++;
                }
                for (int t = 0; t < p; ++t)
                    if (klass[t] != 1) return false;
                return true;
            }
            for (int i = start; i < M; ++i) {
                idx[depth] = i;
                if (scan(i + 1, depth + 1)) return true;
            }
            return false;
        };
        if (scan(0, 0)) {
            sol.admissible = false;
            sol.contains_exact_p_string = true;
            sol.reason = "exact complete p-string";
        }
    }
}

struct SeedGrid {
    int n_real = 40;
    Real re_min = Real("0.02");
    Real re_max = Real("2.5");
    Real delta = Real("0.05");  // offset below i*pi/2
    unsigned sweep_digits = 30;
    int stride2 = 2;  // real-grid decimation for M=2 seeds
    int stride3 = 4;  // and for M=3 seeds
};

namespace detail {

inline void collect_candidate(std::vector<std::vector<Complex>>& found,
                              const std::vector<Complex>& cand) {
    const Real tol = Real("1e-6");
    std::vector<Complex> c = canonical_roots(cand);
    for (const auto& f : found) {
        Real d(0);
        for (std::size_t k = 0; k < c.size(); ++k) d = std::max(d, abs(f[k] - c[k]));
        if (d < tol) return;
    }
    found.push_back(std::move(c));
}

inline std::vector<Real> real_grid(const SeedGrid& g, int stride) {
    std::vector<Real> out;
    for (int i = 0; i < g.n_real; i += stride)
        out.push_back(g.re_min + (g.re_max - g.re_min) * Real(i) / Real(g.n_real - 1));
    return out;
}

// Seeds for one extra root appended to each lower-M solution, plus
// conjugate-pair patterns for complex configurations and a coarse fallback
// of fresh real tuples.
inline std::vector<std::vector<Complex>> seed_tuples(
    int M, const SeedGrid& g, const std::vector<std::vector<Complex>>& lower) {
    const Complex off1(Real(0), pi() / 2 - g.delta);
    const Complex off2(Real(0), pi() / 4);
    std::vector<std::vector<Complex>> seeds;
    if (M == 1) {
        for (const Real& a : real_grid(g, 1)) {
            seeds.push_back({Complex(a, Real(0))});
            seeds.push_back({Complex(a, Real(0)) + off1});
            seeds.push_back({Complex(a, Real(0)) + off2});
        }
        return seeds;
    }
    for (const auto& base : lower) {
        for (const Real& a : real_grid(g, g.stride2)) {
            for (const Complex& off : {Complex(), off1, off2, Complex(-off2)}) {
                std::vector<Complex> s = base;
                s.push_back(Complex(a, Real(0)) + off);
                seeds.push_back(std::move(s));
            }
        }
    }
    if (M == 2) {
        for (const Real& b : real_grid(g, 1))
            seeds.push_back({Complex(b, Real(0)) + off2, Complex(b, Real(0)) - off2});
        for (const Real& a : real_grid(g, g.stride3)) {
            for (const Real& b : real_grid(g, g.stride3)) {
                if (a >= b) continue;
                seeds.push_back({Complex(a, Real(0)), Complex(b, Real(0))});
                seeds.push_back({Complex(a, Real(0)), Complex(b, Real(0)) + off1});
                seeds.push_back({Complex(a, Real(0)) + off1,
                                 Complex(b, Real(0)) + off1});
            }
        }
    } else if (M == 3) {
        for (const Real& a : real_grid(g, g.stride3))
            for (const Real& b : real_grid(g, g.stride2))
                seeds.push_back({Complex(a, Real(0)),
                                 Complex(b, Real(0)) + off2,
                                 Complex(b, Real(0)) - off2});
    }
    return seeds;
}

}  // namespace detail

// Multi-start Newton over the seed grid, deduplicated and polished at full
// precision. The sweep runs at reduced precision; survivors are re-polished.
// Seeds for M >= 2 are grown from the admissible (M-1)-root solutions.
inline std::vector<BetheSolution> solve_bethe(const ChainContext& ctx, int M,
                                              const SeedGrid& grid = SeedGrid()) {
    std::vector<BetheSolution> out;
    if (M == 0) {
        BetheSolution empty;
        empty.admissible = true;
        out.push_back(empty);
        return out;
    }
    if (M > ctx.N / 2)
        throw std::invalid_argument("solve_bethe: M must be <= floor(N/2)");

    std::vector<std::vector<Complex>> lower;
    if (M >= 2) {
        for (const auto& s : solve_bethe(ctx, M - 1, grid))
            if (s.admissible) lower.push_back(s.roots);
    }

    std::vector<std::vector<Complex>> found;
    {
        ScopedPrecision sweep_guard(grid.sweep_digits);
        ChainContext sweep_ctx = ctx;
        sweep_ctx.eta = at_working_precision(ctx.eta);
        sweep_ctx.prec = PrecisionContext::make(grid.sweep_digits);
        std::vector<std::vector<Complex>> lower_sw;
        for (const auto& l : lower) {
            std::vector<Complex> c;
            for (const auto& r : l) c.push_back(at_working_precision(r));
            lower_sw.push_back(std::move(c));
        }
        NewtonOptions opt;
        opt.max_iters = 50;
        opt.target = pow10(-static_cast<long>(grid.sweep_digits) + 6);
        for (auto seed : detail::seed_tuples(M, grid, lower_sw)) {
            auto res = newton_polish(seed, sweep_ctx, opt);
            if (!res || *res > opt.target) continue;
            bool clean = true;
            for (std::size_t i = 0; i < seed.size() && clean; ++i) {
                if (abs(seed[i].real()) > Real(20)) clean = false;
                for (std::size_t j = i + 1; j < seed.size(); ++j)
                    if (abs(seed[i] - seed[j]) < Real("1e-6")) clean = false;
            }
            if (clean) detail::collect_candidate(found, seed);
        }
    }

    NewtonOptions full;
    full.max_iters = 60;
    full.target = pow10(-static_cast<long>(ctx.prec.digits) + 8);
    const Real accept = pow10(-static_cast<long>(ctx.prec.digits) + 20);
    std::vector<std::vector<Complex>> polished;
    for (auto cand : found) {
        for (auto& r : cand) r = at_working_precision(r);
        auto res = newton_polish(cand, ctx, full);
        if (!res || *res > accept) continue;
        detail::collect_candidate(polished, cand);
    }
    // final dedup at the documented tolerance
    std::vector<std::vector<Complex>> unique_sols;
    for (auto& c : polished) {
        bool dup = false;
        for (const auto& u : unique_sols) {
            Real d(0);
            for (std::size_t k = 0; k < c.size(); ++k)
                d = std::max(d, abs(u[k] - c[k]));
            if (d < Real("1e-10")) { dup = true; break; }
        }
        if (!dup) unique_sols.push_back(c);
    }
    std::sort(unique_sols.begin(), unique_sols.end(),
              [](const auto& a, const auto& b) {
                  for (std::size_t k = 0; k < a.size(); ++k) {
                      if (a[k].real() != b[k].real()) return a[k].real() < b[k].real();
                      if (a[k].imag() != b[k].imag()) return a[k].imag() < b[k].imag();
                  }
                  return false;
              });
    for (auto& roots : unique_sols) {
        BetheSolution sol;
        sol.roots = roots;
        classify_admissibility(sol, ctx.p, ctx);
        out.push_back(std::move(sol));
    }
    return out;
}

inline BetheSolution make_solution(std::vector<Complex> roots,
                                   const ChainContext& ctx) {
    BetheSolution sol;
    sol.roots = std::move(roots);
    classify_admissibility(sol, ctx.p, ctx);
    return sol;
}

// T-Q eigenvalue Lambda(u).
inline Complex tq_eigenvalue(const Complex& u, const std::vector<Complex>& roots,
                             const ChainContext& ctx) {
    const Complex eta = ctx.eta;
    const Complex qu = q_function(u, roots, eta);
    if (abs(qu) < pow10(-static_cast<long>(ctx.prec.digits)))
        throw std::runtime_error("tq_eigenvalue: Q(u) = 0 (pole)");
    const Complex den = sh(2 * u + eta);
    return sh(2 * u + 2 * eta) / den * pow(sh(u + eta), 2 * ctx.N)
               * q_function(u - eta, roots, eta) / qu
         + sh(2 * u) / den * pow(sh(u), 2 * ctx.N)
               * q_function(u + eta, roots, eta) / qu;
}

inline Complex energy(const std::vector<Complex>& roots, const ChainContext& ctx) {
    Complex sum(Real(0), Real(0));
    for (const auto& l : roots)
        sum += Real(1) / (sh(l - ctx.eta / 2) * sh(l + ctx.eta / 2));
    return Real(2) * sh(ctx.eta) * sh(ctx.eta) * sum
         + Real(ctx.N - 1) * ch(ctx.eta);
}

inline StateVector bethe_vector(const std::vector<Complex>& roots,
                                const ChainContext& ctx) {
    StateVector v = reference_state(ctx);
    for (const auto& l : roots) v = shifted_b_apply(l, ctx, v);
    return v;
}

// f(u,v) = sh(2u+2eta) sh(2v) sh(eta) / [sh(u-v) sh(u+v+eta) sh(2v+eta)].
inline Complex f_exchange_factor(const Complex& u, const Complex& v,
                                 const Complex& eta) {
    return sh(2 * u + 2 * eta) * sh(2 * v) * sh(eta)
         / (sh(u - v) * sh(u + v + eta) * sh(2 * v + eta));
}

// Unwanted-term coefficient Lambda^{lambda_m}(u) of the off-shell relation.
inline Complex unwanted_coefficient(const Complex& u, std::size_t m,
                                    const std::vector<Complex>& roots,
                                    const ChainContext& ctx) {
    const Complex eta = ctx.eta;
    const Complex lm = roots[m];
    for (std::size_t k = 0; k < roots.size(); ++k) {
        if (k == m) continue;
        if (abs(sh(lm - roots[k])) < pow10(-static_cast<long>(ctx.prec.digits) + 10)
            || abs(sh(lm + roots[k])) < pow10(-static_cast<long>(ctx.prec.digits) + 10))
            throw std::runtime_error("unwanted_coefficient: coincident roots");
    }
    Complex prod_minus(Real(1), Real(0)), prod_plus(Real(1), Real(0));
    for (std::size_t k = 0; k < roots.size(); ++k) {
        if (k == m) continue;
        const Complex lk = roots[k];
        const Complex den = sh(lm - lk) * sh(lm + lk);
        prod_minus *= sh(lm - lk - eta) * sh(lm + lk - eta) / den;
        prod_plus *= sh(lm - lk + eta) * sh(lm + lk + eta) / den;
    }
    return f_exchange_factor(u, lm - eta / 2, eta)
         * (pow(sh(lm + eta / 2), 2 * ctx.N) * prod_minus
            - pow(sh(lm - eta / 2), 2 * ctx.N) * prod_plus);
}

// Closed-form single Bethe root for N=2 (branch with Im in (-pi/2, pi/2]).
inline Complex bap2_root(const Complex& eta) {
    const Complex arg = -sh(eta / 2 + imag_unit() * pi() / 4)
                      / sh(eta / 2 - imag_unit() * pi() / 4);
    return log(arg) / 2;
}

struct TrackPoint {
    Real p;
    std::vector<Complex> roots;
    bool ok = true;
};

// Continuation of a root set along a schedule of real p values. The previous
// solution seeds each step (matched by proximity, order preserved).
inline std::vector<TrackPoint> track_strings(int N, unsigned digits,
                                             std::vector<Complex> start_roots,
                                             const std::vector<Real>& p_schedule) {
    std::vector<TrackPoint> rows;
    std::vector<Complex> cur = std::move(start_roots);
    for (const Real& pv : p_schedule) {
        ChainContext ctx = ChainContext::real_p(N, pv, digits);
        NewtonOptions opt;
        opt.max_iters = 120;
        opt.target = pow10(-static_cast<long>(digits) + 10);
        auto res = newton_polish(cur, ctx, opt);
        TrackPoint row;
        row.p = pv;
        row.roots = cur;
        row.ok = res.has_value() && *res <= opt.target;
        rows.push_back(row);
        if (!row.ok) break;  // lost track: record the gap and stop
    }
    return rows;
}

inline std::vector<Real> geometric_p_schedule(const Real& p_start,
                                              const Real& p_end, int steps) {
    std::vector<Real> out;
    if (steps <= 1 || p_start == p_end) {
        out.push_back(p_start);
        if (!(p_start == p_end)) out.push_back(p_end);
        return out;
    }
    const Real p_int = floor((p_start + p_end) / 2 + Real(1) / 2);
    const Real d0 = p_start - p_int, d1 = p_end - p_int;
    if (d0 != Real(0) && d1 != Real(0) && (d0 > 0) == (d1 > 0)) {
        const Real ratio = pow(d1 / d0, Real(1) / (steps - 1));
        for (int i = 0; i < steps; ++i) out.push_back(p_int + d0 * pow(ratio, i));
    } else {
        for (int i = 0; i < steps; ++i)
            out.push_back(p_start + (p_end - p_start) * Real(i) / Real(steps - 1));
    }
    return out;
}

}  // namespace xxz

#endif

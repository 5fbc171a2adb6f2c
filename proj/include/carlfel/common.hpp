// Shared small utilities: error types, deterministic reductions, finiteness checks.
#ifndef CARLFEL_COMMON_HPP
#define CARLFEL_COMMON_HPP

#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <vector>

namespace carlfel {

using cplx = std::complex<double>;

inline constexpr double two_pi = 6.283185307179586476925286766559;

/// Invalid input / configuration / model-domain violation.  CLI maps to exit 2.
class ModelError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Integration blew up (NaN, step underflow, step budget).  CLI maps to exit 3.
/// The state passed to the integrator holds the last accepted sample.
class NumericalAbort : public std::runtime_error {
public:
    NumericalAbort(const std::string& what, double tau_last)
        : std::runtime_error(what), tau_last_(tau_last) {}
    double tau_last() const { return tau_last_; }

private:
    double tau_last_;
};

inline void require(bool cond, const std::string& msg) {
    if (!cond) throw ModelError(msg);
}

template <class... Parts>
std::string describe(Parts&&... parts) {
    std::ostringstream os;
    os.precision(17);
    (os << ... << parts);
    return os.str();
}

inline bool finite(double x) { return std::isfinite(x); }
inline bool finite(const cplx& z) {
    return std::isfinite(z.real()) && std::isfinite(z.imag());
}

/// Fixed-topology pairwise (tree) reduction of term(lo) .. term(hi-1).
/// The summation order depends only on the index range, so results are
/// reproducible however the terms are later produced or partitioned.
template <class F>
auto pairwise_sum(std::size_t lo, std::size_t hi, F&& term)
    -> std::decay_t<decltype(term(lo))> {
    using T = std::decay_t<decltype(term(lo))>;
    const std::size_t n = hi - lo;
    if (n <= 8) {
        T acc = term(lo);
        for (std::size_t i = lo + 1; i < hi; ++i) acc += term(i);
        return acc;
    }
    const std::size_t mid = lo + n / 2;
    return pairwise_sum(lo, mid, term) + pairwise_sum(mid, hi, term);
}

template <class F>
auto pairwise_sum(std::size_t n, F&& term) -> std::decay_t<decltype(term(0))> {
    if (n == 0)
        throw ModelError("pairwise_sum: empty range");
    return pairwise_sum<F>(0, n, std::forward<F>(term));
}

inline double pairwise_sum(std::span<const double> xs) {
    return pairwise_sum(xs.size(), [&](std::size_t i) { return xs[i]; });
}

inline cplx pairwise_sum(std::span<const cplx> xs) {
    return pairwise_sum(xs.size(), [&](std::size_t i) { return xs[i]; });
}

/// Max-norm accumulator that propagates NaN (plain std::max would drop it,
/// which lets a blown-up integration masquerade as converged).
inline void accumulate_max_abs(double& m, double v) {
    const double a = std::abs(v);
    if (a > m || std::isnan(a)) m = a;
}
inline void accumulate_max_abs(double& m, const cplx& z) {
    accumulate_max_abs(m, z.real());
    accumulate_max_abs(m, z.imag());
}

}  // namespace carlfel

#endif

// Momentum-ladder formulation of the quantum model, in two interchangeable
// representations:
//
//   * MomentumWavefunction — amplitudes c_n on integer recoil levels n,
//     evolved in the rotating frame (field Abar = A e^{-i(delta/rho_bar)tau}):
//         dc_n/dtau   = -(i/rho_bar) n (n + delta) c_n
//                        - (rho_bar/2) (Abar c_{n-1} - conj(Abar) c_{n+1})
//         dAbar/dtau  = sum_n conj(c_{n-1}) c_n
//   * DensityMatrixState — rho_{m,n} = conj(c_m) c_n evolved directly:
//         drho_{m,n}/dtau = (i/rho_bar)(m-n)(delta+m+n) rho_{m,n}
//             + (rho_bar/2)[Abar (rho_{m+1,n} - rho_{m,n-1})
//                           + conj(Abar)(rho_{m,n+1} - rho_{m-1,n})]
//         dAbar/dtau  = sum_n rho_{n-1,n}
//
// Amplitudes outside the ladder [n_min, n_max] are exactly zero; adequacy of
// the truncation is enforced by an edge-occupation guard with a deterministic
// widen-and-rerun policy (never a silent resize).
//
// Exact discrete conservation laws (independent of truncation):
//   norm sum |c_n|^2 (resp. trace rho), and |Abar|^2 + (2/rho_bar) sum n P_n.
#ifndef CARLFEL_QUANTUM_HPP
#define CARLFEL_QUANTUM_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "carlfel/common.hpp"
#include "carlfel/ode.hpp"
#include "carlfel/scaling.hpp"

namespace carlfel::quantum {

struct LadderBounds {
    int n_min;
    int n_max;

    std::size_t size() const { return static_cast<std::size_t>(n_max - n_min) + 1; }
    void validate() const {
        require(n_min < n_max,
                describe("LadderBounds: need at least two levels, got [", n_min, ", ",
                         n_max, "]"));
    }
};

/// Default truncation around start level n0: recoil runs predominantly
/// downward with spread ~ rho_bar, so the ladder extends 4*rho_bar + margin
/// below and a small margin above.  The edge guard makes this safe.
inline LadderBounds default_ladder(int n0, double rho_bar) {
    require(rho_bar > 0 && finite(rho_bar), "default_ladder: rho_bar must be > 0");
    return {n0 - static_cast<int>(std::ceil(4.0 * rho_bar)) - 8, n0 + 8};
}

struct MomentumWavefunction {
    int n_min = 0;
    int n_max = 0;
    std::vector<cplx> c;      // c[idx(n)], n in [n_min, n_max]
    cplx field_abar{0.0, 0.0};
    double tau = 0.0;

    std::size_t idx(int n) const { return static_cast<std::size_t>(n - n_min); }
    int level(std::size_t i) const { return n_min + static_cast<int>(i); }
    std::size_t size() const { return c.size(); }

    MomentumWavefunction like_zero() const {
        MomentumWavefunction z;
        z.n_min = n_min;
        z.n_max = n_max;
        z.c.assign(c.size(), cplx{0.0, 0.0});
        return z;
    }
    void add_scaled(double a, const MomentumWavefunction& o) {
        for (std::size_t i = 0; i < c.size(); ++i) c[i] += a * o.c[i];
        field_abar += a * o.field_abar;
    }
    double max_abs() const {
        double m = 0.0;
        for (const auto& z : c) accumulate_max_abs(m, z);
        accumulate_max_abs(m, field_abar);
        return m;
    }
};

struct DensityMatrixState {
    int n_min = 0;
    int n_max = 0;
    std::vector<cplx> rho;    // row-major, rho_{m,n} at [idx(m) * size + idx(n)]
    cplx field_abar{0.0, 0.0};
    double tau = 0.0;

    std::size_t size() const { return static_cast<std::size_t>(n_max - n_min) + 1; }
    std::size_t idx(int n) const { return static_cast<std::size_t>(n - n_min); }
    int level(std::size_t i) const { return n_min + static_cast<int>(i); }
    cplx& at(std::size_t mi, std::size_t ni) { return rho[mi * size() + ni]; }
    const cplx& at(std::size_t mi, std::size_t ni) const { return rho[mi * size() + ni]; }

    DensityMatrixState like_zero() const {
        DensityMatrixState z;
        z.n_min = n_min;
        z.n_max = n_max;
        z.rho.assign(rho.size(), cplx{0.0, 0.0});
        return z;
    }
    void add_scaled(double a, const DensityMatrixState& o) {
        for (std::size_t i = 0; i < rho.size(); ++i) rho[i] += a * o.rho[i];
        field_abar += a * o.field_abar;
    }
    double max_abs() const {
        double m = 0.0;
        for (const auto& z : rho) accumulate_max_abs(m, z);
        accumulate_max_abs(m, field_abar);
        return m;
    }
};

/// c_{n0} = 1, all else 0.  The field seed is installed by the caller
/// (state.field_abar = a0), matching the way presets specify A(0) separately.
inline MomentumWavefunction init_momentum_state(int n0, const LadderBounds& ladder) {
    ladder.validate();
    require(ladder.n_min <= n0 && n0 <= ladder.n_max,
            describe("init_momentum_state: start level ", n0, " outside ladder [",
                     ladder.n_min, ", ", ladder.n_max, "]"));
    MomentumWavefunction s;
    s.n_min = ladder.n_min;
    s.n_max = ladder.n_max;
    s.c.assign(ladder.size(), cplx{0.0, 0.0});
    s.c[s.idx(n0)] = cplx{1.0, 0.0};
    return s;
}

inline DensityMatrixState density_from_wavefunction(const MomentumWavefunction& s) {
    DensityMatrixState d;
    d.n_min = s.n_min;
    d.n_max = s.n_max;
    d.rho.resize(s.size() * s.size());
    for (std::size_t m = 0; m < s.size(); ++m)
        for (std::size_t n = 0; n < s.size(); ++n)
            d.at(m, n) = std::conj(s.c[m]) * s.c[n];
    d.field_abar = s.field_abar;
    d.tau = s.tau;
    return d;
}

inline double norm_total(const MomentumWavefunction& s) {
    return pairwise_sum(s.size(), [&](std::size_t i) { return std::norm(s.c[i]); });
}

inline double norm_total(const DensityMatrixState& s) {
    return pairwise_sum(s.size(), [&](std::size_t i) { return s.at(i, i).real(); });
}

inline std::vector<double> populations(const MomentumWavefunction& s) {
    std::vector<double> p(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) p[i] = std::norm(s.c[i]);
    return p;
}

inline std::vector<double> populations(const DensityMatrixState& s) {
    std::vector<double> p(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) p[i] = s.at(i, i).real();
    return p;
}

inline double edge_occupation(const MomentumWavefunction& s) {
    return std::norm(s.c.front()) + std::norm(s.c.back());
}

inline double edge_occupation(const DensityMatrixState& s) {
    return std::abs(s.at(0, 0).real()) + std::abs(s.at(s.size() - 1, s.size() - 1).real());
}

struct Observables {
    std::vector<double> p_n;  // occupation per level, index 0 = n_min
    double norm = 0.0;
    double mean_p = 0.0;      // <n> in recoil units
    double mean_pbar = 0.0;   // (2/rho_bar) <n>, the classical momentum variable
    double intensity = 0.0;   // |Abar|^2 = |A|^2
};

template <class State>
Observables observables(const State& s, const ScaledParams& params) {
    params.validate();
    Observables o;
    o.p_n = populations(s);
    o.norm = pairwise_sum(std::span<const double>(o.p_n));
    o.mean_p = pairwise_sum(o.p_n.size(), [&](std::size_t i) {
        return static_cast<double>(s.level(i)) * o.p_n[i];
    });
    o.mean_pbar = 2.0 / params.rho_bar * o.mean_p;
    o.intensity = std::norm(s.field_abar);
    return o;
}

/// |Abar|^2 + (2/rho_bar) sum_n n P_n — the quantum mirror of the classical
/// |A|^2 + <pbar> constant of motion, exact even under truncation.
template <class State>
double quantum_invariant(const State& s, const ScaledParams& params) {
    const auto o = observables(s, params);
    return o.intensity + o.mean_pbar;
}

/// Reporting-frame field A = Abar e^{+i(delta/rho_bar) tau}.
template <class State>
cplx lab_field(const State& s, const ScaledParams& params) {
    return s.field_abar * std::polar(1.0, params.delta / params.rho_bar * s.tau);
}

class WavefunctionSystem {
public:
    explicit WavefunctionSystem(const ScaledParams& p)
        : inv_rho_(1.0 / p.rho_bar), half_rho_(0.5 * p.rho_bar), delta_(p.delta) {
        p.validate();
    }

    void operator()(const MomentumWavefunction& s, MomentumWavefunction& d) const {
        const std::size_t r = s.size();
        const cplx a = s.field_abar;
        const cplx ac = std::conj(a);
        for (std::size_t i = 0; i < r; ++i) {
            const auto n = static_cast<double>(s.level(i));
            const cplx below = (i > 0) ? s.c[i - 1] : cplx{0.0, 0.0};
            const cplx above = (i + 1 < r) ? s.c[i + 1] : cplx{0.0, 0.0};
            d.c[i] = cplx{0.0, -inv_rho_ * n * (n + delta_)} * s.c[i] -
                     half_rho_ * (a * below - ac * above);
        }
        d.field_abar = (r < 2) ? cplx{0.0, 0.0}
                               : pairwise_sum(r - 1, [&](std::size_t k) {
                                     return std::conj(s.c[k]) * s.c[k + 1];
                                 });
    }

private:
    double inv_rho_, half_rho_, delta_;
};

class DensityMatrixSystem {
public:
    explicit DensityMatrixSystem(const ScaledParams& p)
        : inv_rho_(1.0 / p.rho_bar), half_rho_(0.5 * p.rho_bar), delta_(p.delta) {
        p.validate();
    }

    void operator()(const DensityMatrixState& s, DensityMatrixState& d) const {
        const std::size_t r = s.size();
        const cplx a = s.field_abar;
        const cplx ac = std::conj(a);
        for (std::size_t mi = 0; mi < r; ++mi) {
            const auto m = static_cast<double>(s.level(mi));
            for (std::size_t ni = 0; ni < r; ++ni) {
                const auto n = static_cast<double>(s.level(ni));
                const cplx up_m = (mi + 1 < r) ? s.at(mi + 1, ni) : cplx{0.0, 0.0};
                const cplx dn_n = (ni > 0) ? s.at(mi, ni - 1) : cplx{0.0, 0.0};
                const cplx up_n = (ni + 1 < r) ? s.at(mi, ni + 1) : cplx{0.0, 0.0};
                const cplx dn_m = (mi > 0) ? s.at(mi - 1, ni) : cplx{0.0, 0.0};
                d.at(mi, ni) = cplx{0.0, inv_rho_ * (m - n) * (delta_ + m + n)} * s.at(mi, ni) +
                               half_rho_ * (a * (up_m - dn_n) + ac * (up_n - dn_m));
            }
        }
        d.field_abar = (r < 2) ? cplx{0.0, 0.0}
                               : pairwise_sum(r - 1, [&](std::size_t k) {
                                     return s.at(k, k + 1);
                                 });
    }

private:
    double inv_rho_, half_rho_, delta_;
};

inline MomentumWavefunction rhs_cn(const MomentumWavefunction& s, const ScaledParams& params) {
    MomentumWavefunction d = s.like_zero();
    WavefunctionSystem{params}(s, d);
    return d;
}

inline DensityMatrixState rhs_density(const DensityMatrixState& s, const ScaledParams& params) {
    DensityMatrixState d = s.like_zero();
    DensityMatrixSystem{params}(s, d);
    return d;
}

inline WavefunctionSystem make_system(const MomentumWavefunction&, const ScaledParams& p) {
    return WavefunctionSystem{p};
}
inline DensityMatrixSystem make_system(const DensityMatrixState&, const ScaledParams& p) {
    return DensityMatrixSystem{p};
}

/// |psi(theta)|^2 on m_points equispaced lab-frame angles theta_i = 2 pi i / M.
/// The rotating-frame amplitudes are twisted to the lab frame
/// (c_n e^{i n (delta/rho_bar) tau}) before Fourier synthesis, so the result
/// is the density an observer at fixed theta would see.
inline std::vector<double> psi_density(const MomentumWavefunction& s, std::size_t m_points,
                                       const ScaledParams& params) {
    params.validate();
    const std::size_t span = s.size() - 1;
    require(m_points >= 2 * span + 1,
            describe("psi_density: need at least ", 2 * span + 1,
                     " grid points for an alias-free ladder of ", s.size(),
                     " levels, got ", m_points));
    std::vector<cplx> lab(s.size());
    const double twist = params.delta / params.rho_bar * s.tau;
    for (std::size_t i = 0; i < s.size(); ++i)
        lab[i] = s.c[i] * std::polar(1.0, static_cast<double>(s.level(i)) * twist);

    std::vector<double> density(m_points);
    const double norm_factor = 1.0 / two_pi;  // |1/sqrt(2 pi)|^2
    for (std::size_t g = 0; g < m_points; ++g) {
        const double theta = two_pi * static_cast<double>(g) / static_cast<double>(m_points);
        const cplx psi = pairwise_sum(s.size(), [&](std::size_t i) {
            return lab[i] * std::polar(1.0, static_cast<double>(s.level(i)) * theta);
        });
        density[g] = norm_factor * std::norm(psi);
    }
    return density;
}

inline double hermiticity_defect(const DensityMatrixState& s) {
    double worst = 0.0;
    for (std::size_t m = 0; m < s.size(); ++m)
        for (std::size_t n = m; n < s.size(); ++n)
            accumulate_max_abs(worst, s.at(m, n) - std::conj(s.at(n, m)));
    return worst;
}

namespace detail {

/// Smallest eigenvalue of a Hermitian matrix via the real-symmetric embedding
/// H = A + iB  ->  [[A, -B], [B, A]] and cyclic Jacobi rotations.  Plenty for
/// the ladder sizes here (diagnostic use only, not on the integration path).
inline double symmetric_min_eigenvalue(std::vector<double> s, std::size_t n) {
    auto at = [&](std::size_t i, std::size_t j) -> double& { return s[i * n + j]; };
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) off += at(i, j) * at(i, j);
        if (off < 1.0e-24) break;
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                if (std::abs(at(p, q)) < 1.0e-30) continue;
                const double theta = 0.5 * (at(q, q) - at(p, p)) / at(p, q);
                const double t = ((theta >= 0) ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double sn = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const double skp = at(k, p), skq = at(k, q);
                    at(k, p) = c * skp - sn * skq;
                    at(k, q) = sn * skp + c * skq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double spk = at(p, k), sqk = at(q, k);
                    at(p, k) = c * spk - sn * sqk;
                    at(q, k) = sn * spk + c * sqk;
                }
            }
        }
    }
    double lo = s[0];
    for (std::size_t i = 1; i < n; ++i) lo = std::min(lo, at(i, i));
    return lo;
}

}  // namespace detail

/// Smallest eigenvalue of rho — positivity diagnostic (>= -1e-10 expected).
inline double min_eigenvalue(const DensityMatrixState& s) {
    const std::size_t r = s.size();
    std::vector<double> big(4 * r * r, 0.0);
    auto at = [&](std::size_t i, std::size_t j) -> double& { return big[i * 2 * r + j]; };
    for (std::size_t m = 0; m < r; ++m) {
        for (std::size_t n = 0; n < r; ++n) {
            const cplx z = s.at(m, n);
            at(m, n) = z.real();
            at(m + r, n + r) = z.real();
            at(m, n + r) = -z.imag();
            at(m + r, n) = z.imag();
        }
    }
    return detail::symmetric_min_eigenvalue(std::move(big), 2 * r);
}

/// Copy of a state with the ladder extended by extra_lo levels below and
/// extra_hi above (amplitudes re-embedded unchanged).
inline MomentumWavefunction widened(const MomentumWavefunction& s, int extra_lo, int extra_hi) {
    require(extra_lo >= 0 && extra_hi >= 0, "widened: extensions must be >= 0");
    MomentumWavefunction w;
    w.n_min = s.n_min - extra_lo;
    w.n_max = s.n_max + extra_hi;
    w.c.assign(static_cast<std::size_t>(w.n_max - w.n_min) + 1, cplx{0.0, 0.0});
    for (std::size_t i = 0; i < s.size(); ++i) w.c[w.idx(s.level(i))] = s.c[i];
    w.field_abar = s.field_abar;
    w.tau = s.tau;
    return w;
}

inline DensityMatrixState widened(const DensityMatrixState& s, int extra_lo, int extra_hi) {
    require(extra_lo >= 0 && extra_hi >= 0, "widened: extensions must be >= 0");
    DensityMatrixState w;
    w.n_min = s.n_min - extra_lo;
    w.n_max = s.n_max + extra_hi;
    w.rho.assign(w.size() * w.size(), cplx{0.0, 0.0});
    for (std::size_t m = 0; m < s.size(); ++m)
        for (std::size_t n = 0; n < s.size(); ++n)
            w.at(w.idx(s.level(m)), w.idx(s.level(n))) = s.at(m, n);
    w.field_abar = s.field_abar;
    w.tau = s.tau;
    return w;
}

struct EvolveConfig {
    IntegrationOptions integ{};
    double sample_dt = 0.01;
    double edge_guard = 1.0e-10;  // max allowed |c|^2 on the outermost levels
    bool allow_widening = true;
    int max_widenings = 4;
};

namespace detail {
struct GuardTrip {
    bool bottom;
    bool top;
    double occupation;
    double tau;
};
}  // namespace detail

struct NullSink {
    template <class State>
    void operator()(const State&) const {}
    void clear() const {}
};

/// Drive a wavefunction or density matrix to tau_end, feeding every sample to
/// the sink.  If the edge-occupation guard trips, the run is abandoned, the
/// *initial* state is re-embedded in a wider ladder, the sink is cleared, and
/// the run restarts from tau = 0 — results never come from a resized mid-run
/// state.  Widening disabled or exhausted raises ModelError with the measured
/// edge occupation.
template <class State, class Sink>
State evolve(const State& initial, const ScaledParams& params, const EvolveConfig& cfg,
             double tau_end, Sink&& sink) {
    params.validate();
    require(cfg.edge_guard > 0, "evolve: edge_guard must be > 0");
    State start = initial;

    for (int attempt = 0;; ++attempt) {
        State s = start;
        const auto system = make_system(s, params);
        try {
            integrate_adaptive(
                s, system, tau_end, cfg.sample_dt,
                [&](const State& st) {
                    const double occ = edge_occupation(st);
                    if (occ > cfg.edge_guard) {
                        const auto pops = populations(st);
                        throw detail::GuardTrip{pops.front() > cfg.edge_guard / 2,
                                                pops.back() > cfg.edge_guard / 2, occ,
                                                st.tau};
                    }
                    sink(st);
                },
                cfg.integ);
            return s;
        } catch (const detail::GuardTrip& trip) {
            int lo = trip.bottom
                         ? std::max(8, static_cast<int>(std::ceil(2.0 * params.rho_bar)))
                         : 0;
            int hi = trip.top ? 8 : 0;
            if (lo == 0 && hi == 0) {  // edge sum tripped but neither side alone
                lo = std::max(8, static_cast<int>(std::ceil(2.0 * params.rho_bar)));
                hi = 8;
            }
            if (!cfg.allow_widening || attempt >= cfg.max_widenings)
                throw ModelError(describe(
                    "evolve: ladder edge occupation ", trip.occupation,
                    " exceeded guard ", cfg.edge_guard, " at tau = ", trip.tau,
                    " on ladder [", s.n_min, ", ", s.n_max,
                    "]; rerun with a ladder widened by at least ",
                    std::max(lo, hi), " levels on the affected side"));
            start = widened(start, lo, hi);
            if constexpr (requires { sink.clear(); })
                sink.clear();
            else
                throw ModelError(
                    "evolve: ladder widening requires a sink with clear() to "
                    "replay the trajectory");
        }
    }
}

}  // namespace carlfel::quantum

#endif

// Phase-space (Wigner) formulation on the half-integer momentum ladder.
//
// For the periodic coordinate theta the Wigner transform lives on momentum
// levels s = (m + n)/2 built from pairs of ladder levels; integer rows carry
// the occupations, half-integer rows the interference.  We store the doubled
// index s2 = 2s (so all rows are integers) and the lab-frame field A:
//
//   W(theta, s2) = (1/2pi) sum_{m+n=s2} conj(ct_m) ct_n e^{i(n-m) theta},
//
// with ct_n the lab-frame amplitudes.  The momentum variable of the classical
// model is pbar = s2 / rho_bar, so the ladder spacing in pbar is 1/rho_bar.
//
// Evolution (lab frame, quadrature measure: row-sum x d theta):
//   dW/dtau = -pbar dW/dtheta
//             + (rho_bar/2) (A e^{i theta} + c.c.) [W(row+1) - W(row-1)]
//   dA/dtau = sum_rows int d theta W e^{-i theta} + i (delta/rho_bar) A
//
// The +-1/rho_bar momentum shifts are exact row operations and the theta
// derivative is spectral, so this evolution is the image of the momentum-mode
// dynamics up to truncation-edge corner terms — a machine-checkable
// equivalence.  Replacing the finite-difference bracket by a true
// d/d pbar derivative gives the classical Vlasov transport.
#ifndef CARLFEL_WIGNER_HPP
#define CARLFEL_WIGNER_HPP

#include <fftw3.h>

#include <cmath>
#include <cstddef>
#include <cstring>
#include <map>
#include <mutex>
#include <vector>

#include "carlfel/common.hpp"
#include "carlfel/ode.hpp"
#include "carlfel/quantum.hpp"
#include "carlfel/scaling.hpp"

namespace carlfel::wigner {

struct WignerGrid {
    int s2_min = 0;            // doubled momentum index of row 0 (s2 = 2s)
    std::size_t m_theta = 0;   // theta points, theta_i = 2 pi i / m_theta
    double rho_bar = 0.0;      // the rho_bar the momentum quantization belongs to
    std::vector<double> w;     // row-major: w[row * m_theta + i]
    cplx field_a{0.0, 0.0};    // lab frame
    double tau = 0.0;

    std::size_t rows() const { return m_theta == 0 ? 0 : w.size() / m_theta; }
    double pbar_of_row(std::size_t r) const {
        return static_cast<double>(s2_min + static_cast<int>(r)) / rho_bar;
    }
    double* row(std::size_t r) { return w.data() + r * m_theta; }
    const double* row(std::size_t r) const { return w.data() + r * m_theta; }

    WignerGrid like_zero() const {
        WignerGrid z;
        z.s2_min = s2_min;
        z.m_theta = m_theta;
        z.rho_bar = rho_bar;
        z.w.assign(w.size(), 0.0);
        return z;
    }
    void add_scaled(double a, const WignerGrid& o) {
        for (std::size_t i = 0; i < w.size(); ++i) w[i] += a * o.w[i];
        field_a += a * o.field_a;
    }
    double max_abs() const {
        double m = 0.0;
        for (double v : w) accumulate_max_abs(m, v);
        accumulate_max_abs(m, field_a);
        return m;
    }

    void validate() const {
        require(m_theta >= 3 && !w.empty() && w.size() % m_theta == 0,
                "WignerGrid: inconsistent grid shape");
        require(rows() >= 3 && rows() % 2 == 1,
                "WignerGrid: need an odd number of rows >= 3 (paired ladder levels)");
        require(rho_bar > 0 && finite(rho_bar), "WignerGrid: rho_bar must be > 0");
    }
};

/// Discrete Wigner transform of a momentum wavefunction, twisted to the lab
/// frame.  Needs m_points >= 4(n_max - n_min) + 1 so the highest interference
/// harmonic e^{i 2K theta} is alias-free on the grid.
inline WignerGrid wigner_from_state(const quantum::MomentumWavefunction& s,
                                    std::size_t m_points, const ScaledParams& params) {
    params.validate();
    const auto span = static_cast<std::size_t>(s.n_max - s.n_min);  // K
    require(span >= 1, "wigner_from_state: ladder must hold at least two levels");
    require(m_points >= 4 * span + 1,
            describe("wigner_from_state: need at least ", 4 * span + 1,
                     " theta points for ladder span ", span, ", got ", m_points));

    // lab-frame amplitudes
    std::vector<cplx> ct(s.size());
    const double twist = params.delta / params.rho_bar * s.tau;
    for (std::size_t i = 0; i < s.size(); ++i)
        ct[i] = s.c[i] * std::polar(1.0, static_cast<double>(s.level(i)) * twist);

    WignerGrid g;
    g.s2_min = 2 * s.n_min;
    g.m_theta = m_points;
    g.rho_bar = params.rho_bar;
    g.w.assign((2 * span + 1) * m_points, 0.0);
    g.field_a = quantum::lab_field(s, params);
    g.tau = s.tau;

    for (std::size_t r = 0; r < g.rows(); ++r) {
        const int s2 = g.s2_min + static_cast<int>(r);
        // pairs m + n = s2 with difference d = n - m (same parity as s2):
        // d = 0 (even rows only) plus Hermitian-paired d > 0 terms.
        const int d_max = std::min(s2 - 2 * s.n_min, 2 * s.n_max - s2);
        double* out = g.row(r);
        for (std::size_t i = 0; i < m_points; ++i) {
            const double theta =
                two_pi * static_cast<double>(i) / static_cast<double>(m_points);
            double acc = 0.0;
            if (s2 % 2 == 0) acc += std::norm(ct[s.idx(s2 / 2)]);
            for (int d = (s2 % 2 == 0) ? 2 : 1; d <= d_max; d += 2) {
                const cplx pair = std::conj(ct[s.idx((s2 - d) / 2)]) * ct[s.idx((s2 + d) / 2)];
                // pair * e^{i d theta} + its conjugate partner
                acc += 2.0 * (pair * std::polar(1.0, d * theta)).real();
            }
            out[i] = acc / two_pi;
        }
    }
    return g;
}

/// Grid for a single occupied level n0 (theta-uniform row 1/2pi at pbar =
/// 2 n0 / rho_bar, zero elsewhere) on caller-chosen row and angle resolution.
/// This is the exact transform of c_n = delta_{n n0}, so unlike the general
/// constructor it carries no alias constraint tying m_theta to the row span.
inline WignerGrid single_level_grid(int n0, int s2_min, std::size_t rows,
                                    std::size_t m_theta, const ScaledParams& params,
                                    cplx a0 = cplx{0.0, 0.0}) {
    params.validate();
    require(rows >= 3 && rows % 2 == 1, "single_level_grid: need an odd row count >= 3");
    require(m_theta >= 3, "single_level_grid: need at least three theta points");
    const int s2_level = 2 * n0;
    require(s2_min <= s2_level && s2_level <= s2_min + static_cast<int>(rows) - 1,
            describe("single_level_grid: level ", n0, " (doubled index ", s2_level,
                     ") outside rows [", s2_min, ", ",
                     s2_min + static_cast<int>(rows) - 1, "]"));
    WignerGrid g;
    g.s2_min = s2_min;
    g.m_theta = m_theta;
    g.rho_bar = params.rho_bar;
    g.w.assign(rows * m_theta, 0.0);
    g.field_a = a0;
    double* out = g.row(static_cast<std::size_t>(s2_level - s2_min));
    for (std::size_t i = 0; i < m_theta; ++i) out[i] = 1.0 / two_pi;
    return g;
}

struct Marginals {
    std::vector<double> theta_density;          // sum over rows at each theta
    std::vector<double> momentum_distribution;  // d-theta integral of each row
};

/// Momentum marginal integrates rows over theta; the theta marginal sums rows,
/// which for a state-built grid reproduces |psi(theta)|^2 identically.
inline Marginals marginals(const WignerGrid& g) {
    g.validate();
    Marginals m;
    m.theta_density.resize(g.m_theta);
    m.momentum_distribution.resize(g.rows());
    for (std::size_t i = 0; i < g.m_theta; ++i)
        m.theta_density[i] =
            pairwise_sum(g.rows(), [&](std::size_t r) { return g.row(r)[i]; });
    const double dtheta = two_pi / static_cast<double>(g.m_theta);
    for (std::size_t r = 0; r < g.rows(); ++r)
        m.momentum_distribution[r] =
            pairwise_sum(g.m_theta, [&](std::size_t i) { return g.row(r)[i]; }) * dtheta;
    return m;
}

/// Total phase-space mass (1 for a normalized state).
inline double total_mass(const WignerGrid& g) {
    const double dtheta = two_pi / static_cast<double>(g.m_theta);
    return pairwise_sum(g.w.size(), [&](std::size_t j) { return g.w[j]; }) * dtheta;
}

/// <pbar> under the Wigner quasi-probability.
inline double mean_pbar(const WignerGrid& g) {
    const double dtheta = two_pi / static_cast<double>(g.m_theta);
    return pairwise_sum(g.rows(), [&](std::size_t r) {
               return g.pbar_of_row(r) *
                      pairwise_sum(g.m_theta, [&](std::size_t i) { return g.row(r)[i]; });
           }) *
           dtheta;
}

/// |A|^2 + <pbar>_W — the same constant of motion as the classical model.
inline double wigner_invariant(const WignerGrid& g) {
    return std::norm(g.field_a) + mean_pbar(g);
}

namespace detail {

/// Batched spectral derivatives via FFTW.  Plans (FFTW_ESTIMATE) and their
/// buffers are cached per shape; creation and buffer use are serialized by a
/// mutex (plan creation is not thread-safe, and the buffers are shared).
class SpectralDerivatives {
public:
    /// d/d theta along each row of a rows x m row-major array (period 2 pi).
    static void along_rows(const double* in, double* out, std::size_t rows,
                           std::size_t m) {
        auto& self = instance();
        std::lock_guard<std::mutex> lock(self.mutex_);
        auto& p = self.row_plans(rows, m);
        std::memcpy(p.real, in, sizeof(double) * rows * m);
        fftw_execute(p.fwd);
        const std::size_t bins = m / 2 + 1;
        for (std::size_t r = 0; r < rows; ++r) {
            fftw_complex* spec = p.spec + r * bins;
            for (std::size_t k = 0; k < bins; ++k) {
                // multiply by i k / m (unnormalized transform), zero at an
                // even-m Nyquist bin where the derivative sign is ambiguous
                const double kk = (2 * k == m) ? 0.0 : static_cast<double>(k);
                const double re = spec[k][0], im = spec[k][1];
                spec[k][0] = -kk * im / static_cast<double>(m);
                spec[k][1] = kk * re / static_cast<double>(m);
            }
        }
        fftw_execute(p.bwd);
        std::memcpy(out, p.real, sizeof(double) * rows * m);
    }

    /// d/d pbar down each column (row spacing h), treating the column as
    /// periodic — valid for compactly supported rows (edge guard keeps the
    /// wrap-around contribution negligible).
    static void along_columns(const double* in, double* out, std::size_t rows,
                              std::size_t m, double h) {
        auto& self = instance();
        std::lock_guard<std::mutex> lock(self.mutex_);
        auto& p = self.col_plans(rows, m);
        std::memcpy(p.real, in, sizeof(double) * rows * m);
        fftw_execute(p.fwd);
        const std::size_t bins = rows / 2 + 1;
        const double length = static_cast<double>(rows) * h;
        for (std::size_t k = 0; k < bins; ++k) {
            const double kk = (2 * k == rows) ? 0.0 : static_cast<double>(k);
            const double mult = two_pi * kk / length / static_cast<double>(rows);
            fftw_complex* spec = p.spec + k * m;
            for (std::size_t i = 0; i < m; ++i) {
                const double re = spec[i][0], im = spec[i][1];
                spec[i][0] = -mult * im;
                spec[i][1] = mult * re;
            }
        }
        fftw_execute(p.bwd);
        std::memcpy(out, p.real, sizeof(double) * rows * m);
    }

private:
    struct Plans {
        double* real = nullptr;
        fftw_complex* spec = nullptr;
        fftw_plan fwd = nullptr;
        fftw_plan bwd = nullptr;

        ~Plans() {
            if (fwd) fftw_destroy_plan(fwd);
            if (bwd) fftw_destroy_plan(bwd);
            if (real) fftw_free(real);
            if (spec) fftw_free(spec);
        }
    };

    static SpectralDerivatives& instance() {
        static SpectralDerivatives s;
        return s;
    }

    Plans& row_plans(std::size_t rows, std::size_t m) {
        auto [it, fresh] = row_cache_.try_emplace({rows, m});
        Plans& p = it->second;
        if (fresh) {
            p.real = fftw_alloc_real(rows * m);
            p.spec = fftw_alloc_complex(rows * (m / 2 + 1));
            const int n[1] = {static_cast<int>(m)};
            p.fwd = fftw_plan_many_dft_r2c(1, n, static_cast<int>(rows), p.real, nullptr,
                                           1, static_cast<int>(m), p.spec, nullptr, 1,
                                           static_cast<int>(m / 2 + 1), FFTW_ESTIMATE);
            p.bwd = fftw_plan_many_dft_c2r(1, n, static_cast<int>(rows), p.spec, nullptr,
                                           1, static_cast<int>(m / 2 + 1), p.real,
                                           nullptr, 1, static_cast<int>(m),
                                           FFTW_ESTIMATE);
            require(p.fwd && p.bwd, "SpectralDerivatives: FFTW planning failed");
        }
        return p;
    }

    Plans& col_plans(std::size_t rows, std::size_t m) {
        auto [it, fresh] = col_cache_.try_emplace({rows, m});
        Plans& p = it->second;
        if (fresh) {
            p.real = fftw_alloc_real(rows * m);
            p.spec = fftw_alloc_complex((rows / 2 + 1) * m);
            const int n[1] = {static_cast<int>(rows)};
            // columns: stride m between samples, consecutive transforms 1 apart
            p.fwd = fftw_plan_many_dft_r2c(1, n, static_cast<int>(m), p.real, nullptr,
                                           static_cast<int>(m), 1, p.spec, nullptr,
                                           static_cast<int>(m), 1, FFTW_ESTIMATE);
            p.bwd = fftw_plan_many_dft_c2r(1, n, static_cast<int>(m), p.spec, nullptr,
                                           static_cast<int>(m), 1, p.real, nullptr,
                                           static_cast<int>(m), 1, FFTW_ESTIMATE);
            require(p.fwd && p.bwd, "SpectralDerivatives: FFTW planning failed");
        }
        return p;
    }

    std::mutex mutex_;
    std::map<std::pair<std::size_t, std::size_t>, Plans> row_cache_;
    std::map<std::pair<std::size_t, std::size_t>, Plans> col_cache_;
};

/// 4th-order d/d pbar down the columns (needs >= 5 rows).  Rows beyond the
/// ladder read 0 ("the distribution is truncated"), mirroring the treatment
/// in the quantum row-shift form.  This keeps the stencil matrix exactly
/// antisymmetric, so the force term conserves the discrete L2 norm of each
/// theta column; one-sided closures instead seed a boundary instability that
/// blows up once the field saturates.
inline void momentum_derivative_centered4(const double* in, double* out,
                                          std::size_t rows, std::size_t m, double h) {
    require(rows >= 5, "momentum derivative: need at least 5 rows for the stencil");
    const double inv12h = 1.0 / (12.0 * h);
    auto f = [&](std::size_t r, std::size_t i) { return in[r * m + i]; };
    for (std::size_t i = 0; i < m; ++i) {
        out[0 * m + i] = (-f(2, i) + 8.0 * f(1, i)) * inv12h;
        out[1 * m + i] = (-f(3, i) + 8.0 * f(2, i) - 8.0 * f(0, i)) * inv12h;
        const std::size_t e = rows - 1;
        out[(e - 1) * m + i] =
            (8.0 * f(e, i) - 8.0 * f(e - 2, i) + f(e - 3, i)) * inv12h;
        out[e * m + i] = (-8.0 * f(e - 1, i) + f(e - 2, i)) * inv12h;
    }
    for (std::size_t r = 2; r + 2 < rows; ++r)
        for (std::size_t i = 0; i < m; ++i)
            out[r * m + i] = (-f(r + 2, i) + 8.0 * f(r + 1, i) - 8.0 * f(r - 1, i) +
                              f(r - 2, i)) *
                             inv12h;
}

/// e^{i theta_i} on the m-point grid, rebuilt only when m changes.
struct PhaseTable {
    std::vector<cplx> pos;

    void ensure(std::size_t m) {
        if (pos.size() == m) return;
        pos.resize(m);
        for (std::size_t i = 0; i < m; ++i) {
            const double theta = two_pi * static_cast<double>(i) / static_cast<double>(m);
            pos[i] = cplx{std::cos(theta), std::sin(theta)};
        }
    }
};

/// Streaming term and field equation shared by the quantum and Vlasov forms.
/// Writes d.w = -pbar dW/dtheta and d.field_a; scratch receives dW/dtheta.
inline void streaming_and_field(const WignerGrid& g, const ScaledParams& params,
                                WignerGrid& d, std::vector<double>& scratch,
                                const PhaseTable& phases) {
    const std::size_t rows = g.rows(), m = g.m_theta;
    scratch.resize(rows * m);
    SpectralDerivatives::along_rows(g.w.data(), scratch.data(), rows, m);
    for (std::size_t r = 0; r < rows; ++r) {
        const double pbar = g.pbar_of_row(r);
        for (std::size_t i = 0; i < m; ++i)
            d.w[r * m + i] = -pbar * scratch[r * m + i];
    }
    const double dtheta = two_pi / static_cast<double>(m);
    const cplx source = pairwise_sum(g.w.size(), [&](std::size_t j) {
                            return g.w[j] * std::conj(phases.pos[j % m]);
                        }) *
                        dtheta;
    d.field_a = source + cplx{0.0, params.delta / params.rho_bar} * g.field_a;
}

}  // namespace detail

/// Quantum finite-difference evolution: the momentum coupling is the exact
/// row shift [W(row+1) - W(row-1)], rows beyond the ladder reading 0.
class WignerSystem {
public:
    explicit WignerSystem(const ScaledParams& p) : params_(p) { p.validate(); }

    void operator()(const WignerGrid& g, WignerGrid& d) const {
        check_grid(g, params_);
        const std::size_t rows = g.rows(), m = g.m_theta;
        phases_.ensure(m);
        detail::streaming_and_field(g, params_, d, scratch_, phases_);
        const double half_rho = 0.5 * params_.rho_bar;
        force_.resize(m);
        for (std::size_t i = 0; i < m; ++i)
            force_[i] = 2.0 * (g.field_a * phases_.pos[i]).real();
        for (std::size_t r = 0; r < rows; ++r) {
            const double* above = (r + 1 < rows) ? g.row(r + 1) : nullptr;
            const double* below = (r > 0) ? g.row(r - 1) : nullptr;
            double* out = d.w.data() + r * m;
            for (std::size_t i = 0; i < m; ++i) {
                const double up = above ? above[i] : 0.0;
                const double dn = below ? below[i] : 0.0;
                out[i] += half_rho * force_[i] * (up - dn);
            }
        }
    }

    static void check_grid(const WignerGrid& g, const ScaledParams& p) {
        g.validate();
        require(g.rho_bar == p.rho_bar,
                describe("Wigner evolution: grid momentum spacing 1/", g.rho_bar,
                         " does not match the requested rho_bar ", p.rho_bar));
    }

private:
    ScaledParams params_;
    mutable std::vector<double> scratch_;
    mutable std::vector<double> force_;
    mutable detail::PhaseTable phases_;
};

enum class VlasovScheme { centered4, spectral };

/// Classical transport: the row shift is replaced by a true d/d pbar, turning
/// the finite-difference equation into the Vlasov equation.
class VlasovSystem {
public:
    VlasovSystem(const ScaledParams& p, VlasovScheme scheme = VlasovScheme::centered4)
        : params_(p), scheme_(scheme) {
        p.validate();
    }

    void operator()(const WignerGrid& g, WignerGrid& d) const {
        WignerSystem::check_grid(g, params_);
        const std::size_t rows = g.rows(), m = g.m_theta;
        phases_.ensure(m);
        detail::streaming_and_field(g, params_, d, scratch_, phases_);
        const double h = 1.0 / params_.rho_bar;
        dw_dpbar_.resize(rows * m);
        if (scheme_ == VlasovScheme::centered4)
            detail::momentum_derivative_centered4(g.w.data(), dw_dpbar_.data(), rows, m, h);
        else
            detail::SpectralDerivatives::along_columns(g.w.data(), dw_dpbar_.data(), rows,
                                                       m, h);
        force_.resize(m);
        for (std::size_t i = 0; i < m; ++i)
            force_[i] = 2.0 * (g.field_a * phases_.pos[i]).real();
        for (std::size_t r = 0; r < rows; ++r) {
            double* out = d.w.data() + r * m;
            for (std::size_t i = 0; i < m; ++i)
                out[i] += force_[i] * dw_dpbar_[r * m + i];
        }
    }

private:
    ScaledParams params_;
    VlasovScheme scheme_;
    mutable std::vector<double> scratch_;
    mutable std::vector<double> dw_dpbar_;
    mutable std::vector<double> force_;
    mutable detail::PhaseTable phases_;
};

inline WignerGrid rhs_wigner(const WignerGrid& g, const ScaledParams& params) {
    WignerGrid d = g.like_zero();
    WignerSystem{params}(g, d);
    return d;
}

inline WignerGrid rhs_vlasov(const WignerGrid& g, const ScaledParams& params,
                             VlasovScheme scheme = VlasovScheme::centered4) {
    WignerGrid d = g.like_zero();
    VlasovSystem{params, scheme}(g, d);
    return d;
}

}  // namespace carlfel::wigner

#endif

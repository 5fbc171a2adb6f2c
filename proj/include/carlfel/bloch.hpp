// Two-level reduction of the momentum-ladder model: when only two adjacent
// levels n and n-1 are populated, the density matrix collapses to a Bloch
// vector (polarization S = 2 rho_{n-1,n}, inversion D = rho_{n,n} -
// rho_{n-1,n-1}) coupled to a rescaled field A' = sqrt(rho_bar) Abar on the
// rescaled clock tau' = sqrt(rho_bar) tau:
//
//     dS/dtau'  = -i Delta_n S + A' D
//     dD/dtau'  = -(1/2)(A' conj(S) + conj(A') S)
//     dA'/dtau' = kappa S,   Delta_n = (delta - 1 + 2n) / rho_bar^{3/2}
//
// Two field couplings kappa are shipped because the reduced field equation is
// commonly printed with kappa = 1, while substituting S into the exact ladder
// field equation gives kappa = 1/2.  The latter ("consistent-reduction") is
// the default; the full quantum model is the arbiter (see the acceptance
// tests).  At resonance with real S the system is an inverted pendulum
// phi'' = kappa sin(phi) with S = sin(phi), D = cos(phi), A' = dphi/dtau',
// whose separatrix produces a train of hyperbolic-secant field pulses.
#ifndef CARLFEL_BLOCH_HPP
#define CARLFEL_BLOCH_HPP

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "carlfel/analysis.hpp"
#include "carlfel/common.hpp"
#include "carlfel/quantum.hpp"
#include "carlfel/scaling.hpp"

namespace carlfel::bloch {

enum class Variant {
    paper_literal,         // field coupling kappa = 1, as commonly printed
    consistent_reduction,  // kappa = 1/2, exact image of the ladder field equation
};

inline constexpr Variant default_variant = Variant::consistent_reduction;

/// Field-coupling factor; doubles as the pendulum constant in phi'' = kappa sin(phi).
inline double kappa(Variant v) {
    switch (v) {
        case Variant::paper_literal: return 1.0;
        case Variant::consistent_reduction: return 0.5;
    }
    throw ModelError("kappa: unknown variant");
}

struct BlochState {
    int n = 0;                    // upper of the two ladder levels {n-1, n}
    cplx s_pol{0.0, 0.0};         // S = 2 rho_{n-1,n}
    double d_pop = 1.0;           // D = rho_{n,n} - rho_{n-1,n-1}
    cplx field_aprime{0.0, 0.0};  // A' = sqrt(rho_bar) Abar
    double delta_n = 0.0;         // detuning (delta - 1 + 2n) / rho_bar^{3/2}
    double tau = 0.0;             // holds the rescaled time tau' = sqrt(rho_bar) tau

    double tau_prime() const { return tau; }

    void validate() const {
        require(finite(s_pol) && finite(d_pop) && finite(field_aprime) && finite(delta_n),
                "BlochState: non-finite component");
        const double purity = std::norm(s_pol) + d_pop * d_pop;
        require(purity <= 1.0 + 1.0e-8,
                describe("BlochState: |S|^2 + D^2 = ", purity, " exceeds 1"));
    }

    BlochState like_zero() const {
        BlochState z;
        z.n = n;
        z.delta_n = delta_n;
        z.d_pop = 0.0;
        return z;
    }
    void add_scaled(double a, const BlochState& o) {
        s_pol += a * o.s_pol;
        d_pop += a * o.d_pop;
        field_aprime += a * o.field_aprime;
    }
    double max_abs() const {
        double m = 0.0;
        accumulate_max_abs(m, s_pol);
        accumulate_max_abs(m, d_pop);
        accumulate_max_abs(m, field_aprime);
        return m;
    }
};

inline double detuning_for_level(int n, const ScaledParams& params) {
    params.validate();
    return (params.delta - 1.0 + 2.0 * static_cast<double>(n)) /
           std::pow(params.rho_bar, 1.5);
}

/// Project a density matrix onto the two-level subspace {n-1, n}.  Population
/// on any other level is leakage; if it exceeds leak_threshold the reduction
/// is not faithful and the call fails, reporting the leaked probability.
inline BlochState reduce_to_two_level(const quantum::DensityMatrixState& rho, int n,
                                      const ScaledParams& params,
                                      double leak_threshold = 1.0e-3) {
    params.validate();
    require(rho.n_min <= n - 1 && n <= rho.n_max,
            describe("reduce_to_two_level: levels {", n - 1, ", ", n,
                     "} not contained in ladder [", rho.n_min, ", ", rho.n_max, "]"));
    const std::size_t ni = rho.idx(n);
    const std::size_t li = rho.idx(n - 1);
    const double leaked = pairwise_sum(rho.size(), [&](std::size_t k) {
        return (k == ni || k == li) ? 0.0 : std::abs(rho.at(k, k).real());
    });
    require(leaked <= leak_threshold,
            describe("reduce_to_two_level: probability ", leaked,
                     " outside levels {", n - 1, ", ", n, "} exceeds threshold ",
                     leak_threshold));

    const double root_rho = std::sqrt(params.rho_bar);
    BlochState b;
    b.n = n;
    b.s_pol = 2.0 * rho.at(li, ni);
    b.d_pop = rho.at(ni, ni).real() - rho.at(li, li).real();
    b.field_aprime = root_rho * rho.field_abar;
    b.delta_n = detuning_for_level(n, params);
    b.tau = root_rho * rho.tau;
    return b;
}

/// Same projection straight from wavefunction amplitudes (rho_{m,n} = c*_m c_n).
inline BlochState reduce_to_two_level(const quantum::MomentumWavefunction& psi, int n,
                                      const ScaledParams& params,
                                      double leak_threshold = 1.0e-3) {
    params.validate();
    require(psi.n_min <= n - 1 && n <= psi.n_max,
            describe("reduce_to_two_level: levels {", n - 1, ", ", n,
                     "} not contained in ladder [", psi.n_min, ", ", psi.n_max, "]"));
    const std::size_t ni = psi.idx(n);
    const std::size_t li = psi.idx(n - 1);
    const double leaked = pairwise_sum(psi.size(), [&](std::size_t k) {
        return (k == ni || k == li) ? 0.0 : std::norm(psi.c[k]);
    });
    require(leaked <= leak_threshold,
            describe("reduce_to_two_level: probability ", leaked,
                     " outside levels {", n - 1, ", ", n, "} exceeds threshold ",
                     leak_threshold));

    const double root_rho = std::sqrt(params.rho_bar);
    BlochState b;
    b.n = n;
    b.s_pol = 2.0 * std::conj(psi.c[li]) * psi.c[ni];
    b.d_pop = std::norm(psi.c[ni]) - std::norm(psi.c[li]);
    b.field_aprime = root_rho * psi.field_abar;
    b.delta_n = detuning_for_level(n, params);
    b.tau = root_rho * psi.tau;
    return b;
}

class BlochSystem {
public:
    explicit BlochSystem(Variant v) : coupling_(kappa(v)) {}

    void operator()(const BlochState& b, BlochState& d) const {
        d.s_pol = cplx{0.0, -b.delta_n} * b.s_pol + b.field_aprime * b.d_pop;
        d.d_pop = -(b.field_aprime * std::conj(b.s_pol)).real();
        d.field_aprime = coupling_ * b.s_pol;
    }

private:
    double coupling_;
};

inline BlochState rhs_bloch(const BlochState& b, Variant variant) {
    BlochState d = b.like_zero();
    BlochSystem{variant}(b, d);
    return d;
}

/// |A'|^2 + 2 kappa D — constant of motion of the reduced system for either
/// coupling, at any detuning.
inline double bloch_invariant(const BlochState& b, Variant variant) {
    return std::norm(b.field_aprime) + 2.0 * kappa(variant) * b.d_pop;
}

/// |S|^2 + D^2 — conserved exactly; equals 1 on pure two-level states.
inline double bloch_purity(const BlochState& b) {
    return std::norm(b.s_pol) + b.d_pop * b.d_pop;
}

/// Pendulum angle phi with S = sin(phi), D = cos(phi).  Meaningful only at
/// resonance with real polarization, which is enforced.
inline double bloch_angle(const BlochState& b) {
    require(std::abs(b.delta_n) <= 1.0e-12,
            describe("bloch_angle: requires resonance, got Delta_n = ", b.delta_n));
    require(std::abs(b.s_pol.imag()) <= 1.0e-9,
            describe("bloch_angle: requires real S, got Im S = ", b.s_pol.imag()));
    return std::atan2(b.s_pol.real(), b.d_pop);
}

/// State at pendulum angle phi0 with a caller-chosen field seed.
inline BlochState state_from_angle(int n, double phi0, cplx aprime0,
                                   double delta_n = 0.0) {
    BlochState b;
    b.n = n;
    b.s_pol = cplx{std::sin(phi0), 0.0};
    b.d_pop = std::cos(phi0);
    b.field_aprime = aprime0;
    b.delta_n = delta_n;
    return b;
}

/// State exactly on the pendulum separatrix through phi = 0: the energy
/// relation phi'^2 = 4 kappa sin^2(phi/2) fixes A'(0) given phi(0).
inline BlochState separatrix_state(int n, double phi0, Variant variant) {
    return state_from_angle(
        n, phi0, cplx{2.0 * std::sqrt(kappa(variant)) * std::sin(0.5 * phi0), 0.0});
}

/// Closed-form field on the separatrix, centered on the pulse peak:
/// A'(tau') = 2 sqrt(kappa) sech(sqrt(kappa) (tau' - tau'_peak)).
inline double separatrix_field(Variant variant, double tau_from_peak) {
    const double k = kappa(variant);
    return 2.0 * std::sqrt(k) / std::cosh(std::sqrt(k) * tau_from_peak);
}

/// Max over the interior of |phi'' - kappa sin(phi)| for a uniformly sampled
/// angle trajectory (spacing h); phi'' by fourth-order central differences.
/// The angle is unwrapped first, so multi-revolution runs are fine.
inline double pendulum_residual(std::span<const double> phi, double h, Variant variant) {
    require(phi.size() >= 5, "pendulum_residual: need at least five samples");
    require(h > 0 && finite(h), "pendulum_residual: spacing must be > 0");
    const std::vector<double> u = unwrap_angles(phi);
    const double k = kappa(variant);
    const double inv12h2 = 1.0 / (12.0 * h * h);
    double worst = 0.0;
    for (std::size_t i = 2; i + 2 < u.size(); ++i) {
        const double second = (-u[i + 2] + 16.0 * u[i + 1] - 30.0 * u[i] +
                               16.0 * u[i - 1] - u[i - 2]) *
                              inv12h2;
        accumulate_max_abs(worst, second - k * std::sin(u[i]));
    }
    return worst;
}

struct PulseMetrics {
    double peak_intensity = 0.0;  // tallest refined |A'|^2 peak
    double pulse_period = 0.0;    // mean spacing of successive peaks (NaN if only one)
    int revolutions = 0;          // net pendulum winding, rounded to whole turns
    std::vector<Peak> peaks;      // all refined intensity peaks in order
};

/// Pulse-train summary from uniformly sampled intensity |A'|^2 and angle phi
/// (both with spacing h, starting at tau' = t0).  Fails if no pulse peak fits
/// in the sampled window.
inline PulseMetrics two_pi_pulse_metrics(std::span<const double> intensity,
                                         std::span<const double> phi, double h,
                                         double t0 = 0.0) {
    require(intensity.size() == phi.size(),
            "two_pi_pulse_metrics: intensity and angle series must align");
    require(h > 0 && finite(h), "two_pi_pulse_metrics: spacing must be > 0");
    PulseMetrics m;
    m.peaks = find_peaks(intensity, h, 0.25, t0);
    require(!m.peaks.empty(),
            "two_pi_pulse_metrics: trajectory too short to contain one pulse peak");
    for (const Peak& p : m.peaks) m.peak_intensity = std::max(m.peak_intensity, p.height);
    if (m.peaks.size() >= 2) {
        m.pulse_period = (m.peaks.back().t - m.peaks.front().t) /
                         static_cast<double>(m.peaks.size() - 1);
    } else {
        m.pulse_period = std::nan("");
    }
    const std::vector<double> u = unwrap_angles(phi);
    m.revolutions = static_cast<int>(std::floor((u.back() - u.front()) / two_pi + 0.5));
    return m;
}

}  // namespace carlfel::bloch

#endif

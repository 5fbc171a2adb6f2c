// Dimensionless parameterization of collective recoil lasing.
//
// Both realizations of the model (high-gain FEL, CARL) are governed by the
// same pair of dimensionless numbers: the collective parameter rho_bar and
// the detuning delta.  rho_bar sets the maximum number of photons emitted
// per particle (and the maximum recoil in photon-recoil units) and scales
// with particle density as n^(1/3); delta measures the pump/beam frequency
// offset in the natural recoil units of each system.
#ifndef CARLFEL_SCALING_HPP
#define CARLFEL_SCALING_HPP

#include <cmath>

#include "carlfel/common.hpp"
#include "carlfel/constants.hpp"

namespace carlfel {

/// The (rho_bar, delta) pair every dynamical module consumes.
struct ScaledParams {
    double rho_bar;
    double delta;

    void validate() const {
        require(finite(rho_bar) && rho_bar > 0,
                describe("ScaledParams: rho_bar must be finite and > 0, got ", rho_bar));
        require(finite(delta), "ScaledParams: delta must be finite");
    }
};

struct FelPhysicalParams {
    double lambda_w;   // wiggler period, m
    double a_w;        // wiggler parameter, dimensionless
    double gamma0;     // beam energy in rest-mass units
    double density_n;  // particle density N/V, m^-3
    double lambda_r;   // radiation wavelength, m

    void validate() const {
        require(lambda_w > 0 && finite(lambda_w), "FelPhysicalParams: lambda_w must be > 0");
        require(a_w > 0 && finite(a_w), "FelPhysicalParams: a_w must be > 0");
        require(gamma0 > 1 && finite(gamma0), "FelPhysicalParams: gamma0 must be > 1");
        require(density_n > 0 && finite(density_n), "FelPhysicalParams: density_n must be > 0");
        require(lambda_r > 0 && finite(lambda_r), "FelPhysicalParams: lambda_r must be > 0");
    }
};

struct CarlPhysicalParams {
    double rabi_omega;     // pump Rabi frequency Omega, 1/s
    double detuning_pump;  // pump-atom detuning Delta, 1/s (signed)
    double gamma_decay;    // natural decay rate Gamma, 1/s
    double dipole_d;       // dipole matrix element, C m
    double omega;          // backscattered radiation frequency, 1/s
    double omega_p;        // pump frequency, 1/s
    double density_n;      // atom density, m^-3

    void validate() const {
        require(gamma_decay > 0 && finite(gamma_decay), "CarlPhysicalParams: gamma_decay must be > 0");
        require(density_n > 0 && finite(density_n), "CarlPhysicalParams: density_n must be > 0");
        require(dipole_d > 0 && finite(dipole_d), "CarlPhysicalParams: dipole_d must be > 0");
        require(omega > 0 && finite(omega), "CarlPhysicalParams: omega must be > 0");
        require(finite(omega_p), "CarlPhysicalParams: omega_p must be finite");
        require(finite(rabi_omega) && finite(detuning_pump),
                "CarlPhysicalParams: rabi_omega and detuning_pump must be finite");
    }
};

/// fel_scaling output, with the intermediate quantities exposed for pinning.
struct FelScaling {
    double gamma_r;  // resonant energy
    double q;        // classical momentum quantum number m c gamma_r / (hbar k)
    double rho_f;    // high-gain FEL density parameter
    ScaledParams scaled;
};

/// carl_scaling output, with intermediates.
struct CarlScaling {
    double omega_r;  // two-photon recoil frequency 2 hbar k^2 / m
    double s0;       // saturation parameter of the far-detuned pump
    ScaledParams scaled;
};

namespace detail {
inline void check_intermediate(double v, const char* formula, bool positive = true) {
    if (!finite(v) || (positive && v <= 0))
        throw ModelError(describe("scaling: intermediate ", formula,
                                  " is out of domain (value ", v, ")"));
}
}  // namespace detail

/// FEL conversion:
///   gamma_r = sqrt((lambda_w / 2 lambda)(1 + a_w^2))
///   q       = m c gamma_r / (hbar k),              k = 2 pi / lambda
///   rho_f   = (1/gamma_r)(a_w / 4 c k_w)^(2/3) (e^2 n / m eps0)^(1/3)
///   rho_bar = q rho_f,   delta = q (gamma0 - gamma_r) / gamma_r
inline FelScaling fel_scaling(const FelPhysicalParams& p, const PhysicalConstants& k) {
    p.validate();
    k.validate();

    const double k_rad = two_pi / p.lambda_r;
    const double k_w = two_pi / p.lambda_w;

    const double gamma_r_sq = (p.lambda_w / (2.0 * p.lambda_r)) * (1.0 + p.a_w * p.a_w);
    detail::check_intermediate(gamma_r_sq, "gamma_r^2 = (lambda_w/2 lambda)(1+a_w^2)");
    const double gamma_r = std::sqrt(gamma_r_sq);

    const double q = k.m * k.c * gamma_r / (k.hbar * k_rad);
    detail::check_intermediate(q, "q = m c gamma_r / (hbar k)");

    const double rho_f = (1.0 / gamma_r) *
                         std::cbrt(std::pow(p.a_w / (4.0 * k.c * k_w), 2)) *
                         std::cbrt(k.e * k.e * p.density_n / (k.m * k.epsilon0));
    detail::check_intermediate(rho_f, "rho_F = (1/gamma_r)(a_w/4ck_w)^(2/3)(e^2 n/m eps0)^(1/3)");

    FelScaling out;
    out.gamma_r = gamma_r;
    out.q = q;
    out.rho_f = rho_f;
    out.scaled.rho_bar = q * rho_f;
    out.scaled.delta = q * (p.gamma0 - gamma_r) / gamma_r;
    out.scaled.validate();
    return out;
}

/// CARL conversion:
///   omega_R = 2 hbar k^2 / m,                      k = omega / c
///   S0      = Delta Omega / [2 (Gamma^2 + Delta^2 + Omega^2)]
///   rho_bar = (S0/omega_R)^(2/3) (omega d^2 n / 2 hbar eps0)^(1/3)
///   delta   = (omega_p - omega) / omega_R
/// The 2/3 power uses the real cube root, so a negative S0 (red pump
/// detuning) still yields rho_bar > 0; S0 = 0 is rejected as rho_bar = 0
/// is outside the model domain.
inline CarlScaling carl_scaling(const CarlPhysicalParams& p, const PhysicalConstants& k) {
    p.validate();
    k.validate();

    const double denom = p.gamma_decay * p.gamma_decay +
                         p.detuning_pump * p.detuning_pump +
                         p.rabi_omega * p.rabi_omega;
    require(denom > 0, "carl_scaling: Gamma^2 + Delta^2 + Omega^2 must be > 0");

    const double k_rad = p.omega / k.c;
    const double omega_r = 2.0 * k.hbar * k_rad * k_rad / k.m;
    detail::check_intermediate(omega_r, "omega_R = 2 hbar k^2 / m");

    const double s0 = p.detuning_pump * p.rabi_omega / (2.0 * denom);
    require(s0 != 0.0,
            "carl_scaling: S0 = 0 (Omega or Delta vanishes) puts rho_bar = 0 outside the model domain");

    const double cr = std::cbrt(s0 / omega_r);
    const double rho_bar = cr * cr * std::cbrt(p.omega * p.dipole_d * p.dipole_d *
                                               p.density_n / (2.0 * k.hbar * k.epsilon0));
    detail::check_intermediate(rho_bar, "rho_C = (S0/omega_R)^(2/3)(omega d^2 n/2 hbar eps0)^(1/3)");

    CarlScaling out;
    out.omega_r = omega_r;
    out.s0 = s0;
    out.scaled.rho_bar = rho_bar;
    out.scaled.delta = (p.omega_p - p.omega) / omega_r;
    out.scaled.validate();
    return out;
}

/// |a|^2/N in photon-per-particle units: A = (2/N rho_bar)^(1/2) a gives
/// (rho_bar/2)|A|^2.
inline double photons_per_particle(cplx field_a, const ScaledParams& params) {
    return 0.5 * params.rho_bar * std::norm(field_a);
}

}  // namespace carlfel

#endif

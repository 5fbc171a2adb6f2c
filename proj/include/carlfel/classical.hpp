// Classical N-body formulation: N phase-space particles (theta_j, pbar_j)
// coupled to a single complex field mode A.
//
//   dtheta_j/dtau = pbar_j
//   dpbar_j/dtau  = -(A e^{i theta_j} + conj(A) e^{-i theta_j})
//   dA/dtau       = b + i (delta/rho_bar) A,    b = (1/N) sum_j e^{-i theta_j}
//
// |A|^2 + <pbar> is a constant of motion (the detuning term only rotates A's
// phase).  At delta = 0 the equations contain no parameter at all, so
// trajectories are independent of rho_bar.
#ifndef CARLFEL_CLASSICAL_HPP
#define CARLFEL_CLASSICAL_HPP

#include <array>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "carlfel/common.hpp"
#include "carlfel/scaling.hpp"

namespace carlfel::classical {

struct ClassicalState {
    std::vector<double> theta;  // unwrapped during integration; wrap for output
    std::vector<double> pbar;
    cplx field_a{0.0, 0.0};
    double tau = 0.0;

    std::size_t n_particles() const { return theta.size(); }

    ClassicalState like_zero() const {
        ClassicalState z;
        z.theta.assign(theta.size(), 0.0);
        z.pbar.assign(pbar.size(), 0.0);
        return z;
    }

    void add_scaled(double a, const ClassicalState& o) {
        for (std::size_t j = 0; j < theta.size(); ++j) theta[j] += a * o.theta[j];
        for (std::size_t j = 0; j < pbar.size(); ++j) pbar[j] += a * o.pbar[j];
        field_a += a * o.field_a;
    }

    double max_abs() const {
        double m = 0.0;
        for (double t : theta) accumulate_max_abs(m, t);
        for (double p : pbar) accumulate_max_abs(m, p);
        accumulate_max_abs(m, field_a);
        return m;
    }

    void validate() const {
        require(!theta.empty() && theta.size() == pbar.size(),
                "ClassicalState: theta/pbar must be non-empty and equal length");
        for (double t : theta) require(finite(t), "ClassicalState: non-finite theta");
        for (double p : pbar) require(finite(p), "ClassicalState: non-finite pbar");
        require(finite(field_a), "ClassicalState: non-finite field");
    }
};

/// Mean phasor b = (1/N) sum_j e^{-i theta_j}; |b| <= 1.  Fixed pairwise
/// summation order for reproducibility.
inline cplx bunching(std::span<const double> theta) {
    require(!theta.empty(), "bunching: empty angle array");
    const cplx sum = pairwise_sum(theta.size(), [&](std::size_t j) {
        return cplx{std::cos(theta[j]), -std::sin(theta[j])};
    });
    return sum / static_cast<double>(theta.size());
}

inline double mean_pbar(std::span<const double> pbar) {
    require(!pbar.empty(), "mean_pbar: empty momentum array");
    return pairwise_sum(pbar) / static_cast<double>(pbar.size());
}

/// |A|^2 + <pbar>: emitted intensity paid for by average recoil.
inline double classical_invariant(const ClassicalState& s) {
    return std::norm(s.field_a) + mean_pbar(s.pbar);
}

/// Right-hand-side functor bound to fixed (rho_bar, delta).
class ClassicalSystem {
public:
    explicit ClassicalSystem(const ScaledParams& p) : delta_over_rho_(p.delta / p.rho_bar) {
        p.validate();
    }

    void operator()(const ClassicalState& s, ClassicalState& d) const {
        const std::size_t n = s.theta.size();
        for (std::size_t j = 0; j < n; ++j) {
            d.theta[j] = s.pbar[j];
            // -(A e^{i theta} + c.c.) = -2 Re(A e^{i theta})
            const cplx phase{std::cos(s.theta[j]), std::sin(s.theta[j])};
            d.pbar[j] = -2.0 * (s.field_a * phase).real();
        }
        d.field_a = bunching(s.theta) + cplx{0.0, delta_over_rho_} * s.field_a;
    }

    double delta_over_rho() const { return delta_over_rho_; }

private:
    double delta_over_rho_;
};

/// One derivative evaluation as a plain function (the integrator uses the
/// functor directly).
inline ClassicalState rhs_classical(const ClassicalState& s, const ScaledParams& params) {
    s.validate();
    ClassicalState d = s.like_zero();
    ClassicalSystem{params}(s, d);
    return d;
}

struct Placement {
    enum class Kind { equispaced, seeded_random } kind = Kind::equispaced;
    std::uint64_t seed = 0;

    static Placement equispaced() { return {}; }
    static Placement seeded_random(std::uint64_t seed) {
        return {Kind::seeded_random, seed};
    }
};

/// Unbunched cold beam: pbar_j = 0, field seeded with a0.  Equispaced
/// placement gives bunching = 0 exactly (up to roundoff) for N >= 2;
/// seeded-random placement models shot noise, b ~ N^{-1/2}.
inline ClassicalState init_cold_beam(std::size_t n_particles, cplx a0,
                                     const Placement& placement = Placement::equispaced()) {
    require(n_particles >= 1, "init_cold_beam: need at least one particle");
    require(finite(a0), "init_cold_beam: a0 must be finite");

    ClassicalState s;
    s.theta.resize(n_particles);
    s.pbar.assign(n_particles, 0.0);
    s.field_a = a0;

    if (placement.kind == Placement::Kind::equispaced) {
        for (std::size_t j = 0; j < n_particles; ++j)
            s.theta[j] = two_pi * static_cast<double>(j) / static_cast<double>(n_particles);
    } else {
        // Raw-bit to [0,1) conversion so the value stream is fixed by the
        // mt19937_64 sequence alone, independent of library distribution
        // implementations.
        std::mt19937_64 gen(placement.seed);
        for (std::size_t j = 0; j < n_particles; ++j) {
            const double u = static_cast<double>(gen() >> 11) * 0x1.0p-53;
            s.theta[j] = two_pi * u;
        }
    }
    return s;
}

/// Roots of the collective dispersion relation obtained by linearizing the
/// equations about the unbunched cold beam:
///     s^3 - i c s^2 - i = 0,
/// where c is the detuning coefficient of the field equation (delta/rho_bar
/// for the presets).  Returned sorted by descending real part; the first
/// root's real part is the amplitude growth rate (intensity grows at twice
/// that).  For c = 0 the cubic is s^3 = i with max Re(s) = sqrt(3)/2.
inline std::array<cplx, 3> linear_growth_rate(double delta_coeff) {
    require(finite(delta_coeff), "linear_growth_rate: detuning must be finite");
    const cplx ic{0.0, delta_coeff};
    const auto f = [&](cplx s) { return s * s * s - ic * s * s - cplx{0.0, 1.0}; };

    // Durand–Kerner on the monic cubic.
    std::array<cplx, 3> r{cplx{0.4, 0.9}, cplx{0.4, 0.9} * cplx{0.4, 0.9},
                          cplx{0.4, 0.9} * cplx{0.4, 0.9} * cplx{0.4, 0.9}};
    for (int it = 0; it < 200; ++it) {
        double moved = 0.0;
        for (int i = 0; i < 3; ++i) {
            cplx denom{1.0, 0.0};
            for (int j = 0; j < 3; ++j)
                if (j != i) denom *= r[i] - r[j];
            const cplx step = f(r[i]) / denom;
            r[i] -= step;
            moved = std::max(moved, std::abs(step));
        }
        if (moved < 1.0e-15) break;
    }
    std::sort(r.begin(), r.end(),
              [](const cplx& a, const cplx& b) { return a.real() > b.real(); });
    return r;
}

/// Histogram of wrapped angles over [0, 2pi) — density-grating diagnostic.
inline std::vector<std::size_t> theta_histogram(std::span<const double> theta,
                                                std::size_t n_bins) {
    require(n_bins >= 1, "theta_histogram: need at least one bin");
    require(!theta.empty(), "theta_histogram: empty angle array");
    std::vector<std::size_t> counts(n_bins, 0);
    for (double t : theta) {
        double w = std::fmod(t, two_pi);
        if (w < 0) w += two_pi;
        auto b = static_cast<std::size_t>(w / two_pi * static_cast<double>(n_bins));
        if (b >= n_bins) b = n_bins - 1;  // w == 2pi after fmod roundoff
        ++counts[b];
    }
    return counts;
}

/// Peak bin count relative to the uniform level N/n_bins.
inline double density_contrast(std::span<const double> theta, std::size_t n_bins) {
    const auto counts = theta_histogram(theta, n_bins);
    std::size_t peak = 0;
    for (auto c : counts) peak = std::max(peak, c);
    const double uniform =
        static_cast<double>(theta.size()) / static_cast<double>(n_bins);
    return static_cast<double>(peak) / uniform;
}

}  // namespace carlfel::classical

#endif

// Uniform run records: one row per output sample, identical columns for every
// formulation so runs can be compared, persisted, and replotted
// interchangeably.  Column semantics per model are documented in the README;
// in short, re_A/im_A is the reporting-frame field (the rescaled field A' for
// two-level runs, whose clock is tau'), norm is the model's conserved
// normalization, and invariant_value is its intensity-plus-recoil constant.
#ifndef CARLFEL_TIMESERIES_HPP
#define CARLFEL_TIMESERIES_HPP

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "carlfel/analysis.hpp"
#include "carlfel/bloch.hpp"
#include "carlfel/classical.hpp"
#include "carlfel/common.hpp"
#include "carlfel/quantum.hpp"
#include "carlfel/scaling.hpp"
#include "carlfel/wigner.hpp"

namespace carlfel::harness {

struct TimeSeriesRecord {
    double tau = 0.0;
    double re_a = 0.0;
    double im_a = 0.0;
    double abs_a2 = 0.0;
    double photons_per_particle = 0.0;
    double mean_pbar = 0.0;
    double norm = 0.0;
    double invariant_value = 0.0;

    void validate() const {
        for (double v : {tau, re_a, im_a, abs_a2, photons_per_particle, mean_pbar,
                         norm, invariant_value})
            require(finite(v), describe("TimeSeriesRecord: non-finite value at tau = ", tau));
    }
};

inline TimeSeriesRecord record_from(const classical::ClassicalState& s,
                                    const ScaledParams& params) {
    TimeSeriesRecord r;
    r.tau = s.tau;
    r.re_a = s.field_a.real();
    r.im_a = s.field_a.imag();
    r.abs_a2 = std::norm(s.field_a);
    r.photons_per_particle = photons_per_particle(s.field_a, params);
    r.mean_pbar = classical::mean_pbar(s.pbar);
    r.norm = 1.0;  // fixed particle count
    r.invariant_value = classical::classical_invariant(s);
    return r;
}

namespace detail {
template <class State>
TimeSeriesRecord record_from_ladder(const State& s, const ScaledParams& params) {
    const auto o = quantum::observables(s, params);
    const cplx a = quantum::lab_field(s, params);
    TimeSeriesRecord r;
    r.tau = s.tau;
    r.re_a = a.real();
    r.im_a = a.imag();
    r.abs_a2 = o.intensity;
    r.photons_per_particle = photons_per_particle(a, params);
    r.mean_pbar = o.mean_pbar;
    r.norm = o.norm;
    r.invariant_value = o.intensity + o.mean_pbar;
    return r;
}
}  // namespace detail

inline TimeSeriesRecord record_from(const quantum::MomentumWavefunction& s,
                                    const ScaledParams& params) {
    return detail::record_from_ladder(s, params);
}

inline TimeSeriesRecord record_from(const quantum::DensityMatrixState& s,
                                    const ScaledParams& params) {
    return detail::record_from_ladder(s, params);
}

inline TimeSeriesRecord record_from(const wigner::WignerGrid& g,
                                    const ScaledParams& params) {
    TimeSeriesRecord r;
    r.tau = g.tau;
    r.re_a = g.field_a.real();
    r.im_a = g.field_a.imag();
    r.abs_a2 = std::norm(g.field_a);
    r.photons_per_particle = photons_per_particle(g.field_a, params);
    r.mean_pbar = wigner::mean_pbar(g);
    r.norm = wigner::total_mass(g);
    r.invariant_value = wigner::wigner_invariant(g);
    return r;
}

/// Two-level records live on the rescaled clock: tau holds tau', the field
/// columns hold A' = sqrt(rho_bar) Abar, and abs_A2 = |A'|^2.  Photons per
/// particle is |A'|^2 / 2 (i.e. (rho_bar/2)|Abar|^2), norm is the Bloch-vector
/// purity, and invariant_value is the variant's conservation constant.
inline TimeSeriesRecord record_from(const bloch::BlochState& b, const ScaledParams& params,
                                    bloch::Variant variant) {
    TimeSeriesRecord r;
    r.tau = b.tau_prime();
    r.re_a = b.field_aprime.real();
    r.im_a = b.field_aprime.imag();
    r.abs_a2 = std::norm(b.field_aprime);
    r.photons_per_particle = 0.5 * r.abs_a2;
    const double mean_p =
        static_cast<double>(b.n) - 0.5 * (1.0 - b.d_pop);  // P_n = (1+D)/2
    r.mean_pbar = 2.0 / params.rho_bar * mean_p;
    r.norm = bloch::bloch_purity(b);
    r.invariant_value = bloch::bloch_invariant(b, variant);
    return r;
}

/// Observer that appends one record per sample; usable with every state type.
struct RecordSink {
    ScaledParams params;
    std::vector<TimeSeriesRecord> records;

    explicit RecordSink(const ScaledParams& p) : params(p) {}

    template <class State>
    void operator()(const State& s) {
        records.push_back(record_from(s, params));
    }
    void clear() { records.clear(); }
};

inline std::vector<double> extract(std::span<const TimeSeriesRecord> records,
                                   double TimeSeriesRecord::* column) {
    std::vector<double> out;
    out.reserve(records.size());
    for (const auto& r : records) out.push_back(r.*column);
    return out;
}

/// Uniform sample spacing of a record series; every gap is checked, not just
/// the average, so interior jitter cannot slip through.
inline double sample_spacing(std::span<const TimeSeriesRecord> records) {
    require(records.size() >= 2, "sample_spacing: need at least two records");
    const double dt = records[1].tau - records[0].tau;
    require(dt > 0, "sample_spacing: records must advance in time");
    const double tol = 1.0e-9 * std::max(1.0, std::abs(records.back().tau));
    for (std::size_t i = 1; i < records.size(); ++i)
        require(std::abs(records[i].tau - records[i - 1].tau - dt) <= tol,
                "sample_spacing: records are not uniformly sampled");
    return dt;
}

/// Refined first peak of the |A|^2 column.
inline std::optional<Peak> first_intensity_peak(std::span<const TimeSeriesRecord> records) {
    if (records.size() < 3) return std::nullopt;
    const auto a2 = extract(records, &TimeSeriesRecord::abs_a2);
    return first_peak(a2, sample_spacing(records), 0.25, records.front().tau);
}

/// Exponential growth rate of |A|^2 fitted on log-intensity inside the
/// window (fit_lo, fit_hi) — chosen to exclude both the seeded transient and
/// saturation.  Needs at least min_points samples inside the window.
inline double fit_intensity_growth_rate(std::span<const TimeSeriesRecord> records,
                                        double fit_lo = 1.0e-6, double fit_hi = 1.0e-2,
                                        std::size_t min_points = 10) {
    require(fit_lo > 0 && fit_hi > fit_lo, "fit_intensity_growth_rate: bad window");
    std::vector<double> t, logy;
    for (const auto& r : records) {
        if (r.abs_a2 > fit_lo && r.abs_a2 < fit_hi) {
            t.push_back(r.tau);
            logy.push_back(std::log(r.abs_a2));
        }
    }
    require(t.size() >= min_points,
            describe("fit_intensity_growth_rate: only ", t.size(),
                     " samples inside the fit window"));
    return fit_slope(t, logy);
}

/// Rescale a lab-clock series into the two-level variables tau' = sqrt(rho) tau,
/// A' = sqrt(rho) A, so it can be compared against a two-level run directly.
inline std::vector<TimeSeriesRecord> to_primed(std::span<const TimeSeriesRecord> records,
                                               double rho_bar) {
    require(rho_bar > 0 && finite(rho_bar), "to_primed: rho_bar must be > 0");
    const double root = std::sqrt(rho_bar);
    std::vector<TimeSeriesRecord> out(records.begin(), records.end());
    for (auto& r : out) {
        r.tau *= root;
        r.re_a *= root;
        r.im_a *= root;
        r.abs_a2 *= rho_bar;
        r.photons_per_particle = 0.5 * r.abs_a2;
    }
    return out;
}

}  // namespace carlfel::harness

#endif

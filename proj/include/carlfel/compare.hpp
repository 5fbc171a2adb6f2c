// Cross-formulation divergence: relative L-infinity and L2 distances of the
// shared observables over the window from tau = 0 to the reference run's
// first intensity peak, with linear resampling onto the reference grid.
#ifndef CARLFEL_COMPARE_HPP
#define CARLFEL_COMPARE_HPP

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "carlfel/analysis.hpp"
#include "carlfel/common.hpp"
#include "carlfel/timeseries.hpp"

namespace carlfel::harness {

struct SeriesDistance {
    std::string observable;
    double rel_linf = 0.0;
    double rel_l2 = 0.0;
};

struct CompareReport {
    double window_end = 0.0;  // reference first-peak time (or overlap end if shorter)
    std::vector<SeriesDistance> distances;

    const SeriesDistance& primary() const { return distances.front(); }
};

namespace detail {

inline SeriesDistance distance_on_window(std::span<const TimeSeriesRecord> ref,
                                         std::span<const TimeSeriesRecord> other,
                                         double TimeSeriesRecord::* column,
                                         const std::string& name, double window_end) {
    const double other_dt = sample_spacing(other);
    const auto ref_col = extract(ref, column);
    const auto other_col = extract(other, column);

    double sup_diff = 0.0, sup_ref = 0.0, ss_diff = 0.0, ss_ref = 0.0;
    for (std::size_t i = 0; i < ref.size(); ++i) {
        const double t = ref[i].tau;
        if (t > window_end) break;
        const double a = ref_col[i];
        const double b = sample_linear(other_col, other_dt, t, other.front().tau);
        accumulate_max_abs(sup_diff, a - b);
        accumulate_max_abs(sup_ref, a);
        ss_diff += (a - b) * (a - b);
        ss_ref += a * a;
    }
    require(sup_ref > 0.0, describe("compare: reference column ", name,
                                    " vanishes on the window"));
    return {name, sup_diff / sup_ref, std::sqrt(ss_diff / ss_ref)};
}

}  // namespace detail

/// Distances of |A|^2 (primary), mean momentum, and normalization between two
/// runs of the same experiment.  The window ends at the reference run's first
/// intensity peak; the other run is linearly resampled onto the reference
/// times.  Fails if the sampled ranges do not overlap the window.
inline CompareReport compare_records(std::span<const TimeSeriesRecord> ref,
                                     std::span<const TimeSeriesRecord> other) {
    require(ref.size() >= 3 && other.size() >= 3,
            "compare: need at least three samples per run");
    const auto peak = first_intensity_peak(ref);
    require(peak.has_value(), "compare: reference run has no intensity peak");
    const double overlap_end = std::min(ref.back().tau, other.back().tau);
    const double window_end = std::min(peak->t, overlap_end);
    require(other.front().tau <= window_end && other.back().tau >= ref.front().tau,
            "compare: sampled ranges are disjoint");

    CompareReport report;
    report.window_end = window_end;
    report.distances.push_back(detail::distance_on_window(
        ref, other, &TimeSeriesRecord::abs_a2, "abs_A2", window_end));
    report.distances.push_back(detail::distance_on_window(
        ref, other, &TimeSeriesRecord::mean_pbar, "mean_pbar", window_end));
    report.distances.push_back(detail::distance_on_window(
        ref, other, &TimeSeriesRecord::norm, "norm", window_end));
    return report;
}

/// Peak-to-peak drift of a conserved column, as an absolute number.
inline double column_drift(std::span<const TimeSeriesRecord> records,
                           double TimeSeriesRecord::* column) {
    require(!records.empty(), "column_drift: empty series");
    double lo = records.front().*column, hi = lo;
    for (const auto& r : records) {
        lo = std::min(lo, r.*column);
        hi = std::max(hi, r.*column);
    }
    return hi - lo;
}

}  // namespace carlfel::harness

#endif

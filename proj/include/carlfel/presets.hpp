// Named, fully pinned experiments.  Every preset fixes its parameters,
// initial state, resolution, and integration tolerances in code so that a
// rerun is byte-identical; durations extend just past the second intensity
// peak of the respective model (first-peak times are reported, since the
// interesting observables are snapshotted there).
#ifndef CARLFEL_PRESETS_HPP
#define CARLFEL_PRESETS_HPP

#include <filesystem>
#include <string>
#include <vector>

#include "carlfel/bloch.hpp"
#include "carlfel/classical.hpp"
#include "carlfel/compare.hpp"
#include "carlfel/io.hpp"
#include "carlfel/quantum.hpp"
#include "carlfel/timeseries.hpp"
#include "carlfel/wigner.hpp"

namespace carlfel::harness {

inline const std::vector<std::string>& preset_names() {
    static const std::vector<std::string> names{
        "fig1-row1",        "fig1-row2",       "fig1-row3",
        "classical-growth", "two-level-pulses", "limit-comparison"};
    return names;
}

/// Quantum single-level start (c_n(0) = delta_{n0}, field seed a0) with all
/// run choices pinned.
struct QuantumExperiment {
    ScaledParams params;
    cplx a0{1.0e-4, 0.0};
    quantum::LadderBounds ladder{0, 0};
    double tau_end = 0.0;
    double sample_dt = 0.01;
    IntegrationOptions integ{1.0e-10, 1.0e-12, 1.0e-3, 1.0e-12, 0.9};
};

/// The three single-model rows: rho_bar = 10, 1, 0.2 at delta = 1.  Ladders
/// are sized so the edge-occupation guard never trips (measured margins);
/// durations cover the second intensity peak.
inline QuantumExperiment quantum_row(int row) {
    QuantumExperiment e;
    switch (row) {
        case 1:
            e.params = {10.0, 1.0};
            e.ladder = {-56, 24};
            e.tau_end = 20.0;
            break;
        case 2:
            e.params = {1.0, 1.0};
            e.ladder = {-12, 8};
            e.tau_end = 28.0;
            break;
        case 3:
            e.params = {0.2, 1.0};
            e.ladder = {-9, 8};
            e.tau_end = 120.0;
            break;
        default:
            throw ModelError(describe("quantum_row: row must be 1..3, got ", row));
    }
    return e;
}

struct QuantumRunResult {
    QuantumExperiment experiment;
    std::vector<TimeSeriesRecord> records;
    std::vector<quantum::MomentumWavefunction> samples;  // one per record
    Peak first_peak;                                     // of |A|^2
};

inline QuantumRunResult run_quantum_experiment(const QuantumExperiment& e) {
    auto s0 = quantum::init_momentum_state(0, e.ladder);
    s0.field_abar = e.a0;
    quantum::EvolveConfig cfg;
    cfg.integ = e.integ;
    cfg.sample_dt = e.sample_dt;

    QuantumRunResult result;
    result.experiment = e;
    struct Sink {
        QuantumRunResult* r;
        const ScaledParams* p;
        void operator()(const quantum::MomentumWavefunction& s) {
            r->records.push_back(record_from(s, *p));
            r->samples.push_back(s);
        }
        void clear() {
            r->records.clear();
            r->samples.clear();
        }
    } sink{&result, &e.params};
    quantum::evolve(s0, e.params, cfg, e.tau_end, sink);

    const auto peak = first_intensity_peak(result.records);
    require(peak.has_value(),
            describe("preset run reached tau = ", e.tau_end,
                     " without an intensity peak; extend the run"));
    result.first_peak = *peak;
    return result;
}

struct ClassicalExperiment {
    ScaledParams params{10.0, 0.0};
    std::size_t n_particles = 10000;
    cplx a0{1.0e-4, 0.0};
    classical::Placement placement = classical::Placement::equispaced();
    double tau_end = 20.0;
    double sample_dt = 0.01;
    IntegrationOptions integ{1.0e-10, 1.0e-12, 1.0e-3, 1.0e-12, 0.9};
};

struct ClassicalRunResult {
    ClassicalExperiment experiment;
    std::vector<TimeSeriesRecord> records;
    classical::ClassicalState final_state;
    classical::ClassicalState peak_state;  // snapshot at the first-peak sample
    Peak first_peak;
};

inline ClassicalRunResult run_classical_experiment(const ClassicalExperiment& e) {
    ClassicalRunResult result;
    result.experiment = e;
    auto s = classical::init_cold_beam(e.n_particles, e.a0, e.placement);
    std::vector<classical::ClassicalState> ring;  // every sample, for the peak snapshot
    integrate_adaptive(
        s, classical::ClassicalSystem{e.params}, e.tau_end, e.sample_dt,
        [&](const classical::ClassicalState& st) {
            result.records.push_back(record_from(st, e.params));
            ring.push_back(st);
        },
        e.integ);
    result.final_state = s;
    const auto peak = first_intensity_peak(result.records);
    require(peak.has_value(),
            describe("preset run reached tau = ", e.tau_end,
                     " without an intensity peak; extend the run"));
    result.first_peak = *peak;
    result.peak_state = ring[peak->index];
    return result;
}

struct GridExperiment {
    ScaledParams params{10.0, 1.0};
    cplx a0{1.0e-4, 0.0};
    int s2_min = -96;
    std::size_t rows = 129;
    std::size_t m_theta = 128;
    double tau_end = 14.5;
    double sample_dt = 0.05;
    IntegrationOptions integ{1.0e-6, 1.0e-10, 1.0e-3, 1.0e-12, 0.9};
    wigner::VlasovScheme scheme = wigner::VlasovScheme::centered4;
};

struct GridRunResult {
    GridExperiment experiment;
    std::vector<TimeSeriesRecord> records;
    wigner::WignerGrid final_grid;
    Peak first_peak;
};

template <class System>
GridRunResult run_grid_experiment(const GridExperiment& e, const System& system) {
    GridRunResult result;
    result.experiment = e;
    auto g = wigner::single_level_grid(0, e.s2_min, e.rows, e.m_theta, e.params, e.a0);
    integrate_adaptive(
        g, system, e.tau_end, e.sample_dt,
        [&](const wigner::WignerGrid& st) { result.records.push_back(record_from(st, e.params)); },
        e.integ);
    result.final_grid = g;
    const auto peak = first_intensity_peak(result.records);
    require(peak.has_value(),
            describe("preset run reached tau = ", e.tau_end,
                     " without an intensity peak; extend the run"));
    result.first_peak = *peak;
    return result;
}

struct TwoLevelExperiment {
    ScaledParams params{0.2, 1.0};  // sets the photon bookkeeping; Delta_0 = 0
    bloch::Variant variant = bloch::default_variant;
    cplx aprime0{1.0e-4, 0.0};
    double tau_prime_end = 100.0;
    double sample_dt = 0.01;
    IntegrationOptions integ{1.0e-12, 1.0e-14, 1.0e-3, 1.0e-12, 0.9};
};

struct TwoLevelRunResult {
    TwoLevelExperiment experiment;
    std::vector<TimeSeriesRecord> records;  // on the tau' clock
    std::vector<double> angle;              // pendulum angle per sample
    bloch::PulseMetrics metrics;
};

inline TwoLevelRunResult run_two_level_experiment(const TwoLevelExperiment& e) {
    TwoLevelRunResult result;
    result.experiment = e;
    auto b = bloch::state_from_angle(0, 0.0, e.aprime0,
                                     bloch::detuning_for_level(0, e.params));
    require(b.delta_n == 0.0,
            "two-level preset expects the resonant level (delta = 1, n = 0)");
    integrate_adaptive(
        b, bloch::BlochSystem{e.variant}, e.tau_prime_end, e.sample_dt,
        [&](const bloch::BlochState& st) {
            result.records.push_back(record_from(st, e.params, e.variant));
            result.angle.push_back(bloch::bloch_angle(st));
        },
        e.integ);
    result.metrics = bloch::two_pi_pulse_metrics(
        extract(result.records, &TimeSeriesRecord::abs_a2), result.angle, e.sample_dt);
    return result;
}

namespace detail {

inline json distances_json(const CompareReport& r) {
    json out;
    out["window_end"] = r.window_end;
    for (const auto& d : r.distances)
        out[d.observable] = {{"rel_linf", d.rel_linf}, {"rel_l2", d.rel_l2}};
    return out;
}

inline json drift_json(std::span<const TimeSeriesRecord> records) {
    return {{"norm", column_drift(records, &TimeSeriesRecord::norm)},
            {"invariant_value", column_drift(records, &TimeSeriesRecord::invariant_value)}};
}

inline json peak_json(const Peak& p) {
    return {{"tau", p.t}, {"abs_A2", p.height}};
}

}  // namespace detail

/// Run one named preset, write its artifacts under out_dir/<name>/, and
/// return the report that was also written as report.json.
inline json run_preset(const std::string& name, const std::filesystem::path& out_dir) {
    const std::filesystem::path dir = out_dir / name;
    json report;
    report["schema"] = "carlfel-report-v1";
    report["preset"] = name;
    std::vector<std::string> files;

    auto emit_timeseries = [&](const std::string& file,
                               std::span<const TimeSeriesRecord> records) {
        write_timeseries_csv(dir / file, records);
        files.push_back(file);
    };

    if (name == "fig1-row1" || name == "fig1-row2" || name == "fig1-row3") {
        const int row = name.back() - '0';
        const auto e = quantum_row(row);
        auto run = run_quantum_experiment(e);
        report["params"] = {{"rho_bar", e.params.rho_bar},
                            {"delta", e.params.delta},
                            {"a0", {e.a0.real(), e.a0.imag()}},
                            {"ladder", {run.samples.front().n_min, run.samples.front().n_max}},
                            {"tau_end", e.tau_end},
                            {"sample_dt", e.sample_dt}};
        emit_timeseries("timeseries.csv", run.records);

        const auto& peak_state = run.samples[run.first_peak.index];
        write_populations_csv(dir / "populations_first_peak.csv", peak_state);
        files.push_back("populations_first_peak.csv");

        const std::size_t span = peak_state.size() - 1;
        const std::size_t m_psi = std::max<std::size_t>(256, 2 * span + 1);
        write_theta_series_csv(dir / "psi_density_first_peak.csv", "psi2",
                               quantum::psi_density(peak_state, m_psi, e.params));
        files.push_back("psi_density_first_peak.csv");

        write_wigner_csv(dir / "wigner_first_peak.csv",
                         wigner::wigner_from_state(peak_state, 4 * span + 2, e.params));
        files.push_back("wigner_first_peak.csv");

        const auto pops = quantum::populations(peak_state);
        const double p0 = pops[peak_state.idx(0)];
        const double pm1 = pops[peak_state.idx(-1)];
        const auto obs = quantum::observables(peak_state, e.params);
        report["first_peak"] = detail::peak_json(run.first_peak);
        report["at_first_peak"] = {
            {"P0", p0},
            {"P_minus1", pm1},
            {"P0_plus_Pminus1", p0 + pm1},
            {"two_level_leakage", obs.norm - p0 - pm1},
            {"mean_p", obs.mean_p},
            {"mean_pbar", obs.mean_pbar},
            {"photons_per_particle", photons_per_particle(
                                         quantum::lab_field(peak_state, e.params), e.params)}};
        report["drift"] = detail::drift_json(run.records);
    } else if (name == "classical-growth") {
        ClassicalExperiment e;  // delta = 0: the self-similar growth case
        auto run = run_classical_experiment(e);
        report["params"] = {{"rho_bar", e.params.rho_bar},
                            {"delta", e.params.delta},
                            {"n_particles", e.n_particles},
                            {"a0", {e.a0.real(), e.a0.imag()}},
                            {"tau_end", e.tau_end},
                            {"sample_dt", e.sample_dt}};
        emit_timeseries("timeseries.csv", run.records);

        const std::size_t n_bins = 64;
        const auto counts = classical::theta_histogram(run.peak_state.theta, n_bins);
        std::vector<double> density(counts.size());
        for (std::size_t i = 0; i < counts.size(); ++i)
            density[i] = static_cast<double>(counts[i]) *
                         static_cast<double>(n_bins) /
                         (static_cast<double>(e.n_particles) * two_pi);
        write_theta_series_csv(dir / "theta_density_first_peak.csv", "density", density);
        files.push_back("theta_density_first_peak.csv");

        const double rate = fit_intensity_growth_rate(run.records);
        const auto roots = classical::linear_growth_rate(0.0);
        report["first_peak"] = detail::peak_json(run.first_peak);
        report["fitted_intensity_rate"] = rate;
        report["predicted_intensity_rate"] = 2.0 * roots[0].real();
        report["bunching_at_first_peak"] =
            std::abs(classical::bunching(run.peak_state.theta));
        report["density_contrast_at_first_peak"] =
            classical::density_contrast(run.peak_state.theta, n_bins);
        report["drift"] = detail::drift_json(run.records);
    } else if (name == "two-level-pulses") {
        TwoLevelExperiment e;
        auto run = run_two_level_experiment(e);
        report["params"] = {{"rho_bar", e.params.rho_bar},
                            {"variant", e.variant == bloch::Variant::paper_literal
                                            ? "paper-literal"
                                            : "consistent-reduction"},
                            {"aprime0", {e.aprime0.real(), e.aprime0.imag()}},
                            {"tau_prime_end", e.tau_prime_end},
                            {"sample_dt", e.sample_dt}};
        emit_timeseries("timeseries.csv", run.records);
        json peaks = json::array();
        for (const auto& p : run.metrics.peaks) peaks.push_back(detail::peak_json(p));
        report["pulses"] = {{"peak_intensity", run.metrics.peak_intensity},
                            {"pulse_period", run.metrics.pulse_period},
                            {"revolutions", run.metrics.revolutions},
                            {"peaks", peaks},
                            {"intensity_gain_first_pulse",
                             run.metrics.peaks.front().height - run.records.front().abs_a2},
                            {"pendulum_residual",
                             bloch::pendulum_residual(run.angle, e.sample_dt, e.variant)}};
        report["drift"] = detail::drift_json(run.records);
    } else if (name == "limit-comparison") {
        const auto qe = quantum_row(1);
        QuantumExperiment qshort = qe;
        qshort.tau_end = 14.5;
        qshort.sample_dt = 0.05;
        auto qrun = run_quantum_experiment(qshort);
        emit_timeseries("timeseries_quantum.csv", qrun.records);

        ClassicalExperiment ce;
        ce.params = qshort.params;
        ce.tau_end = qshort.tau_end;
        ce.sample_dt = qshort.sample_dt;
        auto crun = run_classical_experiment(ce);
        emit_timeseries("timeseries_classical.csv", crun.records);

        GridExperiment ge;
        auto wrun = run_grid_experiment(ge, wigner::WignerSystem{ge.params});
        emit_timeseries("timeseries_wigner.csv", wrun.records);
        auto vrun = run_grid_experiment(ge, wigner::VlasovSystem{ge.params, ge.scheme});
        emit_timeseries("timeseries_vlasov.csv", vrun.records);

        report["params"] = {{"rho_bar", qshort.params.rho_bar},
                            {"delta", qshort.params.delta},
                            {"a0", {qshort.a0.real(), qshort.a0.imag()}},
                            {"tau_end", qshort.tau_end},
                            {"n_particles", ce.n_particles},
                            {"grid", {{"s2_min", ge.s2_min},
                                      {"rows", ge.rows},
                                      {"m_theta", ge.m_theta}}}};
        report["first_peak"] = {{"quantum", detail::peak_json(qrun.first_peak)},
                                {"classical", detail::peak_json(crun.first_peak)},
                                {"wigner", detail::peak_json(wrun.first_peak)},
                                {"vlasov", detail::peak_json(vrun.first_peak)}};
        report["distances"] = {
            {"classical_vs_quantum",
             detail::distances_json(compare_records(qrun.records, crun.records))},
            {"wigner_vs_quantum",
             detail::distances_json(compare_records(qrun.records, wrun.records))},
            {"vlasov_vs_wigner",
             detail::distances_json(compare_records(wrun.records, vrun.records))}};
        report["drift"] = {{"quantum", detail::drift_json(qrun.records)},
                          {"classical", detail::drift_json(crun.records)},
                          {"wigner", detail::drift_json(wrun.records)},
                          {"vlasov", detail::drift_json(vrun.records)}};
    } else {
        throw ModelError(describe("unknown preset '", name,
                                  "'; available: fig1-row1, fig1-row2, fig1-row3, "
                                  "classical-growth, two-level-pulses, limit-comparison"));
    }

    report["files"] = files;
    write_json(dir / "report.json", report);
    return report;
}

}  // namespace carlfel::harness

#endif

// Run configuration: one declarative description (JSON-serializable, versioned
// schema) that any of the six model formulations can execute.  The CLI is a
// thin flag-parsing layer over config_from_json / run_model / compare_two.
#ifndef CARLFEL_RUNCONFIG_HPP
#define CARLFEL_RUNCONFIG_HPP

#include <cstdint>
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

inline constexpr const char* config_schema_id = "carlfel-config-v1";
inline constexpr const char* run_schema_id = "carlfel-run-v1";
inline constexpr const char* compare_schema_id = "carlfel-compare-v1";

inline const std::vector<std::string>& model_names() {
    static const std::vector<std::string> names{"classical",  "quantum-c", "quantum-rho",
                                                "wigner",     "vlasov",    "two-level"};
    return names;
}

struct IntegratorConfig {
    std::string method = "rk45-adaptive";  // or "rk4-fixed"
    double dt = 1.0e-3;                    // step for rk4-fixed
    double rtol = 1.0e-8;                  // tolerances for rk45-adaptive
    double atol = 1.0e-10;
    std::size_t max_steps = 50'000'000;
    double sample_dt = 0.01;               // output record spacing in tau

    bool fixed_step() const { return method == "rk4-fixed"; }

    IntegrationOptions options() const {
        IntegrationOptions o;
        o.rtol = rtol;
        o.atol = atol;
        o.max_steps = max_steps;
        return o;
    }

    void validate() const {
        require(method == "rk4-fixed" || method == "rk45-adaptive",
                describe("IntegratorConfig: unknown method '", method,
                         "' (expected rk4-fixed or rk45-adaptive)"));
        require(dt > 0 && finite(dt), "IntegratorConfig: dt must be > 0");
        require(sample_dt > 0 && finite(sample_dt),
                "IntegratorConfig: sample_dt must be > 0");
        options().validate();
    }
};

/// Everything needed to reproduce one run of one model.
struct RunConfig {
    std::string model = "quantum-c";
    double rho_bar = 1.0;
    double delta = 1.0;
    cplx a0{1.0e-4, 0.0};       // field seed; for two-level this is A'(0)
    double tau_end = 10.0;      // for two-level this is on the primed clock
    // discretization / initial-state choices (unused fields are ignored by
    // models they do not apply to)
    std::size_t n_particles = 10'000;      // classical
    std::string placement = "equispaced";  // classical: equispaced | random
    std::uint64_t seed = 1;                // classical random placement
    int ladder_min = 0, ladder_max = 0;    // quantum/grid span; [0,0] = automatic
    std::size_t m_theta = 0;               // wigner/vlasov theta points; 0 = automatic
    std::string scheme = "centered4";      // vlasov: centered4 | spectral
    std::string variant = "consistent-reduction";  // two-level coupling choice
    int level = 0;                          // initial momentum level n0
    IntegratorConfig integrator;
    std::string out;                        // output directory ("" = resolve later)

    ScaledParams params() const { return {rho_bar, delta}; }
    bool ladder_is_auto() const { return ladder_min == 0 && ladder_max == 0; }
    quantum::LadderBounds ladder() const {
        if (ladder_is_auto()) return quantum::default_ladder(level, rho_bar);
        quantum::LadderBounds b{ladder_min, ladder_max};
        b.validate();
        return b;
    }
    /// Theta resolution for the phase-space grids: twice the ladder span keeps
    /// every coherence harmonic the grid can hold below the Nyquist mode.
    std::size_t theta_points() const {
        if (m_theta != 0) return m_theta;
        const auto lad = ladder();
        return std::max<std::size_t>(16, 2 * static_cast<std::size_t>(lad.n_max -
                                                                      lad.n_min));
    }
    bloch::Variant bloch_variant() const {
        if (variant == "consistent-reduction") return bloch::Variant::consistent_reduction;
        if (variant == "paper-literal") return bloch::Variant::paper_literal;
        throw ModelError(describe("RunConfig: unknown variant '", variant,
                                  "' (expected consistent-reduction or paper-literal)"));
    }

    void validate() const {
        bool known = false;
        for (const auto& m : model_names()) known = known || m == model;
        require(known, describe("RunConfig: unknown model '", model,
                                "' (classical | quantum-c | quantum-rho | wigner | "
                                "vlasov | two-level)"));
        params().validate();
        require(finite(a0), "RunConfig: a0 must be finite");
        require(tau_end > 0 && finite(tau_end), "RunConfig: tau_end must be > 0");
        require(n_particles >= 1, "RunConfig: n_particles must be >= 1");
        require(placement == "equispaced" || placement == "random",
                describe("RunConfig: unknown placement '", placement,
                         "' (expected equispaced or random)"));
        require(scheme == "centered4" || scheme == "spectral",
                describe("RunConfig: unknown scheme '", scheme,
                         "' (expected centered4 or spectral)"));
        (void)bloch_variant();
        if (!ladder_is_auto()) {
            const auto lad = ladder();
            require(lad.n_min <= level && level <= lad.n_max,
                    describe("RunConfig: start level ", level, " outside ladder [",
                             lad.n_min, ", ", lad.n_max, "]"));
        }
        integrator.validate();
    }
};

namespace detail {

inline void reject_unknown_keys(const json& j, std::initializer_list<const char*> known,
                                const char* where) {
    for (const auto& item : j.items()) {
        bool ok = false;
        for (const char* k : known) ok = ok || item.key() == k;
        if (!ok)
            throw ModelError(describe(where, ": unknown key '", item.key(), "'"));
    }
}

template <class T>
void fetch(const json& j, const char* key, T& into) {
    if (auto it = j.find(key); it != j.end()) into = it->get<T>();
}

inline void fetch_cplx(const json& j, const char* key, cplx& into) {
    if (auto it = j.find(key); it != j.end()) {
        const auto& v = *it;
        if (v.is_number()) {
            into = cplx{v.get<double>(), 0.0};
        } else {
            require(v.is_array() && (v.size() == 1 || v.size() == 2),
                    describe("config: '", key, "' must be a number or [re] or [re, im]"));
            into = cplx{v[0].get<double>(), v.size() == 2 ? v[1].get<double>() : 0.0};
        }
    }
}

}  // namespace detail

inline json to_json(const IntegratorConfig& c) {
    return {{"method", c.method},   {"dt", c.dt},
            {"rtol", c.rtol},       {"atol", c.atol},
            {"max_steps", c.max_steps}, {"sample_dt", c.sample_dt}};
}

inline IntegratorConfig integrator_from_json(const json& j) {
    require(j.is_object(), "config: 'integrator' must be an object");
    detail::reject_unknown_keys(
        j, {"method", "dt", "rtol", "atol", "max_steps", "sample_dt"}, "integrator");
    IntegratorConfig c;
    detail::fetch(j, "method", c.method);
    detail::fetch(j, "dt", c.dt);
    detail::fetch(j, "rtol", c.rtol);
    detail::fetch(j, "atol", c.atol);
    detail::fetch(j, "max_steps", c.max_steps);
    detail::fetch(j, "sample_dt", c.sample_dt);
    return c;
}

inline json to_json(const RunConfig& c) {
    json j;
    j["schema"] = config_schema_id;
    j["model"] = c.model;
    j["rho_bar"] = c.rho_bar;
    j["delta"] = c.delta;
    j["a0"] = {c.a0.real(), c.a0.imag()};
    j["tau_end"] = c.tau_end;
    j["n_particles"] = c.n_particles;
    j["placement"] = c.placement;
    j["seed"] = c.seed;
    j["ladder"] = {c.ladder_min, c.ladder_max};
    j["m_theta"] = c.m_theta;
    j["scheme"] = c.scheme;
    j["variant"] = c.variant;
    j["level"] = c.level;
    j["integrator"] = to_json(c.integrator);
    if (!c.out.empty()) j["out"] = c.out;
    return j;
}

inline RunConfig config_from_json(const json& j) {
    require(j.is_object(), "config: top level must be an object");
    detail::reject_unknown_keys(
        j,
        {"schema", "model", "rho_bar", "delta", "a0", "tau_end", "n_particles",
         "placement", "seed", "ladder", "m_theta", "scheme", "variant", "level",
         "integrator", "out"},
        "config");
    if (auto it = j.find("schema"); it != j.end())
        require(it->get<std::string>() == config_schema_id,
                describe("config: schema '", it->get<std::string>(),
                         "' not supported (expected ", config_schema_id, ")"));
    RunConfig c;
    detail::fetch(j, "model", c.model);
    detail::fetch(j, "rho_bar", c.rho_bar);
    detail::fetch(j, "delta", c.delta);
    detail::fetch_cplx(j, "a0", c.a0);
    detail::fetch(j, "tau_end", c.tau_end);
    detail::fetch(j, "n_particles", c.n_particles);
    detail::fetch(j, "placement", c.placement);
    detail::fetch(j, "seed", c.seed);
    if (auto it = j.find("ladder"); it != j.end()) {
        require(it->is_array() && it->size() == 2,
                "config: 'ladder' must be [n_min, n_max]");
        c.ladder_min = (*it)[0].get<int>();
        c.ladder_max = (*it)[1].get<int>();
    }
    detail::fetch(j, "m_theta", c.m_theta);
    detail::fetch(j, "scheme", c.scheme);
    detail::fetch(j, "variant", c.variant);
    detail::fetch(j, "level", c.level);
    if (auto it = j.find("integrator"); it != j.end())
        c.integrator = integrator_from_json(*it);
    detail::fetch(j, "out", c.out);
    return c;
}

struct RunOutput {
    std::vector<TimeSeriesRecord> records;
    json summary;
};

namespace detail {

template <class State, class System, class Observer>
void drive(State& s, const System& system, const RunConfig& cfg, Observer&& obs) {
    const auto& ic = cfg.integrator;
    if (ic.fixed_step()) {
        require(cfg.tau_end / ic.dt <= static_cast<double>(ic.max_steps),
                describe("rk4-fixed: tau_end / dt = ", cfg.tau_end / ic.dt,
                         " steps exceeds max_steps = ", ic.max_steps));
        integrate_rk4(s, system, cfg.tau_end, ic.dt, ic.sample_dt, obs);
    } else {
        integrate_adaptive(s, system, cfg.tau_end, ic.sample_dt, obs, ic.options());
    }
}

/// Quantum path: the adaptive route goes through quantum::evolve (edge guard
/// with automatic ladder widening and replay); the fixed-step route checks the
/// guard per sample and reports instead of widening.
template <class State>
void drive_quantum(State& s, const RunConfig& cfg, RecordSink& sink,
                   quantum::LadderBounds& final_ladder) {
    const auto params = cfg.params();
    if (cfg.integrator.fixed_step()) {
        const auto system = quantum::make_system(s, params);
        drive(s, system, cfg, [&](const State& st) {
            const double occ = quantum::edge_occupation(st);
            require(occ <= 1.0e-10,
                    describe("ladder edge occupation ", occ, " at tau = ", st.tau,
                             "; widen the ladder (rk4-fixed does not auto-widen)"));
            sink(st);
        });
        final_ladder = {s.n_min, s.n_max};
    } else {
        quantum::EvolveConfig ec;
        ec.integ = cfg.integrator.options();
        ec.sample_dt = cfg.integrator.sample_dt;
        const State end = quantum::evolve(s, params, ec, cfg.tau_end, sink);
        final_ladder = {end.n_min, end.n_max};
    }
}

}  // namespace detail

/// Execute one configuration; returns the sampled time series plus a summary
/// (versioned JSON) of what actually ran.
inline RunOutput run_model(const RunConfig& cfg) {
    cfg.validate();
    const auto params = cfg.params();
    RunOutput out;
    json detail_block;

    if (cfg.model == "classical") {
        const auto placement = cfg.placement == "equispaced"
                                   ? classical::Placement::equispaced()
                                   : classical::Placement::seeded_random(cfg.seed);
        auto s = classical::init_cold_beam(cfg.n_particles, cfg.a0, placement);
        RecordSink sink(params);
        detail::drive(s, classical::ClassicalSystem{params}, cfg, std::ref(sink));
        out.records = std::move(sink.records);
        detail_block = {{"n_particles", cfg.n_particles}, {"placement", cfg.placement}};
        if (cfg.placement == "random") detail_block["seed"] = cfg.seed;
    } else if (cfg.model == "quantum-c" || cfg.model == "quantum-rho") {
        const auto lad = cfg.ladder();
        auto psi = quantum::init_momentum_state(cfg.level, lad);
        psi.field_abar = cfg.a0;
        RecordSink sink(params);
        quantum::LadderBounds final_ladder = lad;
        if (cfg.model == "quantum-c") {
            detail::drive_quantum(psi, cfg, sink, final_ladder);
        } else {
            auto rho = quantum::density_from_wavefunction(psi);
            detail::drive_quantum(rho, cfg, sink, final_ladder);
        }
        out.records = std::move(sink.records);
        detail_block = {{"level", cfg.level},
                        {"ladder", {final_ladder.n_min, final_ladder.n_max}}};
    } else if (cfg.model == "wigner" || cfg.model == "vlasov") {
        const auto lad = cfg.ladder();
        require(lad.n_min <= cfg.level && cfg.level <= lad.n_max,
                describe("RunConfig: start level ", cfg.level, " outside ladder [",
                         lad.n_min, ", ", lad.n_max, "]"));
        const std::size_t rows =
            2 * static_cast<std::size_t>(lad.n_max - lad.n_min) + 1;
        const std::size_t m = cfg.theta_points();
        auto g = wigner::single_level_grid(cfg.level, 2 * lad.n_min, rows, m, params,
                                           cfg.a0);
        RecordSink sink(params);
        if (cfg.model == "wigner") {
            detail::drive(g, wigner::WignerSystem{params}, cfg, std::ref(sink));
        } else {
            const auto scheme = cfg.scheme == "centered4" ? wigner::VlasovScheme::centered4
                                                          : wigner::VlasovScheme::spectral;
            detail::drive(g, wigner::VlasovSystem{params, scheme}, cfg, std::ref(sink));
        }
        out.records = std::move(sink.records);
        detail_block = {{"level", cfg.level},
                        {"ladder", {lad.n_min, lad.n_max}},
                        {"rows", rows},
                        {"m_theta", m}};
        if (cfg.model == "vlasov") detail_block["scheme"] = cfg.scheme;
    } else {  // two-level
        auto b = bloch::state_from_angle(cfg.level, 0.0, cfg.a0,
                                         bloch::detuning_for_level(cfg.level, params));
        const auto variant = cfg.bloch_variant();
        detail::drive(b, bloch::BlochSystem{variant}, cfg,
                      [&](const bloch::BlochState& st) {
                          out.records.push_back(record_from(st, params, variant));
                      });
        detail_block = {{"level", cfg.level},
                        {"variant", cfg.variant},
                        {"detuning_n", bloch::detuning_for_level(cfg.level, params)}};
    }

    json s;
    s["schema"] = run_schema_id;
    s["model"] = cfg.model;
    s["clock"] = cfg.model == "two-level" ? "tau_prime" : "tau";
    s["rho_bar"] = cfg.rho_bar;
    s["delta"] = cfg.delta;
    s["a0"] = {cfg.a0.real(), cfg.a0.imag()};
    s["tau_end"] = cfg.tau_end;
    s["integrator"] = to_json(cfg.integrator);
    s["detail"] = detail_block;
    s["samples"] = out.records.size();
    if (const auto peak = first_intensity_peak(out.records)) {
        s["first_peak"] = {{"tau", peak->t}, {"abs_A2", peak->height}};
    } else {
        s["first_peak"] = nullptr;
    }
    s["drift"] = {{"norm", column_drift(out.records, &TimeSeriesRecord::norm)},
                  {"invariant_value",
                   column_drift(out.records, &TimeSeriesRecord::invariant_value)}};
    out.summary = std::move(s);
    return out;
}

/// Run two models off one shared configuration and compare their |A|^2
/// histories up to the reference (model_a) first peak.  A two-level side runs
/// on the primed clock; the partner's series is rescaled to primed units and
/// the two-level seed is taken as sqrt(rho_bar) * a0 so both describe the same
/// physical field.
inline json compare_two(RunConfig cfg, const std::string& model_a,
                        const std::string& model_b) {
    auto configured = [&](const std::string& model) {
        RunConfig c = cfg;
        c.model = model;
        if (model == "two-level") {
            c.a0 *= std::sqrt(cfg.rho_bar);
            c.tau_end *= std::sqrt(cfg.rho_bar);
        }
        return c;
    };
    const bool mixed = (model_a == "two-level") != (model_b == "two-level");

    auto series = [&](const std::string& model) {
        auto r = run_model(configured(model));
        if (mixed && model != "two-level")
            r.records = to_primed(r.records, cfg.rho_bar);
        return r;
    };
    const auto a = series(model_a);
    const auto b = series(model_b);
    const auto report = compare_records(a.records, b.records);

    json j;
    j["schema"] = compare_schema_id;
    j["reference"] = model_a;
    j["other"] = model_b;
    j["clock"] = mixed ? "tau_prime" : "tau";
    j["rho_bar"] = cfg.rho_bar;
    j["delta"] = cfg.delta;
    j["window_end"] = report.window_end;
    json dist;
    for (const auto& d : report.distances) {
        if (mixed && d.observable != "abs_A2")
            continue;  // mixed-clock columns measure different quantities
        dist[d.observable] = {{"rel_linf", d.rel_linf}, {"rel_l2", d.rel_l2}};
    }
    j["distances"] = dist;
    j["runs"] = {{"reference", a.summary}, {"other", b.summary}};
    return j;
}

}  // namespace carlfel::harness

#endif

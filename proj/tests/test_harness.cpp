// Harness layer: uniform time-series records, cross-run comparison, CSV/JSON
// persistence (byte-stable), declarative run configs, and the preset runner.
#include <catch2/catch_amalgamated.hpp>

#include <unistd.h>

#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <string>
#include <vector>

#include "carlfel/bloch.hpp"
#include "carlfel/classical.hpp"
#include "carlfel/compare.hpp"
#include "carlfel/io.hpp"
#include "carlfel/presets.hpp"
#include "carlfel/quantum.hpp"
#include "carlfel/runconfig.hpp"
#include "carlfel/timeseries.hpp"
#include "carlfel/wigner.hpp"

using namespace carlfel;
using namespace carlfel::harness;
using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

/// Unique scratch directory, removed on destruction.
struct TempDir {
    std::filesystem::path path;
    TempDir() {
        static std::atomic<int> counter{0};
        path = std::filesystem::temp_directory_path() /
               ("carlfel-test-" + std::to_string(::getpid()) + "-" +
                std::to_string(counter++));
        std::filesystem::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path, ec);
    }
};

std::string read_bytes(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

/// Synthetic series with a prescribed |A|^2 history; the remaining columns are
/// filled consistently enough to pass validation.
template <class Fn>
std::vector<TimeSeriesRecord> synthetic_series(double dt, std::size_t n, Fn&& a2_of_t) {
    std::vector<TimeSeriesRecord> out;
    for (std::size_t i = 0; i < n; ++i) {
        const double t = dt * static_cast<double>(i);
        const double a2 = a2_of_t(t);
        TimeSeriesRecord r;
        r.tau = t;
        r.re_a = std::sqrt(std::max(0.0, a2));
        r.abs_a2 = a2;
        r.photons_per_particle = 0.5 * a2;
        r.mean_pbar = -a2;
        r.norm = 1.0;
        r.invariant_value = 0.0;
        out.push_back(r);
    }
    return out;
}

bool identical_records(const TimeSeriesRecord& a, const TimeSeriesRecord& b) {
    return a.tau == b.tau && a.re_a == b.re_a && a.im_a == b.im_a &&
           a.abs_a2 == b.abs_a2 && a.photons_per_particle == b.photons_per_particle &&
           a.mean_pbar == b.mean_pbar && a.norm == b.norm &&
           a.invariant_value == b.invariant_value;
}

}  // namespace

TEST_CASE("record builders agree with the model observables", "[harness]") {
    SECTION("classical cold beam") {
        const ScaledParams params{10.0, 0.0};
        const auto s =
            classical::init_cold_beam(16, cplx{0.1, 0.0}, classical::Placement::equispaced());
        const auto r = record_from(s, params);
        CHECK(r.tau == 0.0);
        CHECK(r.re_a == 0.1);
        CHECK(r.im_a == 0.0);
        CHECK_THAT(r.abs_a2, WithinRel(0.01, 1e-15));
        CHECK_THAT(r.photons_per_particle, WithinRel(0.5 * 10.0 * 0.01, 1e-15));
        CHECK(r.mean_pbar == 0.0);  // cold beam
        CHECK(r.norm == 1.0);
        CHECK_THAT(r.invariant_value, WithinRel(0.01, 1e-15));
    }
    SECTION("quantum wavefunction and density matrix match at tau = 0") {
        const ScaledParams params{2.0, 1.0};
        auto psi = quantum::init_momentum_state(0, {-2, 2});
        psi.field_abar = cplx{0.1, 0.0};
        const auto rp = record_from(psi, params);
        const auto rd = record_from(quantum::density_from_wavefunction(psi), params);
        CHECK(rp.norm == 1.0);
        CHECK_THAT(rp.abs_a2, WithinRel(0.01, 1e-14));
        CHECK(rp.mean_pbar == 0.0);
        CHECK_THAT(rp.invariant_value, WithinRel(0.01, 1e-14));
        CHECK_THAT(rp.photons_per_particle, WithinRel(0.01, 1e-14));
        CHECK(identical_records(rp, rd));
    }
    SECTION("phase-space grid started from one level") {
        const ScaledParams params{2.0, 1.0};
        const auto g = wigner::single_level_grid(0, -8, 17, 16, params, cplx{0.1, 0.0});
        const auto r = record_from(g, params);
        CHECK_THAT(r.norm, WithinRel(1.0, 1e-14));
        CHECK_THAT(r.abs_a2, WithinRel(0.01, 1e-14));
        CHECK_THAT(r.mean_pbar, WithinAbs(0.0, 1e-15));
        CHECK_THAT(r.invariant_value, WithinRel(0.01, 1e-14));
    }
    SECTION("two-level record lives on the primed clock") {
        const ScaledParams params{0.2, 1.0};
        const auto v = bloch::default_variant;
        const auto b = bloch::state_from_angle(0, 0.5, cplx{0.2, 0.0}, 0.0);
        const auto r = record_from(b, params, v);
        CHECK(r.tau == b.tau_prime());
        CHECK(r.re_a == b.field_aprime.real());
        CHECK_THAT(r.abs_a2, WithinRel(0.04, 1e-15));
        CHECK(r.photons_per_particle == 0.5 * r.abs_a2);
        CHECK(r.norm == bloch::bloch_purity(b));
        CHECK(r.invariant_value == bloch::bloch_invariant(b, v));
        // mean momentum in pbar units: (2/rho)(n - P_{n-1}) with P_n = (1+D)/2
        const double pn_lower = 0.5 * (1.0 - b.d_pop);
        CHECK_THAT(r.mean_pbar, WithinRel(2.0 / 0.2 * (0.0 - pn_lower), 1e-14));
    }
    SECTION("non-finite records are rejected") {
        TimeSeriesRecord r;
        r.abs_a2 = std::nan("");
        CHECK_THROWS_AS(r.validate(), ModelError);
    }
}

TEST_CASE("sample spacing is validated", "[harness]") {
    auto recs = synthetic_series(0.5, 9, [](double) { return 1.0; });
    CHECK_THAT(sample_spacing(recs), WithinRel(0.5, 1e-12));

    CHECK_THROWS_WITH(sample_spacing(std::span<const TimeSeriesRecord>(recs.data(), 1)),
                      ContainsSubstring("at least two"));

    auto reversed = recs;
    std::reverse(reversed.begin(), reversed.end());
    CHECK_THROWS_WITH(sample_spacing(reversed), ContainsSubstring("advance"));

    auto jittered = recs;
    jittered[4].tau += 0.1;
    CHECK_THROWS_WITH(sample_spacing(jittered), ContainsSubstring("uniformly"));
}

TEST_CASE("first intensity peak and drift on synthetic series", "[harness]") {
    // Parabola peaking exactly at t = 5 with height 1.
    const auto recs = synthetic_series(
        0.5, 21, [](double t) { return 1.0 - (t - 5.0) * (t - 5.0) / 25.0; });
    const auto peak = first_intensity_peak(recs);
    REQUIRE(peak.has_value());
    CHECK_THAT(peak->t, WithinAbs(5.0, 1e-12));
    CHECK_THAT(peak->height, WithinAbs(1.0, 1e-12));
    CHECK(peak->index == 10);

    const auto monotone = synthetic_series(0.5, 21, [](double t) { return t; });
    CHECK_FALSE(first_intensity_peak(monotone).has_value());
    CHECK_FALSE(first_intensity_peak(std::span<const TimeSeriesRecord>(recs.data(), 2))
                    .has_value());

    CHECK(column_drift(monotone, &TimeSeriesRecord::norm) == 0.0);
    CHECK_THAT(column_drift(monotone, &TimeSeriesRecord::abs_a2), WithinRel(10.0, 1e-12));
    CHECK_THROWS_AS(column_drift(std::span<const TimeSeriesRecord>{}, &TimeSeriesRecord::norm),
                    ModelError);
}

TEST_CASE("growth-rate fit recovers a pure exponential", "[harness]") {
    const auto recs = synthetic_series(
        0.05, 201, [](double t) { return 1.0e-8 * std::exp(2.0 * t); });
    CHECK_THAT(fit_intensity_growth_rate(recs), WithinRel(2.0, 1e-10));
    // Window so narrow that too few samples qualify.
    CHECK_THROWS_WITH(fit_intensity_growth_rate(recs, 1.0e-6, 1.1e-6),
                      ContainsSubstring("samples inside"));
    CHECK_THROWS_WITH(fit_intensity_growth_rate(recs, 1.0e-2, 1.0e-6),
                      ContainsSubstring("bad window"));
}

TEST_CASE("to_primed rescales clock and field together", "[harness]") {
    const auto recs = synthetic_series(0.5, 5, [](double t) { return 0.1 * (1.0 + t); });
    const double rho = 4.0;
    const auto primed = to_primed(recs, rho);
    REQUIRE(primed.size() == recs.size());
    for (std::size_t i = 0; i < recs.size(); ++i) {
        CHECK_THAT(primed[i].tau, WithinRel(2.0 * recs[i].tau, 1e-14));
        CHECK_THAT(primed[i].re_a, WithinRel(2.0 * recs[i].re_a, 1e-14));
        CHECK_THAT(primed[i].abs_a2, WithinRel(4.0 * recs[i].abs_a2, 1e-14));
        CHECK(primed[i].photons_per_particle == 0.5 * primed[i].abs_a2);
        CHECK(primed[i].mean_pbar == recs[i].mean_pbar);
        CHECK(primed[i].norm == recs[i].norm);
    }
    CHECK_THROWS_AS(to_primed(recs, -1.0), ModelError);
}

TEST_CASE("compare_records measures relative distances to the first peak", "[harness]") {
    const auto ref = synthetic_series(
        0.5, 21, [](double t) { return 1.0 - (t - 5.0) * (t - 5.0) / 25.0; });

    SECTION("uniform 5% offset on the same grid") {
        auto other = ref;
        for (auto& r : other) {
            r.abs_a2 *= 1.05;
            r.mean_pbar *= 1.05;
        }
        const auto rep = compare_records(ref, other);
        CHECK_THAT(rep.window_end, WithinAbs(5.0, 1e-12));
        REQUIRE(rep.distances.size() == 3);
        CHECK(rep.primary().observable == "abs_A2");
        CHECK_THAT(rep.primary().rel_linf, WithinAbs(0.05, 1e-12));
        CHECK_THAT(rep.primary().rel_l2, WithinAbs(0.05, 1e-12));
        CHECK(rep.distances[2].observable == "norm");
        CHECK(rep.distances[2].rel_linf == 0.0);
    }
    SECTION("resampling from a finer grid changes little") {
        auto fine = synthetic_series(
            0.25, 41, [](double t) { return 1.05 * (1.0 - (t - 5.0) * (t - 5.0) / 25.0); });
        const auto rep = compare_records(ref, fine);
        CHECK_THAT(rep.primary().rel_linf, WithinAbs(0.05, 1e-3));
    }
    SECTION("identical runs have exactly zero distance") {
        const auto rep = compare_records(ref, ref);
        for (const auto& d : rep.distances) {
            CHECK(d.rel_linf == 0.0);
            CHECK(d.rel_l2 == 0.0);
        }
    }
    SECTION("reference without a peak is rejected") {
        const auto monotone = synthetic_series(0.5, 21, [](double t) { return 1.0 + t; });
        CHECK_THROWS_WITH(compare_records(monotone, ref), ContainsSubstring("no intensity peak"));
    }
    SECTION("disjoint sample ranges are rejected") {
        auto late = synthetic_series(0.5, 5, [](double t) { return 1.0 + t; });
        for (auto& r : late) r.tau += 8.0;  // starts after the reference peak
        CHECK_THROWS_WITH(compare_records(ref, late), ContainsSubstring("disjoint"));
    }
}

TEST_CASE("time-series CSV round-trips bitwise and writes byte-stable files", "[harness][io]") {
    TempDir tmp;
    const auto recs = synthetic_series(
        0.1, 37, [](double t) { return 1.0e-7 * std::exp(1.234 * t) + 1.0 / 3.0; });

    const auto p1 = tmp.path / "a.csv";
    const auto p2 = tmp.path / "nested" / "dir" / "b.csv";
    write_timeseries_csv(p1, recs);
    write_timeseries_csv(p2, recs);
    CHECK(read_bytes(p1) == read_bytes(p2));

    const auto back = read_timeseries_csv(p1);
    REQUIRE(back.size() == recs.size());
    for (std::size_t i = 0; i < recs.size(); ++i)
        CHECK(identical_records(back[i], recs[i]));
}

TEST_CASE("time-series CSV reader rejects malformed files", "[harness][io]") {
    TempDir tmp;
    auto write_file = [&](const std::string& name, const std::string& content) {
        std::ofstream out(tmp.path / name, std::ios::binary);
        out << content;
        out.close();
        return tmp.path / name;
    };
    const std::string header(timeseries_header);

    CHECK_THROWS_WITH(read_timeseries_csv(tmp.path / "missing.csv"),
                      ContainsSubstring("cannot open"));
    CHECK_THROWS_WITH(read_timeseries_csv(write_file("empty.csv", "")),
                      ContainsSubstring("empty file"));
    CHECK_THROWS_WITH(read_timeseries_csv(write_file("hdr.csv", "tau,re_A\n")),
                      ContainsSubstring("unexpected header"));
    CHECK_THROWS_WITH(read_timeseries_csv(write_file("short.csv", header + "\n1,2,3\n")),
                      ContainsSubstring("short row"));
    CHECK_THROWS_WITH(
        read_timeseries_csv(write_file("bad.csv", header + "\n1,2,3,4,x,6,7,8\n")),
        ContainsSubstring("bad number"));
    CHECK_THROWS_WITH(
        read_timeseries_csv(write_file("long.csv", header + "\n1,2,3,4,5,6,7,8,9\n")),
        ContainsSubstring("too many columns"));
}

TEST_CASE("JSON files round-trip and report parse errors", "[harness][io]") {
    TempDir tmp;
    json j;
    j["schema"] = "test-v1";
    j["values"] = {1.5, 2.5};
    const auto p = tmp.path / "r.json";
    write_json(p, j);
    CHECK(read_json(p) == j);

    std::ofstream bad(tmp.path / "bad.json", std::ios::binary);
    bad << "{ not json";
    bad.close();
    CHECK_THROWS_WITH(read_json(tmp.path / "bad.json"), ContainsSubstring("invalid JSON"));
}

TEST_CASE("run configs round-trip through JSON", "[harness][config]") {
    RunConfig c;
    c.model = "vlasov";
    c.rho_bar = 7.5;
    c.delta = -0.25;
    c.a0 = cplx{2.0e-4, -1.0e-5};
    c.tau_end = 12.5;
    c.n_particles = 321;
    c.placement = "random";
    c.seed = 42;
    c.ladder_min = -20;
    c.ladder_max = 4;
    c.m_theta = 96;
    c.scheme = "spectral";
    c.variant = "paper-literal";
    c.level = -1;
    c.integrator.method = "rk4-fixed";
    c.integrator.dt = 5.0e-4;
    c.integrator.rtol = 1.0e-9;
    c.integrator.atol = 1.0e-11;
    c.integrator.max_steps = 1234;
    c.integrator.sample_dt = 0.125;
    c.out = "some/dir";

    const auto back = config_from_json(to_json(c));
    CHECK(back.model == c.model);
    CHECK(back.rho_bar == c.rho_bar);
    CHECK(back.delta == c.delta);
    CHECK(back.a0 == c.a0);
    CHECK(back.tau_end == c.tau_end);
    CHECK(back.n_particles == c.n_particles);
    CHECK(back.placement == c.placement);
    CHECK(back.seed == c.seed);
    CHECK(back.ladder_min == c.ladder_min);
    CHECK(back.ladder_max == c.ladder_max);
    CHECK(back.m_theta == c.m_theta);
    CHECK(back.scheme == c.scheme);
    CHECK(back.variant == c.variant);
    CHECK(back.level == c.level);
    CHECK(back.integrator.method == c.integrator.method);
    CHECK(back.integrator.dt == c.integrator.dt);
    CHECK(back.integrator.max_steps == c.integrator.max_steps);
    CHECK(back.integrator.sample_dt == c.integrator.sample_dt);
    CHECK(back.out == c.out);
}

TEST_CASE("config parsing is strict", "[harness][config]") {
    SECTION("unknown top-level key") {
        CHECK_THROWS_WITH(config_from_json(json{{"rho", 1.0}}),
                          ContainsSubstring("unknown key 'rho'"));
    }
    SECTION("unknown integrator key") {
        CHECK_THROWS_WITH(
            config_from_json(json{{"integrator", {{"step", 0.1}}}}),
            ContainsSubstring("unknown key 'step'"));
    }
    SECTION("unsupported schema id") {
        CHECK_THROWS_WITH(config_from_json(json{{"schema", "carlfel-config-v99"}}),
                          ContainsSubstring("not supported"));
    }
    SECTION("a0 accepts number, [re], and [re, im]") {
        CHECK(config_from_json(json{{"a0", 5.0e-5}}).a0 == cplx{5.0e-5, 0.0});
        CHECK(config_from_json(json{{"a0", {1.0e-4}}}).a0 == cplx{1.0e-4, 0.0});
        CHECK(config_from_json(json{{"a0", {1.0, 2.0}}}).a0 == cplx{1.0, 2.0});
        CHECK_THROWS_WITH(config_from_json(json{{"a0", "big"}}),
                          ContainsSubstring("must be a number or"));
    }
    SECTION("ladder must be a pair") {
        CHECK_THROWS_WITH(config_from_json(json{{"ladder", {1}}}),
                          ContainsSubstring("[n_min, n_max]"));
    }
    SECTION("top level must be an object") {
        CHECK_THROWS_AS(config_from_json(json::array()), ModelError);
    }
}

TEST_CASE("config validation rejects bad settings", "[harness][config]") {
    auto valid = [] {
        RunConfig c;
        c.model = "classical";
        c.tau_end = 1.0;
        return c;
    };
    CHECK_NOTHROW(valid().validate());

    auto c = valid();
    c.model = "hydro";
    CHECK_THROWS_WITH(c.validate(), ContainsSubstring("unknown model"));

    c = valid();
    c.tau_end = 0.0;
    CHECK_THROWS_WITH(c.validate(), ContainsSubstring("tau_end"));

    c = valid();
    c.placement = "sorted";
    CHECK_THROWS_WITH(c.validate(), ContainsSubstring("unknown placement"));

    c = valid();
    c.scheme = "upwind";
    CHECK_THROWS_WITH(c.validate(), ContainsSubstring("unknown scheme"));

    c = valid();
    c.variant = "other";
    CHECK_THROWS_WITH(c.validate(), ContainsSubstring("unknown variant"));

    c = valid();
    c.ladder_min = -3;
    c.ladder_max = 2;
    c.level = 5;
    CHECK_THROWS_WITH(c.validate(), ContainsSubstring("outside ladder"));

    c = valid();
    c.integrator.method = "euler";
    CHECK_THROWS_WITH(c.validate(), ContainsSubstring("unknown method"));

    c = valid();
    c.integrator.dt = -0.1;
    CHECK_THROWS_WITH(c.validate(), ContainsSubstring("dt must be"));

    c = valid();
    c.integrator.sample_dt = 0.0;
    CHECK_THROWS_WITH(c.validate(), ContainsSubstring("sample_dt"));

    c = valid();
    c.integrator.max_steps = 0;
    CHECK_THROWS_WITH(c.validate(), ContainsSubstring("max_steps"));
}

TEST_CASE("theta resolution follows the ladder span", "[harness][config]") {
    RunConfig c;
    c.ladder_min = -20;
    c.ladder_max = 4;
    CHECK(c.theta_points() == 48);  // twice the span
    c.ladder_min = -3;
    c.ladder_max = 2;
    CHECK(c.theta_points() == 16);  // floor for small ladders
    c.m_theta = 100;
    CHECK(c.theta_points() == 100);  // explicit override
}

TEST_CASE("run_model executes each formulation and summarizes", "[harness][run]") {
    SECTION("classical with fixed-step integration") {
        RunConfig c;
        c.model = "classical";
        c.rho_bar = 5.0;
        c.delta = 0.0;
        c.n_particles = 8;
        c.tau_end = 1.0;
        c.integrator.method = "rk4-fixed";
        c.integrator.dt = 0.01;
        c.integrator.sample_dt = 0.1;
        const auto out = run_model(c);
        REQUIRE(out.records.size() == 11);
        CHECK(out.records.front().tau == 0.0);
        CHECK_THAT(out.records.back().tau, WithinRel(1.0, 1e-12));
        for (const auto& r : out.records) CHECK(r.norm == 1.0);
        CHECK(out.summary.at("schema") == run_schema_id);
        CHECK(out.summary.at("model") == "classical");
        CHECK(out.summary.at("clock") == "tau");
        CHECK(out.summary.at("samples") == 11);
        CHECK(out.summary.at("first_peak").is_null());  // still in linear growth
        CHECK(out.summary.at("drift").at("norm") == 0.0);
    }
    SECTION("fixed-step run refuses a step budget it cannot meet") {
        RunConfig c;
        c.model = "classical";
        c.n_particles = 4;
        c.tau_end = 1.0;
        c.integrator.method = "rk4-fixed";
        c.integrator.dt = 1.0e-8;
        c.integrator.max_steps = 1000;
        CHECK_THROWS_WITH(run_model(c), ContainsSubstring("exceeds max_steps"));
    }
    SECTION("quantum runs are deterministic") {
        RunConfig c;
        c.model = "quantum-c";
        c.rho_bar = 1.0;
        c.delta = 1.0;
        c.ladder_min = -6;
        c.ladder_max = 4;
        c.tau_end = 2.0;
        c.integrator.sample_dt = 0.1;
        const auto a = run_model(c);
        const auto b = run_model(c);
        REQUIRE(a.records.size() == b.records.size());
        for (std::size_t i = 0; i < a.records.size(); ++i)
            CHECK(identical_records(a.records[i], b.records[i]));
        CHECK(a.summary.at("detail").at("ladder") == json({-6, 4}));
    }
    SECTION("density-matrix model reproduces the wavefunction observables") {
        RunConfig c;
        c.model = "quantum-c";
        c.rho_bar = 1.0;
        c.ladder_min = -6;
        c.ladder_max = 4;
        c.tau_end = 2.0;
        c.integrator.sample_dt = 0.5;
        const auto psi = run_model(c);
        c.model = "quantum-rho";
        const auto rho = run_model(c);
        REQUIRE(psi.records.size() == rho.records.size());
        for (std::size_t i = 0; i < psi.records.size(); ++i) {
            CHECK_THAT(rho.records[i].abs_a2,
                       WithinAbs(psi.records[i].abs_a2, 1e-10));
            CHECK_THAT(rho.records[i].norm, WithinAbs(1.0, 1e-10));
        }
    }
    SECTION("quantum fixed-step rejects a ladder that fills to the edge") {
        RunConfig c;
        c.model = "quantum-c";
        c.rho_bar = 1.0;
        c.ladder_min = -2;
        c.ladder_max = 1;
        c.tau_end = 10.0;
        c.integrator.method = "rk4-fixed";
        c.integrator.dt = 1.0e-3;
        c.integrator.sample_dt = 0.5;
        CHECK_THROWS_WITH(run_model(c), ContainsSubstring("does not auto-widen"));
    }
    SECTION("grid models run and keep their mass bookkeeping") {
        RunConfig c;
        c.model = "wigner";
        c.rho_bar = 2.0;
        c.ladder_min = -6;
        c.ladder_max = 4;
        c.tau_end = 1.0;
        c.integrator.rtol = 1.0e-6;
        c.integrator.sample_dt = 0.5;
        const auto w = run_model(c);
        CHECK(w.records.size() == 3);
        CHECK(w.summary.at("detail").at("rows") == 21);
        CHECK(w.summary.at("detail").at("m_theta") == 20);
        CHECK_THAT(w.records.back().norm, WithinAbs(1.0, 1e-6));

        c.model = "vlasov";
        const auto v = run_model(c);
        CHECK(v.summary.at("detail").at("scheme") == "centered4");
        CHECK_THAT(v.records.back().norm, WithinAbs(1.0, 1e-3));
    }
    SECTION("two-level runs on the primed clock") {
        RunConfig c;
        c.model = "two-level";
        c.rho_bar = 0.2;
        c.a0 = cplx{1.0e-2, 0.0};
        c.tau_end = 30.0;
        c.integrator.sample_dt = 0.05;
        const auto out = run_model(c);
        CHECK(out.summary.at("clock") == "tau_prime");
        CHECK(out.summary.at("detail").at("detuning_n") == 0.0);
        REQUIRE_FALSE(out.summary.at("first_peak").is_null());
        // consistent reduction: pulse peaks reach 4 kappa = 2
        CHECK_THAT(out.summary.at("first_peak").at("abs_A2").get<double>(),
                   WithinRel(2.0, 1e-4));
        CHECK_THAT(out.records.back().norm, WithinAbs(1.0, 1e-7));
    }
}

TEST_CASE("compare_two windows on the reference and handles mixed clocks",
          "[harness][run]") {
    SECTION("a model against itself is exactly zero") {
        RunConfig c;
        c.model = "classical";
        c.rho_bar = 1.0;
        c.delta = 0.0;
        c.n_particles = 64;
        c.tau_end = 15.0;
        c.integrator.sample_dt = 0.05;
        const auto j = compare_two(c, "classical", "classical");
        CHECK(j.at("schema") == compare_schema_id);
        CHECK(j.at("clock") == "tau");
        // The two runs are bitwise identical, but resampling at times that are
        // not binary-representable leaves rounding at the 1e-16 level.
        CHECK(j.at("distances").at("abs_A2").at("rel_linf").get<double>() < 1e-12);
        CHECK(j.at("distances").contains("mean_pbar"));
        CHECK(j.at("runs").at("reference").at("model") == "classical");
    }
    SECTION("two-level against the quantum ladder in primed units") {
        RunConfig c;
        c.rho_bar = 0.2;
        c.delta = 1.0;
        c.a0 = cplx{1.0e-4, 0.0};
        c.tau_end = 40.0;  // unprimed; the two-level side is rescaled internally
        c.ladder_min = -9;
        c.ladder_max = 8;
        // Default tolerances leave enough integration noise at the stiff outer
        // levels to graze the 1e-10 edge guard on a run this long; the preset
        // tolerances keep the edge clean.
        c.integrator.rtol = 1.0e-10;
        c.integrator.atol = 1.0e-12;
        c.integrator.sample_dt = 0.05;
        const auto j = compare_two(c, "two-level", "quantum-c");
        CHECK(j.at("clock") == "tau_prime");
        CHECK(j.at("distances").contains("abs_A2"));
        // mixed-clock columns other than the intensity are not comparable
        CHECK_FALSE(j.at("distances").contains("mean_pbar"));
        CHECK_FALSE(j.at("distances").contains("norm"));
        CHECK(j.at("runs").at("reference").at("clock") == "tau_prime");
        CHECK(j.at("runs").at("other").at("clock") == "tau");
        // rho_bar = 0.2 sits in the two-level regime: a few percent at worst
        CHECK(j.at("distances").at("abs_A2").at("rel_linf").get<double>() < 0.05);
    }
}

TEST_CASE("preset registry covers the documented names", "[harness][preset]") {
    CHECK(preset_names().size() == 6);
    CHECK(model_names().size() == 6);
    TempDir tmp;
    CHECK_THROWS_WITH(run_preset("nope", tmp.path), ContainsSubstring("unknown preset"));
}

TEST_CASE("fig1-row2 preset writes its artifact set", "[harness][preset]") {
    TempDir tmp;
    const auto report = run_preset("fig1-row2", tmp.path);
    CHECK(report.at("schema") == "carlfel-report-v1");
    CHECK(report.at("preset") == "fig1-row2");
    CHECK(report.at("params").at("rho_bar") == 1.0);

    const auto dir = tmp.path / "fig1-row2";
    for (const auto& f : {"timeseries.csv", "populations_first_peak.csv",
                          "psi_density_first_peak.csv", "wigner_first_peak.csv",
                          "report.json"})
        CHECK(std::filesystem::exists(dir / f));

    // The written report matches the returned one.
    CHECK(read_json(dir / "report.json") == report);

    // Occupation concentrates on the two resonant levels near the peak but
    // misses the 0.9 mark (the recorded gap of this regime).
    const double p2 = report.at("at_first_peak").at("P0_plus_Pminus1").get<double>();
    CHECK(p2 > 0.5);
    CHECK(p2 < 0.9);

    const auto series = read_timeseries_csv(dir / "timeseries.csv");
    CHECK(series.size() == 2801);
    CHECK(column_drift(series, &TimeSeriesRecord::norm) < 1e-8);
    CHECK(column_drift(series, &TimeSeriesRecord::invariant_value) < 1e-8);
}

// Fast invariant suite behind the `validate` CLI subcommand: one cheap run
// per formulation, checking the conservation laws and the cross-model
// identities that hold at any parameters.  Deep quantitative checks live in
// the acceptance binary; this is the "is the build sane" smoke battery.
#ifndef CARLFEL_VALIDATE_HPP
#define CARLFEL_VALIDATE_HPP

#include <ostream>
#include <string>
#include <vector>

#include "carlfel/runconfig.hpp"

namespace carlfel::harness {

struct CheckResult {
    std::string name;
    bool pass;
    std::string detail;
};

namespace detail {

inline double max_abs_a2_gap(std::span<const TimeSeriesRecord> a,
                             std::span<const TimeSeriesRecord> b) {
    require(a.size() == b.size(), "validation: sample grids differ");
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        accumulate_max_abs(worst, a[i].abs_a2 - b[i].abs_a2);
    return worst;
}

inline RunConfig tight(RunConfig c) {
    c.integrator.rtol = 1.0e-10;
    c.integrator.atol = 1.0e-12;
    return c;
}

}  // namespace detail

inline std::vector<CheckResult> run_validation_suite() {
    std::vector<CheckResult> results;
    auto check = [&](const std::string& name, bool pass, std::string detail) {
        results.push_back({name, pass, std::move(detail)});
    };

    {
        RunConfig c = detail::tight({});
        c.model = "classical";
        c.rho_bar = 10.0;
        c.delta = 1.0;
        c.n_particles = 256;
        c.tau_end = 5.0;
        c.integrator.sample_dt = 0.05;
        const auto run = run_model(c);
        const double drift =
            column_drift(run.records, &TimeSeriesRecord::invariant_value);
        check("classical |A|^2 + <pbar> conserved", drift < 1.0e-8,
              describe("drift = ", drift));
    }
    {
        RunConfig c = detail::tight({});
        c.model = "quantum-c";
        c.rho_bar = 1.0;
        c.tau_end = 10.0;
        const auto run = run_model(c);
        const double norm_drift = column_drift(run.records, &TimeSeriesRecord::norm);
        const double inv_drift =
            column_drift(run.records, &TimeSeriesRecord::invariant_value);
        check("quantum norm conserved", norm_drift < 1.0e-8,
              describe("drift = ", norm_drift));
        check("quantum |Abar|^2 + (2/rho)<n> conserved", inv_drift < 1.0e-8,
              describe("drift = ", inv_drift));
    }
    {
        RunConfig c = detail::tight({});
        c.rho_bar = 1.0;
        c.tau_end = 5.0;
        c.model = "quantum-c";
        const auto psi = run_model(c);
        c.model = "quantum-rho";
        const auto rho = run_model(c);
        const double gap = detail::max_abs_a2_gap(psi.records, rho.records);
        check("density matrix reproduces wavefunction |A|^2", gap < 1.0e-8,
              describe("max gap = ", gap));
    }
    {
        RunConfig c = detail::tight({});
        c.rho_bar = 1.0;
        c.tau_end = 5.0;
        c.ladder_min = -8;
        c.ladder_max = 6;
        c.model = "quantum-c";
        const auto psi = run_model(c);
        c.model = "wigner";
        const auto wig = run_model(c);
        const double gap = detail::max_abs_a2_gap(psi.records, wig.records);
        const double mass_drift = column_drift(wig.records, &TimeSeriesRecord::norm);
        check("Wigner grid reproduces ladder |A|^2", gap < 1.0e-6,
              describe("max gap = ", gap));
        check("Wigner mass conserved", mass_drift < 1.0e-8,
              describe("drift = ", mass_drift));
    }
    {
        RunConfig c = detail::tight({});
        c.model = "vlasov";
        c.rho_bar = 4.0;
        c.tau_end = 3.0;
        c.ladder_min = -10;
        c.ladder_max = 6;
        const auto run = run_model(c);
        const double mass_drift = column_drift(run.records, &TimeSeriesRecord::norm);
        check("Vlasov transport keeps mass to truncation accuracy",
              mass_drift < 1.0e-3, describe("drift = ", mass_drift));
    }
    for (const char* variant : {"consistent-reduction", "paper-literal"}) {
        RunConfig c = detail::tight({});
        c.model = "two-level";
        c.rho_bar = 0.2;
        c.variant = variant;
        c.a0 = cplx{0.01, 0.0};
        c.tau_end = 30.0;
        const auto run = run_model(c);
        const double purity_drift = column_drift(run.records, &TimeSeriesRecord::norm);
        const double inv_drift =
            column_drift(run.records, &TimeSeriesRecord::invariant_value);
        check(describe("two-level (", variant, ") purity conserved"),
              purity_drift < 1.0e-8, describe("drift = ", purity_drift));
        check(describe("two-level (", variant, ") field-exchange invariant"),
              inv_drift < 1.0e-8, describe("drift = ", inv_drift));
    }
    {
        RunConfig c = detail::tight({});
        c.model = "classical";
        c.rho_bar = 10.0;
        c.n_particles = 64;
        c.tau_end = 3.0;
        const auto adaptive = run_model(c);
        c.integrator.method = "rk4-fixed";
        c.integrator.dt = 1.0e-3;
        const auto fixed = run_model(c);
        const double gap = detail::max_abs_a2_gap(adaptive.records, fixed.records);
        check("fixed-step RK4 agrees with the adaptive integrator", gap < 1.0e-8,
              describe("max gap = ", gap));
    }
    return results;
}

/// Print one PASS/FAIL line per check; returns the number of failures.
inline int report_validation(std::ostream& os) {
    int failures = 0;
    for (const auto& r : run_validation_suite()) {
        os << (r.pass ? "PASS  " : "FAIL  ") << r.name << "  (" << r.detail << ")\n";
        if (!r.pass) ++failures;
    }
    return failures;
}

}  // namespace carlfel::harness

#endif

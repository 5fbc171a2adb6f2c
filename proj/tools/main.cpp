// carlfel — collective recoil lasing models (classical N-body, momentum-ladder
// quantum, Wigner/Vlasov phase space, two-level reduction) behind one CLI.
//
// Subcommands:
//   run       integrate one model, write timeseries.csv + run.json
//   preset    execute a named, fully pinned experiment
//   compare   run two models on shared parameters, report |A|^2 distances
//   scaling   convert physical beam/cloud parameters to (rho_bar, delta)
//   validate  fast cross-model invariant suite
//
// Exit codes: 0 success, 2 validation/configuration failure, 3 numerical abort.
#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include "carlfel/constants.hpp"
#include "carlfel/io.hpp"
#include "carlfel/presets.hpp"
#include "carlfel/runconfig.hpp"
#include "carlfel/scaling.hpp"
#include "carlfel/validate.hpp"

namespace {

using carlfel::cplx;
using carlfel::ModelError;
using carlfel::harness::json;
using carlfel::harness::RunConfig;

/// Output directory precedence: --out flag > config file > CARLFEL_OUT_DIR
/// environment variable > ./carlfel-out.
std::string resolve_out_dir(const std::string& flag_value,
                            const std::string& config_value) {
    if (!flag_value.empty()) return flag_value;
    if (!config_value.empty()) return config_value;
    if (const char* env = std::getenv("CARLFEL_OUT_DIR"); env != nullptr && *env != '\0')
        return env;
    return "carlfel-out";
}

cplx parse_a0(const std::vector<double>& values) {
    return {values.at(0), values.size() > 1 ? values.at(1) : 0.0};
}

struct RunFlags {
    std::string config_path;
    std::string model;
    double rho = 0, delta = 0, tau_end = 0, dt = 0, rtol = 0, atol = 0, sample_dt = 0;
    std::vector<double> a0;
    std::size_t n_particles = 0, m_theta = 0, max_steps = 0;
    std::uint64_t seed = 0;
    std::string placement, scheme, variant, out;
    int ladder_min = 0, ladder_max = 0, level = 0;
};

/// Register the shared model/parameter flags on a subcommand.  Flags override
/// config-file fields only when actually given on the command line.
void add_run_flags(CLI::App* cmd, RunFlags& f, bool with_model) {
    cmd->add_option("--config", f.config_path,
                    "JSON run configuration (schema carlfel-config-v1); flags "
                    "override fields");
    if (with_model)
        cmd->add_option("--model", f.model,
                        "classical | quantum-c | quantum-rho | wigner | vlasov | "
                        "two-level");
    cmd->add_option("--rho", f.rho, "collective parameter rho_bar (> 0)");
    cmd->add_option("--delta", f.delta, "scaled detuning");
    cmd->add_option("--a0", f.a0, "field seed: RE or RE IM (two-level: primed seed)")
        ->expected(1, 2);
    cmd->add_option("--tau-end", f.tau_end, "run length in scaled time");
    cmd->add_option("--dt", f.dt, "fixed step; selects the rk4-fixed integrator");
    cmd->add_option("--rtol", f.rtol, "relative tolerance (rk45-adaptive)");
    cmd->add_option("--atol", f.atol, "absolute tolerance (rk45-adaptive)");
    cmd->add_option("--sample-dt", f.sample_dt, "record spacing in scaled time");
    cmd->add_option("--max-steps", f.max_steps, "attempted-step budget");
    cmd->add_option("--n-particles", f.n_particles, "classical: ensemble size");
    cmd->add_option("--placement", f.placement, "classical: equispaced | random");
    cmd->add_option("--seed", f.seed, "classical: RNG seed for random placement");
    cmd->add_option("--ladder-min", f.ladder_min, "lowest momentum level");
    cmd->add_option("--ladder-max", f.ladder_max, "highest momentum level");
    cmd->add_option("--m-theta", f.m_theta, "wigner/vlasov: theta grid points");
    cmd->add_option("--scheme", f.scheme, "vlasov: centered4 | spectral");
    cmd->add_option("--variant", f.variant,
                    "two-level: consistent-reduction | paper-literal");
    cmd->add_option("--level", f.level, "initial momentum level n0");
    cmd->add_option("--out", f.out, "output directory");
}

RunConfig build_config(const CLI::App* cmd, const RunFlags& f) {
    RunConfig cfg;
    if (!f.config_path.empty())
        cfg = carlfel::harness::config_from_json(
            carlfel::harness::read_json(f.config_path));
    auto given = [&](const char* name) {
        const CLI::Option* o = cmd->get_option_no_throw(name);
        return o != nullptr && o->count() > 0;
    };
    if (given("--model")) cfg.model = f.model;
    if (given("--rho")) cfg.rho_bar = f.rho;
    if (given("--delta")) cfg.delta = f.delta;
    if (given("--a0")) cfg.a0 = parse_a0(f.a0);
    if (given("--tau-end")) cfg.tau_end = f.tau_end;
    if (given("--dt")) {
        cfg.integrator.method = "rk4-fixed";
        cfg.integrator.dt = f.dt;
    }
    if (given("--rtol")) cfg.integrator.rtol = f.rtol;
    if (given("--atol")) cfg.integrator.atol = f.atol;
    if (given("--sample-dt")) cfg.integrator.sample_dt = f.sample_dt;
    if (given("--max-steps")) cfg.integrator.max_steps = f.max_steps;
    if (given("--n-particles")) cfg.n_particles = f.n_particles;
    if (given("--placement")) cfg.placement = f.placement;
    if (given("--seed")) cfg.seed = f.seed;
    if (given("--ladder-min")) cfg.ladder_min = f.ladder_min;
    if (given("--ladder-max")) cfg.ladder_max = f.ladder_max;
    if (given("--m-theta")) cfg.m_theta = f.m_theta;
    if (given("--scheme")) cfg.scheme = f.scheme;
    if (given("--variant")) cfg.variant = f.variant;
    if (given("--level")) cfg.level = f.level;
    if (given("--out")) cfg.out = f.out;
    return cfg;
}

int cmd_run(const CLI::App* cmd, const RunFlags& flags) {
    RunConfig cfg = build_config(cmd, flags);
    const std::string dir = resolve_out_dir(flags.out, cfg.out);
    cfg.out = dir;
    auto result = carlfel::harness::run_model(cfg);

    const std::filesystem::path base(dir);
    carlfel::harness::write_timeseries_csv(base / "timeseries.csv", result.records);
    json run_doc = result.summary;
    run_doc["config"] = carlfel::harness::to_json(cfg);
    run_doc["files"] = {"timeseries.csv"};
    carlfel::harness::write_json(base / "run.json", run_doc);

    std::cout << result.summary.dump(2) << '\n';
    std::cerr << "wrote " << (base / "timeseries.csv").string() << " and "
              << (base / "run.json").string() << '\n';
    return 0;
}

int cmd_preset(const std::string& name, bool list, const std::string& out_flag) {
    if (list) {
        for (const auto& p : carlfel::harness::preset_names()) std::cout << p << '\n';
        return 0;
    }
    if (name.empty())
        throw ModelError("preset: give a preset name or --list");
    const std::string dir = resolve_out_dir(out_flag, "");
    const json report = carlfel::harness::run_preset(name, dir);
    std::cout << report.dump(2) << '\n';
    std::cerr << "wrote " << (std::filesystem::path(dir) / name / "report.json").string()
              << '\n';
    return 0;
}

int cmd_compare(const CLI::App* cmd, const RunFlags& flags, const std::string& model_a,
                const std::string& model_b) {
    RunConfig cfg = build_config(cmd, flags);
    const json report = carlfel::harness::compare_two(cfg, model_a, model_b);
    std::cout << report.dump(2) << '\n';
    if (cmd->count("--out") > 0) {
        const std::filesystem::path base(resolve_out_dir(flags.out, cfg.out));
        carlfel::harness::write_json(base / "compare.json", report);
        std::cerr << "wrote " << (base / "compare.json").string() << '\n';
    }
    return 0;
}

struct FelFlags {
    double lambda_w = 0, a_w = 0, gamma0 = 0, density = 0, lambda_r = 0, mass = 0;
};

struct CarlFlags {
    double rabi = 0, pump_detuning = 0, gamma_decay = 0, dipole = 0, omega = 0,
           omega_p = 0, density = 0, mass = 0;
};

int cmd_scaling_fel(const CLI::App* cmd, const FelFlags& f) {
    carlfel::PhysicalConstants consts = carlfel::PhysicalConstants::si_electron();
    if (cmd->count("--mass") > 0) consts.m = f.mass;
    const carlfel::FelPhysicalParams p{f.lambda_w, f.a_w, f.gamma0, f.density,
                                       f.lambda_r};
    const auto s = carlfel::fel_scaling(p, consts);
    json j;
    j["schema"] = "carlfel-scaling-v1";
    j["mode"] = "fel";
    j["gamma_r"] = s.gamma_r;
    j["q"] = s.q;
    j["rho_f"] = s.rho_f;
    j["rho_bar"] = s.scaled.rho_bar;
    j["delta"] = s.scaled.delta;
    std::cout << j.dump(2) << '\n';
    return 0;
}

int cmd_scaling_carl(const CLI::App* cmd, const CarlFlags& f) {
    carlfel::PhysicalConstants consts = carlfel::PhysicalConstants::si_rb87();
    if (cmd->count("--mass") > 0) consts.m = f.mass;
    const carlfel::CarlPhysicalParams p{f.rabi,  f.pump_detuning, f.gamma_decay,
                                        f.dipole, f.omega,        f.omega_p,
                                        f.density};
    const auto s = carlfel::carl_scaling(p, consts);
    json j;
    j["schema"] = "carlfel-scaling-v1";
    j["mode"] = "carl";
    j["omega_r"] = s.omega_r;
    j["s0"] = s.s0;
    j["rho_bar"] = s.scaled.rho_bar;
    j["delta"] = s.scaled.delta;
    std::cout << j.dump(2) << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"collective recoil lasing models: classical, quantum ladder, "
                 "phase space, and two-level forms with one shared field"};
    app.require_subcommand(1);

    RunFlags run_flags;
    auto* run = app.add_subcommand("run", "integrate one model and write its series");
    add_run_flags(run, run_flags, /*with_model=*/true);

    std::string preset_name, preset_out;
    bool preset_list = false;
    auto* preset = app.add_subcommand("preset", "execute a named pinned experiment");
    preset->add_option("name", preset_name, "preset name (see --list)");
    preset->add_flag("--list", preset_list, "list available presets");
    preset->add_option("--out", preset_out, "output directory");

    RunFlags cmp_flags;
    std::string model_a, model_b;
    auto* compare = app.add_subcommand(
        "compare", "run two models on shared parameters and report distances");
    compare->add_option("--model-a", model_a, "reference model")->required();
    compare->add_option("--model-b", model_b, "model measured against it")->required();
    add_run_flags(compare, cmp_flags, /*with_model=*/false);

    auto* scaling = app.add_subcommand(
        "scaling", "physical parameters -> (rho_bar, delta) conversion");
    scaling->require_subcommand(1);
    FelFlags fel;
    auto* sfel = scaling->add_subcommand("fel", "high-gain free-electron laser beam");
    sfel->add_option("--lambda-w", fel.lambda_w, "wiggler period, m")->required();
    sfel->add_option("--a-w", fel.a_w, "wiggler parameter")->required();
    sfel->add_option("--gamma0", fel.gamma0, "beam energy / rest mass")->required();
    sfel->add_option("--density", fel.density, "particle density, m^-3")->required();
    sfel->add_option("--lambda-r", fel.lambda_r, "radiation wavelength, m")->required();
    sfel->add_option("--mass", fel.mass, "particle mass override, kg");
    CarlFlags carl;
    auto* scarl = scaling->add_subcommand("carl", "driven cold-atom cloud");
    scarl->add_option("--rabi", carl.rabi, "pump Rabi frequency, 1/s")->required();
    scarl->add_option("--pump-detuning", carl.pump_detuning, "pump-atom detuning, 1/s")
        ->required();
    scarl->add_option("--gamma-decay", carl.gamma_decay, "natural linewidth, 1/s")
        ->required();
    scarl->add_option("--dipole", carl.dipole, "dipole matrix element, C m")->required();
    scarl->add_option("--omega", carl.omega, "backscattered frequency, 1/s")->required();
    scarl->add_option("--omega-p", carl.omega_p, "pump frequency, 1/s")->required();
    scarl->add_option("--density", carl.density, "atom density, m^-3")->required();
    scarl->add_option("--mass", carl.mass, "atom mass override, kg");

    auto* validate =
        app.add_subcommand("validate", "run the fast cross-model invariant suite");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (run->parsed()) return cmd_run(run, run_flags);
        if (preset->parsed()) return cmd_preset(preset_name, preset_list, preset_out);
        if (compare->parsed()) return cmd_compare(compare, cmp_flags, model_a, model_b);
        if (scaling->parsed()) {
            if (sfel->parsed()) return cmd_scaling_fel(sfel, fel);
            return cmd_scaling_carl(scarl, carl);
        }
        if (validate->parsed()) {
            const int failures = carlfel::harness::report_validation(std::cout);
            if (failures > 0) {
                std::cerr << failures << " validation check(s) failed\n";
                return 2;
            }
            return 0;
        }
    } catch (const carlfel::NumericalAbort& e) {
        std::cerr << "numerical abort: " << e.what() << '\n';
        return 3;
    } catch (const ModelError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const json::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "unexpected error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}

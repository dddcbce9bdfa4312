#include <cstdio>
#include <exception>
#include <string>

#include <CLI11.hpp>

#include "harqlink/commands.hpp"
#include "harqlink/version.hpp"

namespace {

struct Cli {
    std::string config_path;
    std::string out_path;
    std::string variant = "renewal";
    std::string mode;
    uint64_t seed = 0;
    uint64_t frames = 0;
    int workers = -1;
    bool corrupt_p = false;
};

void add_common(CLI::App* cmd, Cli& cli) {
    cmd->add_option("--config", cli.config_path, "configuration file (JSON)")
        ->required()
        ->check(CLI::ExistingFile);
    cmd->add_option("--out", cli.out_path, "output file (default: stdout)");
}

void add_sim_flags(CLI::App* cmd, Cli& cli) {
    cmd->add_option("--seed", cli.seed, "override sim.seed");
    cmd->add_option("--frames", cli.frames, "override sim.frames")->check(CLI::PositiveNumber);
    cmd->add_option("--mode", cli.mode, "override sim.sensing_mode")
        ->check(CLI::IsMember({"statistical", "physical"}));
    cmd->add_option("--workers", cli.workers, "override sim.workers (0 = auto)")
        ->check(CLI::Range(0, 4096));
}

harqlink::CliOptions to_options(const Cli& cli, const CLI::App* cmd) {
    harqlink::CliOptions opt;
    opt.out_path = cli.out_path;
    opt.variant = cli.variant;
    opt.corrupt_p = cli.corrupt_p;
    auto given = [cmd](const char* name) {
        const CLI::Option* o = cmd->get_option_no_throw(name);
        return o != nullptr && o->count() > 0;
    };
    if (given("--seed")) {
        opt.seed = cli.seed;
    }
    if (given("--frames")) {
        opt.frames = cli.frames;
    }
    if (given("--mode")) {
        opt.mode = cli.mode == "physical" ? harqlink::SensingMode::kPhysical
                                          : harqlink::SensingMode::kStatistical;
    }
    if (given("--workers")) {
        opt.workers = cli.workers;
    }
    return opt;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"QoS metrics for a sensing-gated retransmission link"};
    app.set_version_flag("--version", std::string(harqlink::kToolName) + " " +
                                          harqlink::kToolVersion);
    app.require_subcommand(1);

    Cli cli;
    CLI::App* analyze = app.add_subcommand("analyze", "closed-form metrics for one configuration");
    add_common(analyze, cli);
    analyze->add_option("--variant", cli.variant, "service recursion variant to highlight")
        ->check(CLI::IsMember({"renewal", "truncated"}));

    CLI::App* sweep = app.add_subcommand("sweep", "evaluate metrics along configured sweeps (CSV)");
    add_common(sweep, cli);

    CLI::App* simulate = app.add_subcommand("simulate", "frame-level Monte Carlo run");
    add_common(simulate, cli);
    add_sim_flags(simulate, cli);

    CLI::App* validate = app.add_subcommand("validate", "cross-check closed forms against oracles");
    add_common(validate, cli);
    add_sim_flags(validate, cli);
    validate->add_flag("--corrupt-p", cli.corrupt_p,
                       "perturb the root-check input (negative control; the check must fail)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        harqlink::Config cfg = harqlink::load_config(cli.config_path);
        if (analyze->parsed()) {
            return harqlink::cmd_analyze(cfg, to_options(cli, analyze));
        }
        if (sweep->parsed()) {
            return harqlink::cmd_sweep(cfg, to_options(cli, sweep));
        }
        if (simulate->parsed()) {
            return harqlink::cmd_simulate(cfg, to_options(cli, simulate));
        }
        return harqlink::cmd_validate(cfg, to_options(cli, validate));
    } catch (const harqlink::ConfigError& e) {
        std::fprintf(stderr, "%s: %s\n", harqlink::kToolName, e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "%s: %s\n", harqlink::kToolName, e.what());
        return 2;
    }
}

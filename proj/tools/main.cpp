#include <string>

#include <CLI11.hpp>

#include "wgf/driver.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Wasserstein gradient-flow solver"};
    app.require_subcommand(1);

    std::string config_path, out_dir;
    bool override_tau_guard = false, quiet = false;

    auto add_common = [&](CLI::App* sub, bool needs_config) {
        if (needs_config)
            sub->add_option("--config", config_path, "configuration file")
                ->required();
        sub->add_flag("--override-tau-guard", override_tau_guard,
                      "run even when the step size exceeds the admissible "
                      "threshold");
        sub->add_flag("--quiet", quiet, "suppress the summary line");
    };

    CLI::App* run = app.add_subcommand("run", "solve and persist a trajectory");
    add_common(run, true);
    run->add_option("--out", out_dir, "artifact directory");

    CLI::App* compare =
        app.add_subcommand("compare", "error table across step sizes");
    add_common(compare, true);
    compare->add_option("--out", out_dir, "artifact directory");

    CLI::App* diagnose =
        app.add_subcommand("diagnose", "replay checks on stored artifacts");
    diagnose->add_option("--out", out_dir, "artifact directory to inspect")
        ->required();
    diagnose->add_flag("--quiet", quiet, "suppress the summary line");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    if (run->parsed())
        return wgf::cmd_run(config_path, out_dir, override_tau_guard, quiet);
    if (compare->parsed())
        return wgf::cmd_compare(config_path, out_dir, override_tau_guard, quiet);
    return wgf::cmd_diagnose(out_dir, quiet);
}

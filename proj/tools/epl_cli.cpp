// epl: command-line driver for the EPL network experiments.
//
//   epl <command> [--config cfg.json] [--seed N] [--dataset manifest.json|synthetic]
//                 [--out dir] [--noise-p P] [--trials N] [--held-noise bool]
//                 [--schedule a b c d e] [--prime-fraction f]
//
// Commands: train-test, sweep-noise, neuromod, prime, benchmark, continuous, fewshot.
// Flags override the config file. Exit codes: 0 ok, 1 usage/config, 2 data/format.

#include "epl/experiment.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Event-driven olfactory EPL network simulator"};
    app.set_version_flag("--version", std::string(epl::kVersion));
    app.require_subcommand(1);

    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::string dataset;
    std::string out_dir;
    std::optional<double> noise_p;
    std::optional<std::size_t> trials;
    std::optional<bool> held_noise;
    std::vector<double> schedule;
    std::optional<double> prime_fraction;

    const std::vector<std::pair<std::string, std::string>> verbs = {
        {"train-test", "train every odor one-shot, then test the plume grid clean and occluded"},
        {"sweep-noise", "accuracy versus occlusion level P = 0, 0.1, ..., 1"},
        {"neuromod", "noise sweep with and without the threshold schedule"},
        {"prime", "accuracy versus primed GC fraction"},
        {"benchmark", "EPL against raw, median, total-variation and PCA baselines"},
        {"continuous", "eight back-to-back plume samples without resetting"},
        {"fewshot", "slow-learning regimen on one odor with noisy training"},
    };
    for (const auto& [name, help] : verbs) {
        auto* sub = app.add_subcommand(name, help);
        sub->add_option("--config", config_path, "JSON config file");
        sub->add_option("--seed", seed, "master seed");
        sub->add_option("--dataset", dataset, "dataset manifest path or 'synthetic'");
        sub->add_option("--out", out_dir, "output directory");
        sub->add_option("--noise-p", noise_p, "occlusion level P")->check(CLI::Range(0.0, 1.0));
        sub->add_option("--trials", trials, "trials per odor and condition")->check(CLI::PositiveNumber);
        sub->add_option("--held-noise", held_noise, "continuous: hold one occlusion across samples");
        sub->add_option("--schedule", schedule, "five threshold scale factors")->expected(5);
        sub->add_option("--prime-fraction", prime_fraction, "fraction of the target's GCs to prime")
            ->check(CLI::Range(0.0, 1.0));
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kExitUsage;
    }

    try {
        const auto* sub = app.get_subcommands().front();
        const epl::Command command = epl::parse_command(sub->get_name());

        epl::ExperimentConfig cfg = config_path.empty() ? epl::ExperimentConfig{} : epl::load_config(config_path);
        if (seed)
            cfg.seed = *seed;
        if (!dataset.empty()) {
            if (dataset == "synthetic")
                cfg.manifest.reset();
            else
                cfg.manifest = dataset;
        }
        if (!out_dir.empty())
            cfg.out_dir = out_dir;
        if (noise_p)
            cfg.noise_p = noise_p;
        if (trials)
            cfg.trials = *trials;
        if (held_noise)
            cfg.held_noise = *held_noise;
        if (!schedule.empty())
            cfg.schedule.scale_factors = schedule;
        if (prime_fraction)
            cfg.prime_fraction = prime_fraction;

        const epl::RunReport report = epl::run_experiment(cfg, command);
        epl::write_report(report, cfg.out_dir);

        std::printf("%s  config %s  seed %llu  -> %s\n", epl::to_string(command).c_str(), report.config_hash.c_str(),
                    static_cast<unsigned long long>(report.seed), cfg.out_dir.string().c_str());
        for (const auto& [k, v] : report.summary)
            std::printf("  %-28s %.4f\n", k.c_str(), v);
        return 0;
    } catch (const epl::UsageError& e) {
        std::cerr << "epl: " << e.what() << '\n';
        return kExitUsage;
    } catch (const epl::ConfigError& e) {
        std::cerr << "epl: " << e.what() << '\n';
        return kExitUsage;
    } catch (const epl::Error& e) {
        std::cerr << "epl: " << e.what() << '\n';
        return kExitData;
    } catch (const std::exception& e) {
        std::cerr << "epl: internal error: " << e.what() << '\n';
        return kExitData;
    }
}

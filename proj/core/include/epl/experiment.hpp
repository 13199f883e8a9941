#pragma once

#include "epl/baselines.hpp"
#include "epl/dataset.hpp"
#include "epl/modulation.hpp"

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace epl {

inline constexpr std::string_view kVersion = "0.1.0";

enum class Command { train_test, sweep_noise, neuromod, prime, benchmark, continuous, fewshot };

std::string to_string(Command c);
Command parse_command(std::string_view name);

struct ExperimentConfig {
    NetworkConfig network;
    GammaConfig gamma;
    PlasticityConfig plasticity;
    BaselineConfig baseline;
    NeuromodSchedule schedule;

    /// Empty means the synthetic dataset described by `synthetic`.
    std::optional<std::filesystem::path> manifest;
    SyntheticSpec synthetic;
    std::size_t max_odors = 0; // 0 = every odor in the dataset

    std::uint64_t seed = 1;
    std::optional<double> noise_p; // per-command default when unset
    std::size_t trials = 100;      // per odor and condition
    bool held_noise = false;
    std::optional<double> prime_fraction; // unset: sweep 0, 0.25, ..., 1
    double primed_threshold_factor = 2.0;
    double threshold = kDefaultClassifyThreshold;
    std::filesystem::path out_dir = "out";

    void validate() const;
};

/// Reads a JSON config; missing keys keep their defaults.
ExperimentConfig load_config(const std::filesystem::path& path);
ExperimentConfig config_from_json(const std::string& text);

/// Canonical JSON rendering (sorted keys, fixed formatting) and its FNV-1a hash.
std::string config_json(const ExperimentConfig& cfg);
std::string config_hash(const ExperimentConfig& cfg);

struct Table {
    std::string name;
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    void add(std::vector<std::string> row);
};

struct RunReport {
    Command command = Command::train_test;
    std::string config_json;
    std::string config_hash;
    std::uint64_t seed = 0;
    std::map<std::string, std::uint64_t> seeds;
    std::map<std::string, double> summary;
    std::vector<Table> tables;
    Table raster{"raster", {"context", "cycle", "mc", "ts"}, {}};

    const Table* table(std::string_view name) const;
};

RunReport run_experiment(const ExperimentConfig& cfg, Command command);

/// Writes <name>.csv per table, raster.csv, summary.csv and manifest.json.
void write_report(const RunReport& report, const std::filesystem::path& dir);

// Building blocks shared by the commands, the tests and the benchmarks.

struct LoadedDataset {
    std::vector<TrialRecording> trials;
    EncodedDataset encoded;
};

LoadedDataset load_experiment_dataset(const ExperimentConfig& cfg);

struct TrainedNetwork {
    Network net;
    OdorLibrary library;
};

/// Fresh network trained one-shot on each sample in order, adding a cohort
/// before every odor after the first.
TrainedNetwork train_sequence(const NetworkConfig& ncfg, const GammaConfig& gamma, const PlasticityConfig& pcfg,
                              const std::vector<std::string>& labels, const std::vector<LevelVector>& samples,
                              std::uint64_t seed);

/// Runs a test sniff without clearing inhibition left by the previous one.
SniffResponse run_sniff_continuous(Network& net, const LevelVector& input);

} // namespace epl

#pragma once

#include "epl/encoding.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace epl {

struct TrialMetadata {
    std::string location;
    double wind_speed = 0.0;     // m/s
    double heater_voltage = 0.0; // V
};

struct TrialRecording {
    std::string odor_label;
    RawMatrix samples;         // time x sensors
    std::vector<double> times; // seconds from trial onset, one per row
    double sample_rate = 100.0;
    TrialMetadata metadata;

    double duration() const;
};

/// Column layout of an external (UCI-style) trial file.
struct TrialFormat {
    int time_column = 0;                    // -1 if the file has no time column
    std::vector<int> skip_columns;          // e.g. temperature and humidity
    double time_scale = 1.0;                // file time unit in seconds (0.001 for ms)
    std::vector<std::size_t> sensor_order;  // file sensor index per output column; empty = identity
};

struct ManifestEntry {
    std::string label;
    std::filesystem::path path;
    TrialMetadata metadata;
    std::optional<double> sample_rate;
};

struct Manifest {
    std::vector<ManifestEntry> odors;
    TrialFormat format;
};

/// Reads a manifest (JSON). Relative paths resolve against the manifest's
/// directory.
Manifest load_manifest(const std::filesystem::path& path);

/// Loads a trial. Files starting with the canonical header are read as the
/// canonical format; anything else is parsed as a delimited numeric table
/// laid out per `format`.
TrialRecording load_trial(const std::filesystem::path& path, std::size_t expected_columns = kDefaultColumns,
                          const TrialFormat& format = {});

std::vector<TrialRecording> load_dataset(const Manifest& manifest, std::size_t expected_columns = kDefaultColumns);

/// Canonical trial format: one header line, then one tab-separated row of
/// sensor values per timestep.
void write_trial(const TrialRecording& trial, const std::filesystem::path& path);

/// Row nearest to t seconds; ties go to the earlier row.
std::vector<double> extract_sample(const TrialRecording& trial, double t);

inline constexpr double kTrainingTime = 90.0;
inline constexpr double kFirstTestTime = 30.0;
inline constexpr double kTestInterval = 5.0;
inline constexpr std::size_t kTestsPerTrial = 30;
inline constexpr double kMinTrialDuration = 180.0;

struct TrialSamples {
    std::vector<double> train;
    std::vector<std::vector<double>> tests;
};

TrialSamples training_and_test_samples(const TrialRecording& trial);

struct SyntheticSpec {
    std::size_t num_odors = 10;
    std::size_t num_sensors = kDefaultColumns;
    double base_sparsity = 0.5;   // fraction of sensors with a weak response
    double plume_noise_sd = 0.15; // sd of the log plume modulation
    double duration = 180.0;      // seconds
    double sample_rate = 10.0;    // Hz
    double max_overlap = 0.6;     // allowed shared fraction of active sensors
    std::uint64_t rng_seed = 0;

    void validate() const;
};

/// Plume-like recordings for `num_odors` odors with separable signatures.
std::vector<TrialRecording> synthesize_dataset(const SyntheticSpec& spec);

/// The clean, sparsified training vector of each trial, calibrated on the
/// full set of trials.
struct EncodedDataset {
    SensorCalibration calibration;
    std::vector<std::string> labels;
    std::vector<LevelVector> training;
    std::vector<std::vector<LevelVector>> tests; // per odor, the 30-point plume grid
};

LevelVector encode_sample(std::span<const double> raw, const SensorCalibration& cal);
EncodedDataset encode_dataset(const std::vector<TrialRecording>& trials);

/// Fraction of the smaller active set shared by two level vectors.
double active_overlap(const LevelVector& a, const LevelVector& b);

} // namespace epl

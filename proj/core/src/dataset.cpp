#include "epl/dataset.hpp"

#include "epl/common.hpp"
#include "epl/rng.hpp"

#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace epl {

namespace {

constexpr std::string_view kCanonicalMagic = "#epl-trial";

std::vector<std::string_view> split_fields(std::string_view line)
{
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == ',' || line[i] == ';' || line[i] == '\r'))
            ++i;
        if (i >= line.size())
            break;
        std::size_t j = i;
        while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != ',' && line[j] != ';' && line[j] != '\r')
            ++j;
        out.push_back(line.substr(i, j - i));
        i = j;
    }
    return out;
}

double parse_double(std::string_view s, std::size_t line_no)
{
    double v = 0.0;
    const auto* end = s.data() + s.size();
    auto [p, ec] = std::from_chars(s.data(), end, v);
    if (ec != std::errc() || p != end || !std::isfinite(v))
        throw ParseError("non-numeric field '" + std::string(s) + "'", line_no);
    return v;
}

std::string header_value(const std::string& header, const std::string& key)
{
    const std::string needle = key + "=";
    std::size_t pos = 0;
    while ((pos = header.find(needle, pos)) != std::string::npos) {
        if (pos == 0 || header[pos - 1] == '\t' || header[pos - 1] == ' ') {
            const std::size_t start = pos + needle.size();
            const std::size_t end = header.find('\t', start);
            return header.substr(start, end == std::string::npos ? std::string::npos : end - start);
        }
        pos += needle.size();
    }
    return {};
}

std::string format_double(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

TrialRecording load_canonical(std::istream& in, const std::string& header, std::size_t expected_columns)
{
    TrialRecording t;
    t.odor_label = header_value(header, "label");
    const std::string rate = header_value(header, "rate");
    if (t.odor_label.empty() || rate.empty())
        throw FormatError("canonical header needs label and rate");
    t.sample_rate = parse_double(rate, 1);
    if (!(t.sample_rate > 0.0))
        throw FormatError("sample rate must be positive");
    t.metadata.location = header_value(header, "location");
    if (auto w = header_value(header, "wind_speed"); !w.empty())
        t.metadata.wind_speed = parse_double(w, 1);
    if (auto h = header_value(header, "heater_voltage"); !h.empty())
        t.metadata.heater_voltage = parse_double(h, 1);

    t.samples.cols = expected_columns;
    std::string line;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        const auto fields = split_fields(line);
        if (fields.empty())
            continue;
        if (fields.size() != expected_columns)
            throw FormatError("line " + std::to_string(line_no) + " has " + std::to_string(fields.size()) +
                              " sensor columns, expected " + std::to_string(expected_columns));
        for (auto f : fields)
            t.samples.data.push_back(parse_double(f, line_no));
        t.times.push_back(static_cast<double>(t.samples.rows) / t.sample_rate);
        ++t.samples.rows;
    }
    if (t.samples.rows == 0)
        throw ParseError("trial contains no samples", line_no);
    return t;
}

TrialRecording load_table(std::istream& in, std::string first_line, std::size_t expected_columns, const TrialFormat& format)
{
    TrialRecording t;
    t.samples.cols = expected_columns;
    std::string line = std::move(first_line);
    std::size_t line_no = 0;
    bool have = true;
    std::vector<double> raw_times;
    do {
        ++line_no;
        const auto fields = split_fields(line);
        if (fields.empty())
            continue;
        std::vector<double> sensors;
        sensors.reserve(fields.size());
        std::optional<double> time;
        for (std::size_t c = 0; c < fields.size(); ++c) {
            const double v = parse_double(fields[c], line_no);
            const int ci = static_cast<int>(c);
            if (ci == format.time_column)
                time = v * format.time_scale;
            else if (std::find(format.skip_columns.begin(), format.skip_columns.end(), ci) == format.skip_columns.end())
                sensors.push_back(v);
        }
        if (sensors.size() != expected_columns)
            throw FormatError("line " + std::to_string(line_no) + " has " + std::to_string(sensors.size()) +
                              " sensor columns, expected " + std::to_string(expected_columns));
        if (!format.sensor_order.empty()) {
            std::vector<double> ordered(expected_columns);
            for (std::size_t k = 0; k < expected_columns; ++k)
                ordered[k] = sensors.at(format.sensor_order[k]);
            sensors = std::move(ordered);
        }
        t.samples.data.insert(t.samples.data.end(), sensors.begin(), sensors.end());
        if (time)
            raw_times.push_back(*time);
        ++t.samples.rows;
    } while ((have = static_cast<bool>(std::getline(in, line))));

    if (t.samples.rows == 0)
        throw ParseError("trial contains no samples", line_no);
    if (!raw_times.empty()) {
        const double t0 = raw_times.front();
        for (auto& x : raw_times)
            x -= t0;
        for (std::size_t i = 1; i < raw_times.size(); ++i)
            if (raw_times[i] < raw_times[i - 1])
                throw FormatError("timestamps are not monotone");
        t.times = std::move(raw_times);
        if (t.samples.rows > 1 && t.times.back() > 0.0)
            t.sample_rate = static_cast<double>(t.samples.rows - 1) / t.times.back();
    } else {
        for (std::size_t r = 0; r < t.samples.rows; ++r)
            t.times.push_back(static_cast<double>(r) / t.sample_rate);
    }
    return t;
}

} // namespace

double TrialRecording::duration() const
{
    return static_cast<double>(samples.rows) / sample_rate;
}

Manifest load_manifest(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot open dataset manifest " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw FormatError("manifest " + path.string() + ": " + e.what());
    }
    Manifest m;
    const auto base = path.parent_path();
    try {
        if (j.contains("format")) {
            const auto& f = j.at("format");
            m.format.time_column = f.value("time_column", 0);
            m.format.skip_columns = f.value("skip_columns", std::vector<int>{});
            const std::string unit = f.value("time_unit", std::string("s"));
            if (unit == "s")
                m.format.time_scale = 1.0;
            else if (unit == "ms")
                m.format.time_scale = 1e-3;
            else
                throw FormatError("manifest " + path.string() + ": unknown time_unit '" + unit + "'");
            m.format.sensor_order = f.value("sensor_order", std::vector<std::size_t>{});
        }
        for (const auto& o : j.at("odors")) {
            ManifestEntry e;
            e.label = o.at("label").get<std::string>();
            e.path = o.at("path").get<std::string>();
            if (e.path.is_relative())
                e.path = base / e.path;
            e.metadata.location = o.value("location", std::string());
            e.metadata.wind_speed = o.value("wind_speed", 0.0);
            e.metadata.heater_voltage = o.value("heater_voltage", 0.0);
            if (o.contains("sample_rate"))
                e.sample_rate = o.at("sample_rate").get<double>();
            m.odors.push_back(std::move(e));
        }
    } catch (const nlohmann::json::exception& e) {
        throw FormatError("manifest " + path.string() + ": " + e.what());
    }
    return m;
}

TrialRecording load_trial(const std::filesystem::path& path, std::size_t expected_columns, const TrialFormat& format)
{
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot open trial file " + path.string());
    std::string first;
    if (!std::getline(in, first))
        throw ParseError("empty trial file " + path.string(), 1);
    try {
        if (first.rfind(kCanonicalMagic, 0) == 0)
            return load_canonical(in, first, expected_columns);
        return load_table(in, std::move(first), expected_columns, format);
    } catch (const ParseError& e) {
        throw ParseError(path.string() + ": " + e.what(), e.line());
    } catch (const FormatError& e) {
        throw FormatError(path.string() + ": " + e.what());
    }
}

std::vector<TrialRecording> load_dataset(const Manifest& manifest, std::size_t expected_columns)
{
    std::vector<TrialRecording> out;
    for (const auto& e : manifest.odors) {
        auto t = load_trial(e.path, expected_columns, manifest.format);
        t.odor_label = e.label;
        t.metadata = e.metadata;
        if (e.sample_rate) {
            t.sample_rate = *e.sample_rate;
            if (manifest.format.time_column < 0)
                for (std::size_t r = 0; r < t.samples.rows; ++r)
                    t.times[r] = static_cast<double>(r) / t.sample_rate;
        }
        out.push_back(std::move(t));
    }
    return out;
}

void write_trial(const TrialRecording& trial, const std::filesystem::path& path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw IoError("cannot write trial file " + path.string());
    out << kCanonicalMagic << "\tlabel=" << trial.odor_label << "\trate=" << format_double(trial.sample_rate)
        << "\tlocation=" << trial.metadata.location << "\twind_speed=" << format_double(trial.metadata.wind_speed)
        << "\theater_voltage=" << format_double(trial.metadata.heater_voltage) << '\n';
    for (std::size_t r = 0; r < trial.samples.rows; ++r) {
        for (std::size_t c = 0; c < trial.samples.cols; ++c) {
            if (c)
                out << '\t';
            out << format_double(trial.samples.at(r, c));
        }
        out << '\n';
    }
    if (!out)
        throw IoError("write failed for " + path.string());
}

std::vector<double> extract_sample(const TrialRecording& trial, double t)
{
    if (trial.samples.rows == 0)
        throw InputError("trial has no samples");
    if (!(t >= 0.0 && t <= trial.duration()))
        throw InputError("sample time " + format_double(t) + " s outside the trial");
    const auto& ts = trial.times;
    auto it = std::lower_bound(ts.begin(), ts.end(), t);
    std::size_t row;
    if (it == ts.end()) {
        row = ts.size() - 1;
    } else {
        row = static_cast<std::size_t>(it - ts.begin());
        if (row > 0 && t - ts[row - 1] <= *it - t)
            --row;
    }
    const auto r = trial.samples.row(row);
    return {r.begin(), r.end()};
}

TrialSamples training_and_test_samples(const TrialRecording& trial)
{
    if (trial.duration() < kMinTrialDuration - 1e-9)
        throw InputError("trial '" + trial.odor_label + "' lasts " + format_double(trial.duration()) +
                         " s, need at least 180 s");
    TrialSamples s;
    s.train = extract_sample(trial, kTrainingTime);
    for (std::size_t i = 0; i < kTestsPerTrial; ++i)
        s.tests.push_back(extract_sample(trial, kFirstTestTime + kTestInterval * static_cast<double>(i)));
    return s;
}

void SyntheticSpec::validate() const
{
    if (num_odors < 1)
        throw UsageError("no odors to train: the synthetic dataset has num_odors = 0");
    if (num_sensors < 2)
        throw ConfigError("synthetic dataset needs at least two sensors");
    if (!(base_sparsity >= 0.0 && base_sparsity < 1.0))
        throw ConfigError("base_sparsity must lie in [0, 1)");
    if (!(plume_noise_sd >= 0.0))
        throw ConfigError("plume_noise_sd must be >= 0");
    if (!(duration > 0.0 && sample_rate > 0.0))
        throw ConfigError("duration and sample_rate must be positive");
    if (duration < kMinTrialDuration)
        throw ConfigError("synthetic trials must last at least 180 s");
    if (!(max_overlap > 0.0 && max_overlap <= 1.0))
        throw ConfigError("max_overlap must lie in (0, 1]");
}

namespace {

// Stationary AR(1) path with the given standard deviation and correlation time.
std::vector<double> smooth_noise(Rng& rng, std::size_t n, double dt, double tau, double sd)
{
    std::vector<double> x(n);
    const double a = std::exp(-dt / tau);
    const double b = sd * std::sqrt(1.0 - a * a);
    double v = sd * rng.normal();
    for (std::size_t i = 0; i < n; ++i) {
        x[i] = v;
        v = a * v + b * rng.normal();
    }
    return x;
}

std::vector<double> odor_signature(Rng& rng, const SyntheticSpec& spec)
{
    std::vector<double> r(spec.num_sensors);
    for (auto& x : r)
        x = rng.bernoulli(spec.base_sparsity) ? rng.uniform(0.0, 0.15) : rng.uniform(0.2, 1.0);
    return r;
}

TrialRecording render_trial(const std::string& label, const std::vector<double>& signature,
                            const std::vector<double>& baseline, const SyntheticSpec& spec, Rng rng)
{
    const auto n = static_cast<std::size_t>(std::llround(spec.duration * spec.sample_rate));
    const double dt = 1.0 / spec.sample_rate;
    const auto plume = smooth_noise(rng, n, dt, 10.0, spec.plume_noise_sd);
    TrialRecording t;
    t.odor_label = label;
    t.sample_rate = spec.sample_rate;
    t.metadata = {"L4", 0.21, 500.0};
    t.samples.rows = n;
    t.samples.cols = spec.num_sensors;
    t.samples.data.assign(n * spec.num_sensors, 0.0);
    for (std::size_t j = 0; j < spec.num_sensors; ++j) {
        const auto local = smooth_noise(rng, n, dt, 5.0, 0.5 * spec.plume_noise_sd);
        for (std::size_t i = 0; i < n; ++i) {
            const double time = static_cast<double>(i) * dt;
            const double onset = 1.0 - std::exp(-time / 8.0);
            t.samples.data[i * spec.num_sensors + j] =
                baseline[j] + signature[j] * onset * std::exp(plume[i] + local[i]);
        }
    }
    for (std::size_t i = 0; i < n; ++i)
        t.times.push_back(static_cast<double>(i) * dt);
    return t;
}

} // namespace

std::vector<TrialRecording> synthesize_dataset(const SyntheticSpec& spec)
{
    spec.validate();
    const Rng root(spec.rng_seed);
    Rng base_rng = root.derive("baseline");
    std::vector<double> baseline(spec.num_sensors);
    for (auto& b : baseline)
        b = base_rng.uniform(0.5, 1.5);

    std::vector<std::string> labels;
    for (std::size_t o = 0; o < spec.num_odors; ++o)
        labels.push_back("odor" + std::to_string(o + 1));

    std::vector<std::uint64_t> attempt(spec.num_odors, 0);
    std::vector<std::vector<double>> sigs(spec.num_odors);
    for (std::size_t o = 0; o < spec.num_odors; ++o) {
        Rng r = root.derive("signature", o);
        sigs[o] = odor_signature(r, spec);
    }

    // Encoded training vectors depend on the joint calibration, so separability
    // is checked on the rendered set and offending odors are redrawn.
    constexpr int kMaxRounds = 1000;
    for (int round = 0;; ++round) {
        std::vector<TrialRecording> trials;
        for (std::size_t o = 0; o < spec.num_odors; ++o)
            trials.push_back(render_trial(labels[o], sigs[o], baseline, spec, root.derive("plume", o)));
        if (spec.num_odors == 1)
            return trials;
        const auto enc = encode_dataset(trials);
        std::optional<std::size_t> bad;
        for (std::size_t a = 0; a < spec.num_odors && !bad; ++a)
            for (std::size_t b = 0; b < a && !bad; ++b)
                if (active_overlap(enc.training[a], enc.training[b]) >= spec.max_overlap)
                    bad = a;
        if (!bad)
            return trials;
        if (round >= kMaxRounds)
            throw ConfigError("could not synthesize separable odors; raise max_overlap or lower num_odors");
        Rng r = root.derive("signature", *bad * 1'000'003ULL + ++attempt[*bad]);
        sigs[*bad] = odor_signature(r, spec);
    }
}

LevelVector encode_sample(std::span<const double> raw, const SensorCalibration& cal)
{
    return sparsify(discretize(raw, cal));
}

EncodedDataset encode_dataset(const std::vector<TrialRecording>& trials)
{
    if (trials.empty())
        throw InputError("dataset has no trials");
    std::vector<RawMatrix> recs;
    recs.reserve(trials.size());
    for (const auto& t : trials)
        recs.push_back(t.samples);
    EncodedDataset out;
    out.calibration = calibrate(recs);
    for (const auto& t : trials) {
        const auto s = training_and_test_samples(t);
        out.labels.push_back(t.odor_label);
        out.training.push_back(encode_sample(s.train, out.calibration));
        std::vector<LevelVector> tests;
        for (const auto& v : s.tests)
            tests.push_back(encode_sample(v, out.calibration));
        out.tests.push_back(std::move(tests));
    }
    return out;
}

double active_overlap(const LevelVector& a, const LevelVector& b)
{
    if (a.size() != b.size())
        throw InputError("level vectors differ in length");
    std::size_t na = 0, nb = 0, both = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        na += a[i] > 0;
        nb += b[i] > 0;
        both += a[i] > 0 && b[i] > 0;
    }
    const std::size_t denom = std::min(na, nb);
    return denom == 0 ? 0.0 : static_cast<double>(both) / static_cast<double>(denom);
}

} // namespace epl

#include "epl/experiment.hpp"

#include "epl/rng.hpp"

#include <json.hpp>

#include <cstdio>
#include <fstream>

namespace epl {

using nlohmann::json;

namespace {

std::string fmt(double v, int digits = 6)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

std::string u64(std::uint64_t v)
{
    return std::to_string(v);
}

const std::vector<std::pair<Command, std::string_view>> kCommands = {
    {Command::train_test, "train-test"}, {Command::sweep_noise, "sweep-noise"}, {Command::neuromod, "neuromod"},
    {Command::prime, "prime"},           {Command::benchmark, "benchmark"},     {Command::continuous, "continuous"},
    {Command::fewshot, "fewshot"},
};

template <typename T>
void read(const json& j, const char* key, T& dst)
{
    if (j.contains(key) && !j.at(key).is_null())
        dst = j.at(key).get<T>();
}

json to_json(const ExperimentConfig& c)
{
    const auto& n = c.network;
    json j;
    j["network"] = {{"num_columns", n.num_columns},
                    {"gcs_per_cohort", n.gcs_per_cohort},
                    {"mc_to_gc_prob", n.mc_to_gc_prob},
                    {"base_exc_weight", n.base_exc_weight},
                    {"gc_threshold_factor", n.gc_threshold_factor},
                    {"exc_weight_cap_factor", n.exc_weight_cap_factor},
                    {"gc_refractory", n.gc_refractory},
                    {"gc_window", n.gc_window},
                    {"delay_min", n.delay_min},
                    {"delay_max", n.delay_max}};
    j["gamma"] = {{"permissive_len", c.gamma.permissive_len},
                  {"inhibitory_len", c.gamma.inhibitory_len},
                  {"cycles_per_sniff", c.gamma.cycles_per_sniff}};
    const auto& p = c.plasticity;
    j["plasticity"] = {{"delta_p", p.delta_p},
                       {"delta_d", p.delta_d},
                       {"eta", p.eta},
                       {"training_sniffs", p.training_sniffs},
                       {"training_noise_p", p.training_noise_p},
                       {"excitatory_enabled", p.excitatory_enabled},
                       {"inhibitory_enabled", p.inhibitory_enabled},
                       {"causal_window", p.causal_window}};
    j["baseline"] = {{"mf_window", c.baseline.mf_window},
                     {"tv_lambda", c.baseline.tv_lambda},
                     {"pca_components", c.baseline.pca_components}};
    j["schedule"] = c.schedule.scale_factors;
    json ds;
    ds["manifest"] = c.manifest ? json(c.manifest->string()) : json(nullptr);
    ds["max_odors"] = c.max_odors;
    const auto& s = c.synthetic;
    ds["synthetic"] = {{"num_odors", s.num_odors},
                       {"num_sensors", s.num_sensors},
                       {"base_sparsity", s.base_sparsity},
                       {"plume_noise_sd", s.plume_noise_sd},
                       {"duration", s.duration},
                       {"sample_rate", s.sample_rate},
                       {"max_overlap", s.max_overlap}};
    j["dataset"] = ds;
    j["seed"] = c.seed;
    j["noise_p"] = c.noise_p ? json(*c.noise_p) : json(nullptr);
    j["trials"] = c.trials;
    j["held_noise"] = c.held_noise;
    j["prime_fraction"] = c.prime_fraction ? json(*c.prime_fraction) : json(nullptr);
    j["primed_threshold_factor"] = c.primed_threshold_factor;
    j["threshold"] = c.threshold;
    return j;
}

std::optional<double> optional_double(const json& j, const char* key, std::optional<double> fallback)
{
    if (!j.contains(key))
        return fallback;
    if (j.at(key).is_null())
        return std::nullopt;
    return j.at(key).get<double>();
}

} // namespace

std::string to_string(Command c)
{
    for (const auto& [cmd, name] : kCommands)
        if (cmd == c)
            return std::string(name);
    return "?";
}

Command parse_command(std::string_view name)
{
    for (const auto& [cmd, n] : kCommands)
        if (n == name)
            return cmd;
    throw UsageError("unknown command '" + std::string(name) + "'");
}

void ExperimentConfig::validate() const
{
    gamma.validate();
    network.validate();
    plasticity.validate();
    baseline.validate(network.num_columns);
    schedule.validate();
    if (!manifest)
        synthetic.validate();
    if (noise_p && !(*noise_p >= 0.0 && *noise_p <= 1.0))
        throw ConfigError("noise P must lie in [0, 1]");
    if (trials < 1)
        throw ConfigError("trials must be >= 1");
    if (prime_fraction && !(*prime_fraction >= 0.0 && *prime_fraction <= 1.0))
        throw ConfigError("prime fraction must lie in [0, 1]");
    if (!(threshold >= 0.0 && threshold <= 1.0))
        throw ConfigError("classification threshold must lie in [0, 1]");
}

ExperimentConfig config_from_json(const std::string& text)
{
    ExperimentConfig c;
    try {
        const json j = json::parse(text);
        if (!j.is_object())
            throw ConfigError("config must be a JSON object");
        if (j.contains("network")) {
            const auto& n = j.at("network");
            read(n, "num_columns", c.network.num_columns);
            read(n, "gcs_per_cohort", c.network.gcs_per_cohort);
            read(n, "mc_to_gc_prob", c.network.mc_to_gc_prob);
            read(n, "base_exc_weight", c.network.base_exc_weight);
            read(n, "gc_threshold_factor", c.network.gc_threshold_factor);
            read(n, "exc_weight_cap_factor", c.network.exc_weight_cap_factor);
            read(n, "gc_refractory", c.network.gc_refractory);
            read(n, "gc_window", c.network.gc_window);
            read(n, "delay_min", c.network.delay_min);
            read(n, "delay_max", c.network.delay_max);
        }
        if (j.contains("gamma")) {
            const auto& g = j.at("gamma");
            read(g, "permissive_len", c.gamma.permissive_len);
            read(g, "inhibitory_len", c.gamma.inhibitory_len);
            read(g, "cycles_per_sniff", c.gamma.cycles_per_sniff);
        }
        if (j.contains("plasticity")) {
            const auto& p = j.at("plasticity");
            if (p.value("preset", std::string()) == "few-shot")
                c.plasticity = PlasticityConfig::few_shot(c.plasticity.training_noise_p);
            read(p, "delta_p", c.plasticity.delta_p);
            read(p, "delta_d", c.plasticity.delta_d);
            read(p, "eta", c.plasticity.eta);
            read(p, "training_sniffs", c.plasticity.training_sniffs);
            read(p, "training_noise_p", c.plasticity.training_noise_p);
            read(p, "excitatory_enabled", c.plasticity.excitatory_enabled);
            read(p, "inhibitory_enabled", c.plasticity.inhibitory_enabled);
            read(p, "causal_window", c.plasticity.causal_window);
        }
        if (j.contains("baseline")) {
            const auto& b = j.at("baseline");
            read(b, "mf_window", c.baseline.mf_window);
            read(b, "tv_lambda", c.baseline.tv_lambda);
            read(b, "pca_components", c.baseline.pca_components);
        }
        read(j, "schedule", c.schedule.scale_factors);
        if (j.contains("dataset")) {
            const auto& d = j.at("dataset");
            if (d.contains("manifest") && !d.at("manifest").is_null())
                c.manifest = d.at("manifest").get<std::string>();
            read(d, "max_odors", c.max_odors);
            if (d.contains("synthetic")) {
                const auto& s = d.at("synthetic");
                read(s, "num_odors", c.synthetic.num_odors);
                read(s, "num_sensors", c.synthetic.num_sensors);
                read(s, "base_sparsity", c.synthetic.base_sparsity);
                read(s, "plume_noise_sd", c.synthetic.plume_noise_sd);
                read(s, "duration", c.synthetic.duration);
                read(s, "sample_rate", c.synthetic.sample_rate);
                read(s, "max_overlap", c.synthetic.max_overlap);
            }
        }
        read(j, "seed", c.seed);
        c.noise_p = optional_double(j, "noise_p", c.noise_p);
        read(j, "trials", c.trials);
        read(j, "held_noise", c.held_noise);
        c.prime_fraction = optional_double(j, "prime_fraction", c.prime_fraction);
        read(j, "primed_threshold_factor", c.primed_threshold_factor);
        read(j, "threshold", c.threshold);
        if (j.contains("out"))
            c.out_dir = j.at("out").get<std::string>();
    } catch (const json::exception& e) {
        throw ConfigError(std::string("invalid config: ") + e.what());
    }
    return c;
}

ExperimentConfig load_config(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot open config " + path.string());
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return config_from_json(text);
}

std::string config_json(const ExperimentConfig& cfg)
{
    return to_json(cfg).dump(2);
}

std::string config_hash(const ExperimentConfig& cfg)
{
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash_label(config_json(cfg))));
    return buf;
}

void Table::add(std::vector<std::string> row)
{
    if (row.size() != header.size())
        throw ContractError("table '" + name + "' row width mismatch");
    rows.push_back(std::move(row));
}

const Table* RunReport::table(std::string_view name) const
{
    for (const auto& t : tables)
        if (t.name == name)
            return &t;
    return nullptr;
}

LoadedDataset load_experiment_dataset(const ExperimentConfig& cfg)
{
    LoadedDataset d;
    if (cfg.manifest) {
        if (!std::filesystem::exists(*cfg.manifest))
            throw IoError("dataset manifest " + cfg.manifest->string() +
                          " not found; pass --dataset synthetic or point --dataset at a manifest listing the trial files");
        d.trials = load_dataset(load_manifest(*cfg.manifest), cfg.network.num_columns);
    } else {
        if (cfg.synthetic.num_odors == 0)
            throw UsageError("no odors to train: the synthetic dataset has num_odors = 0");
        SyntheticSpec spec = cfg.synthetic;
        spec.num_sensors = cfg.network.num_columns;
        spec.rng_seed = derive_seed(cfg.seed, "dataset");
        d.trials = synthesize_dataset(spec);
    }
    if (cfg.max_odors > 0 && d.trials.size() > cfg.max_odors)
        d.trials.resize(cfg.max_odors);
    if (d.trials.empty())
        throw UsageError("no odors to train: the dataset is empty");
    d.encoded = encode_dataset(d.trials);
    return d;
}

TrainedNetwork train_sequence(const NetworkConfig& ncfg, const GammaConfig& gamma, const PlasticityConfig& pcfg,
                              const std::vector<std::string>& labels, const std::vector<LevelVector>& samples,
                              std::uint64_t seed)
{
    if (labels.empty())
        throw UsageError("no odors to train");
    TrainedNetwork t{Network(ncfg, gamma), {}};
    for (std::size_t o = 0; o < labels.size(); ++o) {
        Rng grow = Rng(seed).derive("cohort", o);
        if (o > 0)
            add_cohort(t.net, grow);
        Rng train = Rng(seed).derive("training", o);
        train_odor(t.net, samples[o], labels[o], pcfg, t.library, train);
    }
    return t;
}

SniffResponse run_sniff_continuous(Network& net, const LevelVector& input)
{
    SniffResponse r;
    for (int c = 0; c < net.gamma().cycles_per_sniff; ++c)
        r.cycles.push_back(net.run_gamma_cycle(input, c, Mode::test).mc_spikes);
    return r;
}

namespace {

struct Context {
    const ExperimentConfig& cfg;
    RunReport& report;
    LoadedDataset data;
    NetworkConfig ncfg;

    std::uint64_t stream(std::string_view label, std::uint64_t index = 0) const { return derive_seed(cfg.seed, label, index); }

    TrainedNetwork train_all() const
    {
        return train_sequence(ncfg, cfg.gamma, cfg.plasticity, data.encoded.labels, data.encoded.training, stream("training"));
    }

    void raster(const std::string& context, const SniffResponse& r)
    {
        for (std::size_t c = 0; c < r.cycles.size(); ++c)
            for (const auto& s : r.cycles[c])
                report.raster.add({context, std::to_string(c + 1), std::to_string(s.mc), std::to_string(s.ts)});
    }
};

std::vector<std::string> similarity_cells(const SniffResponse& r, const SpikeSet& learned)
{
    std::vector<std::string> out;
    for (const auto& c : r.cycles)
        out.push_back(fmt(jaccard_similarity(c, learned)));
    return out;
}

std::vector<std::string> cycle_headers(std::size_t n)
{
    std::vector<std::string> h;
    for (std::size_t c = 1; c <= n; ++c)
        h.push_back("sim_c" + std::to_string(c));
    return h;
}

Table trials_table(const std::string& name, std::vector<std::string> lead, std::size_t cycles)
{
    Table t{name, std::move(lead), {}};
    for (auto& h : cycle_headers(cycles))
        t.header.push_back(h);
    return t;
}

void tuning_table(Context& ctx, const OdorLibrary& lib)
{
    Table t{"tuning", {"odor", "cycle", "tuned_gcs"}, {}};
    for (const auto& rec : lib.records())
        for (std::size_t c = 0; c < rec.tuned_per_cycle.size(); ++c)
            t.add({rec.label, std::to_string(c + 1), std::to_string(rec.tuned_per_cycle[c])});
    ctx.report.tables.push_back(std::move(t));
}

void cmd_train_test(Context& ctx)
{
    const double p = ctx.cfg.noise_p.value_or(0.6);
    auto tn = ctx.train_all();
    tuning_table(ctx, tn.library);
    const auto& enc = ctx.data.encoded;
    const auto cycles = static_cast<std::size_t>(ctx.cfg.gamma.cycles_per_sniff);
    Table trials = trials_table("trials", {"condition", "odor", "sample", "time_s", "P", "seed", "predicted", "correct"}, cycles);
    std::size_t ok_clean = 0, ok_noisy = 0, n = 0;
    for (std::size_t o = 0; o < enc.labels.size(); ++o) {
        for (std::size_t i = 0; i < enc.tests[o].size(); ++i) {
            const double time = kFirstTestTime + kTestInterval * static_cast<double>(i);
            for (int noisy = 0; noisy < 2; ++noisy) {
                const std::uint64_t seed = ctx.stream("train-test", o * 1000 + i);
                Rng rng(seed);
                const LevelVector x = noisy ? occlude(enc.tests[o][i], p, rng) : enc.tests[o][i];
                const auto r = tn.net.run_sniff(x, Mode::test);
                const auto c = classify_sniff(r, tn.library, ctx.cfg.threshold);
                const bool ok = c.label && *c.label == enc.labels[o];
                (noisy ? ok_noisy : ok_clean) += ok;
                std::vector<std::string> row{noisy ? "noisy" : "clean", enc.labels[o], std::to_string(i + 1), fmt(time, 1),
                                             fmt(noisy ? p : 0.0, 2), noisy ? u64(seed) : "0", c.label_or_unknown(),
                                             ok ? "1" : "0"};
                for (auto& s : similarity_cells(r, tn.library[o].learned_pattern))
                    row.push_back(s);
                trials.add(std::move(row));
                if (i == 12)
                    ctx.raster(enc.labels[o] + (noisy ? "/noisy" : "/clean"), r);
            }
            ++n;
        }
    }
    ctx.report.tables.push_back(std::move(trials));
    ctx.report.summary["accuracy_clean"] = static_cast<double>(ok_clean) / static_cast<double>(n);
    ctx.report.summary["accuracy_noisy"] = static_cast<double>(ok_noisy) / static_cast<double>(n);
    ctx.report.summary["noise_p"] = p;
}

std::vector<double> p_grid()
{
    std::vector<double> g;
    for (int i = 0; i <= 10; ++i)
        g.push_back(i / 10.0);
    return g;
}

void cmd_sweep(Context& ctx, bool with_schedule)
{
    auto tn = ctx.train_all();
    const auto& enc = ctx.data.encoded;
    const auto cycles = static_cast<std::size_t>(ctx.cfg.gamma.cycles_per_sniff);
    std::vector<double> grid = ctx.cfg.noise_p ? std::vector<double>{*ctx.cfg.noise_p} : p_grid();

    Table acc{"accuracy", {"P", "trials", "correct", "accuracy"}, {}};
    if (with_schedule)
        acc.header = {"P", "trials", "correct_single", "accuracy_single", "correct_neuromod", "accuracy_neuromod"};
    Table trials = trials_table("trials", {"P", "odor", "trial", "seed", "predicted"}, cycles);
    trials.header.insert(trials.header.begin() + 5, "correct");
    if (with_schedule) {
        trials.header.insert(trials.header.begin() + 6, "predicted_neuromod");
        trials.header.insert(trials.header.begin() + 7, "correct_neuromod");
        trials.header.insert(trials.header.begin() + 8, "best_state");
    }
    for (std::size_t pi = 0; pi < grid.size(); ++pi) {
        const double p = grid[pi];
        std::size_t ok = 0, okn = 0, n = 0;
        for (std::size_t o = 0; o < enc.labels.size(); ++o) {
            for (std::size_t t = 0; t < ctx.cfg.trials; ++t) {
                const std::uint64_t seed = ctx.stream("noise", (pi * enc.labels.size() + o) * 1'000'000 + t);
                Rng rng(seed);
                const LevelVector x = occlude(enc.training[o], p, rng);
                const auto r = tn.net.run_sniff(x, Mode::test);
                const auto c = classify_sniff(r, tn.library, ctx.cfg.threshold);
                const bool good = c.label && *c.label == enc.labels[o];
                ok += good;
                ++n;
                std::vector<std::string> row{fmt(p, 2), enc.labels[o], std::to_string(t + 1), u64(seed),
                                             c.label_or_unknown(), good ? "1" : "0"};
                if (with_schedule) {
                    const auto m = neuromodulated_identify(tn.net, x, tn.library, ctx.cfg.schedule, ctx.cfg.threshold);
                    const bool goodn = m.classification.label && *m.classification.label == enc.labels[o];
                    okn += goodn;
                    row.push_back(m.classification.label_or_unknown());
                    row.push_back(goodn ? "1" : "0");
                    row.push_back(m.best_state ? std::to_string(*m.best_state + 1) : "0");
                }
                for (auto& s : similarity_cells(r, tn.library[o].learned_pattern))
                    row.push_back(s);
                trials.add(std::move(row));
            }
        }
        const double a = static_cast<double>(ok) / static_cast<double>(n);
        if (with_schedule) {
            const double an = static_cast<double>(okn) / static_cast<double>(n);
            acc.add({fmt(p, 2), std::to_string(n), std::to_string(ok), fmt(a, 4), std::to_string(okn), fmt(an, 4)});
            ctx.report.summary["accuracy_single_P" + fmt(p, 1)] = a;
            ctx.report.summary["accuracy_neuromod_P" + fmt(p, 1)] = an;
        } else {
            acc.add({fmt(p, 2), std::to_string(n), std::to_string(ok), fmt(a, 4)});
            ctx.report.summary["accuracy_P" + fmt(p, 1)] = a;
        }
    }
    ctx.report.tables.push_back(std::move(acc));
    ctx.report.tables.push_back(std::move(trials));
}

void cmd_prime(Context& ctx)
{
    const double p = ctx.cfg.noise_p.value_or(0.9);
    auto tn = ctx.train_all();
    const auto& enc = ctx.data.encoded;
    const auto cycles = static_cast<std::size_t>(ctx.cfg.gamma.cycles_per_sniff);
    const std::vector<double> fractions =
        ctx.cfg.prime_fraction ? std::vector<double>{*ctx.cfg.prime_fraction} : std::vector<double>{0.0, 0.25, 0.5, 0.75, 1.0};
    Table acc{"accuracy", {"fraction", "P", "trials", "correct", "accuracy"}, {}};
    Table trials = trials_table("trials", {"fraction", "P", "odor", "trial", "seed", "primed_gcs", "predicted", "correct"}, cycles);
    for (std::size_t fi = 0; fi < fractions.size(); ++fi) {
        const double f = fractions[fi];
        std::size_t ok = 0, n = 0;
        for (std::size_t o = 0; o < enc.labels.size(); ++o) {
            for (std::size_t t = 0; t < ctx.cfg.trials; ++t) {
                // Same occlusion for every fraction so the sweep is paired.
                const std::uint64_t seed = ctx.stream("prime-noise", o * 1'000'000 + t);
                Rng noise(seed);
                Rng pick = Rng(ctx.stream("prime-pick", (fi * enc.labels.size() + o) * 1'000'000 + t));
                const auto primed = prime_gcs(tn.net, tn.library, PrimingSpec{enc.labels[o], f, ctx.cfg.primed_threshold_factor}, pick);
                const LevelVector x = occlude(enc.training[o], p, noise);
                const auto r = tn.net.run_sniff(x, Mode::test);
                clear_priming(tn.net);
                const auto c = classify_sniff(r, tn.library, ctx.cfg.threshold);
                const bool good = c.label && *c.label == enc.labels[o];
                ok += good;
                ++n;
                std::vector<std::string> row{fmt(f, 2), fmt(p, 2), enc.labels[o], std::to_string(t + 1), u64(seed),
                                             std::to_string(primed.size()), c.label_or_unknown(), good ? "1" : "0"};
                for (auto& s : similarity_cells(r, tn.library[o].learned_pattern))
                    row.push_back(s);
                trials.add(std::move(row));
            }
        }
        const double a = static_cast<double>(ok) / static_cast<double>(n);
        acc.add({fmt(f, 2), fmt(p, 2), std::to_string(n), std::to_string(ok), fmt(a, 4)});
        ctx.report.summary["accuracy_f" + fmt(f, 2)] = a;
    }
    ctx.report.tables.push_back(std::move(acc));
    ctx.report.tables.push_back(std::move(trials));
}

void cmd_benchmark(Context& ctx)
{
    auto tn = ctx.train_all();
    const auto& enc = ctx.data.encoded;
    BenchmarkSetup setup;
    setup.labels = enc.labels;
    setup.training = enc.training;
    setup.trials_per_odor = ctx.cfg.trials;
    setup.baseline = ctx.cfg.baseline;
    setup.threshold = ctx.cfg.threshold;
    if (ctx.cfg.noise_p)
        setup.p_min = setup.p_max = *ctx.cfg.noise_p;
    const std::vector<Method> methods{Method::epl, Method::raw, Method::mf, Method::tvf, Method::pca};
    const auto report = run_benchmark(tn.net, methods, setup, ctx.stream("benchmark"));

    Table acc{"accuracy", {"method", "trials", "correct", "accuracy"}, {}};
    for (auto m : methods) {
        const std::size_t n = report.count(m);
        const double a = report.accuracy(m);
        acc.add({to_string(m), std::to_string(n), std::to_string(static_cast<std::size_t>(a * static_cast<double>(n) + 0.5)), fmt(a, 4)});
        ctx.report.summary["accuracy_" + to_string(m)] = a;
    }
    Table trials{"trials", {"method", "odor", "P", "seed", "predicted", "correct"}, {}};
    for (const auto& t : report.trials)
        trials.add({to_string(t.method), t.odor, fmt(t.p), u64(t.seed), t.predicted, t.correct ? "1" : "0"});
    ctx.report.tables.push_back(std::move(acc));
    ctx.report.tables.push_back(std::move(trials));
}

inline constexpr std::size_t kContinuousSamples = 8;

void cmd_continuous(Context& ctx)
{
    const double p = ctx.cfg.noise_p.value_or(0.5);
    auto tn = ctx.train_all();
    const auto& enc = ctx.data.encoded;
    const auto cycles = static_cast<std::size_t>(ctx.cfg.gamma.cycles_per_sniff);
    Table trials = trials_table("trials", {"odor", "sample", "time_s", "held_noise", "seed", "predicted", "correct"}, cycles);
    std::size_t ok = 0, n = 0;
    for (std::size_t o = 0; o < enc.labels.size(); ++o) {
        const auto& trial = ctx.data.trials[o];
        const auto& ts = trial.times;
        const auto start = static_cast<std::size_t>(std::lower_bound(ts.begin(), ts.end(), kTrainingTime) - ts.begin());
        if (start + kContinuousSamples > trial.samples.rows)
            throw InputError("trial '" + trial.odor_label + "' is too short for continuous sampling");
        tn.net.reset_transients();
        for (std::size_t k = 0; k < kContinuousSamples; ++k) {
            const auto row = trial.samples.row(start + k);
            const LevelVector clean = encode_sample(row, enc.calibration);
            const std::uint64_t seed = ctx.stream("continuous", o * 1000 + (ctx.cfg.held_noise ? 0 : k));
            Rng rng(seed);
            const LevelVector x = occlude(clean, p, rng);
            const auto r = run_sniff_continuous(tn.net, x);
            const auto c = classify_sniff(r, tn.library, ctx.cfg.threshold);
            const bool good = c.label && *c.label == enc.labels[o];
            ok += good;
            ++n;
            std::vector<std::string> row_out{enc.labels[o], std::to_string(k + 1), fmt(ts[start + k], 3),
                                             ctx.cfg.held_noise ? "1" : "0", u64(seed), c.label_or_unknown(), good ? "1" : "0"};
            for (auto& s : similarity_cells(r, tn.library[o].learned_pattern))
                row_out.push_back(s);
            trials.add(std::move(row_out));
            ctx.raster(enc.labels[o] + "/sample" + std::to_string(k + 1), r);
        }
    }
    ctx.report.tables.push_back(std::move(trials));
    ctx.report.summary["accuracy"] = static_cast<double>(ok) / static_cast<double>(n);
    ctx.report.summary["noise_p"] = p;
}

void cmd_fewshot(Context& ctx)
{
    const double train_p = ctx.cfg.noise_p.value_or(0.4);
    const auto& enc = ctx.data.encoded;
    PlasticityConfig pc = PlasticityConfig::few_shot(train_p);
    TrainedNetwork tn = train_sequence(ctx.ncfg, ctx.cfg.gamma, pc, {enc.labels[0]}, {enc.training[0]}, ctx.stream("fewshot-training"));
    const auto& learned = tn.library[0].learned_pattern;
    const auto cycles = static_cast<std::size_t>(ctx.cfg.gamma.cycles_per_sniff);
    Table trials = trials_table("trials", {"odor", "trial", "training_P", "test_P", "seed"}, cycles);
    std::vector<double> mean(cycles, 0.0);
    for (std::size_t t = 0; t < ctx.cfg.trials; ++t) {
        const std::uint64_t seed = ctx.stream("fewshot-test", t);
        Rng rng(seed);
        const double p = rng.uniform(0.2, 0.8);
        const auto r = tn.net.run_sniff(occlude(enc.training[0], p, rng), Mode::test);
        std::vector<std::string> row{enc.labels[0], std::to_string(t + 1), fmt(train_p, 2), fmt(p), u64(seed)};
        for (std::size_t c = 0; c < cycles; ++c) {
            const double s = jaccard_similarity(r.cycles[c], learned);
            mean[c] += s / static_cast<double>(ctx.cfg.trials);
            row.push_back(fmt(s));
        }
        trials.add(std::move(row));
    }
    Table recall{"recall", {"cycle", "mean_similarity"}, {}};
    for (std::size_t c = 0; c < cycles; ++c)
        recall.add({std::to_string(c + 1), fmt(mean[c])});
    ctx.report.tables.push_back(std::move(recall));
    ctx.report.tables.push_back(std::move(trials));
    tuning_table(ctx, tn.library);
    ctx.report.summary["recall_similarity"] = mean.back();
    ctx.report.summary["training_noise_p"] = train_p;
}

} // namespace

RunReport run_experiment(const ExperimentConfig& cfg, Command command)
{
    cfg.validate();
    RunReport report;
    report.command = command;
    report.config_json = config_json(cfg);
    report.config_hash = config_hash(cfg);
    report.seed = cfg.seed;

    Context ctx{cfg, report, load_experiment_dataset(cfg), cfg.network};
    ctx.ncfg.rng_seed = ctx.stream("network");
    report.seeds["network"] = ctx.ncfg.rng_seed;
    report.seeds["dataset"] = cfg.manifest ? 0 : ctx.stream("dataset");
    report.seeds["training"] = ctx.stream("training");

    switch (command) {
    case Command::train_test: cmd_train_test(ctx); break;
    case Command::sweep_noise: cmd_sweep(ctx, false); break;
    case Command::neuromod: cmd_sweep(ctx, true); break;
    case Command::prime: cmd_prime(ctx); break;
    case Command::benchmark: cmd_benchmark(ctx); break;
    case Command::continuous: cmd_continuous(ctx); break;
    case Command::fewshot: cmd_fewshot(ctx); break;
    }
    return report;
}

namespace {

void write_csv(const Table& t, const std::filesystem::path& path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw IoError("cannot write " + path.string());
    auto line = [&](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i)
                out << ',';
            out << cells[i];
        }
        out << '\n';
    };
    line(t.header);
    for (const auto& r : t.rows)
        line(r);
    if (!out)
        throw IoError("write failed for " + path.string());
}

} // namespace

void write_report(const RunReport& report, const std::filesystem::path& dir)
{
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec)
        throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());
    for (const auto& t : report.tables)
        write_csv(t, dir / (t.name + ".csv"));
    write_csv(report.raster, dir / "raster.csv");

    Table summary{"summary", {"metric", "value"}, {}};
    for (const auto& [k, v] : report.summary)
        summary.add({k, fmt(v)});
    write_csv(summary, dir / "summary.csv");

    json m;
    m["command"] = to_string(report.command);
    m["version"] = std::string(kVersion);
    m["seed"] = report.seed;
    m["seeds"] = report.seeds;
    m["config_hash"] = report.config_hash;
    m["config"] = json::parse(report.config_json);
    json files = json::array();
    for (const auto& t : report.tables)
        files.push_back(t.name + ".csv");
    files.push_back("raster.csv");
    files.push_back("summary.csv");
    m["files"] = files;
    const auto path = dir / "manifest.json";
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw IoError("cannot write " + path.string());
    out << m.dump(2) << '\n';
    if (!out)
        throw IoError("write failed for " + path.string());
}

} // namespace epl

#include "cbl/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <mutex>
#include <set>
#include <thread>

#include "cbl/csv_io.hpp"
#include "cbl/errors.hpp"
#include "cbl/rng.hpp"
#include "cbl/stats.hpp"

namespace cbl {

std::string method_name(Method m) {
    return m == Method::highxofy ? "highxofy" : "rct";
}

Method method_from_name(const std::string& name) {
    if (name == "highxofy") return Method::highxofy;
    if (name == "rct") return Method::rct;
    throw ConfigError("unknown method '" + name + "'");
}

std::string mode_name(SettlementMode m) {
    return m == SettlementMode::granular ? "granular" : "aggregated";
}

SettlementMode mode_from_name(const std::string& name) {
    if (name == "granular") return SettlementMode::granular;
    if (name == "aggregated") return SettlementMode::aggregated;
    throw ConfigError("unknown mode '" + name + "'");
}

void ExperimentConfig::validate() const {
    if (methods.empty()) throw ConfigError("no methods configured");
    if (modes.empty()) throw ConfigError("no modes configured");
    if (control_fractions.empty()) throw ConfigError("no control fractions configured");
    if (seeds.empty()) throw ConfigError("no seeds configured");
    if (formats.empty()) throw ConfigError("no output formats configured");
    for (double f : control_fractions) {
        if (!(f > 0.0 && f < 1.0)) {
            throw ConfigError("control fraction " + std::to_string(f) +
                              " outside (0, 1)");
        }
    }
    if (!(lambda >= 0.0 && lambda <= 1.0)) {
        throw ConfigError("lambda outside [0, 1]");
    }
    if (!csv_path) synth.validate();
    highxofy.validate();
    tariff.validate();
    if (schedule) {
        if (schedule->event_days.size() < 2) {
            throw ConfigError("schedule needs at least 2 event days");
        }
    }
    const std::set<std::uint64_t> unique_seeds(seeds.begin(), seeds.end());
    if (unique_seeds.size() != seeds.size()) {
        throw ConfigError("duplicate seeds configured");
    }
    const std::set<double> unique_fractions(control_fractions.begin(),
                                            control_fractions.end());
    if (unique_fractions.size() != control_fractions.size()) {
        throw ConfigError("duplicate control fractions configured");
    }
}

namespace {

nlohmann::ordered_json dates_to_json(const std::vector<Date>& days) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (Date d : days) arr.push_back(d.to_string());
    return arr;
}

std::vector<Date> dates_from_json(const nlohmann::json& arr) {
    std::vector<Date> days;
    for (const auto& v : arr) days.push_back(Date::parse(v.get<std::string>()));
    return days;
}

void require_keys(const nlohmann::json& j,
                  const std::set<std::string>& allowed,
                  const std::string& where) {
    for (const auto& [key, value] : j.items()) {
        if (!allowed.contains(key)) {
            throw ConfigError("unknown key '" + key + "' in " + where);
        }
    }
}

} // namespace

nlohmann::ordered_json ExperimentConfig::to_json() const {
    nlohmann::ordered_json j;
    if (csv_path) {
        j["data"] = nlohmann::ordered_json{{"csv", *csv_path}};
    } else {
        nlohmann::ordered_json s;
        s["n_customers"] = synth.n_customers;
        s["year"] = synth.year;
        s["base_profile"] = synth.base_profile;
        s["seasonal_amplitude"] = synth.seasonal_amplitude;
        s["customer_scale_dispersion"] = synth.customer_scale_dispersion;
        s["noise_cv"] = synth.noise_cv;
        s["target_per_capita"] = synth.target_per_capita;
        j["data"] = nlohmann::ordered_json{{"synthetic", std::move(s)}};
    }
    nlohmann::ordered_json method_list = nlohmann::ordered_json::array();
    for (Method m : methods) method_list.push_back(method_name(m));
    j["methods"] = std::move(method_list);
    j["highxofy"] = {{"x", highxofy.x},
                     {"y", highxofy.y},
                     {"include_weekends", highxofy.include_weekends},
                     {"exclude_holidays", highxofy.exclude_holidays},
                     {"exclude_prior_event_days", highxofy.exclude_prior_event_days}};
    j["control_fractions"] = control_fractions;
    nlohmann::ordered_json mode_list = nlohmann::ordered_json::array();
    for (SettlementMode m : modes) mode_list.push_back(mode_name(m));
    j["modes"] = std::move(mode_list);
    if (schedule) {
        j["schedule"] = {{"event_days", dates_to_json(schedule->event_days)},
                         {"window", {schedule->window.begin, schedule->window.end}},
                         {"holidays", dates_to_json(schedule->holidays)}};
    } else {
        j["schedule"] = "auto";
    }
    j["tariff"] = {{"incentive_rate", tariff.incentive_rate},
                   {"retail_rate", tariff.retail_rate}};
    j["lambda"] = lambda;
    j["eval_slots"] = event_hours_only ? "event" : "all";
    j["seeds"] = seeds;
    nlohmann::ordered_json format_list = nlohmann::ordered_json::array();
    for (OutputFormat f : formats) {
        format_list.push_back(f == OutputFormat::csv ? "csv" : "json");
    }
    j["formats"] = std::move(format_list);
    return j;
}

ExperimentConfig ExperimentConfig::from_json(const nlohmann::json& j) {
    ExperimentConfig cfg;
    require_keys(j,
                 {"data", "methods", "highxofy", "control_fractions", "modes",
                  "schedule", "tariff", "lambda", "eval_slots", "seeds",
                  "formats"},
                 "config");
    if (j.contains("data")) {
        const auto& data = j.at("data");
        require_keys(data, {"csv", "synthetic"}, "data");
        if (data.contains("csv") && data.contains("synthetic")) {
            throw ConfigError("data must be either csv or synthetic, not both");
        }
        if (data.contains("csv")) {
            cfg.csv_path = data.at("csv").get<std::string>();
        } else if (data.contains("synthetic")) {
            const auto& s = data.at("synthetic");
            require_keys(s,
                         {"n_customers", "year", "base_profile",
                          "seasonal_amplitude", "customer_scale_dispersion",
                          "noise_cv", "target_per_capita", "seed"},
                         "data.synthetic");
            if (s.contains("n_customers")) cfg.synth.n_customers = s.at("n_customers").get<int>();
            if (s.contains("year")) cfg.synth.year = s.at("year").get<int>();
            if (s.contains("base_profile")) {
                const auto profile = s.at("base_profile").get<std::vector<double>>();
                if (profile.size() != 24) {
                    throw ConfigError("base_profile needs 24 weights");
                }
                std::copy(profile.begin(), profile.end(), cfg.synth.base_profile.begin());
            }
            if (s.contains("seasonal_amplitude")) cfg.synth.seasonal_amplitude = s.at("seasonal_amplitude").get<double>();
            if (s.contains("customer_scale_dispersion")) cfg.synth.customer_scale_dispersion = s.at("customer_scale_dispersion").get<double>();
            if (s.contains("noise_cv")) cfg.synth.noise_cv = s.at("noise_cv").get<double>();
            if (s.contains("target_per_capita")) cfg.synth.target_per_capita = s.at("target_per_capita").get<double>();
            if (s.contains("seed")) cfg.synth.seed = s.at("seed").get<std::uint64_t>();
        }
    }
    if (j.contains("methods")) {
        cfg.methods.clear();
        for (const auto& m : j.at("methods")) {
            cfg.methods.push_back(method_from_name(m.get<std::string>()));
        }
    }
    if (j.contains("highxofy")) {
        const auto& h = j.at("highxofy");
        require_keys(h,
                     {"x", "y", "include_weekends", "exclude_holidays",
                      "exclude_prior_event_days"},
                     "highxofy");
        if (h.contains("x")) cfg.highxofy.x = h.at("x").get<int>();
        if (h.contains("y")) cfg.highxofy.y = h.at("y").get<int>();
        if (h.contains("include_weekends")) cfg.highxofy.include_weekends = h.at("include_weekends").get<bool>();
        if (h.contains("exclude_holidays")) cfg.highxofy.exclude_holidays = h.at("exclude_holidays").get<bool>();
        if (h.contains("exclude_prior_event_days")) cfg.highxofy.exclude_prior_event_days = h.at("exclude_prior_event_days").get<bool>();
    }
    if (j.contains("control_fractions")) {
        cfg.control_fractions = j.at("control_fractions").get<std::vector<double>>();
    }
    if (j.contains("modes")) {
        cfg.modes.clear();
        for (const auto& m : j.at("modes")) {
            cfg.modes.push_back(mode_from_name(m.get<std::string>()));
        }
    }
    if (j.contains("schedule")) {
        const auto& s = j.at("schedule");
        if (s.is_string()) {
            if (s.get<std::string>() != "auto") {
                throw ConfigError("schedule must be \"auto\" or an object");
            }
            cfg.schedule.reset();
        } else {
            require_keys(s, {"event_days", "window", "holidays"}, "schedule");
            ScheduleSpec spec;
            spec.event_days = dates_from_json(s.at("event_days"));
            if (s.contains("window")) {
                const auto w = s.at("window").get<std::vector<int>>();
                if (w.size() != 2) throw ConfigError("window needs [begin, end)");
                spec.window = {w[0], w[1]};
            }
            if (s.contains("holidays")) {
                spec.holidays = dates_from_json(s.at("holidays"));
            }
            cfg.schedule = std::move(spec);
        }
    }
    if (j.contains("tariff")) {
        const auto& t = j.at("tariff");
        require_keys(t, {"incentive_rate", "retail_rate"}, "tariff");
        if (t.contains("incentive_rate")) cfg.tariff.incentive_rate = t.at("incentive_rate").get<double>();
        if (t.contains("retail_rate")) cfg.tariff.retail_rate = t.at("retail_rate").get<double>();
    }
    if (j.contains("lambda")) cfg.lambda = j.at("lambda").get<double>();
    if (j.contains("eval_slots")) {
        const auto v = j.at("eval_slots").get<std::string>();
        if (v == "event") cfg.event_hours_only = true;
        else if (v == "all") cfg.event_hours_only = false;
        else throw ConfigError("eval_slots must be \"event\" or \"all\"");
    }
    if (j.contains("seeds")) cfg.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
    if (j.contains("formats")) {
        cfg.formats.clear();
        for (const auto& f : j.at("formats")) {
            const auto name = f.get<std::string>();
            if (name == "csv") cfg.formats.push_back(OutputFormat::csv);
            else if (name == "json") cfg.formats.push_back(OutputFormat::json);
            else throw ConfigError("unknown format '" + name + "'");
        }
    }
    cfg.validate();
    return cfg;
}

std::uint64_t split_seed_for(std::uint64_t run_seed, double control_fraction) {
    const auto key = static_cast<std::uint64_t>(
        std::llround(control_fraction * 1e6));
    return mix_seed(run_seed, key);
}

namespace {

/// Per-seed immutable inputs shared by that seed's cells.
struct SeedContext {
    std::uint64_t seed;
    LoadDataset dataset;
    EventSchedule schedule;
};

LoadDataset load_or_generate(const ExperimentConfig& cfg, std::uint64_t seed) {
    if (cfg.csv_path) {
        std::ifstream in(*cfg.csv_path, std::ios::binary);
        if (!in) throw ConfigError("cannot open dataset file " + *cfg.csv_path);
        LoadDataset d = parse_interval_csv(in);
        if (d.slots_per_day() != 24) d = resample_to_hourly(d);
        return d;
    }
    SynthConfig synth = cfg.synth;
    synth.seed = seed;
    return generate(synth);
}

SeedContext make_seed_context(const ExperimentConfig& cfg, std::uint64_t seed) {
    LoadDataset dataset = load_or_generate(cfg, seed);
    const auto report = validate(dataset);
    if (!report.clean()) {
        throw DataError("dataset fails validation: " +
                        std::to_string(report.missing_cells.size()) +
                        " missing, " +
                        std::to_string(report.negative_cells.size()) +
                        " negative cells, " +
                        std::to_string(report.gap_days.size()) + " gap days");
    }
    EventSchedule schedule;
    if (cfg.schedule) {
        schedule.event_days = cfg.schedule->event_days;
        std::sort(schedule.event_days.begin(), schedule.event_days.end());
        schedule.event_window = cfg.schedule->window;
        schedule.holidays = cfg.schedule->holidays;
        std::sort(schedule.holidays.begin(), schedule.holidays.end());
    } else {
        schedule = default_event_schedule(dataset);
    }
    schedule.validate_against(dataset);
    return SeedContext{seed, std::move(dataset), std::move(schedule)};
}

double treatment_per_capita(const LoadDataset& d, const PopulationSplit& split,
                            const EventSchedule& schedule) {
    NeumaierSum sum;
    std::size_t cells = 0;
    for (const auto& id : split.treatment) {
        const int ci = d.customer_index(id);
        for (Date day : schedule.event_days) {
            for (double v : d.day(ci, d.day_index(day))) {
                sum.add(v);
                ++cells;
            }
        }
    }
    return sum.value() / static_cast<double>(cells);
}

CellResult compute_cell(const SeedContext& ctx, const ExperimentConfig& cfg,
                        Method method, double fraction, SettlementMode mode) {
    const LoadDataset& d = ctx.dataset;
    const EventSchedule& schedule = ctx.schedule;
    const auto split = rct_split(d.customers(), fraction,
                                 split_seed_for(ctx.seed, fraction));
    const SlotRange window = cfg.event_hours_only
                                 ? schedule.event_window
                                 : SlotRange{0, d.slots_per_day()};

    CellResult cell;
    cell.seed = ctx.seed;
    cell.method = method;
    cell.control_fraction = fraction;
    cell.mode = mode;
    cell.control_count = split.control.size();
    cell.treatment_count = split.treatment.size();
    cell.treatment_kwh_per_capita = treatment_per_capita(d, split, schedule);

    std::vector<BaselineCurve> baselines;
    if (mode == SettlementMode::granular) {
        for (Date day : schedule.event_days) {
            if (method == Method::highxofy) {
                for (const auto& id : split.treatment) {
                    baselines.push_back(
                        high_x_of_y(d, id, schedule, day, cfg.highxofy));
                }
            } else {
                auto curves = rct_baseline_granular(d, split, day);
                baselines.insert(baselines.end(),
                                 std::make_move_iterator(curves.begin()),
                                 std::make_move_iterator(curves.end()));
            }
        }
        const auto baseline_table =
            CurveTable::from_curves(std::span<const BaselineCurve>(baselines));
        const auto actual_table = CurveTable::from_dataset(
            d, split.treatment, schedule.event_days);
        EvalWindow w{split.treatment, schedule.event_days, window};
        cell.metrics =
            evaluate_metrics(baseline_table, actual_table, w, cfg.lambda);
        cell.settlement =
            settle_population(baseline_table, actual_table, schedule,
                              cfg.tariff, SettlementMode::granular);
    } else {
        const LoadSeries series = aggregate(d, split.treatment);
        for (Date day : schedule.event_days) {
            if (method == Method::highxofy) {
                baselines.push_back(
                    high_x_of_y(series, schedule, day, cfg.highxofy));
            } else {
                baselines.push_back(rct_baseline_aggregated(d, split, day));
            }
        }
        const auto baseline_table =
            CurveTable::from_curves(std::span<const BaselineCurve>(baselines));
        const auto actual_table =
            CurveTable::from_series(series, schedule.event_days);
        EvalWindow w{{kAggregateSubject}, schedule.event_days, window};
        const auto raw =
            evaluate_metrics(baseline_table, actual_table, w, cfg.lambda);
        cell.metrics = raw.scaled(static_cast<double>(split.treatment.size()));
        cell.settlement =
            settle_population(baseline_table, actual_table, schedule,
                              cfg.tariff, SettlementMode::aggregated);
    }
    return cell;
}

int effective_workers(int configured, std::size_t n_cells) {
    int workers = configured > 0
                      ? configured
                      : static_cast<int>(std::thread::hardware_concurrency());
    if (workers <= 0) workers = 1;
    if (const char* env = std::getenv("CBLBENCH_WORKERS")) {
        const int cap = std::atoi(env);
        if (cap > 0) workers = std::min(workers, cap);
    }
    return std::max(1, std::min<int>(workers, static_cast<int>(n_cells)));
}

} // namespace

ReportBundle run_experiment(const ExperimentConfig& cfg) {
    cfg.validate();

    std::vector<SeedContext> contexts;
    contexts.reserve(cfg.seeds.size());
    for (std::uint64_t seed : cfg.seeds) {
        try {
            contexts.push_back(make_seed_context(cfg, seed));
        } catch (const Error& e) {
            throw CellError("seed " + std::to_string(seed) + ": " + e.what());
        }
    }

    struct CellSpec {
        const SeedContext* ctx;
        Method method;
        double fraction;
        SettlementMode mode;
    };
    std::vector<CellSpec> specs;
    for (const auto& ctx : contexts) {
        for (Method method : cfg.methods) {
            for (double fraction : cfg.control_fractions) {
                for (SettlementMode mode : cfg.modes) {
                    specs.push_back({&ctx, method, fraction, mode});
                }
            }
        }
    }

    std::vector<CellResult> results(specs.size());
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::mutex error_mutex;
    std::exception_ptr first_error;

    const int workers = effective_workers(cfg.workers, specs.size());
    auto work = [&]() {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= specs.size() || failed.load()) return;
            const auto& s = specs[i];
            try {
                results[i] =
                    compute_cell(*s.ctx, cfg, s.method, s.fraction, s.mode);
            } catch (const std::exception& e) {
                std::lock_guard lock(error_mutex);
                if (!first_error) {
                    first_error = std::make_exception_ptr(CellError(
                        "cell (seed=" + std::to_string(s.ctx->seed) +
                        ", method=" + method_name(s.method) + ", fraction=" +
                        std::to_string(s.fraction) + ", mode=" +
                        mode_name(s.mode) + "): " + e.what()));
                }
                failed.store(true);
                return;
            }
        }
    };

    if (workers == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (int i = 0; i < workers; ++i) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }
    if (first_error) std::rethrow_exception(first_error);

    ReportBundle bundle;
    bundle.config = cfg;
    bundle.cells = std::move(results);
    return bundle;
}

} // namespace cbl

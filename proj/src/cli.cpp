#include "cbl/cli.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "cbl/baseline.hpp"
#include "cbl/csv_io.hpp"
#include "cbl/errors.hpp"
#include "cbl/experiment.hpp"
#include "cbl/report_io.hpp"
#include "cbl/synthgen.hpp"
#include "cbl/version.hpp"

namespace cbl {

namespace {

LoadDataset load_hourly_dataset(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open dataset file " + path);
    LoadDataset d = parse_interval_csv(in);
    if (d.slots_per_day() != 24) d = resample_to_hourly(d);
    return d;
}

struct GenerateOptions {
    SynthConfig synth;
    std::string out;
};

int run_generate(const GenerateOptions& opt) {
    const LoadDataset d = generate(opt.synth);
    std::ostringstream csv;
    write_interval_csv(d, csv);
    write_file_atomic(opt.out, csv.str());
    std::cout << "wrote " << opt.out << " (" << d.n_customers()
              << " customers, " << d.n_days() << " days, "
              << d.slots_per_day() << " slots/day)\n";
    return 0;
}

struct ValidateOptions {
    std::string in;
};

int run_validate(const ValidateOptions& opt) {
    std::ifstream in(opt.in, std::ios::binary);
    if (!in) throw ConfigError("cannot open dataset file " + opt.in);
    const LoadDataset d = parse_interval_csv(in);
    const ValidationReport report = validate(d);
    if (report.clean()) {
        std::cout << opt.in << ": ok (" << d.n_customers() << " customers, "
                  << d.n_days() << " days, " << d.slots_per_day()
                  << " slots/day)\n";
        return 0;
    }
    std::cout << opt.in << ": " << report.missing_cells.size()
              << " missing cells, " << report.negative_cells.size()
              << " negative cells, " << report.gap_days.size()
              << " gap days\n";
    const auto preview = [](const auto& cells) {
        std::size_t shown = 0;
        for (const auto& cell : cells) {
            if (shown++ == 5) {
                std::cout << "  ...\n";
                break;
            }
            std::cout << "  " << cell.customer << " " << cell.day.to_string()
                      << " slot " << cell.slot << "\n";
        }
    };
    if (!report.missing_cells.empty()) {
        std::cout << " missing:\n";
        preview(report.missing_cells);
    }
    if (!report.negative_cells.empty()) {
        std::cout << " negative:\n";
        preview(report.negative_cells);
    }
    for (Date day : report.gap_days) {
        std::cout << " gap day: " << day.to_string() << "\n";
    }
    return 1;
}

struct BaselineOptions {
    std::string in;
    std::string method = "highxofy";
    std::string event;
    HighXofYConfig highxofy;
    double control_fraction = 0.05;
    std::uint64_t split_seed = 1;
    std::string customer;
    bool aggregate_subject = false;
    std::string out; // empty = stdout
};

std::string curve_csv(const BaselineCurve& curve) {
    std::ostringstream out;
    out << "subject,event_day,slot,cbl_kwh\n";
    const std::string subject = curve.subject.value_or(kAggregateSubject);
    for (std::size_t t = 0; t < curve.values.size(); ++t) {
        out << subject << ',' << curve.event_day.to_string() << ',' << t << ','
            << format_double(curve.values[t]) << '\n';
    }
    return out.str();
}

int run_baseline(const BaselineOptions& opt) {
    if (opt.aggregate_subject == !opt.customer.empty()) {
        throw ArgumentError("pass exactly one of --customer or --aggregate");
    }
    const LoadDataset d = load_hourly_dataset(opt.in);
    const Date event_day = Date::parse(opt.event);
    EventSchedule schedule;
    schedule.event_days = {event_day};
    schedule.validate_against(d);

    BaselineCurve curve;
    if (opt.method == "highxofy") {
        if (opt.aggregate_subject) {
            const LoadSeries series = aggregate(d, d.customers());
            curve = high_x_of_y(series, schedule, event_day, opt.highxofy);
        } else {
            curve = high_x_of_y(d, opt.customer, schedule, event_day, opt.highxofy);
        }
    } else if (opt.method == "rct") {
        const auto split =
            rct_split(d.customers(), opt.control_fraction, opt.split_seed);
        if (opt.aggregate_subject) {
            curve = rct_baseline_aggregated(d, split, event_day);
        } else {
            const auto curves = rct_baseline_granular(d, split, event_day);
            const auto it =
                std::find_if(curves.begin(), curves.end(), [&](const auto& c) {
                    return c.subject && *c.subject == opt.customer;
                });
            if (it == curves.end()) {
                throw ArgumentError("customer '" + opt.customer +
                                    "' is not in the treatment group");
            }
            curve = *it;
        }
    } else {
        throw ArgumentError("unknown method '" + opt.method + "'");
    }

    const std::string csv = curve_csv(curve);
    if (opt.out.empty()) {
        std::cout << csv;
    } else {
        write_file_atomic(opt.out, csv);
        std::cout << "wrote " << opt.out << "\n";
    }
    return 0;
}

struct RunOptions {
    std::string config_path;
    std::vector<std::uint64_t> seeds;
    std::string out;
    int workers = 0;
    std::vector<std::string> formats;
};

ExperimentConfig resolve_run_config(const RunOptions& opt) {
    ExperimentConfig cfg;
    if (!opt.config_path.empty()) {
        std::ifstream in(opt.config_path);
        if (!in) throw ConfigError("cannot open config file " + opt.config_path);
        nlohmann::json j;
        try {
            in >> j;
        } catch (const nlohmann::json::exception& e) {
            throw ConfigError("config file " + opt.config_path + ": " + e.what());
        }
        cfg = ExperimentConfig::from_json(j);
    }
    if (!opt.seeds.empty()) cfg.seeds = opt.seeds;
    if (!opt.out.empty()) cfg.output_dir = opt.out;
    if (opt.workers > 0) cfg.workers = opt.workers;
    if (!opt.formats.empty()) {
        cfg.formats.clear();
        for (const auto& f : opt.formats) {
            if (f == "csv") cfg.formats.push_back(OutputFormat::csv);
            else if (f == "json") cfg.formats.push_back(OutputFormat::json);
            else throw ConfigError("unknown format '" + f + "'");
        }
    }
    cfg.validate();
    return cfg;
}

int run_run(const RunOptions& opt) {
    const ExperimentConfig cfg = resolve_run_config(opt);
    const ReportBundle bundle = run_experiment(cfg);
    emit_report(bundle, cfg.output_dir);
    std::cout << "wrote " << bundle.cells.size() << " result cells to "
              << cfg.output_dir << "\n";
    return 0;
}

struct ReportOptions {
    std::string manifest_path;
    std::string out;
    int workers = 0;
};

int run_report(const ReportOptions& opt) {
    std::ifstream in(opt.manifest_path);
    if (!in) throw ConfigError("cannot open manifest " + opt.manifest_path);
    nlohmann::json manifest;
    try {
        in >> manifest;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("manifest " + opt.manifest_path + ": " + e.what());
    }
    if (!manifest.contains("config")) {
        throw ConfigError("manifest has no config section");
    }
    ExperimentConfig cfg = ExperimentConfig::from_json(manifest.at("config"));
    if (opt.workers > 0) cfg.workers = opt.workers;
    cfg.output_dir = opt.out;
    const ReportBundle bundle = run_experiment(cfg);
    emit_report(bundle, cfg.output_dir);
    std::cout << "re-emitted " << bundle.cells.size() << " result cells to "
              << cfg.output_dir << "\n";
    return 0;
}

} // namespace

int cli_main(int argc, const char* const* argv) {
    CLI::App app{std::string(kToolName) +
                 " - customer baseline load and PTR settlement benchmark"};
    app.set_version_flag("--version", std::string(kToolVersion));
    app.require_subcommand(1);

    GenerateOptions gen;
    auto* gen_cmd = app.add_subcommand(
        "generate", "Write a synthetic interval dataset to CSV");
    gen_cmd->add_option("--customers", gen.synth.n_customers, "Number of customers");
    gen_cmd->add_option("--year", gen.synth.year, "Calendar year");
    gen_cmd->add_option("--seed", gen.synth.seed, "Generator seed");
    gen_cmd->add_option("--target-per-capita", gen.synth.target_per_capita,
                        "Mean hourly kWh per customer");
    gen_cmd->add_option("--noise-cv", gen.synth.noise_cv,
                        "Coefficient of variation of hourly noise");
    gen_cmd->add_option("--dispersion", gen.synth.customer_scale_dispersion,
                        "Coefficient of variation of customer scales");
    gen_cmd->add_option("--seasonal-amplitude", gen.synth.seasonal_amplitude,
                        "Amplitude of the two-hump seasonal factor");
    gen_cmd->add_option("--out", gen.out, "Output CSV path")->required();

    ValidateOptions val;
    auto* val_cmd =
        app.add_subcommand("validate", "Check an interval CSV for gaps and bad cells");
    val_cmd->add_option("--in", val.in, "Input CSV path")->required();

    BaselineOptions base;
    auto* base_cmd = app.add_subcommand(
        "baseline", "Dump one baseline curve as subject,event_day,slot,cbl_kwh");
    base_cmd->add_option("--in", base.in, "Input CSV path")->required();
    base_cmd->add_option("--method", base.method, "highxofy or rct");
    base_cmd->add_option("--event", base.event, "Event day (YYYY-MM-DD)")->required();
    base_cmd->add_option("--x", base.highxofy.x, "Days averaged");
    base_cmd->add_option("--y", base.highxofy.y, "Candidate window size");
    base_cmd->add_flag("--weekends,!--no-weekends", base.highxofy.include_weekends,
                       "Treat weekends as eligible history");
    base_cmd->add_option("--control-fraction", base.control_fraction,
                         "RCT control share");
    base_cmd->add_option("--split-seed", base.split_seed, "RCT split seed");
    base_cmd->add_option("--customer", base.customer, "Subject customer id");
    base_cmd->add_flag("--aggregate", base.aggregate_subject,
                       "Aggregate-level curve");
    base_cmd->add_option("--out", base.out, "Output path (default stdout)");

    RunOptions run;
    auto* run_cmd = app.add_subcommand("run", "Run the full experiment matrix");
    run_cmd->add_option("--config", run.config_path, "Experiment config JSON");
    run_cmd->add_option("--seed", run.seeds,
                        "Run seed(s); overrides the config seeds");
    run_cmd->add_option("--out", run.out, "Output directory");
    run_cmd->add_option("--workers", run.workers,
                        "Worker threads (0 = hardware, CBLBENCH_WORKERS caps)");
    run_cmd->add_option("--format", run.formats, "csv and/or json");

    ReportOptions rep;
    auto* rep_cmd = app.add_subcommand(
        "report", "Recompute and re-emit a bundle from its run manifest");
    rep_cmd->add_option("--manifest", rep.manifest_path, "Path to run.json")
        ->required();
    rep_cmd->add_option("--out", rep.out, "Output directory")->required();
    rep_cmd->add_option("--workers", rep.workers, "Worker threads");

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
        if (gen_cmd->parsed()) return run_generate(gen);
        if (val_cmd->parsed()) return run_validate(val);
        if (base_cmd->parsed()) return run_baseline(base);
        if (run_cmd->parsed()) return run_run(run);
        if (rep_cmd->parsed()) return run_report(rep);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}

} // namespace cbl

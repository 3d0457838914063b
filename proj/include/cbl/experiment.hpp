#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "cbl/baseline.hpp"
#include "cbl/dataset.hpp"
#include "cbl/metrics.hpp"
#include "cbl/settlement.hpp"
#include "cbl/synthgen.hpp"

namespace cbl {

enum class Method { highxofy, rct };

enum class OutputFormat { csv, json };

std::string method_name(Method m);
Method method_from_name(const std::string& name);
std::string mode_name(SettlementMode m);
SettlementMode mode_from_name(const std::string& name);

/// Explicit event schedule in a config file; absent means auto (one event
/// day per month, the monthly consumption maximum).
struct ScheduleSpec {
    std::vector<Date> event_days;
    SlotRange window{15, 21};
    std::vector<Date> holidays;
};

/// Full experiment matrix description. Everything that influences emitted
/// numbers lives here and is echoed into the run manifest; output_dir and
/// workers are execution parameters and deliberately excluded, so reruns
/// with different parallelism or destination are byte-identical.
struct ExperimentConfig {
    std::optional<std::string> csv_path; // ingest when set, else synthesize
    SynthConfig synth;
    std::vector<Method> methods{Method::highxofy, Method::rct};
    HighXofYConfig highxofy;
    std::vector<double> control_fractions{0.05, 0.10, 0.15, 0.20, 0.25};
    std::vector<SettlementMode> modes{SettlementMode::granular,
                                      SettlementMode::aggregated};
    std::optional<ScheduleSpec> schedule; // nullopt = auto
    TariffSchedule tariff;
    double lambda = 0.5;
    bool event_hours_only = true;
    std::vector<std::uint64_t> seeds{1};
    std::vector<OutputFormat> formats{OutputFormat::csv, OutputFormat::json};

    // Execution parameters (not part of the experiment identity).
    std::string output_dir = "./results";
    int workers = 0; // 0 = hardware concurrency; env CBLBENCH_WORKERS caps

    void validate() const; // throws ConfigError
    nlohmann::ordered_json to_json() const;
    static ExperimentConfig from_json(const nlohmann::json& j);
};

/// One evaluated cell of the matrix: (seed, method, control fraction, mode),
/// summarized over all event days.
struct CellResult {
    std::uint64_t seed = 0;
    Method method = Method::highxofy;
    double control_fraction = 0.0;
    SettlementMode mode = SettlementMode::granular;
    std::size_t control_count = 0;
    std::size_t treatment_count = 0;
    double treatment_kwh_per_capita = 0.0; // over event days, all hours
    MetricsReport metrics;                 // per capita in aggregated mode
    SettlementReport settlement;
};

struct ReportBundle {
    ExperimentConfig config;
    std::vector<CellResult> cells; // canonical (seed, method, fraction, mode)
};

/// Deterministic split seed for a (run seed, control fraction) pair; cells
/// never share RNG state, so dropping one fraction from the config cannot
/// change any other cell.
std::uint64_t split_seed_for(std::uint64_t run_seed, double control_fraction);

/// Runs the full matrix. Cells are evaluated concurrently (worker count from
/// config/environment) and reduced in canonical order, so the bundle is
/// independent of scheduling.
ReportBundle run_experiment(const ExperimentConfig& cfg);

} // namespace cbl

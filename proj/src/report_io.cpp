#include "cbl/report_io.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "cbl/csv_io.hpp"
#include "cbl/errors.hpp"
#include "cbl/version.hpp"

namespace cbl {

namespace {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

std::string pct(double fraction) { return format_double(fraction * 100.0); }

bool wants(const ExperimentConfig& cfg, OutputFormat f) {
    return std::find(cfg.formats.begin(), cfg.formats.end(), f) !=
           cfg.formats.end();
}

std::string manifest_json(const ReportBundle& bundle) {
    ordered_json j;
    j["schema_version"] = 1;
    j["tool"] = {{"name", kToolName}, {"version", kToolVersion}};
    j["config"] = bundle.config.to_json();
    return j.dump(2) + "\n";
}

// ---- metrics ----

const char* kMetricsHeader =
    "method,mode,control_pct,alpha,beta,opi,"
    "alpha_ci_lo,alpha_ci_hi,beta_ci_lo,beta_ci_hi,opi_ci_lo,opi_ci_hi,"
    "seed,treatment_count,treatment_kwh_per_capita";

std::string metrics_csv(const ReportBundle& bundle) {
    std::ostringstream out;
    out << kMetricsHeader << '\n';
    for (const auto& cell : bundle.cells) {
        const auto& m = cell.metrics;
        out << method_name(cell.method) << ',' << mode_name(cell.mode) << ','
            << pct(cell.control_fraction) << ',' << format_double(m.alpha)
            << ',' << format_double(m.beta) << ',' << format_double(m.opi)
            << ',' << format_double(m.alpha_ci.lo) << ','
            << format_double(m.alpha_ci.hi) << ','
            << format_double(m.beta_ci.lo) << ','
            << format_double(m.beta_ci.hi) << ','
            << format_double(m.opi_ci.lo) << ','
            << format_double(m.opi_ci.hi) << ',' << cell.seed << ','
            << cell.treatment_count << ','
            << format_double(cell.treatment_kwh_per_capita) << '\n';
    }
    return out.str();
}

ordered_json metrics_json(const ReportBundle& bundle) {
    ordered_json rows = ordered_json::array();
    for (const auto& cell : bundle.cells) {
        const auto& m = cell.metrics;
        rows.push_back({{"method", method_name(cell.method)},
                        {"mode", mode_name(cell.mode)},
                        {"control_pct", cell.control_fraction * 100.0},
                        {"alpha", m.alpha},
                        {"beta", m.beta},
                        {"opi", m.opi},
                        {"alpha_ci", {m.alpha_ci.lo, m.alpha_ci.hi}},
                        {"beta_ci", {m.beta_ci.lo, m.beta_ci.hi}},
                        {"opi_ci", {m.opi_ci.lo, m.opi_ci.hi}},
                        {"seed", cell.seed},
                        {"treatment_count", cell.treatment_count},
                        {"treatment_kwh_per_capita", cell.treatment_kwh_per_capita}});
    }
    return rows;
}

std::string metrics_days_csv(const ReportBundle& bundle) {
    std::ostringstream out;
    out << "method,mode,control_pct,event_day,alpha,beta,seed\n";
    for (const auto& cell : bundle.cells) {
        for (const auto& day : cell.metrics.per_day) {
            out << method_name(cell.method) << ',' << mode_name(cell.mode)
                << ',' << pct(cell.control_fraction) << ','
                << day.day.to_string() << ',' << format_double(day.alpha)
                << ',' << format_double(day.beta) << ',' << cell.seed << '\n';
        }
    }
    return out.str();
}

ordered_json metrics_days_json(const ReportBundle& bundle) {
    ordered_json rows = ordered_json::array();
    for (const auto& cell : bundle.cells) {
        for (const auto& day : cell.metrics.per_day) {
            rows.push_back({{"method", method_name(cell.method)},
                            {"mode", mode_name(cell.mode)},
                            {"control_pct", cell.control_fraction * 100.0},
                            {"event_day", day.day.to_string()},
                            {"alpha", day.alpha},
                            {"beta", day.beta},
                            {"seed", cell.seed}});
        }
    }
    return rows;
}

// ---- settlement ----

std::string settlement_csv(const ReportBundle& bundle) {
    std::ostringstream out;
    out << "method,mode,control_pct,event_day,flr_kwh,flr_pct,rebate_usd,"
           "revenue_usd,rebate_pct,seed\n";
    for (const auto& cell : bundle.cells) {
        for (const auto& day : cell.settlement.per_day) {
            out << method_name(cell.method) << ',' << mode_name(cell.mode)
                << ',' << pct(cell.control_fraction) << ','
                << day.day.to_string() << ',' << format_double(day.flr_kwh)
                << ',' << format_double(day.flr_pct) << ','
                << day.rebate.to_string() << ',' << day.revenue.to_string()
                << ',' << format_double(day.rebate_pct) << ',' << cell.seed
                << '\n';
        }
    }
    return out.str();
}

ordered_json settlement_json(const ReportBundle& bundle) {
    ordered_json rows = ordered_json::array();
    for (const auto& cell : bundle.cells) {
        for (const auto& day : cell.settlement.per_day) {
            rows.push_back({{"method", method_name(cell.method)},
                            {"mode", mode_name(cell.mode)},
                            {"control_pct", cell.control_fraction * 100.0},
                            {"event_day", day.day.to_string()},
                            {"flr_kwh", day.flr_kwh},
                            {"flr_pct", day.flr_pct},
                            {"rebate_usd", day.rebate.dollars()},
                            {"revenue_usd", day.revenue.dollars()},
                            {"rebate_pct", day.rebate_pct},
                            {"seed", cell.seed}});
        }
    }
    return rows;
}

std::string settlement_summary_csv(const ReportBundle& bundle) {
    std::ostringstream out;
    out << "method,mode,control_pct,flr_pct_mean,flr_pct_ci_lo,flr_pct_ci_hi,"
           "rebate_pct_mean,rebate_pct_ci_lo,rebate_pct_ci_hi,flr_kwh_total,"
           "consumption_kwh_total,rebate_usd_total,revenue_usd_total,"
           "flr_pct_pooled,rebate_pct_pooled,seed\n";
    for (const auto& cell : bundle.cells) {
        const auto& s = cell.settlement;
        out << method_name(cell.method) << ',' << mode_name(cell.mode) << ','
            << pct(cell.control_fraction) << ','
            << format_double(s.mean_flr_pct) << ','
            << format_double(s.flr_pct_ci.lo) << ','
            << format_double(s.flr_pct_ci.hi) << ','
            << format_double(s.mean_rebate_pct) << ','
            << format_double(s.rebate_pct_ci.lo) << ','
            << format_double(s.rebate_pct_ci.hi) << ','
            << format_double(s.total_flr_kwh) << ','
            << format_double(s.total_consumption_kwh) << ','
            << s.total_rebate.to_string() << ',' << s.total_revenue.to_string()
            << ',' << format_double(s.pooled_flr_pct) << ','
            << format_double(s.pooled_rebate_pct) << ',' << cell.seed << '\n';
    }
    return out.str();
}

ordered_json settlement_summary_json(const ReportBundle& bundle) {
    ordered_json rows = ordered_json::array();
    for (const auto& cell : bundle.cells) {
        const auto& s = cell.settlement;
        rows.push_back({{"method", method_name(cell.method)},
                        {"mode", mode_name(cell.mode)},
                        {"control_pct", cell.control_fraction * 100.0},
                        {"flr_pct_mean", s.mean_flr_pct},
                        {"flr_pct_ci", {s.flr_pct_ci.lo, s.flr_pct_ci.hi}},
                        {"rebate_pct_mean", s.mean_rebate_pct},
                        {"rebate_pct_ci", {s.rebate_pct_ci.lo, s.rebate_pct_ci.hi}},
                        {"flr_kwh_total", s.total_flr_kwh},
                        {"consumption_kwh_total", s.total_consumption_kwh},
                        {"rebate_usd_total", s.total_rebate.dollars()},
                        {"revenue_usd_total", s.total_revenue.dollars()},
                        {"flr_pct_pooled", s.pooled_flr_pct},
                        {"rebate_pct_pooled", s.pooled_rebate_pct},
                        {"seed", cell.seed}});
    }
    return rows;
}

// ---- figure data (bar value + CI whiskers per method x fraction) ----

struct FigureSpec {
    const char* name;
    SettlementMode mode;
    double (*value)(const CellResult&);
    Interval (*ci)(const CellResult&);
};

const FigureSpec kFigures[] = {
    {"granular_mae", SettlementMode::granular,
     [](const CellResult& c) { return c.metrics.alpha; },
     [](const CellResult& c) { return c.metrics.alpha_ci; }},
    {"granular_bias", SettlementMode::granular,
     [](const CellResult& c) { return c.metrics.beta; },
     [](const CellResult& c) { return c.metrics.beta_ci; }},
    {"granular_opi", SettlementMode::granular,
     [](const CellResult& c) { return c.metrics.opi; },
     [](const CellResult& c) { return c.metrics.opi_ci; }},
    {"aggregated_mae", SettlementMode::aggregated,
     [](const CellResult& c) { return c.metrics.alpha; },
     [](const CellResult& c) { return c.metrics.alpha_ci; }},
    {"aggregated_bias", SettlementMode::aggregated,
     [](const CellResult& c) { return c.metrics.beta; },
     [](const CellResult& c) { return c.metrics.beta_ci; }},
    {"aggregated_opi", SettlementMode::aggregated,
     [](const CellResult& c) { return c.metrics.opi; },
     [](const CellResult& c) { return c.metrics.opi_ci; }},
    {"granular_flr", SettlementMode::granular,
     [](const CellResult& c) { return c.settlement.mean_flr_pct; },
     [](const CellResult& c) { return c.settlement.flr_pct_ci; }},
    {"granular_rebate_share", SettlementMode::granular,
     [](const CellResult& c) { return c.settlement.mean_rebate_pct; },
     [](const CellResult& c) { return c.settlement.rebate_pct_ci; }},
    {"aggregated_flr", SettlementMode::aggregated,
     [](const CellResult& c) { return c.settlement.mean_flr_pct; },
     [](const CellResult& c) { return c.settlement.flr_pct_ci; }},
    {"aggregated_rebate_share", SettlementMode::aggregated,
     [](const CellResult& c) { return c.settlement.mean_rebate_pct; },
     [](const CellResult& c) { return c.settlement.rebate_pct_ci; }},
};

std::string figure_csv(const ReportBundle& bundle, const FigureSpec& fig) {
    std::ostringstream out;
    out << "method,control_pct,value,ci_lo,ci_hi,seed\n";
    for (const auto& cell : bundle.cells) {
        if (cell.mode != fig.mode) continue;
        const Interval ci = fig.ci(cell);
        out << method_name(cell.method) << ',' << pct(cell.control_fraction)
            << ',' << format_double(fig.value(cell)) << ','
            << format_double(ci.lo) << ',' << format_double(ci.hi) << ','
            << cell.seed << '\n';
    }
    return out.str();
}

ordered_json figure_json(const ReportBundle& bundle, const FigureSpec& fig) {
    ordered_json rows = ordered_json::array();
    for (const auto& cell : bundle.cells) {
        if (cell.mode != fig.mode) continue;
        const Interval ci = fig.ci(cell);
        rows.push_back({{"method", method_name(cell.method)},
                        {"control_pct", cell.control_fraction * 100.0},
                        {"value", fig.value(cell)},
                        {"ci", {ci.lo, ci.hi}},
                        {"seed", cell.seed}});
    }
    return rows;
}

bool mode_configured(const ExperimentConfig& cfg, SettlementMode m) {
    return std::find(cfg.modes.begin(), cfg.modes.end(), m) != cfg.modes.end();
}

} // namespace

std::map<std::string, std::string> render_report(const ReportBundle& bundle) {
    std::map<std::string, std::string> files;
    files["run.json"] = manifest_json(bundle);

    if (wants(bundle.config, OutputFormat::csv)) {
        files["metrics.csv"] = metrics_csv(bundle);
        files["metrics_days.csv"] = metrics_days_csv(bundle);
        files["settlement.csv"] = settlement_csv(bundle);
        files["settlement_summary.csv"] = settlement_summary_csv(bundle);
        for (const auto& fig : kFigures) {
            if (!mode_configured(bundle.config, fig.mode)) continue;
            files[std::string("figures/") + fig.name + ".csv"] =
                figure_csv(bundle, fig);
        }
    }
    if (wants(bundle.config, OutputFormat::json)) {
        files["metrics.json"] = metrics_json(bundle).dump(2) + "\n";
        files["metrics_days.json"] = metrics_days_json(bundle).dump(2) + "\n";
        files["settlement.json"] = settlement_json(bundle).dump(2) + "\n";
        files["settlement_summary.json"] =
            settlement_summary_json(bundle).dump(2) + "\n";
        for (const auto& fig : kFigures) {
            if (!mode_configured(bundle.config, fig.mode)) continue;
            files[std::string("figures/") + fig.name + ".json"] =
                figure_json(bundle, fig).dump(2) + "\n";
        }
    }
    return files;
}

void write_file_atomic(const fs::path& path, const std::string& content) {
    std::error_code ec;
    if (path.has_parent_path()) {
        fs::create_directories(path.parent_path(), ec);
        if (ec) {
            throw EmissionError("cannot create directory " +
                                path.parent_path().string() + ": " + ec.message());
        }
    }
    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw EmissionError("cannot open " + tmp.string());
        out.write(content.data(),
                  static_cast<std::streamsize>(content.size()));
        out.flush();
        if (!out) {
            fs::remove(tmp, ec);
            throw EmissionError("short write to " + tmp.string());
        }
    }
    fs::rename(tmp, path, ec);
    if (ec) {
        fs::remove(tmp, ec);
        throw EmissionError("cannot move " + tmp.string() + " into place: " +
                            ec.message());
    }
}

void emit_report(const ReportBundle& bundle, const fs::path& output_dir) {
    const auto files = render_report(bundle);
    for (const auto& [rel, content] : files) {
        write_file_atomic(output_dir / rel, content);
    }
}

} // namespace cbl

#include "cbl/csv_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <istream>
#include <limits>
#include <ostream>
#include <unordered_map>

#include "cbl/errors.hpp"

namespace cbl {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::size_t start = 0;
    for (;;) {
        const std::size_t comma = line.find(',', start);
        if (comma == std::string::npos) {
            fields.push_back(line.substr(start));
            return fields;
        }
        fields.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
}

bool read_line(std::istream& in, std::string& line) {
    if (!std::getline(in, line)) return false;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return true;
}

double parse_value(const std::string& field, std::size_t row) {
    double v = 0.0;
    const auto [ptr, ec] =
        std::from_chars(field.data(), field.data() + field.size(), v);
    if (ec != std::errc() || ptr != field.data() + field.size()) {
        throw ParseError(row, "unparsable number '" + field + "'");
    }
    if (!std::isfinite(v)) {
        throw ParseError(row, "non-finite value '" + field + "'");
    }
    return v;
}

/// Parses data rows; the header (row 1) must already be consumed.
LoadDataset parse_rows(std::istream& in, const IntervalLayout& layout) {
    const int n_columns =
        std::max({layout.customer_column, layout.date_column,
                  layout.first_value_column + layout.n_values - 1}) + 1;

    struct Row {
        int customer;
        Date date;
        std::vector<double> values;
    };
    std::vector<Row> rows;
    std::vector<CustomerId> customers;
    std::unordered_map<CustomerId, int> customer_index;
    std::unordered_map<std::int64_t, std::size_t> seen; // (customer, date) -> row no
    Date min_day, max_day;
    bool any = false;

    std::string line;
    std::size_t row_no = 1;
    while (read_line(in, line)) {
        ++row_no;
        if (line.empty()) continue;
        const auto fields = split_csv_line(line);
        if (static_cast<int>(fields.size()) != n_columns) {
            throw ParseError(row_no, "expected " + std::to_string(n_columns) +
                                         " columns, got " +
                                         std::to_string(fields.size()));
        }
        const std::string& id = fields[layout.customer_column];
        if (id.empty()) throw ParseError(row_no, "empty customer id");
        const auto date = Date::try_parse(fields[layout.date_column]);
        if (!date) {
            throw ParseError(row_no, "unparsable date '" +
                                         fields[layout.date_column] + "'");
        }

        auto [it, inserted] =
            customer_index.emplace(id, static_cast<int>(customers.size()));
        if (inserted) customers.push_back(id);
        const int ci = it->second;

        const std::int64_t key = (static_cast<std::int64_t>(ci) << 32) |
                                 static_cast<std::uint32_t>(date->serial());
        if (auto [dup, fresh] = seen.emplace(key, row_no); !fresh) {
            throw DuplicateRowError(row_no, "duplicate customer '" + id +
                                                "' on " + date->to_string() +
                                                " (first at row " +
                                                std::to_string(dup->second) + ")");
        }

        Row row{ci, *date, {}};
        row.values.reserve(layout.n_values);
        for (int j = 0; j < layout.n_values; ++j) {
            row.values.push_back(
                parse_value(fields[layout.first_value_column + j], row_no));
        }
        rows.push_back(std::move(row));
        if (!any || *date < min_day) min_day = *date;
        if (!any || *date > max_day) max_day = *date;
        any = true;
    }
    if (!any) throw ParseError(row_no, "no data rows");

    const int n_days = (max_day - min_day) + 1;
    std::vector<double> readings(customers.size() *
                                     static_cast<std::size_t>(n_days) *
                                     layout.n_values,
                                 std::numeric_limits<double>::quiet_NaN());
    for (const auto& row : rows) {
        const std::size_t base =
            (static_cast<std::size_t>(row.customer) * n_days +
             (row.date - min_day)) *
            layout.n_values;
        std::copy(row.values.begin(), row.values.end(), readings.begin() + base);
    }
    return LoadDataset(std::move(customers), min_day, n_days, layout.n_values,
                       std::move(readings));
}

} // namespace

IntervalLayout IntervalLayout::from_header(const std::string& header_line) {
    const auto fields = split_csv_line(header_line);
    if (fields.size() < 3) {
        throw ParseError(1, "header needs customer, date and value columns");
    }
    IntervalLayout layout;
    layout.customer_column = 0;
    layout.date_column = 1;
    layout.first_value_column = 2;
    layout.n_values = static_cast<int>(fields.size()) - 2;
    layout.validate();
    return layout;
}

void IntervalLayout::validate() const {
    if (customer_column < 0 || date_column < 0 || first_value_column < 0) {
        throw ConfigError("layout columns must be non-negative");
    }
    if (customer_column == date_column) {
        throw ConfigError("customer and date columns coincide");
    }
    if (n_values != 24 && n_values != 48) {
        throw ConfigError("interval layout supports 24 or 48 value columns, got " +
                          std::to_string(n_values));
    }
}

LoadDataset parse_interval_csv(std::istream& in, const IntervalLayout& layout) {
    layout.validate();
    std::string header;
    if (!read_line(in, header)) throw ParseError(1, "missing header row");
    return parse_rows(in, layout);
}

LoadDataset parse_interval_csv(std::istream& in) {
    std::string header;
    if (!read_line(in, header)) throw ParseError(1, "missing header row");
    return parse_rows(in, IntervalLayout::from_header(header));
}

void write_interval_csv(const LoadDataset& d, std::ostream& out) {
    out << "customer_id,date";
    char col[16];
    for (int t = 0; t < d.slots_per_day(); ++t) {
        std::snprintf(col, sizeof(col), ",v%02d", t);
        out << col;
    }
    out << '\n';
    for (std::size_t c = 0; c < d.n_customers(); ++c) {
        for (int di = 0; di < d.n_days(); ++di) {
            out << d.customers()[c] << ',' << d.day_at(di).to_string();
            for (double v : d.day(static_cast<int>(c), di)) {
                out << ',' << format_double(v);
            }
            out << '\n';
        }
    }
}

std::string format_double(double v) {
    char buf[40];
    for (int prec = 15; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
        if (std::strtod(buf, nullptr) == v) return buf;
    }
    return buf;
}

} // namespace cbl

#pragma once

#include <iosfwd>
#include <string>

#include "cbl/dataset.hpp"

namespace cbl {

/// Column positions of a wide interval CSV (one row per customer-day).
struct IntervalLayout {
    int customer_column = 0;
    int date_column = 1;
    int first_value_column = 2;
    int n_values = 24; // 24 or 48

    /// Derives the layout from a `customer_id,date,v00,...` header line.
    static IntervalLayout from_header(const std::string& header_line);
    void validate() const; // throws ConfigError
};

/// Parses wide interval CSV. Row order does not affect the result; the
/// customer order is first appearance, days span min..max date seen.
/// Throws ParseError / DuplicateRowError with the offending row number.
LoadDataset parse_interval_csv(std::istream& in, const IntervalLayout& layout);

/// Same, with the layout sniffed from the header row.
LoadDataset parse_interval_csv(std::istream& in);

/// Emits `customer_id,date,v00,...` rows, customer-major then day order.
/// Values round-trip exactly through parse_interval_csv.
void write_interval_csv(const LoadDataset& d, std::ostream& out);

/// Shortest decimal string that parses back to exactly the same double.
std::string format_double(double v);

} // namespace cbl

#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace cbl {

/// Civil calendar date stored as a day count since 1970-01-01.
/// Cheap to copy and compare; conversions go through std::chrono.
class Date {
public:
    Date() = default;
    explicit Date(std::int32_t serial) : serial_(serial) {}

    static Date from_ymd(int year, unsigned month, unsigned day);
    /// Parses strict ISO-8601 `YYYY-MM-DD`; throws ParseError otherwise.
    static Date parse(std::string_view iso);
    static std::optional<Date> try_parse(std::string_view iso);

    std::int32_t serial() const { return serial_; }
    int year() const;
    unsigned month() const;  // 1..12
    unsigned day() const;    // 1..31
    unsigned weekday() const; // 0 = Sunday .. 6 = Saturday
    bool is_weekend() const;

    std::string to_string() const; // YYYY-MM-DD

    Date operator+(int days) const { return Date(serial_ + days); }
    Date operator-(int days) const { return Date(serial_ - days); }
    Date& operator++() { ++serial_; return *this; }
    friend int operator-(Date a, Date b) { return a.serial_ - b.serial_; }
    auto operator<=>(const Date&) const = default;

private:
    std::int32_t serial_ = 0;
};

} // namespace cbl

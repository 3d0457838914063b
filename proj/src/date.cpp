#include "cbl/date.hpp"

#include <charconv>
#include <chrono>

#include "cbl/errors.hpp"

namespace cbl {

namespace {

std::chrono::year_month_day to_ymd(std::int32_t serial) {
    return std::chrono::year_month_day(
        std::chrono::sys_days(std::chrono::days(serial)));
}

} // namespace

Date Date::from_ymd(int year, unsigned month, unsigned day) {
    const std::chrono::year_month_day ymd{std::chrono::year(year),
                                          std::chrono::month(month),
                                          std::chrono::day(day)};
    if (!ymd.ok()) {
        throw ParseError("invalid calendar date " + std::to_string(year) + "-" +
                         std::to_string(month) + "-" + std::to_string(day));
    }
    return Date(static_cast<std::int32_t>(
        std::chrono::sys_days(ymd).time_since_epoch().count()));
}

Date Date::parse(std::string_view iso) {
    auto date = try_parse(iso);
    if (!date) {
        throw ParseError("unparsable date '" + std::string(iso) +
                         "' (expected YYYY-MM-DD)");
    }
    return *date;
}

std::optional<Date> Date::try_parse(std::string_view iso) {
    if (iso.size() != 10 || iso[4] != '-' || iso[7] != '-') return std::nullopt;
    int y = 0;
    unsigned m = 0, d = 0;
    auto num = [](std::string_view s, auto& out) {
        auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
        return ec == std::errc() && ptr == s.data() + s.size();
    };
    if (!num(iso.substr(0, 4), y) || !num(iso.substr(5, 2), m) ||
        !num(iso.substr(8, 2), d)) {
        return std::nullopt;
    }
    const std::chrono::year_month_day ymd{std::chrono::year(y),
                                          std::chrono::month(m),
                                          std::chrono::day(d)};
    if (!ymd.ok()) return std::nullopt;
    return Date(static_cast<std::int32_t>(
        std::chrono::sys_days(ymd).time_since_epoch().count()));
}

int Date::year() const { return static_cast<int>(to_ymd(serial_).year()); }

unsigned Date::month() const { return static_cast<unsigned>(to_ymd(serial_).month()); }

unsigned Date::day() const { return static_cast<unsigned>(to_ymd(serial_).day()); }

unsigned Date::weekday() const {
    return std::chrono::weekday(std::chrono::sys_days(std::chrono::days(serial_)))
        .c_encoding();
}

bool Date::is_weekend() const {
    const unsigned wd = weekday();
    return wd == 0 || wd == 6;
}

std::string Date::to_string() const {
    const auto ymd = to_ymd(serial_);
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04d-%02u-%02u",
                  static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()),
                  static_cast<unsigned>(ymd.day()));
    return buf;
}

} // namespace cbl

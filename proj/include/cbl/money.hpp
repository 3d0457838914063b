#pragma once

#include <cmath>
#include <compare>
#include <cstdint>
#include <cstdio>
#include <string>

namespace cbl {

/// Currency amount in integer micro-dollars. Sums of Money are exact, so
/// settlement identities hold bit-for-bit across any accumulation order.
class Money {
public:
    Money() = default;

    static Money from_micros(std::int64_t micros) { return Money(micros); }
    /// Nearest-micro rounding; used once per record, never inside sums.
    static Money from_dollars(double dollars) {
        return Money(std::llround(dollars * 1e6));
    }

    std::int64_t micros() const { return micros_; }
    double dollars() const { return static_cast<double>(micros_) * 1e-6; }

    Money& operator+=(Money other) {
        micros_ += other.micros_;
        return *this;
    }
    friend Money operator+(Money a, Money b) { return Money(a.micros_ + b.micros_); }
    friend Money operator-(Money a, Money b) { return Money(a.micros_ - b.micros_); }
    auto operator<=>(const Money&) const = default;

    std::string to_string() const {
        const std::int64_t a = micros_ < 0 ? -micros_ : micros_;
        char buf[40];
        std::snprintf(buf, sizeof(buf), "%s%lld.%06lld", micros_ < 0 ? "-" : "",
                      static_cast<long long>(a / 1000000),
                      static_cast<long long>(a % 1000000));
        return buf;
    }

private:
    explicit Money(std::int64_t micros) : micros_(micros) {}
    std::int64_t micros_ = 0;
};

} // namespace cbl

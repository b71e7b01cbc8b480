#pragma once

#include <chrono>
#include <compare>
#include <set>
#include <string>
#include <string_view>

namespace wheelhouse {

// Calendar date with day resolution. Stored as days since the Unix epoch.
class Date {
public:
    constexpr Date() = default;
    constexpr explicit Date(std::chrono::sys_days days) : days_(days) {}
    Date(int year, unsigned month, unsigned day);

    // Strict "YYYY-MM-DD"; throws DataError otherwise.
    static Date parse(std::string_view text);

    std::string to_string() const;

    std::chrono::sys_days sys_days() const { return days_; }
    std::chrono::year_month_day ymd() const { return std::chrono::year_month_day{days_}; }
    int year() const { return static_cast<int>(ymd().year()); }
    unsigned month() const { return static_cast<unsigned>(ymd().month()); }
    unsigned day() const { return static_cast<unsigned>(ymd().day()); }
    long serial() const { return days_.time_since_epoch().count(); }

    // 0 = Sunday ... 6 = Saturday
    unsigned weekday() const { return std::chrono::weekday{days_}.c_encoding(); }
    bool is_weekend() const { return weekday() == 0 || weekday() == 6; }

    Date operator+(int n) const { return Date{days_ + std::chrono::days{n}}; }
    Date operator-(int n) const { return Date{days_ - std::chrono::days{n}}; }
    int operator-(const Date& other) const {
        return static_cast<int>((days_ - other.days_).count());
    }
    Date add_months(int n) const;

    friend auto operator<=>(const Date&, const Date&) = default;

private:
    std::chrono::sys_days days_{};
};

// Weekday calendar with an optional user-supplied holiday list.
class TradingCalendar {
public:
    TradingCalendar() = default;
    explicit TradingCalendar(std::set<Date> holidays) : holidays_(std::move(holidays)) {}

    // One ISO date per line; blank lines and '#' comments ignored.
    static TradingCalendar from_holiday_file(const std::string& path);

    bool is_trading_day(Date d) const { return !d.is_weekend() && !holidays_.contains(d); }

    // The date n trading days before d (d itself not counted).
    Date subtract_trading_days(Date d, int n) const;

    // Trading days strictly between a and b.
    int trading_days_between(Date a, Date b) const;

    const std::set<Date>& holidays() const { return holidays_; }

private:
    std::set<Date> holidays_;
};

}  // namespace wheelhouse

#include "wheelhouse/date.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>

#include "wheelhouse/error.hpp"

namespace wheelhouse {

namespace {

template <class T>
bool parse_digits(std::string_view s, T& out) {
    for (char c : s)
        if (c < '0' || c > '9') return false;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc{} && ptr == s.data() + s.size();
}

}  // namespace

Date::Date(int year, unsigned month, unsigned day) {
    std::chrono::year_month_day ymd{std::chrono::year{year}, std::chrono::month{month},
                                    std::chrono::day{day}};
    if (!ymd.ok()) throw DataError("invalid calendar date");
    days_ = std::chrono::sys_days{ymd};
}

Date Date::parse(std::string_view text) {
    int y = 0;
    unsigned m = 0, d = 0;
    if (text.size() != 10 || text[4] != '-' || text[7] != '-' ||
        !parse_digits(text.substr(0, 4), y) || !parse_digits(text.substr(5, 2), m) ||
        !parse_digits(text.substr(8, 2), d)) {
        throw DataError("malformed date '" + std::string(text) + "' (expected YYYY-MM-DD)");
    }
    std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{m},
                                    std::chrono::day{d}};
    if (!ymd.ok()) throw DataError("invalid calendar date '" + std::string(text) + "'");
    return Date{std::chrono::sys_days{ymd}};
}

std::string Date::to_string() const {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", year(), month(), day());
    return buf;
}

Date Date::add_months(int n) const {
    auto ymd = this->ymd();
    auto shifted = ymd.year() / ymd.month() / std::chrono::day{1} + std::chrono::months{n};
    auto last = std::chrono::year_month_day_last{shifted.year(), std::chrono::month_day_last{shifted.month()}};
    auto day = std::min(ymd.day(), last.day());
    return Date{std::chrono::sys_days{shifted.year() / shifted.month() / day}};
}

TradingCalendar TradingCalendar::from_holiday_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open holiday file " + path);
    std::set<Date> holidays;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        auto start = line.find_first_not_of(" \t\r");
        if (start == std::string::npos || line[start] == '#') continue;
        auto end = line.find_last_not_of(" \t\r");
        try {
            holidays.insert(Date::parse(std::string_view(line).substr(start, end - start + 1)));
        } catch (const DataError& e) {
            throw DataError(path + ":" + std::to_string(line_no) + ": " + e.what());
        }
    }
    return TradingCalendar{std::move(holidays)};
}

Date TradingCalendar::subtract_trading_days(Date d, int n) const {
    while (n > 0) {
        d = d - 1;
        if (is_trading_day(d)) --n;
    }
    return d;
}

int TradingCalendar::trading_days_between(Date a, Date b) const {
    if (b < a) std::swap(a, b);
    int count = 0;
    for (Date d = a + 1; d < b; d = d + 1)
        if (is_trading_day(d)) ++count;
    return count;
}

}  // namespace wheelhouse

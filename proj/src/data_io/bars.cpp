#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "wheelhouse/data_io.hpp"
#include "wheelhouse/error.hpp"

namespace wheelhouse {

namespace {

std::vector<std::string_view> split(std::string_view line, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(sep, start);
        out.push_back(line.substr(start, pos == std::string_view::npos ? pos : pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

double number(std::string_view field, const std::string& where, const char* column) {
    double v = 0.0;
    const auto* end = field.data() + field.size();
    const auto [ptr, ec] = std::from_chars(field.data(), end, v);
    if (ec != std::errc{} || ptr != end || field.empty())
        throw DataError(where + ": column " + column + " is not a number: '" + std::string(field) + "'");
    return v;
}

// Shortest round-trip digits, fixed notation when it fits.
std::string shortest(double v) {
    char buf[512];
    auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed);
    if (res.ec != std::errc()) res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

}  // namespace

std::optional<std::size_t> BarSeries::index_on_or_before(Date d) const {
    const auto it = std::upper_bound(bars.begin(), bars.end(), d, [](Date x, const Bar& b) { return x < b.date; });
    if (it == bars.begin()) return std::nullopt;
    return static_cast<std::size_t>(it - bars.begin()) - 1;
}

std::optional<std::size_t> BarSeries::index_on_or_after(Date d) const {
    const auto it = std::lower_bound(bars.begin(), bars.end(), d, [](const Bar& b, Date x) { return b.date < x; });
    if (it == bars.end()) return std::nullopt;
    return static_cast<std::size_t>(it - bars.begin());
}

BarSeries parse_bars(std::istream& in, std::string ticker, const std::string& source,
                     const TradingCalendar& calendar) {
    BarSeries series;
    series.ticker = std::move(ticker);
    std::string line;
    std::size_t line_no = 0;
    if (!std::getline(in, line)) throw DataError(source + ": empty file");
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != kBarHeader)
        throw DataError(source + ":1: header must be '" + std::string(kBarHeader) + "', got '" + line + "'");

    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto where = source + ":" + std::to_string(line_no);
        const auto fields = split(line, ',');
        if (fields.size() != 7)
            throw DataError(where + ": expected 7 fields, found " + std::to_string(fields.size()));
        Bar b;
        try {
            b.date = Date::parse(fields[0]);
        } catch (const DataError& e) {
            throw DataError(where + ": " + e.what());
        }
        b.open = number(fields[1], where, "open");
        b.high = number(fields[2], where, "high");
        b.low = number(fields[3], where, "low");
        b.close = number(fields[4], where, "close");
        b.adj_close = number(fields[5], where, "adj_close");
        b.volume = number(fields[6], where, "volume");
        for (auto [value, name] : {std::pair{b.open, "open"}, std::pair{b.high, "high"}, std::pair{b.low, "low"},
                                   std::pair{b.close, "close"}, std::pair{b.adj_close, "adj_close"}})
            if (!(value > 0.0)) throw DataError(where + ": " + name + " must be positive, got " + shortest(value));
        if (!(b.volume >= 0.0)) throw DataError(where + ": volume must be non-negative");
        if (b.high < b.low) throw DataError(where + ": high below low");
        if (!series.bars.empty()) {
            const Date prev = series.bars.back().date;
            if (b.date == prev) throw DataError(where + ": duplicate date " + b.date.to_string());
            if (b.date < prev)
                throw DataError(where + ": date " + b.date.to_string() + " precedes " + prev.to_string());
            for (Date d = prev + 1; d < b.date; d = d + 1)
                if (calendar.is_trading_day(d)) series.missing_days.push_back(d);
        }
        series.bars.push_back(b);
    }
    return series;
}

BarSeries load_bars(const fs::path& path, std::string ticker, const TradingCalendar& calendar) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open bar file " + path.string());
    if (ticker.empty()) ticker = path.stem().string();
    return parse_bars(in, std::move(ticker), path.string(), calendar);
}

std::string bars_csv(const BarSeries& series) {
    std::ostringstream out;
    out << kBarHeader << "\n";
    for (const auto& b : series.bars)
        out << b.date.to_string() << "," << shortest(b.open) << "," << shortest(b.high) << "," << shortest(b.low)
            << "," << shortest(b.close) << "," << shortest(b.adj_close) << "," << shortest(b.volume) << "\n";
    return out.str();
}

void write_bars(const fs::path& path, const BarSeries& series) { write_text_file(path, bars_csv(series)); }

void write_text_file(const fs::path& path, const std::string& content) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw DataError("cannot write " + tmp.string());
        out << content;
        if (!out.flush()) throw DataError("write failed for " + tmp.string());
    }
    fs::rename(tmp, path);
}

std::string read_text_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

}  // namespace wheelhouse

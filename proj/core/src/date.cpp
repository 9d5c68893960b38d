#include "edgar/date.hpp"

#include <charconv>
#include <cstdio>

namespace edgar {

namespace {

std::optional<int> parse_digits(std::string_view text)
{
    if (text.empty()) {
        return std::nullopt;
    }
    for (char c : text) {
        if (c < '0' || c > '9') {
            return std::nullopt;
        }
    }
    int value = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size()) {
        return std::nullopt;
    }
    return value;
}

std::optional<Date> make_date(std::optional<int> y, std::optional<int> m, std::optional<int> d)
{
    if (!y || !m || !d) {
        return std::nullopt;
    }
    Date date{std::chrono::year{*y}, std::chrono::month{static_cast<unsigned>(*m)},
              std::chrono::day{static_cast<unsigned>(*d)}};
    if (!date.ok()) {
        return std::nullopt;
    }
    return date;
}

} // namespace

std::optional<Date> parse_iso_date(std::string_view text)
{
    if (text.size() != 10 || text[4] != '-' || text[7] != '-') {
        return std::nullopt;
    }
    return make_date(parse_digits(text.substr(0, 4)), parse_digits(text.substr(5, 2)), parse_digits(text.substr(8, 2)));
}

std::optional<Date> parse_flexible_date(std::string_view text)
{
    if (auto iso = parse_iso_date(text)) {
        return iso;
    }
    if (text.size() == 8 && text.find('/') == std::string_view::npos) {
        return make_date(parse_digits(text.substr(0, 4)), parse_digits(text.substr(4, 2)),
                         parse_digits(text.substr(6, 2)));
    }
    const auto first = text.find('/');
    const auto second = first == std::string_view::npos ? first : text.find('/', first + 1);
    if (second == std::string_view::npos) {
        return std::nullopt;
    }
    const auto month = text.substr(0, first);
    const auto day = text.substr(first + 1, second - first - 1);
    const auto year_text = text.substr(second + 1);
    if (month.empty() || month.size() > 2 || day.empty() || day.size() > 2) {
        return std::nullopt;
    }
    auto year = parse_digits(year_text);
    if (!year) {
        return std::nullopt;
    }
    if (year_text.size() == 2) {
        *year += *year < 70 ? 2000 : 1900;
    } else if (year_text.size() != 4) {
        return std::nullopt;
    }
    return make_date(year, parse_digits(month), parse_digits(day));
}

std::string to_iso(const Date& date)
{
    char buffer[16];
    std::snprintf(buffer, sizeof buffer, "%04d-%02u-%02u", static_cast<int>(date.year()),
                  static_cast<unsigned>(date.month()), static_cast<unsigned>(date.day()));
    return buffer;
}

Date utc_today()
{
    return Date{std::chrono::floor<std::chrono::days>(std::chrono::system_clock::now())};
}

} // namespace edgar

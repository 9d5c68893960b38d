#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <string_view>

namespace edgar {

using Date = std::chrono::year_month_day;

/// "YYYY-MM-DD"
std::optional<Date> parse_iso_date(std::string_view text);

/// Accepts "YYYY-MM-DD", "MM/DD/YYYY", "MM/DD/YY" (YY < 70 maps to 20YY) and
/// "YYYYMMDD". Returns nullopt unless the result is a real calendar date.
std::optional<Date> parse_flexible_date(std::string_view text);

std::string to_iso(const Date& date);

/// Today's civil date in UTC.
Date utc_today();

} // namespace edgar

#pragma once

#include <chrono>
#include <cstdint>
#include <string>
#include <string_view>

namespace mfwind::core {

using Date = std::chrono::sys_days;

/// Minutes since 1970-01-01T00:00 (UTC, no leap seconds).
using MinuteStamp = std::int64_t;

Date make_date(int year, unsigned month, unsigned day);

/// Parses "YYYY-MM-DD".
Date parse_date(std::string_view text);

/// Accepts "YYYY-MM-DD HH:MM[:SS]", "YYYY-MM-DDTHH:MM[:SS]", "YYYYMMDDHHMM" and
/// "YYYY-MM-DD" (midnight). Throws std::invalid_argument on anything else.
MinuteStamp parse_timestamp(std::string_view text);

Date day_of(MinuteStamp stamp);
MinuteStamp to_minutes(Date day);

std::string format_date(Date day);

}  // namespace mfwind::core

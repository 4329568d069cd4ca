#include "mfwind/core/calendar.hpp"

#include <charconv>
#include <cstdio>
#include <stdexcept>

namespace mfwind::core {

namespace {

int parse_int(std::string_view text, std::size_t pos, std::size_t len, std::string_view whole) {
	if (pos + len > text.size()) {
		throw std::invalid_argument("malformed date/time: '" + std::string(whole) + "'");
	}
	int value = 0;
	const char* first = text.data() + pos;
	const char* last = first + len;
	auto [ptr, ec] = std::from_chars(first, last, value);
	if (ec != std::errc{} || ptr != last) {
		throw std::invalid_argument("malformed date/time: '" + std::string(whole) + "'");
	}
	return value;
}

}  // namespace

Date make_date(int year, unsigned month, unsigned day) {
	const std::chrono::year_month_day ymd{std::chrono::year{year}, std::chrono::month{month},
	                                      std::chrono::day{day}};
	if (!ymd.ok()) {
		throw std::invalid_argument("invalid calendar date");
	}
	return Date{ymd};
}

Date parse_date(std::string_view text) {
	if (text.size() != 10 || text[4] != '-' || text[7] != '-') {
		throw std::invalid_argument("malformed date: '" + std::string(text) + "'");
	}
	return make_date(parse_int(text, 0, 4, text), static_cast<unsigned>(parse_int(text, 5, 2, text)),
	                 static_cast<unsigned>(parse_int(text, 8, 2, text)));
}

MinuteStamp parse_timestamp(std::string_view text) {
	int year = 0;
	unsigned month = 0;
	unsigned day = 0;
	int hour = 0;
	int minute = 0;
	if (text.size() == 12 && text.find('-') == std::string_view::npos) {
		year = parse_int(text, 0, 4, text);
		month = static_cast<unsigned>(parse_int(text, 4, 2, text));
		day = static_cast<unsigned>(parse_int(text, 6, 2, text));
		hour = parse_int(text, 8, 2, text);
		minute = parse_int(text, 10, 2, text);
	} else {
		if (text.size() < 10 || text[4] != '-' || text[7] != '-') {
			throw std::invalid_argument("malformed timestamp: '" + std::string(text) + "'");
		}
		year = parse_int(text, 0, 4, text);
		month = static_cast<unsigned>(parse_int(text, 5, 2, text));
		day = static_cast<unsigned>(parse_int(text, 8, 2, text));
		if (text.size() > 10) {
			if ((text[10] != ' ' && text[10] != 'T') || text.size() < 16 || text[13] != ':') {
				throw std::invalid_argument("malformed timestamp: '" + std::string(text) + "'");
			}
			hour = parse_int(text, 11, 2, text);
			minute = parse_int(text, 14, 2, text);
			if (text.size() > 16) {
				if (text.size() != 19 || text[16] != ':') {
					throw std::invalid_argument("malformed timestamp: '" + std::string(text) + "'");
				}
				parse_int(text, 17, 2, text);
			}
		}
	}
	if (hour < 0 || hour > 23 || minute < 0 || minute > 59) {
		throw std::invalid_argument("time of day out of range: '" + std::string(text) + "'");
	}
	return to_minutes(make_date(year, month, day)) + hour * 60 + minute;
}

Date day_of(MinuteStamp stamp) {
	auto days = stamp / 1440;
	if (stamp % 1440 < 0) {
		--days;
	}
	return Date{std::chrono::days{days}};
}

MinuteStamp to_minutes(Date day) {
	return static_cast<MinuteStamp>(day.time_since_epoch().count()) * 1440;
}

std::string format_date(Date day) {
	const std::chrono::year_month_day ymd{day};
	char buf[16];
	std::snprintf(buf, sizeof(buf), "%04d-%02u-%02u", static_cast<int>(ymd.year()),
	              static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
	return buf;
}

}  // namespace mfwind::core

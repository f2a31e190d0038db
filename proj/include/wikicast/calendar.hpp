#pragma once

#include <chrono>
#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

namespace wikicast {

/// UTC calendar day. No time-zone conversion is ever applied.
using Date = std::chrono::sys_days;

/// Parses `YYYY-MM-DD`. Throws InputError on malformed or impossible dates.
Date parse_date(std::string_view iso);

/// `YYYY-MM-DD`
std::string format_date(Date d);

/// `YYYYMMDD`, as used in pagecount file names.
std::string format_compact_date(Date d);

/// Day of week, 0 = Sunday.
int weekday_index(Date d);

/// First day of the following month on the same day-of-month; throws if
/// that day does not exist in the next month.
Date add_month(Date d);

inline Date add_days(Date d, std::int64_t days) { return d + std::chrono::days{days}; }

inline std::int64_t days_between(Date from, Date to) { return (to - from).count(); }

/// One UTC hour of one day; the unit of a pagecount file.
struct HourStamp {
    Date date{};
    int hour = 0;  // 0..23

    /// Hours since the Unix epoch.
    std::int64_t index() const { return date.time_since_epoch().count() * 24 + hour; }

    static HourStamp from_index(std::int64_t index);

    HourStamp advanced(std::int64_t hours) const { return from_index(index() + hours); }

    friend bool operator==(const HourStamp&, const HourStamp&) = default;
    friend auto operator<=>(const HourStamp& a, const HourStamp& b) { return a.index() <=> b.index(); }
};

/// `YYYYMMDD-HH`
std::string format_hour(HourStamp h);
HourStamp parse_hour(std::string_view text);

/// Inclusive date range.
struct DateWindow {
    Date first{};
    Date last{};

    bool contains(Date d) const { return d >= first && d <= last; }
    std::int64_t days() const { return days_between(first, last) + 1; }
};

} // namespace wikicast

#include "wikicast/calendar.hpp"

#include "wikicast/errors.hpp"

#include <charconv>
#include <fmt/format.h>

namespace wikicast {

namespace {

int parse_digits(std::string_view text, std::string_view whole) {
    int value = 0;
    for (char c : text) {
        if (c < '0' || c > '9') {
            throw InputError(fmt::format("invalid date '{}'", whole));
        }
        value = value * 10 + (c - '0');
    }
    return value;
}

} // namespace

Date parse_date(std::string_view iso) {
    if (iso.size() != 10 || iso[4] != '-' || iso[7] != '-') {
        throw InputError(fmt::format("invalid date '{}' (expected YYYY-MM-DD)", iso));
    }
    const std::chrono::year_month_day ymd{
        std::chrono::year{parse_digits(iso.substr(0, 4), iso)},
        std::chrono::month{static_cast<unsigned>(parse_digits(iso.substr(5, 2), iso))},
        std::chrono::day{static_cast<unsigned>(parse_digits(iso.substr(8, 2), iso))}};
    if (!ymd.ok()) {
        throw InputError(fmt::format("invalid calendar date '{}'", iso));
    }
    return Date{ymd};
}

std::string format_date(Date d) {
    const std::chrono::year_month_day ymd{d};
    return fmt::format("{:04}-{:02}-{:02}", static_cast<int>(ymd.year()),
                       static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
}

std::string format_compact_date(Date d) {
    const std::chrono::year_month_day ymd{d};
    return fmt::format("{:04}{:02}{:02}", static_cast<int>(ymd.year()),
                       static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
}

int weekday_index(Date d) {
    return static_cast<int>(std::chrono::weekday{d}.c_encoding());
}

Date add_month(Date d) {
    const std::chrono::year_month_day ymd{d};
    const auto next = ymd + std::chrono::months{1};
    if (!next.ok()) {
        throw InputError(fmt::format("date {} has no counterpart in the following month", format_date(d)));
    }
    return Date{next};
}

HourStamp HourStamp::from_index(std::int64_t index) {
    std::int64_t day = index / 24;
    std::int64_t hour = index % 24;
    if (hour < 0) {
        hour += 24;
        day -= 1;
    }
    return HourStamp{Date{std::chrono::days{day}}, static_cast<int>(hour)};
}

std::string format_hour(HourStamp h) {
    return fmt::format("{}-{:02}", format_compact_date(h.date), h.hour);
}

HourStamp parse_hour(std::string_view text) {
    if (text.size() != 11 || text[8] != '-') {
        throw InputError(fmt::format("invalid hour stamp '{}' (expected YYYYMMDD-HH)", text));
    }
    const auto iso = fmt::format("{}-{}-{}", text.substr(0, 4), text.substr(4, 2), text.substr(6, 2));
    const Date date = parse_date(iso);
    const int hour = parse_digits(text.substr(9, 2), text);
    if (hour > 23) {
        throw InputError(fmt::format("invalid hour in '{}'", text));
    }
    return HourStamp{date, hour};
}

} // namespace wikicast

#pragma once

#include "wikicast/calendar.hpp"
#include "wikicast/epi_data.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace wikicast {

enum class SeriesKind { raw, normalized };

/// Contiguous hourly series for one article; gaps are already zero-filled.
struct ArticleSeries {
    std::string language;
    std::string title;
    HourStamp first{};
    std::vector<double> values;
    SeriesKind kind = SeriesKind::raw;

    HourStamp last() const { return first.advanced(static_cast<std::int64_t>(values.size()) - 1); }
};

/// Per-hour request total of a whole language edition.
struct LanguageTotals {
    std::string language;
    HourStamp first{};
    std::vector<std::uint64_t> totals;
};

/// Contiguous daily series. Dates outside [first, first + size) are absent.
struct DailySeries {
    std::string language;
    std::string title;
    Date first{};
    std::vector<double> values;

    Date end() const { return add_days(first, static_cast<std::int64_t>(values.size())); }  // exclusive
    bool covers(Date d) const { return d >= first && d < end(); }
    std::optional<double> at(Date d) const;
};

struct IntervalValue {
    Date start{};
    int length = 1;
    double value = 0.0;
    /// False when any day of the interval had no source value; such
    /// intervals are dropped pairwise downstream.
    bool covered = true;
};

struct IntervalSeries {
    std::vector<IntervalValue> intervals;

    std::size_t covered_count() const;
};

/// Fraction of the hour's language total; hours whose total is zero
/// (including missing hours) give 0. Throws std::invalid_argument when the
/// article is not raw or the hour ranges differ.
ArticleSeries normalize(const ArticleSeries& raw, const LanguageTotals& totals);

/// Sums each UTC day. The series must start at hour 0 and span whole days.
DailySeries to_daily(const ArticleSeries& series);

/// Relabels the value at date t to t + offset (positive = forecasting).
/// With a window, relabelled dates outside it are dropped.
DailySeries shift_days(const DailySeries& series, int offset, const std::optional<DateWindow>& window = std::nullopt);

/// Sums daily values over each template interval. Throws InputError on an
/// empty template.
IntervalSeries align(const DailySeries& series, const IncidenceSeries& incidence);

/// Pointwise sum of redirect/target aliases under one canonical title.
/// Throws InputError on an empty list or mismatched language/date range.
DailySeries merge_aliases(std::span<const DailySeries> series, std::string canonical_title);

} // namespace wikicast

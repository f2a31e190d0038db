#include "wikicast/series.hpp"

#include "wikicast/errors.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <stdexcept>

namespace wikicast {

std::optional<double> DailySeries::at(Date d) const {
    if (!covers(d)) return std::nullopt;
    return values[static_cast<std::size_t>(days_between(first, d))];
}

std::size_t IntervalSeries::covered_count() const {
    return static_cast<std::size_t>(
        std::count_if(intervals.begin(), intervals.end(), [](const IntervalValue& iv) { return iv.covered; }));
}

ArticleSeries normalize(const ArticleSeries& raw, const LanguageTotals& totals) {
    if (raw.kind != SeriesKind::raw) {
        throw std::invalid_argument("normalize expects a raw series");
    }
    if (raw.first != totals.first || raw.values.size() != totals.totals.size()) {
        throw std::invalid_argument(fmt::format("hour range of {}:{} does not match the {} totals", raw.language,
                                                raw.title, totals.language));
    }
    ArticleSeries out{raw.language, raw.title, raw.first, {}, SeriesKind::normalized};
    out.values.resize(raw.values.size());
    for (std::size_t i = 0; i < raw.values.size(); ++i) {
        const auto total = totals.totals[i];
        out.values[i] = total == 0 ? 0.0 : raw.values[i] / static_cast<double>(total);
    }
    return out;
}

DailySeries to_daily(const ArticleSeries& series) {
    if (series.first.hour != 0 || series.values.size() % 24 != 0) {
        throw std::invalid_argument("to_daily needs a series of whole UTC days");
    }
    DailySeries out{series.language, series.title, series.first.date, {}};
    out.values.assign(series.values.size() / 24, 0.0);
    for (std::size_t i = 0; i < series.values.size(); ++i) {
        out.values[i / 24] += series.values[i];
    }
    return out;
}

DailySeries shift_days(const DailySeries& series, int offset, const std::optional<DateWindow>& window) {
    DailySeries out{series.language, series.title, add_days(series.first, offset), series.values};
    if (!window || out.values.empty()) return out;

    const Date lo = std::max(out.first, window->first);
    const Date hi = std::min(add_days(out.end(), -1), window->last);
    if (hi < lo) {
        out.first = window->first;
        out.values.clear();
        return out;
    }
    const auto skip = static_cast<std::size_t>(days_between(out.first, lo));
    const auto keep = static_cast<std::size_t>(days_between(lo, hi) + 1);
    out.values = std::vector<double>(out.values.begin() + static_cast<std::ptrdiff_t>(skip),
                                     out.values.begin() + static_cast<std::ptrdiff_t>(skip + keep));
    out.first = lo;
    return out;
}

IntervalSeries align(const DailySeries& series, const IncidenceSeries& incidence) {
    if (incidence.intervals.empty()) {
        throw InputError("cannot align to an empty incidence template");
    }
    IntervalSeries out;
    out.intervals.reserve(incidence.intervals.size());
    for (const auto& iv : incidence.intervals) {
        IntervalValue value{iv.start, iv.length, 0.0, true};
        for (int d = 0; d < iv.length; ++d) {
            const auto v = series.at(add_days(iv.start, d));
            if (!v) {
                value.covered = false;
                continue;
            }
            value.value += *v;
        }
        out.intervals.push_back(value);
    }
    return out;
}

DailySeries merge_aliases(std::span<const DailySeries> series, std::string canonical_title) {
    if (series.empty()) {
        throw InputError(fmt::format("alias group '{}' has no members", canonical_title));
    }
    DailySeries out{series.front().language, std::move(canonical_title), series.front().first,
                    series.front().values};
    for (const auto& s : series.subspan(1)) {
        if (s.language != out.language || s.first != out.first || s.values.size() != out.values.size()) {
            throw InputError(fmt::format("alias '{}' does not share language and date range with '{}'", s.title,
                                         series.front().title));
        }
        for (std::size_t i = 0; i < s.values.size(); ++i) out.values[i] += s.values[i];
    }
    return out;
}

} // namespace wikicast

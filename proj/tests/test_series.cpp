#include "wikicast/errors.hpp"
#include "wikicast/series.hpp"

#include <doctest.h>

#include <random>

using namespace wikicast;

namespace {

const Date kDay = parse_date("2011-01-02");

DailySeries daily(std::vector<double> values, Date first = kDay, std::string title = "T") {
    return DailySeries{"en", std::move(title), first, std::move(values)};
}

IncidenceSeries template_of(Date first, int count, int length) {
    IncidenceSeries s;
    s.context = Context{"flu", "X", "en", length == 1 ? Resolution::daily : Resolution::weekly, std::nullopt};
    for (int i = 0; i < count; ++i) s.intervals.push_back({add_days(first, i * length), length, 1.0});
    return s;
}

} // namespace

TEST_CASE("normalize divides by the language total; zero totals give zero") {
    ArticleSeries raw{"en", "Flu", HourStamp{kDay, 0}, {5, 0, 0}, SeriesKind::raw};
    LanguageTotals totals{"en", HourStamp{kDay, 0}, {1000, 1000, 0}};
    const auto n = normalize(raw, totals);
    CHECK(n.kind == SeriesKind::normalized);
    CHECK(n.values == std::vector<double>{0.005, 0.0, 0.0});

    totals.totals.pop_back();
    CHECK_THROWS_AS(normalize(raw, totals), std::invalid_argument);
    CHECK_THROWS_AS(normalize(n, LanguageTotals{"en", HourStamp{kDay, 0}, {1, 1, 1}}), std::invalid_argument);
}

TEST_CASE("normalization is invariant under scaling an hour") {
    std::mt19937_64 rng{3};
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t hours = 48;
        ArticleSeries raw{"en", "Flu", HourStamp{kDay, 0}, std::vector<double>(hours), SeriesKind::raw};
        LanguageTotals totals{"en", HourStamp{kDay, 0}, std::vector<std::uint64_t>(hours)};
        for (std::size_t h = 0; h < hours; ++h) {
            const auto count = rng() % 5000;
            raw.values[h] = static_cast<double>(count);
            totals.totals[h] = count + rng() % 10000000;
        }
        auto scaled_raw = raw;
        auto scaled_totals = totals;
        for (std::size_t h = 0; h < hours; ++h) {
            if (rng() % 3) continue;
            const std::uint64_t c = std::array<std::uint64_t, 3>{2, 10, 1000}[rng() % 3];
            scaled_raw.values[h] *= static_cast<double>(c);
            scaled_totals.totals[h] *= c;
        }
        const auto a = normalize(raw, totals);
        const auto b = normalize(scaled_raw, scaled_totals);
        for (std::size_t h = 0; h < hours; ++h) CHECK(std::abs(a.values[h] - b.values[h]) <= 1e-12);
    }
}

TEST_CASE("to_daily sums each day") {
    ArticleSeries s{"en", "Flu", HourStamp{kDay, 0}, std::vector<double>(48, 0.001), SeriesKind::normalized};
    for (int h = 24; h < 48; ++h) s.values[h] = h == 30 ? 0.0 : 0.01;
    const auto d = to_daily(s);
    REQUIRE(d.values.size() == 2);
    CHECK(d.values[0] == doctest::Approx(0.024).epsilon(1e-12));
    CHECK(d.values[1] == doctest::Approx(0.23).epsilon(1e-12));

    ArticleSeries zeros{"en", "Flu", HourStamp{kDay, 0}, std::vector<double>(24, 0.0), SeriesKind::normalized};
    CHECK(to_daily(zeros).values == std::vector<double>{0.0});

    ArticleSeries ragged{"en", "Flu", HourStamp{kDay, 1}, std::vector<double>(24, 0.0), SeriesKind::raw};
    CHECK_THROWS_AS(to_daily(ragged), std::invalid_argument);
}

TEST_CASE("to_daily preserves totals") {
    std::mt19937_64 rng{5};
    std::uniform_real_distribution<double> u{0.0, 1.0};
    ArticleSeries s{"en", "Flu", HourStamp{kDay, 0}, std::vector<double>(24 * 30), SeriesKind::raw};
    double hourly_sum = 0.0;
    for (auto& v : s.values) hourly_sum += (v = std::floor(u(rng) * 1000));
    const auto d = to_daily(s);
    double daily_sum = 0.0;
    for (double v : d.values) daily_sum += v;
    CHECK(daily_sum == hourly_sum);  // integers: exact
}

TEST_CASE("shift_days relabels dates") {
    const auto s = daily({1, 2, 3}, add_days(kDay, 1));
    CHECK(shift_days(s, 0).first == s.first);
    CHECK(shift_days(s, 0).values == s.values);

    const auto fwd = shift_days(s, 1);
    CHECK(fwd.first == add_days(kDay, 2));
    CHECK(fwd.at(add_days(kDay, 2)) == 1.0);
    CHECK(fwd.at(add_days(kDay, 4)) == 3.0);
    CHECK_FALSE(fwd.at(add_days(kDay, 1)));

    const auto back = shift_days(s, -1);
    CHECK(back.at(kDay) == 1.0);
    CHECK(back.at(add_days(kDay, 2)) == 3.0);
}

TEST_CASE("shift_days drops dates outside the window") {
    const auto s = daily({1, 2, 3, 4, 5});
    const DateWindow window{kDay, add_days(kDay, 4)};
    const auto fwd = shift_days(s, 2, window);
    CHECK(fwd.first == add_days(kDay, 2));
    CHECK(fwd.values == std::vector<double>{1, 2, 3});
    const auto back = shift_days(s, -2, window);
    CHECK(back.first == kDay);
    CHECK(back.values == std::vector<double>{3, 4, 5});
    CHECK(shift_days(s, 10, window).values.empty());
}

TEST_CASE("shift then unshift restores the common range") {
    std::mt19937_64 rng{9};
    std::vector<double> v(40);
    for (auto& x : v) x = static_cast<double>(rng() % 100);
    const auto s = daily(v);
    const DateWindow window{kDay, add_days(kDay, 39)};
    for (int k = -28; k <= 28; ++k) {
        const auto round_trip = shift_days(shift_days(s, k, window), -k, window);
        for (Date d = round_trip.first; d < round_trip.end(); d = add_days(d, 1)) CHECK(round_trip.at(d) == s.at(d));
        CHECK(round_trip.values.size() == v.size() - static_cast<std::size_t>(std::abs(k)));
    }
}

TEST_CASE("align sums intervals and flags partial coverage") {
    const auto weekly = align(daily(std::vector<double>(14, 0.01)), template_of(kDay, 2, 7));
    REQUIRE(weekly.intervals.size() == 2);
    CHECK(weekly.intervals[0].value == doctest::Approx(0.07).epsilon(1e-12));
    CHECK(weekly.intervals[1].covered);

    const std::vector<double> values{1, 2, 3, 4, 5, 6, 7, 8};
    const auto pass = align(daily(values), template_of(kDay, 8, 1));
    for (std::size_t i = 0; i < values.size(); ++i) CHECK(pass.intervals[i].value == values[i]);

    // After a +28 shift inside a 42-day window the last weekly interval
    // loses its final day.
    const auto long_series = daily(std::vector<double>(42, 1.0));
    const DateWindow window{kDay, add_days(kDay, 41)};
    const auto shifted = shift_days(long_series, 28, window);
    const auto tmpl = template_of(add_days(kDay, 27), 2, 7);
    const auto aligned = align(shifted, tmpl);
    CHECK_FALSE(aligned.intervals[0].covered);  // day 27 has no source value
    CHECK(aligned.intervals[1].covered);
    CHECK(aligned.covered_count() == 1);

    IncidenceSeries empty;
    CHECK_THROWS_AS(align(long_series, empty), InputError);
}

TEST_CASE("align is linear") {
    std::mt19937_64 rng{13};
    std::uniform_real_distribution<double> u{0.0, 1.0};
    std::vector<double> a(35), b(35), sum(35);
    for (std::size_t i = 0; i < 35; ++i) sum[i] = (a[i] = u(rng)) + (b[i] = u(rng));
    const auto tmpl = template_of(kDay, 5, 7);
    const auto ra = align(daily(a), tmpl);
    const auto rb = align(daily(b), tmpl);
    const auto rs = align(daily(sum), tmpl);
    for (std::size_t i = 0; i < 5; ++i) {
        CHECK(rs.intervals[i].value == doctest::Approx(ra.intervals[i].value + rb.intervals[i].value).epsilon(1e-12));
    }
}

TEST_CASE("merge_aliases sums pointwise") {
    const std::vector<DailySeries> pair{daily({5, 0, 0}, kDay, "A"), daily({0, 0, 7}, kDay, "B")};
    const auto merged = merge_aliases(pair, "Canonical");
    CHECK(merged.values == std::vector<double>{5, 0, 7});
    CHECK(merged.title == "Canonical");

    const std::vector<DailySeries> with_zero{daily({1, 2, 3}, kDay, "A"), daily({0, 0, 0}, kDay, "B")};
    CHECK(merge_aliases(with_zero, "A").values == std::vector<double>{1, 2, 3});

    CHECK_THROWS_AS(merge_aliases(std::span<const DailySeries>{}, "X"), InputError);
    const std::vector<DailySeries> misaligned{daily({1, 2}, kDay), daily({1, 2}, add_days(kDay, 1))};
    CHECK_THROWS_AS(merge_aliases(misaligned, "X"), InputError);
}

TEST_CASE("redirect flip: merged halves equal the uncut series") {
    std::mt19937_64 rng{17};
    std::vector<double> whole(60);
    for (auto& x : whole) x = static_cast<double>(rng() % 1000) / 7.0;
    const std::size_t cut = 23;
    std::vector<double> a(whole.size(), 0.0), b(whole.size(), 0.0);
    for (std::size_t i = 0; i < whole.size(); ++i) (i < cut ? a : b)[i] = whole[i];
    const std::vector<DailySeries> parts{daily(a, kDay, "A"), daily(b, kDay, "B")};
    CHECK(merge_aliases(parts, "A").values == whole);
}

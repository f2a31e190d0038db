#pragma once

// Article-major views over the hourly corpus. HourlyStore is the
// transposition of HourBatches (one reducer, deterministic order); DailyStore
// holds the normalized daily series that all modeling consumes and is what
// gets persisted.

#include "wikicast/pagecount.hpp"
#include "wikicast/series.hpp"

#include <filesystem>
#include <map>
#include <set>
#include <span>
#include <vector>

namespace wikicast {

class HourlyStore {
public:
    HourlyStore(DateWindow days, std::set<std::string> languages);

    /// Folds one batch in. Throws std::invalid_argument for hours outside
    /// the window or hours added twice.
    void add(const HourBatch& batch);

    static HourlyStore build(DateWindow days, std::set<std::string> languages, std::span<const HourBatch> batches);

    const DateWindow& days() const { return days_; }
    HourStamp first_hour() const { return HourStamp{days_.first, 0}; }
    std::size_t hour_count() const { return present_.size(); }
    const std::set<std::string>& languages() const { return languages_; }

    LanguageTotals totals(const std::string& language) const;
    /// All-zero when the article never appeared.
    ArticleSeries raw(const ArticleKey& key) const;
    ArticleSeries normalized(const ArticleKey& key) const;
    DailySeries daily(const ArticleKey& key) const;

    std::vector<ArticleKey> articles() const;
    std::vector<HourStamp> missing_hours() const;

private:
    std::size_t slot(HourStamp hour) const;

    DateWindow days_;
    std::set<std::string> languages_;
    std::vector<bool> present_;
    std::vector<bool> seen_;
    std::map<std::string, std::vector<std::uint64_t>> totals_;
    std::map<ArticleKey, std::vector<std::uint64_t>> counts_;
};

struct StoreManifest {
    DateWindow days{};
    std::vector<std::string> languages;
    std::vector<HourStamp> missing_hours;
};

/// Normalized daily series per article.
///
/// On disk: `manifest.txt` (key = value: start, end, languages,
/// missing_hours as comma-separated YYYYMMDD-HH) and one `<language>.tsv`
/// per language holding `title<TAB>YYYY-MM-DD<TAB>value` lines sorted by
/// title then date, one line per day of the study range, values written
/// with round-trip precision.
class DailyStore {
public:
    DailyStore() = default;
    explicit DailyStore(StoreManifest manifest) : manifest_{std::move(manifest)} {}

    static DailyStore from_hourly(const HourlyStore& hourly);

    const StoreManifest& manifest() const { return manifest_; }

    void put(const DailySeries& series);
    bool contains(const ArticleKey& key) const { return series_.contains(key); }
    /// All-zero over the study range when the article was never requested.
    DailySeries series(const ArticleKey& key) const;
    std::vector<ArticleKey> articles() const;

    void save(const std::filesystem::path& dir) const;
    static DailyStore load(const std::filesystem::path& dir);

private:
    StoreManifest manifest_;
    std::map<ArticleKey, std::vector<double>> series_;
};

} // namespace wikicast

#include "wikicast/store.hpp"

#include "wikicast/errors.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fmt/format.h>
#include <fmt/ranges.h>

#include <charconv>
#include <fstream>
#include <stdexcept>

namespace wikicast {

namespace {

std::vector<std::string> split(std::string_view text, char sep) {
    std::vector<std::string> out;
    if (text.empty()) return out;
    std::size_t start = 0;
    while (true) {
        const auto pos = text.find(sep, start);
        out.emplace_back(text.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

} // namespace

HourlyStore::HourlyStore(DateWindow days, std::set<std::string> languages)
    : days_{days}, languages_{std::move(languages)} {
    if (days_.last < days_.first) {
        throw std::invalid_argument("store window ends before it starts");
    }
    const auto hours = static_cast<std::size_t>(days_.days() * 24);
    present_.assign(hours, false);
    seen_.assign(hours, false);
    for (const auto& lang : languages_) totals_[lang].assign(hours, 0);
}

std::size_t HourlyStore::slot(HourStamp hour) const {
    const auto offset = hour.index() - first_hour().index();
    if (offset < 0 || static_cast<std::size_t>(offset) >= present_.size()) {
        throw std::invalid_argument(fmt::format("hour {} outside the store window", format_hour(hour)));
    }
    return static_cast<std::size_t>(offset);
}

void HourlyStore::add(const HourBatch& batch) {
    const auto i = slot(batch.hour);
    if (seen_[i]) {
        throw std::invalid_argument(fmt::format("hour {} added twice", format_hour(batch.hour)));
    }
    seen_[i] = true;
    present_[i] = batch.present;
    for (const auto& [lang, total] : batch.totals) {
        if (auto it = totals_.find(lang); it != totals_.end()) it->second[i] += total;
    }
    for (const auto& [key, count] : batch.counts) {
        if (!languages_.contains(key.language)) continue;
        auto [it, inserted] = counts_.try_emplace(key);
        if (inserted) it->second.assign(present_.size(), 0);
        it->second[i] += count;
    }
}

HourlyStore HourlyStore::build(DateWindow days, std::set<std::string> languages, std::span<const HourBatch> batches) {
    HourlyStore store{days, std::move(languages)};
    for (const auto& batch : batches) store.add(batch);
    return store;
}

LanguageTotals HourlyStore::totals(const std::string& language) const {
    const auto it = totals_.find(language);
    if (it == totals_.end()) {
        throw InputError(fmt::format("language '{}' is not in the store", language));
    }
    return LanguageTotals{language, first_hour(), it->second};
}

ArticleSeries HourlyStore::raw(const ArticleKey& key) const {
    ArticleSeries out{key.language, key.title, first_hour(), {}, SeriesKind::raw};
    if (const auto it = counts_.find(key); it != counts_.end()) {
        out.values.assign(it->second.begin(), it->second.end());
    } else {
        out.values.assign(present_.size(), 0.0);
    }
    return out;
}

ArticleSeries HourlyStore::normalized(const ArticleKey& key) const {
    return normalize(raw(key), totals(key.language));
}

DailySeries HourlyStore::daily(const ArticleKey& key) const { return to_daily(normalized(key)); }

std::vector<ArticleKey> HourlyStore::articles() const {
    std::vector<ArticleKey> keys;
    keys.reserve(counts_.size());
    for (const auto& [key, _] : counts_) keys.push_back(key);
    return keys;
}

std::vector<HourStamp> HourlyStore::missing_hours() const {
    std::vector<HourStamp> out;
    for (std::size_t i = 0; i < present_.size(); ++i) {
        if (!present_[i]) out.push_back(first_hour().advanced(static_cast<std::int64_t>(i)));
    }
    return out;
}

DailyStore DailyStore::from_hourly(const HourlyStore& hourly) {
    StoreManifest manifest{hourly.days(), {hourly.languages().begin(), hourly.languages().end()},
                           hourly.missing_hours()};
    DailyStore store{std::move(manifest)};
    for (const auto& key : hourly.articles()) store.put(hourly.daily(key));
    return store;
}

void DailyStore::put(const DailySeries& series) {
    if (series.first != manifest_.days.first ||
        static_cast<std::int64_t>(series.values.size()) != manifest_.days.days()) {
        throw std::invalid_argument(fmt::format("series {}:{} does not span the store range", series.language,
                                                series.title));
    }
    series_[ArticleKey{series.language, series.title}] = series.values;
}

DailySeries DailyStore::series(const ArticleKey& key) const {
    DailySeries out{key.language, key.title, manifest_.days.first, {}};
    if (const auto it = series_.find(key); it != series_.end()) {
        out.values = it->second;
    } else {
        out.values.assign(static_cast<std::size_t>(manifest_.days.days()), 0.0);
    }
    return out;
}

std::vector<ArticleKey> DailyStore::articles() const {
    std::vector<ArticleKey> keys;
    for (const auto& [key, _] : series_) keys.push_back(key);
    return keys;
}

void DailyStore::save(const std::filesystem::path& dir) const {
    std::filesystem::create_directories(dir);
    {
        std::ofstream out{dir / "manifest.txt"};
        if (!out) throw InputError(fmt::format("cannot write store manifest in '{}'", dir.string()));
        out << fmt::format("start = {}\n", format_date(manifest_.days.first));
        out << fmt::format("end = {}\n", format_date(manifest_.days.last));
        out << fmt::format("languages = {}\n", fmt::join(manifest_.languages, ","));
        std::vector<std::string> hours;
        for (const auto& h : manifest_.missing_hours) hours.push_back(format_hour(h));
        out << fmt::format("missing_hours = {}\n", fmt::join(hours, ","));
    }
    for (const auto& lang : manifest_.languages) {
        std::ofstream out{dir / (lang + ".tsv")};
        if (!out) throw InputError(fmt::format("cannot write store file for '{}'", lang));
        for (auto it = series_.lower_bound(ArticleKey{lang, ""}); it != series_.end() && it->first.language == lang;
             ++it) {
            for (std::size_t d = 0; d < it->second.size(); ++d) {
                out << fmt::format("{}\t{}\t{}\n", it->first.title,
                                   format_date(add_days(manifest_.days.first, static_cast<std::int64_t>(d))),
                                   it->second[d]);
            }
        }
    }
}

DailyStore DailyStore::load(const std::filesystem::path& dir) {
    std::ifstream manifest_in{dir / "manifest.txt"};
    if (!manifest_in) {
        throw InputError(fmt::format("store manifest '{}' not found", (dir / "manifest.txt").string()));
    }
    boost::property_tree::ptree tree;
    try {
        boost::property_tree::read_ini(manifest_in, tree);
    } catch (const boost::property_tree::ini_parser_error& e) {
        throw InputError(fmt::format("store manifest: {}", e.message()));
    }
    StoreManifest manifest;
    try {
        manifest.days = DateWindow{parse_date(tree.get<std::string>("start")), parse_date(tree.get<std::string>("end"))};
        manifest.languages = split(tree.get<std::string>("languages"), ',');
        for (const auto& h : split(tree.get<std::string>("missing_hours", ""), ',')) {
            manifest.missing_hours.push_back(parse_hour(h));
        }
    } catch (const boost::property_tree::ptree_error& e) {
        throw InputError(fmt::format("store manifest: {}", e.what()));
    }

    DailyStore store{manifest};
    const auto days = static_cast<std::size_t>(manifest.days.days());
    for (const auto& lang : manifest.languages) {
        const auto path = dir / (lang + ".tsv");
        std::ifstream in{path};
        if (!in) throw InputError(fmt::format("store file '{}' not found", path.string()));
        std::string line;
        std::size_t line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            const auto fields = split(line, '\t');
            if (fields.size() != 3) {
                throw InputError(fmt::format("{}:{}: expected title, date, value", path.string(), line_no));
            }
            const Date date = parse_date(fields[1]);
            if (!manifest.days.contains(date)) {
                throw InputError(fmt::format("{}:{}: date outside the store range", path.string(), line_no));
            }
            double value = 0.0;
            const auto& text = fields[2];
            const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
            if (ec != std::errc{} || ptr != text.data() + text.size()) {
                throw InputError(fmt::format("{}:{}: bad value '{}'", path.string(), line_no, text));
            }
            auto [it, inserted] = store.series_.try_emplace(ArticleKey{lang, fields[0]});
            if (inserted) it->second.assign(days, 0.0);
            it->second[static_cast<std::size_t>(days_between(manifest.days.first, date))] = value;
        }
    }
    return store;
}

} // namespace wikicast

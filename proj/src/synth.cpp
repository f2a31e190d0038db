#include "wikicast/synth.hpp"

#include "wikicast/errors.hpp"
#include "wikicast/modeling.hpp"
#include "wikicast/pagecount.hpp"

#include <fmt/format.h>
#include <fmt/ranges.h>

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <fstream>
#include <numbers>
#include <numeric>
#include <random>
#include <thread>

namespace wikicast {

namespace {

constexpr int kPad = kMaxLagDays;

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

std::mt19937_64 stream(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
    return std::mt19937_64{splitmix64(seed ^ splitmix64(a * 0x100000001B3ull + b))};
}

std::uint64_t fnv1a(std::string_view text) {
    std::uint64_t h = 0xCBF29CE484222325ull;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001B3ull;
    }
    return h;
}

std::array<double, 24> diurnal_weights() {
    std::array<double, 24> w{};
    for (int h = 0; h < 24; ++h) w[h] = 1.0 + 0.35 * std::cos(2.0 * std::numbers::pi * (h - 15) / 24.0);
    const double sum = std::accumulate(w.begin(), w.end(), 0.0);
    for (auto& x : w) x /= sum;
    return w;
}

/// Largest-remainder split of a daily count over 24 hours.
std::array<std::uint64_t, 24> split_day(std::uint64_t count, const std::array<double, 24>& weights) {
    std::array<std::uint64_t, 24> out{};
    std::array<std::pair<double, int>, 24> remainders{};
    std::uint64_t assigned = 0;
    for (int h = 0; h < 24; ++h) {
        const double exact = static_cast<double>(count) * weights[h];
        out[h] = static_cast<std::uint64_t>(std::floor(exact));
        assigned += out[h];
        remainders[h] = {exact - std::floor(exact), h};
    }
    std::stable_sort(remainders.begin(), remainders.end(),
                     [](const auto& a, const auto& b) { return a.first > b.first; });
    for (std::uint64_t i = 0; assigned < count; ++i, ++assigned) ++out[remainders[i % 24].second];
    return out;
}

// Per-article generator, positioned after the background level draw.
std::pair<std::mt19937_64, double> article_stream(const SynthSpec& spec, std::size_t language, std::size_t article) {
    auto rng = stream(spec.seed, language + 1, article);
    std::uniform_real_distribution<double> level{0.5, 2.0};
    const double base = spec.background * level(rng);
    return {std::move(rng), base};
}

constexpr std::array<std::string_view, 10> kFillerTitles = {
    "Main_Page", "Special:Search", "Special:Random", "Wikipedia:Portal", "Filler_0",
    "Filler_1",  "Filler_2",       "Filler_3",       "Filler_4",         "Filler_5",
};
constexpr std::array<double, 10> kFillerShares = {0.40, 0.15, 0.08, 0.07, 0.06, 0.06, 0.05, 0.05, 0.04, 0.04};

} // namespace

double weekly_factor(int weekday, double amplitude) {
    // Sunday trough, Wednesday peak.
    static constexpr std::array<double, 7> shape = {-1.0, -0.2, 0.6, 1.0, 0.6, 0.0, -0.8};
    return 1.0 + amplitude * shape[static_cast<std::size_t>(weekday)];
}

std::string synthetic_english_name(int index) { return fmt::format("Synthetic_topic_{:02}", index); }

std::string synthetic_title(const std::string& language, int index) {
    static const std::map<std::string, std::string> prefixes = {
        {"en", "Synthetic topic"}, {"pl", "Temat syntetyczny"}, {"fr", "Sujet synthétique"},
        {"ja", "合成トピック"},    {"th", "หัวข้อสังเคราะห์"},     {"pt", "Tópico sintético"},
        {"zh", "合成主题"},        {"no", "Syntetisk emne"},
    };
    const auto it = prefixes.find(language);
    const std::string prefix = it == prefixes.end() ? language + " synthetic topic" : it->second;
    return encode_title(fmt::format("{} {:02}", prefix, index));
}

void SynthSpec::validate() const {
    if (languages.empty()) throw InputError("synthetic spec needs at least one language");
    for (const auto& lang : languages) {
        if (!is_language_project(lang)) throw InputError(fmt::format("'{}' is not a bare language code", lang));
    }
    if (articles_per_language < 1) throw InputError("articles per language must be positive");
    if (days < static_cast<int>(kMinIncidenceIntervals)) {
        throw InputError(fmt::format("study period must cover at least {} days", kMinIncidenceIntervals));
    }
    if (!(background >= 0.0) || !(background_noise >= 0.0) || !(filler_per_day >= 0.0)) {
        throw InputError("traffic levels must be non-negative");
    }
    if (!(weekly_amplitude >= 0.0 && weekly_amplitude < 1.0)) {
        throw InputError("weekly amplitude must be in [0, 1)");
    }
    auto known_article = [&](const std::string& lang, int article) {
        return std::find(languages.begin(), languages.end(), lang) != languages.end() && article >= 0 &&
               article < articles_per_language;
    };
    for (const auto& s : signals) {
        if (!known_article(s.language, s.article)) {
            throw InputError(fmt::format("signal refers to unknown article {}:{}", s.language, s.article));
        }
        if (!std::isfinite(s.gain)) throw InputError("signal gain must be finite");
        if (std::abs(s.lead_days) > kMaxLagDays) {
            throw InputError(fmt::format("signal lead {} outside [-{}, {}]", s.lead_days, kMaxLagDays, kMaxLagDays));
        }
        if (!(s.noise_std >= 0.0)) throw InputError("signal noise must be non-negative");
    }
    if (redirect_flip) {
        const auto& f = *redirect_flip;
        if (!known_article(f.language, f.article)) {
            throw InputError(fmt::format("redirect flip refers to unknown article {}:{}", f.language, f.article));
        }
        if (!is_encoded_title(f.redirect_title)) {
            throw InputError(fmt::format("redirect title '{}' is not in log form", f.redirect_title));
        }
        if (!study().contains(f.cut)) throw InputError("redirect cut date outside the study period");
    }
}

std::map<std::string, std::vector<double>> synthesize_incidence(const SynthSpec& spec) {
    const auto padded = static_cast<std::size_t>(spec.days + 2 * kPad);
    std::map<std::string, std::vector<double>> out;
    for (std::size_t li = 0; li < spec.languages.size(); ++li) {
        const auto& lang = spec.languages[li];
        std::vector<double> values(padded, 0.0);
        if (const auto csv = spec.incidence_csv.find(lang); csv != spec.incidence_csv.end()) {
            Context ctx{spec.disease, "", lang, Resolution::daily, std::nullopt};
            const auto series = load_incidence(csv->second, ctx);
            const Date first = add_days(spec.start, -kPad);
            for (std::size_t i = 0; i < padded; ++i) {
                const Date d = add_days(first, static_cast<std::int64_t>(i));
                const auto it = std::find_if(series.intervals.begin(), series.intervals.end(),
                                             [&](const IncidenceInterval& iv) { return iv.start == d; });
                if (it == series.intervals.end()) {
                    throw InputError(fmt::format("{}: no value for {} (needs study period padded by {} days)",
                                                 csv->second.string(), format_date(d), kPad));
                }
                values[i] = it->cases;
            }
        } else {
            const auto& shape = spec.incidence;
            auto rng = stream(spec.seed, 0xC0FFEE, li);
            std::normal_distribution<double> normal{0.0, 1.0};
            const double centre = shape.peak_position * spec.days;
            for (std::size_t i = 0; i < padded; ++i) {
                const double day = static_cast<double>(i) - kPad;
                const double z = (day - centre) / shape.width_days;
                const double smooth = shape.baseline + shape.peak * std::exp(-0.5 * z * z);
                values[i] = smooth * std::max(0.0, 1.0 + shape.irregularity * normal(rng));
            }
        }
        out.emplace(lang, std::move(values));
    }
    return out;
}

std::map<std::string, std::vector<double>> background_levels(const SynthSpec& spec) {
    std::map<std::string, std::vector<double>> out;
    for (std::size_t li = 0; li < spec.languages.size(); ++li) {
        auto& levels = out[spec.languages[li]];
        for (std::size_t a = 0; a < static_cast<std::size_t>(spec.articles_per_language); ++a) {
            levels.push_back(article_stream(spec, li, a).second);
        }
    }
    return out;
}

SynthTruth generate(const SynthSpec& spec, const std::filesystem::path& out_dir, unsigned threads) {
    spec.validate();
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(out_dir / "pagecounts", ec);
    fs::create_directories(out_dir / "incidence", ec);
    fs::create_directories(out_dir / "truth", ec);
    if (ec || !fs::is_directory(out_dir / "pagecounts")) {
        throw InputError(fmt::format("cannot create output directory '{}'", out_dir.string()));
    }
    for (const auto& entry : fs::directory_iterator(out_dir / "pagecounts")) {
        if (parse_pagecount_filename(entry.path().filename().string())) fs::remove(entry.path());
    }

    SynthTruth truth;
    truth.corpus_dir = out_dir / "pagecounts";
    truth.padded_incidence = synthesize_incidence(spec);

    const auto days = static_cast<std::size_t>(spec.days);
    const auto articles = static_cast<std::size_t>(spec.articles_per_language);

    // Daily counts: [language][article] → per day. The redirect title, when
    // present, is stored as one extra article slot.
    struct LanguageCounts {
        std::vector<std::string> titles;
        std::vector<std::vector<std::uint64_t>> daily;
    };
    std::vector<LanguageCounts> counts(spec.languages.size());
    for (std::size_t li = 0; li < spec.languages.size(); ++li) {
        const auto& lang = spec.languages[li];
        const auto& incidence = truth.padded_incidence.at(lang);
        auto& lc = counts[li];
        for (std::size_t a = 0; a < articles; ++a) {
            lc.titles.push_back(synthetic_title(lang, static_cast<int>(a)));
            auto [rng, base] = article_stream(spec, li, a);
            std::normal_distribution<double> normal{0.0, 1.0};

            std::vector<std::uint64_t> series(days);
            for (std::size_t d = 0; d < days; ++d) {
                const Date date = add_days(spec.start, static_cast<std::int64_t>(d));
                const double weekly = base * weekly_factor(weekday_index(date), spec.weekly_amplitude);
                double mean = weekly;
                double variance = std::pow(spec.background_noise * weekly, 2);
                for (const auto& s : spec.signals) {
                    if (s.language != lang || s.article != static_cast<int>(a)) continue;
                    mean += s.gain * incidence[d + static_cast<std::size_t>(kPad + s.lead_days)];
                    variance += s.noise_std * s.noise_std;
                }
                const double draw = mean + std::sqrt(variance) * normal(rng);
                series[d] = static_cast<std::uint64_t>(std::llround(std::max(0.0, draw)));
            }
            lc.daily.push_back(std::move(series));
        }
        if (spec.redirect_flip && spec.redirect_flip->language == lang) {
            const auto& flip = *spec.redirect_flip;
            auto& source = lc.daily[static_cast<std::size_t>(flip.article)];
            std::vector<std::uint64_t> moved(days, 0);
            for (std::size_t d = static_cast<std::size_t>(days_between(spec.start, flip.cut)); d < days; ++d) {
                moved[d] = source[d];
                source[d] = 0;
            }
            lc.titles.push_back(flip.redirect_title);
            lc.daily.push_back(std::move(moved));
        }
    }

    const auto weights = diurnal_weights();
    const std::size_t hours = days * 24;
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    auto worker = [&] {
        for (std::size_t i = next++; i < hours && !failed; i = next++) {
            const std::size_t day = i / 24;
            const int hour = static_cast<int>(i % 24);
            const HourStamp stamp{add_days(spec.start, static_cast<std::int64_t>(day)), hour};
            std::vector<RawRecord> records;
            for (std::size_t li = 0; li < spec.languages.size(); ++li) {
                const auto& lang = spec.languages[li];
                const auto& lc = counts[li];
                for (std::size_t a = 0; a < lc.titles.size(); ++a) {
                    const auto n = split_day(lc.daily[a][day], weights)[static_cast<std::size_t>(hour)];
                    if (n == 0) continue;  // zero-request articles are omitted from real logs
                    records.push_back(RawRecord{lang, lc.titles[a], n, n * (9000 + fnv1a(lc.titles[a]) % 30000)});
                }
                const auto filler = split_day(static_cast<std::uint64_t>(std::llround(spec.filler_per_day)), weights);
                std::uint64_t left = filler[static_cast<std::size_t>(hour)];
                for (std::size_t f = kFillerTitles.size(); f-- > 0;) {
                    const auto n = f == 0 ? left
                                          : static_cast<std::uint64_t>(std::floor(
                                                kFillerShares[f] * static_cast<double>(filler[static_cast<std::size_t>(hour)])));
                    left -= n;
                    if (n > 0) records.push_back(RawRecord{lang, std::string{kFillerTitles[f]}, n, n * 12000});
                }
                // Mobile-site traffic, which ingest must ignore.
                records.push_back(RawRecord{lang + ".m", "Main_Page", 1000 + i % 97, 5000000});
            }
            std::sort(records.begin(), records.end(), [](const RawRecord& a, const RawRecord& b) {
                return std::tie(a.project, a.title) < std::tie(b.project, b.title);
            });
            std::vector<std::string> lines;
            lines.reserve(records.size());
            for (const auto& r : records) lines.push_back(format_line(r));
            try {
                write_gzip_lines(truth.corpus_dir / pagecount_filename(stamp), lines);
            } catch (const InputError&) {
                failed = true;
            }
        }
    };
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    }
    if (failed) throw InputError(fmt::format("failed writing pagecount files under '{}'", out_dir.string()));
    truth.hour_files = hours;

    auto open = [](const fs::path& path) {
        std::ofstream out{path};
        if (!out) throw InputError(fmt::format("cannot write '{}'", path.string()));
        return out;
    };

    for (const auto& lang : spec.languages) {
        const auto& padded = truth.padded_incidence.at(lang);
        IncidenceSeries series;
        series.context = Context{spec.disease, "Synthland-" + lang, lang, Resolution::daily, spec.study()};
        for (std::size_t d = 0; d < days; ++d) {
            series.intervals.push_back(
                IncidenceInterval{add_days(spec.start, static_cast<std::int64_t>(d)), 1, padded[d + kPad]});
        }
        const auto csv = out_dir / "incidence" / (lang + ".csv");
        {
            auto out = open(csv);
            write_incidence(out, series);
        }
        {
            auto out = open(out_dir / "incidence" / (lang + ".context"));
            write_context(out, series.context);
        }
        truth.incidence.emplace(lang, csv);

        auto out = open(out_dir / "truth" / ("incidence_" + lang + ".csv"));
        out << "date,value\n";
        for (std::size_t i = 0; i < padded.size(); ++i) {
            out << fmt::format("{},{}\n", format_date(add_days(spec.start, static_cast<std::int64_t>(i) - kPad)),
                               padded[i]);
        }
    }

    std::vector<CandidateRow> rows;
    for (std::size_t a = 0; a < articles; ++a) {
        for (const auto& lang : spec.languages) {
            rows.push_back(CandidateRow{synthetic_english_name(static_cast<int>(a)), lang,
                                        synthetic_title(lang, static_cast<int>(a))});
        }
    }
    truth.candidates = out_dir / "candidates.tsv";
    {
        auto out = open(truth.candidates);
        write_candidates(out, CandidateSet{spec.disease, rows});
    }

    {
        auto out = open(out_dir / "truth.txt");
        out << fmt::format("seed = {}\nstart = {}\nend = {}\nlanguages = {}\narticles_per_language = {}\n",
                           spec.seed, format_date(spec.study().first), format_date(spec.study().last),
                           fmt::join(spec.languages, ","), spec.articles_per_language);
        for (std::size_t i = 0; i < spec.signals.size(); ++i) {
            const auto& s = spec.signals[i];
            out << fmt::format("signal.{} = {},{},{},{},{},{}\n", i, s.language,
                               synthetic_title(s.language, s.article), synthetic_english_name(s.article), s.gain,
                               s.lead_days, s.noise_std);
        }
        if (spec.redirect_flip) {
            const auto& f = *spec.redirect_flip;
            out << fmt::format("redirect_flip = {},{},{},{}\n", f.language, synthetic_title(f.language, f.article),
                               f.redirect_title, format_date(f.cut));
        }
    }

    truth.config = out_dir / "pipeline.ini";
    {
        auto out = open(truth.config);
        out << fmt::format("[corpus]\nroot = pagecounts\nstart = {}\nend = {}\nlanguages = {}\n\n",
                           format_date(spec.study().first), format_date(spec.study().last),
                           fmt::join(spec.languages, ","));
        out << fmt::format("[model]\nmin_offset = {}\nmax_offset = {}\ntop_k = 10\n\n", -kMaxLagDays, kMaxLagDays);
        out << "[output]\ndir = reports\n";
        for (const auto& lang : spec.languages) {
            out << fmt::format("\n[context {}-{}]\nincidence = incidence/{}.csv\ncandidates = candidates.tsv\n",
                               spec.disease, lang, lang);
        }
        if (spec.redirect_flip) {
            const auto& f = *spec.redirect_flip;
            const auto canonical = synthetic_title(f.language, f.article);
            out << fmt::format("\n[aliases {}]\n{} = {},{}\n", f.language, canonical, canonical, f.redirect_title);
        }
    }
    return truth;
}

void rescale_hour_file(const std::filesystem::path& path, std::uint64_t factor) {
    const auto text = read_gzip(path);
    if (!text) throw InputError(fmt::format("cannot read '{}'", path.string()));
    std::vector<std::string> lines;
    std::size_t start = 0;
    while (start < text->size()) {
        auto end = text->find('\n', start);
        if (end == std::string::npos) end = text->size();
        const std::string_view line{text->data() + start, end - start};
        start = end + 1;
        if (auto record = parse_line(line)) {
            record->requests *= factor;
            lines.push_back(format_line(*record));
        } else {
            lines.emplace_back(line);
        }
    }
    write_gzip_lines(path, lines);
}

} // namespace wikicast

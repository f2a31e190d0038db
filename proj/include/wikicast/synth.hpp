#pragma once

// Seeded synthetic pagecount corpora with injected disease signal, for
// testing the pipeline end to end without the real dump.
//
// Candidate article i of a language has daily expectation
//     background_i * weekly(t) + sum over its signals of gain * incidence(t + lead)
// with Gaussian noise on the daily value, truncated at 0 and rounded. Daily
// counts are split across hours by a fixed diurnal profile. The rest of the
// language edition is a flat filler volume, so normalization leaves the
// article series nearly proportional to raw counts.

#include "wikicast/calendar.hpp"
#include "wikicast/epi_data.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace wikicast {

struct SignalArticle {
    std::string language;
    int article = 0;        // candidate index within the language
    double gain = 1.0;      // requests per incidence unit
    int lead_days = 0;      // traffic at t reflects incidence at t + lead
    double noise_std = 0.0; // requests/day
};

/// Signal article A's traffic moves to title B from `cut` onwards, as
/// when a redirect and its target swap places.
struct RedirectFlip {
    std::string language;
    int article = 0;
    std::string redirect_title;  // encoded title B
    Date cut{};
};

struct IncidenceShape {
    double baseline = 20.0;
    double peak = 300.0;
    double peak_position = 0.55;  // fraction of the study period
    double width_days = 14.0;
    /// Relative std of day-to-day multiplicative irregularity.
    double irregularity = 0.25;
};

struct SynthSpec {
    std::string disease = "influenza";
    std::vector<std::string> languages{"en"};
    int articles_per_language = 30;
    Date start = Date{std::chrono::year{2011} / 1 / 2};
    int days = 120;
    double background = 400.0;       // mean requests/day per candidate
    double background_noise = 0.1;   // relative std of background counts
    double weekly_amplitude = 0.25;  // midweek high, weekend low
    double filler_per_day = 5.0e6;   // rest-of-language requests/day
    IncidenceShape incidence;
    /// Optional per-language incidence CSV (`date,value`, daily, covering
    /// start - 28 .. start + days + 27) used instead of the shape.
    std::map<std::string, std::filesystem::path> incidence_csv;
    std::vector<SignalArticle> signals;
    std::optional<RedirectFlip> redirect_flip;
    std::uint64_t seed = 1;

    /// Throws InputError on an unusable spec.
    void validate() const;
    DateWindow study() const { return DateWindow{start, add_days(start, days - 1)}; }
};

/// Multiplicative 7-value profile indexed by weekday (0 = Sunday).
double weekly_factor(int weekday, double amplitude);

/// Encoded local title of candidate `index` in `language`.
std::string synthetic_title(const std::string& language, int index);
/// Cross-language key of candidate `index`.
std::string synthetic_english_name(int index);

/// Incidence per language over study() padded by kMaxLagDays on both sides;
/// element 0 is start - 28.
std::map<std::string, std::vector<double>> synthesize_incidence(const SynthSpec& spec);

/// Mean daily background of each candidate per language, before the weekly
/// profile is applied.
std::map<std::string, std::vector<double>> background_levels(const SynthSpec& spec);

struct SynthTruth {
    std::filesystem::path corpus_dir;
    std::filesystem::path candidates;
    std::filesystem::path config;
    std::map<std::string, std::filesystem::path> incidence;  // language → CSV
    std::map<std::string, std::vector<double>> padded_incidence;
    std::size_t hour_files = 0;
};

/// Writes `pagecounts/`, `incidence/<lang>.csv|.context`, `candidates.tsv`,
/// `truth.txt`, and a ready-to-run `pipeline.ini` under `out_dir`.
/// Identical specs produce identical files.
SynthTruth generate(const SynthSpec& spec, const std::filesystem::path& out_dir, unsigned threads = 0);

/// Multiplies every request count in one hour file by `factor`.
void rescale_hour_file(const std::filesystem::path& path, std::uint64_t factor);

} // namespace wikicast

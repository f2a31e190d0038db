#pragma once

// Hourly Wikimedia pagecount files: `project title requests bytes`, one
// record per LF-terminated line, gzip-compressed, one file per UTC hour.

#include "wikicast/calendar.hpp"

#include <compare>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace wikicast {

struct RawRecord {
    std::string project;
    std::string title;  // percent-encoded, never decoded
    std::uint64_t requests = 0;
    std::uint64_t bytes = 0;

    friend bool operator==(const RawRecord&, const RawRecord&) = default;
};

enum class LineError {
    none,
    field_count,
    empty_field,
    bad_number,
};

/// Splits one record. The trailing '\n' is optional; anything else that is
/// not exactly four non-empty space-separated fields with numeric counts is
/// rejected and `why` (when given) says which rule failed.
std::optional<RawRecord> parse_line(std::string_view line, LineError* why = nullptr);

/// Inverse of parse_line, without the trailing newline.
std::string format_line(const RawRecord& record);

/// Log form of a Unicode (UTF-8) title: spaces become underscores, bytes
/// outside the URL-safe set become uppercase %XX. An existing `%XX` escape
/// passes through, which makes the function idempotent.
/// Throws InputError on empty input.
std::string encode_title(std::string_view utf8_title);

/// True when `title` is non-empty and already in log form.
bool is_encoded_title(std::string_view title);

/// Bare language editions only: "en" counts, "en.m" or "en.b" do not.
bool is_language_project(std::string_view project);

/// `pagecounts-YYYYMMDD-HH0000.gz`
std::string pagecount_filename(HourStamp hour);

/// Accepts `pagecounts-YYYYMMDD-HHMMSS.gz`; the dump server occasionally
/// stamps files a few seconds past the hour.
std::optional<HourStamp> parse_pagecount_filename(std::string_view name);

struct ArticleKey {
    std::string language;
    std::string title;

    friend bool operator==(const ArticleKey&, const ArticleKey&) = default;
    friend auto operator<=>(const ArticleKey&, const ArticleKey&) = default;
};

struct IngestFilter {
    std::set<std::string> languages;
    /// When unset every title of an allowed language is kept.
    std::optional<std::set<ArticleKey>> watch;

    bool keeps_language(std::string_view language) const;
    bool keeps(const std::string& language, const std::string& title) const;
};

struct HourBatch {
    HourStamp hour{};
    bool present = false;
    std::map<ArticleKey, std::uint64_t> counts;
    /// Sum of every accepted record per allowed language, watched or not.
    std::map<std::string, std::uint64_t> totals;
    std::uint64_t accepted = 0;
    std::uint64_t rejected = 0;

    friend bool operator==(const HourBatch&, const HourBatch&) = default;
};

HourBatch missing_hour(HourStamp hour);

/// Folds already-decompressed text into a batch for `hour`.
HourBatch ingest_text(std::string_view text, HourStamp hour, const IngestFilter& filter);

/// Reads one hourly file. A missing, unreadable or corrupt file yields a
/// non-present all-zero batch and a logged warning.
HourBatch ingest_hour(const std::filesystem::path& path, HourStamp hour, const IngestFilter& filter);

/// Hour → file map for every pagecount file directly under `root`.
std::map<HourStamp, std::filesystem::path> scan_corpus(const std::filesystem::path& root);

/// Ingests every hour of [first, last] (whole days, inclusive). Hours with no
/// file become missing batches. Files are read by `threads` workers; the
/// result is ordered by hour regardless of scheduling.
std::vector<HourBatch> ingest_range(const std::filesystem::path& root, const DateWindow& days,
                                    const IngestFilter& filter, unsigned threads = 0);

/// Writes lines as a gzip file (used by the synthetic generator and tests).
void write_gzip_lines(const std::filesystem::path& path, const std::vector<std::string>& lines);

/// Reads a gzip file fully. Returns nullopt on open or decompression failure.
std::optional<std::string> read_gzip(const std::filesystem::path& path);

} // namespace wikicast

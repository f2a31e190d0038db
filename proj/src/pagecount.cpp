#include "wikicast/pagecount.hpp"

#include "wikicast/errors.hpp"
#include "wikicast/log.hpp"

#include <zlib.h>

#include <algorithm>
#include <array>
#include <atomic>
#include <charconv>
#include <memory>
#include <thread>

namespace wikicast {

namespace {

bool parse_count(std::string_view token, std::uint64_t& out) {
    if (token.empty()) return false;
    const auto* end = token.data() + token.size();
    const auto [ptr, ec] = std::from_chars(token.data(), end, out);
    return ec == std::errc{} && ptr == end;
}

bool is_hex_upper(char c) { return (c >= '0' && c <= '9') || (c >= 'A' && c <= 'F'); }

bool is_url_safe(unsigned char c) {
    if ((c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9')) return true;
    constexpr std::string_view punctuation = "-_.~!$'()*,/:;@";
    return punctuation.find(static_cast<char>(c)) != std::string_view::npos;
}

struct GzCloser {
    void operator()(gzFile_s* f) const { gzclose(f); }
};
using GzHandle = std::unique_ptr<gzFile_s, GzCloser>;

} // namespace

std::optional<RawRecord> parse_line(std::string_view line, LineError* why) {
    auto fail = [why](LineError e) -> std::optional<RawRecord> {
        if (why) *why = e;
        return std::nullopt;
    };
    if (!line.empty() && line.back() == '\n') line.remove_suffix(1);

    std::array<std::string_view, 4> fields;
    std::size_t count = 0;
    std::size_t start = 0;
    while (true) {
        const auto space = line.find(' ', start);
        const auto token = line.substr(start, space == std::string_view::npos ? std::string_view::npos : space - start);
        if (count == fields.size()) return fail(LineError::field_count);
        fields[count++] = token;
        if (space == std::string_view::npos) break;
        start = space + 1;
    }
    if (count != fields.size()) return fail(LineError::field_count);
    for (const auto& f : fields) {
        if (f.empty()) return fail(LineError::empty_field);
    }

    RawRecord record;
    if (!parse_count(fields[2], record.requests) || !parse_count(fields[3], record.bytes)) {
        return fail(LineError::bad_number);
    }
    record.project = std::string{fields[0]};
    record.title = std::string{fields[1]};
    if (why) *why = LineError::none;
    return record;
}

std::string format_line(const RawRecord& record) {
    return fmt::format("{} {} {} {}", record.project, record.title, record.requests, record.bytes);
}

std::string encode_title(std::string_view utf8_title) {
    if (utf8_title.empty()) {
        throw InputError("cannot encode an empty title");
    }
    constexpr std::string_view hex = "0123456789ABCDEF";
    std::string out;
    out.reserve(utf8_title.size() * 3);
    for (std::size_t i = 0; i < utf8_title.size(); ++i) {
        const auto c = static_cast<unsigned char>(utf8_title[i]);
        if (c == ' ') {
            out.push_back('_');
        } else if (c == '%' && i + 2 < utf8_title.size() && is_hex_upper(utf8_title[i + 1]) &&
                   is_hex_upper(utf8_title[i + 2])) {
            out.push_back('%');
        } else if (is_url_safe(c)) {
            out.push_back(static_cast<char>(c));
        } else {
            out.push_back('%');
            out.push_back(hex[c >> 4]);
            out.push_back(hex[c & 0x0F]);
        }
    }
    return out;
}

bool is_encoded_title(std::string_view title) {
    return !title.empty() && encode_title(title) == title;
}

bool is_language_project(std::string_view project) {
    return !project.empty() && project.find('.') == std::string_view::npos;
}

std::string pagecount_filename(HourStamp hour) {
    return fmt::format("pagecounts-{}-{:02}0000.gz", format_compact_date(hour.date), hour.hour);
}

std::optional<HourStamp> parse_pagecount_filename(std::string_view name) {
    constexpr std::string_view prefix = "pagecounts-";
    constexpr std::string_view suffix = ".gz";
    // pagecounts-YYYYMMDD-HHMMSS.gz
    if (name.size() != prefix.size() + 15 + suffix.size() || !name.starts_with(prefix) ||
        !name.ends_with(suffix)) {
        return std::nullopt;
    }
    const auto stamp = name.substr(prefix.size(), 15);
    if (!std::all_of(stamp.begin() + 9, stamp.end(), [](char c) { return c >= '0' && c <= '9'; })) {
        return std::nullopt;
    }
    try {
        return parse_hour(stamp.substr(0, 11));
    } catch (const InputError&) {
        return std::nullopt;
    }
}

bool IngestFilter::keeps_language(std::string_view language) const {
    return is_language_project(language) && languages.contains(std::string{language});
}

bool IngestFilter::keeps(const std::string& language, const std::string& title) const {
    if (!watch) return true;
    return watch->contains(ArticleKey{language, title});
}

HourBatch missing_hour(HourStamp hour) {
    HourBatch batch;
    batch.hour = hour;
    batch.present = false;
    return batch;
}

HourBatch ingest_text(std::string_view text, HourStamp hour, const IngestFilter& filter) {
    HourBatch batch;
    batch.hour = hour;
    batch.present = true;
    std::size_t start = 0;
    while (start < text.size()) {
        auto end = text.find('\n', start);
        if (end == std::string_view::npos) end = text.size();
        const auto line = text.substr(start, end - start);
        start = end + 1;

        auto record = parse_line(line);
        if (!record) {
            ++batch.rejected;
            continue;
        }
        ++batch.accepted;
        if (!filter.keeps_language(record->project)) continue;
        batch.totals[record->project] += record->requests;
        if (filter.keeps(record->project, record->title)) {
            batch.counts[ArticleKey{std::move(record->project), std::move(record->title)}] += record->requests;
        }
    }
    return batch;
}

std::optional<std::string> read_gzip(const std::filesystem::path& path) {
    GzHandle file{gzopen(path.c_str(), "rb")};
    if (!file) return std::nullopt;
    gzbuffer(file.get(), 1 << 17);

    std::string out;
    std::array<char, 1 << 16> buffer;
    while (true) {
        const int n = gzread(file.get(), buffer.data(), static_cast<unsigned>(buffer.size()));
        if (n < 0) return std::nullopt;
        if (n == 0) break;
        out.append(buffer.data(), static_cast<std::size_t>(n));
    }
    int errnum = Z_OK;
    gzerror(file.get(), &errnum);
    if (errnum != Z_OK && errnum != Z_STREAM_END) return std::nullopt;
    // gzread passes non-gzip input through untouched; a .gz file that is
    // not gzip is corrupt.
    if (gzdirect(file.get()) && path.extension() == ".gz") return std::nullopt;
    return out;
}

void write_gzip_lines(const std::filesystem::path& path, const std::vector<std::string>& lines) {
    GzHandle file{gzopen(path.c_str(), "wb6")};
    if (!file) {
        throw InputError(fmt::format("cannot open '{}' for writing", path.string()));
    }
    for (const auto& line : lines) {
        if (gzwrite(file.get(), line.data(), static_cast<unsigned>(line.size())) != static_cast<int>(line.size()) ||
            gzputc(file.get(), '\n') != '\n') {
            throw InputError(fmt::format("failed writing '{}'", path.string()));
        }
    }
    if (gzclose(file.release()) != Z_OK) {
        throw InputError(fmt::format("failed closing '{}'", path.string()));
    }
}

HourBatch ingest_hour(const std::filesystem::path& path, HourStamp hour, const IngestFilter& filter) {
    std::error_code ec;
    if (!std::filesystem::is_regular_file(path, ec)) {
        log::debug("hour {} missing ({})", format_hour(hour), path.string());
        return missing_hour(hour);
    }
    auto text = read_gzip(path);
    if (!text) {
        log::warn("hour {}: unreadable or corrupt file '{}', treated as missing", format_hour(hour), path.string());
        return missing_hour(hour);
    }
    auto batch = ingest_text(*text, hour, filter);
    if (batch.rejected > 0) {
        log::warn("hour {}: {} malformed line(s) skipped", format_hour(hour), batch.rejected);
    }
    return batch;
}

std::map<HourStamp, std::filesystem::path> scan_corpus(const std::filesystem::path& root) {
    std::map<HourStamp, std::filesystem::path> files;
    if (!std::filesystem::is_directory(root)) {
        throw InputError(fmt::format("corpus directory '{}' not found", root.string()));
    }
    for (const auto& entry : std::filesystem::directory_iterator(root)) {
        if (!entry.is_regular_file()) continue;
        const auto name = entry.path().filename().string();
        if (auto hour = parse_pagecount_filename(name)) {
            auto [it, inserted] = files.emplace(*hour, entry.path());
            // Prefer the on-the-hour name when the server wrote two.
            if (!inserted && name < it->second.filename().string()) it->second = entry.path();
        }
    }
    return files;
}

std::vector<HourBatch> ingest_range(const std::filesystem::path& root, const DateWindow& days,
                                    const IngestFilter& filter, unsigned threads) {
    const auto files = scan_corpus(root);
    const HourStamp first{days.first, 0};
    const auto hours = static_cast<std::size_t>(days.days() * 24);

    std::vector<HourBatch> batches(hours);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < hours; i = next++) {
            const auto hour = first.advanced(static_cast<std::int64_t>(i));
            const auto it = files.find(hour);
            batches[i] = it == files.end() ? missing_hour(hour) : ingest_hour(it->second, hour, filter);
        }
    };

    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(hours, 1)));
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(threads);
        for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    }
    return batches;
}

} // namespace wikicast

#include "wikicast/epi_data.hpp"

#include "wikicast/errors.hpp"
#include "wikicast/pagecount.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fmt/format.h>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace wikicast {

Resolution parse_resolution(std::string_view text) {
    if (text == "daily") return Resolution::daily;
    if (text == "weekly") return Resolution::weekly;
    if (text == "monthly") return Resolution::monthly;
    throw InputError(fmt::format("unknown resolution '{}' (daily, weekly or monthly)", text));
}

std::string_view to_string(Resolution r) {
    switch (r) {
    case Resolution::daily: return "daily";
    case Resolution::weekly: return "weekly";
    case Resolution::monthly: return "monthly";
    }
    return "?";
}

std::string Context::slug() const {
    std::string raw = disease + "-" + (location.empty() ? language : location);
    std::string out;
    for (unsigned char c : raw) {
        if (std::isalnum(c)) {
            out.push_back(static_cast<char>(std::tolower(c)));
        } else if (!out.empty() && out.back() != '-') {
            out.push_back('-');
        }
    }
    while (!out.empty() && out.back() == '-') out.pop_back();
    return out.empty() ? "context" : out;
}

void IncidenceSeries::validate() const {
    if (context.language.empty()) {
        throw InputError("incidence context has no language");
    }
    if (intervals.size() < kMinIncidenceIntervals) {
        throw InputError(fmt::format("incidence series for {} has {} intervals, at least {} required",
                                     context.slug(), intervals.size(), kMinIncidenceIntervals));
    }
    for (std::size_t i = 0; i < intervals.size(); ++i) {
        const auto& iv = intervals[i];
        if (iv.length < 1) throw InputError(fmt::format("interval {} has non-positive length", i));
        if (!(iv.cases >= 0.0) || !std::isfinite(iv.cases)) {
            throw InputError(fmt::format("interval {} has invalid value {}", i, iv.cases));
        }
        if (i > 0 && iv.start < intervals[i - 1].end()) {
            throw InputError(fmt::format("interval {} ({}) overlaps or precedes its predecessor", i,
                                         format_date(iv.start)));
        }
    }
    if (context.study && !(context.study->first < context.study->last)) {
        throw InputError("study start must precede study end");
    }
}

std::vector<double> IncidenceSeries::values() const {
    std::vector<double> out;
    out.reserve(intervals.size());
    for (const auto& iv : intervals) out.push_back(iv.cases);
    return out;
}

Context load_context(const std::filesystem::path& sidecar) {
    std::ifstream in{sidecar};
    if (!in) {
        throw InputError(fmt::format("context file '{}' not found", sidecar.string()));
    }
    boost::property_tree::ptree tree;
    try {
        boost::property_tree::read_ini(in, tree);
    } catch (const boost::property_tree::ini_parser_error& e) {
        throw InputError(fmt::format("{}: {}", sidecar.string(), e.message()));
    }
    auto require = [&](const char* key) {
        auto value = tree.get_optional<std::string>(key);
        if (!value || value->empty()) {
            throw InputError(fmt::format("{}: missing '{}'", sidecar.string(), key));
        }
        return *value;
    };
    Context ctx;
    ctx.disease = require("disease");
    ctx.location = tree.get<std::string>("location", "");
    ctx.language = require("language");
    ctx.resolution = parse_resolution(require("resolution"));
    const auto start = tree.get_optional<std::string>("start");
    const auto end = tree.get_optional<std::string>("end");
    if (start.has_value() != end.has_value()) {
        throw InputError(fmt::format("{}: 'start' and 'end' must be given together", sidecar.string()));
    }
    if (start) {
        ctx.study = DateWindow{parse_date(*start), parse_date(*end)};
        if (!(ctx.study->first < ctx.study->last)) {
            throw InputError(fmt::format("{}: start must precede end", sidecar.string()));
        }
    }
    return ctx;
}

namespace {

int interval_length(Date start, Resolution resolution) {
    switch (resolution) {
    case Resolution::daily: return 1;
    case Resolution::weekly: return 7;
    case Resolution::monthly: return static_cast<int>(days_between(start, add_month(start)));
    }
    return 1;
}

} // namespace

IncidenceSeries load_incidence(const std::filesystem::path& csv, const Context& context) {
    std::ifstream in{csv};
    if (!in) {
        throw InputError(fmt::format("incidence file '{}' not found", csv.string()));
    }
    const auto where = [&](std::size_t line) { return fmt::format("{}:{}", csv.string(), line); };

    std::string line;
    if (!std::getline(in, line) || line != "date,value") {
        throw InputError(fmt::format("{}: expected header 'date,value'", where(1)));
    }

    IncidenceSeries series;
    series.context = context;
    std::size_t line_no = 1;
    std::optional<Date> expected_next;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos || line.find(',', comma + 1) != std::string::npos) {
            throw InputError(fmt::format("{}: expected 'date,value'", where(line_no)));
        }
        Date date;
        try {
            date = parse_date(std::string_view{line}.substr(0, comma));
        } catch (const InputError& e) {
            throw InputError(fmt::format("{}: {}", where(line_no), e.what()));
        }
        double value = 0.0;
        const auto text = std::string_view{line}.substr(comma + 1);
        const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
        if (ec != std::errc{} || ptr != text.data() + text.size() || !std::isfinite(value)) {
            throw InputError(fmt::format("{}: value '{}' is not a number", where(line_no), text));
        }
        if (value < 0.0) {
            throw InputError(fmt::format("{}: negative value {}", where(line_no), value));
        }
        if (!series.intervals.empty()) {
            const Date prev = series.intervals.back().start;
            if (date == prev) throw InputError(fmt::format("{}: duplicate date {}", where(line_no), format_date(date)));
            if (date < prev) throw InputError(fmt::format("{}: date {} out of order", where(line_no), format_date(date)));
            if (date != *expected_next) {
                throw InputError(fmt::format("{}: expected {} after {} for {} data, got {} (gaps must be pre-filled)",
                                             where(line_no), format_date(*expected_next), format_date(prev),
                                             to_string(context.resolution), format_date(date)));
            }
        }
        int length = 0;
        try {
            length = interval_length(date, context.resolution);
        } catch (const InputError& e) {
            throw InputError(fmt::format("{}: {}", where(line_no), e.what()));
        }
        series.intervals.push_back(IncidenceInterval{date, length, value});
        expected_next = add_days(date, length);
    }

    if (context.study) {
        const auto window = *context.study;
        std::erase_if(series.intervals, [&](const IncidenceInterval& iv) {
            return iv.start < window.first || add_days(iv.end(), -1) > window.last;
        });
    }
    if (!series.intervals.empty()) {
        series.context.study = DateWindow{series.intervals.front().start,
                                          add_days(series.intervals.back().end(), -1)};
    }
    try {
        series.validate();
    } catch (const InputError& e) {
        throw InputError(fmt::format("{}: {}", csv.string(), e.what()));
    }
    return series;
}

IncidenceSeries load_incidence(const std::filesystem::path& csv) {
    auto sidecar = csv;
    sidecar.replace_extension(".context");
    return load_incidence(csv, load_context(sidecar));
}

void write_incidence(std::ostream& out, const IncidenceSeries& series) {
    out << "date,value\n";
    for (const auto& iv : series.intervals) {
        out << fmt::format("{},{}\n", format_date(iv.start), iv.cases);
    }
}

void write_context(std::ostream& out, const Context& context) {
    out << fmt::format("disease = {}\n", context.disease);
    if (!context.location.empty()) out << fmt::format("location = {}\n", context.location);
    out << fmt::format("language = {}\n", context.language);
    out << fmt::format("resolution = {}\n", to_string(context.resolution));
    if (context.study) {
        out << fmt::format("start = {}\nend = {}\n", format_date(context.study->first),
                           format_date(context.study->last));
    }
}

CandidateSet::CandidateSet(std::string disease, std::vector<CandidateRow> rows)
    : disease_{std::move(disease)}, rows_{std::move(rows)} {
    std::set<std::pair<std::string, std::string>> seen;
    for (const auto& row : rows_) {
        if (row.english.empty() || row.language.empty()) {
            throw InputError("candidate rows need an english name and a language");
        }
        if (!seen.emplace(row.english, row.language).second) {
            throw InputError(fmt::format("duplicate candidate ({}, {})", row.english, row.language));
        }
        if (row.title && !is_encoded_title(*row.title)) {
            throw InputError(fmt::format("title '{}' for ({}, {}) is not percent-encoded log form", *row.title,
                                         row.english, row.language));
        }
    }
}

std::vector<std::string> CandidateSet::english_names() const {
    std::vector<std::string> names;
    std::set<std::string> seen;
    for (const auto& row : rows_) {
        if (seen.insert(row.english).second) names.push_back(row.english);
    }
    return names;
}

std::vector<std::string> CandidateSet::languages() const {
    std::set<std::string> langs;
    for (const auto& row : rows_) langs.insert(row.language);
    return {langs.begin(), langs.end()};
}

std::vector<Candidate> CandidateSet::view(std::string_view language) const {
    std::vector<Candidate> out;
    for (const auto& row : rows_) {
        if (row.language == language && row.title) out.push_back(Candidate{row.english, *row.title});
    }
    return out;
}

CandidateSet parse_candidates(std::istream& in, std::string disease, std::string_view source) {
    std::vector<CandidateRow> rows;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::vector<std::string> fields;
        std::size_t start = 0;
        while (true) {
            const auto tab = line.find('\t', start);
            fields.push_back(line.substr(start, tab == std::string::npos ? std::string::npos : tab - start));
            if (tab == std::string::npos) break;
            start = tab + 1;
        }
        if (fields.size() != 3) {
            throw InputError(fmt::format("{}:{}: expected 3 tab-separated fields, got {}", source, line_no,
                                         fields.size()));
        }
        CandidateRow row{fields[0], fields[1], std::nullopt};
        if (fields[2] != kAbsentTitle) row.title = fields[2];
        rows.push_back(std::move(row));
    }
    try {
        return CandidateSet{std::move(disease), std::move(rows)};
    } catch (const InputError& e) {
        throw InputError(fmt::format("{}: {}", source, e.what()));
    }
}

CandidateSet load_candidates(const std::filesystem::path& path, std::string disease) {
    std::ifstream in{path};
    if (!in) {
        throw InputError(fmt::format("candidate file '{}' not found", path.string()));
    }
    if (disease.empty()) disease = path.stem().string();
    return parse_candidates(in, std::move(disease), path.string());
}

void write_candidates(std::ostream& out, const CandidateSet& set) {
    for (const auto& row : set.rows()) {
        out << row.english << '\t' << row.language << '\t' << (row.title ? *row.title : std::string{kAbsentTitle})
            << '\n';
    }
}

} // namespace wikicast

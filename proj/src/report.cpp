#include "wikicast/report.hpp"

#include "wikicast/errors.hpp"

#include <fmt/format.h>
#include <fmt/ranges.h>

#include <charconv>
#include <istream>
#include <ostream>
#include <vector>

namespace wikicast {

namespace {

std::string optional_number(const std::optional<double>& v) { return v ? fmt::format("{}", *v) : std::string{}; }

// Minimal splitter for the files this module writes: handles quoted fields.
std::vector<std::string> split_csv(std::string_view line) {
    std::vector<std::string> fields(1);
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                fields.back().push_back('"');
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                fields.back().push_back(c);
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.emplace_back();
        } else {
            fields.back().push_back(c);
        }
    }
    return fields;
}

} // namespace

std::string csv_field(std::string_view field) {
    if (field.find_first_of(",\"\n\r") == std::string_view::npos) return std::string{field};
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out.push_back('"');
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

void write_model_report(std::ostream& out, const LagScanResult& scan) {
    out << "offset,r2,n,rank_deficient,selected,english,coefficients,note\n";
    for (const auto& m : scan.models) {
        std::vector<std::string> titles;
        std::vector<std::string> names;
        for (const auto& s : m.selected) {
            titles.push_back(s.title);
            names.push_back(s.english);
        }
        std::vector<std::string> coefficients;
        for (double c : m.coefficients) coefficients.push_back(fmt::format("{}", c));
        out << fmt::format("{},{},{},{},{},{},{},{}\n", m.offset, optional_number(m.r_squared), m.rows.size(),
                           m.rank_deficient ? 1 : 0, csv_field(fmt::format("{}", fmt::join(titles, "|"))),
                           csv_field(fmt::format("{}", fmt::join(names, "|"))),
                           fmt::format("{}", fmt::join(coefficients, "|")), csv_field(m.degenerate_reason));
    }
}

void write_summary_header(std::ostream& out) {
    out << "disease,location,language,r2_0,r2_7,r2_14,r2_28,best_offset,best_r2\n";
}

void write_summary_row(std::ostream& out, const LagScanResult& scan) {
    auto r2_at = [&](int offset) {
        const auto* m = scan.at(offset);
        return m ? optional_number(m->r_squared) : std::string{};
    };
    out << fmt::format("{},{},{},{},{},{},{},{},{}\n", csv_field(scan.context.disease),
                       csv_field(scan.context.location), csv_field(scan.context.language), r2_at(0), r2_at(7),
                       r2_at(14), r2_at(28), scan.best_offset ? fmt::format("{}", *scan.best_offset) : std::string{},
                       optional_number(scan.best_r_squared));
}

void write_correlations(std::ostream& out, const LagModel& model) {
    out << "rank,english,title,r,n\n";
    for (std::size_t i = 0; i < model.correlations.size(); ++i) {
        const auto& c = model.correlations[i];
        out << fmt::format("{},{},{},{},{}\n", i + 1, csv_field(c.english), csv_field(c.title), c.r, c.n);
    }
}

std::map<std::string, double> read_correlations(std::istream& in, std::string_view source) {
    std::string line;
    if (!std::getline(in, line) || line != "rank,english,title,r,n") {
        throw InputError(fmt::format("{}: not a correlation report", source));
    }
    std::map<std::string, double> out;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto fields = split_csv(line);
        if (fields.size() != 5) throw InputError(fmt::format("{}:{}: expected 5 fields", source, line_no));
        double r = 0.0;
        const auto& text = fields[3];
        const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), r);
        if (ec != std::errc{} || ptr != text.data() + text.size()) {
            throw InputError(fmt::format("{}:{}: bad correlation '{}'", source, line_no, text));
        }
        out.emplace(fields[1].empty() ? fields[2] : fields[1], r);
    }
    return out;
}

void write_fit_curve(std::ostream& out, const LagModel& model) {
    out << "date,observed,fitted\n";
    for (std::size_t i = 0; i < model.rows.size(); ++i) {
        out << fmt::format("{},{},{}\n", format_date(model.rows[i]), model.observed[i], model.fitted[i]);
    }
}

void write_transfer_report(std::ostream& out, std::span<const TransferScore> scores) {
    out << "disease,location_1,location_2,r_t,shared\n";
    for (const auto& s : scores) {
        out << fmt::format("{},{},{},{},{}\n", csv_field(s.disease), csv_field(s.location_a),
                           csv_field(s.location_b), s.r_t ? fmt::format("{}", *s.r_t) : std::string{"n/a"},
                           s.shared);
    }
}

} // namespace wikicast

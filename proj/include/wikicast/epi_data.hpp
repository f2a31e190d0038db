#pragma once

#include "wikicast/calendar.hpp"

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace wikicast {

enum class Resolution { daily, weekly, monthly };

Resolution parse_resolution(std::string_view text);
std::string_view to_string(Resolution r);

/// One disease-location context: which language edition stands in for the
/// location and at what granularity the official data are reported.
struct Context {
    std::string disease;
    std::string location;
    std::string language;
    Resolution resolution = Resolution::weekly;
    /// Inclusive study period. Unset in a sidecar means "all rows"; always
    /// set on a loaded IncidenceSeries.
    std::optional<DateWindow> study;

    /// `disease-location`, lowercased, for file names.
    std::string slug() const;
};

struct IncidenceInterval {
    Date start{};
    int length = 1;  // days
    double cases = 0.0;

    Date end() const { return add_days(start, length); }  // exclusive
};

/// Minimum interval count for a meaningful fit.
inline constexpr std::size_t kMinIncidenceIntervals = 8;

struct IncidenceSeries {
    Context context;
    std::vector<IncidenceInterval> intervals;

    /// Throws InputError on ordering, overlap, negative values or too few rows.
    void validate() const;

    std::vector<double> values() const;
};

/// Reads `key = value` lines: disease, location, language, resolution and
/// optional start/end (ISO dates) restricting the rows used.
Context load_context(const std::filesystem::path& sidecar);

/// `date,value` CSV. Interval lengths follow the context resolution;
/// weekly intervals are anchored at the first row, monthly rows must keep
/// the same day of month. Gaps are rejected.
IncidenceSeries load_incidence(const std::filesystem::path& csv, const Context& context);

/// Same, with the sidecar found next to the CSV (`name.csv` → `name.context`).
IncidenceSeries load_incidence(const std::filesystem::path& csv);

void write_incidence(std::ostream& out, const IncidenceSeries& series);
void write_context(std::ostream& out, const Context& context);

/// Marker for "no article in this language" in candidate files.
inline constexpr std::string_view kAbsentTitle = "-";

struct CandidateRow {
    std::string english;
    std::string language;
    std::optional<std::string> title;  // encoded; nullopt when absent
};

struct Candidate {
    std::string english;
    std::string title;
};

/// Cross-language article mapping for one disease.
class CandidateSet {
public:
    CandidateSet() = default;
    CandidateSet(std::string disease, std::vector<CandidateRow> rows);

    const std::string& disease() const { return disease_; }
    const std::vector<CandidateRow>& rows() const { return rows_; }

    /// English names in first-appearance order; size is the candidate count.
    std::vector<std::string> english_names() const;
    std::vector<std::string> languages() const;

    /// Candidates present in `language`, absent ones omitted.
    std::vector<Candidate> view(std::string_view language) const;

private:
    std::string disease_;
    std::vector<CandidateRow> rows_;
};

/// Tab-separated `english<TAB>language<TAB>title-or-'-'`. Throws InputError
/// on duplicate (english, language) pairs or titles not in log form.
CandidateSet load_candidates(const std::filesystem::path& path, std::string disease = {});
CandidateSet parse_candidates(std::istream& in, std::string disease, std::string_view source = "<stream>");
void write_candidates(std::ostream& out, const CandidateSet& set);

} // namespace wikicast

#pragma once

// CSV report writers. Numbers are written in shortest round-trip form so a
// report is a deterministic function of the model values.

#include "wikicast/modeling.hpp"
#include "wikicast/transfer.hpp"

#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <string_view>

namespace wikicast {

/// RFC 4180 quoting when the field holds a comma, quote or newline.
std::string csv_field(std::string_view field);

/// offset,r2,n,rank_deficient,selected,english,coefficients,note; one row per
/// offset. Lists are '|'-joined; r2 is empty for degenerate offsets.
void write_model_report(std::ostream& out, const LagScanResult& scan);

/// r2 at offsets 0/7/14/28 plus the best offset and its r2.
void write_summary_header(std::ostream& out);
void write_summary_row(std::ostream& out, const LagScanResult& scan);

/// rank,english,title,r,n
void write_correlations(std::ostream& out, const LagModel& model);
/// english → r from a write_correlations file.
std::map<std::string, double> read_correlations(std::istream& in, std::string_view source = "<stream>");

/// date,observed,fitted for plotting a model against the official series.
void write_fit_curve(std::ostream& out, const LagModel& model);

/// disease,location_1,location_2,r_t,shared; r_t is "n/a" when unavailable.
void write_transfer_report(std::ostream& out, std::span<const TransferScore> scores);

} // namespace wikicast

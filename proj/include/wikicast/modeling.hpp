#pragma once

// Article ranking, no-intercept least-squares models and the lag scan.
//
// Models have the form M = sum_j alpha_j * x_j over the selected articles'
// aligned interval values. There is deliberately NO intercept term and no
// other covariate. r^2 is reported as the squared Pearson correlation of
// fitted and observed values, which stays within [0, 1] for no-intercept
// fits where the coefficient-of-determination form can go negative.

#include "wikicast/epi_data.hpp"
#include "wikicast/series.hpp"

#include <Eigen/Dense>

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace wikicast {

/// Sample Pearson correlation, clamped to [-1, 1]. Returns nullopt when
/// either vector is constant. Throws std::invalid_argument for unequal
/// lengths or fewer than 3 points.
std::optional<double> pearson(std::span<const double> x, std::span<const double> y);

struct CorrelationResult {
    std::string title;    // encoded local title
    std::string english;  // cross-language key; may be empty
    double r = 0.0;
    std::size_t n = 0;    // paired intervals
};

/// One candidate article's values aligned to the incidence intervals.
struct CandidateColumn {
    std::string english;
    std::string title;
    IntervalSeries values;
};

/// Correlates every candidate with the incidence over the intervals where
/// both sides have values (and `rows`, when given, is true). Candidates with
/// an undefined correlation or fewer than 3 pairs are dropped. Result is
/// ordered by decreasing |r|, ties by title.
std::vector<CorrelationResult> rank_candidates(std::span<const CandidateColumn> candidates,
                                               const IncidenceSeries& incidence,
                                               const std::vector<bool>* rows = nullptr);

/// First `k` of rank_candidates. Throws DegenerateError when no candidate
/// is usable.
std::vector<CorrelationResult> select_articles(std::span<const CandidateColumn> candidates,
                                               const IncidenceSeries& incidence, std::size_t k = 10);

struct OlsFit {
    Eigen::VectorXd coefficients;
    Eigen::VectorXd fitted;
    std::optional<double> r_squared;  // nullopt: fitted values constant or fewer than 3 rows
    Eigen::Index rank = 0;
    bool rank_deficient = false;

    bool degenerate() const { return !r_squared.has_value(); }
};

/// Minimum-norm least squares for X * alpha ~ y without intercept.
/// Throws std::invalid_argument when rows < columns or shapes disagree and
/// DegenerateError when y is constant.
OlsFit fit_ols(const Eigen::MatrixXd& X, const Eigen::VectorXd& y);

/// A candidate's normalized daily series plus its cross-language key.
struct CandidateSeries {
    std::string english;
    DailySeries series;
};

struct ModelOptions {
    std::size_t top_k = 10;
    /// Fraction of trailing intervals held out for evaluation; 0 evaluates
    /// in-sample over the full study period.
    double holdout_fraction = 0.0;
    /// Shifted dates outside this window are dropped.
    std::optional<DateWindow> window;
    unsigned threads = 0;
};

struct LagModel {
    int offset = 0;
    std::vector<CorrelationResult> selected;
    std::vector<double> coefficients;
    std::vector<Date> rows;  // interval starts used for the fit
    std::vector<double> observed;
    std::vector<double> fitted;
    std::optional<double> r_squared;
    bool rank_deficient = false;
    /// Every usable candidate at this offset, ranked.
    std::vector<CorrelationResult> correlations;
    /// Empty unless the model could not be built or evaluated.
    std::string degenerate_reason;

    bool degenerate() const { return !r_squared.has_value(); }
};

/// Shift, align, rank, select and fit at one offset. Throws DegenerateError
/// when nothing usable remains.
LagModel build_lag_model(std::span<const CandidateSeries> candidates, const IncidenceSeries& incidence, int offset,
                         const ModelOptions& options = {});

inline constexpr int kMaxLagDays = 28;

struct LagScanResult {
    Context context;
    std::vector<LagModel> models;  // ascending offset
    std::optional<int> best_offset;
    std::optional<double> best_r_squared;

    const LagModel* at(int offset) const;
};

/// One independent model per offset in [min_offset, max_offset]. Offsets
/// that cannot be modeled are kept as degenerate entries. The best model
/// maximises r^2; ties go to the offset nearest zero, then the positive one.
LagScanResult lag_scan(std::span<const CandidateSeries> candidates, const IncidenceSeries& incidence,
                       int min_offset = -kMaxLagDays, int max_offset = kMaxLagDays, const ModelOptions& options = {});

} // namespace wikicast

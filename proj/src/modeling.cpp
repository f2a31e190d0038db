#include "wikicast/modeling.hpp"

#include "wikicast/errors.hpp"
#include "wikicast/log.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <stdexcept>
#include <thread>

namespace wikicast {

std::optional<double> pearson(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) {
        throw std::invalid_argument(fmt::format("pearson: length mismatch ({} vs {})", x.size(), y.size()));
    }
    const std::size_t n = x.size();
    if (n < 3) {
        throw std::invalid_argument(fmt::format("pearson: need at least 3 points, got {}", n));
    }
    const auto constant = [](std::span<const double> v) {
        return std::all_of(v.begin(), v.end(), [&](double a) { return a == v.front(); });
    };
    if (constant(x) || constant(y)) return std::nullopt;

    double mx = 0.0;
    double my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);

    double sxy = 0.0;
    double sxx = 0.0;
    double syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = x[i] - mx;
        const double dy = y[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0.0 || syy == 0.0) return std::nullopt;
    return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

std::vector<CorrelationResult> rank_candidates(std::span<const CandidateColumn> candidates,
                                               const IncidenceSeries& incidence, const std::vector<bool>* rows) {
    std::vector<CorrelationResult> ranked;
    std::vector<double> xs;
    std::vector<double> ys;
    for (const auto& candidate : candidates) {
        const auto& ivs = candidate.values.intervals;
        if (ivs.size() != incidence.intervals.size()) {
            throw std::invalid_argument(fmt::format("candidate {} is not aligned to the incidence", candidate.title));
        }
        xs.clear();
        ys.clear();
        for (std::size_t i = 0; i < ivs.size(); ++i) {
            if (!ivs[i].covered || (rows && !(*rows)[i])) continue;
            xs.push_back(ivs[i].value);
            ys.push_back(incidence.intervals[i].cases);
        }
        if (xs.size() < 3) continue;
        if (const auto r = pearson(xs, ys)) {
            ranked.push_back(CorrelationResult{candidate.title, candidate.english, *r, xs.size()});
        }
    }
    std::sort(ranked.begin(), ranked.end(), [](const CorrelationResult& a, const CorrelationResult& b) {
        const double ma = std::abs(a.r);
        const double mb = std::abs(b.r);
        if (ma != mb) return ma > mb;
        return a.title < b.title;
    });
    return ranked;
}

std::vector<CorrelationResult> select_articles(std::span<const CandidateColumn> candidates,
                                               const IncidenceSeries& incidence, std::size_t k) {
    auto ranked = rank_candidates(candidates, incidence);
    if (ranked.empty()) {
        throw DegenerateError("no candidate article has a defined correlation with the incidence");
    }
    if (ranked.size() > k) ranked.resize(k);
    return ranked;
}

OlsFit fit_ols(const Eigen::MatrixXd& X, const Eigen::VectorXd& y) {
    if (X.rows() != y.size()) {
        throw std::invalid_argument("fit_ols: X and y row counts differ");
    }
    if (X.cols() == 0) {
        throw std::invalid_argument("fit_ols: no columns");
    }
    if (X.rows() < X.cols()) {
        throw std::invalid_argument(fmt::format(
            "fit_ols: {} observations for {} articles; reduce the number of selected articles", X.rows(), X.cols()));
    }
    if (y.size() == 0 || (y.array() == y(0)).all()) {
        throw DegenerateError("fit_ols: observed series is constant, r^2 undefined");
    }

    OlsFit fit;
    const Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(X);
    fit.rank = cod.rank();
    fit.rank_deficient = fit.rank < X.cols();
    fit.coefficients = cod.solve(y);
    fit.fitted = X * fit.coefficients;

    if (fit.fitted.norm() <= 1e-12 * y.norm()) {
        // y has no component in the column space.
        fit.coefficients.setZero();
        fit.fitted.setZero();
        return fit;
    }
    if (y.size() < 3) return fit;
    const auto r = pearson(std::span<const double>{fit.fitted.data(), static_cast<std::size_t>(fit.fitted.size())},
                           std::span<const double>{y.data(), static_cast<std::size_t>(y.size())});
    if (r) fit.r_squared = *r * *r;
    return fit;
}

LagModel build_lag_model(std::span<const CandidateSeries> candidates, const IncidenceSeries& incidence, int offset,
                         const ModelOptions& options) {
    if (options.top_k == 0) {
        throw std::invalid_argument("top_k must be positive");
    }
    LagModel model;
    model.offset = offset;

    std::vector<CandidateColumn> columns;
    columns.reserve(candidates.size());
    for (const auto& c : candidates) {
        columns.push_back(CandidateColumn{c.english, c.series.title,
                                          align(shift_days(c.series, offset, options.window), incidence)});
    }

    const std::size_t intervals = incidence.intervals.size();
    std::vector<bool> training(intervals, true);
    std::vector<bool> holdout(intervals, false);
    if (options.holdout_fraction > 0.0) {
        if (options.holdout_fraction >= 1.0) throw std::invalid_argument("holdout fraction must be below 1");
        const auto kept = static_cast<std::size_t>(std::floor((1.0 - options.holdout_fraction) * intervals));
        for (std::size_t i = kept; i < intervals; ++i) {
            training[i] = false;
            holdout[i] = true;
        }
    }

    model.correlations = rank_candidates(columns, incidence, &training);
    if (model.correlations.empty()) {
        throw DegenerateError(fmt::format("offset {}: no candidate article has a defined correlation", offset));
    }
    model.selected.assign(model.correlations.begin(),
                          model.correlations.begin() +
                              static_cast<std::ptrdiff_t>(std::min(options.top_k, model.correlations.size())));

    std::vector<const CandidateColumn*> chosen;
    for (const auto& s : model.selected) {
        const auto it = std::find_if(columns.begin(), columns.end(),
                                     [&](const CandidateColumn& c) { return c.title == s.title; });
        chosen.push_back(&*it);
    }
    const auto usable = [&](std::size_t i) {
        return std::all_of(chosen.begin(), chosen.end(),
                           [&](const CandidateColumn* c) { return c->values.intervals[i].covered; });
    };
    const auto build_design = [&](const std::vector<bool>& mask, std::vector<std::size_t>& index) {
        for (std::size_t i = 0; i < intervals; ++i) {
            if (mask[i] && usable(i)) index.push_back(i);
        }
        Eigen::MatrixXd X(static_cast<Eigen::Index>(index.size()), static_cast<Eigen::Index>(chosen.size()));
        Eigen::VectorXd y(static_cast<Eigen::Index>(index.size()));
        for (std::size_t r = 0; r < index.size(); ++r) {
            for (std::size_t c = 0; c < chosen.size(); ++c) {
                X(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
                    chosen[c]->values.intervals[index[r]].value;
            }
            y(static_cast<Eigen::Index>(r)) = incidence.intervals[index[r]].cases;
        }
        return std::pair{std::move(X), std::move(y)};
    };

    std::vector<std::size_t> fit_rows;
    auto [X, y] = build_design(training, fit_rows);
    if (X.rows() < X.cols()) {
        throw DegenerateError(fmt::format("offset {}: {} usable intervals for {} articles; use a smaller k", offset,
                                          X.rows(), X.cols()));
    }
    const OlsFit fit = fit_ols(X, y);
    if (fit.rank_deficient) {
        log::warn("offset {}: design matrix has rank {} < {}, using the minimum-norm solution", offset, fit.rank,
                  X.cols());
    }
    model.rank_deficient = fit.rank_deficient;
    model.coefficients.assign(fit.coefficients.data(), fit.coefficients.data() + fit.coefficients.size());

    if (options.holdout_fraction > 0.0) {
        std::vector<std::size_t> eval_rows;
        auto [Xh, yh] = build_design(holdout, eval_rows);
        const Eigen::VectorXd predicted = Xh * fit.coefficients;
        for (std::size_t r = 0; r < eval_rows.size(); ++r) {
            model.rows.push_back(incidence.intervals[eval_rows[r]].start);
            model.observed.push_back(yh(static_cast<Eigen::Index>(r)));
            model.fitted.push_back(predicted(static_cast<Eigen::Index>(r)));
        }
        if (eval_rows.size() >= 3) {
            if (const auto r = pearson(model.fitted, model.observed)) model.r_squared = *r * *r;
        }
        if (!model.r_squared) model.degenerate_reason = "holdout evaluation undefined";
    } else {
        for (std::size_t r = 0; r < fit_rows.size(); ++r) {
            model.rows.push_back(incidence.intervals[fit_rows[r]].start);
            model.observed.push_back(y(static_cast<Eigen::Index>(r)));
            model.fitted.push_back(fit.fitted(static_cast<Eigen::Index>(r)));
        }
        model.r_squared = fit.r_squared;
        if (!model.r_squared) model.degenerate_reason = "fitted values constant";
    }
    return model;
}

const LagModel* LagScanResult::at(int offset) const {
    const auto it = std::find_if(models.begin(), models.end(), [&](const LagModel& m) { return m.offset == offset; });
    return it == models.end() ? nullptr : &*it;
}

namespace {

bool better_offset(double r2, int offset, double best_r2, int best_offset) {
    if (r2 != best_r2) return r2 > best_r2;
    const int a = std::abs(offset);
    const int b = std::abs(best_offset);
    if (a != b) return a < b;
    return offset > best_offset;
}

} // namespace

LagScanResult lag_scan(std::span<const CandidateSeries> candidates, const IncidenceSeries& incidence, int min_offset,
                       int max_offset, const ModelOptions& options) {
    if (min_offset > max_offset) {
        throw std::invalid_argument("lag_scan: empty offset range");
    }
    LagScanResult result;
    result.context = incidence.context;
    const auto count = static_cast<std::size_t>(max_offset - min_offset + 1);
    result.models.resize(count);

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < count; i = next++) {
            const int offset = min_offset + static_cast<int>(i);
            try {
                result.models[i] = build_lag_model(candidates, incidence, offset, options);
            } catch (const DegenerateError& e) {
                result.models[i] = LagModel{};
                result.models[i].offset = offset;
                result.models[i].degenerate_reason = e.what();
            }
        }
    };
    unsigned threads = options.threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : options.threads;
    threads = std::min<unsigned>(threads, static_cast<unsigned>(count));
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    }

    for (const auto& m : result.models) {
        if (!m.r_squared) continue;
        if (!result.best_offset || better_offset(*m.r_squared, m.offset, *result.best_r_squared, *result.best_offset)) {
            result.best_offset = m.offset;
            result.best_r_squared = m.r_squared;
        }
    }
    return result;
}

} // namespace wikicast

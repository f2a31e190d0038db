#pragma once

#include "wikicast/modeling.hpp"

#include <map>
#include <optional>
#include <string>

namespace wikicast {

/// Pearson needs three points; fewer shared articles means "not available".
inline constexpr std::size_t kMinSharedArticles = 3;

struct TransferScore {
    std::string disease;
    std::string location_a;
    std::string location_b;
    std::optional<double> r_t;  // nullopt: not enough shared articles, or no variance
    std::size_t shared = 0;
};

/// Meta-correlation between two same-disease models: Pearson's r over the
/// per-article correlations of the articles both maps contain. Keys are the
/// cross-language (english) names; articles in only one map are ignored.
TransferScore compute_rt(const std::map<std::string, double>& corrs_a, const std::map<std::string, double>& corrs_b,
                         std::size_t min_shared = kMinSharedArticles);

/// english name → r for every ranked candidate of a model.
std::map<std::string, double> correlations_by_name(const LagModel& model);

} // namespace wikicast

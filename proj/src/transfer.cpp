#include "wikicast/transfer.hpp"

#include <vector>

namespace wikicast {

TransferScore compute_rt(const std::map<std::string, double>& corrs_a, const std::map<std::string, double>& corrs_b,
                         std::size_t min_shared) {
    std::vector<double> a;
    std::vector<double> b;
    for (const auto& [name, r] : corrs_a) {
        if (const auto it = corrs_b.find(name); it != corrs_b.end()) {
            a.push_back(r);
            b.push_back(it->second);
        }
    }
    TransferScore score;
    score.shared = a.size();
    if (a.size() >= std::max<std::size_t>(min_shared, 3)) score.r_t = pearson(a, b);
    return score;
}

std::map<std::string, double> correlations_by_name(const LagModel& model) {
    std::map<std::string, double> out;
    for (const auto& c : model.correlations) {
        out.emplace(c.english.empty() ? c.title : c.english, c.r);
    }
    return out;
}

} // namespace wikicast

#pragma once

#include "wikicast/modeling.hpp"
#include "wikicast/store.hpp"
#include "wikicast/transfer.hpp"

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace wikicast {

struct ContextConfig {
    std::string id;  // section name; used in report file names
    std::filesystem::path incidence;
    std::filesystem::path candidates;
};

/// INI-style config. Relative paths resolve against the config file's
/// directory.
///
///     [corpus]   root, start, end, languages (comma list), threads
///     [store]    dir (optional; persist the daily store there)
///     [model]    min_offset, max_offset, top_k, holdout
///     [output]   dir
///     [context <id>]        incidence, candidates
///     [aliases <language>]  <canonical title> = <title>,<title>,...
struct PipelineConfig {
    std::filesystem::path corpus_root;
    DateWindow study{};
    std::vector<std::string> languages;
    unsigned threads = 0;
    std::optional<std::filesystem::path> store_dir;
    int min_offset = -kMaxLagDays;
    int max_offset = kMaxLagDays;
    std::size_t top_k = 10;
    double holdout = 0.0;
    std::filesystem::path output_dir;
    std::vector<ContextConfig> contexts;
    std::map<std::string, std::map<std::string, std::vector<std::string>>> aliases;
};

/// Throws InputError on unreadable or inconsistent configs.
PipelineConfig load_config(const std::filesystem::path& path);

/// Candidate series for one context's language, with alias groups merged
/// and repeated local titles dropped.
std::vector<CandidateSeries> candidate_series(
    const DailyStore& store, const CandidateSet& candidates, const std::string& language,
    const std::map<std::string, std::vector<std::string>>& aliases = {});

/// Watch list covering candidates and alias members of the given languages.
std::set<ArticleKey> watch_list(const std::vector<CandidateSet>& candidate_sets,
                                const std::set<std::string>& languages,
                                const std::map<std::string, std::map<std::string, std::vector<std::string>>>& aliases);

/// Ingest → normalized daily store for the configured window.
DailyStore build_daily_store(const std::filesystem::path& corpus_root, const DateWindow& study,
                             const std::set<std::string>& languages, const std::optional<std::set<ArticleKey>>& watch,
                             unsigned threads = 0);

struct PipelineResult {
    std::vector<LagScanResult> scans;
    std::vector<TransferScore> transfers;
    std::vector<std::filesystem::path> reports;
    /// 0: every context produced a model; 2: some context was degenerate at
    /// every offset.
    int exit_code = 0;
};

/// Full run: ingest, store, lag scan per context, transferability between
/// same-disease contexts, CSV reports. Throws InputError naming any missing
/// input file.
PipelineResult run_pipeline(const PipelineConfig& config);

} // namespace wikicast

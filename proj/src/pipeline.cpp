#include "wikicast/pipeline.hpp"

#include "wikicast/errors.hpp"
#include "wikicast/log.hpp"
#include "wikicast/report.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fmt/format.h>

#include <algorithm>
#include <charconv>
#include <fstream>
#include <set>

namespace wikicast {

namespace {

namespace fs = std::filesystem;
namespace pt = boost::property_tree;

std::vector<std::string> split_list(std::string_view text) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start <= text.size()) {
        auto comma = text.find(',', start);
        if (comma == std::string_view::npos) comma = text.size();
        auto item = text.substr(start, comma - start);
        while (!item.empty() && item.front() == ' ') item.remove_prefix(1);
        while (!item.empty() && item.back() == ' ') item.remove_suffix(1);
        if (!item.empty()) out.emplace_back(item);
        start = comma + 1;
    }
    return out;
}

template <typename T>
T get_number(const pt::ptree& section, const char* key, T fallback, const std::string& where) {
    const auto text = section.get_optional<std::string>(key);
    if (!text) return fallback;
    T value{};
    const auto [ptr, ec] = std::from_chars(text->data(), text->data() + text->size(), value);
    if (ec != std::errc{} || ptr != text->data() + text->size()) {
        throw InputError(fmt::format("{}: '{}' is not a valid number for '{}'", where, *text, key));
    }
    return value;
}

const LagModel* nowcast_or_nearest(const LagScanResult& scan) {
    const LagModel* best = nullptr;
    for (const auto& m : scan.models) {
        if (m.correlations.empty()) continue;
        if (!best || std::abs(m.offset) < std::abs(best->offset) ||
            (std::abs(m.offset) == std::abs(best->offset) && m.offset > best->offset)) {
            best = &m;
        }
    }
    return best;
}

std::ofstream open_report(const fs::path& path, std::vector<fs::path>& written) {
    std::ofstream out{path, std::ios::binary};
    if (!out) throw InputError(fmt::format("cannot write report '{}'", path.string()));
    written.push_back(path);
    return out;
}

} // namespace

PipelineConfig load_config(const fs::path& path) {
    std::ifstream in{path};
    if (!in) throw InputError(fmt::format("config file '{}' not found", path.string()));
    pt::ptree tree;
    try {
        pt::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        throw InputError(fmt::format("{}:{}: {}", path.string(), e.line(), e.message()));
    }
    const auto base = path.parent_path();
    const auto resolve = [&](const std::string& p) { return fs::path{p}.is_absolute() ? fs::path{p} : base / p; };
    const auto where = path.string();

    PipelineConfig cfg;
    const auto corpus = tree.get_child_optional("corpus");
    if (!corpus) throw InputError(fmt::format("{}: missing [corpus] section", where));
    const auto require = [&](const pt::ptree& section, const char* name, const char* key) {
        const auto value = section.get_optional<std::string>(key);
        if (!value || value->empty()) throw InputError(fmt::format("{}: [{}] needs '{}'", where, name, key));
        return *value;
    };
    cfg.corpus_root = resolve(require(*corpus, "corpus", "root"));
    cfg.study = DateWindow{parse_date(require(*corpus, "corpus", "start")), parse_date(require(*corpus, "corpus", "end"))};
    if (cfg.study.last < cfg.study.first) throw InputError(fmt::format("{}: corpus end precedes start", where));
    cfg.languages = split_list(require(*corpus, "corpus", "languages"));
    cfg.threads = get_number<unsigned>(*corpus, "threads", 0, where);

    if (const auto store = tree.get_child_optional("store")) {
        if (const auto dir = store->get_optional<std::string>("dir")) cfg.store_dir = resolve(*dir);
    }
    if (const auto model = tree.get_child_optional("model")) {
        cfg.min_offset = get_number<int>(*model, "min_offset", -kMaxLagDays, where);
        cfg.max_offset = get_number<int>(*model, "max_offset", kMaxLagDays, where);
        cfg.top_k = get_number<std::size_t>(*model, "top_k", 10, where);
        cfg.holdout = get_number<double>(*model, "holdout", 0.0, where);
    }
    if (cfg.min_offset > cfg.max_offset) throw InputError(fmt::format("{}: min_offset exceeds max_offset", where));
    if (std::max(std::abs(cfg.min_offset), std::abs(cfg.max_offset)) > kMaxLagDays) {
        throw InputError(fmt::format("{}: offsets are limited to +/-{} days", where, kMaxLagDays));
    }
    if (cfg.top_k == 0) throw InputError(fmt::format("{}: top_k must be positive", where));
    if (!(cfg.holdout >= 0.0 && cfg.holdout < 1.0)) throw InputError(fmt::format("{}: holdout must be in [0, 1)", where));

    const auto output = tree.get_child_optional("output");
    cfg.output_dir = resolve(output ? output->get<std::string>("dir", "reports") : "reports");

    for (const auto& [name, section] : tree) {
        if (name.starts_with("context ")) {
            ContextConfig ctx;
            ctx.id = name.substr(8);
            ctx.incidence = resolve(require(section, name.c_str(), "incidence"));
            ctx.candidates = resolve(require(section, name.c_str(), "candidates"));
            cfg.contexts.push_back(std::move(ctx));
        } else if (name.starts_with("aliases ")) {
            auto& groups = cfg.aliases[name.substr(8)];
            for (const auto& [canonical, members] : section) {
                groups[canonical] = split_list(members.data());
                if (groups[canonical].empty()) {
                    throw InputError(fmt::format("{}: alias group '{}' is empty", where, canonical));
                }
            }
        } else if (name != "corpus" && name != "store" && name != "model" && name != "output") {
            throw InputError(fmt::format("{}: unknown section [{}]", where, name));
        }
    }
    if (cfg.contexts.empty()) throw InputError(fmt::format("{}: no [context ...] sections", where));
    return cfg;
}

std::vector<CandidateSeries> candidate_series(const DailyStore& store, const CandidateSet& candidates,
                                              const std::string& language,
                                              const std::map<std::string, std::vector<std::string>>& aliases) {
    std::vector<CandidateSeries> out;
    std::set<std::string> seen;
    for (const auto& c : candidates.view(language)) {
        if (!seen.insert(c.title).second) {
            log::warn("{}: '{}' is listed for more than one candidate; keeping '{}'", language, c.title, c.english);
            continue;
        }
        if (const auto group = aliases.find(c.title); group != aliases.end()) {
            std::vector<DailySeries> members;
            for (const auto& title : group->second) members.push_back(store.series(ArticleKey{language, title}));
            out.push_back(CandidateSeries{c.english, merge_aliases(members, c.title)});
        } else {
            out.push_back(CandidateSeries{c.english, store.series(ArticleKey{language, c.title})});
        }
    }
    return out;
}

std::set<ArticleKey> watch_list(const std::vector<CandidateSet>& candidate_sets, const std::set<std::string>& languages,
                                const std::map<std::string, std::map<std::string, std::vector<std::string>>>& aliases) {
    std::set<ArticleKey> watch;
    for (const auto& set : candidate_sets) {
        for (const auto& row : set.rows()) {
            if (row.title && languages.contains(row.language)) watch.insert(ArticleKey{row.language, *row.title});
        }
    }
    for (const auto& [lang, groups] : aliases) {
        if (!languages.contains(lang)) continue;
        for (const auto& [canonical, members] : groups) {
            for (const auto& m : members) watch.insert(ArticleKey{lang, m});
        }
    }
    return watch;
}

DailyStore build_daily_store(const fs::path& corpus_root, const DateWindow& study, const std::set<std::string>& languages,
                             const std::optional<std::set<ArticleKey>>& watch, unsigned threads) {
    IngestFilter filter{languages, watch};
    const auto batches = ingest_range(corpus_root, study, filter, threads);
    const auto hourly = HourlyStore::build(study, languages, batches);
    const auto missing = hourly.missing_hours().size();
    if (missing > 0) {
        log::info("{} of {} hours missing; treated as zero", missing, hourly.hour_count());
    }
    return DailyStore::from_hourly(hourly);
}

PipelineResult run_pipeline(const PipelineConfig& config) {
    if (!fs::is_directory(config.corpus_root)) {
        throw InputError(fmt::format("corpus directory '{}' not found", config.corpus_root.string()));
    }
    std::vector<IncidenceSeries> incidences;
    std::vector<CandidateSet> candidate_sets;
    const std::set<std::string> languages{config.languages.begin(), config.languages.end()};
    for (const auto& ctx : config.contexts) {
        for (const auto& p : {ctx.incidence, ctx.candidates}) {
            if (!fs::is_regular_file(p)) throw InputError(fmt::format("input file '{}' not found", p.string()));
        }
        incidences.push_back(load_incidence(ctx.incidence));
        candidate_sets.push_back(load_candidates(ctx.candidates));
        const auto& lang = incidences.back().context.language;
        if (!languages.contains(lang)) {
            throw InputError(fmt::format("context '{}' uses language '{}' which is not in [corpus] languages", ctx.id,
                                         lang));
        }
    }

    const auto store = build_daily_store(config.corpus_root, config.study, languages,
                                         watch_list(candidate_sets, languages, config.aliases), config.threads);
    if (config.store_dir) store.save(*config.store_dir);

    fs::create_directories(config.output_dir);
    PipelineResult result;
    ModelOptions options;
    options.top_k = config.top_k;
    options.holdout_fraction = config.holdout;
    options.window = config.study;
    options.threads = config.threads;

    static const std::map<std::string, std::vector<std::string>> no_aliases;
    for (std::size_t i = 0; i < config.contexts.size(); ++i) {
        const auto& ctx = config.contexts[i];
        const auto& incidence = incidences[i];
        const auto& lang = incidence.context.language;
        const auto alias_it = config.aliases.find(lang);
        const auto series = candidate_series(store, candidate_sets[i], lang,
                                             alias_it == config.aliases.end() ? no_aliases : alias_it->second);
        auto scan = lag_scan(series, incidence, config.min_offset, config.max_offset, options);
        if (!scan.best_offset) {
            log::warn("context '{}': no offset produced a usable model", ctx.id);
            result.exit_code = 2;
        }

        {
            auto out = open_report(config.output_dir / fmt::format("models_{}.csv", ctx.id), result.reports);
            write_model_report(out, scan);
        }
        if (const auto* nowcast = nowcast_or_nearest(scan)) {
            auto out = open_report(config.output_dir / fmt::format("correlations_{}.csv", ctx.id), result.reports);
            write_correlations(out, *nowcast);
            auto fit = open_report(config.output_dir / fmt::format("fit_{}.csv", ctx.id), result.reports);
            write_fit_curve(fit, *nowcast);
        }
        if (scan.best_offset) {
            auto out = open_report(config.output_dir / fmt::format("fit_best_{}.csv", ctx.id), result.reports);
            write_fit_curve(out, *scan.at(*scan.best_offset));
        }
        result.scans.push_back(std::move(scan));
    }

    {
        auto out = open_report(config.output_dir / "summary.csv", result.reports);
        write_summary_header(out);
        for (const auto& scan : result.scans) write_summary_row(out, scan);
    }

    for (std::size_t a = 0; a < result.scans.size(); ++a) {
        for (std::size_t b = a + 1; b < result.scans.size(); ++b) {
            const auto& ca = result.scans[a].context;
            const auto& cb = result.scans[b].context;
            if (ca.disease != cb.disease) continue;
            const auto* ma = nowcast_or_nearest(result.scans[a]);
            const auto* mb = nowcast_or_nearest(result.scans[b]);
            auto score = ma && mb ? compute_rt(correlations_by_name(*ma), correlations_by_name(*mb)) : TransferScore{};
            score.disease = ca.disease;
            score.location_a = ca.location.empty() ? ca.language : ca.location;
            score.location_b = cb.location.empty() ? cb.language : cb.location;
            result.transfers.push_back(std::move(score));
        }
    }
    if (!result.transfers.empty()) {
        auto out = open_report(config.output_dir / "transfer.csv", result.reports);
        write_transfer_report(out, result.transfers);
    }
    return result;
}

} // namespace wikicast

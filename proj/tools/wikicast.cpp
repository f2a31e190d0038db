// wikicast: pagecount ingest, lag-scan modeling and transferability reports.
//
// Exit codes: 0 success, 1 input error, 2 only degenerate models.

#include "wikicast/errors.hpp"
#include "wikicast/log.hpp"
#include "wikicast/pipeline.hpp"
#include "wikicast/report.hpp"
#include "wikicast/synth.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <fstream>
#include <iostream>

namespace fs = std::filesystem;
using namespace wikicast;

namespace {

constexpr int kExitInput = 1;
constexpr int kExitDegenerate = 2;

std::vector<std::string> split_commas(const std::string& text) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start <= text.size()) {
        auto comma = text.find(',', start);
        if (comma == std::string::npos) comma = text.size();
        if (comma > start) out.push_back(text.substr(start, comma - start));
        start = comma + 1;
    }
    return out;
}

/// Writes to `path`, or stdout when empty.
template <typename Fn>
void emit(const std::string& path, Fn&& write) {
    if (path.empty()) {
        write(std::cout);
        return;
    }
    std::ofstream out{path, std::ios::binary};
    if (!out) throw InputError(fmt::format("cannot write '{}'", path));
    write(out);
}

struct ContextInputs {
    std::string store;
    std::string incidence;
    std::string candidates;
    std::string aliases;  // "lang:canonical=a|b;..."
};

void add_context_options(CLI::App* cmd, ContextInputs& in) {
    cmd->add_option("--store", in.store, "Daily store directory (from build-store)")->required();
    cmd->add_option("--incidence", in.incidence, "Incidence CSV with a .context sidecar")->required();
    cmd->add_option("--candidates", in.candidates, "Candidate article TSV")->required();
    cmd->add_option("--aliases", in.aliases,
                    "Alias groups: canonical=titleA|titleB, several separated by ';'");
}

std::vector<CandidateSeries> load_context_series(const ContextInputs& in, IncidenceSeries& incidence,
                                                 ModelOptions& options) {
    incidence = load_incidence(in.incidence);
    const auto store = DailyStore::load(in.store);
    std::map<std::string, std::vector<std::string>> aliases;
    std::size_t start = 0;
    while (start < in.aliases.size()) {
        auto end = in.aliases.find(';', start);
        if (end == std::string::npos) end = in.aliases.size();
        const auto group = in.aliases.substr(start, end - start);
        start = end + 1;
        const auto eq = group.find('=');
        if (eq == std::string::npos) throw InputError(fmt::format("bad alias group '{}'", group));
        std::vector<std::string> members;
        for (const auto& m : split_commas(group.substr(eq + 1))) {
            std::size_t s = 0;
            while (s <= m.size()) {
                auto bar = m.find('|', s);
                if (bar == std::string::npos) bar = m.size();
                if (bar > s) members.push_back(m.substr(s, bar - s));
                s = bar + 1;
            }
        }
        aliases[group.substr(0, eq)] = members;
    }
    options.window = store.manifest().days;
    return candidate_series(store, load_candidates(in.candidates), incidence.context.language, aliases);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Disease nowcasting and forecasting from Wikipedia pagecount logs"};
    app.require_subcommand(1);
    bool verbose = false;
    bool quiet = false;
    app.add_flag("-v,--verbose", verbose, "Log progress");
    app.add_flag("-q,--quiet", quiet, "Only log errors");

    // ingest
    auto* ingest = app.add_subcommand("ingest", "Parse hourly pagecount files and print per-language totals");
    std::string ingest_file;
    std::string ingest_root;
    std::string ingest_start;
    std::string ingest_end;
    std::string ingest_langs = "en";
    std::string ingest_out;
    auto* file_opt = ingest->add_option("--file", ingest_file, "A single hourly file");
    ingest->add_option("--corpus", ingest_root, "Directory of pagecount files")->excludes(file_opt);
    ingest->add_option("--start", ingest_start, "First day (YYYY-MM-DD)");
    ingest->add_option("--end", ingest_end, "Last day, inclusive");
    ingest->add_option("--languages", ingest_langs, "Comma-separated language codes")->capture_default_str();
    ingest->add_option("-o,--out", ingest_out, "Output CSV (default stdout)");

    // build-store
    auto* build = app.add_subcommand("build-store", "Ingest a date range into a normalized daily store");
    std::string build_root;
    std::string build_start;
    std::string build_end;
    std::string build_langs;
    std::vector<std::string> build_candidates;
    std::string build_out;
    unsigned build_threads = 0;
    build->add_option("--corpus", build_root, "Directory of pagecount files")->required();
    build->add_option("--start", build_start, "First day (YYYY-MM-DD)")->required();
    build->add_option("--end", build_end, "Last day, inclusive")->required();
    build->add_option("--languages", build_langs, "Comma-separated language codes")->required();
    build->add_option("--candidates", build_candidates, "Candidate TSVs restricting stored titles (default: all)");
    build->add_option("--threads", build_threads, "Ingest workers (0 = hardware)")->capture_default_str();
    build->add_option("-o,--out", build_out, "Store directory")->required();

    // correlate / fit / lagscan share their inputs
    auto* correlate = app.add_subcommand("correlate", "Per-article Pearson r against the incidence at one offset");
    ContextInputs corr_in;
    int corr_offset = 0;
    std::string corr_out;
    add_context_options(correlate, corr_in);
    correlate->add_option("--offset", corr_offset, "Shift in days (positive = forecast)")->capture_default_str();
    correlate->add_option("-o,--out", corr_out, "Output CSV (default stdout)");

    auto* fit = app.add_subcommand("fit", "Fit the top-k no-intercept model at one offset");
    ContextInputs fit_in;
    int fit_offset = 0;
    std::size_t fit_k = 10;
    double fit_holdout = 0.0;
    std::string fit_out;
    std::string fit_curve;
    add_context_options(fit, fit_in);
    fit->add_option("--offset", fit_offset, "Shift in days (positive = forecast)")->capture_default_str();
    fit->add_option("-k,--top-k", fit_k, "Articles per model")->capture_default_str();
    fit->add_option("--holdout", fit_holdout, "Trailing fraction held out for evaluation")->capture_default_str();
    fit->add_option("-o,--out", fit_out, "Model CSV (default stdout)");
    fit->add_option("--curve", fit_curve, "Also write observed/fitted CSV here");

    auto* lagscan = app.add_subcommand("lagscan", "Independent models over a range of daily offsets");
    ContextInputs scan_in;
    int scan_min = -kMaxLagDays;
    int scan_max = kMaxLagDays;
    std::size_t scan_k = 10;
    double scan_holdout = 0.0;
    std::string scan_out;
    std::string scan_summary;
    add_context_options(lagscan, scan_in);
    lagscan->add_option("--min-offset", scan_min, "First offset")->capture_default_str();
    lagscan->add_option("--max-offset", scan_max, "Last offset")->capture_default_str();
    lagscan->add_option("-k,--top-k", scan_k, "Articles per model")->capture_default_str();
    lagscan->add_option("--holdout", scan_holdout, "Trailing fraction held out for evaluation")->capture_default_str();
    lagscan->add_option("-o,--out", scan_out, "Model CSV (default stdout)");
    lagscan->add_option("--summary", scan_summary, "Also write the one-row summary CSV here");

    auto* transfer = app.add_subcommand("transfer", "Meta-correlation r_t between two correlation reports");
    std::string tr_a;
    std::string tr_b;
    std::string tr_disease;
    std::string tr_loc_a = "A";
    std::string tr_loc_b = "B";
    std::string tr_out;
    transfer->add_option("a", tr_a, "Correlation CSV of the first context")->required();
    transfer->add_option("b", tr_b, "Correlation CSV of the second context")->required();
    transfer->add_option("--disease", tr_disease, "Disease label");
    transfer->add_option("--location-a", tr_loc_a, "Label of the first location")->capture_default_str();
    transfer->add_option("--location-b", tr_loc_b, "Label of the second location")->capture_default_str();
    transfer->add_option("-o,--out", tr_out, "Output CSV (default stdout)");

    auto* synth = app.add_subcommand("synth", "Generate a seeded synthetic pagecount corpus");
    SynthSpec spec;
    std::string synth_langs = "en";
    std::string synth_start = "2011-01-02";
    std::vector<std::string> synth_signals;
    std::string synth_flip;
    std::string synth_out;
    synth->add_option("--languages", synth_langs, "Comma-separated language codes")->capture_default_str();
    synth->add_option("--articles", spec.articles_per_language, "Candidate articles per language")
        ->capture_default_str();
    synth->add_option("--start", synth_start, "First day")->capture_default_str();
    synth->add_option("--days", spec.days, "Study length in days")->capture_default_str();
    synth->add_option("--background", spec.background, "Mean requests/day per article")->capture_default_str();
    synth->add_option("--background-noise", spec.background_noise, "Relative noise of background traffic")
        ->capture_default_str();
    synth->add_option("--weekly-amplitude", spec.weekly_amplitude, "Weekly periodicity amplitude")
        ->capture_default_str();
    synth->add_option("--filler", spec.filler_per_day, "Rest-of-language requests/day")->capture_default_str();
    synth->add_option("--signal", synth_signals, "lang:article:gain:lead:noise_std (repeatable)");
    synth->add_option("--redirect-flip", synth_flip, "lang:article:redirect_title:YYYY-MM-DD");
    synth->add_option("--seed", spec.seed, "Random seed")->capture_default_str();
    synth->add_option("-o,--out", synth_out, "Output directory")->required();

    auto* report = app.add_subcommand("report", "Run the full pipeline from a config file");
    std::string config_path;
    report->add_option("config", config_path, "Pipeline config (INI)")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : kExitInput;
    }
    log::set_level(quiet ? log::Level::error : verbose ? log::Level::info : log::Level::warn);

    try {
        if (*ingest) {
            const IngestFilter filter{[&] {
                const auto l = split_commas(ingest_langs);
                return std::set<std::string>{l.begin(), l.end()};
            }(), std::nullopt};
            std::vector<HourBatch> batches;
            if (!ingest_file.empty()) {
                const auto hour = parse_pagecount_filename(fs::path{ingest_file}.filename().string());
                batches.push_back(ingest_hour(ingest_file, hour.value_or(HourStamp{}), filter));
            } else {
                if (ingest_root.empty() || ingest_start.empty() || ingest_end.empty()) {
                    throw InputError("ingest needs --file, or --corpus with --start and --end");
                }
                batches = ingest_range(ingest_root, DateWindow{parse_date(ingest_start), parse_date(ingest_end)},
                                       filter);
            }
            emit(ingest_out, [&](std::ostream& out) {
                out << "hour,present,language,total,accepted,rejected\n";
                for (const auto& b : batches) {
                    for (const auto& lang : filter.languages) {
                        const auto it = b.totals.find(lang);
                        out << fmt::format("{},{},{},{},{},{}\n", format_hour(b.hour), b.present ? 1 : 0, lang,
                                           it == b.totals.end() ? 0 : it->second, b.accepted, b.rejected);
                    }
                }
            });
        } else if (*build) {
            const auto langs = split_commas(build_langs);
            const std::set<std::string> languages{langs.begin(), langs.end()};
            std::optional<std::set<ArticleKey>> watch;
            if (!build_candidates.empty()) {
                std::vector<CandidateSet> sets;
                for (const auto& p : build_candidates) sets.push_back(load_candidates(p));
                watch = watch_list(sets, languages, {});
            }
            const auto store = build_daily_store(
                build_root, DateWindow{parse_date(build_start), parse_date(build_end)}, languages, watch, build_threads);
            store.save(build_out);
            log::info("stored {} articles, {} missing hours", store.articles().size(),
                      store.manifest().missing_hours.size());
        } else if (*correlate) {
            IncidenceSeries incidence;
            ModelOptions options;
            const auto series = load_context_series(corr_in, incidence, options);
            std::vector<CandidateColumn> columns;
            for (const auto& c : series) {
                columns.push_back(CandidateColumn{c.english, c.series.title,
                                                  align(shift_days(c.series, corr_offset, options.window), incidence)});
            }
            LagModel model;
            model.offset = corr_offset;
            model.correlations = rank_candidates(columns, incidence);
            emit(corr_out, [&](std::ostream& out) { write_correlations(out, model); });
            if (model.correlations.empty()) return kExitDegenerate;
        } else if (*fit) {
            IncidenceSeries incidence;
            ModelOptions options;
            options.top_k = fit_k;
            options.holdout_fraction = fit_holdout;
            const auto series = load_context_series(fit_in, incidence, options);
            LagScanResult scan = lag_scan(series, incidence, fit_offset, fit_offset, options);
            emit(fit_out, [&](std::ostream& out) { write_model_report(out, scan); });
            if (!fit_curve.empty()) emit(fit_curve, [&](std::ostream& out) { write_fit_curve(out, scan.models[0]); });
            if (!scan.best_offset) return kExitDegenerate;
        } else if (*lagscan) {
            IncidenceSeries incidence;
            ModelOptions options;
            options.top_k = scan_k;
            options.holdout_fraction = scan_holdout;
            const auto series = load_context_series(scan_in, incidence, options);
            const auto scan = lag_scan(series, incidence, scan_min, scan_max, options);
            emit(scan_out, [&](std::ostream& out) { write_model_report(out, scan); });
            if (!scan_summary.empty()) {
                emit(scan_summary, [&](std::ostream& out) {
                    write_summary_header(out);
                    write_summary_row(out, scan);
                });
            }
            if (!scan.best_offset) return kExitDegenerate;
        } else if (*transfer) {
            auto read = [](const std::string& path) {
                std::ifstream in{path};
                if (!in) throw InputError(fmt::format("correlation file '{}' not found", path));
                return read_correlations(in, path);
            };
            auto score = compute_rt(read(tr_a), read(tr_b));
            score.disease = tr_disease;
            score.location_a = tr_loc_a;
            score.location_b = tr_loc_b;
            emit(tr_out, [&](std::ostream& out) { write_transfer_report(out, std::span{&score, 1}); });
        } else if (*synth) {
            spec.languages = split_commas(synth_langs);
            spec.start = parse_date(synth_start);
            for (const auto& s : synth_signals) {
                const auto parts = [&] {
                    std::vector<std::string> p;
                    std::size_t start = 0;
                    while (start <= s.size()) {
                        auto colon = s.find(':', start);
                        if (colon == std::string::npos) colon = s.size();
                        p.push_back(s.substr(start, colon - start));
                        start = colon + 1;
                    }
                    return p;
                }();
                if (parts.size() != 5) throw InputError(fmt::format("bad --signal '{}'", s));
                spec.signals.push_back(SignalArticle{parts[0], std::stoi(parts[1]), std::stod(parts[2]),
                                                     std::stoi(parts[3]), std::stod(parts[4])});
            }
            if (!synth_flip.empty()) {
                const auto first = synth_flip.find(':');
                const auto second = synth_flip.find(':', first + 1);
                const auto last = synth_flip.rfind(':');
                if (first == std::string::npos || second == std::string::npos || last <= second) {
                    throw InputError(fmt::format("bad --redirect-flip '{}'", synth_flip));
                }
                spec.redirect_flip = RedirectFlip{synth_flip.substr(0, first),
                                                  std::stoi(synth_flip.substr(first + 1, second - first - 1)),
                                                  synth_flip.substr(second + 1, last - second - 1),
                                                  parse_date(synth_flip.substr(last + 1))};
            }
            const auto truth = generate(spec, synth_out);
            fmt::print("wrote {} hour files; run: wikicast report {}\n", truth.hour_files, truth.config.string());
        } else if (*report) {
            const auto result = run_pipeline(load_config(config_path));
            for (const auto& p : result.reports) fmt::print("{}\n", p.string());
            return result.exit_code;
        }
    } catch (const InputError& e) {
        log::write(log::Level::error, e.what());
        return kExitInput;
    } catch (const DegenerateError& e) {
        log::write(log::Level::error, e.what());
        return kExitDegenerate;
    } catch (const std::exception& e) {
        log::write(log::Level::error, e.what());
        return kExitInput;
    }
    return 0;
}

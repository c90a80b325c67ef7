#include "macroconv/cli.hpp"

#include <cstdlib>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "macroconv/changeover.hpp"
#include "macroconv/fights.hpp"
#include "macroconv/report.hpp"
#include "macroconv/synth.hpp"
#include "macroconv/timeline.hpp"
#include "macroconv/titles.hpp"

namespace macroconv::cli {

namespace {

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct RunConfig {
    std::string corpus;
    std::string out;
    std::string format = "csv";
    std::uint64_t seed = 1;
    ChangeoverParams params;
    std::size_t min_authors = 30;
    std::size_t min_body_len = 10;
    bool allow_ambiguous_month = false;
    bool three_author = false;
    std::size_t older_exp_threshold = 20;
    double match_tolerance = 0.05;
    std::string lexicon;
    std::string gap_edges = "1,3,6,10,20,40";
    std::string style = "all";
    std::string task = "changeover";
    std::string preset = "full";
    double train_frac = 0.8;
    double l2 = 0.0;

    OutputFormat output_format() const {
        return format == "json" ? OutputFormat::Json : OutputFormat::Csv;
    }
};

std::vector<double> parse_edges(const std::string& text) {
    std::vector<double> edges;
    std::stringstream in(text);
    for (std::string part; std::getline(in, part, ',');) {
        try {
            std::size_t used = 0;
            edges.push_back(std::stod(part, &used));
            if (used != part.size()) throw std::invalid_argument(part);
        } catch (const std::exception&) {
            throw UsageError("--gap-edges: not a number: '" + part + "'");
        }
    }
    if (edges.empty() || !(edges.front() > 0))
        throw UsageError("--gap-edges must list positive, increasing values");
    for (std::size_t i = 1; i < edges.size(); ++i)
        if (!(edges[i] > edges[i - 1])) throw UsageError("--gap-edges must be strictly increasing");
    return edges;
}

void validate(const RunConfig& c) {
    try {
        c.params.validate();
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    if (!(c.match_tolerance >= 0.0)) throw UsageError("--match-tolerance must be non-negative");
    if (!(c.train_frac > 0.0 && c.train_frac < 1.0)) throw UsageError("--train-frac must lie in (0, 1)");
    if (!(c.l2 >= 0.0)) throw UsageError("--l2 must be non-negative");
    parse_edges(c.gap_edges);
}

class Pipeline {
public:
    Pipeline(const RunConfig& config, std::ostream& log) : cfg_(config), log_(log) {}

    const Corpus& corpus() {
        if (!loaded_) {
            if (cfg_.corpus.empty()) throw UsageError("--corpus is required");
            if (!std::filesystem::exists(cfg_.corpus))
                throw UsageError("corpus not found: " + cfg_.corpus);
            loaded_ = load_corpus(cfg_.corpus);
            if (loaded_->skipped > 0)
                log_ << "skipped " << loaded_->skipped << " malformed manifest records\n";
        }
        return loaded_->corpus;
    }
    const CorpusMacros& macros() {
        if (!macros_) macros_ = extract_corpus(corpus());
        return *macros_;
    }
    const TimelineMap& body_timelines() {
        if (!body_) body_ = build_timelines(corpus(), macros());
        return *body_;
    }
    const TimelineMap& name_timelines() {
        if (!name_) name_ = build_name_timelines(corpus(), macros());
        return *name_;
    }
    const ExperienceLedger& ledger() {
        if (!ledger_) ledger_ = std::make_unique<ExperienceLedger>(corpus());
        return *ledger_;
    }
    const std::vector<ChangeoverRecord>& changeovers() {
        if (!changeovers_) {
            changeovers_.emplace();
            for (const auto& [key, tl] : body_timelines())
                if (auto rec = detect_changeover(tl, cfg_.params)) changeovers_->push_back(std::move(*rec));
        }
        return *changeovers_;
    }
    const MatchResult& matches() {
        if (!matches_) {
            const auto candidates = control_candidates(body_timelines(), cfg_.params);
            matches_ = match_pairs(changeovers(), body_timelines(), candidates, cfg_.params.q);
        }
        return *matches_;
    }
    const Lexicon& lexicon() {
        if (cfg_.lexicon.empty()) return Lexicon::builtin();
        if (!lexicon_) {
            try {
                lexicon_ = Lexicon::load(cfg_.lexicon);
            } catch (const std::invalid_argument& e) {
                throw UsageError(e.what());
            }
        }
        return *lexicon_;
    }

    void write(const Table& table, const std::string& stem, std::ostream& out) {
        const auto path = write_table(table, output_dir(), stem, cfg_.output_format());
        out << "wrote " << path.string() << " (" << table.rows.size() << " rows)\n";
    }
    std::filesystem::path output_dir() const { return cfg_.out; }
    const RunConfig& config() const { return cfg_; }

private:
    RunConfig cfg_;
    std::ostream& log_;
    std::optional<LoadResult> loaded_;
    std::optional<CorpusMacros> macros_;
    std::optional<TimelineMap> body_;
    std::optional<TimelineMap> name_;
    std::unique_ptr<ExperienceLedger> ledger_;
    std::optional<std::vector<ChangeoverRecord>> changeovers_;
    std::optional<MatchResult> matches_;
    std::optional<Lexicon> lexicon_;
};

void cmd_extract(Pipeline& p, std::ostream& out) {
    p.write(definitions_table(p.corpus(), p.macros()), "definitions", out);
}

void cmd_summary(Pipeline& p, std::ostream& out) {
    p.write(summary_table(summarize(p.corpus(), p.macros())), "summary", out);
}

void cmd_timelines(Pipeline& p, std::ostream& out) {
    p.write(timelines_table(p.body_timelines()), "timelines", out);
}

void cmd_changeovers(Pipeline& p, std::ostream& out) {
    p.write(changeovers_table(p.changeovers()), "changeovers", out);
}

void cmd_curves(Pipeline& p, std::ostream& out) {
    const auto& recs = p.changeovers();
    p.write(curves_table(recs), "changeover_curves", out);
    AggregateCurves agg;
    if (!recs.empty()) agg = aggregate_median_curves(recs);
    p.write(median_curves_table(agg), "median_curves", out);
}

void cmd_matched(Pipeline& p, std::ostream& out) {
    const auto& m = p.matches();
    p.write(matched_pairs_table(m.pairs), "matched_pairs", out);
    const auto& params = p.config().params;
    p.write(experience_curves_table(experience_curves(m.pairs, p.body_timelines(), p.ledger(), params.delta)),
            "experience_curves", out);
    p.write(feature_table(changeover_features(m.pairs, p.body_timelines(), p.ledger(), params)),
            "changeover_features", out);
    out << "matched " << m.pairs.size() << " pairs, " << m.unmatched << " changeovers unmatched\n";
}

void write_predictions(Pipeline& p, std::ostream& out, std::ostream& err, const FeatureMatrix& data,
                       const std::vector<FeatureSet>& sets, const std::string& task) {
    std::vector<PredictionRow> rows;
    for (const auto& set : sets) {
        try {
            rows.push_back(predict(data.select(set.columns), set.name, p.config().train_frac,
                                   p.config().seed, p.config().l2));
        } catch (const std::invalid_argument& e) {
            err << "warning: " << task << "/" << set.name << ": " << e.what() << "\n";
        }
    }
    p.write(prediction_table(rows), "predictions_" + task, out);
    p.write(coefficient_table(rows), "coefficients_" + task, out);
}

std::vector<FeatureSet> fight_feature_sets(FightKind kind) {
    return {{"experience", {"experience_1", "experience_2"}}, {"all", fight_feature_columns(kind)}};
}

FightFilters filters_for(const RunConfig& c, FightKind kind) {
    FightFilters f = kind == FightKind::Name ? default_name_fight_filters() : default_body_fight_filters();
    f.min_authors = c.min_authors;
    if (kind == FightKind::Name) f.min_key_length = c.min_body_len;
    f.require_unambiguous_month = !c.allow_ambiguous_month;
    f.three_author_variant = c.three_author;
    return f;
}

std::vector<FightRecord> fights_of(Pipeline& p, FightKind kind) {
    const auto f = filters_for(p.config(), kind);
    return kind == FightKind::Name ? detect_name_fights(p.corpus(), p.body_timelines(), p.ledger(), f)
                                   : detect_body_fights(p.corpus(), p.name_timelines(), p.ledger(), f);
}

void cmd_fights(Pipeline& p, std::ostream& out, FightKind kind) {
    const std::string stem = kind == FightKind::Name ? "name_fights" : "body_fights";
    const auto fights = fights_of(p, kind);
    const auto edges = parse_edges(p.config().gap_edges);
    p.write(fights_table(fights), stem, out);
    const auto& tl = kind == FightKind::Name ? p.body_timelines() : p.name_timelines();
    p.write(feature_table(fight_features(fights, tl, p.ledger(), kind)), stem + "_features", out);
    const GapTable gaps = fights.empty() ? tabulate_gaps({}, edges)
                                         : win_rate_by_gap(fights, edges, p.config().seed);
    p.write(gap_table(gaps), stem + "_gaps", out);
    out << fights.size() << " fights; older-author win rate " << format_number(gaps.rate)
        << " over " << gaps.decisive << " balanced fights (p = " << format_number(gaps.p_value) << ")\n";
}

std::vector<TitleStyleKind> styles_of(const RunConfig& c) {
    if (c.style == "all") return {kAllTitleStyles.begin(), kAllTitleStyles.end()};
    auto s = parse_title_style(c.style);
    if (!s) throw UsageError("unknown title style: " + c.style);
    return {*s};
}

void cmd_title(Pipeline& p, std::ostream& out) {
    const auto edges = parse_edges(p.config().gap_edges);
    const auto styles = classify_titles(p.corpus(), p.lexicon());
    TitleFightFilters filters;
    filters.older_exp_threshold = p.config().older_exp_threshold;
    Table summary{{"style", "fights", "pairs", "unmatched", "high_dominant", "rate", "p_value"}, {}};
    for (auto style : styles_of(p.config())) {
        const std::string name(to_string(style));
        const auto fights = detect_title_fights(p.corpus(), p.ledger(), styles, style, filters);
        const auto matched = match_title_fights(fights, p.config().match_tolerance);
        const auto gaps = dominance_by_gap(matched.pairs, edges);
        p.write(title_fights_table(fights), "title_fights_" + name, out);
        p.write(title_pairs_table(matched.pairs), "title_pairs_" + name, out);
        p.write(gap_table(gaps), "title_gaps_" + name, out);
        summary.add({name, static_cast<long long>(fights.size()), static_cast<long long>(matched.pairs.size()),
                     static_cast<long long>(matched.unmatched), static_cast<long long>(gaps.successes),
                     gaps.decisive ? Cell{gaps.rate} : Cell{}, gaps.p_value});
    }
    p.write(summary, "title_summary", out);
}

void cmd_predict(Pipeline& p, std::ostream& out, std::ostream& err) {
    const auto& task = p.config().task;
    if (task == "changeover") {
        const auto& params = p.config().params;
        const auto data = changeover_features(p.matches().pairs, p.body_timelines(), p.ledger(), params);
        write_predictions(p, out, err, data, changeover_feature_sets(params), task);
    } else if (task == "name-fights" || task == "body-fights") {
        const FightKind kind = task == "name-fights" ? FightKind::Name : FightKind::Body;
        const auto& tl = kind == FightKind::Name ? p.body_timelines() : p.name_timelines();
        const auto data = fight_features(fights_of(p, kind), tl, p.ledger(), kind);
        write_predictions(p, out, err, data, fight_feature_sets(kind), task);
    } else {
        throw UsageError("unknown prediction task: " + task);
    }
}

void cmd_synth(const RunConfig& c, std::ostream& out) {
    const auto preset = parse_synth_preset(c.preset);
    if (!preset) throw UsageError("unknown preset: " + c.preset);
    const auto synth = generate(SynthConfig::preset(*preset, c.seed));
    write_synth(synth, c.out);
    out << "wrote " << synth.papers.size() << " papers to " << c.out << "\n";
}

void cmd_report(Pipeline& p, std::ostream& out, std::ostream& err) {
    cmd_summary(p, out);
    cmd_extract(p, out);
    cmd_timelines(p, out);
    cmd_changeovers(p, out);
    cmd_curves(p, out);
    cmd_matched(p, out);
    cmd_fights(p, out, FightKind::Name);
    cmd_fights(p, out, FightKind::Body);
    cmd_title(p, out);
    const auto& params = p.config().params;
    write_predictions(p, out, err,
                      changeover_features(p.matches().pairs, p.body_timelines(), p.ledger(), params),
                      changeover_feature_sets(params), "changeover");
    for (FightKind kind : {FightKind::Name, FightKind::Body}) {
        const auto& tl = kind == FightKind::Name ? p.body_timelines() : p.name_timelines();
        write_predictions(p, out, err, fight_features(fights_of(p, kind), tl, p.ledger(), kind),
                          fight_feature_sets(kind), kind == FightKind::Name ? "name-fights" : "body-fights");
    }
}

void add_corpus_options(CLI::App* app, RunConfig& c) {
    app->add_option("--corpus", c.corpus, "Manifest file or directory containing manifest.jsonl");
    app->add_option("--out", c.out, "Output directory (default: $MACROCONV_OUT or ./macroconv-out)");
    app->add_option("--format", c.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
    app->add_option("--seed", c.seed, "Seed for every random choice");
}

void add_changeover_options(CLI::App* app, RunConfig& c) {
    app->add_option("--s", c.params.s, "Minimum occurrences of a body");
    app->add_option("--q", c.params.q, "Early/late lifespan fraction");
    app->add_option("--theta", c.params.theta, "Author-fraction threshold");
    app->add_option("--delta", c.params.delta, "Sliding window width");
    app->add_option("--persistence", c.params.persistence, "Crossing persistence");
}

void add_fight_options(CLI::App* app, RunConfig& c) {
    app->add_option("--min-authors", c.min_authors, "Distinct lifetime authors of a contested key");
    app->add_option("--min-body-len", c.min_body_len, "Minimum body length for name fights");
    app->add_flag("--allow-ambiguous-month", c.allow_ambiguous_month,
                  "Keep fights whose order is ambiguous within a month");
    app->add_flag("--three-author", c.three_author, "Second vs third author of three-author papers");
    app->add_option("--gap-edges", c.gap_edges, "Comma-separated experience-gap bucket edges");
}

void add_title_options(CLI::App* app, RunConfig& c) {
    app->add_option("--older-exp-threshold", c.older_exp_threshold, "Minimum older-author experience");
    app->add_option("--match-tolerance", c.match_tolerance, "Profile tolerance for swap matching");
    app->add_option("--lexicon", c.lexicon, "Word-class lexicon for title classification");
    app->add_option("--style", c.style, "Title style, or 'all'");
}

void add_predict_options(CLI::App* app, RunConfig& c) {
    app->add_option("--train-frac", c.train_frac, "Training fraction");
    app->add_option("--l2", c.l2, "L2 penalty");
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Mine competing macro conventions from LaTeX corpora", "macroconv"};
    app.require_subcommand(1);
    RunConfig cfg;
    if (const char* env = std::getenv("MACROCONV_OUT"); env && *env) cfg.out = env;
    if (cfg.out.empty()) cfg.out = "macroconv-out";

    auto* extract = app.add_subcommand("extract", "Write the definitions table");
    auto* timelines = app.add_subcommand("timelines", "Write per-body timelines");
    auto* changeovers = app.add_subcommand("changeovers", "Detect changeovers");
    auto* matched = app.add_subcommand("matched-pairs", "Match changeovers with control bodies");
    auto* curves = app.add_subcommand("curves", "Write changeover curves and their medians");
    auto* fights = app.add_subcommand("fights", "Detect author fights");
    fights->require_subcommand(1);
    auto* fname = fights->add_subcommand("name", "Macro-name fights");
    auto* fbody = fights->add_subcommand("body", "Macro-body fights");
    auto* ftitle = fights->add_subcommand("title", "Title-style fights");
    auto* predict_cmd = app.add_subcommand("predict", "Fit and score logistic models");
    auto* synth = app.add_subcommand("synth", "Generate a synthetic corpus with ground truth");
    auto* report = app.add_subcommand("report", "Run the whole pipeline");

    for (auto* sc : {extract, timelines, changeovers, matched, curves, predict_cmd, report, fname, fbody, ftitle})
        add_corpus_options(sc, cfg);
    for (auto* sc : {changeovers, matched, curves, predict_cmd, report}) add_changeover_options(sc, cfg);
    for (auto* sc : {fname, fbody, predict_cmd, report}) add_fight_options(sc, cfg);
    for (auto* sc : {ftitle, report}) add_title_options(sc, cfg);
    ftitle->add_option("--gap-edges", cfg.gap_edges, "Comma-separated experience-gap bucket edges");
    for (auto* sc : {predict_cmd, report}) add_predict_options(sc, cfg);
    predict_cmd->add_option("--task", cfg.task, "changeover, name-fights or body-fights");
    synth->add_option("--out", cfg.out, "Output directory");
    synth->add_option("--seed", cfg.seed, "Generator seed");
    synth->add_option("--preset", cfg.preset, "changeover, name-fights, title-fights or full");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n" << "run with --help for usage\n";
        return 2;
    }

    try {
        validate(cfg);
        if (synth->parsed()) {
            cmd_synth(cfg, out);
            return 0;
        }
        Pipeline p(cfg, err);
        if (extract->parsed()) cmd_extract(p, out);
        else if (timelines->parsed()) cmd_timelines(p, out);
        else if (changeovers->parsed()) cmd_changeovers(p, out);
        else if (matched->parsed()) cmd_matched(p, out);
        else if (curves->parsed()) cmd_curves(p, out);
        else if (fname->parsed()) cmd_fights(p, out, FightKind::Name);
        else if (fbody->parsed()) cmd_fights(p, out, FightKind::Body);
        else if (ftitle->parsed()) cmd_title(p, out);
        else if (predict_cmd->parsed()) cmd_predict(p, out, err);
        else if (report->parsed()) cmd_report(p, out, err);
        return 0;
    } catch (const UsageError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const InputError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    std::vector<const char*> argv{"macroconv"};
    for (const auto& a : args) argv.push_back(a.c_str());
    return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace macroconv::cli

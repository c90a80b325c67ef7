#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "macroconv/analytics.hpp"
#include "macroconv/corpus.hpp"
#include "macroconv/timeline.hpp"
#include "macroconv/titles.hpp"

namespace macroconv {

/// Name fights contend over the name of a shared body; body fights over the body of a
/// shared name. The detection procedure is the same with the roles swapped.
enum class FightKind { Name, Body };

struct FightFilters {
    std::size_t min_authors = 30;     // distinct lifetime authors of the contested key
    std::size_t min_key_length = 10;  // characters in the contested key
    bool require_unambiguous_month = true;
    bool three_author_variant = false;  // second vs third author of three-author papers
    std::vector<std::string> key_whitelist;  // empty accepts every key
};

FightFilters default_name_fight_filters();
/// Whitelist {\proof, \eps, \Re}; no key-length filter.
FightFilters default_body_fight_filters();

struct FightRecord {
    FightKind kind = FightKind::Name;
    std::size_t paper = 0;
    std::string paper_id;
    std::string key;  // contested body (name fights) or name (body fights)
    AuthorId first;   // byline order
    AuthorId second;
    std::string first_variant;   // variant each author used most recently
    std::string second_variant;
    std::string used_variant;    // variant used in the joint paper
    int winner = 0;              // 0 = first-listed wins, 1 = second-listed wins
    std::size_t first_experience = 0;
    std::size_t second_experience = 0;
    std::size_t first_prior_paper = 0;  // corpus position of each author's most recent prior use
    std::size_t second_prior_paper = 0;

    bool older_wins() const;
    std::size_t experience_gap() const;
};

/// Fight detection over timelines keyed by the contested element. Each author pair keeps
/// only its chronologically earliest fight.
std::vector<FightRecord> detect_fights(const Corpus& corpus, const TimelineMap& timelines,
                                       const ExperienceLedger& ledger,
                                       const FightFilters& filters, FightKind kind);

std::vector<FightRecord> detect_name_fights(const Corpus& corpus, const TimelineMap& body_timelines,
                                            const ExperienceLedger& ledger,
                                            const FightFilters& filters = default_name_fight_filters());

std::vector<FightRecord> detect_body_fights(const Corpus& corpus, const TimelineMap& name_timelines,
                                            const ExperienceLedger& ledger,
                                            const FightFilters& filters = default_body_fight_filters());

/// Seeded subsample so first- and second-listed authors win equally often. Records are
/// selected, never modified, and keep their relative order.
std::vector<FightRecord> balance_by_position(const std::vector<FightRecord>& fights,
                                             std::uint64_t seed);

struct GapBucket {
    std::string label;
    double lo = 0;
    std::optional<double> hi;  // exclusive; open-ended when empty
    std::size_t n = 0;
    std::size_t successes = 0;  // older wins (fights) or high-experience dominance (titles)
    std::optional<double> rate;
};

struct GapTable {
    std::vector<GapBucket> buckets;
    std::size_t total = 0;      // rows tabulated
    std::size_t decisive = 0;   // rows with a nonzero gap
    std::size_t successes = 0;  // over decisive rows
    double rate = 0.0;
    double p_value = 1.0;       // exact binomial test against 0.5
};

inline const std::vector<double> kDefaultGapEdges = {1, 3, 6, 10, 20, 40};

/// Tabulates (gap, success) rows into a gap-0 bucket plus one bucket per edge.
GapTable tabulate_gaps(const std::vector<std::pair<double, bool>>& rows,
                       const std::vector<double>& edges);

/// Balances by byline position, then tabulates the older author's win rate per experience
/// gap bucket. Equal-experience fights get a separate gap-0 row without a rate. Edges must be
/// positive and strictly increasing; positive gaps below the first edge land in the first
/// bucket. Throws std::invalid_argument on empty input or bad edges.
GapTable win_rate_by_gap(const std::vector<FightRecord>& fights, const std::vector<double>& edges,
                         std::uint64_t seed);

std::vector<std::string> fight_feature_columns(FightKind kind);

/// Per-author experience, prior uses, flexibility, degree and betweenness in the key's
/// co-author graph before the fight, plus variant and key text features. Label = winner.
FeatureMatrix fight_features(const std::vector<FightRecord>& fights, const TimelineMap& timelines,
                             const ExperienceLedger& ledger, FightKind kind);

/// Title fights ----------------------------------------------------------------------------

struct TitleFightFilters {
    std::size_t older_exp_threshold = 20;
    std::size_t min_younger_papers = 10;  // lifetime papers not written with the older author
};

struct TitleFight {
    TitleStyleKind style = TitleStyleKind::Colon;
    std::size_t paper = 0;
    std::string paper_id;
    AuthorId younger;
    AuthorId older;
    std::size_t younger_experience = 0;
    std::size_t older_experience = 0;
    double younger_profile = 0.0;  // lifetime fraction of non-joint papers showing the style
    double older_profile = 0.0;
    int indicator = 0;
};

std::vector<TitleStyle> classify_titles(const Corpus& corpus,
                                        const Lexicon& lexicon = Lexicon::builtin());

/// Lifetime fraction of the author's papers, excluding those co-authored with
/// `exclude_coauthor`, whose title shows `style`. Throws std::invalid_argument when no paper
/// is eligible.
double title_profile(const ExperienceLedger& ledger, const std::vector<TitleStyle>& styles,
                     const AuthorId& author, TitleStyleKind style,
                     const std::optional<AuthorId>& exclude_coauthor);

/// First collaborations of two-author papers that pass the experience filters.
std::vector<TitleFight> detect_title_fights(const Corpus& corpus, const ExperienceLedger& ledger,
                                            const std::vector<TitleStyle>& styles,
                                            TitleStyleKind style,
                                            const TitleFightFilters& filters = {});

struct TitleFightPair {
    TitleFight first;
    TitleFight second;
    bool high_dominant = false;
};

/// Verdict for two swapped-profile fights; nullopt when neither member has the higher
/// younger-author profile. Symmetric in its arguments.
std::optional<bool> high_experience_dominant(const TitleFight& a, const TitleFight& b);

struct TitleMatchResult {
    std::vector<TitleFightPair> pairs;
    std::size_t unmatched = 0;
};

/// Greedy nearest matching without replacement of fights with swapped profiles and opposite
/// indicators.
TitleMatchResult match_title_fights(const std::vector<TitleFight>& fights, double tolerance = 0.05);

/// High-experience dominance rate per bucket of E_o - E_y (mean over the pair's members).
GapTable dominance_by_gap(const std::vector<TitleFightPair>& pairs, const std::vector<double>& edges);

}  // namespace macroconv

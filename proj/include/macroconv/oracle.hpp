#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "macroconv/changeover.hpp"
#include "macroconv/corpus.hpp"
#include "macroconv/fights.hpp"
#include "macroconv/timeline.hpp"

// Deliberately naive reference implementations. They read the shared data types but do not
// call into the production algorithms.
namespace macroconv::oracle {

struct ChangeoverVerdict {
    std::string early_name;
    std::string late_name;
    std::vector<double> f_values;
    std::vector<double> g_values;
    std::optional<double> crossing_point;
};

std::optional<ChangeoverVerdict> oracle_changeover(const Timeline& timeline,
                                                   const ChangeoverParams& params);

/// Pair-dependency betweenness by enumerating every shortest path. Throws
/// std::invalid_argument above 10 nodes.
std::vector<double> oracle_betweenness(std::size_t nodes,
                                       const std::vector<std::pair<std::size_t, std::size_t>>& edges);

/// Violations of the matched-pair contract; empty when the pair is valid.
std::vector<std::string> validate_matched_pair(const MatchedPair& pair, const TimelineMap& timelines,
                                               const ChangeoverParams& params,
                                               const MatchTolerances& tolerances = {});

/// Fight detection by direct evaluation over papers. Records are emitted in corpus order,
/// keys ascending within a paper.
std::vector<FightRecord> oracle_fights(const Corpus& corpus, const CorpusMacros& macros,
                                       const FightFilters& filters, FightKind kind);

}  // namespace macroconv::oracle

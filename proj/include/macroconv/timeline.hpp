#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "macroconv/corpus.hpp"
#include "macroconv/graph.hpp"
#include "macroconv/macros.hpp"

namespace macroconv {

/// Resolved macros of every paper, indexed by corpus position.
struct CorpusMacros {
    std::vector<std::vector<MacroDefinition>> by_paper;
    std::size_t skipped = 0;

    std::size_t definition_count() const;
};

CorpusMacros extract_corpus(const Corpus& corpus);

/// One use of a timeline key in one paper. For body timelines `variant` is the macro name
/// used; for name timelines it is the body key.
struct Occurrence {
    std::size_t paper = 0;
    std::size_t tie_group = 0;
    std::string variant;
    std::vector<AuthorId> authors;
};

/// Time-ordered uses of one key (a macro body, or a macro name for body fights).
class Timeline {
public:
    Timeline() = default;
    /// Occurrences must be sorted by tie group; throws std::invalid_argument otherwise.
    Timeline(std::string key, std::vector<Occurrence> occurrences);

    const std::string& key() const { return key_; }
    std::span<const Occurrence> occurrences() const { return occurrences_; }
    const Occurrence& at(std::size_t i) const { return occurrences_[i]; }
    std::size_t m() const { return occurrences_.size(); }

    /// Indices of the occurrences whose paper lists `author`, ascending.
    const std::vector<std::size_t>& uses_by(const AuthorId& author) const;
    std::size_t distinct_authors() const { return uses_.size(); }
    /// Variants in order of first appearance.
    std::vector<std::string> variants() const;

private:
    std::string key_;
    std::vector<Occurrence> occurrences_;
    std::unordered_map<AuthorId, std::vector<std::size_t>> uses_;
};

using TimelineMap = std::map<std::string, Timeline>;

/// Body-keyed timelines. A paper giving several names to one body contributes the first name
/// in source order.
TimelineMap build_timelines(const Corpus& corpus, const CorpusMacros& macros);

/// Name-keyed timelines whose variants are body keys.
TimelineMap build_name_timelines(const Corpus& corpus, const CorpusMacros& macros);

/// Papers of each author in temporal order.
class ExperienceLedger {
public:
    explicit ExperienceLedger(const Corpus& corpus);

    /// Number of the author's papers strictly earlier than `paper` (same tie group excluded).
    std::size_t experience(const AuthorId& author, std::size_t paper) const;
    const std::vector<std::size_t>& papers(const AuthorId& author) const;
    std::size_t author_count() const { return papers_.size(); }
    const Corpus& corpus() const { return *corpus_; }

private:
    const Corpus* corpus_;
    std::unordered_map<AuthorId, std::vector<std::size_t>> papers_;
};

/// Half-open index range of a lifespan slice.
struct IndexRange {
    std::size_t begin = 0;
    std::size_t end = 0;
    std::size_t size() const { return end - begin; }
    bool empty() const { return begin == end; }
};

/// Occurrence indices in [floor(t0*m), floor(t1*m)), widened to one element when that slice
/// would be empty. Throws std::invalid_argument unless 0 <= t0 <= t1 <= 1.
IndexRange interval(std::size_t m, double t0, double t1);
std::span<const Occurrence> interval(const Timeline& timeline, double t0, double t1);

struct CoauthorGraph {
    std::vector<AuthorId> nodes;  // sorted
    UndirectedGraph graph;

    std::optional<std::size_t> index_of(const AuthorId& author) const;
};

/// Authors who used the timeline key strictly before `cutoff_group`, joined when they
/// co-authored any paper strictly before it.
CoauthorGraph coauthor_graph(const ExperienceLedger& ledger, const Timeline& timeline,
                             std::size_t cutoff_group);

/// Occurrence indices of the author's uses strictly before `cutoff_group`.
std::vector<std::size_t> prior_use_indices(const Timeline& timeline, const AuthorId& author,
                                           std::size_t cutoff_group);
std::size_t prior_uses(const Timeline& timeline, const AuthorId& author, std::size_t cutoff_group);

/// Fraction of consecutive prior uses in which the author switched variant. Throws
/// std::invalid_argument if the author has no prior use.
double flexibility(const Timeline& timeline, const AuthorId& author, std::size_t cutoff_group);

}  // namespace macroconv

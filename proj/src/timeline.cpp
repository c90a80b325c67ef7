#include "macroconv/timeline.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace macroconv {

namespace {

// Guards floor(t*m) against representation error such as 0.29*100 = 28.999999999999996.
constexpr double kFloorSlack = 1e-9;

const std::vector<std::size_t> kNoUses;

TimelineMap group_timelines(const Corpus& corpus, const CorpusMacros& macros, bool by_name) {
    std::map<std::string, std::vector<Occurrence>> grouped;
    for (std::size_t pos = 0; pos < corpus.size(); ++pos) {
        const Paper& paper = corpus.paper(pos);
        std::set<std::string> seen;
        for (const auto& def : macros.by_paper[pos]) {
            std::string key = by_name ? def.name : def.body_key();
            if (!seen.insert(key).second) continue;
            grouped[key].push_back(
                {pos, corpus.tie_group(pos), by_name ? def.body_key() : def.name, paper.authors});
        }
    }
    TimelineMap out;
    for (auto& [key, occ] : grouped) out.emplace(key, Timeline(key, std::move(occ)));
    return out;
}

}  // namespace

std::size_t CorpusMacros::definition_count() const {
    std::size_t n = 0;
    for (const auto& defs : by_paper) n += defs.size();
    return n;
}

CorpusMacros extract_corpus(const Corpus& corpus) {
    CorpusMacros out;
    out.by_paper.resize(corpus.size());
    for (std::size_t pos = 0; pos < corpus.size(); ++pos) {
        const Paper& paper = corpus.paper(pos);
        auto result = extract_definitions(paper.source, paper.id);
        out.skipped += result.skipped;
        out.by_paper[pos] = resolve_paper_macros(std::move(result.definitions));
    }
    return out;
}

Timeline::Timeline(std::string key, std::vector<Occurrence> occurrences)
    : key_(std::move(key)), occurrences_(std::move(occurrences)) {
    for (std::size_t i = 0; i < occurrences_.size(); ++i) {
        if (i > 0 && occurrences_[i].tie_group < occurrences_[i - 1].tie_group)
            throw std::invalid_argument("timeline occurrences out of temporal order");
        for (const auto& a : occurrences_[i].authors) uses_[a].push_back(i);
    }
}

const std::vector<std::size_t>& Timeline::uses_by(const AuthorId& author) const {
    auto it = uses_.find(author);
    return it == uses_.end() ? kNoUses : it->second;
}

std::vector<std::string> Timeline::variants() const {
    std::vector<std::string> out;
    std::set<std::string> seen;
    for (const auto& o : occurrences_)
        if (seen.insert(o.variant).second) out.push_back(o.variant);
    return out;
}

TimelineMap build_timelines(const Corpus& corpus, const CorpusMacros& macros) {
    return group_timelines(corpus, macros, false);
}

TimelineMap build_name_timelines(const Corpus& corpus, const CorpusMacros& macros) {
    return group_timelines(corpus, macros, true);
}

ExperienceLedger::ExperienceLedger(const Corpus& corpus) : corpus_(&corpus) {
    for (std::size_t pos = 0; pos < corpus.size(); ++pos)
        for (const auto& a : corpus.paper(pos).authors) papers_[a].push_back(pos);
}

std::size_t ExperienceLedger::experience(const AuthorId& author, std::size_t paper) const {
    auto it = papers_.find(author);
    if (it == papers_.end()) return 0;
    const std::size_t group = corpus_->tie_group(paper);
    auto first_not_before = std::lower_bound(
        it->second.begin(), it->second.end(), group,
        [&](std::size_t pos, std::size_t g) { return corpus_->tie_group(pos) < g; });
    return static_cast<std::size_t>(first_not_before - it->second.begin());
}

const std::vector<std::size_t>& ExperienceLedger::papers(const AuthorId& author) const {
    auto it = papers_.find(author);
    return it == papers_.end() ? kNoUses : it->second;
}

IndexRange interval(std::size_t m, double t0, double t1) {
    if (!(t0 >= 0.0 && t0 <= t1 && t1 <= 1.0))
        throw std::invalid_argument("interval requires 0 <= t0 <= t1 <= 1");
    if (m == 0) return {};
    const double md = static_cast<double>(m);
    auto lo = static_cast<std::size_t>(std::floor(t0 * md + kFloorSlack));
    auto hi = static_cast<std::size_t>(std::floor(t1 * md + kFloorSlack));
    lo = std::min(lo, m - 1);
    hi = std::min(std::max(hi, lo + 1), m);
    return {lo, hi};
}

std::span<const Occurrence> interval(const Timeline& timeline, double t0, double t1) {
    auto r = interval(timeline.m(), t0, t1);
    return timeline.occurrences().subspan(r.begin, r.size());
}

std::optional<std::size_t> CoauthorGraph::index_of(const AuthorId& author) const {
    auto it = std::lower_bound(nodes.begin(), nodes.end(), author);
    if (it == nodes.end() || *it != author) return std::nullopt;
    return static_cast<std::size_t>(it - nodes.begin());
}

CoauthorGraph coauthor_graph(const ExperienceLedger& ledger, const Timeline& timeline,
                             std::size_t cutoff_group) {
    std::set<AuthorId> users;
    for (const auto& occ : timeline.occurrences()) {
        if (occ.tie_group >= cutoff_group) break;
        users.insert(occ.authors.begin(), occ.authors.end());
    }
    CoauthorGraph out;
    out.nodes.assign(users.begin(), users.end());
    out.graph = UndirectedGraph(out.nodes.size());
    const Corpus& corpus = ledger.corpus();
    for (std::size_t i = 0; i < out.nodes.size(); ++i) {
        for (std::size_t pos : ledger.papers(out.nodes[i])) {
            if (corpus.tie_group(pos) >= cutoff_group) break;
            for (const auto& co : corpus.paper(pos).authors) {
                if (auto j = out.index_of(co); j && *j > i) out.graph.add_edge(i, *j);
            }
        }
    }
    return out;
}

std::vector<std::size_t> prior_use_indices(const Timeline& timeline, const AuthorId& author,
                                           std::size_t cutoff_group) {
    std::vector<std::size_t> out;
    for (std::size_t i : timeline.uses_by(author)) {
        if (timeline.at(i).tie_group >= cutoff_group) break;
        out.push_back(i);
    }
    return out;
}

std::size_t prior_uses(const Timeline& timeline, const AuthorId& author, std::size_t cutoff_group) {
    return prior_use_indices(timeline, author, cutoff_group).size();
}

double flexibility(const Timeline& timeline, const AuthorId& author, std::size_t cutoff_group) {
    const auto uses = prior_use_indices(timeline, author, cutoff_group);
    if (uses.empty()) throw std::invalid_argument("author has no prior use of this key");
    if (uses.size() == 1) return 0.0;
    std::size_t changes = 0;
    for (std::size_t i = 1; i < uses.size(); ++i)
        if (timeline.at(uses[i]).variant != timeline.at(uses[i - 1]).variant) ++changes;
    return static_cast<double>(changes) / static_cast<double>(uses.size() - 1);
}

}  // namespace macroconv

#include "macroconv/oracle.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <set>
#include <stdexcept>

namespace macroconv::oracle {

namespace {

struct Slice {
    std::size_t lo = 0;
    std::size_t hi = 0;
};

// Occurrences [floor(t0 m), floor(t1 m)), at least one when m > 0.
Slice slice_of(std::size_t m, double t0, double t1) {
    const double lo_real = std::floor(t0 * static_cast<double>(m) + 1e-9);
    const double hi_real = std::floor(t1 * static_cast<double>(m) + 1e-9);
    std::size_t lo = static_cast<std::size_t>(lo_real);
    std::size_t hi = static_cast<std::size_t>(hi_real);
    if (lo > m - 1) lo = m - 1;
    if (hi < lo + 1) hi = lo + 1;
    if (hi > m) hi = m;
    return {lo, hi};
}

double prevalence(const Timeline& tl, const std::string& name, double t0, double t1) {
    const Slice s = slice_of(tl.m(), t0, t1);
    std::set<std::string> everyone, users;
    for (std::size_t i = s.lo; i < s.hi; ++i) {
        for (const auto& a : tl.at(i).authors) {
            everyone.insert(a.str());
            if (tl.at(i).variant == name) users.insert(a.str());
        }
    }
    return static_cast<double>(users.size()) / static_cast<double>(everyone.size());
}

std::string dominant_name(const Timeline& tl, double t0, double t1) {
    const Slice s = slice_of(tl.m(), t0, t1);
    std::vector<std::string> order;
    std::map<std::string, std::size_t> count;
    for (std::size_t i = s.lo; i < s.hi; ++i) {
        const auto& v = tl.at(i).variant;
        if (count.find(v) == count.end()) order.push_back(v);
        ++count[v];
    }
    std::string best = order.front();
    for (const auto& v : order)
        if (count[v] > count[best]) best = v;
    return best;
}

std::size_t codepoints(std::string_view text) {
    std::size_t n = 0;
    for (unsigned char c : text)
        if ((c & 0xC0) != 0x80) ++n;
    return n;
}

}  // namespace

std::optional<ChangeoverVerdict> oracle_changeover(const Timeline& timeline,
                                                   const ChangeoverParams& params) {
    // Clause 1: enough occurrences.
    if (timeline.m() == 0 || timeline.m() < params.s) return std::nullopt;
    // Clause 2: the most used names of the first and last q fractions differ.
    const std::string early = dominant_name(timeline, 0.0, params.q);
    const std::string late = dominant_name(timeline, 1.0 - params.q, 1.0);
    if (early == late) return std::nullopt;
    // Clause 3: more than theta of the authors in each end used that end's name.
    if (prevalence(timeline, early, 0.0, params.q) <= params.theta) return std::nullopt;
    if (prevalence(timeline, late, 1.0 - params.q, 1.0) <= params.theta) return std::nullopt;

    ChangeoverVerdict v;
    v.early_name = early;
    v.late_name = late;
    std::vector<double> grid;
    for (std::size_t k = 0; static_cast<double>(k) * params.delta <= 1.0 - params.delta + 1e-9; ++k)
        grid.push_back(static_cast<double>(k) * params.delta);
    for (double t : grid) {
        const double end = t + params.delta > 1.0 ? 1.0 : t + params.delta;
        v.f_values.push_back(prevalence(timeline, early, t, end));
        v.g_values.push_back(prevalence(timeline, late, t, end));
    }
    for (std::size_t k = 0; k < grid.size() && !v.crossing_point; ++k) {
        bool ok = true;
        for (std::size_t j = k; j < grid.size(); ++j) {
            if (grid[j] > grid[k] + params.persistence + 1e-9) break;
            if (v.g_values[j] < v.f_values[j]) ok = false;
        }
        if (ok) v.crossing_point = grid[k];
    }
    return v;
}

std::vector<double> oracle_betweenness(std::size_t nodes,
                                       const std::vector<std::pair<std::size_t, std::size_t>>& edges) {
    if (nodes > 10) throw std::invalid_argument("oracle betweenness is limited to 10 nodes");
    const std::size_t inf = std::numeric_limits<std::size_t>::max() / 4;
    std::vector<std::vector<bool>> adj(nodes, std::vector<bool>(nodes, false));
    std::vector<std::vector<std::size_t>> dist(nodes, std::vector<std::size_t>(nodes, inf));
    for (const auto& [a, b] : edges) {
        if (a == b) continue;
        adj[a][b] = adj[b][a] = true;
        dist[a][b] = dist[b][a] = 1;
    }
    for (std::size_t i = 0; i < nodes; ++i) dist[i][i] = 0;
    for (std::size_t k = 0; k < nodes; ++k)
        for (std::size_t i = 0; i < nodes; ++i)
            for (std::size_t j = 0; j < nodes; ++j)
                if (dist[i][k] + dist[k][j] < dist[i][j]) dist[i][j] = dist[i][k] + dist[k][j];

    std::vector<double> score(nodes, 0.0);
    for (std::size_t s = 0; s < nodes; ++s) {
        for (std::size_t t = s + 1; t < nodes; ++t) {
            if (dist[s][t] >= inf) continue;
            std::vector<std::size_t> through(nodes, 0);
            std::size_t total = 0;
            std::vector<std::size_t> path{s};
            std::function<void(std::size_t)> walk = [&](std::size_t u) {
                if (u == t) {
                    if (path.size() - 1 != dist[s][t]) return;
                    ++total;
                    for (std::size_t i = 1; i + 1 < path.size(); ++i) ++through[path[i]];
                    return;
                }
                if (path.size() - 1 >= dist[s][t]) return;
                for (std::size_t v = 0; v < nodes; ++v) {
                    if (!adj[u][v]) continue;
                    bool visited = false;
                    for (auto p : path) visited = visited || p == v;
                    if (visited) continue;
                    path.push_back(v);
                    walk(v);
                    path.pop_back();
                }
            };
            walk(s);
            for (std::size_t v = 0; v < nodes; ++v)
                score[v] += static_cast<double>(through[v]) / static_cast<double>(total);
        }
    }
    return score;
}

std::vector<std::string> validate_matched_pair(const MatchedPair& pair, const TimelineMap& timelines,
                                               const ChangeoverParams& params,
                                               const MatchTolerances& tol) {
    std::vector<std::string> bad;
    auto bi = timelines.find(pair.changeover_body);
    auto ci = timelines.find(pair.control_body);
    if (bi == timelines.end() || ci == timelines.end()) {
        bad.push_back("pair refers to a body without a timeline");
        return bad;
    }
    const Timeline& beta = bi->second;
    const Timeline& gamma = ci->second;
    if (pair.changeover_body == pair.control_body) bad.push_back("control equals changeover body");
    if (beta.m() != pair.m_changeover || gamma.m() != pair.m_control)
        bad.push_back("recorded volumes differ from the timelines");
    const double ratio = static_cast<double>(beta.m()) / static_cast<double>(gamma.m());
    if (ratio < tol.min_volume_ratio || ratio > tol.max_volume_ratio)
        bad.push_back("volume ratio outside tolerance");

    const auto verdict = oracle_changeover(beta, params);
    if (!verdict)
        bad.push_back("changeover body fails the changeover definition");
    else if (verdict->early_name != pair.early_name || verdict->late_name != pair.late_name)
        bad.push_back("changeover names differ from the definition");
    if (oracle_changeover(gamma, params)) bad.push_back("control body has a changeover");
    if (gamma.m() < params.s) bad.push_back("control body below the volume threshold");

    std::set<std::string> control_names;
    for (const auto& o : gamma.occurrences()) control_names.insert(o.variant);
    if (control_names.size() < 2) bad.push_back("control body has a single name");
    if (!control_names.count(pair.control_late_name) || pair.control_late_name == pair.control_early_name)
        bad.push_back("control late name is not a second variant of the control body");
    if (dominant_name(gamma, 0.0, params.q) != pair.control_early_name)
        bad.push_back("control early name is not the most used early name");

    const double f_b = prevalence(beta, pair.early_name, 0.0, params.q);
    const double g_b = prevalence(beta, pair.late_name, 0.0, params.q);
    const double f_c = prevalence(gamma, pair.control_early_name, 0.0, params.q);
    const double g_c = prevalence(gamma, pair.control_late_name, 0.0, params.q);
    if (!(std::abs(f_b - f_c) < tol.max_prevalence_gap)) bad.push_back("early-name prevalence gap too large");
    if (!(std::abs(g_b - g_c) < tol.max_prevalence_gap)) bad.push_back("late-name prevalence gap too large");
    const double eps = 1e-12;
    if (std::abs(f_b - pair.f_changeover) > eps || std::abs(g_b - pair.g_changeover) > eps ||
        std::abs(f_c - pair.f_control) > eps || std::abs(g_c - pair.g_control) > eps)
        bad.push_back("recorded prevalences differ from recomputation");
    return bad;
}

std::vector<FightRecord> oracle_fights(const Corpus& corpus, const CorpusMacros& macros,
                                       const FightFilters& filters, FightKind kind) {
    const std::size_t n = corpus.size();
    // key -> variant used in each paper
    std::vector<std::map<std::string, std::string>> uses(n);
    for (std::size_t p = 0; p < n; ++p) {
        for (const auto& d : macros.by_paper[p]) {
            const std::string body = d.signature.empty() ? d.body : d.signature + '\x1f' + d.body;
            if (kind == FightKind::Name)
                uses[p].emplace(body, d.name);  // first name in source order stays
            else
                uses[p].emplace(d.name, body);
        }
    }
    std::map<std::string, std::set<std::string>> users;
    std::map<std::string, std::vector<std::size_t>> papers_of;
    for (std::size_t p = 0; p < n; ++p) {
        for (const auto& a : corpus.paper(p).authors) {
            papers_of[a.str()].push_back(p);
            for (const auto& [key, v] : uses[p]) users[key].insert(a.str());
        }
    }
    auto same_group_count = [&](const std::string& who, std::size_t group) {
        std::size_t c = 0;
        for (auto q : papers_of[who])
            if (corpus.tie_group(q) == group) ++c;
        return c;
    };

    const std::size_t width = filters.three_author_variant ? 3 : 2;
    std::vector<FightRecord> all;
    for (std::size_t p = 0; p < n; ++p) {
        const auto& authors = corpus.paper(p).authors;
        if (authors.size() != width) continue;
        const AuthorId a = authors[width - 2];
        const AuthorId b = authors[width - 1];
        const std::size_t g = corpus.tie_group(p);
        for (const auto& [key, used] : uses[p]) {
            if (!filters.key_whitelist.empty()) {
                bool listed = false;
                for (const auto& w : filters.key_whitelist) listed = listed || w == key;
                if (!listed) continue;
            }
            if (users[key].size() < filters.min_authors) continue;
            const std::size_t sep = key.find('\x1f');
            const std::string text = kind == FightKind::Name && sep != std::string::npos ? key.substr(sep + 1) : key;
            if (codepoints(text) < filters.min_key_length) continue;

            std::optional<std::size_t> prior[2];
            const AuthorId* who[2] = {&a, &b};
            for (int k = 0; k < 2; ++k) {
                for (auto q : papers_of[who[k]->str()])
                    if (corpus.tie_group(q) < g && uses[q].count(key)) prior[k] = q;
            }
            if (!prior[0] || !prior[1]) continue;
            const std::string va = uses[*prior[0]].at(key);
            const std::string vb = uses[*prior[1]].at(key);
            if (va == vb || (used != va && used != vb)) continue;
            if (filters.require_unambiguous_month) {
                bool ambiguous = false;
                for (int k = 0; k < 2; ++k) {
                    ambiguous = ambiguous || same_group_count(who[k]->str(), g) > 1 ||
                                same_group_count(who[k]->str(), corpus.tie_group(*prior[k])) > 1;
                }
                if (ambiguous) continue;
            }
            FightRecord r;
            r.kind = kind;
            r.paper = p;
            r.paper_id = corpus.paper(p).id;
            r.key = key;
            r.first = a;
            r.second = b;
            r.first_variant = va;
            r.second_variant = vb;
            r.used_variant = used;
            r.winner = used == va ? 0 : 1;
            for (int k = 0; k < 2; ++k) {
                std::size_t e = 0;
                for (auto q : papers_of[who[k]->str()])
                    if (corpus.tie_group(q) < g) ++e;
                (k == 0 ? r.first_experience : r.second_experience) = e;
            }
            r.first_prior_paper = *prior[0];
            r.second_prior_paper = *prior[1];
            all.push_back(std::move(r));
        }
    }
    std::set<std::pair<std::string, std::string>> pairs;
    std::vector<FightRecord> out;
    for (auto& r : all) {
        auto x = r.first.str(), y = r.second.str();
        if (y < x) std::swap(x, y);
        if (pairs.insert({x, y}).second) out.push_back(std::move(r));
    }
    return out;
}

}  // namespace macroconv::oracle

#include "macroconv/fights.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <iterator>
#include <map>
#include <set>
#include <stdexcept>
#include <utility>

#include "macroconv/rng.hpp"
#include "macroconv/utf8.hpp"

namespace macroconv {

namespace {

std::size_t key_length(const std::string& key, FightKind kind) {
    return utf8::length(kind == FightKind::Name ? body_of_key(key) : std::string_view(key));
}

bool key_accepted(const Timeline& timeline, const FightFilters& filters, FightKind kind) {
    if (!filters.key_whitelist.empty() &&
        std::find(filters.key_whitelist.begin(), filters.key_whitelist.end(), timeline.key()) ==
            filters.key_whitelist.end())
        return false;
    if (timeline.distinct_authors() < filters.min_authors) return false;
    return key_length(timeline.key(), kind) >= filters.min_key_length;
}

// Number of the author's papers in a tie group.
std::size_t papers_in_group(const ExperienceLedger& ledger, const AuthorId& author,
                            std::size_t group) {
    const auto& corpus = ledger.corpus();
    const auto& papers = ledger.papers(author);
    auto lo = std::lower_bound(papers.begin(), papers.end(), group, [&](std::size_t pos, std::size_t g) {
        return corpus.tie_group(pos) < g;
    });
    auto hi = std::upper_bound(lo, papers.end(), group, [&](std::size_t g, std::size_t pos) {
        return g < corpus.tie_group(pos);
    });
    return static_cast<std::size_t>(hi - lo);
}

std::optional<std::size_t> last_prior_use(const Timeline& timeline, const AuthorId& author,
                                          std::size_t group) {
    const auto& uses = timeline.uses_by(author);
    auto it = std::lower_bound(uses.begin(), uses.end(), group, [&](std::size_t i, std::size_t g) {
        return timeline.at(i).tie_group < g;
    });
    if (it == uses.begin()) return std::nullopt;
    return *std::prev(it);
}

void check_edges(const std::vector<double>& edges) {
    if (edges.empty()) throw std::invalid_argument("gap edges must not be empty");
    if (!(edges.front() > 0.0)) throw std::invalid_argument("gap edges must be positive");
    for (std::size_t i = 1; i < edges.size(); ++i)
        if (!(edges[i] > edges[i - 1]))
            throw std::invalid_argument("gap edges must be strictly increasing");
}

std::string format_edge(double x) {
    if (x == std::floor(x) && std::abs(x) < 1e15) return std::to_string(static_cast<long long>(x));
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", x);
    return buf;
}

}  // namespace

GapTable tabulate_gaps(const std::vector<std::pair<double, bool>>& rows,
                       const std::vector<double>& edges) {
    check_edges(edges);
    GapTable table;
    GapBucket zero;
    zero.label = "0";
    zero.lo = 0;
    zero.hi = 0;
    table.buckets.push_back(zero);
    for (std::size_t i = 0; i < edges.size(); ++i) {
        GapBucket b;
        b.lo = edges[i];
        if (i + 1 < edges.size()) {
            b.hi = edges[i + 1];
            b.label = "[" + format_edge(edges[i]) + "," + format_edge(edges[i + 1]) + ")";
        } else {
            b.label = ">=" + format_edge(edges[i]);
        }
        table.buckets.push_back(b);
    }
    for (const auto& [gap, success] : rows) {
        ++table.total;
        if (gap == 0.0) {
            ++table.buckets[0].n;
            continue;
        }
        std::size_t idx = 1;
        for (std::size_t i = 1; i < edges.size(); ++i)
            if (gap >= edges[i]) idx = i + 1;
        auto& b = table.buckets[idx];
        ++b.n;
        ++table.decisive;
        if (success) {
            ++b.successes;
            ++table.successes;
        }
    }
    for (std::size_t i = 1; i < table.buckets.size(); ++i) {
        auto& b = table.buckets[i];
        if (b.n > 0) b.rate = static_cast<double>(b.successes) / static_cast<double>(b.n);
    }
    if (table.decisive > 0) {
        table.rate = static_cast<double>(table.successes) / static_cast<double>(table.decisive);
        table.p_value = binomial_test(table.successes, table.decisive, 0.5);
    }
    return table;
}

FightFilters default_name_fight_filters() { return {}; }

FightFilters default_body_fight_filters() {
    FightFilters f;
    f.min_key_length = 0;
    f.key_whitelist = {"\\proof", "\\eps", "\\Re"};
    return f;
}

bool FightRecord::older_wins() const {
    if (first_experience == second_experience) return false;
    const int older = first_experience > second_experience ? 0 : 1;
    return winner == older;
}

std::size_t FightRecord::experience_gap() const {
    return first_experience > second_experience ? first_experience - second_experience
                                                : second_experience - first_experience;
}

std::vector<FightRecord> detect_fights(const Corpus& corpus, const TimelineMap& timelines,
                                       const ExperienceLedger& ledger,
                                       const FightFilters& filters, FightKind kind) {
    std::vector<FightRecord> found;
    const std::size_t needed_authors = filters.three_author_variant ? 3 : 2;
    for (const auto& [key, timeline] : timelines) {
        if (!key_accepted(timeline, filters, kind)) continue;
        for (const auto& occ : timeline.occurrences()) {
            const auto& authors = corpus.paper(occ.paper).authors;
            if (authors.size() != needed_authors) continue;
            const AuthorId& a = authors[needed_authors - 2];
            const AuthorId& b = authors[needed_authors - 1];
            const auto ua = last_prior_use(timeline, a, occ.tie_group);
            const auto ub = last_prior_use(timeline, b, occ.tie_group);
            if (!ua || !ub) continue;
            const auto& va = timeline.at(*ua).variant;
            const auto& vb = timeline.at(*ub).variant;
            if (va == vb) continue;
            if (occ.variant != va && occ.variant != vb) continue;
            if (filters.require_unambiguous_month) {
                if (papers_in_group(ledger, a, occ.tie_group) > 1 ||
                    papers_in_group(ledger, b, occ.tie_group) > 1 ||
                    papers_in_group(ledger, a, timeline.at(*ua).tie_group) > 1 ||
                    papers_in_group(ledger, b, timeline.at(*ub).tie_group) > 1)
                    continue;
            }
            FightRecord r;
            r.kind = kind;
            r.paper = occ.paper;
            r.paper_id = corpus.paper(occ.paper).id;
            r.key = key;
            r.first = a;
            r.second = b;
            r.first_variant = va;
            r.second_variant = vb;
            r.used_variant = occ.variant;
            r.winner = occ.variant == va ? 0 : 1;
            r.first_experience = ledger.experience(a, occ.paper);
            r.second_experience = ledger.experience(b, occ.paper);
            r.first_prior_paper = timeline.at(*ua).paper;
            r.second_prior_paper = timeline.at(*ub).paper;
            found.push_back(std::move(r));
        }
    }
    // Timelines were visited in key order, so a stable sort yields (paper, key) order.
    std::stable_sort(found.begin(), found.end(),
                     [](const FightRecord& x, const FightRecord& y) { return x.paper < y.paper; });

    std::set<std::pair<AuthorId, AuthorId>> seen;
    std::vector<FightRecord> out;
    for (auto& r : found) {
        auto pair = std::minmax(r.first, r.second);
        if (seen.emplace(pair.first, pair.second).second) out.push_back(std::move(r));
    }
    return out;
}

std::vector<FightRecord> detect_name_fights(const Corpus& corpus, const TimelineMap& body_timelines,
                                            const ExperienceLedger& ledger,
                                            const FightFilters& filters) {
    return detect_fights(corpus, body_timelines, ledger, filters, FightKind::Name);
}

std::vector<FightRecord> detect_body_fights(const Corpus& corpus, const TimelineMap& name_timelines,
                                            const ExperienceLedger& ledger,
                                            const FightFilters& filters) {
    return detect_fights(corpus, name_timelines, ledger, filters, FightKind::Body);
}

std::vector<FightRecord> balance_by_position(const std::vector<FightRecord>& fights,
                                             std::uint64_t seed) {
    std::vector<std::size_t> by_winner[2];
    for (std::size_t i = 0; i < fights.size(); ++i) by_winner[fights[i].winner == 0 ? 0 : 1].push_back(i);
    const std::size_t keep = std::min(by_winner[0].size(), by_winner[1].size());
    Rng rng(seed);
    std::vector<std::size_t> chosen;
    for (auto& group : by_winner) {
        rng.shuffle(group);
        chosen.insert(chosen.end(), group.begin(), group.begin() + static_cast<std::ptrdiff_t>(keep));
    }
    std::sort(chosen.begin(), chosen.end());
    std::vector<FightRecord> out;
    out.reserve(chosen.size());
    for (auto i : chosen) out.push_back(fights[i]);
    return out;
}

GapTable win_rate_by_gap(const std::vector<FightRecord>& fights, const std::vector<double>& edges,
                         std::uint64_t seed) {
    if (fights.empty()) throw std::invalid_argument("no fights to tabulate");
    check_edges(edges);
    std::vector<std::pair<double, bool>> rows;
    for (const auto& f : balance_by_position(fights, seed))
        rows.emplace_back(static_cast<double>(f.experience_gap()), f.older_wins());
    return tabulate_gaps(rows, edges);
}

std::vector<std::string> fight_feature_columns(FightKind kind) {
    std::vector<std::string> cols;
    for (const char* base : {"experience", "prior_uses", "flexibility", "degree", "betweenness"}) {
        cols.push_back(std::string(base) + "_1");
        cols.push_back(std::string(base) + "_2");
    }
    if (kind == FightKind::Name) {
        cols.insert(cols.end(), {"name_length_1", "name_length_2", "body_length", "body_non_alpha",
                                 "body_max_brace_depth"});
    } else {
        cols.insert(cols.end(), {"body_length_1", "body_length_2", "body_non_alpha_1",
                                 "body_non_alpha_2", "body_max_brace_depth_1",
                                 "body_max_brace_depth_2", "name_length"});
    }
    return cols;
}

FeatureMatrix fight_features(const std::vector<FightRecord>& fights, const TimelineMap& timelines,
                             const ExperienceLedger& ledger, FightKind kind) {
    FeatureMatrix out;
    out.columns = fight_feature_columns(kind);
    const auto& corpus = ledger.corpus();
    for (const auto& f : fights) {
        auto it = timelines.find(f.key);
        if (it == timelines.end())
            throw std::invalid_argument("fight key has no timeline: " + f.key);
        const Timeline& tl = it->second;
        const std::size_t cutoff = corpus.tie_group(f.paper);
        const auto graph = coauthor_graph(ledger, tl, cutoff);
        const auto bc = betweenness(graph.graph);

        std::vector<double> row;
        const AuthorId* people[2] = {&f.first, &f.second};
        double exp[2], uses[2], flex[2], deg[2], btw[2];
        for (int k = 0; k < 2; ++k) {
            exp[k] = static_cast<double>(ledger.experience(*people[k], f.paper));
            uses[k] = static_cast<double>(prior_uses(tl, *people[k], cutoff));
            flex[k] = flexibility(tl, *people[k], cutoff);
            const auto idx = graph.index_of(*people[k]);
            deg[k] = idx ? static_cast<double>(graph.graph.degree(*idx)) : 0.0;
            btw[k] = idx ? bc[*idx] : 0.0;
        }
        for (const double* v : {exp, uses, flex, deg, btw}) {
            row.push_back(v[0]);
            row.push_back(v[1]);
        }
        if (kind == FightKind::Name) {
            const auto body = body_features(body_of_key(f.key));
            row.push_back(static_cast<double>(name_features(f.first_variant).length));
            row.push_back(static_cast<double>(name_features(f.second_variant).length));
            row.push_back(static_cast<double>(body.length));
            row.push_back(static_cast<double>(body.non_alpha));
            row.push_back(static_cast<double>(body.max_brace_depth));
        } else {
            const auto b1 = body_features(body_of_key(f.first_variant));
            const auto b2 = body_features(body_of_key(f.second_variant));
            row.push_back(static_cast<double>(b1.length));
            row.push_back(static_cast<double>(b2.length));
            row.push_back(static_cast<double>(b1.non_alpha));
            row.push_back(static_cast<double>(b2.non_alpha));
            row.push_back(static_cast<double>(b1.max_brace_depth));
            row.push_back(static_cast<double>(b2.max_brace_depth));
            row.push_back(static_cast<double>(name_features(f.key).length));
        }
        out.append(std::move(row), f.winner, f.paper_id);
    }
    return out;
}

std::vector<TitleStyle> classify_titles(const Corpus& corpus, const Lexicon& lexicon) {
    std::vector<TitleStyle> out;
    out.reserve(corpus.size());
    for (const auto& p : corpus.papers()) out.push_back(classify_title(p.title, lexicon));
    return out;
}

double title_profile(const ExperienceLedger& ledger, const std::vector<TitleStyle>& styles,
                     const AuthorId& author, TitleStyleKind style,
                     const std::optional<AuthorId>& exclude_coauthor) {
    const auto& corpus = ledger.corpus();
    std::size_t eligible = 0, positive = 0;
    for (auto pos : ledger.papers(author)) {
        if (exclude_coauthor) {
            const auto& authors = corpus.paper(pos).authors;
            if (std::find(authors.begin(), authors.end(), *exclude_coauthor) != authors.end())
                continue;
        }
        ++eligible;
        if (styles.at(pos)[style]) ++positive;
    }
    if (eligible == 0)
        throw std::invalid_argument("author has no eligible paper: " + author.str());
    return static_cast<double>(positive) / static_cast<double>(eligible);
}

std::vector<TitleFight> detect_title_fights(const Corpus& corpus, const ExperienceLedger& ledger,
                                            const std::vector<TitleStyle>& styles,
                                            TitleStyleKind style,
                                            const TitleFightFilters& filters) {
    if (styles.size() != corpus.size())
        throw std::invalid_argument("title styles do not cover the corpus");
    std::vector<TitleFight> out;
    for (std::size_t pos = 0; pos < corpus.size(); ++pos) {
        const auto& authors = corpus.paper(pos).authors;
        if (authors.size() != 2) continue;
        const auto& pa = ledger.papers(authors[0]);
        const auto& pb = ledger.papers(authors[1]);
        std::vector<std::size_t> joint;
        std::set_intersection(pa.begin(), pa.end(), pb.begin(), pb.end(), std::back_inserter(joint));
        // First collaboration only, and only when no other joint paper shares its tie group.
        if (joint.empty() || joint.front() != pos) continue;
        if (joint.size() > 1 && corpus.tie_group(joint[1]) == corpus.tie_group(pos)) continue;

        const std::size_t ea = ledger.experience(authors[0], pos);
        const std::size_t eb = ledger.experience(authors[1], pos);
        if (ea == eb) continue;
        const bool a_older = ea > eb;
        const AuthorId& older = a_older ? authors[0] : authors[1];
        const AuthorId& younger = a_older ? authors[1] : authors[0];
        const std::size_t eo = std::max(ea, eb), ey = std::min(ea, eb);
        if (eo < filters.older_exp_threshold) continue;
        const auto& yp = ledger.papers(younger);
        const std::size_t younger_non_joint = yp.size() - joint.size();
        if (younger_non_joint < filters.min_younger_papers || younger_non_joint == 0) continue;

        TitleFight f;
        f.style = style;
        f.paper = pos;
        f.paper_id = corpus.paper(pos).id;
        f.younger = younger;
        f.older = older;
        f.younger_experience = ey;
        f.older_experience = eo;
        f.younger_profile = title_profile(ledger, styles, younger, style, older);
        f.older_profile = title_profile(ledger, styles, older, style, younger);
        f.indicator = styles[pos][style] ? 1 : 0;
        out.push_back(std::move(f));
    }
    return out;
}

std::optional<bool> high_experience_dominant(const TitleFight& a, const TitleFight& b) {
    const TitleFight* high = nullptr;
    if (a.younger_profile != b.younger_profile) {
        high = a.younger_profile > b.younger_profile ? &a : &b;
    } else {
        const double da = a.younger_profile - a.older_profile;
        const double db = b.younger_profile - b.older_profile;
        if (da == db) return std::nullopt;
        high = da > db ? &a : &b;
    }
    return high->indicator != 1;
}

TitleMatchResult match_title_fights(const std::vector<TitleFight>& fights, double tolerance) {
    if (!(tolerance >= 0.0)) throw std::invalid_argument("match tolerance must be non-negative");
    for (const auto& f : fights)
        if (f.style != fights.front().style)
            throw std::invalid_argument("title fights must share one style");

    const double cell = std::max(tolerance, 1e-6);
    auto cell_of = [&](double v) { return static_cast<long>(std::floor(v / cell)); };
    std::map<std::pair<long, long>, std::vector<std::size_t>> grid;  // keyed by (P_y, P_o)
    for (std::size_t i = 0; i < fights.size(); ++i)
        grid[{cell_of(fights[i].younger_profile), cell_of(fights[i].older_profile)}].push_back(i);

    std::vector<char> used(fights.size(), 0);
    TitleMatchResult result;
    for (std::size_t i = 0; i < fights.size(); ++i) {
        if (used[i]) continue;
        const auto& fi = fights[i];
        // A partner has P_y' near P_o and P_o' near P_y.
        const long cy = cell_of(fi.older_profile), co = cell_of(fi.younger_profile);
        std::optional<std::size_t> best;
        double best_dist = 0.0;
        bool best_verdict = false;
        for (long dy = -1; dy <= 1; ++dy) {
            for (long dx = -1; dx <= 1; ++dx) {
                auto it = grid.find({cy + dy, co + dx});
                if (it == grid.end()) continue;
                for (std::size_t j : it->second) {
                    if (j <= i || used[j]) continue;
                    const auto& fj = fights[j];
                    if (fj.indicator != 1 - fi.indicator) continue;
                    const double d1 = std::abs(fj.younger_profile - fi.older_profile);
                    const double d2 = std::abs(fj.older_profile - fi.younger_profile);
                    if (d1 > tolerance || d2 > tolerance) continue;
                    const double dist = std::max(d1, d2);
                    if (best && (dist > best_dist || (dist == best_dist && j > *best))) continue;
                    const auto verdict = high_experience_dominant(fi, fj);
                    if (!verdict) continue;
                    best = j;
                    best_dist = dist;
                    best_verdict = *verdict;
                }
            }
        }
        if (!best) continue;
        used[i] = used[*best] = 1;
        result.pairs.push_back({fi, fights[*best], best_verdict});
    }
    for (char u : used)
        if (!u) ++result.unmatched;
    return result;
}

GapTable dominance_by_gap(const std::vector<TitleFightPair>& pairs, const std::vector<double>& edges) {
    std::vector<std::pair<double, bool>> rows;
    rows.reserve(pairs.size());
    for (const auto& p : pairs) {
        const double g1 = static_cast<double>(p.first.older_experience) -
                          static_cast<double>(p.first.younger_experience);
        const double g2 = static_cast<double>(p.second.older_experience) -
                          static_cast<double>(p.second.younger_experience);
        rows.emplace_back((g1 + g2) / 2.0, p.high_dominant);
    }
    return tabulate_gaps(rows, edges);
}

}  // namespace macroconv

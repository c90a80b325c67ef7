#include "macroconv/changeover.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

#include "macroconv/macros.hpp"

namespace macroconv {

namespace {

constexpr double kGridSlack = 1e-9;

void require_same_grid(const Curve& a, const Curve& b) {
    if (a.size() != b.size() || std::abs(a.step - b.step) > kGridSlack)
        throw std::invalid_argument("curves are sampled on different grids");
}

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

std::string window_label(double t) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "t%02ld", std::lround(t * 100.0));
    return buf;
}

// Number of feature windows [t, t + delta] with t < q.
std::size_t early_window_count(const ChangeoverParams& params) {
    std::size_t k = 0;
    while (static_cast<double>(k) * params.delta < params.q - kGridSlack) ++k;
    return k;
}

struct EarlyProfile {
    std::string early_name;
    double f = 0.0;
    std::vector<std::pair<std::string, double>> others;  // other variants with early fraction
};

EarlyProfile early_profile(const Timeline& tl, double q) {
    EarlyProfile p;
    p.early_name = most_used_name(tl, 0.0, q);
    p.f = usage_fraction(tl, p.early_name, 0.0, q);
    for (const auto& v : tl.variants())
        if (v != p.early_name) p.others.emplace_back(v, usage_fraction(tl, v, 0.0, q));
    return p;
}

}  // namespace

void ChangeoverParams::validate() const {
    if (s < 1) throw std::invalid_argument("s must be at least 1");
    if (!(q > 0.0 && q <= 0.5)) throw std::invalid_argument("q must satisfy 0 < q <= 0.5");
    if (!(theta > 0.0 && theta <= 1.0))
        throw std::invalid_argument("theta must satisfy 0 < theta <= 1");
    if (!(delta > 0.0 && delta < 1.0))
        throw std::invalid_argument("delta must satisfy 0 < delta < 1");
    if (!(persistence > 0.0)) throw std::invalid_argument("persistence must be positive");
}

std::size_t grid_size(double step) {
    if (!(step > 0.0 && step <= 1.0)) throw std::invalid_argument("grid step must lie in (0, 1]");
    return static_cast<std::size_t>(std::floor((1.0 - step) / step + kGridSlack)) + 1;
}

double usage_fraction(const Timeline& timeline, std::string_view name, double t0, double t1) {
    auto slice = interval(timeline, t0, t1);
    if (slice.empty()) throw std::invalid_argument("usage fraction over an empty interval");
    std::unordered_set<AuthorId> all, users;
    for (const auto& occ : slice) {
        const bool match = occ.variant == name;
        for (const auto& a : occ.authors) {
            all.insert(a);
            if (match) users.insert(a);
        }
    }
    return static_cast<double>(users.size()) / static_cast<double>(all.size());
}

std::string most_used_name(const Timeline& timeline, double t0, double t1) {
    auto slice = interval(timeline, t0, t1);
    if (slice.empty()) throw std::invalid_argument("most used name of an empty interval");
    std::unordered_map<std::string_view, std::size_t> counts;
    std::vector<std::string_view> first_seen;
    for (const auto& occ : slice)
        if (counts[occ.variant]++ == 0) first_seen.push_back(occ.variant);
    std::string_view best = first_seen.front();
    for (auto v : first_seen)
        if (counts[v] > counts[best]) best = v;
    return std::string(best);
}

std::optional<ChangeoverRecord> detect_changeover(const Timeline& timeline,
                                                  const ChangeoverParams& params) {
    if (timeline.m() < params.s || timeline.m() == 0) return std::nullopt;
    const double q = params.q;
    auto early = most_used_name(timeline, 0.0, q);
    auto late = most_used_name(timeline, 1.0 - q, 1.0);
    if (early == late) return std::nullopt;
    if (!(usage_fraction(timeline, early, 0.0, q) > params.theta)) return std::nullopt;
    if (!(usage_fraction(timeline, late, 1.0 - q, 1.0) > params.theta)) return std::nullopt;

    ChangeoverRecord rec;
    rec.body = timeline.key();
    rec.early_name = std::move(early);
    rec.late_name = std::move(late);
    rec.m = timeline.m();
    rec.f_curve = sliding_curve(timeline, rec.early_name, params.delta);
    rec.g_curve = sliding_curve(timeline, rec.late_name, params.delta);
    rec.crossing_point = crossing_point(rec.f_curve, rec.g_curve, params.persistence);
    return rec;
}

Curve sliding_curve(const Timeline& timeline, std::string_view name, double delta) {
    Curve c;
    c.step = delta;
    const std::size_t n = grid_size(delta);
    c.values.reserve(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double t = c.t(k);
        c.values.push_back(usage_fraction(timeline, name, t, std::min(1.0, t + delta)));
    }
    return c;
}

std::optional<double> crossing_point(const Curve& f, const Curve& g, double persistence) {
    require_same_grid(f, g);
    const std::size_t n = f.size();
    const auto span = static_cast<std::size_t>(std::floor(persistence / f.step + kGridSlack));
    for (std::size_t k = 0; k < n; ++k) {
        bool holds = true;
        for (std::size_t j = k; j <= std::min(n - 1, k + span); ++j) {
            if (g.values[j] < f.values[j]) {
                holds = false;
                break;
            }
        }
        if (holds) return f.t(k);
    }
    return std::nullopt;
}

AggregateCurves aggregate_median_curves(const std::vector<ChangeoverRecord>& records) {
    if (records.empty()) throw std::invalid_argument("no changeover records to aggregate");
    const Curve& ref = records.front().f_curve;
    for (const auto& r : records) {
        require_same_grid(ref, r.f_curve);
        require_same_grid(ref, r.g_curve);
    }
    AggregateCurves out;
    out.median_f.step = out.median_g.step = ref.step;
    out.crossing_histogram.assign(ref.size(), 0);
    std::vector<double> fs, gs;
    for (std::size_t k = 0; k < ref.size(); ++k) {
        fs.clear();
        gs.clear();
        for (const auto& r : records) {
            fs.push_back(r.f_curve.values[k]);
            gs.push_back(r.g_curve.values[k]);
        }
        out.median_f.values.push_back(median(fs));
        out.median_g.values.push_back(median(gs));
    }
    for (const auto& r : records) {
        if (!r.crossing_point) continue;
        const auto k = static_cast<std::size_t>(std::lround(*r.crossing_point / ref.step));
        ++out.crossing_histogram[std::min(k, ref.size() - 1)];
        ++out.with_crossing;
    }
    return out;
}

std::vector<const Timeline*> control_candidates(const TimelineMap& timelines,
                                                const ChangeoverParams& params) {
    std::vector<const Timeline*> out;
    for (const auto& [key, tl] : timelines) {
        if (tl.m() < params.s || tl.m() == 0) continue;
        if (tl.variants().size() < 2) continue;
        if (detect_changeover(tl, params)) continue;
        out.push_back(&tl);
    }
    std::stable_sort(out.begin(), out.end(),
                     [](const Timeline* a, const Timeline* b) { return a->m() > b->m(); });
    return out;
}

MatchResult match_pairs(const std::vector<ChangeoverRecord>& changeovers,
                        const TimelineMap& timelines,
                        const std::vector<const Timeline*>& candidates, double q,
                        const MatchTolerances& tol) {
    std::vector<EarlyProfile> profiles;
    profiles.reserve(candidates.size());
    for (const Timeline* c : candidates) profiles.push_back(early_profile(*c, q));
    std::vector<bool> used(candidates.size(), false);

    MatchResult result;
    for (const auto& rec : changeovers) {
        const Timeline& beta = timelines.at(rec.body);
        const double f_beta = usage_fraction(beta, rec.early_name, 0.0, q);
        const double g_beta = usage_fraction(beta, rec.late_name, 0.0, q);
        bool matched = false;
        for (std::size_t i = 0; i < candidates.size() && !matched; ++i) {
            if (used[i]) continue;
            const Timeline& gamma = *candidates[i];
            const double ratio = static_cast<double>(beta.m()) / static_cast<double>(gamma.m());
            if (ratio < tol.min_volume_ratio || ratio > tol.max_volume_ratio) continue;
            const EarlyProfile& prof = profiles[i];
            if (!(std::abs(f_beta - prof.f) < tol.max_prevalence_gap)) continue;
            const std::pair<std::string, double>* best = nullptr;
            for (const auto& other : prof.others)
                if (!best || std::abs(other.second - g_beta) < std::abs(best->second - g_beta))
                    best = &other;
            if (!best || !(std::abs(best->second - g_beta) < tol.max_prevalence_gap)) continue;

            used[i] = true;
            matched = true;
            result.pairs.push_back({rec.body, rec.early_name, rec.late_name, beta.m(),
                                    gamma.key(), prof.early_name, best->first, gamma.m(), f_beta,
                                    g_beta, prof.f, best->second});
        }
        if (!matched) ++result.unmatched;
    }
    return result;
}

NameExperience name_experience(const Timeline& timeline, std::string_view name,
                               const ExperienceLedger& ledger, double delta) {
    // First occurrence index at which each author used this name.
    std::unordered_map<AuthorId, std::size_t> first_use;
    for (std::size_t i = 0; i < timeline.m(); ++i) {
        const auto& occ = timeline.at(i);
        if (occ.variant != name) continue;
        for (const auto& a : occ.authors) first_use.try_emplace(a, i);
    }

    NameExperience out;
    out.usage.step = out.adoption.step = delta;
    const std::size_t n = grid_size(delta);
    for (std::size_t k = 0; k < n; ++k) {
        const double t = static_cast<double>(k) * delta;
        const auto r = interval(timeline.m(), t, std::min(1.0, t + delta));
        std::unordered_set<AuthorId> seen;
        double usage_sum = 0.0, adoption_sum = 0.0;
        std::size_t usage_n = 0, adoption_n = 0;
        for (std::size_t i = r.begin; i < r.end; ++i) {
            const auto& occ = timeline.at(i);
            if (occ.variant != name) continue;
            for (const auto& a : occ.authors) {
                const auto exp = static_cast<double>(ledger.experience(a, occ.paper));
                if (seen.insert(a).second) {
                    usage_sum += exp;
                    ++usage_n;
                }
                if (first_use.at(a) == i) {
                    adoption_sum += exp;
                    ++adoption_n;
                }
            }
        }
        out.usage.values.push_back(usage_n ? std::optional(usage_sum / usage_n) : std::nullopt);
        out.adoption.values.push_back(adoption_n ? std::optional(adoption_sum / adoption_n)
                                                 : std::nullopt);
    }
    return out;
}

namespace {

struct SeriesAccumulator {
    std::vector<double> sum;
    std::vector<std::size_t> count;

    void add(const ExperienceSeries& s) {
        sum.resize(s.values.size(), 0.0);
        count.resize(s.values.size(), 0);
        for (std::size_t k = 0; k < s.values.size(); ++k)
            if (s.values[k]) {
                sum[k] += *s.values[k];
                ++count[k];
            }
    }

    ExperienceSeries mean(double step) const {
        ExperienceSeries out;
        out.step = step;
        for (std::size_t k = 0; k < sum.size(); ++k)
            out.values.push_back(count[k] ? std::optional(sum[k] / count[k]) : std::nullopt);
        return out;
    }
};

}  // namespace

ExperienceCurves experience_curves(const std::vector<MatchedPair>& pairs,
                                   const TimelineMap& timelines, const ExperienceLedger& ledger,
                                   double delta) {
    SeriesAccumulator acc[4][2];
    for (const auto& p : pairs) {
        const Timeline& beta = timelines.at(p.changeover_body);
        const Timeline& gamma = timelines.at(p.control_body);
        const NameExperience roles[4] = {
            name_experience(beta, p.early_name, ledger, delta),
            name_experience(beta, p.late_name, ledger, delta),
            name_experience(gamma, p.control_early_name, ledger, delta),
            name_experience(gamma, p.control_late_name, ledger, delta),
        };
        for (int r = 0; r < 4; ++r) {
            acc[r][0].add(roles[r].usage);
            acc[r][1].add(roles[r].adoption);
        }
    }
    auto build = [&](int r) { return NameExperience{acc[r][0].mean(delta), acc[r][1].mean(delta)}; };
    return {build(0), build(1), build(2), build(3)};
}

std::vector<std::string> changeover_feature_columns(const ChangeoverParams& params) {
    const std::size_t windows = early_window_count(params);
    std::vector<std::string> cols = {"early_name_authors", "late_name_authors"};
    for (const char* role : {"early", "late"}) {
        for (const char* kind : {"usage", "adoption"}) {
            for (std::size_t k = 0; k < windows; ++k) {
                const std::string base = std::string(role) + "_" + kind + "_exp_" +
                                         window_label(static_cast<double>(k) * params.delta);
                cols.push_back(base);
                cols.push_back(base + "_missing");
            }
        }
    }
    for (const char* role : {"early", "late"})
        for (const char* f : {"length", "non_alpha", "frac_lower", "frac_upper"})
            cols.push_back(std::string(role) + "_name_" + f);
    return cols;
}

std::vector<FeatureSet> changeover_feature_sets(const ChangeoverParams& params) {
    const auto all = changeover_feature_columns(params);
    auto pick = [&](auto pred) {
        std::vector<std::string> out;
        for (const auto& c : all)
            if (pred(c)) out.push_back(c);
        return out;
    };
    auto has = [](const std::string& c, const char* part) {
        return c.find(part) != std::string::npos;
    };
    return {
        {"name", pick([&](const std::string& c) { return has(c, "_name_"); })},
        {"usage_experience", pick([&](const std::string& c) { return has(c, "_usage_exp_"); })},
        {"adoption_experience",
         pick([&](const std::string& c) { return has(c, "_adoption_exp_"); })},
        {"author", pick([&](const std::string& c) { return !has(c, "_name_"); })},
        {"all", all},
    };
}

FeatureMatrix changeover_features(const std::vector<MatchedPair>& pairs,
                                  const TimelineMap& timelines, const ExperienceLedger& ledger,
                                  const ChangeoverParams& params) {
    FeatureMatrix out;
    out.columns = changeover_feature_columns(params);
    const std::size_t windows = early_window_count(params);

    auto row_for = [&](const Timeline& tl, const std::string& early, const std::string& late) {
        std::vector<double> row;
        row.reserve(out.columns.size());
        for (const auto* name : {&early, &late}) {
            std::unordered_set<AuthorId> authors;
            for (const auto& occ : interval(tl, 0.0, params.q))
                if (occ.variant == *name) authors.insert(occ.authors.begin(), occ.authors.end());
            row.push_back(static_cast<double>(authors.size()));
        }
        for (const auto* name : {&early, &late}) {
            const auto exp = name_experience(tl, *name, ledger, params.delta);
            for (const auto* series : {&exp.usage, &exp.adoption}) {
                for (std::size_t k = 0; k < windows; ++k) {
                    const auto& v = series->values.at(k);
                    row.push_back(v.value_or(0.0));
                    row.push_back(v ? 0.0 : 1.0);
                }
            }
        }
        for (const auto* name : {&early, &late}) {
            const auto nf = name_features(*name);
            row.push_back(static_cast<double>(nf.length));
            row.push_back(static_cast<double>(nf.non_alpha));
            row.push_back(nf.frac_lower);
            row.push_back(nf.frac_upper);
        }
        return row;
    };

    for (const auto& p : pairs) {
        out.append(row_for(timelines.at(p.changeover_body), p.early_name, p.late_name), 1,
                   p.changeover_body);
        out.append(row_for(timelines.at(p.control_body), p.control_early_name,
                           p.control_late_name),
                   0, p.control_body);
    }
    return out;
}

}  // namespace macroconv

#include <doctest.h>

#include <algorithm>
#include <functional>
#include <map>
#include <set>

#include "macroconv/changeover.hpp"
#include "macroconv/oracle.hpp"
#include "macroconv/rng.hpp"
#include "macroconv/synth.hpp"
#include "support.hpp"

using namespace macroconv;
using support::author;

namespace {

// m occurrences: the first and last 30% follow the A/B example shape, the middle alternates.
Timeline example_timeline(std::size_t m) {
    const std::size_t edge = m * 3 / 10;
    std::vector<std::string> names(m), authors(m);
    for (std::size_t i = 0; i < m; ++i) {
        names[i] = i % 2 ? "\\A" : "\\B";
        authors[i] = "mid" + std::to_string(i);
    }
    for (std::size_t i = 0; i < edge; ++i) {
        const bool minority = i >= edge - edge / 6;
        const std::size_t who = minority ? i - (edge - edge / 6) : i;
        names[i] = minority ? "\\B" : "\\A";
        authors[i] = "early" + std::to_string(who);
        names[m - edge + i] = minority ? "\\A" : "\\B";
        authors[m - edge + i] = "late" + std::to_string(who);
    }
    return support::timeline(names, authors);
}

Curve curve(std::vector<double> v, double step = 0.05) { return Curve{step, std::move(v)}; }

Timeline renamed(const Timeline& t, const std::map<std::string, std::string>& names) {
    std::vector<Occurrence> occ(t.occurrences().begin(), t.occurrences().end());
    for (auto& o : occ) o.variant = names.at(o.variant);
    return Timeline(t.key(), occ);
}

}  // namespace

TEST_CASE("parameter validation") {
    ChangeoverParams p;
    CHECK_NOTHROW(p.validate());
    p.q = 0.9;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    p = {};
    p.theta = 1.5;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    p = {};
    p.delta = 0.0;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    CHECK(grid_size(0.05) == 20);
    CHECK(grid_size(0.1) == 10);
    CHECK(grid_size(1.0) == 1);
}

TEST_CASE("usage_fraction examples") {
    auto all = support::timeline({"N", "N", "N"}, {"a", "b", "c"});
    CHECK(usage_fraction(all, "N", 0, 1) == doctest::Approx(1.0));
    auto halves = support::timeline({"N", "N", "M", "M"}, {"a", "b", "c", "d"});
    CHECK(usage_fraction(halves, "N", 0, 1) == doctest::Approx(0.5));
    CHECK(usage_fraction(halves, "M", 0, 1) == doctest::Approx(0.5));
    auto overlap = support::timeline({"N", "N", "M", "M"}, {"a", "b", "c", "b"});
    CHECK(usage_fraction(overlap, "N", 0, 1) == doctest::Approx(2.0 / 3.0));
    CHECK(usage_fraction(overlap, "M", 0, 1) == doctest::Approx(2.0 / 3.0));
    CHECK_THROWS_AS(usage_fraction(Timeline{}, "N", 0, 1), std::invalid_argument);
}

TEST_CASE("most used name breaks ties toward the earlier name") {
    auto t = support::timeline({"B", "A", "A", "B"}, {"a", "b", "c", "d"});
    CHECK(most_used_name(t, 0, 1) == "B");
    CHECK(most_used_name(t, 0.25, 1) == "A");
}

TEST_CASE("detect_changeover examples") {
    ChangeoverParams p;
    auto single = support::timeline(std::vector<std::string>(150, "\\A"), [] {
        std::vector<std::string> a;
        for (int i = 0; i < 150; ++i) a.push_back("u" + std::to_string(i));
        return a;
    }());
    CHECK_FALSE(detect_changeover(single, p));

    auto t = example_timeline(120);
    auto rec = detect_changeover(t, p);
    REQUIRE(rec);
    CHECK(rec->early_name == "\\A");
    CHECK(rec->late_name == "\\B");
    CHECK(rec->m == 120);
    CHECK(rec->f_curve.size() == 20);
    auto oracle = oracle::oracle_changeover(t, p);
    REQUIRE(oracle);
    CHECK(oracle->early_name == "\\A");
    CHECK(oracle->crossing_point == rec->crossing_point);

    CHECK_FALSE(detect_changeover(example_timeline(80), p));
    CHECK_FALSE(oracle::oracle_changeover(example_timeline(80), p));

    // \B leads the late slice, but all of its uses come from one author.
    std::vector<std::string> names(120, "\\A"), authors;
    for (int i = 0; i < 120; ++i) authors.push_back("w" + std::to_string(i));
    for (std::size_t i = 84; i < 104; ++i) {
        names[i] = "\\B";
        authors[i] = "prolific";
    }
    auto weak = support::timeline(names, authors);
    CHECK(most_used_name(weak, 0.7, 1.0) == "\\B");
    CHECK_FALSE(detect_changeover(weak, p));
    CHECK_FALSE(oracle::oracle_changeover(weak, p));
}

TEST_CASE("detect_changeover agrees with the oracle on random timelines") {
    Rng rng(17);
    for (int i = 0; i < 200; ++i) {
        ChangeoverParams p;
        p.s = static_cast<std::size_t>(rng.range(10, 60));
        p.theta = 0.1 + 0.3 * rng.uniform();
        const auto m = static_cast<std::size_t>(rng.range(20, 150));
        auto t = random_timeline(rng, m, static_cast<std::size_t>(rng.range(1, 4)));
        auto got = detect_changeover(t, p);
        auto want = oracle::oracle_changeover(t, p);
        REQUIRE(got.has_value() == want.has_value());
        if (!got) continue;
        CHECK(got->early_name == want->early_name);
        CHECK(got->late_name == want->late_name);
        CHECK(got->crossing_point == want->crossing_point);
        REQUIRE(got->f_curve.values.size() == want->f_values.size());
        for (std::size_t k = 0; k < want->f_values.size(); ++k) {
            CHECK(got->f_curve.values[k] == doctest::Approx(want->f_values[k]).epsilon(1e-12));
            CHECK(got->g_curve.values[k] == doctest::Approx(want->g_values[k]).epsilon(1e-12));
        }
    }
}

TEST_CASE("consistent renaming does not change the verdict") {
    Rng rng(23);
    int detected = 0;
    for (int i = 0; i < 300; ++i) {
        ChangeoverParams p;
        p.s = 20;
        auto t = random_timeline(rng, static_cast<std::size_t>(rng.range(20, 120)), 2);
        std::map<std::string, std::string> names;
        for (const auto& v : t.variants()) names[v] = "\\renamed" + std::to_string(names.size());
        auto a = detect_changeover(t, p);
        auto b = detect_changeover(renamed(t, names), p);
        REQUIRE(a.has_value() == b.has_value());
        if (!a) continue;
        ++detected;
        CHECK(names.at(a->early_name) == b->early_name);
        CHECK(names.at(a->late_name) == b->late_name);
        CHECK(a->crossing_point == b->crossing_point);
    }
    CHECK(detected > 0);
}

TEST_CASE("sliding curves") {
    std::vector<std::string> authors;
    for (int i = 0; i < 40; ++i) authors.push_back("u" + std::to_string(i));
    auto constant = support::timeline(std::vector<std::string>(40, "A"), authors);
    for (double v : sliding_curve(constant, "A", 0.1).values) CHECK(v == doctest::Approx(1.0));

    std::vector<std::string> two_phase(40, "A");
    std::fill(two_phase.begin() + 20, two_phase.end(), "B");
    auto t = support::timeline(two_phase, authors);
    auto c = sliding_curve(t, "B", 0.1);
    REQUIRE(c.size() == 10);
    for (std::size_t k = 0; k < c.size(); ++k)
        CHECK(c.values[k] == doctest::Approx(usage_fraction(t, "B", c.t(k), c.t(k) + 0.1)));
    CHECK(c.values[0] == 0.0);
    CHECK(c.values[9] == 1.0);

    auto one = sliding_curve(t, "B", 1.0);
    REQUIRE(one.size() == 1);
    CHECK(one.values[0] == doctest::Approx(usage_fraction(t, "B", 0, 1)));
}

TEST_CASE("crossing_point examples") {
    std::vector<double> lo(20, 0.2), hi(20, 0.8);
    CHECK(crossing_point(curve(lo), curve(hi), 0.1) == 0.0);
    CHECK_FALSE(crossing_point(curve(hi), curve(lo), 0.1));

    std::vector<double> g(20, 0.1);
    for (std::size_t k = 4; k < 20; ++k) g[k] = 0.9;
    auto cp = crossing_point(curve(std::vector<double>(20, 0.5)), curve(g), 0.1);
    REQUIRE(cp);
    CHECK(*cp == doctest::Approx(0.2));

    CHECK_THROWS_AS(crossing_point(curve(lo), curve(std::vector<double>(10, 0.5), 0.1), 0.1),
                    std::invalid_argument);
}

TEST_CASE("crossing point never increases when g is raised") {
    Rng rng(31);
    for (int i = 0; i < 2000; ++i) {
        std::vector<double> f(20), g(20), g2(20);
        for (std::size_t k = 0; k < 20; ++k) {
            f[k] = rng.uniform();
            g[k] = rng.uniform();
            g2[k] = g[k] + (rng.bernoulli(0.3) ? rng.uniform() : 0.0);
        }
        auto a = crossing_point(curve(f), curve(g), 0.1);
        auto b = crossing_point(curve(f), curve(g2), 0.1);
        if (a) {
            REQUIRE(b);
            CHECK(*b <= *a);
        }
        // Pointwise dominance gives zero.
        std::vector<double> top(20);
        for (std::size_t k = 0; k < 20; ++k) top[k] = f[k] + rng.uniform();
        CHECK(crossing_point(curve(f), curve(top), 0.1) == 0.0);
    }
}

TEST_CASE("aggregate median curves") {
    auto rec = [](double v, std::optional<double> cp) {
        ChangeoverRecord r;
        r.f_curve = curve(std::vector<double>(20, v));
        r.g_curve = curve(std::vector<double>(20, 1.0 - v));
        r.crossing_point = cp;
        return r;
    };
    auto one = aggregate_median_curves({rec(0.3, 0.5)});
    CHECK(one.median_f.values == std::vector<double>(20, 0.3));
    CHECK(one.with_crossing == 1);
    auto three = aggregate_median_curves({rec(0.1, 0.2), rec(0.9, std::nullopt), rec(0.5, 0.4)});
    CHECK(three.median_f.values[7] == doctest::Approx(0.5));
    CHECK(three.median_g.values[7] == doctest::Approx(0.5));
    std::size_t total = 0;
    for (auto n : three.crossing_histogram) total += n;
    CHECK(total == three.with_crossing);
    CHECK(total == 2);
    auto same = aggregate_median_curves({rec(0.3, 0.5), rec(0.3, 0.5), rec(0.3, 0.5)});
    CHECK(same.median_f.values == one.median_f.values);
    CHECK(same.median_g.values == one.median_g.values);
    CHECK_THROWS(aggregate_median_curves({}));
}

namespace {

Timeline named_timeline(std::string key, std::size_t m, const std::function<std::string(std::size_t)>& name) {
    std::vector<std::string> names, authors;
    for (std::size_t i = 0; i < m; ++i) {
        names.push_back(name(i));
        authors.push_back(key + std::to_string(i));
    }
    return support::timeline(names, authors, std::move(key));
}

}  // namespace

TEST_CASE("match_pairs examples") {
    ChangeoverParams p;
    TimelineMap map;
    map.emplace("beta", named_timeline("beta", 120, [](std::size_t i) { return i < 60 ? "A" : "B"; }));
    map.emplace("same", named_timeline("same", 120, [](std::size_t i) { return i < 110 ? "C" : "D"; }));
    map.emplace("small", named_timeline("small", 100, [](std::size_t i) { return i < 80 ? "C" : "D"; }));
    auto rec = detect_changeover(map.at("beta"), p);
    REQUIRE(rec);
    rec->body = "beta";

    auto matched = match_pairs({*rec}, map, {&map.at("same")}, p.q);
    REQUIRE(matched.pairs.size() == 1);
    CHECK(matched.pairs[0].control_body == "same");
    CHECK(matched.pairs[0].control_early_name == "C");
    CHECK(matched.pairs[0].control_late_name == "D");
    CHECK(oracle::validate_matched_pair(matched.pairs[0], map, p).empty());

    auto rejected = match_pairs({*rec}, map, {&map.at("small")}, p.q);
    CHECK(rejected.pairs.empty());
    CHECK(rejected.unmatched == 1);

    // Early prevalence 49/50 against 1: gap 0.02.
    TimelineMap gap;
    gap.emplace("beta", named_timeline("beta", 167, [](std::size_t i) { return i < 84 ? "A" : "B"; }));
    gap.emplace("gamma", named_timeline("gamma", 167, [](std::size_t i) { return i == 7 || i > 150 ? "D" : "C"; }));
    auto rec2 = detect_changeover(gap.at("beta"), p);
    REQUIRE(rec2);
    rec2->body = "beta";
    CHECK(match_pairs({*rec2}, gap, {&gap.at("gamma")}, p.q).pairs.empty());
}

TEST_CASE("matched pairs from a synthetic corpus satisfy the contract") {
    auto synth = generate(SynthConfig::preset(SynthPreset::Changeover, 5));
    Corpus corpus(synth.papers);
    auto macros = extract_corpus(corpus);
    auto timelines = build_timelines(corpus, macros);
    ExperienceLedger ledger(corpus);
    ChangeoverParams p;
    std::vector<ChangeoverRecord> records;
    for (const auto& [key, tl] : timelines)
        if (auto r = detect_changeover(tl, p)) {
            r->body = key;
            records.push_back(*r);
        }
    CHECK(records.size() >= 30);
    auto result = match_pairs(records, timelines, control_candidates(timelines, p), p.q);
    CHECK(!result.pairs.empty());
    std::set<std::string> controls;
    for (const auto& pair : result.pairs) {
        CHECK(oracle::validate_matched_pair(pair, timelines, p).empty());
        CHECK(controls.insert(pair.control_body).second);
    }
    auto features = changeover_features(result.pairs, timelines, ledger, p);
    CHECK(features.row_count() == 2 * result.pairs.size());
    for (const auto& row : features.rows) CHECK(row.size() == features.column_count());
    CHECK_NOTHROW(features.validate());
}

TEST_CASE("name experience and changeover features") {
    std::vector<Paper> papers;
    for (int i = 0; i < 5; ++i) papers.push_back(support::paper("warm" + std::to_string(i), "2000-0" + std::to_string(i + 1), {"u"}));
    papers.push_back(support::paper("use1", "2001-01", {"u"}, support::def("\\A", "x")));
    papers.push_back(support::paper("use2", "2001-02", {"u"}, support::def("\\A", "x")));
    Corpus c(papers);
    ExperienceLedger ledger(c);
    auto tl = build_timelines(c, extract_corpus(c)).at("x");
    auto e = name_experience(tl, "\\A", ledger, 0.5);
    REQUIRE(e.usage.values.size() == 2);
    CHECK(e.usage.values[0] == 5.0);
    CHECK(e.adoption.values[0] == 5.0);
    CHECK(e.usage.values[1] == 6.0);
    CHECK_FALSE(e.adoption.values[1].has_value());

    // Early half: \A by three authors, \B by two.
    std::vector<Paper> q;
    const char* names[] = {"\\A", "\\A", "\\B", "\\A", "\\B", "\\B", "\\B", "\\B", "\\B", "\\B"};
    const char* who[] = {"a1", "a2", "b1", "a3", "b2", "c1", "c2", "c3", "c4", "c5"};
    for (int i = 0; i < 10; ++i)
        q.push_back(support::paper("q" + std::to_string(i), std::to_string(2010 + i) + "-01",
                                   {who[i]}, support::def(names[i], "x")));
    Corpus cq(q);
    ExperienceLedger lq(cq);
    auto map = build_timelines(cq, extract_corpus(cq));
    ChangeoverParams p;
    p.q = 0.5;
    MatchedPair pair;
    pair.changeover_body = pair.control_body = "x";
    pair.early_name = pair.control_early_name = "\\A";
    pair.late_name = pair.control_late_name = "\\B";
    auto fm = changeover_features({pair}, map, lq, p);
    REQUIRE(fm.row_count() == 2);
    CHECK(fm.rows[0][0] == 3.0);
    CHECK(fm.rows[0][1] == 2.0);
    CHECK(fm.labels == std::vector<int>{1, 0});
    CHECK(fm.columns == changeover_feature_columns(p));
}

#include <doctest.h>

#include <map>
#include <set>

#include "macroconv/fights.hpp"
#include "macroconv/oracle.hpp"
#include "macroconv/rng.hpp"
#include "support.hpp"

using namespace macroconv;
using support::author;
using support::def;
using support::paper;

namespace {

FightFilters loose(FightFilters f) {
    f.min_authors = 2;
    f.min_key_length = 0;
    return f;
}

std::vector<FightRecord> name_fights(const Corpus& c, FightFilters f = loose(default_name_fight_filters())) {
    const auto macros = extract_corpus(c);
    return detect_name_fights(c, build_timelines(c, macros), ExperienceLedger(c), f);
}

std::string day(std::size_t i) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04zu-%02zu-%02zu", 1990 + i / 336, 1 + (i / 28) % 12, 1 + i % 28);
    return buf;
}

Corpus random_corpus(Rng& rng, std::size_t n) {
    const std::vector<std::string> names = {"\\a", "\\b", "\\c"};
    const std::vector<std::string> bodies = {"\\mathbb{R}", "\\epsilon", "\\varepsilon"};
    std::vector<Paper> papers;
    for (std::size_t i = 0; i < n; ++i) {
        std::string date = "2000-0" + std::to_string(1 + i / 12 % 9);
        if (rng.bernoulli(0.6)) date += "-" + std::to_string(10 + i % 12);
        std::set<std::string> who;
        const auto k = rng.bernoulli(0.75) ? 2 : rng.range(1, 3);
        while (who.size() < static_cast<std::size_t>(k)) who.insert("u" + std::to_string(rng.range(0, 5)));
        std::vector<std::string> byline(who.begin(), who.end());
        rng.shuffle(byline);
        std::string src;
        const auto defs = rng.range(1, 3);
        for (long d = 0; d < defs; ++d)
            src += def(names[rng.index(names.size())], bodies[rng.index(bodies.size())]);
        papers.push_back(paper("r" + std::to_string(i), date, byline, src));
    }
    return Corpus(papers);
}

CorpusMacros swapped(const CorpusMacros& macros) {
    CorpusMacros out = macros;
    for (auto& defs : out.by_paper)
        for (auto& d : defs) std::swap(d.name, d.body);
    return out;
}

TitleFight title_fight(double py, double po, int indicator, std::size_t ey = 5, std::size_t eo = 25) {
    TitleFight f;
    f.younger_profile = py;
    f.older_profile = po;
    f.indicator = indicator;
    f.younger_experience = ey;
    f.older_experience = eo;
    return f;
}

FightRecord gap_record(std::size_t e1, std::size_t e2, int winner) {
    FightRecord r;
    r.first_experience = e1;
    r.second_experience = e2;
    r.winner = winner;
    return r;
}

}  // namespace

TEST_CASE("name fight examples") {
    const std::string R = "\\mathbb{R}";
    std::vector<Paper> base = {paper("p1", "2001-01", {"A"}, def("\\Reals", R)),
                               paper("p2", "2001-02", {"B"}, def("\\R", R))};

    auto with = [&](std::vector<Paper> extra) {
        auto all = base;
        all.insert(all.end(), extra.begin(), extra.end());
        return Corpus(all);
    };

    auto fights = name_fights(with({paper("p3", "2001-03", {"A", "B"}, def("\\R", R))}));
    REQUIRE(fights.size() == 1);
    const auto& f = fights[0];
    CHECK(f.paper_id == "p3");
    CHECK(f.first == author("A"));
    CHECK(f.first_variant == "\\Reals");
    CHECK(f.second_variant == "\\R");
    CHECK(f.used_variant == "\\R");
    CHECK(f.winner == 1);
    CHECK(f.first_experience == 1);
    CHECK(f.second_experience == 1);
    CHECK(f.experience_gap() == 0);

    CHECK(name_fights(with({paper("p3", "2001-03", {"A", "B"}, def("\\RR", R))})).empty());
    CHECK(name_fights(with({paper("p3", "2001-03", {"A", "B", "C"}, def("\\R", R))})).empty());

    SUBCASE("a pair keeps only its earliest fight") {
        auto c = with({paper("p3", "2001-03", {"A", "B"}, def("\\R", R)),
                       paper("p4", "2001-04", {"A"}, def("\\Reals", R)),
                       paper("p5", "2001-05", {"B", "A"}, def("\\Reals", R))});
        auto got = name_fights(c);
        REQUIRE(got.size() == 1);
        CHECK(got[0].paper_id == "p3");
        auto want = oracle::oracle_fights(c, extract_corpus(c), loose(default_name_fight_filters()), FightKind::Name);
        REQUIRE(want.size() == 1);
        CHECK(support::same_fight(got[0], want[0]));
    }
    SUBCASE("month-ambiguous prior use is discarded") {
        auto c = with({paper("p1b", "2001-01", {"A"}), paper("p3", "2001-03", {"A", "B"}, def("\\R", R))});
        CHECK(name_fights(c).empty());
        auto f2 = loose(default_name_fight_filters());
        f2.require_unambiguous_month = false;
        CHECK(name_fights(c, f2).size() == 1);
    }
    SUBCASE("prior use in the same tie group does not count") {
        auto c = Corpus({paper("p1", "2001-01", {"A"}, def("\\Reals", R)), paper("p2", "2001-03", {"B"}, def("\\R", R)),
                         paper("p3", "2001-03", {"A", "B"}, def("\\R", R))});
        CHECK(name_fights(c).empty());
    }
    SUBCASE("filters") {
        auto c = with({paper("p3", "2001-03", {"A", "B"}, def("\\R", R))});
        auto f2 = loose(default_name_fight_filters());
        f2.min_authors = 3;
        CHECK(name_fights(c, f2).empty());
        f2 = loose(default_name_fight_filters());
        f2.min_key_length = 11;
        CHECK(name_fights(c, f2).empty());
    }
}

TEST_CASE("body fight examples") {
    auto c = Corpus({paper("p1", "2002-01-05", {"A"}, def("\\eps", "\\epsilon")),
                     paper("p2", "2002-01-06", {"B"}, def("\\eps", "\\varepsilon")),
                     paper("p3", "2002-01-07", {"A", "B"}, def("\\eps", "\\varepsilon")),
                     paper("q1", "2002-01-08", {"C"}, def("\\foo", "x")),
                     paper("q2", "2002-01-09", {"D"}, def("\\foo", "y")),
                     paper("q3", "2002-01-10", {"C", "D"}, def("\\foo", "y"))});
    auto macros = extract_corpus(c);
    auto filters = default_body_fight_filters();
    CHECK(filters.key_whitelist == std::vector<std::string>{"\\proof", "\\eps", "\\Re"});
    filters.min_authors = 2;
    auto fights = detect_body_fights(c, build_name_timelines(c, macros), ExperienceLedger(c), filters);
    REQUIRE(fights.size() == 1);
    CHECK(fights[0].key == "\\eps");
    CHECK(fights[0].winner == 1);
    CHECK(fights[0].used_variant == "\\varepsilon");
    CHECK(fights[0].kind == FightKind::Body);
}

TEST_CASE("fight detection matches the oracle on random corpora") {
    Rng rng(101);
    std::size_t total = 0;
    for (int round = 0; round < 60; ++round) {
        auto c = random_corpus(rng, static_cast<std::size_t>(rng.range(10, 80)));
        auto macros = extract_corpus(c);
        ExperienceLedger ledger(c);
        for (bool strict : {true, false}) {
            FightFilters f = loose(default_name_fight_filters());
            f.require_unambiguous_month = strict;
            f.three_author_variant = rng.bernoulli(0.2);
            auto got = detect_fights(c, build_timelines(c, macros), ledger, f, FightKind::Name);
            auto want = oracle::oracle_fights(c, macros, f, FightKind::Name);
            REQUIRE(got.size() == want.size());
            for (std::size_t i = 0; i < got.size(); ++i) CHECK(support::same_fight(got[i], want[i]));
            total += got.size();

            auto bgot = detect_fights(c, build_name_timelines(c, macros), ledger, f, FightKind::Body);
            auto bwant = oracle::oracle_fights(c, macros, f, FightKind::Body);
            REQUIRE(bgot.size() == bwant.size());
            for (std::size_t i = 0; i < bgot.size(); ++i) CHECK(support::same_fight(bgot[i], bwant[i]));
        }
    }
    CHECK(total > 50);
}

TEST_CASE("every detected fight re-checks against its definition") {
    Rng rng(102);
    for (int round = 0; round < 30; ++round) {
        auto c = random_corpus(rng, 60);
        auto macros = extract_corpus(c);
        ExperienceLedger ledger(c);
        std::set<std::pair<AuthorId, AuthorId>> pairs;
        for (const auto& f : detect_name_fights(c, build_timelines(c, macros), ledger, loose(default_name_fight_filters()))) {
            const auto& p = c.paper(f.paper);
            REQUIRE(p.authors.size() == 2);
            CHECK(f.first_variant != f.second_variant);
            CHECK(f.used_variant == (f.winner == 0 ? f.first_variant : f.second_variant));
            CHECK(c.strictly_before(f.first_prior_paper, f.paper));
            CHECK(c.strictly_before(f.second_prior_paper, f.paper));
            CHECK(f.first_experience >= 1);
            CHECK(f.second_experience >= 1);
            CHECK(f.first_experience == ledger.experience(f.first, f.paper));
            CHECK(pairs.insert(std::minmax(f.first, f.second)).second);
        }
    }
}

TEST_CASE("name and body detection are dual under swapping names and bodies") {
    Rng rng(103);
    for (int round = 0; round < 40; ++round) {
        auto c = random_corpus(rng, 50);
        auto macros = extract_corpus(c);
        ExperienceLedger ledger(c);
        FightFilters f = loose(default_name_fight_filters());
        auto body = detect_fights(c, build_name_timelines(c, macros), ledger, f, FightKind::Body);
        auto name = detect_fights(c, build_timelines(c, swapped(macros)), ledger, f, FightKind::Name);
        REQUIRE(body.size() == name.size());
        for (std::size_t i = 0; i < body.size(); ++i) CHECK(support::same_fight(body[i], name[i]));
    }
}

TEST_CASE("fight detection ignores manifest order") {
    Rng rng(104);
    auto c = random_corpus(rng, 80);
    auto reference = name_fights(c);
    auto papers = c.papers();
    for (int round = 0; round < 5; ++round) {
        rng.shuffle(papers);
        auto again = name_fights(Corpus(papers));
        REQUIRE(again.size() == reference.size());
        for (std::size_t i = 0; i < again.size(); ++i) CHECK(support::same_fight(again[i], reference[i]));
    }
}

TEST_CASE("balancing only selects records") {
    std::vector<FightRecord> fights;
    for (std::size_t i = 0; i < 90; ++i) {
        auto r = gap_record(i % 7 + 1, i % 5 + 1, i % 3 == 0 ? 1 : 0);
        r.paper = i;
        fights.push_back(r);
    }
    auto balanced = balance_by_position(fights, 9);
    std::size_t first = 0, second = 0, cursor = 0;
    for (const auto& r : balanced) {
        (r.winner == 0 ? first : second)++;
        while (cursor < fights.size() && fights[cursor].paper != r.paper) ++cursor;
        REQUIRE(cursor < fights.size());
        CHECK(support::same_fight(r, fights[cursor]));
    }
    CHECK(first == second);
    CHECK(first == 30);
    CHECK(balance_by_position(fights, 9).size() == balanced.size());
}

TEST_CASE("win rate by experience gap") {
    std::vector<FightRecord> fights;
    for (std::size_t i = 0; i < 40; ++i) {
        const std::size_t young = 2, old = 2 + 1 + i % 25;
        fights.push_back(i % 2 ? gap_record(young, old, 0) : gap_record(old, young, 1));
    }
    fights.push_back(gap_record(4, 4, 0));
    fights.push_back(gap_record(4, 4, 1));
    auto table = win_rate_by_gap(fights, kDefaultGapEdges, 1);
    REQUIRE(table.buckets.size() == kDefaultGapEdges.size() + 1);
    CHECK(table.buckets[0].label == "0");
    CHECK(table.buckets[0].n == 2);
    CHECK_FALSE(table.buckets[0].rate);
    CHECK(table.successes == 0);
    CHECK(table.decisive == 40);
    for (std::size_t b = 1; b < table.buckets.size(); ++b)
        if (table.buckets[b].n > 0) CHECK(*table.buckets[b].rate == 0.0);
    CHECK(table.buckets.back().n == 0);
    CHECK_FALSE(table.buckets.back().rate);

    CHECK_THROWS_AS(win_rate_by_gap({}, kDefaultGapEdges, 1), std::invalid_argument);
    CHECK_THROWS_AS(win_rate_by_gap(fights, {3, 1}, 1), std::invalid_argument);
    CHECK_THROWS_AS(win_rate_by_gap(fights, {0, 1}, 1), std::invalid_argument);

    auto t = tabulate_gaps({{0.5, true}, {2.0, false}, {45.0, true}}, {1, 3, 40});
    CHECK(t.buckets[1].n == 2);
    CHECK(t.buckets[3].n == 1);
    CHECK(t.buckets[3].label == ">=40");
    CHECK(t.rate == doctest::Approx(2.0 / 3.0));
}

TEST_CASE("fight features") {
    const std::string R = "\\mathbb{R}";
    auto c = Corpus({paper("p1", "2001-01", {"A"}, def("\\Reals", R)), paper("p2", "2001-02", {"B"}, def("\\R", R)),
                     paper("p3", "2001-03", {"A", "B"}, def("\\R", R))});
    auto macros = extract_corpus(c);
    auto timelines = build_timelines(c, macros);
    ExperienceLedger ledger(c);
    auto fights = detect_name_fights(c, timelines, ledger, loose(default_name_fight_filters()));
    auto fm = fight_features(fights, timelines, ledger, FightKind::Name);
    REQUIRE(fm.row_count() == 1);
    CHECK(fm.columns == fight_feature_columns(FightKind::Name));
    CHECK(fm.labels[0] == 1);
    auto col = [&](const std::string& name) {
        auto it = std::find(fm.columns.begin(), fm.columns.end(), name);
        REQUIRE(it != fm.columns.end());
        return fm.rows[0][static_cast<std::size_t>(it - fm.columns.begin())];
    };
    CHECK(col("degree_1") == 0.0);
    CHECK(col("betweenness_1") == 0.0);
    CHECK(col("experience_2") == 1.0);
    CHECK(col("body_length") == 10.0);
    CHECK(fight_feature_columns(FightKind::Body).size() == fight_feature_columns(FightKind::Name).size() + 2);

    // Star: the center co-authored with each of four other users of the body.
    std::vector<Paper> star;
    for (int i = 0; i < 4; ++i) star.push_back(paper("s" + std::to_string(i), day(i), {"center", "leaf" + std::to_string(i)}));
    for (int i = 0; i < 4; ++i) star.push_back(paper("u" + std::to_string(i), day(10 + i), {"leaf" + std::to_string(i)}, def("\\x", R)));
    star.push_back(paper("uc", day(20), {"center"}, def("\\x", R)));
    Corpus sc(star);
    ExperienceLedger sl(sc);
    auto tl = build_timelines(sc, extract_corpus(sc)).at(R);
    auto g = coauthor_graph(sl, tl, sc.tie_group(sc.size() - 1) + 1);
    REQUIRE(g.nodes.size() == 5);
    auto bc = betweenness(g.graph);
    CHECK(bc[*g.index_of(author("center"))] == doctest::Approx(6.0));
    CHECK(oracle::oracle_betweenness(5, g.graph.edges())[*g.index_of(author("center"))] == doctest::Approx(6.0));
}

TEST_CASE("title classification examples") {
    auto a = classify_title("Diffusion of Conventions: A Case Study");
    CHECK(a.has_colon);
    CHECK(a.first_noun);
    CHECK_FALSE(a.has_question_mark);
    auto b = classify_title("Is $P=NP$?");
    CHECK(b.has_question_mark);
    CHECK(b.has_math);
    CHECK(b.first_verb);
    auto c = classify_title("The evolution of conventions");
    CHECK(c.first_determiner);
    CHECK_FALSE(c.first_noun);
    CHECK(classify_title("Bounds on \\alpha").has_math);
    auto unknown = classify_title("Zzxq");
    CHECK(int(unknown.first_noun) + int(unknown.first_verb) + int(unknown.first_adjective) + int(unknown.first_determiner) <= 1);
    CHECK(a[TitleStyleKind::Colon]);
    CHECK(parse_title_style("colon") == TitleStyleKind::Colon);
    CHECK_FALSE(parse_title_style("nonsense"));
    CHECK_THROWS_AS(Lexicon::parse("the determiner extra words\n"), std::invalid_argument);
}

TEST_CASE("first-word classes are exclusive") {
    for (const char* t : {"Fast algorithms", "Towards a theory", "Computing things", "A note", "Quantum gravity",
                          "Beautiful proofs", "Proving bounds", "An approach", "Is it?", "Every graph"}) {
        auto s = classify_title(t);
        CHECK(int(s.first_noun) + int(s.first_verb) + int(s.first_adjective) + int(s.first_determiner) <= 1);
    }
}

namespace {

struct TitleWorld {
    std::vector<Paper> papers;
    std::size_t next = 0;

    void add(const std::vector<std::string>& authors, const std::string& title) {
        papers.push_back(paper("t" + std::to_string(next), day(next), authors, "", title));
        ++next;
    }
};

}  // namespace

TEST_CASE("title profile") {
    TitleWorld w;
    for (int i = 0; i < 10; ++i) w.add({"a"}, i < 3 ? "Part: one" : "Plain");
    for (int i = 0; i < 4; ++i) w.add({"a", "b"}, "Joint: work");
    for (int i = 0; i < 2; ++i) w.add({"b"}, "Solo: b");
    Corpus c(w.papers);
    ExperienceLedger ledger(c);
    auto styles = classify_titles(c);
    CHECK(title_profile(ledger, styles, author("a"), TitleStyleKind::Colon, author("b")) == doctest::Approx(0.3));
    CHECK(title_profile(ledger, styles, author("a"), TitleStyleKind::Colon, std::nullopt) == doctest::Approx(7.0 / 14.0));
    CHECK(title_profile(ledger, styles, author("b"), TitleStyleKind::Colon, author("a")) == doctest::Approx(1.0));

    // Recompute from the raw lists.
    std::size_t eligible = 0, positive = 0;
    for (const auto& p : w.papers) {
        const bool has_a = std::count(p.authors.begin(), p.authors.end(), author("a")) > 0;
        const bool has_b = std::count(p.authors.begin(), p.authors.end(), author("b")) > 0;
        if (!has_a || has_b) continue;
        ++eligible;
        positive += p.title.find(':') != std::string::npos;
    }
    CHECK(title_profile(ledger, styles, author("a"), TitleStyleKind::Colon, author("b")) ==
          doctest::Approx(static_cast<double>(positive) / static_cast<double>(eligible)));

    TitleWorld only_joint;
    only_joint.add({"x", "y"}, "Joint");
    Corpus cj(only_joint.papers);
    ExperienceLedger lj(cj);
    CHECK_THROWS_AS(title_profile(lj, classify_titles(cj), author("x"), TitleStyleKind::Colon, author("y")),
                    std::invalid_argument);
}

TEST_CASE("title fight detection") {
    auto world = [](int younger_papers) {
        TitleWorld w;
        for (int i = 0; i < 20; ++i) w.add({"old"}, i % 2 ? "Old: paper" : "Old paper");
        for (int i = 0; i < younger_papers; ++i) w.add({"young"}, "Young paper");
        w.add({"young", "old"}, "First: together");
        w.add({"old", "young"}, "Second: together");
        return w;
    };
    auto w = world(10);
    Corpus c(w.papers);
    ExperienceLedger ledger(c);
    auto styles = classify_titles(c);
    auto fights = detect_title_fights(c, ledger, styles, TitleStyleKind::Colon);
    REQUIRE(fights.size() == 1);
    CHECK(fights[0].younger == author("young"));
    CHECK(fights[0].older_experience == 20);
    CHECK(fights[0].younger_experience == 10);
    CHECK(fights[0].indicator == 1);
    CHECK(fights[0].younger_profile == doctest::Approx(0.0));
    CHECK(fights[0].older_profile == doctest::Approx(0.5));
    CHECK(fights[0].younger_experience <= fights[0].older_experience);
    CHECK(detect_title_fights(c, ledger, styles, TitleStyleKind::QuestionMark)[0].indicator == 0);

    auto w9 = world(9);
    Corpus c9(w9.papers);
    ExperienceLedger l9(c9);
    CHECK(detect_title_fights(c9, l9, classify_titles(c9), TitleStyleKind::Colon).empty());

    TitleFightFilters strict;
    strict.older_exp_threshold = 21;
    CHECK(detect_title_fights(c, ledger, styles, TitleStyleKind::Colon, strict).empty());
}

TEST_CASE("title fight matching") {
    auto a = title_fight(0.8, 0.2, 1);
    auto b = title_fight(0.2, 0.8, 0);
    auto r = match_title_fights({a, b});
    REQUIRE(r.pairs.size() == 1);
    CHECK(r.unmatched == 0);
    CHECK_FALSE(r.pairs[0].high_dominant);
    CHECK(high_experience_dominant(a, b) == high_experience_dominant(b, a));

    auto flipped = match_title_fights({title_fight(0.8, 0.2, 0), title_fight(0.2, 0.8, 1)});
    REQUIRE(flipped.pairs.size() == 1);
    CHECK(flipped.pairs[0].high_dominant);

    CHECK(match_title_fights({a, title_fight(0.2, 0.8, 1)}).pairs.empty());
    CHECK(match_title_fights({a, title_fight(0.26, 0.8, 0)}).pairs.empty());
    CHECK(match_title_fights({a, title_fight(0.24, 0.76, 0)}).pairs.size() == 1);
    CHECK_FALSE(high_experience_dominant(title_fight(0.5, 0.5, 1), title_fight(0.5, 0.5, 0)));
}

TEST_CASE("matched title pairs satisfy the contract and verdicts are symmetric") {
    Rng rng(105);
    std::vector<TitleFight> fights;
    for (int i = 0; i < 400; ++i)
        fights.push_back(title_fight(rng.uniform(), rng.uniform(), rng.bernoulli(0.5) ? 1 : 0));
    auto r = match_title_fights(fights, 0.05);
    CHECK(!r.pairs.empty());
    CHECK(r.pairs.size() * 2 + r.unmatched == fights.size());
    for (const auto& p : r.pairs) {
        CHECK(std::abs(p.second.younger_profile - p.first.older_profile) <= 0.05);
        CHECK(std::abs(p.second.older_profile - p.first.younger_profile) <= 0.05);
        CHECK(p.second.indicator == 1 - p.first.indicator);
        CHECK(high_experience_dominant(p.first, p.second) == p.high_dominant);
        CHECK(high_experience_dominant(p.second, p.first) == p.high_dominant);
    }
}

TEST_CASE("dominance by gap") {
    std::vector<TitleFightPair> pairs;
    for (std::size_t i = 0; i < 30; ++i)
        pairs.push_back({title_fight(0.8, 0.2, 0, 1, 3 + i), title_fight(0.2, 0.8, 1, 1, 3 + i), true});
    auto all = dominance_by_gap(pairs, kDefaultGapEdges);
    for (const auto& b : all.buckets)
        if (b.rate) CHECK(*b.rate == 1.0);
    CHECK(all.buckets[0].n == 0);
    CHECK(all.rate == 1.0);

    Rng rng(106);
    for (auto& p : pairs) p.high_dominant = rng.bernoulli(0.5);
    for (int i = 0; i < 2000; ++i)
        pairs.push_back({title_fight(0.8, 0.2, 0, 1, 10), title_fight(0.2, 0.8, 1, 1, 10), rng.bernoulli(0.5)});
    auto uniform = dominance_by_gap(pairs, kDefaultGapEdges);
    CHECK(uniform.rate == doctest::Approx(0.5).epsilon(0.08));
}

#include "macroconv/synth.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <tuple>

#include <json.hpp>

#include "macroconv/macros.hpp"

namespace macroconv {

namespace {

using Json = nlohmann::ordered_json;

std::string letters(std::size_t i) {
    std::string out;
    do {
        out.insert(out.begin(), static_cast<char>('a' + i % 26));
        i /= 26;
    } while (i > 0);
    return out;
}

std::string padded(std::size_t i, int width) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%0*zu", width, i);
    return buf;
}

Timestamp date_for(std::size_t index, std::size_t per_day) {
    using namespace std::chrono;
    const sys_days day = sys_days{year{1991} / August / 1} + days{static_cast<int>(index / per_day)};
    const year_month_day ymd{day};
    return Timestamp{static_cast<int>(ymd.year()), static_cast<int>(unsigned(ymd.month())),
                     static_cast<int>(unsigned(ymd.day()))};
}

struct Use {
    std::string name;
    std::string body;
};

class Builder {
public:
    Builder(const SynthConfig& config, Rng& rng) : config_(config), rng_(rng) {}

    std::string add(std::vector<std::string> authors, const std::vector<Use>& uses,
                    std::string title) {
        Paper p;
        const std::size_t index = papers_.size();
        p.id = "synth-" + padded(index, 7);
        p.timestamp = date_for(index, config_.papers_per_day);
        for (const auto& a : authors) p.authors.push_back(normalize_author(a));
        p.title = std::move(title);
        p.source = source_for(uses);
        papers_.push_back(std::move(p));
        return papers_.back().id;
    }

    std::vector<Paper> take() { return std::move(papers_); }

private:
    std::string source_for(const std::vector<Use>& uses) {
        std::string src = "\\documentclass{article}\n";
        for (const auto& u : uses) {
            switch (rng_.index(3)) {
                case 0: src += "\\newcommand{" + u.name + "}{" + u.body + "}\n"; break;
                case 1: src += "\\def" + u.name + "{" + u.body + "}\n"; break;
                default: src += "\\newcommand*" + u.name + "{" + u.body + "} % shorthand\n"; break;
            }
        }
        src += "\\begin{document}\nWe write";
        for (const auto& u : uses) src += " $" + u.name + "$";
        src += ".\n\\end{document}\n";
        return src;
    }

    const SynthConfig& config_;
    Rng& rng_;
    std::vector<Paper> papers_;
};

std::string plain_title(std::size_t n) { return "Notes on problem " + std::to_string(n); }

void add_changeover_bodies(const SynthConfig& c, Rng& rng, Builder& b, GroundTruth& truth) {
    const std::size_t total = c.changeover_bodies + c.control_bodies;
    if (total == 0) return;
    struct Event {
        double time;
        std::size_t body;
        std::size_t rank;
    };
    std::vector<Event> events;
    std::vector<PlantedBody> planted;
    std::vector<std::vector<int>> late_flags(total);
    for (std::size_t i = 0; i < total; ++i) {
        PlantedBody pb;
        pb.changeover = i < c.changeover_bodies;
        const std::string tag = letters(i);
        pb.body_key = normalize_body("\\operatorname{" + std::string(pb.changeover ? "Chg" : "Ctl") + tag + "}");
        pb.early_name = "\\" + std::string(pb.changeover ? "chg" : "ctl") + tag + "old";
        pb.late_name = "\\" + std::string(pb.changeover ? "chg" : "ctl") + tag + "new";
        pb.m = static_cast<std::size_t>(rng.range(static_cast<long>(c.min_occurrences),
                                                  static_cast<long>(c.max_occurrences)));
        pb.switch_point = pb.changeover ? 0.35 + 0.3 * rng.uniform() : 0.5;
        auto& flags = late_flags[i];
        flags.resize(pb.m);
        for (std::size_t r = 0; r < pb.m; ++r) {
            const double pos = static_cast<double>(r) / static_cast<double>(pb.m);
            if (pb.changeover)
                flags[r] = pos >= pb.switch_point;
            else
                flags[r] = pos >= pb.switch_point && rng.bernoulli(0.25);
        }
        if (!pb.changeover && std::find(flags.begin(), flags.end(), 1) == flags.end())
            flags.back() = 1;
        std::vector<double> times(pb.m);
        for (auto& t : times) t = rng.uniform();
        std::sort(times.begin(), times.end());
        for (std::size_t r = 0; r < pb.m; ++r) events.push_back({times[r], i, r});
        planted.push_back(std::move(pb));
    }
    std::sort(events.begin(), events.end(), [](const Event& x, const Event& y) {
        return std::tie(x.time, x.body, x.rank) < std::tie(y.time, y.body, y.rank);
    });
    std::size_t title_no = 0;
    for (const auto& e : events) {
        const auto& pb = planted[e.body];
        std::vector<std::size_t> picks;
        const std::size_t n_auth = 1 + rng.index(3);
        while (picks.size() < n_auth) {
            const std::size_t a = rng.index(c.author_pool);
            if (std::find(picks.begin(), picks.end(), a) == picks.end()) picks.push_back(a);
        }
        std::vector<std::string> authors;
        for (auto a : picks) authors.push_back("Pool Author " + padded(a, 4));
        const auto& name = late_flags[e.body][e.rank] ? pb.late_name : pb.early_name;
        b.add(std::move(authors), {{name, pb.body_key}}, plain_title(title_no++));
    }
    for (auto& pb : planted) truth.bodies.push_back(std::move(pb));
}

struct FightSpec {
    FightKind kind;
    std::string key;
    std::string variant_a;
    std::string variant_b;
    std::string prefix;
    double younger_win;
};

void add_fight(const SynthConfig& c, Rng& rng, Builder& b, GroundTruth& truth, const FightSpec& s,
               std::size_t index) {
    const std::string id = padded(index, 5);
    const std::string author_a = s.prefix + " " + id + " Alpha";
    const std::string author_b = s.prefix + " " + id + " Beta";
    const std::size_t ea = 1 + rng.index(c.max_fight_experience);
    std::size_t eb = 1 + rng.index(c.max_fight_experience - 1);
    if (eb >= ea) ++eb;
    const bool swap_variants = rng.bernoulli(0.5);
    const std::string& var_a = swap_variants ? s.variant_b : s.variant_a;
    const std::string& var_b = swap_variants ? s.variant_a : s.variant_b;
    auto use_of = [&](const std::string& variant) {
        return s.kind == FightKind::Name ? Use{variant, s.key} : Use{s.key, variant};
    };
    auto solo = [&](const std::string& who, std::size_t count, const std::string& variant) {
        for (std::size_t k = 0; k < count; ++k) {
            std::vector<Use> uses;
            if (k + 1 == count) uses.push_back(use_of(variant));
            b.add({who}, uses, "Remarks by " + who + " part " + std::to_string(k + 1));
        }
    };
    solo(author_a, ea, var_a);
    solo(author_b, eb, var_b);

    const bool younger_won = rng.bernoulli(s.younger_win);
    const bool a_younger = ea < eb;
    const bool a_wins = younger_won == a_younger;
    const bool a_first = rng.bernoulli(0.5);
    const std::string& used = a_wins ? var_a : var_b;
    std::vector<std::string> byline = a_first ? std::vector<std::string>{author_a, author_b}
                                              : std::vector<std::string>{author_b, author_a};
    const std::string paper = b.add(byline, {use_of(used)}, "Joint work " + id);

    PlantedFight f;
    f.kind = s.kind;
    f.paper_id = paper;
    f.key = s.key;
    f.first = normalize_author(byline[0]);
    f.second = normalize_author(byline[1]);
    f.winner = a_wins == a_first ? 0 : 1;
    f.younger_won = younger_won;
    f.first_experience = a_first ? ea : eb;
    f.second_experience = a_first ? eb : ea;
    truth.fights.push_back(std::move(f));
}

void add_name_fights(const SynthConfig& c, Rng& rng, Builder& b, GroundTruth& truth) {
    if (c.name_fights == 0) return;
    const std::size_t bodies = std::clamp<std::size_t>(c.name_fights / 20, 1, 20);
    for (std::size_t i = 0; i < c.name_fights; ++i) {
        const std::size_t k = i % bodies;
        const std::string tag = letters(k);
        FightSpec s{FightKind::Name, normalize_body("\\mathbb{F}_{" + tag + "}^{n}"),
                    "\\F" + tag + "field", "\\F" + tag + "fld", "Name Fighter",
                    c.younger_win_probability};
        add_fight(c, rng, b, truth, s, i);
    }
}

void add_body_fights(const SynthConfig& c, Rng& rng, Builder& b, GroundTruth& truth) {
    static const std::vector<std::array<std::string, 3>> kNames = {
        {"\\eps", "\\epsilon", "\\varepsilon"},
        {"\\Re", "\\mathbb{R}", "\\operatorname{Re}"},
        {"\\proof", "\\textbf{Proof.}", "\\emph{Proof.}"},
    };
    for (std::size_t i = 0; i < c.body_fights; ++i) {
        const auto& n = kNames[i % kNames.size()];
        FightSpec s{FightKind::Body, n[0], normalize_body(n[1]), normalize_body(n[2]),
                    "Body Fighter", c.body_younger_win_probability};
        add_fight(c, rng, b, truth, s, i);
    }
}

void add_title_pairs(const SynthConfig& c, Rng& rng, Builder& b, GroundTruth& truth) {
    std::size_t fight_no = 0;
    auto title = [](bool colon, const std::string& topic) {
        return colon ? "Topic " + topic + ": a note" : "A note on topic " + topic;
    };
    auto add_member = [&](double py, double po, int indicator) {
        const std::string id = padded(fight_no++, 5);
        const std::string older = "Senior Writer " + id;
        const std::string younger = "Junior Writer " + id;
        const std::size_t n_older = rng.bernoulli(0.5) ? 20 : 30;
        const std::size_t n_younger = 10;
        auto flags = [&](std::size_t n, double p) {
            std::vector<int> f(n, 0);
            const auto pos = static_cast<std::size_t>(std::llround(p * static_cast<double>(n)));
            std::fill(f.begin(), f.begin() + static_cast<std::ptrdiff_t>(pos), 1);
            rng.shuffle(f);
            return f;
        };
        const auto of = flags(n_older, po);
        const auto yf = flags(n_younger, py);
        const std::size_t before = 1 + rng.index(n_younger - 1);
        for (std::size_t k = 0; k < n_older; ++k)
            b.add({older}, {}, title(of[k], id + "-o" + std::to_string(k)));
        for (std::size_t k = 0; k < before; ++k)
            b.add({younger}, {}, title(yf[k], id + "-y" + std::to_string(k)));
        std::vector<std::string> byline = rng.bernoulli(0.5) ? std::vector<std::string>{older, younger}
                                                             : std::vector<std::string>{younger, older};
        const std::string paper = b.add(byline, {}, title(indicator == 1, id + "-joint"));
        for (std::size_t k = before; k < n_younger; ++k)
            b.add({younger}, {}, title(yf[k], id + "-y" + std::to_string(k)));
        return paper;
    };
    for (std::size_t t = 0; t < c.title_pairs; ++t) {
        const std::size_t ka = 1 + rng.index(9);
        std::size_t kb = 1 + rng.index(8);
        if (kb >= ka) ++kb;
        const double a = static_cast<double>(ka) / 10.0;
        const double bb = static_cast<double>(kb) / 10.0;
        const bool high = rng.bernoulli(c.high_dominance_probability);
        // The member whose younger author has the higher profile carries the style only
        // when low experience dominates.
        const int first_indicator = (a > bb) == high ? 0 : 1;
        PlantedTitlePair p;
        p.first_paper_id = add_member(a, bb, first_indicator);
        p.second_paper_id = add_member(bb, a, 1 - first_indicator);
        p.high_dominant = high;
        p.first_younger_profile = a;
        p.first_older_profile = bb;
        truth.title_pairs.push_back(std::move(p));
    }
}

void check_probability(double p, const char* what) {
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument(std::string(what) + " must be in [0, 1]");
}

}  // namespace

std::string_view to_string(SynthPreset preset) {
    switch (preset) {
        case SynthPreset::Changeover: return "changeover";
        case SynthPreset::NameFights: return "name-fights";
        case SynthPreset::TitleFights: return "title-fights";
        case SynthPreset::Full: return "full";
    }
    return "full";
}

std::optional<SynthPreset> parse_synth_preset(std::string_view name) {
    for (auto p : {SynthPreset::Changeover, SynthPreset::NameFights, SynthPreset::TitleFights,
                   SynthPreset::Full})
        if (to_string(p) == name) return p;
    return std::nullopt;
}

void SynthConfig::validate() const {
    check_probability(younger_win_probability, "younger win probability");
    check_probability(body_younger_win_probability, "body younger win probability");
    check_probability(high_dominance_probability, "high dominance probability");
    if (papers_per_day == 0) throw std::invalid_argument("papers per day must be positive");
    if (changeover_bodies + control_bodies > 0) {
        if (min_occurrences < 10 || min_occurrences > max_occurrences)
            throw std::invalid_argument("occurrence range must satisfy 10 <= min <= max");
        if (author_pool < 3) throw std::invalid_argument("author pool must hold at least 3 authors");
    }
    if (name_fights > 0 && name_fights < 15)
        throw std::invalid_argument("at least 15 name fights are needed to reach 30 authors per body");
    if (body_fights > 0 && body_fights < 45)
        throw std::invalid_argument("at least 45 body fights are needed to reach 30 authors per name");
    if ((name_fights > 0 || body_fights > 0) && max_fight_experience < 2)
        throw std::invalid_argument("max fight experience must be at least 2");
}

SynthConfig SynthConfig::preset(SynthPreset preset, std::uint64_t seed) {
    SynthConfig c;
    c.seed = seed;
    switch (preset) {
        case SynthPreset::Changeover:
            c.changeover_bodies = 40;
            c.control_bodies = 80;
            break;
        case SynthPreset::NameFights:
            c.name_fights = 2000;
            break;
        case SynthPreset::TitleFights:
            c.title_pairs = 1500;
            break;
        case SynthPreset::Full:
            c.changeover_bodies = 20;
            c.control_bodies = 40;
            c.name_fights = 300;
            c.body_fights = 180;
            c.title_pairs = 150;
            break;
    }
    return c;
}

SynthCorpus generate(const SynthConfig& config) {
    config.validate();
    Rng rng(config.seed);
    Builder builder(config, rng);
    SynthCorpus out;
    out.truth.seed = config.seed;
    out.truth.config = config;
    add_changeover_bodies(config, rng, builder, out.truth);
    add_name_fights(config, rng, builder, out.truth);
    add_body_fights(config, rng, builder, out.truth);
    add_title_pairs(config, rng, builder, out.truth);
    out.papers = builder.take();
    return out;
}

std::string ground_truth_json(const GroundTruth& t) {
    Json j;
    j["seed"] = t.seed;
    const auto& c = t.config;
    j["config"] = {{"changeover_bodies", c.changeover_bodies},
                   {"control_bodies", c.control_bodies},
                   {"min_occurrences", c.min_occurrences},
                   {"max_occurrences", c.max_occurrences},
                   {"author_pool", c.author_pool},
                   {"name_fights", c.name_fights},
                   {"body_fights", c.body_fights},
                   {"younger_win_probability", c.younger_win_probability},
                   {"body_younger_win_probability", c.body_younger_win_probability},
                   {"max_fight_experience", c.max_fight_experience},
                   {"title_pairs", c.title_pairs},
                   {"high_dominance_probability", c.high_dominance_probability},
                   {"papers_per_day", c.papers_per_day}};
    j["bodies"] = Json::array();
    for (const auto& b : t.bodies)
        j["bodies"].push_back({{"body", b.body_key},
                               {"changeover", b.changeover},
                               {"early_name", b.early_name},
                               {"late_name", b.late_name},
                               {"m", b.m},
                               {"switch_point", b.switch_point}});
    j["fights"] = Json::array();
    for (const auto& f : t.fights)
        j["fights"].push_back({{"kind", f.kind == FightKind::Name ? "name" : "body"},
                               {"paper_id", f.paper_id},
                               {"key", f.key},
                               {"first", f.first.str()},
                               {"second", f.second.str()},
                               {"winner", f.winner},
                               {"younger_won", f.younger_won},
                               {"first_experience", f.first_experience},
                               {"second_experience", f.second_experience}});
    j["title_pairs"] = Json::array();
    for (const auto& p : t.title_pairs)
        j["title_pairs"].push_back({{"first_paper_id", p.first_paper_id},
                                    {"second_paper_id", p.second_paper_id},
                                    {"high_dominant", p.high_dominant},
                                    {"first_younger_profile", p.first_younger_profile},
                                    {"first_older_profile", p.first_older_profile}});
    return j.dump(2) + "\n";
}

void write_synth(const SynthCorpus& synth, const std::string& dir) {
    std::filesystem::create_directories(dir);
    write_manifest(Corpus(synth.papers), std::filesystem::path(dir) / "manifest.jsonl");
    std::ofstream out(std::filesystem::path(dir) / "ground_truth.json", std::ios::binary);
    if (!out) throw InputError("cannot write ground truth in " + dir);
    out << ground_truth_json(synth.truth);
}

Timeline random_timeline(Rng& rng, std::size_t m, std::size_t names) {
    if (names == 0) throw std::invalid_argument("timeline needs at least one name");
    std::vector<std::string> pool;
    for (std::size_t i = 0; i < names; ++i) pool.push_back("\\n" + letters(i));
    const std::size_t authors = 1 + rng.index(std::max<std::size_t>(m, 1));
    const std::size_t segments = 1 + rng.index(3);
    std::vector<std::size_t> dominant(segments);
    std::vector<double> strength(segments);
    for (std::size_t s = 0; s < segments; ++s) {
        dominant[s] = rng.index(names);
        strength[s] = 0.4 + 0.6 * rng.uniform();
    }
    std::vector<Occurrence> occ;
    std::size_t group = 0;
    for (std::size_t i = 0; i < m; ++i) {
        if (i > 0 && rng.bernoulli(0.8)) ++group;
        const std::size_t seg = i * segments / m;
        Occurrence o;
        o.paper = i;
        o.tie_group = group;
        o.variant = rng.bernoulli(strength[seg]) ? pool[dominant[seg]] : pool[rng.index(names)];
        const std::size_t n_auth = 1 + rng.index(3);
        for (std::size_t k = 0; k < n_auth; ++k) {
            auto a = AuthorId::from_normalized("a" + std::to_string(rng.index(authors)));
            if (std::find(o.authors.begin(), o.authors.end(), a) == o.authors.end())
                o.authors.push_back(std::move(a));
        }
        occ.push_back(std::move(o));
    }
    return Timeline("\\body", std::move(occ));
}

Timeline crossover_timeline(Rng& rng, std::size_t m, double t_star, double p_major) {
    std::vector<Occurrence> occ;
    occ.reserve(m);
    for (std::size_t i = 0; i < m; ++i) {
        const bool before = static_cast<double>(i) < t_star * static_cast<double>(m) - 1e-9;
        const bool major = rng.bernoulli(p_major);
        Occurrence o;
        o.paper = i;
        o.tie_group = i;
        o.variant = (before == major) ? "\\old" : "\\new";
        o.authors.push_back(AuthorId::from_normalized("x" + std::to_string(i)));
        occ.push_back(std::move(o));
    }
    return Timeline("\\crossbody", std::move(occ));
}

}  // namespace macroconv

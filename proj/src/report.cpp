#include "macroconv/report.hpp"

#include <algorithm>
#include <charconv>
#include <map>
#include <cmath>
#include <fstream>
#include <set>
#include <stdexcept>
#include <unordered_set>

#include <json.hpp>

#include "macroconv/macros.hpp"

namespace macroconv {

namespace {

std::string quote_csv(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

std::string quote_json(const std::string& s) {
    return nlohmann::json(s).dump(-1, ' ', false, nlohmann::json::error_handler_t::replace);
}

std::string cell_text(const Cell& c, bool json) {
    if (std::holds_alternative<std::monostate>(c)) return json ? "null" : "";
    if (auto* i = std::get_if<long long>(&c)) return std::to_string(*i);
    if (auto* d = std::get_if<double>(&c)) {
        if (!std::isfinite(*d)) return json ? "null" : "";
        return format_number(*d);
    }
    const auto& s = std::get<std::string>(c);
    return json ? quote_json(s) : quote_csv(s);
}

Cell count(std::size_t n) { return static_cast<long long>(n); }
Cell opt(const std::optional<double>& v) { return v ? Cell{*v} : Cell{}; }

std::string signature_of(const std::string& key) {
    const auto sep = key.find('\x1f');
    return sep == std::string::npos ? std::string() : key.substr(0, sep);
}

std::string join(const std::vector<std::string>& parts, const std::string& sep) {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i) out += sep;
        out += parts[i];
    }
    return out;
}

std::string kind_name(FightKind k) { return k == FightKind::Name ? "name" : "body"; }

}  // namespace

void Table::add(std::vector<Cell> row) {
    if (row.size() != columns.size()) throw std::logic_error("table row width mismatch");
    rows.push_back(std::move(row));
}

std::string format_number(double value) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, res.ptr);
}

std::string to_csv(const Table& table) {
    std::string out;
    for (std::size_t i = 0; i < table.columns.size(); ++i) {
        if (i) out += ',';
        out += quote_csv(table.columns[i]);
    }
    out += '\n';
    for (const auto& row : table.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out += ',';
            out += cell_text(row[i], false);
        }
        out += '\n';
    }
    return out;
}

std::string to_json(const Table& table) {
    std::string out = "[";
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        out += r ? ",\n  {" : "\n  {";
        for (std::size_t i = 0; i < table.columns.size(); ++i) {
            if (i) out += ", ";
            out += quote_json(table.columns[i]) + ": " + cell_text(table.rows[r][i], true);
        }
        out += "}";
    }
    out += table.rows.empty() ? "]\n" : "\n]\n";
    return out;
}

std::filesystem::path write_table(const Table& table, const std::filesystem::path& dir,
                                  const std::string& stem, OutputFormat format) {
    std::filesystem::create_directories(dir);
    const auto path = dir / (stem + (format == OutputFormat::Csv ? ".csv" : ".json"));
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write " + path.string());
    out << (format == OutputFormat::Csv ? to_csv(table) : to_json(table));
    if (!out) throw InputError("failed writing " + path.string());
    return path;
}

CorpusSummary summarize(const Corpus& corpus, const CorpusMacros& macros) {
    CorpusSummary s;
    s.papers = corpus.size();
    std::unordered_set<AuthorId> authors;
    std::size_t author_slots = 0;
    for (std::size_t p = 0; p < corpus.size(); ++p) {
        if (!macros.by_paper[p].empty()) ++s.papers_with_macro;
        s.definitions += macros.by_paper[p].size();
        for (const auto& a : corpus.paper(p).authors) authors.insert(a);
        author_slots += corpus.paper(p).authors.size();
    }
    s.unique_authors = authors.size();
    if (s.papers > 0)
        s.authors_per_paper = static_cast<double>(author_slots) / static_cast<double>(s.papers);

    // Names per body counts every name defined for the body, not only each paper's first.
    std::map<std::string, std::set<std::string>> names;
    for (const auto& defs : macros.by_paper)
        for (const auto& d : defs) names[d.body_key()].insert(d.name);
    s.unique_bodies = names.size();
    if (!names.empty()) {
        std::size_t total = 0;
        for (const auto& [body, set] : names) total += set.size();
        s.names_per_body = static_cast<double>(total) / static_cast<double>(names.size());
    }
    return s;
}

Table summary_table(const CorpusSummary& s) {
    Table t{{"quantity", "value"}, {}};
    t.add({std::string("papers_with_macro"), count(s.papers_with_macro)});
    t.add({std::string("definitions"), count(s.definitions)});
    t.add({std::string("unique_bodies"), count(s.unique_bodies)});
    t.add({std::string("names_per_body"), s.names_per_body});
    t.add({std::string("unique_authors"), count(s.unique_authors)});
    t.add({std::string("authors_per_paper"), s.authors_per_paper});
    return t;
}

Table definitions_table(const Corpus& corpus, const CorpusMacros& macros) {
    Table t{{"paper_id", "name", "body", "defining_command", "signature"}, {}};
    for (std::size_t p = 0; p < corpus.size(); ++p)
        for (const auto& d : macros.by_paper[p])
            t.add({corpus.paper(p).id, d.name, d.body, std::string(to_string(d.command)), d.signature});
    return t;
}

Table timelines_table(const TimelineMap& timelines) {
    Table t{{"body", "signature", "m", "distinct_authors", "name_count", "names"}, {}};
    for (const auto& [key, tl] : timelines) {
        const auto v = tl.variants();
        t.add({std::string(body_of_key(key)), signature_of(key), count(tl.m()),
               count(tl.distinct_authors()), count(v.size()), join(v, " ")});
    }
    return t;
}

Table changeovers_table(const std::vector<ChangeoverRecord>& records) {
    Table t{{"body", "signature", "early_name", "late_name", "m", "crossing_point"}, {}};
    for (const auto& r : records)
        t.add({std::string(body_of_key(r.body)), signature_of(r.body), r.early_name, r.late_name,
               count(r.m), opt(r.crossing_point)});
    return t;
}

Table curves_table(const std::vector<ChangeoverRecord>& records) {
    Table t{{"body", "signature", "t", "f", "g"}, {}};
    for (const auto& r : records)
        for (std::size_t k = 0; k < r.f_curve.size(); ++k)
            t.add({std::string(body_of_key(r.body)), signature_of(r.body), r.f_curve.t(k),
                   r.f_curve.values[k], r.g_curve.values[k]});
    return t;
}

Table median_curves_table(const AggregateCurves& c) {
    Table t{{"t", "median_f", "median_g", "crossings"}, {}};
    for (std::size_t k = 0; k < c.median_f.size(); ++k)
        t.add({c.median_f.t(k), c.median_f.values[k], c.median_g.values[k],
               count(c.crossing_histogram[k])});
    return t;
}

Table matched_pairs_table(const std::vector<MatchedPair>& pairs) {
    Table t{{"changeover_body", "early_name", "late_name", "m_changeover", "control_body",
             "control_early_name", "control_late_name", "m_control", "f_changeover",
             "g_changeover", "f_control", "g_control"},
            {}};
    for (const auto& p : pairs)
        t.add({std::string(body_of_key(p.changeover_body)), p.early_name, p.late_name,
               count(p.m_changeover), std::string(body_of_key(p.control_body)),
               p.control_early_name, p.control_late_name, count(p.m_control), p.f_changeover,
               p.g_changeover, p.f_control, p.g_control});
    return t;
}

Table experience_curves_table(const ExperienceCurves& c) {
    Table t{{"name_role", "measure", "t", "mean_experience"}, {}};
    const std::pair<const char*, const NameExperience*> roles[] = {
        {"early", &c.early}, {"late", &c.late}, {"control_early", &c.control_early},
        {"control_late", &c.control_late}};
    for (const auto& [role, exp] : roles) {
        for (const auto& [measure, series] :
             {std::pair{"usage", &exp->usage}, std::pair{"adoption", &exp->adoption}}) {
            for (std::size_t k = 0; k < series->values.size(); ++k)
                t.add({std::string(role), std::string(measure),
                       static_cast<double>(k) * series->step, opt(series->values[k])});
        }
    }
    return t;
}

Table fights_table(const std::vector<FightRecord>& fights) {
    Table t{{"kind", "paper_id", "key", "key_signature", "first_author", "second_author", "first_variant",
             "second_variant", "used_variant", "winner", "first_experience", "second_experience",
             "older_wins"},
            {}};
    for (const auto& f : fights) {
        Cell older = f.first_experience == f.second_experience ? Cell{} : count(f.older_wins() ? 1 : 0);
        t.add({kind_name(f.kind), f.paper_id, std::string(body_of_key(f.key)), signature_of(f.key), f.first.str(), f.second.str(),
               f.first_variant, f.second_variant, f.used_variant, count(static_cast<std::size_t>(f.winner)),
               count(f.first_experience), count(f.second_experience), older});
    }
    return t;
}

Table feature_table(const FeatureMatrix& m) {
    Table t;
    t.columns.push_back("id");
    t.columns.insert(t.columns.end(), m.columns.begin(), m.columns.end());
    t.columns.push_back("label");
    for (std::size_t r = 0; r < m.row_count(); ++r) {
        std::vector<Cell> row;
        row.push_back(m.row_ids.empty() ? std::string() : m.row_ids[r]);
        for (double v : m.rows[r]) row.push_back(v);
        row.push_back(static_cast<long long>(m.labels[r]));
        t.add(std::move(row));
    }
    return t;
}

Table gap_table(const GapTable& g) {
    Table t{{"bucket", "gap_lo", "gap_hi", "n", "successes", "rate"}, {}};
    for (const auto& b : g.buckets)
        t.add({b.label, b.lo, opt(b.hi), count(b.n), count(b.successes), opt(b.rate)});
    t.add({std::string("decisive"), Cell{}, Cell{}, count(g.decisive), count(g.successes),
           g.decisive ? Cell{g.rate} : Cell{}});
    t.add({std::string("binomial_p_value"), Cell{}, Cell{}, count(g.decisive), count(g.successes),
           g.p_value});
    return t;
}

Table title_fights_table(const std::vector<TitleFight>& fights) {
    Table t{{"style", "paper_id", "younger", "older", "younger_experience", "older_experience",
             "younger_profile", "older_profile", "indicator"},
            {}};
    for (const auto& f : fights)
        t.add({std::string(to_string(f.style)), f.paper_id, f.younger.str(), f.older.str(),
               count(f.younger_experience), count(f.older_experience), f.younger_profile,
               f.older_profile, count(static_cast<std::size_t>(f.indicator))});
    return t;
}

Table title_pairs_table(const std::vector<TitleFightPair>& pairs) {
    Table t{{"style", "first_paper_id", "second_paper_id", "first_younger_profile",
             "first_older_profile", "first_indicator", "second_younger_profile",
             "second_older_profile", "second_indicator", "mean_gap", "verdict"},
            {}};
    for (const auto& p : pairs) {
        const double gap = (static_cast<double>(p.first.older_experience) -
                            static_cast<double>(p.first.younger_experience) +
                            static_cast<double>(p.second.older_experience) -
                            static_cast<double>(p.second.younger_experience)) /
                           2.0;
        t.add({std::string(to_string(p.first.style)), p.first.paper_id, p.second.paper_id,
               p.first.younger_profile, p.first.older_profile,
               count(static_cast<std::size_t>(p.first.indicator)), p.second.younger_profile,
               p.second.older_profile, count(static_cast<std::size_t>(p.second.indicator)), gap,
               std::string(p.high_dominant ? "high" : "low")});
    }
    return t;
}

PredictionRow predict(const FeatureMatrix& data, const std::string& feature_set,
                      double train_frac, std::uint64_t seed, double l2) {
    auto parts = split(data, train_frac, seed, true);
    auto [train, stats] = zscore(parts.train);
    const auto test = apply_zscore(parts.test, stats);
    LogisticConfig cfg;
    cfg.seed = seed;
    cfg.l2 = l2;
    PredictionRow row;
    row.feature_set = feature_set;
    row.model = logistic_fit(train, cfg);
    row.train_rows = train.row_count();
    row.test_rows = test.row_count();
    for (std::size_t r = 0; r < test.row_count(); ++r) {
        const int guess = logistic_predict(row.model, test.rows[r]) >= 0.5 ? 1 : 0;
        if (guess == test.labels[r]) ++row.correct;
    }
    row.accuracy = row.test_rows ? static_cast<double>(row.correct) / static_cast<double>(row.test_rows) : 0.0;
    row.accuracy_interval = binomial_interval(row.correct, row.test_rows);
    row.constant_columns = stats.constant_columns;
    return row;
}

Table prediction_table(const std::vector<PredictionRow>& rows) {
    Table t{{"feature_set", "train_rows", "test_rows", "correct", "accuracy", "ci_low", "ci_high",
             "iterations", "converged", "final_loss"},
            {}};
    for (const auto& r : rows)
        t.add({r.feature_set, count(r.train_rows), count(r.test_rows), count(r.correct), r.accuracy,
               r.accuracy_interval.lo, r.accuracy_interval.hi, count(r.model.iterations),
               count(r.model.converged ? 1 : 0), r.model.final_loss});
    return t;
}

Table coefficient_table(const std::vector<PredictionRow>& rows) {
    Table t{{"feature_set", "column", "coefficient", "constant"}, {}};
    for (const auto& r : rows) {
        for (std::size_t i = 0; i < r.model.columns.size(); ++i) {
            const bool constant = std::find(r.constant_columns.begin(), r.constant_columns.end(),
                                            r.model.columns[i]) != r.constant_columns.end();
            t.add({r.feature_set, r.model.columns[i], r.model.coefficients[i], count(constant ? 1 : 0)});
        }
        t.add({r.feature_set, std::string("(intercept)"), r.model.intercept, count(0)});
    }
    return t;
}

}  // namespace macroconv

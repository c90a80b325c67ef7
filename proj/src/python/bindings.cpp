#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "macroconv/analytics.hpp"
#include "macroconv/changeover.hpp"
#include "macroconv/cli.hpp"
#include "macroconv/corpus.hpp"
#include "macroconv/fights.hpp"
#include "macroconv/macros.hpp"
#include "macroconv/report.hpp"
#include "macroconv/synth.hpp"
#include "macroconv/timeline.hpp"

namespace py = pybind11;
using namespace macroconv;

namespace {

// Everything derived from one loaded corpus, built once.
struct Analysis {
    explicit Analysis(Corpus c)
        : corpus(std::move(c)),
          macros(extract_corpus(corpus)),
          body_timelines(build_timelines(corpus, macros)),
          name_timelines(build_name_timelines(corpus, macros)),
          ledger(corpus) {}

    Corpus corpus;
    CorpusMacros macros;
    TimelineMap body_timelines;
    TimelineMap name_timelines;
    ExperienceLedger ledger;
};

std::shared_ptr<Analysis> load(const std::string& path) {
    auto loaded = load_corpus(path);
    return std::make_shared<Analysis>(std::move(loaded.corpus));
}

std::vector<ChangeoverRecord> changeovers(const Analysis& a, const ChangeoverParams& params) {
    params.validate();
    std::vector<ChangeoverRecord> out;
    for (const auto& [key, tl] : a.body_timelines)
        if (auto rec = detect_changeover(tl, params)) out.push_back(std::move(*rec));
    return out;
}

FeatureMatrix matrix_from(const std::vector<std::vector<double>>& rows, const std::vector<int>& labels) {
    FeatureMatrix m;
    if (!rows.empty())
        for (std::size_t i = 0; i < rows.front().size(); ++i) m.columns.push_back("x" + std::to_string(i));
    m.rows = rows;
    m.labels = labels;
    m.validate();
    return m;
}

}  // namespace

PYBIND11_MODULE(_macroconv, m) {
    m.doc() = "Competing LaTeX macro conventions: extraction, changeovers and fights";

    py::register_exception<InputError>(m, "InputError", PyExc_ValueError);

    m.def("normalize_author", [](const std::string& raw) { return normalize_author(raw).str(); });

    py::class_<MacroDefinition>(m, "MacroDefinition")
        .def_readonly("name", &MacroDefinition::name)
        .def_readonly("body", &MacroDefinition::body)
        .def_readonly("signature", &MacroDefinition::signature)
        .def_property_readonly("command", [](const MacroDefinition& d) { return std::string(to_string(d.command)); })
        .def("__repr__", [](const MacroDefinition& d) { return "<MacroDefinition " + d.name + " -> " + d.body + ">"; });

    m.def("extract_definitions",
          [](const std::string& source) { return resolve_paper_macros(extract_definitions(source, "").definitions); },
          py::arg("source"), "Resolved macro definitions of one LaTeX source, in source order");

    py::class_<ChangeoverParams>(m, "ChangeoverParams")
        .def(py::init<>())
        .def_readwrite("s", &ChangeoverParams::s)
        .def_readwrite("q", &ChangeoverParams::q)
        .def_readwrite("theta", &ChangeoverParams::theta)
        .def_readwrite("delta", &ChangeoverParams::delta)
        .def_readwrite("persistence", &ChangeoverParams::persistence)
        .def("validate", &ChangeoverParams::validate);

    py::class_<ChangeoverRecord>(m, "ChangeoverRecord")
        .def_property_readonly("body", [](const ChangeoverRecord& r) { return std::string(body_of_key(r.body)); })
        .def_readonly("early_name", &ChangeoverRecord::early_name)
        .def_readonly("late_name", &ChangeoverRecord::late_name)
        .def_readonly("m", &ChangeoverRecord::m)
        .def_readonly("crossing_point", &ChangeoverRecord::crossing_point)
        .def_property_readonly("f", [](const ChangeoverRecord& r) { return r.f_curve.values; })
        .def_property_readonly("g", [](const ChangeoverRecord& r) { return r.g_curve.values; });

    py::class_<FightRecord>(m, "FightRecord")
        .def_readonly("paper_id", &FightRecord::paper_id)
        .def_readonly("key", &FightRecord::key)
        .def_property_readonly("first", [](const FightRecord& f) { return f.first.str(); })
        .def_property_readonly("second", [](const FightRecord& f) { return f.second.str(); })
        .def_readonly("first_variant", &FightRecord::first_variant)
        .def_readonly("second_variant", &FightRecord::second_variant)
        .def_readonly("used_variant", &FightRecord::used_variant)
        .def_readonly("winner", &FightRecord::winner)
        .def_readonly("first_experience", &FightRecord::first_experience)
        .def_readonly("second_experience", &FightRecord::second_experience)
        .def("older_wins", &FightRecord::older_wins);

    py::class_<GapBucket>(m, "GapBucket")
        .def_readonly("label", &GapBucket::label)
        .def_readonly("n", &GapBucket::n)
        .def_readonly("successes", &GapBucket::successes)
        .def_readonly("rate", &GapBucket::rate);

    py::class_<GapTable>(m, "GapTable")
        .def_readonly("buckets", &GapTable::buckets)
        .def_readonly("decisive", &GapTable::decisive)
        .def_readonly("successes", &GapTable::successes)
        .def_readonly("rate", &GapTable::rate)
        .def_readonly("p_value", &GapTable::p_value);

    py::class_<Analysis, std::shared_ptr<Analysis>>(m, "Corpus")
        .def_static("load", &load, py::arg("path"), "Load a manifest file or a directory holding manifest.jsonl")
        .def("__len__", [](const Analysis& a) { return a.corpus.size(); })
        .def("paper_ids",
             [](const Analysis& a) {
                 std::vector<std::string> ids;
                 for (const auto& p : a.corpus.papers()) ids.push_back(p.id);
                 return ids;
             })
        .def("definitions",
             [](const Analysis& a, const std::string& paper_id) {
                 auto pos = a.corpus.find(paper_id);
                 if (!pos) throw py::key_error(paper_id);
                 return a.macros.by_paper[*pos];
             })
        .def("summary",
             [](const Analysis& a) {
                 const auto s = summarize(a.corpus, a.macros);
                 py::dict d;
                 d["papers_with_macro"] = s.papers_with_macro;
                 d["definitions"] = s.definitions;
                 d["unique_bodies"] = s.unique_bodies;
                 d["names_per_body"] = s.names_per_body;
                 d["unique_authors"] = s.unique_authors;
                 d["authors_per_paper"] = s.authors_per_paper;
                 return d;
             })
        .def("changeovers", &changeovers, py::arg("params") = ChangeoverParams{})
        .def(
            "name_fights",
            [](const Analysis& a, std::size_t min_authors, std::size_t min_body_len) {
                auto f = default_name_fight_filters();
                f.min_authors = min_authors;
                f.min_key_length = min_body_len;
                return detect_name_fights(a.corpus, a.body_timelines, a.ledger, f);
            },
            py::arg("min_authors") = 30, py::arg("min_body_len") = 10)
        .def(
            "body_fights",
            [](const Analysis& a, std::size_t min_authors) {
                auto f = default_body_fight_filters();
                f.min_authors = min_authors;
                return detect_body_fights(a.corpus, a.name_timelines, a.ledger, f);
            },
            py::arg("min_authors") = 30);

    m.def("win_rate_by_gap", &win_rate_by_gap, py::arg("fights"), py::arg("edges") = kDefaultGapEdges,
          py::arg("seed") = 1);

    m.def("binomial_test", &binomial_test, py::arg("k"), py::arg("n"), py::arg("p0") = 0.5);

    m.def(
        "betweenness",
        [](std::size_t nodes, const std::vector<std::pair<std::size_t, std::size_t>>& edges) {
            UndirectedGraph g(nodes);
            for (const auto& [a, b] : edges) g.add_edge(a, b);
            return betweenness(g);
        },
        py::arg("nodes"), py::arg("edges"));

    m.def(
        "logistic_fit",
        [](const std::vector<std::vector<double>>& rows, const std::vector<int>& labels, double l2) {
            LogisticConfig cfg;
            cfg.l2 = l2;
            const auto model = logistic_fit(matrix_from(rows, labels), cfg);
            py::dict d;
            d["coefficients"] = model.coefficients;
            d["intercept"] = model.intercept;
            d["converged"] = model.converged;
            d["iterations"] = model.iterations;
            d["loss"] = model.final_loss;
            return d;
        },
        py::arg("rows"), py::arg("labels"), py::arg("l2") = 0.0);

    m.def(
        "synth",
        [](const std::string& preset, std::uint64_t seed, const std::string& out_dir) {
            auto p = parse_synth_preset(preset);
            if (!p) throw py::value_error("unknown preset: " + preset);
            const auto s = generate(SynthConfig::preset(*p, seed));
            write_synth(s, out_dir);
            return s.papers.size();
        },
        py::arg("preset"), py::arg("seed"), py::arg("out_dir"), "Write a synthetic corpus; returns its paper count");

    m.def(
        "run",
        [](const std::vector<std::string>& args) {
            std::ostringstream out, err;
            const int code = cli::run(args, out, err);
            return py::make_tuple(code, out.str(), err.str());
        },
        py::arg("args"), "Run the command-line tool; returns (exit code, stdout, stderr)");
}

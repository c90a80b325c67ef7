#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "macroconv/analytics.hpp"
#include "macroconv/changeover.hpp"
#include "macroconv/corpus.hpp"
#include "macroconv/fights.hpp"
#include "macroconv/timeline.hpp"

namespace macroconv {

/// A table cell: empty (missing), integer, real or text.
using Cell = std::variant<std::monostate, long long, double, std::string>;

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;

    void add(std::vector<Cell> row);
};

enum class OutputFormat { Csv, Json };

/// Shortest decimal text that round-trips the double.
std::string format_number(double value);

/// Header row, then one line per row. Text is always quoted; numbers never are.
std::string to_csv(const Table& table);
/// Array of objects with the same fields and order as the CSV.
std::string to_json(const Table& table);

/// Writes `<stem>.csv` or `<stem>.json` under `dir` and returns the path.
std::filesystem::path write_table(const Table& table, const std::filesystem::path& dir,
                                  const std::string& stem, OutputFormat format);

struct CorpusSummary {
    std::size_t papers = 0;
    std::size_t papers_with_macro = 0;
    std::size_t definitions = 0;
    std::size_t unique_bodies = 0;
    double names_per_body = 0.0;
    std::size_t unique_authors = 0;
    double authors_per_paper = 0.0;
};

CorpusSummary summarize(const Corpus& corpus, const CorpusMacros& macros);

Table summary_table(const CorpusSummary& summary);
Table definitions_table(const Corpus& corpus, const CorpusMacros& macros);
Table timelines_table(const TimelineMap& timelines);
Table changeovers_table(const std::vector<ChangeoverRecord>& records);
Table curves_table(const std::vector<ChangeoverRecord>& records);
Table median_curves_table(const AggregateCurves& curves);
Table matched_pairs_table(const std::vector<MatchedPair>& pairs);
Table experience_curves_table(const ExperienceCurves& curves);
Table fights_table(const std::vector<FightRecord>& fights);
Table feature_table(const FeatureMatrix& matrix);
Table gap_table(const GapTable& gaps);
Table title_fights_table(const std::vector<TitleFight>& fights);
Table title_pairs_table(const std::vector<TitleFightPair>& pairs);

struct PredictionRow {
    std::string feature_set;
    std::size_t train_rows = 0;
    std::size_t test_rows = 0;
    std::size_t correct = 0;
    double accuracy = 0.0;
    Interval accuracy_interval;
    LogisticModel model;
    std::vector<std::string> constant_columns;
};

/// Split, z-score on the training rows, fit, and score on the held-out rows.
PredictionRow predict(const FeatureMatrix& data, const std::string& feature_set,
                      double train_frac, std::uint64_t seed, double l2 = 0.0);

Table prediction_table(const std::vector<PredictionRow>& rows);
Table coefficient_table(const std::vector<PredictionRow>& rows);

}  // namespace macroconv

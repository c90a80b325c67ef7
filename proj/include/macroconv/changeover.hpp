#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "macroconv/analytics.hpp"
#include "macroconv/timeline.hpp"

namespace macroconv {

struct ChangeoverParams {
    std::size_t s = 100;       // minimum occurrences
    double q = 0.3;            // early/late fraction
    double theta = 0.3;        // author-fraction threshold
    double delta = 0.05;       // sliding-window width
    double persistence = 0.1;  // how long a crossing must hold

    /// Throws std::invalid_argument naming the first violated constraint.
    void validate() const;
};

/// Values of a sliding-window function on the grid t_k = k * step.
struct Curve {
    double step = 0.0;
    std::vector<double> values;

    double t(std::size_t k) const { return static_cast<double>(k) * step; }
    std::size_t size() const { return values.size(); }
};

/// Number of grid points in {0, step, 2*step, ..., 1 - step}.
std::size_t grid_size(double step);

struct ChangeoverRecord {
    std::string body;
    std::string early_name;
    std::string late_name;
    std::size_t m = 0;
    Curve f_curve;  // early-name author fraction
    Curve g_curve;  // late-name author fraction
    std::optional<double> crossing_point;
};

/// Fraction of distinct authors in [t0, t1] that used `name` at least once there.
/// Throws std::invalid_argument on an empty timeline.
double usage_fraction(const Timeline& timeline, std::string_view name, double t0, double t1);

/// Most frequent variant in [t0, t1]; ties go to the variant seen first in the slice.
std::string most_used_name(const Timeline& timeline, double t0, double t1);

std::optional<ChangeoverRecord> detect_changeover(const Timeline& timeline,
                                                  const ChangeoverParams& params);

Curve sliding_curve(const Timeline& timeline, std::string_view name, double delta);

/// Smallest grid t where g >= f at every grid point of [t, t + persistence] (clipped to the
/// grid). Throws std::invalid_argument when the grids differ.
std::optional<double> crossing_point(const Curve& f, const Curve& g, double persistence);

struct AggregateCurves {
    Curve median_f;
    Curve median_g;
    std::vector<std::size_t> crossing_histogram;  // per grid point
    std::size_t with_crossing = 0;
};

/// Pointwise medians and crossing-point histogram. Throws on empty input or mixed grids.
AggregateCurves aggregate_median_curves(const std::vector<ChangeoverRecord>& records);

struct MatchedPair {
    std::string changeover_body;
    std::string early_name;
    std::string late_name;
    std::size_t m_changeover = 0;
    std::string control_body;
    std::string control_early_name;
    std::string control_late_name;
    std::size_t m_control = 0;
    double f_changeover = 0.0;
    double g_changeover = 0.0;
    double f_control = 0.0;
    double g_control = 0.0;
};

struct MatchTolerances {
    double min_volume_ratio = 0.91;
    double max_volume_ratio = 1.1;
    double max_prevalence_gap = 0.01;
};

struct MatchResult {
    std::vector<MatchedPair> pairs;
    std::size_t unmatched = 0;
};

/// Bodies that fail the changeover test but satisfy the volume filter and have at least two
/// variants. Sorted by descending volume, then key.
std::vector<const Timeline*> control_candidates(const TimelineMap& timelines,
                                                const ChangeoverParams& params);

/// Greedy matching without replacement; candidates are scanned in descending volume.
MatchResult match_pairs(const std::vector<ChangeoverRecord>& changeovers,
                        const TimelineMap& timelines,
                        const std::vector<const Timeline*>& candidates, double q,
                        const MatchTolerances& tolerances = {});

/// One mean-experience series per window; empty windows hold std::nullopt.
struct ExperienceSeries {
    double step = 0.0;
    std::vector<std::optional<double>> values;
};

struct NameExperience {
    ExperienceSeries usage;
    ExperienceSeries adoption;
};

/// Per-window mean experience of the name's users, and of its first-time users, in one body.
NameExperience name_experience(const Timeline& timeline, std::string_view name,
                               const ExperienceLedger& ledger, double delta);

struct ExperienceCurves {
    NameExperience early;          // N_e
    NameExperience late;           // N_l
    NameExperience control_early;  // N_e'
    NameExperience control_late;   // N_l'
};

/// Averages each window over the pairs that have data in it.
ExperienceCurves experience_curves(const std::vector<MatchedPair>& pairs,
                                   const TimelineMap& timelines, const ExperienceLedger& ledger,
                                   double delta);

/// Two rows per matched pair: the changeover body (label 1) and its control (label 0).
FeatureMatrix changeover_features(const std::vector<MatchedPair>& pairs,
                                  const TimelineMap& timelines, const ExperienceLedger& ledger,
                                  const ChangeoverParams& params);

/// Column names produced by changeover_features.
std::vector<std::string> changeover_feature_columns(const ChangeoverParams& params);

/// Named column subsets used for the changeover prediction table.
struct FeatureSet {
    std::string name;
    std::vector<std::string> columns;
};
std::vector<FeatureSet> changeover_feature_sets(const ChangeoverParams& params);

}  // namespace macroconv

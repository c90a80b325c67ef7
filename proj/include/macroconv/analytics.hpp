#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "macroconv/graph.hpp"

namespace macroconv {

/// Rectangular feature table with binary labels.
struct FeatureMatrix {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
    std::vector<int> labels;
    std::vector<std::string> row_ids;  // optional; empty or one per row

    std::size_t row_count() const { return rows.size(); }
    std::size_t column_count() const { return columns.size(); }

    /// Throws std::invalid_argument if the table is ragged, labels are not 0/1, or any entry
    /// is not finite.
    void validate() const;

    void append(std::vector<double> row, int label, std::string id = {});

    /// Keeps only the named columns, in the given order.
    FeatureMatrix select(const std::vector<std::string>& names) const;
    FeatureMatrix subset(const std::vector<std::size_t>& row_indices) const;
};

struct ColumnStats {
    std::vector<double> mean;
    std::vector<double> stdev;  // population standard deviation
    std::vector<std::string> constant_columns;
};

/// Fits z-score statistics (population stdev) and normalizes the matrix in place of a copy.
/// Zero-variance columns become all zeros and are listed in `constant_columns`.
/// Throws std::invalid_argument for fewer than two rows.
std::pair<FeatureMatrix, ColumnStats> zscore(const FeatureMatrix& matrix);
FeatureMatrix apply_zscore(const FeatureMatrix& matrix, const ColumnStats& stats);

struct SplitResult {
    FeatureMatrix train;
    FeatureMatrix test;
};

/// Balances labels by seeded subsampling (when `balance`), then makes a stratified split.
/// Throws std::invalid_argument when a label is absent.
SplitResult split(const FeatureMatrix& matrix, double train_frac, std::uint64_t seed,
                  bool balance = true);

struct LogisticConfig {
    std::size_t max_iterations = 10000;
    double gradient_tolerance = 1e-8;
    double l2 = 0.0;
    std::uint64_t seed = 0;
};

struct LogisticModel {
    std::vector<std::string> columns;
    std::vector<double> coefficients;
    double intercept = 0.0;
    std::size_t iterations = 0;
    bool converged = false;
    double final_loss = 0.0;           // mean negative log-likelihood
    double final_log_likelihood = 0.0; // summed
    std::vector<double> loss_history;
    std::uint64_t seed = 0;
};

/// Mean negative log-likelihood (+ l2/2 |w|^2) and its gradient. `params` holds the
/// coefficients followed by the intercept; `gradient` is resized to match.
double logistic_loss(const FeatureMatrix& data, const std::vector<double>& params, double l2,
                     std::vector<double>& gradient);

/// Maximum-likelihood fit by gradient descent with backtracking line search.
LogisticModel logistic_fit(const FeatureMatrix& train, const LogisticConfig& config = {});
double logistic_predict(const LogisticModel& model, const std::vector<double>& row);
double accuracy(const LogisticModel& model, const FeatureMatrix& test);

/// Exact two-sided binomial test: total probability of outcomes no more likely than k.
/// Throws std::invalid_argument unless 0 <= k <= n and 0 <= p0 <= 1.
double binomial_test(std::uint64_t k, std::uint64_t n, double p0 = 0.5);

double binomial_pmf(std::uint64_t k, std::uint64_t n, double p);

struct Interval {
    double lo = 0.0;
    double hi = 1.0;
};

/// Exact (Clopper-Pearson) confidence interval for a binomial proportion.
Interval binomial_interval(std::uint64_t k, std::uint64_t n, double confidence = 0.95);

/// Unnormalized shortest-path betweenness with each unordered pair counted once.
std::vector<double> betweenness(const UndirectedGraph& graph);

}  // namespace macroconv

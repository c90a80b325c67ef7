#include "macroconv/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <queue>
#include <stdexcept>

#include "macroconv/rng.hpp"

namespace macroconv {

void FeatureMatrix::validate() const {
    if (!row_ids.empty() && row_ids.size() != rows.size())
        throw std::invalid_argument("row id count does not match row count");
    if (labels.size() != rows.size()) throw std::invalid_argument("label count does not match rows");
    for (const auto& r : rows) {
        if (r.size() != columns.size()) throw std::invalid_argument("ragged feature matrix");
        for (double v : r)
            if (!std::isfinite(v)) throw std::invalid_argument("non-finite feature value");
    }
    for (int y : labels)
        if (y != 0 && y != 1) throw std::invalid_argument("labels must be 0 or 1");
}

void FeatureMatrix::append(std::vector<double> row, int label, std::string id) {
    if (row.size() != columns.size()) throw std::invalid_argument("row width mismatch");
    rows.push_back(std::move(row));
    labels.push_back(label);
    if (!id.empty() || !row_ids.empty()) {
        row_ids.resize(rows.size() - 1);
        row_ids.push_back(std::move(id));
    }
}

FeatureMatrix FeatureMatrix::select(const std::vector<std::string>& names) const {
    std::vector<std::size_t> idx;
    for (const auto& n : names) {
        auto it = std::find(columns.begin(), columns.end(), n);
        if (it == columns.end()) throw std::invalid_argument("unknown feature column: " + n);
        idx.push_back(static_cast<std::size_t>(it - columns.begin()));
    }
    FeatureMatrix out;
    out.columns = names;
    out.labels = labels;
    out.row_ids = row_ids;
    out.rows.reserve(rows.size());
    for (const auto& r : rows) {
        std::vector<double> picked;
        picked.reserve(idx.size());
        for (auto i : idx) picked.push_back(r[i]);
        out.rows.push_back(std::move(picked));
    }
    return out;
}

FeatureMatrix FeatureMatrix::subset(const std::vector<std::size_t>& row_indices) const {
    FeatureMatrix out;
    out.columns = columns;
    for (auto i : row_indices) {
        out.rows.push_back(rows.at(i));
        out.labels.push_back(labels.at(i));
        if (!row_ids.empty()) out.row_ids.push_back(row_ids.at(i));
    }
    return out;
}

std::pair<FeatureMatrix, ColumnStats> zscore(const FeatureMatrix& matrix) {
    if (matrix.row_count() < 2) throw std::invalid_argument("z-score needs at least two rows");
    const std::size_t cols = matrix.column_count();
    const double n = static_cast<double>(matrix.row_count());
    ColumnStats stats;
    stats.mean.assign(cols, 0.0);
    stats.stdev.assign(cols, 0.0);
    for (const auto& r : matrix.rows)
        for (std::size_t c = 0; c < cols; ++c) stats.mean[c] += r[c];
    for (auto& m : stats.mean) m /= n;
    for (const auto& r : matrix.rows)
        for (std::size_t c = 0; c < cols; ++c) {
            const double d = r[c] - stats.mean[c];
            stats.stdev[c] += d * d;
        }
    for (std::size_t c = 0; c < cols; ++c) {
        stats.stdev[c] = std::sqrt(stats.stdev[c] / n);
        if (stats.stdev[c] == 0.0) stats.constant_columns.push_back(matrix.columns[c]);
    }
    return {apply_zscore(matrix, stats), stats};
}

FeatureMatrix apply_zscore(const FeatureMatrix& matrix, const ColumnStats& stats) {
    if (stats.mean.size() != matrix.column_count())
        throw std::invalid_argument("z-score statistics do not match matrix width");
    FeatureMatrix out = matrix;
    for (auto& r : out.rows)
        for (std::size_t c = 0; c < r.size(); ++c)
            r[c] = stats.stdev[c] == 0.0 ? 0.0 : (r[c] - stats.mean[c]) / stats.stdev[c];
    return out;
}

SplitResult split(const FeatureMatrix& matrix, double train_frac, std::uint64_t seed,
                  bool balance) {
    if (!(train_frac > 0.0 && train_frac < 1.0))
        throw std::invalid_argument("train fraction must lie in (0, 1)");
    std::vector<std::size_t> by_label[2];
    for (std::size_t i = 0; i < matrix.row_count(); ++i)
        by_label[matrix.labels[i] == 1].push_back(i);
    if (by_label[0].empty() || by_label[1].empty())
        throw std::invalid_argument("split needs both labels present");

    Rng rng(seed);
    rng.shuffle(by_label[0]);
    rng.shuffle(by_label[1]);
    if (balance) {
        const std::size_t keep = std::min(by_label[0].size(), by_label[1].size());
        by_label[0].resize(keep);
        by_label[1].resize(keep);
    }
    std::vector<std::size_t> train, test;
    for (auto& cls : by_label) {
        const auto n_train = static_cast<std::size_t>(
            std::llround(train_frac * static_cast<double>(cls.size())));
        train.insert(train.end(), cls.begin(), cls.begin() + static_cast<long>(n_train));
        test.insert(test.end(), cls.begin() + static_cast<long>(n_train), cls.end());
    }
    std::sort(train.begin(), train.end());
    std::sort(test.begin(), test.end());
    return {matrix.subset(train), matrix.subset(test)};
}

namespace {

double softplus(double z) { return z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

double sigmoid(double z) {
    if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

double max_abs(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

}  // namespace

double logistic_loss(const FeatureMatrix& data, const std::vector<double>& params, double l2,
                     std::vector<double>& gradient) {
    const std::size_t d = data.column_count();
    if (params.size() != d + 1) throw std::invalid_argument("parameter vector has wrong size");
    gradient.assign(d + 1, 0.0);
    double loss = 0.0;
    const double n = static_cast<double>(data.row_count());
    for (std::size_t i = 0; i < data.row_count(); ++i) {
        const auto& x = data.rows[i];
        double z = params[d];
        for (std::size_t c = 0; c < d; ++c) z += params[c] * x[c];
        const double y = data.labels[i];
        loss += softplus(z) - y * z;
        const double r = sigmoid(z) - y;
        for (std::size_t c = 0; c < d; ++c) gradient[c] += r * x[c];
        gradient[d] += r;
    }
    loss /= n;
    for (auto& g : gradient) g /= n;
    for (std::size_t c = 0; c < d; ++c) {
        loss += 0.5 * l2 * params[c] * params[c];
        gradient[c] += l2 * params[c];
    }
    return loss;
}

LogisticModel logistic_fit(const FeatureMatrix& train, const LogisticConfig& config) {
    train.validate();
    if (train.row_count() == 0) throw std::invalid_argument("cannot fit on an empty matrix");
    const std::size_t d = train.column_count();
    std::vector<double> params(d + 1, 0.0), grad, trial(d + 1), trial_grad;
    double loss = logistic_loss(train, params, config.l2, grad);

    LogisticModel model;
    model.columns = train.columns;
    model.seed = config.seed;
    model.loss_history.push_back(loss);

    double step = 1.0;
    std::size_t it = 0;
    for (; it < config.max_iterations; ++it) {
        if (max_abs(grad) < config.gradient_tolerance) {
            model.converged = true;
            break;
        }
        double g2 = 0.0;
        for (double g : grad) g2 += g * g;
        step = std::min(step * 2.0, 1e6);
        double trial_loss = loss;
        bool accepted = false;
        while (step > 1e-20) {
            for (std::size_t c = 0; c <= d; ++c) trial[c] = params[c] - step * grad[c];
            trial_loss = logistic_loss(train, trial, config.l2, trial_grad);
            if (trial_loss <= loss - 1e-4 * step * g2) {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) break;  // no further decrease representable
        params.swap(trial);
        grad.swap(trial_grad);
        loss = trial_loss;
        model.loss_history.push_back(loss);
    }
    if (!model.converged && max_abs(grad) < config.gradient_tolerance) model.converged = true;

    model.coefficients.assign(params.begin(), params.begin() + static_cast<long>(d));
    model.intercept = params[d];
    model.iterations = it;
    model.final_loss = loss;
    model.final_log_likelihood = -loss * static_cast<double>(train.row_count());
    return model;
}

double logistic_predict(const LogisticModel& model, const std::vector<double>& row) {
    if (row.size() != model.coefficients.size())
        throw std::invalid_argument("row width does not match model");
    double z = model.intercept;
    for (std::size_t c = 0; c < row.size(); ++c) z += model.coefficients[c] * row[c];
    return sigmoid(z);
}

double accuracy(const LogisticModel& model, const FeatureMatrix& test) {
    if (test.row_count() == 0) throw std::invalid_argument("accuracy of an empty test set");
    std::size_t correct = 0;
    for (std::size_t i = 0; i < test.row_count(); ++i) {
        const int predicted = logistic_predict(model, test.rows[i]) >= 0.5 ? 1 : 0;
        if (predicted == test.labels[i]) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(test.row_count());
}

double binomial_pmf(std::uint64_t k, std::uint64_t n, double p) {
    if (k > n) return 0.0;
    if (p <= 0.0) return k == 0 ? 1.0 : 0.0;
    if (p >= 1.0) return k == n ? 1.0 : 0.0;
    const double kd = static_cast<double>(k), nd = static_cast<double>(n);
    const double log_pmf = std::lgamma(nd + 1) - std::lgamma(kd + 1) - std::lgamma(nd - kd + 1) +
                           kd * std::log(p) + (nd - kd) * std::log1p(-p);
    return std::exp(log_pmf);
}

double binomial_test(std::uint64_t k, std::uint64_t n, double p0) {
    if (k > n) throw std::invalid_argument("binomial test requires k <= n");
    if (!(p0 >= 0.0 && p0 <= 1.0)) throw std::invalid_argument("p0 must lie in [0, 1]");
    const double observed = binomial_pmf(k, n, p0);
    // Relative slack so outcomes equal to the observed one up to rounding are included.
    const double threshold = observed * (1.0 + 1e-7);
    double p = 0.0;
    for (std::uint64_t i = 0; i <= n; ++i) {
        const double pi = binomial_pmf(i, n, p0);
        if (pi <= threshold) p += pi;
    }
    return std::min(1.0, p);
}

namespace {

double upper_tail(std::uint64_t k, std::uint64_t n, double p) {
    double s = 0.0;
    for (std::uint64_t i = k; i <= n; ++i) s += binomial_pmf(i, n, p);
    return s;
}

double lower_tail(std::uint64_t k, std::uint64_t n, double p) {
    double s = 0.0;
    for (std::uint64_t i = 0; i <= k; ++i) s += binomial_pmf(i, n, p);
    return s;
}

// Root of a function increasing in p on [0, 1].
template <typename F>
double bisect(F&& f, double target) {
    double lo = 0.0, hi = 1.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (f(mid) < target ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace

Interval binomial_interval(std::uint64_t k, std::uint64_t n, double confidence) {
    if (k > n || n == 0) throw std::invalid_argument("binomial interval requires 0 <= k <= n, n > 0");
    const double alpha = 1.0 - confidence;
    Interval ci;
    if (k > 0) ci.lo = bisect([&](double p) { return upper_tail(k, n, p); }, alpha / 2);
    if (k < n) ci.hi = bisect([&](double p) { return 1.0 - lower_tail(k, n, p); }, 1.0 - alpha / 2);
    return ci;
}

std::vector<double> betweenness(const UndirectedGraph& graph) {
    const std::size_t n = graph.node_count();
    std::vector<double> score(n, 0.0);
    std::vector<std::vector<std::size_t>> preds(n);
    std::vector<double> sigma(n), delta(n);
    std::vector<long> dist(n);
    std::vector<std::size_t> order;
    order.reserve(n);
    for (std::size_t s = 0; s < n; ++s) {
        for (auto& p : preds) p.clear();
        std::fill(sigma.begin(), sigma.end(), 0.0);
        std::fill(delta.begin(), delta.end(), 0.0);
        std::fill(dist.begin(), dist.end(), -1);
        order.clear();
        sigma[s] = 1.0;
        dist[s] = 0;
        std::queue<std::size_t> queue;
        queue.push(s);
        while (!queue.empty()) {
            const std::size_t v = queue.front();
            queue.pop();
            order.push_back(v);
            for (std::size_t w : graph.neighbors(v)) {
                if (dist[w] < 0) {
                    dist[w] = dist[v] + 1;
                    queue.push(w);
                }
                if (dist[w] == dist[v] + 1) {
                    sigma[w] += sigma[v];
                    preds[w].push_back(v);
                }
            }
        }
        for (auto it = order.rbegin(); it != order.rend(); ++it) {
            const std::size_t w = *it;
            for (std::size_t v : preds[w]) delta[v] += sigma[v] / sigma[w] * (1.0 + delta[w]);
            if (w != s) score[w] += delta[w];
        }
    }
    for (auto& x : score) x /= 2.0;
    return score;
}

}  // namespace macroconv

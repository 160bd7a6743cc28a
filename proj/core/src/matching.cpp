#include "reqcomp/matching.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "reqcomp/errors.hpp"

namespace reqcomp::metrics {

double MatchedPairSet::total_similarity() const {
    double total = 0.0;
    for (const MatchedPair& pair : pairs) total += pair.similarity;
    return total;
}

// Assignment by shortest augmenting paths over row/column potentials,
// minimizing cost = -weight on the zero-padded square matrix.
double hungarian_max(const std::vector<std::vector<double>>& weight,
                     std::vector<int>& row_to_col) {
    std::size_t rows = weight.size();
    std::size_t cols = rows == 0 ? 0 : weight[0].size();
    for (const auto& row : weight) {
        if (row.size() != cols) throw ValidationError("weight matrix is ragged");
        for (double w : row) {
            if (!std::isfinite(w)) throw ValidationError("weight matrix has a non-finite entry");
        }
    }
    row_to_col.assign(rows, -1);
    if (rows == 0 || cols == 0) return 0.0;

    std::size_t n = std::max(rows, cols);
    std::vector<std::vector<double>> a(n + 1, std::vector<double>(n + 1, 0.0));
    for (std::size_t i = 0; i < rows; ++i) {
        for (std::size_t j = 0; j < cols; ++j) a[i + 1][j + 1] = -weight[i][j];
    }

    const double kInf = std::numeric_limits<double>::infinity();
    std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0), minv(n + 1, kInf);
    std::vector<int> p(n + 1, 0), way(n + 1, 0);
    std::vector<char> used(n + 1, 0);

    for (std::size_t i = 1; i <= n; ++i) {
        p[0] = static_cast<int>(i);
        std::size_t j0 = 0;
        std::fill(minv.begin(), minv.end(), kInf);
        std::fill(used.begin(), used.end(), 0);
        do {
            used[j0] = 1;
            std::size_t i0 = static_cast<std::size_t>(p[j0]);
            std::size_t j1 = 0;
            double delta = kInf;
            for (std::size_t j = 1; j <= n; ++j) {
                if (used[j]) continue;
                double cur = a[i0][j] - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = static_cast<int>(j0);
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (std::size_t j = 0; j <= n; ++j) {
                if (used[j]) {
                    u[static_cast<std::size_t>(p[j])] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (p[j0] != 0);
        do {
            std::size_t j1 = static_cast<std::size_t>(way[j0]);
            p[j0] = p[j1];
            j0 = j1;
        } while (j0 != 0);
    }

    double total = 0.0;
    for (std::size_t j = 1; j <= n; ++j) {
        std::size_t i = static_cast<std::size_t>(p[j]);
        if (i >= 1 && i <= rows && j <= cols) {
            row_to_col[i - 1] = static_cast<int>(j - 1);
            total += weight[i - 1][j - 1];
        }
    }
    return total;
}

MatchedPairSet match_from_similarity(const std::vector<std::vector<double>>& sim, double tau) {
    std::size_t rows = sim.size();
    std::size_t cols = rows == 0 ? 0 : sim[0].size();

    std::vector<std::vector<double>> weight(rows, std::vector<double>(cols, 0.0));
    for (std::size_t i = 0; i < rows; ++i) {
        if (sim[i].size() != cols) throw ValidationError("similarity matrix is ragged");
        for (std::size_t j = 0; j < cols; ++j) {
            if (!std::isfinite(sim[i][j])) {
                throw ValidationError("similarity matrix has a non-finite entry");
            }
            if (sim[i][j] > tau) weight[i][j] = sim[i][j];
        }
    }

    std::vector<int> row_to_col;
    hungarian_max(weight, row_to_col);

    MatchedPairSet out;
    std::vector<char> truth_taken(cols, 0);
    for (std::size_t i = 0; i < rows; ++i) {
        int j = row_to_col[i];
        if (j >= 0 && sim[i][static_cast<std::size_t>(j)] > tau) {
            out.pairs.push_back(
                MatchedPair{i, static_cast<std::size_t>(j), sim[i][static_cast<std::size_t>(j)]});
            truth_taken[static_cast<std::size_t>(j)] = 1;
        } else {
            out.unmatched_model.push_back(i);
        }
    }
    for (std::size_t j = 0; j < cols; ++j) {
        if (!truth_taken[j]) out.unmatched_truth.push_back(j);
    }
    return out;
}

MatchedPairSet match_pcs(const LabelSet& model, const LabelSet& truth,
                         const sim::SimilarityEngine& engine, double tau) {
    if (model.req_id != truth.req_id) {
        throw ValidationError("match_pcs: label sets belong to different reqs ('" + model.req_id +
                              "' vs '" + truth.req_id + "')");
    }
    std::vector<std::vector<double>> sim(model.records.size(),
                                         std::vector<double>(truth.records.size(), 0.0));
    for (std::size_t i = 0; i < model.records.size(); ++i) {
        for (std::size_t j = 0; j < truth.records.size(); ++j) {
            sim[i][j] = engine.pc_similarity(model.records[i], truth.records[j]);
        }
    }
    return match_from_similarity(sim, tau);
}

}  // namespace reqcomp::metrics

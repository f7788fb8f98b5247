#pragma once

#include <cstddef>
#include <limits>
#include <stdexcept>
#include <vector>

#include "ppi/matrix.hpp"

namespace ppi {

// Agglomerative clustering with Ward linkage on squared Euclidean distances
// (Lance-Williams update). Ties merge the lowest-index pair, so the result is
// independent of input order permutations that preserve index order.
// Returns labels 1..k.
inline std::vector<int> ward_cluster(const Matrix& features, std::size_t k) {
    const std::size_t n = features.rows();
    if (k < 1 || k > n) throw std::invalid_argument("ward_cluster: bad cluster count");

    struct Cluster {
        bool alive = true;
        std::size_t size = 1;
        std::vector<std::size_t> members;
    };
    std::vector<Cluster> clusters(n);
    for (std::size_t i = 0; i < n; ++i) clusters[i].members = {i};

    // d2[i][j] holds the Ward merge cost between live clusters i and j.
    std::vector<std::vector<double>> d2(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            double s = 0.0;
            for (std::size_t f = 0; f < features.cols(); ++f) {
                const double d = features(i, f) - features(j, f);
                s += d * d;
            }
            // Ward cost for singletons is half the squared distance.
            d2[i][j] = d2[j][i] = s / 2.0;
        }

    std::size_t live = n;
    while (live > k) {
        std::size_t bi = 0, bj = 0;
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < n; ++i) {
            if (!clusters[i].alive) continue;
            for (std::size_t j = i + 1; j < n; ++j) {
                if (!clusters[j].alive) continue;
                if (d2[i][j] < best) {
                    best = d2[i][j];
                    bi = i;
                    bj = j;
                }
            }
        }
        const double ni = static_cast<double>(clusters[bi].size);
        const double nj = static_cast<double>(clusters[bj].size);
        for (std::size_t h = 0; h < n; ++h) {
            if (!clusters[h].alive || h == bi || h == bj) continue;
            const double nh = static_cast<double>(clusters[h].size);
            const double total = ni + nj + nh;
            d2[bi][h] = d2[h][bi] = ((ni + nh) * d2[bi][h] + (nj + nh) * d2[bj][h] -
                                     nh * d2[bi][bj]) /
                                    total;
        }
        clusters[bi].size += clusters[bj].size;
        clusters[bi].members.insert(clusters[bi].members.end(),
                                    clusters[bj].members.begin(),
                                    clusters[bj].members.end());
        clusters[bj].alive = false;
        --live;
    }

    std::vector<int> labels(n, 0);
    int next = 1;
    for (std::size_t i = 0; i < n; ++i) {
        if (!clusters[i].alive) continue;
        for (std::size_t m : clusters[i].members) labels[m] = next;
        ++next;
    }
    return labels;
}

// Total within-cluster variance (sum of squared distances to cluster means);
// the objective the k-cut is checked against.
inline double within_cluster_variance(const Matrix& features, const std::vector<int>& labels) {
    const std::size_t n = features.rows();
    int max_label = 0;
    for (int l : labels) max_label = std::max(max_label, l);
    double total = 0.0;
    for (int l = 1; l <= max_label; ++l) {
        std::vector<std::size_t> members;
        for (std::size_t i = 0; i < n; ++i)
            if (labels[i] == l) members.push_back(i);
        if (members.empty()) continue;
        for (std::size_t f = 0; f < features.cols(); ++f) {
            double m = 0.0;
            for (std::size_t i : members) m += features(i, f);
            m /= static_cast<double>(members.size());
            for (std::size_t i : members) {
                const double d = features(i, f) - m;
                total += d * d;
            }
        }
    }
    return total;
}

}  // namespace ppi

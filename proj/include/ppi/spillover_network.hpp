#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "ppi/csv.hpp"
#include "ppi/matrix.hpp"

namespace ppi {

// Directed weighted adjacency over N policy issues. Entry (i,j) is the
// spillover from issue i to issue j; the diagonal is zero and all weights are
// nonnegative.
class SpilloverNetwork {
public:
    SpilloverNetwork() = default;

    explicit SpilloverNetwork(Matrix weights, std::vector<std::string> node_ids = {})
        : weights_(std::move(weights)), node_ids_(std::move(node_ids)) {
        validate();
    }

    static SpilloverNetwork zero(std::size_t n) {
        return SpilloverNetwork(Matrix(n, n, 0.0));
    }

    std::size_t size() const { return weights_.rows(); }
    const Matrix& weights() const { return weights_; }
    double weight(std::size_t from, std::size_t to) const { return weights_(from, to); }
    const std::vector<std::string>& node_ids() const { return node_ids_; }

    std::size_t out_degree(std::size_t i) const {
        std::size_t k = 0;
        for (std::size_t j = 0; j < size(); ++j)
            if (weights_(i, j) > 0.0) ++k;
        return k;
    }

    std::vector<std::size_t> out_degrees() const {
        std::vector<std::size_t> k(size());
        for (std::size_t i = 0; i < size(); ++i) k[i] = out_degree(i);
        return k;
    }

    // Incoming strength sum_j A(j,i), the x-axis of the free-riding analysis.
    double in_strength(std::size_t i) const {
        double s = 0.0;
        for (std::size_t j = 0; j < size(); ++j) s += weights_(j, i);
        return s;
    }

    std::size_t edge_count() const {
        std::size_t m = 0;
        for (double w : weights_.data())
            if (w > 0.0) ++m;
        return m;
    }

    double mean_positive_weight() const {
        double sum = 0.0;
        std::size_t count = 0;
        for (double w : weights_.data())
            if (w > 0.0) {
                sum += w;
                ++count;
            }
        return count ? sum / static_cast<double>(count) : 0.0;
    }

    // CSV adjacency: header row/column of node ids, cell (i,j) = weight i->j.
    void save_csv(const std::string& path) const {
        csv::Writer w(path);
        std::vector<std::string> header{"id"};
        for (std::size_t j = 0; j < size(); ++j) header.push_back(id(j));
        w.row(header);
        for (std::size_t i = 0; i < size(); ++i) {
            std::vector<std::string> row{id(i)};
            for (std::size_t j = 0; j < size(); ++j) row.push_back(csv::fmt(weights_(i, j)));
            w.row(row);
        }
    }

    static SpilloverNetwork load_csv(const std::string& path) {
        const auto t = csv::read_file(path);
        const std::size_t n = t.rows.size();
        if (t.header.size() != n + 1)
            throw std::runtime_error("adjacency CSV " + path + " is not square");
        Matrix m(n, n);
        std::vector<std::string> ids;
        for (std::size_t i = 0; i < n; ++i) {
            const auto& row = t.rows[i];
            if (row.size() != n + 1)
                throw std::runtime_error("adjacency CSV " + path + ": ragged row");
            ids.push_back(row[0]);
            for (std::size_t j = 0; j < n; ++j)
                m(i, j) = csv::parse_double(row[j + 1], path);
        }
        return SpilloverNetwork(std::move(m), std::move(ids));
    }

private:
    std::string id(std::size_t i) const {
        return i < node_ids_.size() ? node_ids_[i] : "n" + std::to_string(i);
    }

    void validate() const {
        if (weights_.rows() != weights_.cols())
            throw std::invalid_argument("spillover network: matrix must be square");
        for (std::size_t i = 0; i < size(); ++i) {
            if (weights_(i, i) != 0.0)
                throw std::invalid_argument("spillover network: nonzero diagonal");
            for (std::size_t j = 0; j < size(); ++j)
                if (weights_(i, j) < 0.0)
                    throw std::invalid_argument("spillover network: negative weight");
        }
    }

    Matrix weights_;
    std::vector<std::string> node_ids_;
};

}  // namespace ppi

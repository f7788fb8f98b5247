#pragma once

#include <array>
#include <cstddef>
#include <limits>
#include <set>
#include <stdexcept>
#include <utility>
#include <vector>

#include "ppi/matrix.hpp"

namespace ppi {

// Planar graph produced by the TMFG filter. Edges are unordered pairs with the
// weight they carried in the input matrix.
struct UndirectedFilteredGraph {
    std::size_t n = 0;
    struct Edge {
        std::size_t a, b;  // a < b
        double weight;
    };
    std::vector<Edge> edges;
    // Triangular faces of the final triangulation; kept for diagnostics.
    std::vector<std::array<std::size_t, 3>> faces;

    bool has_edge(std::size_t a, std::size_t b) const {
        for (const auto& e : edges)
            if ((e.a == a && e.b == b) || (e.a == b && e.b == a)) return true;
        return false;
    }

    double total_weight() const {
        double s = 0.0;
        for (const auto& e : edges) s += e.weight;
        return s;
    }
};

// Triangulated maximally filtered graph. Seeds with the maximum-weight
// 4-clique, then repeatedly inserts the vertex/face pair with the largest
// gain, splitting the host face into three. For n >= 5 the result has exactly
// 3n - 8 edges; n = 4 returns the seed K4 (6 edges). Ties resolve to the
// lowest vertex, then the lowest face index, so the output is deterministic.
inline UndirectedFilteredGraph tmfg(const Matrix& weights) {
    const std::size_t n = weights.rows();
    if (n < 4 || weights.cols() != n)
        throw std::invalid_argument("tmfg: need a square matrix with n >= 4");
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            if (weights(i, j) != weights(j, i))
                throw std::invalid_argument("tmfg: matrix must be symmetric");
            if (weights(i, j) < 0.0)
                throw std::invalid_argument("tmfg: weights must be nonnegative");
        }

    UndirectedFilteredGraph g;
    g.n = n;

    // Seed: the 4-clique with the largest total weight.
    std::array<std::size_t, 4> seed{};
    double best_seed = -1.0;
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = a + 1; b < n; ++b)
            for (std::size_t c = b + 1; c < n; ++c)
                for (std::size_t d = c + 1; d < n; ++d) {
                    const double w = weights(a, b) + weights(a, c) + weights(a, d) +
                                     weights(b, c) + weights(b, d) + weights(c, d);
                    if (w > best_seed) {
                        best_seed = w;
                        seed = {a, b, c, d};
                    }
                }

    auto add_edge = [&](std::size_t a, std::size_t b) {
        if (a > b) std::swap(a, b);
        g.edges.push_back({a, b, weights(a, b)});
    };
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = i + 1; j < 4; ++j) add_edge(seed[i], seed[j]);

    // The four faces of the seed tetrahedron.
    g.faces = {{seed[0], seed[1], seed[2]},
               {seed[0], seed[1], seed[3]},
               {seed[0], seed[2], seed[3]},
               {seed[1], seed[2], seed[3]}};

    std::vector<bool> placed(n, false);
    for (std::size_t v : seed) placed[v] = true;

    for (std::size_t inserted = 4; inserted < n; ++inserted) {
        std::size_t best_v = n, best_f = 0;
        double best_gain = -std::numeric_limits<double>::infinity();
        for (std::size_t v = 0; v < n; ++v) {
            if (placed[v]) continue;
            for (std::size_t f = 0; f < g.faces.size(); ++f) {
                const auto& face = g.faces[f];
                const double gain =
                    weights(v, face[0]) + weights(v, face[1]) + weights(v, face[2]);
                if (gain > best_gain) {
                    best_gain = gain;
                    best_v = v;
                    best_f = f;
                }
            }
        }
        const auto face = g.faces[best_f];
        add_edge(best_v, face[0]);
        add_edge(best_v, face[1]);
        add_edge(best_v, face[2]);
        g.faces.erase(g.faces.begin() + static_cast<std::ptrdiff_t>(best_f));
        g.faces.push_back({best_v, face[0], face[1]});
        g.faces.push_back({best_v, face[0], face[2]});
        g.faces.push_back({best_v, face[1], face[2]});
        placed[best_v] = true;
    }
    return g;
}

}  // namespace ppi

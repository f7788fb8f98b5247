#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "ppi/matrix.hpp"
#include "ppi/stats.hpp"

namespace ppi {

// One country's indicator series, rows = indicators, columns = years.
struct CorrelationInput {
    Matrix series;
    bool differencing = true;
    double shrinkage = 0.2;  // lambda in [0,1], linear shrinkage toward identity
};

struct CorrelationResult {
    Matrix correlation;               // over kept indicators only
    std::vector<std::size_t> kept;    // original row indices
    std::vector<std::size_t> dropped; // constant rows, excluded with report
    Matrix processed;                 // differenced series for the kept rows
};

inline Matrix first_difference(const Matrix& series) {
    Matrix out(series.rows(), series.cols() - 1);
    for (std::size_t i = 0; i < series.rows(); ++i)
        for (std::size_t t = 0; t + 1 < series.cols(); ++t)
            out(i, t) = series(i, t + 1) - series(i, t);
    return out;
}

// Pearson correlations of the (optionally first-differenced) series, then
// linear shrinkage toward the identity: (1-lambda) R + lambda Id. The 11-year
// panels are too short for proper partial correlations.
inline CorrelationResult correlation_matrix(const CorrelationInput& input) {
    if (input.shrinkage < 0.0 || input.shrinkage > 1.0)
        throw std::invalid_argument("correlation_matrix: shrinkage outside [0,1]");
    const std::size_t usable_years =
        input.differencing ? input.series.cols() - 1 : input.series.cols();
    if (input.series.cols() < (input.differencing ? 4u : 3u))
        throw std::invalid_argument("correlation_matrix: too few years");
    (void)usable_years;

    const Matrix processed =
        input.differencing ? first_difference(input.series) : input.series;

    CorrelationResult out;
    for (std::size_t i = 0; i < processed.rows(); ++i) {
        const auto row = processed.row(i);
        if (stats::variance(row) > 0.0)
            out.kept.push_back(i);
        else
            out.dropped.push_back(i);
    }

    const std::size_t k = out.kept.size();
    out.processed = Matrix(k, processed.cols());
    for (std::size_t a = 0; a < k; ++a)
        for (std::size_t t = 0; t < processed.cols(); ++t)
            out.processed(a, t) = processed(out.kept[a], t);

    out.correlation = Matrix(k, k);
    const double lambda = input.shrinkage;
    for (std::size_t a = 0; a < k; ++a) {
        out.correlation(a, a) = 1.0;
        const auto xa = out.processed.row(a);
        for (std::size_t b = a + 1; b < k; ++b) {
            const double r = stats::pearson(xa, out.processed.row(b));
            const double shrunk = (1.0 - lambda) * r;
            out.correlation(a, b) = shrunk;
            out.correlation(b, a) = shrunk;
        }
    }
    return out;
}

}  // namespace ppi

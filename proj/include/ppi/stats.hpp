#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <stdexcept>
#include <vector>

namespace ppi::stats {

inline double mean(std::span<const double> x) {
    if (x.empty()) throw std::invalid_argument("mean: empty input");
    return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

inline double variance(std::span<const double> x) {
    const double m = mean(x);
    double s = 0.0;
    for (double v : x) s += (v - m) * (v - m);
    return s / static_cast<double>(x.size());
}

inline double pearson(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2)
        throw std::invalid_argument("pearson: need two equal-length series");
    const double mx = mean(x), my = mean(y);
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = x[i] - mx, dy = y[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0.0 || syy == 0.0)
        throw std::invalid_argument("pearson: constant series");
    return sxy / std::sqrt(sxx * syy);
}

// Fractional ranks starting at 1, ties get the average rank.
inline std::vector<double> ranks(std::span<const double> x) {
    const std::size_t n = x.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
    std::vector<double> r(n);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && x[order[j + 1]] == x[order[i]]) ++j;
        const double avg = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
        for (std::size_t k = i; k <= j; ++k) r[order[k]] = avg;
        i = j + 1;
    }
    return r;
}

inline double spearman(std::span<const double> x, std::span<const double> y) {
    const auto rx = ranks(x);
    const auto ry = ranks(y);
    return pearson(rx, ry);
}

// Sample skewness (biased, moment-based); used only to break orientation ties.
inline double skewness(std::span<const double> x) {
    const double m = mean(x);
    double s2 = 0.0, s3 = 0.0;
    for (double v : x) {
        const double d = v - m;
        s2 += d * d;
        s3 += d * d * d;
    }
    const double n = static_cast<double>(x.size());
    s2 /= n;
    s3 /= n;
    if (s2 == 0.0) return 0.0;
    return s3 / std::pow(s2, 1.5);
}

// Linear-interpolation percentile on sorted order statistics, p in [0,100].
inline double percentile(std::vector<double> x, double p) {
    if (x.empty()) throw std::invalid_argument("percentile: empty input");
    std::sort(x.begin(), x.end());
    const double h = (p / 100.0) * static_cast<double>(x.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, x.size() - 1);
    const double frac = h - static_cast<double>(lo);
    return x[lo] + frac * (x[hi] - x[lo]);
}

// Regularized incomplete beta via the Lentz continued fraction.
inline double incomplete_beta(double a, double b, double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double ln_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                            a * std::log(x) + b * std::log1p(-x);
    const bool swap = x > (a + 1.0) / (a + b + 2.0);
    if (swap) return 1.0 - incomplete_beta(b, a, 1.0 - x);

    const double tiny = 1e-300;
    double c = 1.0, d = 1.0 - (a + b) * x / (a + 1.0);
    if (std::fabs(d) < tiny) d = tiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= 300; ++m) {
        const double dm = static_cast<double>(m);
        double num = dm * (b - dm) * x / ((a + 2.0 * dm - 1.0) * (a + 2.0 * dm));
        d = 1.0 + num * d;
        if (std::fabs(d) < tiny) d = tiny;
        c = 1.0 + num / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        h *= d * c;
        num = -(a + dm) * (a + b + dm) * x / ((a + 2.0 * dm) * (a + 2.0 * dm + 1.0));
        d = 1.0 + num * d;
        if (std::fabs(d) < tiny) d = tiny;
        c = 1.0 + num / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < 1e-14) break;
    }
    return std::exp(ln_front) * h / a;
}

// Two-sided p-value of Student's t with df degrees of freedom.
inline double t_test_pvalue(double t, double df) {
    const double x = df / (df + t * t);
    return incomplete_beta(df / 2.0, 0.5, x);
}

struct CorrelationTest {
    double rho = 0.0;
    double p_value = 1.0;
};

// Spearman correlation with a two-sided p-value: exact permutation null for
// small samples (the t-approximation degenerates there, reporting near-zero
// p for |rho| = 1 on as few as 3 points), t-approximation otherwise.
inline CorrelationTest spearman_test(std::span<const double> x, std::span<const double> y) {
    CorrelationTest out;
    out.rho = spearman(x, y);
    const std::size_t n = x.size();
    if (n < 3) return out;
    if (n <= 8) {
        std::vector<double> xs(x.begin(), x.end());
        std::vector<double> perm(y.begin(), y.end());
        std::sort(perm.begin(), perm.end());
        std::size_t total = 0, extreme = 0;
        const double threshold = std::fabs(out.rho) - 1e-12;
        do {
            ++total;
            if (std::fabs(spearman(xs, perm)) >= threshold) ++extreme;
        } while (std::next_permutation(perm.begin(), perm.end()));
        out.p_value = static_cast<double>(extreme) / static_cast<double>(total);
        return out;
    }
    const double dn = static_cast<double>(n);
    const double r2 = std::min(out.rho * out.rho, 1.0 - 1e-12);
    const double t = out.rho * std::sqrt((dn - 2.0) / (1.0 - r2));
    out.p_value = t_test_pvalue(t, dn - 2.0);
    return out;
}

}  // namespace ppi::stats

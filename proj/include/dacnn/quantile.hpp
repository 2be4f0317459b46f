#pragma once

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "dacnn/evaluate.hpp"

namespace dacnn {

using QPoint = std::pair<double, double>;  // (q, confidence)

// tau * max(x, 0) + (1 - tau) * max(-x, 0)
double pinball_loss(double residual, double tau);

struct QuantileFit {
    double tau = 0.5;
    double q_lo = 0.0;
    double q_hi = 0.0;
    bool closed_hi = false;  // last interval includes its upper endpoint
    double beta0 = 0.0;
    double beta1 = 0.0;
    double pinball_total = 0.0;
    int n_points = 0;
};

// Minimizes sum of pinball_loss(y_i - beta0 - beta1*q_i). Small inputs are
// solved exactly by enumerating lines through point pairs (an optimal line
// passes through two data points); large inputs use IRLS with a smoothing
// parameter driven down to 1e-8, then exact coordinate-wise quantile steps.
// The contract is on the objective value, not on the coefficients.
QuantileFit fit_quantile_line(std::span<const QPoint> points, double tau);

struct IntervalFitResult {
    double q_lo = 0.0;
    double q_hi = 0.0;
    std::optional<QuantileFit> fit;  // absent for a sparse interval
};

std::vector<double> default_breakpoints();  // 0, 0.5, ..., 4.0

// One fit per [b_i, b_{i+1}) with the last interval closed. Intervals with
// fewer than 10 records or fewer than 2 distinct q are marked sparse.
std::vector<IntervalFitResult> fit_interval_models(
    std::span<const EvalRecord> records, double tau = 0.5,
    const std::vector<double>& breakpoints = default_breakpoints(),
    Population population = Population::AllRecords);

struct BinMedianTable {
    struct Bin {
        double q_center = 0.0;
        double median = 0.0;
        int count = 0;
    };
    std::vector<Bin> bins;  // empty bins omitted
};

// Equal-width bins over [0, 4]; even-count medians are the mean of the two
// central order statistics.
BinMedianTable empirical_bin_medians(std::span<const EvalRecord> records,
                                     double bin_width = 0.25,
                                     Population population = Population::AllRecords);

// Max over in-interval bin centers of |bin median - fitted line|. Needs at
// least 2 bins inside the fit's interval.
double adequacy_check(const QuantileFit& fit, const BinMedianTable& table);

void write_fits_csv(std::span<const IntervalFitResult> fits, const std::string& path);
void write_bins_csv(const BinMedianTable& table, const std::string& path);

}  // namespace dacnn

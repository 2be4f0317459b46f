#include "dacnn/quantile.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>

namespace dacnn {

double pinball_loss(double residual, double tau) {
    if (!(tau > 0.0 && tau < 1.0))
        throw TauOutOfRange("tau = " + std::to_string(tau) + " outside (0, 1)");
    return tau * std::max(residual, 0.0) + (1.0 - tau) * std::max(-residual, 0.0);
}

namespace {

double objective(std::span<const QPoint> pts, double tau, double b0, double b1) {
    double total = 0.0;
    for (const auto& [q, y] : pts) total += pinball_loss(y - b0 - b1 * q, tau);
    return total;
}

// Minimizer of sum w_i * pinball(s_i - m): smallest s where the cumulative
// weight reaches tau * W.
double weighted_tau_quantile(std::vector<std::pair<double, double>>& sw, double tau) {
    std::sort(sw.begin(), sw.end());
    double total = 0.0;
    for (const auto& [s, w] : sw) total += w;
    const double target = tau * total;
    double cum = 0.0;
    for (const auto& [s, w] : sw) {
        cum += w;
        if (cum >= target) return s;
    }
    return sw.back().first;
}

QuantileFit exact_pair_fit(std::span<const QPoint> pts, double tau) {
    QuantileFit best;
    best.tau = tau;
    best.n_points = static_cast<int>(pts.size());
    best.pinball_total = std::numeric_limits<double>::infinity();
    const std::size_t n = pts.size();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double dq = pts[j].first - pts[i].first;
            if (dq == 0.0) continue;
            const double b1 = (pts[j].second - pts[i].second) / dq;
            const double b0 = pts[i].second - b1 * pts[i].first;
            const double obj = objective(pts, tau, b0, b1);
            if (obj < best.pinball_total) {
                best.beta0 = b0;
                best.beta1 = b1;
                best.pinball_total = obj;
            }
        }
    }
    return best;
}

QuantileFit irls_fit(std::span<const QPoint> pts, double tau) {
    const std::size_t n = pts.size();
    // Unweighted least squares start.
    double sq = 0, sy = 0, sqq = 0, sqy = 0;
    for (const auto& [q, y] : pts) {
        sq += q;
        sy += y;
        sqq += q * q;
        sqy += q * y;
    }
    const double nn = static_cast<double>(n);
    double det = nn * sqq - sq * sq;
    double b0 = (sy * sqq - sq * sqy) / det;
    double b1 = (nn * sqy - sq * sy) / det;

    for (double eps = 1e-2; eps >= 1e-8; eps *= 0.1) {
        for (int it = 0; it < 25; ++it) {
            double w0 = 0, w1 = 0, w2 = 0, wy0 = 0, wy1 = 0;
            for (const auto& [q, y] : pts) {
                const double r = y - b0 - b1 * q;
                const double w =
                    (r > 0.0 ? tau : 1.0 - tau) / std::sqrt(r * r + eps * eps);
                w0 += w;
                w1 += w * q;
                w2 += w * q * q;
                wy0 += w * y;
                wy1 += w * q * y;
            }
            det = w0 * w2 - w1 * w1;
            if (std::abs(det) < 1e-300) break;
            const double nb0 = (wy0 * w2 - w1 * wy1) / det;
            const double nb1 = (w0 * wy1 - w1 * wy0) / det;
            if (std::abs(nb0 - b0) + std::abs(nb1 - b1) < 1e-12) {
                b0 = nb0;
                b1 = nb1;
                break;
            }
            b0 = nb0;
            b1 = nb1;
        }
    }

    // Exact coordinate-wise quantile polish.
    double obj = objective(pts, tau, b0, b1);
    std::vector<std::pair<double, double>> sw;
    for (int round = 0; round < 100; ++round) {
        sw.clear();
        for (const auto& [q, y] : pts) sw.emplace_back(y - b1 * q, 1.0);
        const double nb0 = weighted_tau_quantile(sw, tau);

        sw.clear();
        for (const auto& [q, y] : pts)
            if (q > 0.0) sw.emplace_back((y - nb0) / q, q);
        double nb1 = b1;
        if (!sw.empty()) nb1 = weighted_tau_quantile(sw, tau);

        const double nobj = objective(pts, tau, nb0, nb1);
        if (nobj < obj - 1e-14 * (1.0 + obj)) {
            b0 = nb0;
            b1 = nb1;
            obj = nobj;
        } else {
            break;
        }
    }

    QuantileFit fit;
    fit.tau = tau;
    fit.beta0 = b0;
    fit.beta1 = b1;
    fit.pinball_total = obj;
    fit.n_points = static_cast<int>(n);
    return fit;
}

constexpr std::size_t kExactFitLimit = 400;

}  // namespace

QuantileFit fit_quantile_line(std::span<const QPoint> points, double tau) {
    if (!(tau > 0.0 && tau < 1.0))
        throw TauOutOfRange("tau = " + std::to_string(tau) + " outside (0, 1)");
    if (points.size() < 2) throw TooFewPoints("need at least 2 points");
    const double q0 = points.front().first;
    const bool degenerate =
        std::all_of(points.begin(), points.end(),
                    [&](const QPoint& p) { return p.first == q0; });
    if (degenerate) throw DegenerateDesign("all points share one q value");

    if (points.size() <= kExactFitLimit) return exact_pair_fit(points, tau);
    return irls_fit(points, tau);
}

std::vector<double> default_breakpoints() {
    return {0.0, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 3.5, 4.0};
}

std::vector<IntervalFitResult> fit_interval_models(std::span<const EvalRecord> records,
                                                   double tau,
                                                   const std::vector<double>& breakpoints,
                                                   Population population) {
    if (breakpoints.size() < 2) throw ConfigError("need at least 2 breakpoints");

    std::vector<IntervalFitResult> out;
    for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
        const double lo = breakpoints[i], hi = breakpoints[i + 1];
        const bool last = i + 2 == breakpoints.size();

        std::vector<QPoint> pts;
        for (const auto& r : records) {
            if (population == Population::CorrectOnly && !r.correct()) continue;
            if (r.q >= lo && (r.q < hi || (last && r.q == hi)))
                pts.emplace_back(r.q, r.confidence);
        }

        IntervalFitResult res;
        res.q_lo = lo;
        res.q_hi = hi;
        std::size_t distinct = 0;
        {
            std::vector<double> qs;
            for (const auto& p : pts) qs.push_back(p.first);
            std::sort(qs.begin(), qs.end());
            distinct = std::unique(qs.begin(), qs.end()) - qs.begin();
        }
        if (pts.size() >= 10 && distinct >= 2) {
            QuantileFit fit = fit_quantile_line(pts, tau);
            fit.q_lo = lo;
            fit.q_hi = hi;
            fit.closed_hi = last;
            res.fit = fit;
        }
        out.push_back(std::move(res));
    }
    return out;
}

BinMedianTable empirical_bin_medians(std::span<const EvalRecord> records, double bin_width,
                                     Population population) {
    if (!(bin_width > 0.0)) throw ConfigError("bin_width must be > 0");
    const double lo = 0.0, hi = 4.0;
    const int nbins = std::max(1, static_cast<int>(std::lround((hi - lo) / bin_width)));

    std::vector<std::vector<double>> buckets(nbins);
    for (const auto& r : records) {
        if (population == Population::CorrectOnly && !r.correct()) continue;
        int b = static_cast<int>((r.q - lo) / bin_width);
        b = std::clamp(b, 0, nbins - 1);
        buckets[b].push_back(r.confidence);
    }

    BinMedianTable table;
    for (int b = 0; b < nbins; ++b) {
        auto& v = buckets[b];
        if (v.empty()) continue;
        std::sort(v.begin(), v.end());
        const std::size_t m = v.size();
        const double median =
            m % 2 == 1 ? v[m / 2] : 0.5 * (v[m / 2 - 1] + v[m / 2]);
        table.bins.push_back(
            BinMedianTable::Bin{lo + (b + 0.5) * bin_width, median, static_cast<int>(m)});
    }
    return table;
}

double adequacy_check(const QuantileFit& fit, const BinMedianTable& table) {
    double dev = 0.0;
    int inside = 0;
    for (const auto& bin : table.bins) {
        const bool in = bin.q_center >= fit.q_lo &&
                        (bin.q_center < fit.q_hi || (fit.closed_hi && bin.q_center == fit.q_hi));
        if (!in) continue;
        ++inside;
        dev = std::max(dev, std::abs(bin.median - (fit.beta0 + fit.beta1 * bin.q_center)));
    }
    if (inside < 2)
        throw NoBinsInInterval("only " + std::to_string(inside) + " bins inside [" +
                               std::to_string(fit.q_lo) + ", " + std::to_string(fit.q_hi) +
                               ")");
    return dev;
}

void write_fits_csv(std::span<const IntervalFitResult> fits, const std::string& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("cannot open " + path + " for writing");
    out << "interval_lo,interval_hi,tau,beta0,beta1,pinball_total,n_points\n";
    char buf[192];
    for (const auto& f : fits) {
        if (f.fit) {
            std::snprintf(buf, sizeof(buf), "%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%d\n", f.q_lo,
                          f.q_hi, f.fit->tau, f.fit->beta0, f.fit->beta1,
                          f.fit->pinball_total, f.fit->n_points);
        } else {
            std::snprintf(buf, sizeof(buf), "%.9g,%.9g,,,,,sparse\n", f.q_lo, f.q_hi);
        }
        out << buf;
    }
}

void write_bins_csv(const BinMedianTable& table, const std::string& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("cannot open " + path + " for writing");
    out << "q_center,median,count\n";
    char buf[96];
    for (const auto& b : table.bins) {
        std::snprintf(buf, sizeof(buf), "%.9g,%.9g,%d\n", b.q_center, b.median, b.count);
        out << buf;
    }
}

}  // namespace dacnn

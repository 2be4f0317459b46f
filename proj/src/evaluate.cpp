#include "dacnn/evaluate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>

namespace dacnn {

std::vector<EvalRecord> evaluate_model(TrainedModel& tm, const AugmentedDataset& test) {
    std::vector<EvalRecord> records;
    records.reserve(test.samples.size());
    std::vector<double> input;
    for (const DistortedSample& s : test.samples) {
        input.assign(s.pixels.begin(), s.pixels.end());
        const std::vector<double> z = tm.model.forward(input);
        const std::vector<double> p = softmax(z);
        const int pred = static_cast<int>(std::max_element(p.begin(), p.end()) - p.begin());
        // Score at the parameters' own (float32) precision. The logits of a
        // well-trained network saturate at the ReLU6 ceiling, so confidences
        // pile up at one value; keeping double dust beyond float32 resolution
        // would break those ties arbitrarily, and the error-free threshold is
        // a strict comparison against exactly such a value.
        records.push_back(EvalRecord{s.q, s.label, pred, to_float32(p[pred])});
    }
    return records;
}

double accuracy(std::span<const EvalRecord> records) {
    if (records.empty()) throw EmptyRecords("accuracy over zero records");
    std::size_t correct = 0;
    for (const auto& r : records) correct += r.correct() ? 1 : 0;
    return 100.0 * static_cast<double>(correct) / static_cast<double>(records.size());
}

double error_free_threshold(std::span<const EvalRecord> records) {
    if (records.empty()) throw EmptyRecords("threshold over zero records");
    double t = 0.0;
    for (const auto& r : records)
        if (!r.correct()) t = std::max(t, r.confidence);
    return t;
}

double error_free_rate(std::span<const EvalRecord> records, RateDenominator denom) {
    const double t = error_free_threshold(records);
    std::size_t above = 0, correct = 0;
    for (const auto& r : records) {
        if (!r.correct()) continue;
        ++correct;
        if (r.confidence > t) ++above;
    }
    const std::size_t n =
        denom == RateDenominator::AllRecords ? records.size() : correct;
    if (n == 0) return 0.0;
    return 100.0 * static_cast<double>(above) / static_cast<double>(n);
}

namespace {

// Average ranks (1-based); ties share the mean of their rank range.
std::vector<double> average_ranks(const std::vector<double>& values) {
    const std::size_t n = values.size();
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::sort(idx.begin(), idx.end(),
              [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });

    std::vector<double> ranks(n);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && values[idx[j + 1]] == values[idx[i]]) ++j;
        const double r = 0.5 * static_cast<double>(i + j) + 1.0;
        for (std::size_t k = i; k <= j; ++k) ranks[idx[k]] = r;
        i = j + 1;
    }
    return ranks;
}

double pearson(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (sxx == 0.0 || syy == 0.0)
        throw DegenerateVariance("a rank vector has zero variance");
    return sxy / std::sqrt(sxx * syy);
}

}  // namespace

double spearman(std::span<const EvalRecord> records, Population population) {
    std::vector<double> qs, confs;
    for (const auto& r : records) {
        if (population == Population::CorrectOnly && !r.correct()) continue;
        qs.push_back(r.q);
        confs.push_back(r.confidence);
    }
    if (qs.size() < 2) throw EmptyRecords("spearman needs at least 2 records");
    return pearson(average_ranks(qs), average_ranks(confs));
}

MetricsReport compute_metrics(std::span<const EvalRecord> records, RateDenominator denom,
                              Population population) {
    MetricsReport r;
    r.quality_percent = accuracy(records);
    r.error_free_threshold = error_free_threshold(records);
    r.error_free_rate_percent = error_free_rate(records, denom);
    r.spearman_rho = spearman(records, population);
    r.sample_count = records.size();
    return r;
}

void export_correlation_field(std::span<const EvalRecord> records, const std::string& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("cannot open " + path + " for writing");
    out << "q,confidence,correct\n";
    char buf[96];
    for (const auto& r : records) {
        std::snprintf(buf, sizeof(buf), "%.9g,%.9g,%d\n", r.q, r.confidence,
                      r.correct() ? 1 : 0);
        out << buf;
    }
    if (!out) throw IoError("short write to " + path);
}

std::vector<EvalRecord> read_correlation_field(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    std::string line;
    if (!std::getline(in, line) || line != "q,confidence,correct")
        throw IoError("missing q,confidence,correct header in " + path);

    std::vector<EvalRecord> records;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        double q, conf;
        int correct;
        if (std::sscanf(line.c_str(), "%lf,%lf,%d", &q, &conf, &correct) != 3)
            throw IoError("malformed CSV at " + path + ":" + std::to_string(lineno));
        records.push_back(EvalRecord{q, 0, correct ? 0 : 1, conf});
    }
    return records;
}

std::string format_metrics(const MetricsReport& r) {
    std::ostringstream os;
    char buf[256];
    std::snprintf(buf, sizeof(buf),
                  "quality_percent=%.9g\nerror_free_threshold=%.9g\n"
                  "error_free_rate_percent=%.9g\nspearman_rho=%.9g\nsample_count=%zu\n",
                  r.quality_percent, r.error_free_threshold, r.error_free_rate_percent,
                  r.spearman_rho, r.sample_count);
    os << buf;
    return os.str();
}

void write_metrics_text(const MetricsReport& r, const std::string& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("cannot open " + path + " for writing");
    out << format_metrics(r);
}

void write_metrics_csv(const MetricsReport& r, const std::string& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("cannot open " + path + " for writing");
    out << "quality_percent,error_free_threshold,error_free_rate_percent,spearman_rho,"
           "sample_count\n";
    char buf[192];
    std::snprintf(buf, sizeof(buf), "%.9g,%.9g,%.9g,%.9g,%zu\n", r.quality_percent,
                  r.error_free_threshold, r.error_free_rate_percent, r.spearman_rho,
                  r.sample_count);
    out << buf;
}

}  // namespace dacnn

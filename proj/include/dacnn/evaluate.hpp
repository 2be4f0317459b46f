#pragma once

#include <span>
#include <string>
#include <vector>

#include "dacnn/augment.hpp"
#include "dacnn/trainer.hpp"

namespace dacnn {

struct EvalRecord {
    double q = 0.0;
    int true_label = 0;
    int predicted = 0;
    double confidence = 0.0;  // argmax softmax component of the raw logits

    bool correct() const { return predicted == true_label; }
};

struct MetricsReport {
    double quality_percent = 0.0;
    double error_free_threshold = 0.0;
    double error_free_rate_percent = 0.0;
    double spearman_rho = 0.0;
    std::size_t sample_count = 0;
};

// Denominator of the error-free rate; AllRecords matches the reported
// Table-style numbers, CorrectOnly is the alternative reading.
enum class RateDenominator { AllRecords, CorrectOnly };

// Which records feed rank/regression statistics.
enum class Population { AllRecords, CorrectOnly };

// One record per test sample, in dataset order. Confidence always comes from
// the raw logits; the head plays no part here.
std::vector<EvalRecord> evaluate_model(TrainedModel& model, const AugmentedDataset& test);

double accuracy(std::span<const EvalRecord> records);

// Max confidence among incorrect records; 0 when every record is correct.
double error_free_threshold(std::span<const EvalRecord> records);

// Percent of correct records with confidence strictly above the threshold.
double error_free_rate(std::span<const EvalRecord> records,
                       RateDenominator denom = RateDenominator::AllRecords);

// Spearman rank correlation of (q, confidence) with average-rank ties.
double spearman(std::span<const EvalRecord> records,
                Population population = Population::AllRecords);

MetricsReport compute_metrics(std::span<const EvalRecord> records,
                              RateDenominator denom = RateDenominator::AllRecords,
                              Population population = Population::AllRecords);

// CSV with header q,confidence,correct; values printed with 9 significant
// digits, correct as 0/1.
void export_correlation_field(std::span<const EvalRecord> records, const std::string& path);
std::vector<EvalRecord> read_correlation_field(const std::string& path);

void write_metrics_text(const MetricsReport& r, const std::string& path);
void write_metrics_csv(const MetricsReport& r, const std::string& path);
std::string format_metrics(const MetricsReport& r);

}  // namespace dacnn

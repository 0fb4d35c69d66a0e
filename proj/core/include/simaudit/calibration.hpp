#pragma once

// Mean-calibration audit: bias residuals and one-sample effect sizes against
// baselines, intersectional cells against a scalar baseline, the severity
// suppression ratio, cultural calibration of the Asian-White differential,
// and symptom-level endorsement gaps under severity matching.

#include <optional>
#include <string>
#include <vector>

#include "simaudit/ingest.hpp"

namespace simaudit {

struct BiasRow {
    Dimension dimension = Dimension::Race;
    std::string group;
    std::optional<std::string> model;
    std::size_t n = 0;
    std::optional<double> model_mean;
    std::optional<double> model_sd;
    std::optional<double> gt_mean;
    std::optional<double> residual;  // model_mean - gt_mean
    std::optional<double> d;         // residual / model_sd
    std::optional<double> p;         // one-sample t against gt_mean
    bool used_intersection_baseline = false;
    std::string flag;  // "", "baseline_unavailable", "insufficient_n"
};

std::vector<BiasRow> bias_residuals(const Dataset& dataset, const BaselineTable& baselines,
                                    const std::vector<Dimension>& dimensions,
                                    InstrumentId instrument, bool by_model = false);

struct IntersectionalRow {
    std::string cell;  // "Trans Woman + Low"
    std::size_t n = 0;
    std::optional<double> mean;
    std::optional<double> sd;
    std::optional<double> residual;
    std::optional<double> d;
    std::optional<double> p;
    std::string flag;  // "thin_cell" below the floor
};

// Cells are the cross product of the given marginal dimensions' levels,
// compared against a single scalar baseline.
std::vector<IntersectionalRow> intersectional_bias(const Dataset& dataset, double baseline_scalar,
                                                   const std::vector<Dimension>& dimensions,
                                                   InstrumentId instrument, int min_cell_n);

// Share of the documented elevation above the population baseline that the
// model group mean reproduces, in percent.
double suppression_captured(double model_group_mean, double population_baseline,
                            double gt_group_mean);

struct SuppressionRow {
    std::string model;
    std::size_t n = 0;
    double model_mean = 0.0;
    double population_baseline = 0.0;
    double gt_group_mean = 0.0;
    double residual = 0.0;      // model_mean - gt_group_mean
    double pct_captured = 0.0;  // suppression_captured formula
};

// Per-model suppression for one demographic group (typically Trans Woman).
std::vector<SuppressionRow> suppression_by_model(const Dataset& dataset, Dimension dim,
                                                 const std::string& group,
                                                 double population_baseline, double gt_group_mean,
                                                 InstrumentId instrument);

struct ParadoxRow {
    std::string model;
    double observed_delta = 0.0;  // mean(Asian) - mean(White)
    double gt_delta = 0.0;
    double error = 0.0;  // |observed - gt|
    std::size_t n_asian = 0;
    std::size_t n_white = 0;
};

std::vector<ParadoxRow> paradox_calibration(const Dataset& dataset, double gt_delta,
                                            InstrumentId instrument);

enum class SeverityMatching { None, TotalScoreStratified };

struct SymptomRateRow {
    std::string label;
    InstrumentId instrument = InstrumentId::PHQ8;
    int item_index = 1;  // 1-based
    std::optional<std::string> model;
    std::string group_a;
    std::string group_b;
    std::size_t n_a = 0;  // records contributing (shared strata only when matched)
    std::size_t n_b = 0;
    double rate_a = 0.0;  // endorsement: item >= 2
    double rate_b = 0.0;
    double diff = 0.0;  // rate_a - rate_b
    bool matched = false;
    std::size_t shared_strata = 0;
    std::optional<double> p;  // two-proportion z test
    std::string flag;
};

// Endorsement-rate comparison for one item between two record selections.
// Stratified matching computes rates within shared total-score strata and
// combines them with pooled stratum counts as weights; strata can be widened
// by +/- band points. Throws InfeasibleError when no stratum is shared.
SymptomRateRow symptom_rates(const Dataset& dataset, InstrumentId instrument, int item_index,
                             const RecordFilter& group_a, const std::string& label_a,
                             const RecordFilter& group_b, const std::string& label_b,
                             SeverityMatching matching, int band = 0);

}  // namespace simaudit

#pragma once

// Variance-compression audit: the SD ratio (stereotype index) per demographic
// group, per model, and per framing condition, tested against baseline SDs.

#include <optional>
#include <string>
#include <vector>

#include "simaudit/ingest.hpp"

namespace simaudit {

struct RigidityRow {
    Dimension dimension = Dimension::Race;
    std::string group;
    std::optional<std::string> model;
    std::optional<Condition> condition;
    std::size_t n = 0;
    std::optional<double> model_sd;
    std::optional<double> gt_sd;
    std::optional<double> si;               // model_sd / gt_sd
    std::optional<double> compression_pct;  // (1 - si) * 100
    std::optional<double> p_value;          // variance test against gt_sd
    bool used_intersection_baseline = false;
    std::string flag;  // "", "baseline_unavailable", "insufficient_n", "low_n"
};

struct RigidityOptions {
    InstrumentId instrument = InstrumentId::PHQ8;
    std::vector<Dimension> dimensions = {Dimension::Race, Dimension::Gender, Dimension::SES,
                                         Dimension::Relationship};
    bool by_model = false;                // one row per (group, model) instead of pooled
    std::optional<Condition> condition;   // restrict to one framing condition
    int low_n_warning = 30;
};

// SD ratio; 1.0 means faithful variance. Inputs must be positive.
double stereotype_index(double model_sd, double gt_sd);

// Row computation from an extracted total-score sample. Exposed separately so
// the SI pipeline's scale/translation properties can be exercised directly.
RigidityRow rigidity_row_from_sample(Dimension dim, const std::string& group,
                                     const std::vector<double>& totals,
                                     const BaselineRow* baseline, int low_n_warning);

std::vector<RigidityRow> rigidity_table(const Dataset& dataset, const BaselineTable& baselines,
                                        const RigidityOptions& options);

struct ModelSiSummary {
    std::string model;
    double mean_si = 0.0;          // unweighted mean over category rows
    double compression_pct = 0.0;  // (1 - mean_si) * 100
    std::size_t categories = 0;    // rows contributing
};

std::vector<ModelSiSummary> per_model_si(const Dataset& dataset, const BaselineTable& baselines,
                                         const RigidityOptions& options);

struct ContextSiRow {
    Dimension dimension = Dimension::Race;
    std::string group;
    std::optional<double> si_clinical;
    std::optional<double> si_personal;
    std::optional<double> pct_change;  // (personal - clinical) / clinical * 100
    std::string flag;
};

std::vector<ContextSiRow> context_si_delta(const Dataset& dataset, const BaselineTable& baselines,
                                           const RigidityOptions& options);

}  // namespace simaudit

#pragma once

// Threshold-stability and stochastic-fracture audit: transition matrices,
// categorical flip rates (binary and five-level), systematic drift, and
// demographic instability tests on cross-run score deltas.

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "simaudit/ingest.hpp"
#include "simaudit/statkit.hpp"

namespace simaudit {

using PairIndex = std::vector<std::pair<std::size_t, std::size_t>>;

// ============================================================================
// TRANSITIONS AND FLIP RATES
// ============================================================================

struct TransitionMatrix {
    // counts[run1 category][run2 category]
    std::array<std::array<long long, 5>, 5> counts{};
    long long total_pairs = 0;

    long long trace() const;
    long long row_sum(std::size_t run1_category) const;
};

// Five-category PHQ-8 transition counts. Every pair must be PHQ8.
TransitionMatrix transition_matrix(const Dataset& dataset, const PairIndex& pairs);

struct FlipStats {
    double rate = 0.0;
    long long crossings = 0;
};

FlipStats flip_rate(const TransitionMatrix& matrix);

// Fraction of pairs whose screening decision differs between runs
// (gender-aware for AUDIT-C). All pairs must match spec's instrument.
double binary_flip_rate(const Dataset& dataset, const PairIndex& pairs, const InstrumentSpec& spec);

// ============================================================================
// DRIFT
// ============================================================================

struct DriftStats {
    std::size_t n = 0;
    double mean_diff = 0.0;  // run1 - run2
    double t = 0.0;
    double p = 1.0;
    double mean_abs_dev = 0.0;
    double r = 0.0;  // Pearson across pairs
};

DriftStats drift(const Dataset& dataset, const PairIndex& pairs);

// ============================================================================
// WITHIN-RUN STABILITY
// ============================================================================

struct WithinRunStats {
    double rate = 0.0;
    long long crossings = 0;
    long long pair_count = 0;
    long long ignored_records = 0;  // final unpaired iteration per odd cell
};

// Pairs iterations disjointly ((1,2), (3,4), ...) within each
// (cohort, model) cell of one condition and counts binary threshold flips.
WithinRunStats within_run_flip_rate(const Dataset& dataset, Condition condition,
                                    const InstrumentSpec& spec);

// ============================================================================
// STOCHASTIC FRACTURE
// ============================================================================

struct FractureContrast {
    std::string group_a;
    std::string group_b;
    double z = 0.0;
    double p_raw = 1.0;
    double p_adj = 1.0;  // BH within this dimension's contrast set
    double cliffs_delta = 0.0;
    bool degenerate = false;
};

struct FractureResult {
    Dimension dimension = Dimension::Race;
    stats::TestResult kw;
    std::vector<FractureContrast> contrasts;
    std::vector<std::string> group_order;
    std::string flag;  // "degenerate_groups" when levels had to be dropped
};

// Kruskal-Wallis on |run1 - run2| grouped by the dimension's levels, with
// Dunn post-hoc contrasts and Cliff's delta effect sizes.
FractureResult fracture_test(const Dataset& dataset, const PairIndex& pairs, Dimension dimension);

// ============================================================================
// SUMMARY
// ============================================================================

struct InstrumentStability {
    InstrumentId instrument = InstrumentId::PHQ8;
    std::size_t pairs = 0;
    double r = 0.0;
    double mean_abs_dev = 0.0;
    double flip_rate_binary = 0.0;
    std::optional<double> flip_rate_5cat;      // PHQ8 only
    std::optional<long long> crossings_5cat;   // PHQ8 only
    double drift_mean = 0.0;
    double drift_t = 0.0;
    double drift_p = 1.0;
};

struct ModelStability {
    std::string model;
    std::size_t pairs = 0;  // PHQ8 pairs
    double flip_rate_binary = 0.0;
    double flip_rate_5cat = 0.0;
    double drift_mean = 0.0;
    double mean_total = 0.0;  // across both runs
};

struct WithinRunRow {
    Condition condition = Condition::Clinical;
    InstrumentId instrument = InstrumentId::PHQ8;
    WithinRunStats stats;
};

struct StabilityReport {
    std::size_t matched_pairs = 0;
    std::size_t unmatched_clinical = 0;
    std::size_t unmatched_personal = 0;
    double continuous_r = 0.0;   // pooled over all pairs
    double mean_abs_dev = 0.0;   // pooled
    double drift_mean = 0.0;
    double drift_t = 0.0;
    double drift_p = 1.0;
    double flip_rate_binary = 0.0;  // pooled, per-instrument thresholds
    // "Any threshold": PHQ8 pairs count five-category crossings, the other
    // instruments their binary crossing; both per-instrument and pooled rates
    // are reported because the aggregations answer different questions.
    double flip_rate_any = 0.0;
    long long crossings_any = 0;
    std::optional<TransitionMatrix> phq8_transitions;
    std::vector<InstrumentStability> per_instrument;
    std::vector<ModelStability> per_model_phq8;
    std::vector<WithinRunRow> within_run;
};

StabilityReport stability_report(const Dataset& dataset, const MatchedPairs& matches,
                                 int pcl5_cut = 8);

}  // namespace simaudit

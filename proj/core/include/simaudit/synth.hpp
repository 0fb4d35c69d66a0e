#pragma once

// Seeded synthetic-cohort generator with planted distributional truth.
//
// Item scores are drawn through a Gaussian copula: correlated standard-normal
// item latents (one-factor copulas realize a shared person-severity factor),
// scaled by a calibrated latent spread and shifted so the expected total hits
// the cohort's target mean, then discretized through fixed thresholds onto
// each item's ordinal scale. Discretization attenuates variance nonlinearly,
// so the latent spread is calibrated (against a fixed-seed reference run)
// until the realized total-score SD equals variance_factor times the SD a
// variance_factor of 1.0 produces. That makes variance_factor directly
// interpretable as the planted SD ratio.

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "simaudit/domain.hpp"
#include "simaudit/ingest.hpp"
#include "simaudit/statkit.hpp"

namespace simaudit {

// ============================================================================
// COPULAS
// ============================================================================

struct Copula {
    std::string id;       // parseable descriptor, e.g. "equicorrelated:0.35"
    stats::Matrix corr;   // symmetric PSD, unit diagonal
};

Copula identity_copula(int dim);
Copula equicorrelated_copula(int dim, double rho);
// Equicorrelated base with `pair_count` disjoint off-diagonal entry pairs
// (0,1), (2,3), ... shifted by +delta.
Copula perturbed_copula(int dim, double rho, int pair_count, double delta);
// Parses "identity" | "equicorrelated:RHO" | "perturbed:RHO:PAIRS:DELTA".
Copula parse_copula(const std::string& text, int dim);

// ============================================================================
// SPEC
// ============================================================================

struct CohortParams {
    double target_mean = 0.0;
    double variance_factor = 1.0;  // planted SD ratio
    double bias_offset = 0.0;      // added to target_mean before generation
    Copula copula;
    bool gateway_compliant = true;
    std::optional<double> crossing_probability;  // PHQ8 threshold-pair mode
};

struct SynthSpec {
    std::uint64_t rng_seed = 0;
    int iterations = 30;
    std::vector<std::string> models = {"model-a"};
    std::vector<Condition> conditions = {Condition::Clinical, Condition::Personal};
    std::vector<InstrumentId> instruments = {InstrumentId::PHQ8};
    std::vector<DemographicProfile> profiles;
    // Keyed by (profile, instrument); every combination must be present.
    std::map<std::pair<DemographicProfile, InstrumentId>, CohortParams> params;

    const CohortParams& cohort_params(const DemographicProfile& p, InstrumentId id) const;
    void validate() const;  // throws ValidationError on infeasible specs
};

// Spec file: flat key = value lines plus [defaults] / [cohort] blocks.
// [cohort] blocks select profiles by any subset of race/gender/ses/
// relationship and override the defaults for matching profiles.
SynthSpec parse_synth_spec(std::istream& in);

// ============================================================================
// GENERATION
// ============================================================================

Dataset generate(const SynthSpec& spec);

// ============================================================================
// PLANTED TRUTH
// ============================================================================

struct PlantedCohort {
    DemographicProfile profile;
    InstrumentId instrument = InstrumentId::PHQ8;
    double target_mean = 0.0;
    double bias_offset = 0.0;
    double planted_si = 1.0;
    bool gateway_compliant = true;
    std::string copula_id;
};

struct PlantedCopulaDistance {
    InstrumentId instrument = InstrumentId::PHQ8;
    std::string copula_a;
    std::string copula_b;
    double frobenius = 0.0;  // exact, on the latent correlation matrices
};

struct PlantedTruth {
    std::vector<PlantedCohort> cohorts;
    std::vector<PlantedCopulaDistance> copula_distances;
    // Engaged (with value 0) only when every PHQ8 cohort is gateway-compliant.
    std::optional<std::size_t> expected_gateway_violations;
};

PlantedTruth planted_truth(const SynthSpec& spec);

std::string planted_truth_json(const PlantedTruth& truth);

}  // namespace simaudit

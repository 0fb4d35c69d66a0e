#pragma once

// Shared test fixtures: a baseline table mirroring the population survey
// values the audits are calibrated against, and a factorial synthetic cohort.

#include <string>

#include "simaudit/ingest.hpp"
#include "simaudit/synth.hpp"

namespace fixtures {

// dimension,group,instrument,gt_mean,gt_sd,source
inline const char* kBaselinesCsv =
    "dimension,group,instrument,gt_mean,gt_sd,source\n"
    "Race,White,PHQ8,3.19,4.19,survey\n"
    "Race,Black,PHQ8,3.21,4.35,survey\n"
    "Race,Hispanic,PHQ8,3.15,4.20,survey\n"
    "Race,Asian,PHQ8,2.23,3.07,survey\n"
    "Gender,Cis Man,PHQ8,3.00,4.30,survey\n"
    "Gender,Cis Woman,PHQ8,3.70,5.10,survey\n"
    "Gender,Trans Man,PHQ8,10.80,,survey\n"
    "Gender,Trans Woman,PHQ8,15.56,5.70,survey\n"
    "SES,High,PHQ8,3.40,4.70,survey\n"
    "SES,Middle,PHQ8,4.10,5.50,survey\n"
    "SES,Low,PHQ8,5.50,5.90,survey\n";

inline simaudit::BaselineTable baseline_table() {
    std::istringstream in(kBaselinesCsv);
    return simaudit::BaselineTable(simaudit::parse_baselines(in));
}

// Factorial cohort over the first `profile_count` canonical profiles:
// profiles x models x {clinical, personal} x iterations, PHQ8 + GAD7.
inline simaudit::SynthSpec factorial_spec(int profile_count, int iterations, std::uint64_t seed,
                                          std::vector<std::string> models = {"model-a",
                                                                             "model-b"}) {
    using namespace simaudit;
    SynthSpec spec;
    spec.rng_seed = seed;
    spec.iterations = iterations;
    spec.models = std::move(models);
    spec.conditions = {Condition::Clinical, Condition::Personal};
    spec.instruments = {InstrumentId::PHQ8, InstrumentId::GAD7};
    const auto profiles = all_profiles();
    spec.profiles.assign(profiles.begin(), profiles.begin() + profile_count);
    for (const auto& p : spec.profiles) {
        CohortParams phq;
        phq.target_mean = 8.0;
        phq.copula = equicorrelated_copula(8, 0.35);
        spec.params[{p, InstrumentId::PHQ8}] = phq;
        CohortParams gad;
        gad.target_mean = 7.5;
        gad.copula = equicorrelated_copula(7, 0.35);
        spec.params[{p, InstrumentId::GAD7}] = gad;
    }
    return spec;
}

}  // namespace fixtures

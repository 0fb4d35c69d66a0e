#include <doctest.h>

#include "simaudit/logic.hpp"
#include "simaudit/synth.hpp"

using namespace simaudit;

namespace {

PatientRecord phq8_record(const std::string& id, std::vector<int> items) {
    PatientRecord r;
    r.record_id = id;
    r.model = "m";
    r.condition = Condition::Clinical;
    r.iteration = 1;
    r.profile = all_profiles()[0];
    r.instrument = InstrumentId::PHQ8;
    r.items = std::move(items);
    r.total = score_instrument(r.items, instrument_spec(InstrumentId::PHQ8));
    return r;
}

}  // namespace

TEST_SUITE_BEGIN("logic");

TEST_CASE("gateway rule: violation and non-violation anchors") {
    std::vector<PatientRecord> records;
    // total 10, item1 = 0, item2 = 1 -> violation
    records.push_back(phq8_record("viol", {0, 1, 3, 3, 3, 0, 0, 0}));
    // total 10, item1 = 2 -> gateway satisfied
    records.push_back(phq8_record("ok-gate", {2, 0, 3, 3, 2, 0, 0, 0}));
    // total 9, items all <= 1 -> below the severity gate
    records.push_back(phq8_record("ok-low", {1, 1, 1, 1, 1, 1, 1, 2}));
    const auto ds = Dataset::from_records(std::move(records), {});
    const auto result = gateway_violations(ds);
    CHECK(result.audited == 3);
    CHECK(result.count == 1);
    REQUIRE(result.violations.size() == 1);
    CHECK(result.violations[0].record_id == "viol");
    CHECK(result.violations[0].total == 10);
    CHECK(result.violations[0].item1 == 0);
    CHECK(result.violations[0].item2 == 1);
    CHECK(result.rate == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("gateway rule: boundary case at item scores of exactly 2") {
    std::vector<PatientRecord> records;
    records.push_back(phq8_record("item2-gate", {1, 2, 3, 2, 2, 0, 0, 0}));  // total 10, item2 = 2
    const auto ds = Dataset::from_records(std::move(records), {});
    CHECK(gateway_violations(ds).count == 0);
}

TEST_CASE("gateway rule: non-PHQ8 records are not audited") {
    std::vector<PatientRecord> records;
    PatientRecord r;
    r.record_id = "gad";
    r.model = "m";
    r.condition = Condition::Clinical;
    r.iteration = 1;
    r.profile = all_profiles()[0];
    r.instrument = InstrumentId::GAD7;
    r.items = {0, 0, 3, 3, 3, 3, 3};  // would violate if it were PHQ8
    r.total = score_instrument(r.items, instrument_spec(InstrumentId::GAD7));
    records.push_back(std::move(r));
    const auto ds = Dataset::from_records(std::move(records), {});
    const auto result = gateway_violations(ds);
    CHECK(result.audited == 0);
    CHECK(result.count == 0);
    CHECK(result.rate == doctest::Approx(0.0));
}

TEST_CASE("adding compliant records never increases the violation count") {
    std::vector<PatientRecord> base;
    base.push_back(phq8_record("viol", {0, 1, 3, 3, 3, 0, 0, 0}));
    const auto before = gateway_violations(Dataset::from_records(base, {})).count;

    base.push_back(phq8_record("more1", {2, 2, 2, 2, 2, 0, 0, 0}));
    base.push_back(phq8_record("more2", {0, 0, 1, 1, 0, 0, 0, 0}));
    const auto after = gateway_violations(Dataset::from_records(base, {})).count;
    CHECK(after == before);
}

TEST_CASE("gateway-compliant synthetic cohorts audit clean across seeds") {
    for (std::uint64_t seed : {11ull, 22ull, 33ull}) {
        SynthSpec spec;
        spec.rng_seed = seed;
        spec.iterations = 400;
        spec.models = {"m"};
        spec.conditions = {Condition::Clinical, Condition::Personal};
        spec.instruments = {InstrumentId::PHQ8};
        spec.profiles = {all_profiles()[0], all_profiles()[50]};
        for (const auto& p : spec.profiles) {
            CohortParams params;
            params.target_mean = 13.0;
            params.copula = equicorrelated_copula(8, 0.35);
            params.gateway_compliant = true;
            spec.params[{p, InstrumentId::PHQ8}] = params;
        }
        const auto ds = generate(spec);
        const auto result = gateway_violations(ds);
        CHECK(result.audited == ds.records().size());
        CHECK(result.count == 0);
        CHECK(result.rate == doctest::Approx(0.0));
    }
}

TEST_SUITE_END();

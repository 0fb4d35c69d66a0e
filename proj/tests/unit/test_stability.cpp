#include <doctest.h>

#include <cmath>

#include "simaudit/errors.hpp"
#include "simaudit/rng.hpp"
#include "simaudit/stability.hpp"
#include "simaudit/synth.hpp"

using namespace simaudit;

namespace {

// Representative PHQ-8 totals per severity band.
constexpr int kBandTotal[5] = {2, 7, 12, 17, 22};

std::vector<int> phq8_items_for_total(int total) {
    std::vector<int> items(8, 0);
    int remaining = total;
    for (auto& item : items) {
        item = std::min(3, remaining);
        remaining -= item;
    }
    return items;
}

PatientRecord pair_record(const std::string& id, Condition cond, int iteration, int total,
                          const DemographicProfile& profile, const std::string& model = "m") {
    PatientRecord r;
    r.record_id = id;
    r.model = model;
    r.condition = cond;
    r.iteration = iteration;
    r.profile = profile;
    r.instrument = InstrumentId::PHQ8;
    r.items = phq8_items_for_total(total);
    r.total = score_instrument(r.items, instrument_spec(InstrumentId::PHQ8));
    return r;
}

// Builds a dataset of cross-run pairs whose (run1 band, run2 band) counts
// match the given 5x5 grid.
Dataset dataset_from_transition_counts(const long long (&counts)[5][5]) {
    std::vector<PatientRecord> records;
    const auto profiles = all_profiles();
    int iteration = 0;
    for (int i = 0; i < 5; ++i) {
        for (int j = 0; j < 5; ++j) {
            for (long long c = 0; c < counts[i][j]; ++c) {
                ++iteration;
                const auto& profile = profiles[iteration % profiles.size()];
                records.push_back(pair_record("c" + std::to_string(iteration),
                                              Condition::Clinical, iteration, kBandTotal[i],
                                              profile));
                records.push_back(pair_record("p" + std::to_string(iteration),
                                              Condition::Personal, iteration, kBandTotal[j],
                                              profile));
            }
        }
    }
    return Dataset::from_records(std::move(records), {});
}

// The reference 14,400-pair transition fixture.
constexpr long long kTransitionFixture[5][5] = {
    {1453, 484, 49, 2, 0},
    {963, 5102, 1222, 49, 0},
    {66, 1724, 1898, 279, 3},
    {4, 89, 332, 668, 3},
    {0, 1, 1, 8, 0},
};

}  // namespace

TEST_SUITE_BEGIN("stability");

TEST_CASE("transition_matrix: identical runs are diagonal") {
    long long counts[5][5] = {};
    counts[1][1] = 10;
    counts[3][3] = 4;
    const auto ds = dataset_from_transition_counts(counts);
    const auto matches = match_cross_run(ds);
    const auto m = transition_matrix(ds, matches.pairs);
    CHECK(m.total_pairs == 14);
    CHECK(m.trace() == 14);
    CHECK(flip_rate(m).rate == doctest::Approx(0.0));
}

TEST_CASE("transition_matrix: single (9, 10) pair lands in (Mild, Moderate)") {
    const auto profile = all_profiles()[0];
    std::vector<PatientRecord> records;
    records.push_back(pair_record("a", Condition::Clinical, 1, 9, profile));
    records.push_back(pair_record("b", Condition::Personal, 1, 10, profile));
    const auto ds = Dataset::from_records(std::move(records), {});
    const auto m = transition_matrix(ds, match_cross_run(ds).pairs);
    CHECK(m.counts[1][2] == 1);
    CHECK(m.total_pairs == 1);
}

TEST_CASE("transition_matrix: reference fixture counts, crossings, and rate") {
    const auto ds = dataset_from_transition_counts(kTransitionFixture);
    const auto matches = match_cross_run(ds);
    CHECK(matches.pairs.size() == 14400);

    const auto m = transition_matrix(ds, matches.pairs);
    CHECK(m.total_pairs == 14400);
    for (int i = 0; i < 5; ++i) {
        for (int j = 0; j < 5; ++j) CHECK(m.counts[i][j] == kTransitionFixture[i][j]);
    }
    const long long expected_rows[5] = {1988, 7336, 3970, 1096, 10};
    for (int i = 0; i < 5; ++i) CHECK(m.row_sum(i) == expected_rows[i]);

    const auto f = flip_rate(m);
    CHECK(f.crossings == 5279);
    CHECK(f.rate == doctest::Approx(0.366597).epsilon(1e-5));
    // Integer identity: rate * total = crossings exactly.
    CHECK(f.rate * static_cast<double>(m.total_pairs) == doctest::Approx(5279.0).epsilon(1e-9));
}

TEST_CASE("stability_report on the reference fixture reports the pooled crossings") {
    const auto ds = dataset_from_transition_counts(kTransitionFixture);
    const auto rep = stability_report(ds, match_cross_run(ds));
    CHECK(rep.matched_pairs == 14400);
    CHECK(rep.crossings_any == 5279);
    CHECK(rep.flip_rate_any * 100.0 == doctest::Approx(36.66).epsilon(1e-3));
    REQUIRE(rep.per_instrument.size() == 1);
    CHECK(rep.per_instrument[0].crossings_5cat.value() == 5279);
}

TEST_CASE("transition_matrix: rejects non-PHQ8 pairs") {
    const auto profile = all_profiles()[0];
    std::vector<PatientRecord> records;
    PatientRecord a;
    a.record_id = "a";
    a.model = "m";
    a.condition = Condition::Clinical;
    a.iteration = 1;
    a.profile = profile;
    a.instrument = InstrumentId::GAD7;
    a.items = {1, 1, 1, 1, 1, 1, 1};
    a.total = 7;
    PatientRecord b = a;
    b.record_id = "b";
    b.condition = Condition::Personal;
    records.push_back(a);
    records.push_back(b);
    const auto ds = Dataset::from_records(std::move(records), {});
    CHECK_THROWS_AS(transition_matrix(ds, match_cross_run(ds).pairs), ValidationError);
}

TEST_CASE("transition matrix is transposed when runs are swapped") {
    long long counts[5][5] = {};
    counts[0][1] = 3;
    counts[2][4] = 2;
    counts[1][1] = 5;
    const auto ds = dataset_from_transition_counts(counts);
    const auto matches = match_cross_run(ds);
    const auto m = transition_matrix(ds, matches.pairs);

    PairIndex swapped;
    for (const auto& [a, b] : matches.pairs) swapped.emplace_back(b, a);
    const auto mt = transition_matrix(ds, swapped);
    for (int i = 0; i < 5; ++i) {
        for (int j = 0; j < 5; ++j) CHECK(m.counts[i][j] == mt.counts[j][i]);
    }
}

TEST_CASE("binary_flip_rate: anchors") {
    // All pairs (9, 9): no flips. All pairs (9, 10): every pair flips.
    long long stay[5][5] = {};
    stay[1][1] = 20;
    const auto ds_stay = dataset_from_transition_counts(stay);
    // Band totals 7 vs 7 are both below 10; rate 0.
    CHECK(binary_flip_rate(ds_stay, match_cross_run(ds_stay).pairs,
                           instrument_spec(InstrumentId::PHQ8)) == doctest::Approx(0.0));

    long long cross[5][5] = {};
    cross[1][2] = 20;  // 7 -> 12 crosses the binary cut
    const auto ds_cross = dataset_from_transition_counts(cross);
    CHECK(binary_flip_rate(ds_cross, match_cross_run(ds_cross).pairs,
                           instrument_spec(InstrumentId::PHQ8)) == doctest::Approx(1.0));
}

TEST_CASE("binary_flip_rate: AUDIT-C cut depends on gender") {
    // Totals (3, 4): crosses the men's cut (>= 4) but sits entirely above
    // the women's cut (>= 3), so only the men's pairs flip.
    auto auditc_record = [](const std::string& id, Gender gender, Condition cond, int total) {
        PatientRecord r;
        r.record_id = id;
        r.model = "m";
        r.condition = cond;
        r.iteration = 1;
        r.profile = {Race::White, gender, Ses::High, Relationship::Partnered};
        r.instrument = InstrumentId::AUDITC;
        r.items = {std::min(4, total), std::max(0, std::min(4, total - 4)),
                   std::max(0, total - 8)};
        r.total = score_instrument(r.items, instrument_spec(InstrumentId::AUDITC));
        return r;
    };
    for (const auto& [gender, expected] : {std::pair{Gender::CisMan, 1.0},
                                           std::pair{Gender::TransMan, 1.0},
                                           std::pair{Gender::CisWoman, 0.0},
                                           std::pair{Gender::TransWoman, 0.0}}) {
        std::vector<PatientRecord> records;
        records.push_back(auditc_record("c", gender, Condition::Clinical, 3));
        records.push_back(auditc_record("p", gender, Condition::Personal, 4));
        const auto ds = Dataset::from_records(std::move(records), {});
        const double rate = binary_flip_rate(ds, match_cross_run(ds).pairs,
                                             instrument_spec(InstrumentId::AUDITC));
        CHECK(rate == doctest::Approx(expected));
    }
}

TEST_CASE("five-category flip rate is at least the binary flip rate") {
    Rng rng(12);
    std::vector<PatientRecord> records;
    const auto profile = all_profiles()[0];
    for (int i = 1; i <= 500; ++i) {
        const int t1 = static_cast<int>(rng.next_below(25));
        const int t2 = static_cast<int>(rng.next_below(25));
        records.push_back(pair_record("c" + std::to_string(i), Condition::Clinical, i, t1, profile));
        records.push_back(pair_record("p" + std::to_string(i), Condition::Personal, i, t2, profile));
    }
    const auto ds = Dataset::from_records(std::move(records), {});
    const auto pairs = match_cross_run(ds).pairs;
    const double five_cat = flip_rate(transition_matrix(ds, pairs)).rate;
    const double binary = binary_flip_rate(ds, pairs, instrument_spec(InstrumentId::PHQ8));
    CHECK(five_cat >= binary);
}

TEST_CASE("drift: identical runs") {
    long long counts[5][5] = {};
    counts[1][1] = 5;
    counts[2][2] = 10;
    counts[3][3] = 3;
    const auto ds = dataset_from_transition_counts(counts);
    const auto d = drift(ds, match_cross_run(ds).pairs);
    CHECK(d.mean_diff == doctest::Approx(0.0));
    CHECK(d.mean_abs_dev == doctest::Approx(0.0));
    CHECK(d.r == doctest::Approx(1.0));
}

TEST_CASE("drift: two-pair arithmetic") {
    const auto profile = all_profiles()[0];
    std::vector<PatientRecord> records;
    records.push_back(pair_record("a1", Condition::Clinical, 1, 1, profile));
    records.push_back(pair_record("a2", Condition::Personal, 1, 2, profile));
    records.push_back(pair_record("b1", Condition::Clinical, 2, 2, profile));
    records.push_back(pair_record("b2", Condition::Personal, 2, 1, profile));
    const auto ds = Dataset::from_records(std::move(records), {});
    const auto d = drift(ds, match_cross_run(ds).pairs);
    CHECK(d.mean_diff == doctest::Approx(0.0));
    CHECK(d.mean_abs_dev == doctest::Approx(1.0));
}

TEST_CASE("drift: planted +0.32 shift recovers t near 15.2 at n = 14400") {
    // run2 = run1 - 0.32 with noise of sd 2.52: t ~= 0.32 * sqrt(14400) / 2.52.
    Rng rng(88);
    std::vector<PatientRecord> records;
    const auto profiles = all_profiles();
    int id = 0;
    for (int i = 1; i <= 14400; ++i) {
        const auto& profile = profiles[i % profiles.size()];
        const double base = 8.0 + 3.0 * rng.next_normal();
        const double noisy = base - 0.32 + 2.52 * rng.next_normal();
        const int t1 = std::clamp(static_cast<int>(std::lround(base)), 0, 24);
        const int t2 = std::clamp(static_cast<int>(std::lround(noisy)), 0, 24);
        records.push_back(pair_record("c" + std::to_string(++id), Condition::Clinical, i, t1,
                                      profile));
        records.push_back(pair_record("p" + std::to_string(id), Condition::Personal, i, t2,
                                      profile));
    }
    const auto ds = Dataset::from_records(std::move(records), {});
    const auto d = drift(ds, match_cross_run(ds).pairs);
    CHECK(d.n == 14400);
    CHECK(d.t == doctest::Approx(15.2).epsilon(0.12));  // within +/- ~1.5
    CHECK(d.mean_diff > 0.0);
    CHECK(d.p < 1e-10);
}

TEST_CASE("drift r is invariant under a common shift of both runs") {
    Rng rng(5);
    std::vector<PatientRecord> a_records, b_records;
    const auto profile = all_profiles()[0];
    for (int i = 1; i <= 200; ++i) {
        const int t1 = static_cast<int>(rng.next_below(12));
        const int t2 = static_cast<int>(rng.next_below(12));
        a_records.push_back(pair_record("c" + std::to_string(i), Condition::Clinical, i, t1,
                                        profile));
        a_records.push_back(pair_record("p" + std::to_string(i), Condition::Personal, i, t2,
                                        profile));
        b_records.push_back(pair_record("c" + std::to_string(i), Condition::Clinical, i, t1 + 5,
                                        profile));
        b_records.push_back(pair_record("p" + std::to_string(i), Condition::Personal, i, t2 + 5,
                                        profile));
    }
    const auto da = Dataset::from_records(std::move(a_records), {});
    const auto db = Dataset::from_records(std::move(b_records), {});
    const double ra = drift(da, match_cross_run(da).pairs).r;
    const double rb = drift(db, match_cross_run(db).pairs).r;
    CHECK(ra == doctest::Approx(rb).epsilon(1e-12));
}

// ============================================================================
// within-run stability
// ============================================================================

namespace {

Dataset within_run_dataset(const std::vector<int>& totals_per_iteration, int cells = 1) {
    std::vector<PatientRecord> records;
    const auto profiles = all_profiles();
    int id = 0;
    for (int c = 0; c < cells; ++c) {
        for (std::size_t i = 0; i < totals_per_iteration.size(); ++i) {
            records.push_back(pair_record("r" + std::to_string(++id), Condition::Clinical,
                                          static_cast<int>(i + 1), totals_per_iteration[i],
                                          profiles[c]));
        }
    }
    return Dataset::from_records(std::move(records), {});
}

}  // namespace

TEST_CASE("within_run_flip_rate: identical iterations give rate 0") {
    const auto ds = within_run_dataset(std::vector<int>(30, 12), 4);
    const auto w = within_run_flip_rate(ds, Condition::Clinical, instrument_spec(InstrumentId::PHQ8));
    CHECK(w.pair_count == 4 * 15);
    CHECK(w.crossings == 0);
    CHECK(w.rate == doctest::Approx(0.0));
}

TEST_CASE("within_run_flip_rate: alternating 9/10 flips every disjoint pair") {
    std::vector<int> totals;
    for (int i = 0; i < 30; ++i) totals.push_back(i % 2 == 0 ? 9 : 10);
    const auto ds = within_run_dataset(totals);
    const auto w = within_run_flip_rate(ds, Condition::Clinical, instrument_spec(InstrumentId::PHQ8));
    CHECK(w.pair_count == 15);
    CHECK(w.rate == doctest::Approx(1.0));
}

TEST_CASE("within_run_flip_rate: odd iteration count drops the last with a warning count") {
    const auto ds = within_run_dataset(std::vector<int>(31, 12));
    const auto w = within_run_flip_rate(ds, Condition::Clinical, instrument_spec(InstrumentId::PHQ8));
    CHECK(w.pair_count == 15);
    CHECK(w.ignored_records == 1);
}

TEST_CASE("within_run_flip_rate: reference rate arithmetic") {
    CHECK(1870.0 / 7200.0 == doctest::Approx(0.2597).epsilon(1e-3));
}

// ============================================================================
// stochastic fracture
// ============================================================================

namespace {

// Cross-run pairs with per-group |delta| magnitudes controlled by a scale.
Dataset fracture_dataset(const std::vector<std::pair<Ses, double>>& level_scales, int n_per_level,
                         std::uint64_t seed) {
    Rng rng(seed);
    std::vector<PatientRecord> records;
    int id = 0;
    for (const auto& [ses, scale] : level_scales) {
        DemographicProfile profile{Race::White, Gender::CisMan, ses, Relationship::Partnered};
        for (int i = 1; i <= n_per_level; ++i) {
            const double base = 10.0 + 2.0 * rng.next_normal();
            const double delta = scale * rng.next_normal();
            const int t1 = std::clamp(static_cast<int>(std::lround(base)), 0, 24);
            const int t2 = std::clamp(static_cast<int>(std::lround(base + delta)), 0, 24);
            records.push_back(pair_record("c" + std::to_string(++id), Condition::Clinical, i, t1,
                                          profile));
            records.push_back(pair_record("p" + std::to_string(id), Condition::Personal, i, t2,
                                          profile));
        }
    }
    return Dataset::from_records(std::move(records), {});
}

}  // namespace

TEST_CASE("fracture_test: null data stays nonsignificant in most seeded trials") {
    int nonsignificant = 0;
    for (std::uint64_t t = 0; t < 100; ++t) {
        const auto ds = fracture_dataset(
            {{Ses::High, 1.5}, {Ses::Middle, 1.5}, {Ses::Low, 1.5}}, 60, 7000 + t);
        const auto f = fracture_test(ds, match_cross_run(ds).pairs, Dimension::SES);
        if (f.kw.p_value > 0.05) ++nonsignificant;
    }
    CHECK(nonsignificant >= 90);
}

TEST_CASE("fracture_test: planted 3x delta spread is detected") {
    const auto ds = fracture_dataset(
        {{Ses::High, 1.0}, {Ses::Middle, 1.0}, {Ses::Low, 3.0}}, 500, 99);
    const auto f = fracture_test(ds, match_cross_run(ds).pairs, Dimension::SES);
    CHECK(f.kw.p_value < 0.01);
    // The Low-SES contrasts carry the signal.
    bool low_significant = false;
    for (const auto& c : f.contrasts) {
        if ((c.group_a == "Low" || c.group_b == "Low") && c.p_adj < 0.05) low_significant = true;
    }
    CHECK(low_significant);
    CHECK(f.contrasts.size() == 3);  // 3 levels -> 3 pairwise contrasts
}

TEST_CASE("fracture_test: identical multisets give H = 0 and delta = 0") {
    // Both levels see the same deterministic |delta| pattern.
    std::vector<PatientRecord> records;
    int id = 0;
    for (Ses ses : {Ses::High, Ses::Low}) {
        DemographicProfile profile{Race::White, Gender::CisMan, ses, Relationship::Partnered};
        for (int i = 1; i <= 10; ++i) {
            const int t1 = 10;
            const int t2 = 10 + (i % 3);  // deltas 0,1,2 repeating
            records.push_back(pair_record("c" + std::to_string(++id), Condition::Clinical, i, t1,
                                          profile));
            records.push_back(pair_record("p" + std::to_string(id), Condition::Personal, i, t2,
                                          profile));
        }
    }
    const auto ds = Dataset::from_records(std::move(records), {});
    const auto f = fracture_test(ds, match_cross_run(ds).pairs, Dimension::SES);
    CHECK(f.kw.statistic == doctest::Approx(0.0).epsilon(1e-9));
    REQUIRE(f.contrasts.size() == 1);
    CHECK(f.contrasts[0].cliffs_delta == doctest::Approx(0.0));
}

// ============================================================================
// summary report
// ============================================================================

TEST_CASE("stability_report: factorial synthetic data produces a coherent summary") {
    SynthSpec spec;
    spec.rng_seed = 77;
    spec.iterations = 10;
    spec.models = {"a", "b"};
    spec.conditions = {Condition::Clinical, Condition::Personal};
    spec.instruments = {InstrumentId::PHQ8, InstrumentId::GAD7};
    const auto profiles = all_profiles();
    spec.profiles.assign(profiles.begin(), profiles.begin() + 6);
    for (const auto& p : spec.profiles) {
        CohortParams phq;
        phq.target_mean = 8.0;
        phq.copula = equicorrelated_copula(8, 0.35);
        spec.params[{p, InstrumentId::PHQ8}] = phq;
        CohortParams gad;
        gad.target_mean = 7.0;
        gad.copula = equicorrelated_copula(7, 0.35);
        spec.params[{p, InstrumentId::GAD7}] = gad;
    }
    const auto ds = generate(spec);
    const auto matches = match_cross_run(ds);
    const auto rep = stability_report(ds, matches);

    CHECK(rep.matched_pairs == 6 * 2 * 10 * 2);  // profiles x models x iterations x instruments
    CHECK(rep.per_instrument.size() == 2);
    CHECK(rep.per_model_phq8.size() == 2);
    REQUIRE(rep.phq8_transitions.has_value());
    CHECK(rep.phq8_transitions->total_pairs == 6 * 2 * 10);
    // Crossing identity: pooled any-boundary crossings = PHQ8 5-cat + GAD7 binary.
    long long expected = 0;
    for (const auto& inst : rep.per_instrument) {
        if (inst.instrument == InstrumentId::PHQ8) {
            expected += *inst.crossings_5cat;
        } else {
            expected += static_cast<long long>(
                std::llround(inst.flip_rate_binary * static_cast<double>(inst.pairs)));
        }
    }
    CHECK(rep.crossings_any == expected);
    CHECK(rep.within_run.size() == 4);  // 2 conditions x 2 instruments
}

TEST_SUITE_END();

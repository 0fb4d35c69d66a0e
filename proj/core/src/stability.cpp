#include "simaudit/stability.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "simaudit/errors.hpp"

namespace simaudit {

long long TransitionMatrix::trace() const {
    long long t = 0;
    for (std::size_t i = 0; i < 5; ++i) t += counts[i][i];
    return t;
}

long long TransitionMatrix::row_sum(std::size_t run1_category) const {
    long long s = 0;
    for (std::size_t j = 0; j < 5; ++j) s += counts[run1_category][j];
    return s;
}

TransitionMatrix transition_matrix(const Dataset& dataset, const PairIndex& pairs) {
    TransitionMatrix m;
    const auto& records = dataset.records();
    for (const auto& [a, b] : pairs) {
        const auto& r1 = records[a];
        const auto& r2 = records[b];
        if (r1.instrument != InstrumentId::PHQ8 || r2.instrument != InstrumentId::PHQ8) {
            throw ValidationError("transition_matrix: five-category classifier requires PHQ8 pairs");
        }
        const auto c1 = static_cast<std::size_t>(classify_phq8(r1.total));
        const auto c2 = static_cast<std::size_t>(classify_phq8(r2.total));
        ++m.counts[c1][c2];
        ++m.total_pairs;
    }
    return m;
}

FlipStats flip_rate(const TransitionMatrix& matrix) {
    if (matrix.total_pairs == 0) throw ValidationError("flip_rate: empty transition matrix");
    FlipStats f;
    f.crossings = matrix.total_pairs - matrix.trace();
    f.rate = static_cast<double>(f.crossings) / static_cast<double>(matrix.total_pairs);
    return f;
}

double binary_flip_rate(const Dataset& dataset, const PairIndex& pairs,
                        const InstrumentSpec& spec) {
    if (pairs.empty()) throw ValidationError("binary_flip_rate: no pairs");
    const auto& records = dataset.records();
    long long flips = 0;
    for (const auto& [a, b] : pairs) {
        const auto& r1 = records[a];
        const auto& r2 = records[b];
        if (r1.instrument != spec.id || r2.instrument != spec.id) {
            throw ValidationError("binary_flip_rate: pair instrument != " + to_label(spec.id));
        }
        const bool p1 = is_positive(r1.total, spec, r1.profile.gender);
        const bool p2 = is_positive(r2.total, spec, r2.profile.gender);
        if (p1 != p2) ++flips;
    }
    return static_cast<double>(flips) / static_cast<double>(pairs.size());
}

DriftStats drift(const Dataset& dataset, const PairIndex& pairs) {
    if (pairs.size() < 2) throw ValidationError("drift: >= 2 pairs required");
    const auto& records = dataset.records();
    stats::Sample run1{{}, "run1"}, run2{{}, "run2"};
    run1.values.reserve(pairs.size());
    run2.values.reserve(pairs.size());
    for (const auto& [a, b] : pairs) {
        run1.values.push_back(static_cast<double>(records[a].total));
        run2.values.push_back(static_cast<double>(records[b].total));
    }
    const auto paired = stats::paired_t(run1, run2);
    DriftStats d;
    d.n = pairs.size();
    d.mean_diff = paired.mean_diff;
    d.t = paired.test.statistic;
    d.p = paired.test.p_value;
    d.mean_abs_dev = paired.mean_abs_diff;
    d.r = stats::pearson_r(run1, run2).value;
    return d;
}

WithinRunStats within_run_flip_rate(const Dataset& dataset, Condition condition,
                                    const InstrumentSpec& spec) {
    // (cohort, model) cells; iterations sorted, then paired (1,2), (3,4), ...
    std::map<CohortKey, std::vector<std::pair<int, std::size_t>>> cells;
    const auto& records = dataset.records();
    for (std::size_t i = 0; i < records.size(); ++i) {
        const auto& r = records[i];
        if (r.instrument != spec.id || r.condition != condition) continue;
        cells[cohort_key(r)].emplace_back(r.iteration, i);
    }

    WithinRunStats out;
    for (auto& [key, members] : cells) {
        std::sort(members.begin(), members.end());
        const std::size_t usable = members.size() - (members.size() % 2);
        if (members.size() % 2 == 1) ++out.ignored_records;
        for (std::size_t k = 0; k + 2 <= usable; k += 2) {
            const auto& r1 = records[members[k].second];
            const auto& r2 = records[members[k + 1].second];
            const bool p1 = is_positive(r1.total, spec, r1.profile.gender);
            const bool p2 = is_positive(r2.total, spec, r2.profile.gender);
            ++out.pair_count;
            if (p1 != p2) ++out.crossings;
        }
    }
    if (out.pair_count == 0) {
        throw InfeasibleError("within_run_flip_rate: no cell has >= 2 iterations for " +
                              to_label(spec.id) + " / " + to_label(condition));
    }
    out.rate = static_cast<double>(out.crossings) / static_cast<double>(out.pair_count);
    return out;
}

FractureResult fracture_test(const Dataset& dataset, const PairIndex& pairs, Dimension dimension) {
    const auto& records = dataset.records();
    std::map<std::string, std::vector<double>> deltas_by_group;
    for (const auto& [a, b] : pairs) {
        const auto& group = group_label(records[a].profile, dimension);
        deltas_by_group[group].push_back(
            std::abs(static_cast<double>(records[a].total) - static_cast<double>(records[b].total)));
    }

    FractureResult out;
    out.dimension = dimension;

    std::vector<stats::Sample> groups;
    for (const auto& label : dimension_groups(dimension)) {
        const auto it = deltas_by_group.find(label);
        if (it == deltas_by_group.end()) continue;
        if (it->second.size() < 2) {
            out.flag = "degenerate_groups";
            continue;
        }
        groups.push_back({it->second, label});
        out.group_order.push_back(label);
    }
    if (groups.size() < 2) {
        throw InfeasibleError("fracture_test: fewer than two usable levels on " +
                              to_label(dimension));
    }

    out.kw = stats::kruskal_wallis(groups);

    const auto dunn = stats::dunn_posthoc(groups);
    std::vector<double> raw;
    raw.reserve(dunn.size());
    for (const auto& d : dunn) raw.push_back(d.test.p_value);
    // Adjusted within this dimension's contrast set; BH adjusted p <= alpha
    // reproduces the step-up rejection decision.
    const auto adj = stats::bh_fdr(raw, 0.05).adjusted;

    for (std::size_t k = 0; k < dunn.size(); ++k) {
        FractureContrast c;
        c.group_a = groups[dunn[k].group_a].label;
        c.group_b = groups[dunn[k].group_b].label;
        c.z = dunn[k].test.statistic;
        c.p_raw = dunn[k].test.p_value;
        c.p_adj = adj[k];
        c.degenerate = dunn[k].test.degenerate;
        c.cliffs_delta = stats::cliffs_delta(groups[dunn[k].group_a], groups[dunn[k].group_b]).value;
        out.contrasts.push_back(std::move(c));
    }
    return out;
}

namespace {

PairIndex filter_pairs(const Dataset& dataset, const PairIndex& pairs, InstrumentId id) {
    PairIndex out;
    for (const auto& pr : pairs) {
        if (dataset.records()[pr.first].instrument == id) out.push_back(pr);
    }
    return out;
}

long long count_binary_flips(const Dataset& dataset, const PairIndex& pairs,
                             const InstrumentSpec& spec) {
    const auto& records = dataset.records();
    long long flips = 0;
    for (const auto& [a, b] : pairs) {
        const bool p1 = is_positive(records[a].total, spec, records[a].profile.gender);
        const bool p2 = is_positive(records[b].total, spec, records[b].profile.gender);
        if (p1 != p2) ++flips;
    }
    return flips;
}

}  // namespace

StabilityReport stability_report(const Dataset& dataset, const MatchedPairs& matches,
                                 int pcl5_cut) {
    StabilityReport rep;
    rep.matched_pairs = matches.pairs.size();
    rep.unmatched_clinical = matches.unmatched_clinical;
    rep.unmatched_personal = matches.unmatched_personal;
    if (matches.pairs.size() < 2) {
        throw InfeasibleError("stability: fewer than two matched cross-run pairs");
    }

    const auto& records = dataset.records();
    const auto pooled = drift(dataset, matches.pairs);
    rep.continuous_r = pooled.r;
    rep.mean_abs_dev = pooled.mean_abs_dev;
    rep.drift_mean = pooled.mean_diff;
    rep.drift_t = pooled.t;
    rep.drift_p = pooled.p;

    long long binary_flips = 0;
    for (InstrumentId id : kAllInstruments) {
        const auto pairs = filter_pairs(dataset, matches.pairs, id);
        if (pairs.size() < 2) continue;
        const auto spec = instrument_spec_with_pcl5_cut(id, pcl5_cut);

        InstrumentStability row;
        row.instrument = id;
        row.pairs = pairs.size();
        const auto d = drift(dataset, pairs);
        row.r = d.r;
        row.mean_abs_dev = d.mean_abs_dev;
        row.drift_mean = d.mean_diff;
        row.drift_t = d.t;
        row.drift_p = d.p;
        const long long flips = count_binary_flips(dataset, pairs, spec);
        row.flip_rate_binary = static_cast<double>(flips) / static_cast<double>(pairs.size());
        binary_flips += flips;

        if (id == InstrumentId::PHQ8) {
            const auto matrix = transition_matrix(dataset, pairs);
            rep.phq8_transitions = matrix;
            const auto f = flip_rate(matrix);
            row.flip_rate_5cat = f.rate;
            row.crossings_5cat = f.crossings;
            rep.crossings_any += f.crossings;
        } else {
            rep.crossings_any += flips;
        }
        rep.per_instrument.push_back(std::move(row));
    }
    rep.flip_rate_any =
        static_cast<double>(rep.crossings_any) / static_cast<double>(rep.matched_pairs);
    rep.flip_rate_binary =
        static_cast<double>(binary_flips) / static_cast<double>(rep.matched_pairs);

    // Per-model PHQ-8 rows.
    const auto phq8_pairs = filter_pairs(dataset, matches.pairs, InstrumentId::PHQ8);
    std::set<std::string> models;
    for (const auto& pr : phq8_pairs) models.insert(records[pr.first].model);
    for (const auto& model : models) {
        PairIndex mine;
        for (const auto& pr : phq8_pairs) {
            if (records[pr.first].model == model) mine.push_back(pr);
        }
        if (mine.size() < 2) continue;
        ModelStability row;
        row.model = model;
        row.pairs = mine.size();
        row.flip_rate_binary =
            binary_flip_rate(dataset, mine, instrument_spec(InstrumentId::PHQ8));
        row.flip_rate_5cat = flip_rate(transition_matrix(dataset, mine)).rate;
        const auto d = drift(dataset, mine);
        row.drift_mean = d.mean_diff;
        double total_sum = 0.0;
        for (const auto& pr : mine) {
            total_sum += records[pr.first].total + records[pr.second].total;
        }
        row.mean_total = total_sum / (2.0 * static_cast<double>(mine.size()));
        rep.per_model_phq8.push_back(std::move(row));
    }

    // Within-run rows for every (condition, instrument) that supports them.
    for (Condition cond : kAllConditions) {
        for (InstrumentId id : kAllInstruments) {
            const auto spec = instrument_spec_with_pcl5_cut(id, pcl5_cut);
            try {
                WithinRunRow row;
                row.condition = cond;
                row.instrument = id;
                row.stats = within_run_flip_rate(dataset, cond, spec);
                rep.within_run.push_back(std::move(row));
            } catch (const InfeasibleError&) {
                // Condition or instrument absent; skip the row.
            }
        }
    }
    return rep;
}

}  // namespace simaudit

#include "simaudit/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <stdexcept>

#include "simaudit/errors.hpp"
#include "simaudit/statkit.hpp"

namespace simaudit {

namespace {

// One-sample two-sided t of values against a reference mean.
std::optional<double> one_sample_t_p(const std::vector<double>& values, double ref) {
    if (values.size() < 2) return std::nullopt;
    const double m = stats::mean_of(values);
    const double sd = stats::sd_of(values);
    if (sd <= 0.0) return (m == ref) ? std::optional<double>(1.0) : std::optional<double>(0.0);
    const double n = static_cast<double>(values.size());
    const double t = (m - ref) / (sd / std::sqrt(n));
    return stats::t_two_sided(t, n - 1.0);
}

BiasRow bias_row_from_totals(Dimension dim, const std::string& group,
                             const std::vector<double>& totals, const BaselineRow* baseline,
                             bool used_intersection) {
    BiasRow row;
    row.dimension = dim;
    row.group = group;
    row.n = totals.size();
    if (totals.size() < 2) {
        row.flag = "insufficient_n";
        return row;
    }
    row.model_mean = stats::mean_of(totals);
    row.model_sd = stats::sd_of(totals);
    if (!baseline) {
        row.flag = "baseline_unavailable";
        return row;
    }
    row.gt_mean = baseline->gt_mean;
    row.used_intersection_baseline = used_intersection;
    row.residual = *row.model_mean - *row.gt_mean;
    if (*row.model_sd > 0.0) {
        row.d = stats::cohens_d_one_sample(*row.model_mean, *row.model_sd, *row.gt_mean).value;
    }
    row.p = one_sample_t_p(totals, *row.gt_mean);
    return row;
}

}  // namespace

std::vector<BiasRow> bias_residuals(const Dataset& dataset, const BaselineTable& baselines,
                                    const std::vector<Dimension>& dimensions,
                                    InstrumentId instrument, bool by_model) {
    // (dimension, group, model) -> totals; model "" = pooled
    std::map<std::tuple<Dimension, std::string, std::string>, std::vector<double>> groups;
    for (const auto& rec : dataset.records()) {
        if (rec.instrument != instrument) continue;
        for (Dimension dim : dimensions) {
            const std::string& group = group_label(rec.profile, dim);
            const std::string model = by_model ? rec.model : std::string();
            groups[{dim, group, model}].push_back(static_cast<double>(rec.total));
        }
    }

    std::vector<BiasRow> rows;
    for (const auto& [key, totals] : groups) {
        const auto& [dim, group, model] = key;
        bool used_intersection = false;
        const BaselineRow* baseline = baselines.find(dim, group, instrument, &used_intersection);
        BiasRow row = bias_row_from_totals(dim, group, totals, baseline, used_intersection);
        if (!model.empty()) row.model = model;
        rows.push_back(std::move(row));
    }
    return rows;
}

std::vector<IntersectionalRow> intersectional_bias(const Dataset& dataset, double baseline_scalar,
                                                   const std::vector<Dimension>& dimensions,
                                                   InstrumentId instrument, int min_cell_n) {
    if (dimensions.empty()) throw ValidationError("intersectional_bias: no dimensions given");
    for (Dimension d : dimensions) {
        if (d == Dimension::Intersection) {
            throw ValidationError("intersectional_bias: dimensions must be marginal");
        }
    }

    std::map<std::string, std::vector<double>> cells;
    for (const auto& rec : dataset.records()) {
        if (rec.instrument != instrument) continue;
        std::string cell;
        for (Dimension dim : dimensions) {
            if (!cell.empty()) cell += " + ";
            cell += group_label(rec.profile, dim);
        }
        cells[cell].push_back(static_cast<double>(rec.total));
    }

    std::vector<IntersectionalRow> rows;
    for (const auto& [cell, totals] : cells) {
        IntersectionalRow row;
        row.cell = cell;
        row.n = totals.size();
        if (static_cast<int>(totals.size()) < min_cell_n) {
            row.flag = "thin_cell";
            rows.push_back(std::move(row));
            continue;
        }
        row.mean = stats::mean_of(totals);
        row.sd = stats::sd_of(totals);
        row.residual = *row.mean - baseline_scalar;
        if (*row.sd > 0.0) {
            row.d = stats::cohens_d_one_sample(*row.mean, *row.sd, baseline_scalar).value;
        }
        row.p = one_sample_t_p(totals, baseline_scalar);
        rows.push_back(std::move(row));
    }
    return rows;
}

double suppression_captured(double model_group_mean, double population_baseline,
                            double gt_group_mean) {
    if (gt_group_mean == population_baseline) {
        throw std::invalid_argument("suppression_captured: zero expected gap");
    }
    return 100.0 * (model_group_mean - population_baseline) /
           (gt_group_mean - population_baseline);
}

std::vector<SuppressionRow> suppression_by_model(const Dataset& dataset, Dimension dim,
                                                 const std::string& group,
                                                 double population_baseline, double gt_group_mean,
                                                 InstrumentId instrument) {
    std::map<std::string, std::vector<double>> by_model;
    for (const auto& rec : dataset.records()) {
        if (rec.instrument != instrument) continue;
        if (group_label(rec.profile, dim) != group) continue;
        by_model[rec.model].push_back(static_cast<double>(rec.total));
    }

    std::vector<SuppressionRow> rows;
    for (const auto& [model, totals] : by_model) {
        if (totals.empty()) continue;
        SuppressionRow row;
        row.model = model;
        row.n = totals.size();
        row.model_mean = stats::mean_of(totals);
        row.population_baseline = population_baseline;
        row.gt_group_mean = gt_group_mean;
        row.residual = row.model_mean - gt_group_mean;
        row.pct_captured = suppression_captured(row.model_mean, population_baseline, gt_group_mean);
        rows.push_back(std::move(row));
    }
    return rows;
}

std::vector<ParadoxRow> paradox_calibration(const Dataset& dataset, double gt_delta,
                                            InstrumentId instrument) {
    std::map<std::string, std::pair<std::vector<double>, std::vector<double>>> by_model;
    for (const auto& rec : dataset.records()) {
        if (rec.instrument != instrument) continue;
        if (rec.profile.race == Race::Asian) {
            by_model[rec.model].first.push_back(static_cast<double>(rec.total));
        } else if (rec.profile.race == Race::White) {
            by_model[rec.model].second.push_back(static_cast<double>(rec.total));
        }
    }
    if (by_model.empty()) {
        throw InfeasibleError("paradox_calibration: no Asian/White records for " +
                              to_label(instrument));
    }

    std::vector<ParadoxRow> rows;
    for (const auto& [model, pair_lists] : by_model) {
        const auto& [asian, white] = pair_lists;
        if (asian.empty() || white.empty()) {
            throw InfeasibleError("paradox_calibration: model \"" + model +
                                  "\" is missing the Asian or White group");
        }
        ParadoxRow row;
        row.model = model;
        row.n_asian = asian.size();
        row.n_white = white.size();
        row.observed_delta = stats::mean_of(asian) - stats::mean_of(white);
        row.gt_delta = gt_delta;
        row.error = std::abs(row.observed_delta - gt_delta);
        rows.push_back(std::move(row));
    }
    return rows;
}

SymptomRateRow symptom_rates(const Dataset& dataset, InstrumentId instrument, int item_index,
                             const RecordFilter& group_a, const std::string& label_a,
                             const RecordFilter& group_b, const std::string& label_b,
                             SeverityMatching matching, int band) {
    const auto& ispec = instrument_spec(instrument);
    if (item_index < 1 || item_index > ispec.item_count) {
        throw ValidationError("symptom_rates: item index " + std::to_string(item_index) +
                              " out of range for " + to_label(instrument));
    }
    if (band < 0) throw ValidationError("symptom_rates: band must be >= 0");

    // stratum id -> (endorsed, n); stratum 0 is the whole sample when unmatched
    const int stratum_width = 1 + 2 * band;
    auto collect = [&](const RecordFilter& filter) {
        std::map<int, std::pair<long long, long long>> strata;
        for (const auto& rec : dataset.records()) {
            if (rec.instrument != instrument) continue;
            if (!filter.matches(rec)) continue;
            const int stratum =
                (matching == SeverityMatching::TotalScoreStratified) ? rec.total / stratum_width : 0;
            auto& [endorsed, n] = strata[stratum];
            if (rec.items[item_index - 1] >= 2) ++endorsed;
            ++n;
        }
        return strata;
    };

    const auto strata_a = collect(group_a);
    const auto strata_b = collect(group_b);
    if (strata_a.empty() || strata_b.empty()) {
        throw InfeasibleError("symptom_rates: empty group (" +
                              std::string(strata_a.empty() ? label_a : label_b) + ")");
    }

    SymptomRateRow row;
    row.instrument = instrument;
    row.item_index = item_index;
    row.group_a = label_a;
    row.group_b = label_b;
    row.matched = (matching == SeverityMatching::TotalScoreStratified);

    double weighted_a = 0.0, weighted_b = 0.0, weight_sum = 0.0;
    long long endorsed_a = 0, total_a = 0, endorsed_b = 0, total_b = 0;
    for (const auto& [stratum, counts_a] : strata_a) {
        const auto it = strata_b.find(stratum);
        if (it == strata_b.end()) continue;
        const auto& counts_b = it->second;
        ++row.shared_strata;
        const double w = static_cast<double>(counts_a.second + counts_b.second);
        weighted_a += w * static_cast<double>(counts_a.first) / static_cast<double>(counts_a.second);
        weighted_b += w * static_cast<double>(counts_b.first) / static_cast<double>(counts_b.second);
        weight_sum += w;
        endorsed_a += counts_a.first;
        total_a += counts_a.second;
        endorsed_b += counts_b.first;
        total_b += counts_b.second;
    }
    if (row.shared_strata == 0) {
        throw InfeasibleError("symptom_rates: no shared total-score stratum between " + label_a +
                              " and " + label_b);
    }

    row.n_a = static_cast<std::size_t>(total_a);
    row.n_b = static_cast<std::size_t>(total_b);
    row.rate_a = weighted_a / weight_sum;
    row.rate_b = weighted_b / weight_sum;
    row.diff = row.rate_a - row.rate_b;

    // Two-proportion z on the (weighted) rates with the shared-strata counts.
    const double na = static_cast<double>(total_a);
    const double nb = static_cast<double>(total_b);
    const double pooled = (row.rate_a * na + row.rate_b * nb) / (na + nb);
    const double se2 = pooled * (1.0 - pooled) * (1.0 / na + 1.0 / nb);
    if (se2 > 0.0) {
        const double z = row.diff / std::sqrt(se2);
        row.p = std::min(1.0, 2.0 * stats::p_from_z(std::abs(z)));
    } else {
        row.p = (row.diff == 0.0) ? 1.0 : 0.0;
        row.flag = "degenerate_rates";
    }
    return row;
}

}  // namespace simaudit

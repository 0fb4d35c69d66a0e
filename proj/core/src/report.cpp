#include "simaudit/report.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "simaudit/calibration.hpp"
#include "simaudit/errors.hpp"
#include "simaudit/logic.hpp"
#include "simaudit/network.hpp"
#include "simaudit/rigidity.hpp"
#include "simaudit/rng.hpp"
#include "simaudit/stability.hpp"
#include "simaudit/statkit.hpp"
#include "simaudit/version.hpp"

namespace simaudit {

namespace {

using ordered_json = nlohmann::ordered_json;

constexpr std::uint64_t kNetworkSalt = 0x6E657477ULL;

// CSV floats carry 6 significant digits; JSON keeps full doubles.
std::string csv_num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

std::string csv_opt(const std::optional<double>& v) { return v ? csv_num(*v) : std::string(); }

std::string hex_digest(std::uint64_t digest) {
    char buf[24];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(digest));
    return buf;
}

ordered_json json_opt(const std::optional<double>& v) {
    return v ? ordered_json(*v) : ordered_json(nullptr);
}

std::string timestamp_utc() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

struct RegisteredP {
    std::string family;
    std::string id;
    double p = 1.0;
};

class PValueRegistry {
public:
    void add(std::string family, std::string id, double p) {
        entries_.push_back({std::move(family), std::move(id), p});
    }
    void add(std::string family, std::string id, const std::optional<double>& p) {
        if (p) add(std::move(family), std::move(id), *p);
    }
    const std::vector<RegisteredP>& entries() const { return entries_; }

private:
    std::vector<RegisteredP> entries_;
};

// Buffers everything and flushes at the end, so a failed run leaves no
// partial output files behind.
struct OutputFiles {
    std::filesystem::path dir;
    bool enabled = false;
    std::vector<std::pair<std::string, std::string>> pending;

    void write(const std::string& name, const std::string& content) {
        if (!enabled) return;
        pending.emplace_back(name, content);
    }

    std::vector<std::string> flush() {
        std::vector<std::string> written;
        if (!enabled) return written;
        std::filesystem::create_directories(dir);
        for (const auto& [name, content] : pending) {
            const auto path = dir / name;
            std::ofstream out(path, std::ios::binary);
            if (!out) throw ValidationError("cannot write " + path.string());
            out << content;
            written.push_back(path.string());
        }
        return written;
    }
};

// ---------------------------------------------------------------------------
// Section builders
// ---------------------------------------------------------------------------

ordered_json rigidity_section(const Dataset& dataset, const BaselineTable& baselines,
                              const AuditConfig& cfg, PValueRegistry& registry,
                              OutputFiles& files, std::vector<std::string>& warnings) {
    RigidityOptions options;
    options.low_n_warning = cfg.low_n_warning;

    const auto pooled = rigidity_table(dataset, baselines, options);
    RigidityOptions per_model_opts = options;
    per_model_opts.by_model = true;
    const auto by_model = rigidity_table(dataset, baselines, per_model_opts);
    const auto model_summaries = per_model_si(dataset, baselines, options);

    bool both_conditions = false;
    {
        std::set<Condition> seen;
        for (const auto& r : dataset.records()) seen.insert(r.condition);
        both_conditions = seen.size() == 2;
    }
    std::vector<ContextSiRow> context;
    if (both_conditions) {
        context = context_si_delta(dataset, baselines, options);
    } else {
        warnings.push_back("rigidity: only one framing condition present; context deltas skipped");
    }

    auto row_json = [](const RigidityRow& r) {
        ordered_json j;
        j["dimension"] = to_label(r.dimension);
        j["group"] = r.group;
        if (r.model) j["model"] = *r.model;
        if (r.condition) j["condition"] = to_label(*r.condition);
        j["n"] = r.n;
        j["model_sd"] = json_opt(r.model_sd);
        j["gt_sd"] = json_opt(r.gt_sd);
        j["si"] = json_opt(r.si);
        j["compression_pct"] = json_opt(r.compression_pct);
        j["p_value"] = json_opt(r.p_value);
        j["baseline"] = r.gt_sd ? (r.used_intersection_baseline ? "intersection" : "marginal") : "";
        j["flag"] = r.flag;
        return j;
    };

    ordered_json section;
    section["instrument"] = to_label(options.instrument);
    section["rows"] = ordered_json::array();
    for (const auto& r : pooled) section["rows"].push_back(row_json(r));
    section["rows_by_model"] = ordered_json::array();
    for (const auto& r : by_model) section["rows_by_model"].push_back(row_json(r));
    section["per_model"] = ordered_json::array();
    for (const auto& s : model_summaries) {
        ordered_json j;
        j["model"] = s.model;
        j["mean_si"] = s.mean_si;
        j["compression_pct"] = s.compression_pct;
        j["categories"] = s.categories;
        section["per_model"].push_back(std::move(j));
    }
    section["context"] = ordered_json::array();
    for (const auto& c : context) {
        ordered_json j;
        j["dimension"] = to_label(c.dimension);
        j["group"] = c.group;
        j["si_clinical"] = json_opt(c.si_clinical);
        j["si_personal"] = json_opt(c.si_personal);
        j["pct_change"] = json_opt(c.pct_change);
        j["flag"] = c.flag;
        section["context"].push_back(std::move(j));
    }

    for (const auto& r : pooled) {
        registry.add("rigidity", "rigidity/" + to_label(r.dimension) + "/" + r.group, r.p_value);
    }
    for (const auto& r : by_model) {
        registry.add("rigidity",
                     "rigidity/" + to_label(r.dimension) + "/" + r.group + "/" + *r.model,
                     r.p_value);
    }

    std::string csv =
        "dimension,group,model,condition,n,model_sd,gt_sd,si,compression_pct,p_value,baseline,"
        "flag\n";
    auto csv_row = [&](const RigidityRow& r) {
        csv += to_label(r.dimension) + "," + r.group + "," + (r.model ? *r.model : "") + "," +
               (r.condition ? to_label(*r.condition) : "") + "," + std::to_string(r.n) + "," +
               csv_opt(r.model_sd) + "," + csv_opt(r.gt_sd) + "," + csv_opt(r.si) + "," +
               csv_opt(r.compression_pct) + "," + csv_opt(r.p_value) + "," +
               (r.gt_sd ? (r.used_intersection_baseline ? "intersection" : "marginal") : "") +
               "," + r.flag + "\n";
    };
    for (const auto& r : pooled) csv_row(r);
    for (const auto& r : by_model) csv_row(r);
    files.write("rigidity.csv", csv);
    return section;
}

ordered_json transition_json(const TransitionMatrix& m) {
    ordered_json j;
    j["total_pairs"] = m.total_pairs;
    j["counts"] = ordered_json::array();
    for (std::size_t i = 0; i < 5; ++i) {
        ordered_json row = ordered_json::array();
        for (std::size_t k = 0; k < 5; ++k) row.push_back(m.counts[i][k]);
        j["counts"].push_back(std::move(row));
    }
    j["row_sums"] = ordered_json::array();
    for (std::size_t i = 0; i < 5; ++i) j["row_sums"].push_back(m.row_sum(i));
    j["stable"] = m.trace();
    return j;
}

ordered_json stability_section(const Dataset& dataset, const MatchedPairs& matches,
                               const AuditConfig& cfg, PValueRegistry& registry,
                               OutputFiles& files) {
    const auto rep = stability_report(dataset, matches, cfg.pcl5_cut);

    ordered_json section;
    section["matched_pairs"] = rep.matched_pairs;
    section["unmatched_clinical"] = rep.unmatched_clinical;
    section["unmatched_personal"] = rep.unmatched_personal;
    section["continuous_r"] = rep.continuous_r;
    section["mean_abs_dev"] = rep.mean_abs_dev;
    section["drift_mean"] = rep.drift_mean;
    section["drift_t"] = rep.drift_t;
    section["drift_p"] = rep.drift_p;
    section["flip_rate_binary"] = rep.flip_rate_binary;
    section["flip_rate_any"] = rep.flip_rate_any;
    section["crossings_any"] = rep.crossings_any;
    registry.add("stability", "stability/drift/pooled", rep.drift_p);

    if (rep.phq8_transitions) section["phq8_transitions"] = transition_json(*rep.phq8_transitions);

    section["per_instrument"] = ordered_json::array();
    for (const auto& r : rep.per_instrument) {
        ordered_json j;
        j["instrument"] = to_label(r.instrument);
        j["pairs"] = r.pairs;
        j["r"] = r.r;
        j["mean_abs_dev"] = r.mean_abs_dev;
        j["flip_rate_binary"] = r.flip_rate_binary;
        j["flip_rate_5cat"] = json_opt(r.flip_rate_5cat);
        j["crossings_5cat"] =
            r.crossings_5cat ? ordered_json(*r.crossings_5cat) : ordered_json(nullptr);
        j["drift_mean"] = r.drift_mean;
        j["drift_t"] = r.drift_t;
        j["drift_p"] = r.drift_p;
        section["per_instrument"].push_back(std::move(j));
        registry.add("stability", "stability/drift/" + to_label(r.instrument), r.drift_p);
    }

    section["per_model_phq8"] = ordered_json::array();
    for (const auto& r : rep.per_model_phq8) {
        ordered_json j;
        j["model"] = r.model;
        j["pairs"] = r.pairs;
        j["flip_rate_binary"] = r.flip_rate_binary;
        j["flip_rate_5cat"] = r.flip_rate_5cat;
        j["drift_mean"] = r.drift_mean;
        j["mean_total"] = r.mean_total;
        section["per_model_phq8"].push_back(std::move(j));
    }

    section["within_run"] = ordered_json::array();
    for (const auto& r : rep.within_run) {
        ordered_json j;
        j["condition"] = to_label(r.condition);
        j["instrument"] = to_label(r.instrument);
        j["pairs"] = r.stats.pair_count;
        j["crossings"] = r.stats.crossings;
        j["rate"] = r.stats.rate;
        j["ignored_records"] = r.stats.ignored_records;
        section["within_run"].push_back(std::move(j));
    }

    // stability.csv
    std::string csv =
        "scope,instrument,model,condition,pairs,r,mean_abs_dev,flip_rate_binary,flip_rate_5cat,"
        "crossings_5cat,drift_mean,drift_t,drift_p,within_crossings,within_pairs,within_rate\n";
    csv += "pooled,,,," + std::to_string(rep.matched_pairs) + "," + csv_num(rep.continuous_r) +
           "," + csv_num(rep.mean_abs_dev) + "," + csv_num(rep.flip_rate_binary) + "," +
           csv_num(rep.flip_rate_any) + "," + std::to_string(rep.crossings_any) + "," +
           csv_num(rep.drift_mean) + "," + csv_num(rep.drift_t) + "," + csv_num(rep.drift_p) +
           ",,,\n";
    for (const auto& r : rep.per_instrument) {
        csv += "instrument," + to_label(r.instrument) + ",,," + std::to_string(r.pairs) + "," +
               csv_num(r.r) + "," + csv_num(r.mean_abs_dev) + "," + csv_num(r.flip_rate_binary) +
               "," + csv_opt(r.flip_rate_5cat) + "," +
               (r.crossings_5cat ? std::to_string(*r.crossings_5cat) : "") + "," +
               csv_num(r.drift_mean) + "," + csv_num(r.drift_t) + "," + csv_num(r.drift_p) +
               ",,,\n";
    }
    for (const auto& r : rep.per_model_phq8) {
        csv += "model,PHQ8," + r.model + ",," + std::to_string(r.pairs) + ",,," +
               csv_num(r.flip_rate_binary) + "," + csv_num(r.flip_rate_5cat) + ",," +
               csv_num(r.drift_mean) + ",,,,,\n";
    }
    for (const auto& r : rep.within_run) {
        csv += "within_run," + to_label(r.instrument) + ",," + to_label(r.condition) + ",,,,,,,,,," +
               std::to_string(r.stats.crossings) + "," + std::to_string(r.stats.pair_count) + "," +
               csv_num(r.stats.rate) + "\n";
    }
    files.write("stability.csv", csv);

    if (rep.phq8_transitions) {
        const auto& m = *rep.phq8_transitions;
        std::string tcsv = "run1_category,None,Mild,Moderate,ModSevere,Severe\n";
        for (std::size_t i = 0; i < 5; ++i) {
            tcsv += to_label(static_cast<Severity>(i));
            for (std::size_t k = 0; k < 5; ++k) tcsv += "," + std::to_string(m.counts[i][k]);
            tcsv += "\n";
        }
        files.write("transitions.csv", tcsv);
    }
    return section;
}

ordered_json fracture_section(const Dataset& dataset, const MatchedPairs& matches,
                              PValueRegistry& registry, OutputFiles& files,
                              std::vector<std::string>& warnings) {
    // Fracture runs on PHQ-8 cross-run deltas.
    PairIndex phq8;
    for (const auto& pr : matches.pairs) {
        if (dataset.records()[pr.first].instrument == InstrumentId::PHQ8) phq8.push_back(pr);
    }

    ordered_json section = ordered_json::array();
    std::string csv = "dimension,test,group_a,group_b,statistic,p_raw,p_adj,cliffs_delta,flag\n";
    for (Dimension dim : kMarginalDimensions) {
        FractureResult f;
        try {
            f = fracture_test(dataset, phq8, dim);
        } catch (const InfeasibleError& e) {
            warnings.push_back(std::string("fracture: ") + e.what());
            continue;
        }
        ordered_json j;
        j["dimension"] = to_label(dim);
        j["kw_h"] = f.kw.statistic;
        j["kw_p"] = f.kw.p_value;
        j["kw_df"] = f.kw.df1;
        j["kw_degenerate"] = f.kw.degenerate;
        j["flag"] = f.flag;
        j["contrasts"] = ordered_json::array();
        registry.add("fracture", "fracture/" + to_label(dim) + "/kw", f.kw.p_value);
        csv += to_label(dim) + ",kruskal_wallis,,," + csv_num(f.kw.statistic) + "," +
               csv_num(f.kw.p_value) + ",,," + f.flag + "\n";
        for (const auto& c : f.contrasts) {
            ordered_json cj;
            cj["group_a"] = c.group_a;
            cj["group_b"] = c.group_b;
            cj["z"] = c.z;
            cj["p_raw"] = c.p_raw;
            cj["p_adj"] = c.p_adj;
            cj["cliffs_delta"] = c.cliffs_delta;
            cj["degenerate"] = c.degenerate;
            j["contrasts"].push_back(std::move(cj));
            registry.add("fracture",
                         "fracture/" + to_label(dim) + "/dunn/" + c.group_a + "-vs-" + c.group_b,
                         c.p_raw);
            csv += to_label(dim) + ",dunn," + c.group_a + "," + c.group_b + "," + csv_num(c.z) +
                   "," + csv_num(c.p_raw) + "," + csv_num(c.p_adj) + "," +
                   csv_num(c.cliffs_delta) + "," + (c.degenerate ? "degenerate" : "") + "\n";
        }
        section.push_back(std::move(j));
    }
    files.write("fracture.csv", csv);
    return section;
}

ordered_json noise_floor_json(const NoiseFloor& f, Dimension dim) {
    ordered_json j;
    j["dimension"] = to_label(dim);
    j["reference_group"] = f.reference_group;
    j["reference_n"] = f.reference_n;
    j["iterations"] = f.iterations;
    j["mean_distance"] = f.mean_distance;
    j["sd_distance"] = f.sd_distance;
    j["ceiling95"] = f.ceiling95;
    j["seed"] = f.seed;
    j["redraws"] = f.redraws;
    return j;
}

ordered_json network_section(const Dataset& dataset, const AuditConfig& cfg,
                             PValueRegistry& registry, OutputFiles& files,
                             std::vector<std::string>& warnings) {
    const InstrumentId instrument = InstrumentId::PHQ8;
    ordered_json section;
    section["instrument"] = to_label(instrument);
    section["floors"] = ordered_json::array();
    section["divergences"] = ordered_json::array();

    std::string csv =
        "dimension,group,reference,n_group,n_reference,d_f,z,p,exceeds_ceiling,floor_mean,"
        "floor_sd,ceiling95,flag\n";

    const std::pair<Dimension, std::string> references[] = {
        {Dimension::Race, cfg.reference_group},
        {Dimension::Gender, cfg.reference_gender},
        {Dimension::SES, cfg.reference_ses},
        {Dimension::Relationship, cfg.reference_relationship},
    };

    bool any_floor = false;
    for (const auto& [dim, reference] : references) {
        NoiseFloor floor;
        try {
            floor = noise_floor(dataset, dim, reference, instrument, cfg.permutation_iterations,
                                derive_seed(cfg.rng_seed, {kNetworkSalt,
                                                           static_cast<std::uint64_t>(dim)}),
                                cfg.noise_min_n, cfg.workers);
        } catch (const InfeasibleError& e) {
            warnings.push_back(std::string("network: ") + e.what());
            continue;
        }
        any_floor = true;
        section["floors"].push_back(noise_floor_json(floor, dim));

        for (const auto& group : dimension_groups(dim)) {
            if (group == reference) continue;
            try {
                const auto div =
                    divergence(dataset, dim, group, reference, instrument, floor, cfg.min_group_n);
                ordered_json j;
                j["dimension"] = to_label(dim);
                j["comparison"] = div.comparison;
                j["group"] = div.group;
                j["reference"] = div.reference_group;
                j["n_group"] = div.n_group;
                j["n_reference"] = div.n_reference;
                j["d_f"] = div.d_f;
                j["z"] = div.z;
                j["p"] = div.p;
                j["exceeds_ceiling"] = div.exceeds_ceiling;
                section["divergences"].push_back(std::move(j));
                registry.add("network", "network/" + to_label(dim) + "/" + group, div.p);
                csv += to_label(dim) + "," + group + "," + reference + "," +
                       std::to_string(div.n_group) + "," + std::to_string(div.n_reference) + "," +
                       csv_num(div.d_f) + "," + csv_num(div.z) + "," + csv_num(div.p) + "," +
                       (div.exceeds_ceiling ? "true" : "false") + "," +
                       csv_num(floor.mean_distance) + "," + csv_num(floor.sd_distance) + "," +
                       csv_num(floor.ceiling95) + ",\n";
            } catch (const std::exception& e) {
                // Group too small or a flat item: diagnostic row, not a crash.
                ordered_json j;
                j["dimension"] = to_label(dim);
                j["group"] = group;
                j["reference"] = reference;
                j["excluded"] = e.what();
                section["divergences"].push_back(std::move(j));
                csv += to_label(dim) + "," + group + "," + reference + ",,,,,,,,,,excluded\n";
            }
        }
    }
    if (!any_floor) {
        throw InfeasibleError("network: no dimension had a usable reference group");
    }

    files.write("network_divergence.csv", csv);
    ordered_json floors_file;
    floors_file["floors"] = section["floors"];
    files.write("noise_floor.json", floors_file.dump(2) + "\n");
    return section;
}

ordered_json logic_section(const Dataset& dataset, OutputFiles& files) {
    const auto result = gateway_violations(dataset);
    ordered_json section;
    section["audited"] = result.audited;
    section["count"] = result.count;
    section["rate"] = result.rate;
    section["violations"] = ordered_json::array();
    for (const auto& v : result.violations) {
        ordered_json j;
        j["record_id"] = v.record_id;
        j["total"] = v.total;
        j["item1"] = v.item1;
        j["item2"] = v.item2;
        section["violations"].push_back(std::move(j));
    }
    files.write("logic_audit.json", section.dump(2) + "\n");
    return section;
}

ordered_json calibration_section(const Dataset& dataset, const BaselineTable& baselines,
                                 const AuditConfig& cfg, PValueRegistry& registry,
                                 OutputFiles& files, std::vector<std::string>& warnings) {
    const InstrumentId instrument = InstrumentId::PHQ8;
    const std::vector<Dimension> dims(kMarginalDimensions.begin(), kMarginalDimensions.end());

    ordered_json section;

    // ---- bias residuals --------------------------------------------------
    const auto pooled = bias_residuals(dataset, baselines, dims, instrument, false);
    const auto by_model = bias_residuals(dataset, baselines, dims, instrument, true);

    auto bias_json = [](const BiasRow& r) {
        ordered_json j;
        j["dimension"] = to_label(r.dimension);
        j["group"] = r.group;
        if (r.model) j["model"] = *r.model;
        j["n"] = r.n;
        j["model_mean"] = json_opt(r.model_mean);
        j["model_sd"] = json_opt(r.model_sd);
        j["gt_mean"] = json_opt(r.gt_mean);
        j["residual"] = json_opt(r.residual);
        j["cohens_d"] = json_opt(r.d);
        j["p_value"] = json_opt(r.p);
        j["baseline"] = r.gt_mean ? (r.used_intersection_baseline ? "intersection" : "marginal")
                                  : "";
        j["flag"] = r.flag;
        return j;
    };

    section["bias"] = ordered_json::array();
    for (const auto& r : pooled) section["bias"].push_back(bias_json(r));
    section["bias_by_model"] = ordered_json::array();
    for (const auto& r : by_model) section["bias_by_model"].push_back(bias_json(r));

    std::string bias_csv =
        "dimension,group,model,n,model_mean,model_sd,gt_mean,residual,cohens_d,p_value,baseline,"
        "flag\n";
    auto bias_csv_row = [&](const BiasRow& r) {
        bias_csv += to_label(r.dimension) + "," + r.group + "," + (r.model ? *r.model : "") + "," +
                    std::to_string(r.n) + "," + csv_opt(r.model_mean) + "," +
                    csv_opt(r.model_sd) + "," + csv_opt(r.gt_mean) + "," + csv_opt(r.residual) +
                    "," + csv_opt(r.d) + "," + csv_opt(r.p) + "," +
                    (r.gt_mean ? (r.used_intersection_baseline ? "intersection" : "marginal")
                               : "") +
                    "," + r.flag + "\n";
    };
    for (const auto& r : pooled) {
        bias_csv_row(r);
        registry.add("bias", "bias/" + to_label(r.dimension) + "/" + r.group, r.p);
    }
    for (const auto& r : by_model) {
        bias_csv_row(r);
        registry.add("bias", "bias/" + to_label(r.dimension) + "/" + r.group + "/" + *r.model,
                     r.p);
    }
    files.write("bias.csv", bias_csv);

    // ---- intersectional cells ---------------------------------------------
    section["intersectional"] = ordered_json::array();
    std::string icsv = "cell,dims,n,mean,sd,baseline,residual,cohens_d,p_value,flag\n";
    const std::vector<std::vector<Dimension>> intersections = {
        {Dimension::Gender, Dimension::SES},
        {Dimension::Race, Dimension::Gender, Dimension::SES},
    };
    for (const auto& combo : intersections) {
        std::string dims_label;
        for (Dimension d : combo) {
            if (!dims_label.empty()) dims_label += "x";
            dims_label += to_label(d);
        }
        const auto cells = intersectional_bias(dataset, cfg.population_baseline, combo, instrument,
                                               cfg.intersect_min_n);
        for (const auto& c : cells) {
            ordered_json j;
            j["cell"] = c.cell;
            j["dims"] = dims_label;
            j["n"] = c.n;
            j["mean"] = json_opt(c.mean);
            j["sd"] = json_opt(c.sd);
            j["baseline"] = cfg.population_baseline;
            j["residual"] = json_opt(c.residual);
            j["cohens_d"] = json_opt(c.d);
            j["p_value"] = json_opt(c.p);
            j["flag"] = c.flag;
            section["intersectional"].push_back(std::move(j));
            registry.add("bias", "intersectional/" + dims_label + "/" + c.cell, c.p);
            icsv += c.cell + "," + dims_label + "," + std::to_string(c.n) + "," +
                    csv_opt(c.mean) + "," + csv_opt(c.sd) + "," + csv_num(cfg.population_baseline) +
                    "," + csv_opt(c.residual) + "," + csv_opt(c.d) + "," + csv_opt(c.p) + "," +
                    c.flag + "\n";
        }
    }
    files.write("intersectional.csv", icsv);

    // ---- suppression -------------------------------------------------------
    // pct_captured = 100 * (model mean - population baseline)
    //                    / (GT group mean - population baseline)
    section["suppression"] = ordered_json::array();
    const BaselineRow* trans_w = baselines.find(Dimension::Gender, "Trans Woman", instrument);
    if (trans_w) {
        try {
            const auto rows =
                suppression_by_model(dataset, Dimension::Gender, "Trans Woman",
                                     cfg.population_baseline, trans_w->gt_mean, instrument);
            for (const auto& r : rows) {
                ordered_json j;
                j["model"] = r.model;
                j["group"] = "Trans Woman";
                j["n"] = r.n;
                j["model_mean"] = r.model_mean;
                j["population_baseline"] = r.population_baseline;
                j["gt_group_mean"] = r.gt_group_mean;
                j["residual"] = r.residual;
                j["pct_captured"] = r.pct_captured;
                section["suppression"].push_back(std::move(j));
            }
        } catch (const std::exception& e) {
            warnings.push_back(std::string("calibration: suppression skipped: ") + e.what());
        }
    } else {
        warnings.push_back("calibration: no Trans Woman baseline; suppression skipped");
    }

    // ---- cultural calibration (Asian - White differential) -----------------
    section["paradox"] = ordered_json::array();
    const BaselineRow* asian = baselines.find(Dimension::Race, "Asian", instrument);
    const BaselineRow* white = baselines.find(Dimension::Race, "White", instrument);
    if (asian && white) {
        const double gt_delta = asian->gt_mean - white->gt_mean;
        try {
            const auto rows = paradox_calibration(dataset, gt_delta, instrument);
            std::string pcsv = "model,n_asian,n_white,observed_delta,gt_delta,error\n";
            for (const auto& r : rows) {
                ordered_json j;
                j["model"] = r.model;
                j["n_asian"] = r.n_asian;
                j["n_white"] = r.n_white;
                j["observed_delta"] = r.observed_delta;
                j["gt_delta"] = r.gt_delta;
                j["error"] = r.error;
                section["paradox"].push_back(std::move(j));
                pcsv += r.model + "," + std::to_string(r.n_asian) + "," +
                        std::to_string(r.n_white) + "," + csv_num(r.observed_delta) + "," +
                        csv_num(r.gt_delta) + "," + csv_num(r.error) + "\n";
            }
            files.write("paradox.csv", pcsv);
        } catch (const InfeasibleError& e) {
            warnings.push_back(std::string("calibration: paradox skipped: ") + e.what());
        }
    } else {
        warnings.push_back("calibration: Asian/White baselines missing; paradox skipped");
    }

    // ---- symptom-level endorsement gaps -------------------------------------
    section["symptom_rates"] = ordered_json::array();
    std::string scsv =
        "label,instrument,item_index,model,group_a,group_b,n_a,n_b,rate_a,rate_b,diff,matched,"
        "shared_strata,p_value,flag\n";

    struct SymptomSpec {
        std::string label;
        InstrumentId instrument;
        int item;  // 1-based
        RecordFilter a;
        std::string label_a;
        RecordFilter b;
        std::string label_b;
    };
    RecordFilter black_men, white_men, women, men;
    black_men.races = {Race::Black};
    black_men.genders = {Gender::CisMan};
    white_men.races = {Race::White};
    white_men.genders = {Gender::CisMan};
    women.genders = {Gender::CisWoman};
    men.genders = {Gender::CisMan};
    const std::vector<SymptomSpec> symptom_specs = {
        {"irritability", InstrumentId::GAD7, 6, black_men, "Black Cis Man", white_men,
         "White Cis Man"},
        {"fatigue", InstrumentId::PHQ8, 4, women, "Cis Woman", men, "Cis Man"},
    };

    std::set<std::string> models;
    for (const auto& r : dataset.records()) models.insert(r.model);

    for (const auto& sspec : symptom_specs) {
        std::vector<std::optional<std::string>> scopes = {std::nullopt};
        for (const auto& m : models) scopes.emplace_back(m);
        for (const auto& scope : scopes) {
            RecordFilter a = sspec.a;
            RecordFilter b = sspec.b;
            if (scope) {
                a.models = {*scope};
                b.models = {*scope};
            }
            try {
                auto row = symptom_rates(dataset, sspec.instrument, sspec.item, a, sspec.label_a,
                                         b, sspec.label_b, SeverityMatching::TotalScoreStratified,
                                         cfg.symptom_band);
                row.label = sspec.label;
                row.model = scope;
                ordered_json j;
                j["label"] = row.label;
                j["instrument"] = to_label(row.instrument);
                j["item_index"] = row.item_index;
                if (row.model) j["model"] = *row.model;
                j["group_a"] = row.group_a;
                j["group_b"] = row.group_b;
                j["n_a"] = row.n_a;
                j["n_b"] = row.n_b;
                j["rate_a"] = row.rate_a;
                j["rate_b"] = row.rate_b;
                j["diff"] = row.diff;
                j["matched"] = row.matched;
                j["shared_strata"] = row.shared_strata;
                j["p_value"] = json_opt(row.p);
                j["flag"] = row.flag;
                section["symptom_rates"].push_back(std::move(j));
                registry.add("symptom",
                             "symptom/" + sspec.label + "/" + (scope ? *scope : "pooled"), row.p);
                scsv += sspec.label + "," + to_label(row.instrument) + "," +
                        std::to_string(row.item_index) + "," + (scope ? *scope : "") + "," +
                        row.group_a + "," + row.group_b + "," + std::to_string(row.n_a) + "," +
                        std::to_string(row.n_b) + "," + csv_num(row.rate_a) + "," +
                        csv_num(row.rate_b) + "," + csv_num(row.diff) + "," +
                        (row.matched ? "true" : "false") + "," + std::to_string(row.shared_strata) +
                        "," + csv_opt(row.p) + "," + row.flag + "\n";
            } catch (const InfeasibleError& e) {
                warnings.push_back("calibration: symptom \"" + sspec.label + "\" (" +
                                   (scope ? *scope : "pooled") + ") skipped: " + e.what());
            }
        }
    }
    files.write("symptom_rates.csv", scsv);
    return section;
}

ordered_json corrections_block(const PValueRegistry& registry, const AuditConfig& cfg,
                               std::vector<std::string>& warnings) {
    // Default family registry: one family per audit section, BH everywhere.
    std::vector<FamilySpec> families = cfg.families;
    if (families.empty()) {
        for (const char* name : {"rigidity", "stability", "fracture", "network", "bias", "symptom"}) {
            families.push_back({name, Correction::BH});
        }
    }
    std::set<std::string> declared;
    for (const auto& f : families) declared.insert(f.name);
    for (const auto& e : registry.entries()) {
        if (!declared.count(e.family)) {
            families.push_back({e.family, Correction::BH});
            declared.insert(e.family);
            warnings.push_back("corrections: family \"" + e.family +
                               "\" not declared in config; added with BH");
        }
    }

    ordered_json block;
    block["alpha"] = cfg.alpha;
    block["families"] = ordered_json::array();
    for (const auto& fam : families) {
        std::vector<const RegisteredP*> members;
        for (const auto& e : registry.entries()) {
            if (e.family == fam.name) members.push_back(&e);
        }
        ordered_json fj;
        fj["name"] = fam.name;
        fj["correction"] = (fam.correction == Correction::BH) ? "BH" : "Bonferroni";
        fj["m"] = members.size();
        fj["tests"] = ordered_json::array();
        if (!members.empty()) {
            std::vector<double> pvals;
            pvals.reserve(members.size());
            for (const auto* m : members) pvals.push_back(m->p);
            std::vector<double> adjusted;
            std::vector<bool> reject;
            if (fam.correction == Correction::BH) {
                auto fdr = stats::bh_fdr(pvals, cfg.alpha);
                adjusted = std::move(fdr.adjusted);
                reject = std::move(fdr.reject);
            } else {
                adjusted = stats::bonferroni(pvals);
                reject.resize(pvals.size());
                for (std::size_t i = 0; i < pvals.size(); ++i) reject[i] = adjusted[i] <= cfg.alpha;
            }
            for (std::size_t i = 0; i < members.size(); ++i) {
                ordered_json tj;
                tj["id"] = members[i]->id;
                tj["p"] = members[i]->p;
                tj["p_adj"] = adjusted[i];
                tj["reject"] = static_cast<bool>(reject[i]);
                fj["tests"].push_back(std::move(tj));
            }
        }
        block["families"].push_back(std::move(fj));
    }
    return block;
}

// ---------------------------------------------------------------------------
// Markdown rendering (reads only report.json values)
// ---------------------------------------------------------------------------

std::string md_num(const ordered_json& v) {
    if (v.is_null()) return "-";
    if (v.is_number_float()) return csv_num(v.get<double>());
    if (v.is_number()) return std::to_string(v.get<long long>());
    if (v.is_boolean()) return v.get<bool>() ? "yes" : "no";
    return v.is_string() ? v.get<std::string>() : v.dump();
}

std::string render_markdown(const ordered_json& r) {
    std::ostringstream md;
    md << "# Cohort fidelity audit report\n\n";
    md << "- tool: " << r["tool"]["name"].get<std::string>() << " "
       << r["tool"]["version"].get<std::string>() << " (format "
       << r["tool"]["format_version"].get<int>() << ")\n";
    md << "- seed: " << r["seed"].get<std::uint64_t>() << "\n";
    md << "- records: " << r["dataset"]["records"].get<std::size_t>() << " (digest "
       << r["dataset"]["digest"].get<std::string>() << ")\n\n";

    const auto& sections = r["sections"];
    if (sections.contains("rigidity")) {
        const auto& s = sections["rigidity"];
        md << "## Variance compression (" << s["instrument"].get<std::string>() << ")\n\n";
        md << "| dimension | group | n | model SD | GT SD | SI | compression % | p | flag |\n";
        md << "|---|---|---|---|---|---|---|---|---|\n";
        for (const auto& row : s["rows"]) {
            md << "| " << row["dimension"].get<std::string>() << " | "
               << row["group"].get<std::string>() << " | " << md_num(row["n"]) << " | "
               << md_num(row["model_sd"]) << " | " << md_num(row["gt_sd"]) << " | "
               << md_num(row["si"]) << " | " << md_num(row["compression_pct"]) << " | "
               << md_num(row["p_value"]) << " | " << row["flag"].get<std::string>() << " |\n";
        }
        md << "\n| model | mean SI | compression % | categories |\n|---|---|---|---|\n";
        for (const auto& row : s["per_model"]) {
            md << "| " << row["model"].get<std::string>() << " | " << md_num(row["mean_si"])
               << " | " << md_num(row["compression_pct"]) << " | " << md_num(row["categories"])
               << " |\n";
        }
        if (!s["context"].empty()) {
            md << "\n| dimension | group | SI clinical | SI personal | change % |\n|---|---|---|---|---|\n";
            for (const auto& row : s["context"]) {
                md << "| " << row["dimension"].get<std::string>() << " | "
                   << row["group"].get<std::string>() << " | " << md_num(row["si_clinical"])
                   << " | " << md_num(row["si_personal"]) << " | " << md_num(row["pct_change"])
                   << " |\n";
            }
        }
        md << "\n";
    }

    if (sections.contains("stability")) {
        const auto& s = sections["stability"];
        md << "## Threshold stability\n\n";
        md << "- matched pairs: " << md_num(s["matched_pairs"]) << " (unmatched clinical "
           << md_num(s["unmatched_clinical"]) << ", personal " << md_num(s["unmatched_personal"])
           << ")\n";
        md << "- continuous r: " << md_num(s["continuous_r"]) << ", mean |delta|: "
           << md_num(s["mean_abs_dev"]) << "\n";
        md << "- drift (clinical - personal): " << md_num(s["drift_mean"]) << " points, t = "
           << md_num(s["drift_t"]) << ", p = " << md_num(s["drift_p"]) << "\n";
        md << "- flip rate (any category boundary, pooled): " << md_num(s["flip_rate_any"])
           << " (" << md_num(s["crossings_any"]) << " crossings)\n";
        md << "- flip rate (binary threshold, pooled): " << md_num(s["flip_rate_binary"]) << "\n\n";
        if (s.contains("phq8_transitions")) {
            const auto& t = s["phq8_transitions"];
            md << "PHQ-8 transitions (rows: clinical run, columns: personal run)\n\n";
            md << "| | None | Mild | Moderate | ModSevere | Severe |\n|---|---|---|---|---|---|\n";
            const char* names[] = {"None", "Mild", "Moderate", "ModSevere", "Severe"};
            for (std::size_t i = 0; i < 5; ++i) {
                md << "| " << names[i] << " |";
                for (std::size_t k = 0; k < 5; ++k) md << " " << md_num(t["counts"][i][k]) << " |";
                md << "\n";
            }
            md << "\n";
        }
        md << "| instrument | pairs | r | MAD | binary flip | 5-cat flip | drift | drift p |\n";
        md << "|---|---|---|---|---|---|---|---|\n";
        for (const auto& row : s["per_instrument"]) {
            md << "| " << row["instrument"].get<std::string>() << " | " << md_num(row["pairs"])
               << " | " << md_num(row["r"]) << " | " << md_num(row["mean_abs_dev"]) << " | "
               << md_num(row["flip_rate_binary"]) << " | " << md_num(row["flip_rate_5cat"])
               << " | " << md_num(row["drift_mean"]) << " | " << md_num(row["drift_p"]) << " |\n";
        }
        md << "\n";
        if (!s["per_model_phq8"].empty()) {
            md << "| model | PHQ-8 pairs | binary flip | 5-cat flip | drift | mean total |\n";
            md << "|---|---|---|---|---|---|\n";
            for (const auto& row : s["per_model_phq8"]) {
                md << "| " << row["model"].get<std::string>() << " | " << md_num(row["pairs"])
                   << " | " << md_num(row["flip_rate_binary"]) << " | "
                   << md_num(row["flip_rate_5cat"]) << " | " << md_num(row["drift_mean"]) << " | "
                   << md_num(row["mean_total"]) << " |\n";
            }
            md << "\n";
        }
        if (!s["within_run"].empty()) {
            md << "| condition | instrument | within-run pairs | crossings | rate |\n";
            md << "|---|---|---|---|---|\n";
            for (const auto& row : s["within_run"]) {
                md << "| " << row["condition"].get<std::string>() << " | "
                   << row["instrument"].get<std::string>() << " | " << md_num(row["pairs"])
                   << " | " << md_num(row["crossings"]) << " | " << md_num(row["rate"]) << " |\n";
            }
            md << "\n";
        }
    }

    if (sections.contains("fracture")) {
        md << "## Stochastic fracture (|cross-run delta| by demographic level)\n\n";
        md << "| dimension | KW H | p | contrasts |\n|---|---|---|---|\n";
        for (const auto& row : sections["fracture"]) {
            md << "| " << row["dimension"].get<std::string>() << " | " << md_num(row["kw_h"])
               << " | " << md_num(row["kw_p"]) << " | " << row["contrasts"].size() << " |\n";
        }
        md << "\n";
    }

    if (sections.contains("network")) {
        const auto& s = sections["network"];
        md << "## Symptom-network divergence (" << s["instrument"].get<std::string>() << ")\n\n";
        for (const auto& f : s["floors"]) {
            md << "- noise floor [" << f["dimension"].get<std::string>() << "] reference "
               << f["reference_group"].get<std::string>() << " (n=" << md_num(f["reference_n"])
               << "): mean " << md_num(f["mean_distance"]) << ", ceiling95 "
               << md_num(f["ceiling95"]) << " (" << md_num(f["iterations"]) << " iterations)\n";
        }
        md << "\n| dimension | comparison | d_F | Z | p | beyond ceiling |\n|---|---|---|---|---|---|\n";
        for (const auto& row : s["divergences"]) {
            if (row.contains("excluded")) {
                md << "| " << row["dimension"].get<std::string>() << " | "
                   << row["group"].get<std::string>() << " | excluded: "
                   << row["excluded"].get<std::string>() << " | | | |\n";
                continue;
            }
            md << "| " << row["dimension"].get<std::string>() << " | "
               << row["comparison"].get<std::string>() << " | " << md_num(row["d_f"]) << " | "
               << md_num(row["z"]) << " | " << md_num(row["p"]) << " | "
               << md_num(row["exceeds_ceiling"]) << " |\n";
        }
        md << "\n";
    }

    if (sections.contains("logic")) {
        const auto& s = sections["logic"];
        md << "## Gateway coherence\n\n";
        md << "- audited: " << md_num(s["audited"]) << " PHQ-8 records\n";
        md << "- violations: " << md_num(s["count"]) << " (rate " << md_num(s["rate"]) << ")\n\n";
    }

    if (sections.contains("calibration")) {
        const auto& s = sections["calibration"];
        md << "## Mean calibration\n\n";
        md << "| dimension | group | n | model mean | GT mean | residual | d | p |\n";
        md << "|---|---|---|---|---|---|---|---|\n";
        for (const auto& row : s["bias"]) {
            md << "| " << row["dimension"].get<std::string>() << " | "
               << row["group"].get<std::string>() << " | " << md_num(row["n"]) << " | "
               << md_num(row["model_mean"]) << " | " << md_num(row["gt_mean"]) << " | "
               << md_num(row["residual"]) << " | " << md_num(row["cohens_d"]) << " | "
               << md_num(row["p_value"]) << " |\n";
        }
        md << "\n";
        if (!s["intersectional"].empty()) {
            md << "| cell | n | mean | residual | d |\n|---|---|---|---|---|\n";
            for (const auto& row : s["intersectional"]) {
                md << "| " << row["cell"].get<std::string>() << " | " << md_num(row["n"]) << " | "
                   << md_num(row["mean"]) << " | " << md_num(row["residual"]) << " | "
                   << md_num(row["cohens_d"]) << " |\n";
            }
            md << "\n";
        }
        if (!s["suppression"].empty()) {
            md << "Severity suppression: % captured = 100 x (model mean - population baseline) / "
                  "(GT group mean - population baseline)\n\n";
            md << "| model | group | model mean | GT mean | residual | % captured |\n";
            md << "|---|---|---|---|---|---|\n";
            for (const auto& row : s["suppression"]) {
                md << "| " << row["model"].get<std::string>() << " | "
                   << row["group"].get<std::string>() << " | " << md_num(row["model_mean"])
                   << " | " << md_num(row["gt_group_mean"]) << " | " << md_num(row["residual"])
                   << " | " << md_num(row["pct_captured"]) << " |\n";
            }
            md << "\n";
        }
        if (!s["paradox"].empty()) {
            md << "| model | observed Asian-White delta | GT delta | error |\n|---|---|---|---|\n";
            for (const auto& row : s["paradox"]) {
                md << "| " << row["model"].get<std::string>() << " | "
                   << md_num(row["observed_delta"]) << " | " << md_num(row["gt_delta"]) << " | "
                   << md_num(row["error"]) << " |\n";
            }
            md << "\n";
        }
        if (!s["symptom_rates"].empty()) {
            md << "| symptom | model | groups | rate A | rate B | diff | p |\n";
            md << "|---|---|---|---|---|---|---|\n";
            for (const auto& row : s["symptom_rates"]) {
                md << "| " << row["label"].get<std::string>() << " | "
                   << (row.contains("model") ? row["model"].get<std::string>() : "pooled") << " | "
                   << row["group_a"].get<std::string>() << " vs "
                   << row["group_b"].get<std::string>() << " | " << md_num(row["rate_a"]) << " | "
                   << md_num(row["rate_b"]) << " | " << md_num(row["diff"]) << " | "
                   << md_num(row["p_value"]) << " |\n";
            }
            md << "\n";
        }
    }

    md << "## Multiple comparisons\n\n";
    md << "| family | correction | tests | rejected |\n|---|---|---|---|\n";
    for (const auto& fam : r["corrections"]["families"]) {
        std::size_t rejected = 0;
        for (const auto& t : fam["tests"]) {
            if (t["reject"].get<bool>()) ++rejected;
        }
        md << "| " << fam["name"].get<std::string>() << " | "
           << fam["correction"].get<std::string>() << " | " << fam["m"].get<std::size_t>() << " | "
           << rejected << " |\n";
    }
    md << "\n";

    if (!r["warnings"].empty()) {
        md << "## Warnings\n\n";
        for (const auto& w : r["warnings"]) md << "- " << w.get<std::string>() << "\n";
    }
    return md.str();
}

bool section_enabled(const AuditConfig& cfg, const std::string& name) {
    if (cfg.sections.empty()) return true;
    return std::find(cfg.sections.begin(), cfg.sections.end(), name) != cfg.sections.end();
}

}  // namespace

AuditOutcome run_audit_on(const Dataset& dataset, const BaselineTable& baselines,
                          const AuditConfig& cfg) {
    cfg.validate();
    if (dataset.records().empty()) {
        throw ValidationError("no records to audit");
    }

    OutputFiles files;
    files.enabled = !cfg.out_dir.empty();
    if (files.enabled) files.dir = cfg.out_dir;

    PValueRegistry registry;
    std::vector<std::string> warnings;

    ordered_json report;
    report["tool"] = {{"name", "simaudit"}, {"version", kToolVersion},
                      {"format_version", kFormatVersion}};
    report["generated_at"] = timestamp_utc();
    report["seed"] = cfg.rng_seed;
    {
        ordered_json c;
        c["alpha"] = cfg.alpha;
        c["permutation_iterations"] = cfg.permutation_iterations;
        c["reference_group"] = cfg.reference_group;
        c["reference_gender"] = cfg.reference_gender;
        c["reference_ses"] = cfg.reference_ses;
        c["reference_relationship"] = cfg.reference_relationship;
        c["within_run_pairing"] = "DisjointConsecutive";
        c["population_baseline"] = cfg.population_baseline;
        c["pcl5_cut"] = cfg.pcl5_cut;
        c["min_group_n"] = cfg.min_group_n;
        c["noise_min_n"] = cfg.noise_min_n;
        c["intersect_min_n"] = cfg.intersect_min_n;
        c["symptom_band"] = cfg.symptom_band;
        c["strict"] = cfg.strict;
        if (!cfg.records_path.empty()) c["records"] = cfg.records_path;
        if (!cfg.baselines_path.empty()) c["baselines"] = cfg.baselines_path;
        // Worker count and out dir deliberately not echoed: neither may
        // affect report bytes.
        report["config"] = std::move(c);
    }
    {
        ordered_json d;
        d["records"] = dataset.records().size();
        // Parsing is fail-fast, so a successful run never drops records; the
        // field keeps the audited/parsed denominator discrepancy visible.
        d["dropped"] = 0;
        d["digest"] = hex_digest(dataset.provenance().digest);
        std::set<std::string> models;
        std::map<std::string, std::size_t> by_instrument;
        for (const auto& r : dataset.records()) {
            models.insert(r.model);
            ++by_instrument[to_label(r.instrument)];
        }
        d["models"] = models;
        d["by_instrument"] = by_instrument;
        report["dataset"] = std::move(d);
    }

    ordered_json sections;
    if (section_enabled(cfg, "rigidity")) {
        sections["rigidity"] = rigidity_section(dataset, baselines, cfg, registry, files, warnings);
    }
    if (section_enabled(cfg, "stability")) {
        const auto matches = match_cross_run(dataset);
        sections["stability"] = stability_section(dataset, matches, cfg, registry, files);
        sections["fracture"] = fracture_section(dataset, matches, registry, files, warnings);
    }
    if (section_enabled(cfg, "network")) {
        sections["network"] = network_section(dataset, cfg, registry, files, warnings);
    }
    if (section_enabled(cfg, "logic")) {
        sections["logic"] = logic_section(dataset, files);
    }
    if (section_enabled(cfg, "calibration")) {
        sections["calibration"] =
            calibration_section(dataset, baselines, cfg, registry, files, warnings);
    }
    report["sections"] = std::move(sections);
    report["corrections"] = corrections_block(registry, cfg, warnings);
    report["warnings"] = warnings;

    AuditOutcome outcome;
    outcome.warnings = warnings;
    outcome.report_json = report.dump(2) + "\n";
    outcome.report_md = render_markdown(report);
    files.write("report.json", outcome.report_json);
    files.write("report.md", outcome.report_md);
    outcome.files_written = files.flush();
    return outcome;
}

AuditOutcome run_audit(const AuditConfig& cfg) {
    cfg.validate();
    if (cfg.records_path.empty()) throw ValidationError("no records file configured");
    if (cfg.baselines_path.empty()) throw ValidationError("no baselines file configured");

    std::ifstream records_in(cfg.records_path, std::ios::binary);
    if (!records_in) throw ValidationError("cannot open records file " + cfg.records_path);
    const Dataset dataset = parse_records(records_in, cfg.strict);

    std::ifstream baselines_in(cfg.baselines_path, std::ios::binary);
    if (!baselines_in) throw ValidationError("cannot open baselines file " + cfg.baselines_path);
    const BaselineTable baselines(parse_baselines(baselines_in));

    return run_audit_on(dataset, baselines, cfg);
}

ValidateResult validate_inputs(const AuditConfig& cfg) {
    ValidateResult result;
    std::ostringstream text;
    std::size_t errors = 0;
    std::size_t records = 0;

    if (cfg.records_path.empty()) {
        text << "error: no records file configured\n";
        ++errors;
    } else {
        std::ifstream in(cfg.records_path, std::ios::binary);
        if (!in) {
            text << "error: cannot open records file " << cfg.records_path << "\n";
            ++errors;
        } else {
            const auto report = scan_records(in, cfg.strict);
            for (const auto& issue : report.issues) {
                text << "error: records line " << issue.line << ": " << issue.message << "\n";
            }
            errors += report.issues.size();
            records = report.record_count;
        }
    }

    if (!cfg.baselines_path.empty()) {
        std::ifstream in(cfg.baselines_path, std::ios::binary);
        if (!in) {
            text << "error: cannot open baselines file " << cfg.baselines_path << "\n";
            ++errors;
        } else {
            try {
                const auto rows = parse_baselines(in);
                text << rows.size() << " baseline rows\n";
            } catch (const ValidationError& e) {
                text << "error: " << e.what() << "\n";
                ++errors;
            }
        }
    }

    text << errors << " errors, " << records << " records\n";
    result.ok = (errors == 0);
    result.text = text.str();
    return result;
}

}  // namespace simaudit

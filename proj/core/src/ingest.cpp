#include "simaudit/ingest.hpp"

#include <algorithm>
#include <cctype>
#include <istream>
#include <set>
#include <sstream>
#include <unordered_set>

#include <json.hpp>

#include "simaudit/errors.hpp"

namespace simaudit {

namespace {

using nlohmann::json;

const std::string kDimensionLabels[] = {"Race", "Gender", "SES", "Relationship", "Intersection"};

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    out.push_back(cur);
    return out;
}

const std::set<std::string> kKnownRecordFields = {
    "record_id", "model", "condition", "iteration", "race", "gender",
    "ses", "relationship", "instrument", "items", "total"};

// Parses one JSONL line into a record; returns error text instead of throwing
// so both the fail-fast and the collect-everything paths share it.
std::optional<std::string> parse_record_line(const std::string& line, bool strict,
                                             PatientRecord& out) {
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded()) return "malformed JSON";
    if (!j.is_object()) return "record is not a JSON object";

    for (const auto& [key, _] : j.items()) {
        if (!kKnownRecordFields.count(key)) {
            if (strict) return "unknown field \"" + key + "\"";
        }
    }

    const char* required[] = {"record_id", "model",  "condition",    "iteration",
                              "race",      "gender", "ses",          "relationship",
                              "instrument", "items"};
    for (const char* f : required) {
        if (!j.contains(f)) return std::string("missing field \"") + f + "\"";
    }

    try {
        if (!j["record_id"].is_string()) return "record_id must be a string";
        out.record_id = j["record_id"].get<std::string>();
        if (out.record_id.empty()) return "record_id must be nonempty";
        if (!j["model"].is_string()) return "model must be a string";
        out.model = j["model"].get<std::string>();
        if (!j["condition"].is_string()) return "condition must be a string";
        out.condition = condition_from_label(j["condition"].get<std::string>());
        if (!j["iteration"].is_number_integer()) return "iteration must be an integer";
        out.iteration = j["iteration"].get<int>();
        if (out.iteration < 1) return "iteration must be >= 1";
        out.profile.race = race_from_label(j["race"].get<std::string>());
        out.profile.gender = gender_from_label(j["gender"].get<std::string>());
        out.profile.ses = ses_from_label(j["ses"].get<std::string>());
        out.profile.relationship = relationship_from_label(j["relationship"].get<std::string>());
        out.instrument = instrument_from_label(j["instrument"].get<std::string>());
        if (!j["items"].is_array()) return "items must be an array";
        out.items.clear();
        for (const auto& item : j["items"]) {
            if (!item.is_number_integer()) return "items must be integers";
            out.items.push_back(item.get<int>());
        }
        out.total = score_instrument(out.items, instrument_spec(out.instrument));
        if (j.contains("total")) {
            if (!j["total"].is_number_integer()) return "total must be an integer";
            const int claimed = j["total"].get<int>();
            if (claimed != out.total) {
                return "supplied total " + std::to_string(claimed) + " != item sum " +
                       std::to_string(out.total);
            }
        }
    } catch (const ValidationError& e) {
        return std::string(e.what());
    } catch (const json::exception& e) {
        return std::string("bad field type: ") + e.what();
    }
    return std::nullopt;
}

}  // namespace

const std::string& to_label(Dimension d) { return kDimensionLabels[static_cast<std::size_t>(d)]; }

Dimension dimension_from_label(const std::string& s) {
    for (std::size_t i = 0; i < 5; ++i) {
        if (kDimensionLabels[i] == s) return static_cast<Dimension>(i);
    }
    throw ValidationError("unknown dimension token \"" + s + "\"");
}

const std::string& group_label(const DemographicProfile& p, Dimension dim) {
    switch (dim) {
        case Dimension::Race: return to_label(p.race);
        case Dimension::Gender: return to_label(p.gender);
        case Dimension::SES: return to_label(p.ses);
        case Dimension::Relationship: return to_label(p.relationship);
        case Dimension::Intersection: break;
    }
    throw ValidationError("group_label: Intersection is not a marginal dimension");
}

std::vector<std::string> dimension_groups(Dimension dim) {
    std::vector<std::string> out;
    switch (dim) {
        case Dimension::Race:
            for (Race r : kAllRaces) out.push_back(to_label(r));
            break;
        case Dimension::Gender:
            for (Gender g : kAllGenders) out.push_back(to_label(g));
            break;
        case Dimension::SES:
            for (Ses s : kAllSes) out.push_back(to_label(s));
            break;
        case Dimension::Relationship:
            for (Relationship r : kAllRelationships) out.push_back(to_label(r));
            break;
        case Dimension::Intersection:
            throw ValidationError("dimension_groups: Intersection has no fixed group list");
    }
    return out;
}

bool RecordFilter::matches(const PatientRecord& r) const {
    auto in = [](const auto& list, const auto& value) {
        return list.empty() || std::find(list.begin(), list.end(), value) != list.end();
    };
    return in(races, r.profile.race) && in(genders, r.profile.gender) && in(ses, r.profile.ses) &&
           in(relationships, r.profile.relationship) && in(models, r.model) &&
           (!condition || *condition == r.condition) &&
           (!instrument || *instrument == r.instrument);
}

// ============================================================================
// BASELINES
// ============================================================================

const BaselineRow* BaselineTable::find(Dimension dim, const std::string& group,
                                       InstrumentId instrument, bool* used_intersection) const {
    const BaselineRow* marginal = nullptr;
    for (const auto& row : rows_) {
        if (row.instrument != instrument || row.group != group) continue;
        if (row.dimension == Dimension::Intersection) {
            if (used_intersection) *used_intersection = true;
            return &row;
        }
        if (row.dimension == dim && !marginal) marginal = &row;
    }
    if (used_intersection) *used_intersection = false;
    return marginal;
}

std::vector<BaselineRow> parse_baselines(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw ValidationError("baselines: empty input, header required");
    const std::string header = trim(line);
    if (header != "dimension,group,instrument,gt_mean,gt_sd,source") {
        throw ValidationError("baselines: unexpected header \"" + header + "\"");
    }

    std::vector<BaselineRow> rows;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        const auto fields = split(line, ',');
        if (fields.size() != 6) {
            throw ValidationError("baselines line " + std::to_string(lineno) + ": expected 6 fields, got " +
                                  std::to_string(fields.size()));
        }
        BaselineRow row;
        try {
            row.dimension = dimension_from_label(trim(fields[0]));
            row.group = trim(fields[1]);
            row.instrument = instrument_from_label(trim(fields[2]));
        } catch (const ValidationError& e) {
            throw ValidationError("baselines line " + std::to_string(lineno) + ": " + e.what());
        }
        try {
            row.gt_mean = std::stod(trim(fields[3]));
        } catch (const std::exception&) {
            throw ValidationError("baselines line " + std::to_string(lineno) + ": non-numeric gt_mean \"" +
                                  trim(fields[3]) + "\"");
        }
        const std::string sd_text = trim(fields[4]);
        if (!sd_text.empty()) {
            double sd = 0.0;
            try {
                sd = std::stod(sd_text);
            } catch (const std::exception&) {
                throw ValidationError("baselines line " + std::to_string(lineno) +
                                      ": non-numeric gt_sd \"" + sd_text + "\"");
            }
            if (sd <= 0.0) {
                throw ValidationError("baselines line " + std::to_string(lineno) + ": gt_sd must be > 0");
            }
            row.gt_sd = sd;
        }
        row.source = trim(fields[5]);

        const auto& spec = instrument_spec(row.instrument);
        if (row.gt_mean < 0.0 || row.gt_mean > spec.total_max) {
            throw ValidationError("baselines line " + std::to_string(lineno) + ": gt_mean " +
                                  std::to_string(row.gt_mean) + " outside " + to_label(row.instrument) +
                                  " score range");
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

// ============================================================================
// CONFIG
// ============================================================================

void AuditConfig::validate() const {
    if (!(alpha > 0.0 && alpha < 1.0)) throw ValidationError("config: alpha must be in (0,1)");
    if (permutation_iterations < 100) {
        throw ValidationError("config: permutation_iterations must be >= 100");
    }
    if (workers < 1) throw ValidationError("config: workers must be >= 1");
    if (pcl5_cut < 0 || pcl5_cut > instrument_spec(InstrumentId::PCL5).total_max) {
        throw ValidationError("config: pcl5_cut out of range");
    }
    if (min_group_n < 2 || noise_min_n < 4 || intersect_min_n < 2) {
        throw ValidationError("config: group size floors too small");
    }
    static const std::set<std::string> kSections = {"rigidity", "stability", "network",
                                                    "logic", "calibration"};
    for (const auto& s : sections) {
        if (!kSections.count(s)) throw ValidationError("config: unknown section \"" + s + "\"");
    }
    std::set<std::string> family_names;
    for (const auto& f : families) {
        if (!family_names.insert(f.name).second) {
            throw ValidationError("config: duplicate family \"" + f.name + "\"");
        }
    }
}

AuditConfig parse_config(std::istream& in, const std::string& origin) {
    AuditConfig cfg;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ValidationError(origin + " line " + std::to_string(lineno) + ": expected key = value");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        try {
            if (key == "alpha") cfg.alpha = std::stod(value);
            else if (key == "permutation_iterations") cfg.permutation_iterations = std::stoi(value);
            else if (key == "reference_group") cfg.reference_group = value;
            else if (key == "reference_gender") cfg.reference_gender = value;
            else if (key == "reference_ses") cfg.reference_ses = value;
            else if (key == "reference_relationship") cfg.reference_relationship = value;
            else if (key == "seed" || key == "rng_seed") cfg.rng_seed = std::stoull(value);
            else if (key == "within_run_pairing") {
                if (value != "DisjointConsecutive") {
                    throw ValidationError("unknown within_run_pairing \"" + value + "\"");
                }
                cfg.within_run_pairing = WithinRunPairing::DisjointConsecutive;
            } else if (key == "families") {
                cfg.families.clear();
                for (const auto& tok : split(value, ',')) {
                    const auto t = trim(tok);
                    if (t.empty()) continue;
                    const auto colon = t.find(':');
                    FamilySpec fam;
                    fam.name = trim(t.substr(0, colon));
                    if (colon != std::string::npos) {
                        const std::string corr = trim(t.substr(colon + 1));
                        if (corr == "BH") fam.correction = Correction::BH;
                        else if (corr == "Bonferroni") fam.correction = Correction::Bonferroni;
                        else throw ValidationError("unknown correction \"" + corr + "\"");
                    }
                    cfg.families.push_back(std::move(fam));
                }
            } else if (key == "records") cfg.records_path = value;
            else if (key == "baselines") cfg.baselines_path = value;
            else if (key == "out") cfg.out_dir = value;
            else if (key == "strict") cfg.strict = (value == "true" || value == "1");
            else if (key == "workers") cfg.workers = std::stoi(value);
            else if (key == "population_baseline") cfg.population_baseline = std::stod(value);
            else if (key == "pcl5_cut") cfg.pcl5_cut = std::stoi(value);
            else if (key == "min_group_n") cfg.min_group_n = std::stoi(value);
            else if (key == "noise_min_n") cfg.noise_min_n = std::stoi(value);
            else if (key == "intersect_min_n") cfg.intersect_min_n = std::stoi(value);
            else if (key == "low_n_warning") cfg.low_n_warning = std::stoi(value);
            else if (key == "symptom_band") cfg.symptom_band = std::stoi(value);
            else if (key == "sections") {
                cfg.sections.clear();
                for (const auto& tok : split(value, ',')) {
                    const auto t = trim(tok);
                    if (!t.empty()) cfg.sections.push_back(t);
                }
            } else {
                throw ValidationError("unknown key \"" + key + "\"");
            }
        } catch (const ValidationError&) {
            throw;
        } catch (const std::exception&) {
            throw ValidationError(origin + " line " + std::to_string(lineno) + ": bad value for " + key);
        }
    }
    return cfg;
}

// ============================================================================
// DATASET
// ============================================================================

Dataset Dataset::from_records(std::vector<PatientRecord> records, Provenance provenance) {
    Dataset ds;
    std::unordered_set<std::string> seen;
    seen.reserve(records.size());
    for (const auto& r : records) {
        if (!seen.insert(r.record_id).second) {
            throw ValidationError("duplicate record_id \"" + r.record_id + "\"");
        }
    }
    ds.records_ = std::move(records);
    ds.provenance_ = provenance;
    ds.provenance_.record_count = ds.records_.size();
    for (std::size_t i = 0; i < ds.records_.size(); ++i) {
        const auto& r = ds.records_[i];
        ds.index_[cohort_key(r)][r.instrument].push_back(i);
    }
    return ds;
}

std::uint64_t fnv1a_digest(const std::string& bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

Dataset parse_records(std::istream& in, bool strict) {
    std::vector<PatientRecord> records;
    std::string all;
    std::string line;
    std::size_t lineno = 0;
    std::unordered_set<std::string> seen;
    while (std::getline(in, line)) {
        ++lineno;
        all += line;
        all += '\n';
        if (trim(line).empty()) continue;
        PatientRecord rec;
        if (auto err = parse_record_line(line, strict, rec)) {
            throw ValidationError("records line " + std::to_string(lineno) + ": " + *err);
        }
        if (!seen.insert(rec.record_id).second) {
            throw ValidationError("records line " + std::to_string(lineno) + ": duplicate record_id \"" +
                                  rec.record_id + "\"");
        }
        records.push_back(std::move(rec));
    }
    Provenance prov;
    prov.digest = fnv1a_digest(all);
    return Dataset::from_records(std::move(records), prov);
}

ValidationReport scan_records(std::istream& in, bool strict) {
    ValidationReport report;
    std::string line;
    std::size_t lineno = 0;
    std::unordered_set<std::string> seen;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        PatientRecord rec;
        if (auto err = parse_record_line(line, strict, rec)) {
            report.issues.push_back({lineno, *err});
            ++report.dropped;
            continue;
        }
        if (!seen.insert(rec.record_id).second) {
            report.issues.push_back({lineno, "duplicate record_id \"" + rec.record_id + "\""});
            ++report.dropped;
            continue;
        }
        ++report.record_count;
    }
    return report;
}

std::string serialize_record(const PatientRecord& r) {
    json j = json::object();
    j["record_id"] = r.record_id;
    j["model"] = r.model;
    j["condition"] = to_label(r.condition);
    j["iteration"] = r.iteration;
    j["race"] = to_label(r.profile.race);
    j["gender"] = to_label(r.profile.gender);
    j["ses"] = to_label(r.profile.ses);
    j["relationship"] = to_label(r.profile.relationship);
    j["instrument"] = to_label(r.instrument);
    j["items"] = r.items;
    return j.dump();
}

std::string serialize_records(const std::vector<PatientRecord>& records) {
    std::string out;
    for (const auto& r : records) {
        out += serialize_record(r);
        out += '\n';
    }
    return out;
}

// ============================================================================
// CROSS-RUN MATCHING
// ============================================================================

MatchedPairs match_cross_run(const Dataset& dataset) {
    // Match key: (model, profile, instrument, iteration). std::map keeps the
    // output canonically ordered regardless of record order.
    using Key = std::tuple<std::string, DemographicProfile, InstrumentId, int>;
    std::map<Key, std::pair<std::vector<std::size_t>, std::vector<std::size_t>>> buckets;

    const auto& records = dataset.records();
    for (std::size_t i = 0; i < records.size(); ++i) {
        const auto& r = records[i];
        Key key{r.model, r.profile, r.instrument, r.iteration};
        if (r.condition == Condition::Clinical) {
            buckets[key].first.push_back(i);
        } else {
            buckets[key].second.push_back(i);
        }
    }

    MatchedPairs out;
    for (auto& [key, pair_lists] : buckets) {
        auto& [clinical, personal] = pair_lists;
        const std::size_t matched = std::min(clinical.size(), personal.size());
        for (std::size_t k = 0; k < matched; ++k) {
            out.pairs.emplace_back(clinical[k], personal[k]);
        }
        out.unmatched_clinical += clinical.size() - matched;
        out.unmatched_personal += personal.size() - matched;
    }
    return out;
}

}  // namespace simaudit

#include "simaudit/synth.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <istream>
#include <mutex>
#include <sstream>

#include <json.hpp>

#include "simaudit/errors.hpp"
#include "simaudit/rng.hpp"

namespace simaudit {

namespace {

// Latent-scale spacing of the ordinal thresholds. At scale 1 and a centered
// mean this spreads item mass across all categories without piling onto the
// extremes.
constexpr double kThresholdSpread = 0.8;
constexpr std::uint64_t kCalibrationSeed = 0x5CA1EB0C0FFEE123ULL;
constexpr std::size_t kCalibrationDraws = 20000;
constexpr int kMaxGatewayRedraws = 10000;
constexpr std::uint64_t kPairSalt = 0xC805511F1A9ULL;

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%g", v);
    return buf;
}

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

// Lower-triangular Cholesky; throws on non-PSD input.
stats::Matrix cholesky(const stats::Matrix& a, const std::string& what) {
    const std::size_t n = a.rows;
    stats::Matrix l(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
            double sum = a.at(i, j);
            for (std::size_t k = 0; k < j; ++k) sum -= l.at(i, k) * l.at(j, k);
            if (i == j) {
                if (sum <= 1e-10) {
                    throw ValidationError(what + ": correlation matrix is not positive definite");
                }
                l.at(i, i) = std::sqrt(sum);
            } else {
                l.at(i, j) = sum / l.at(j, j);
            }
        }
    }
    return l;
}

std::vector<double> thresholds_for(const InstrumentSpec& spec) {
    // item = #{thresholds <= latent}; K thresholds for K+1 categories.
    const int k = spec.item_max;  // item_min is 0 for every instrument
    std::vector<double> t(k);
    for (int i = 0; i < k; ++i) {
        t[i] = kThresholdSpread * (static_cast<double>(i) - (k - 1) / 2.0);
    }
    return t;
}

int discretize(double latent, const std::vector<double>& thresholds) {
    int item = 0;
    for (double t : thresholds) {
        if (latent >= t) ++item;
    }
    return item;
}

double expected_item(double mu, double scale, const std::vector<double>& thresholds) {
    double e = 0.0;
    for (double t : thresholds) e += normal_cdf((mu - t) / scale);
    return e;
}

// mu such that item_count * E[item] == target, by bisection (monotone in mu).
double solve_mu(double target, double scale, int item_count, const std::vector<double>& thresholds) {
    const double per_item = target / item_count;
    double lo = thresholds.front() - 12.0 * scale - 12.0;
    double hi = thresholds.back() + 12.0 * scale + 12.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (expected_item(mid, scale, thresholds) < per_item) {
            lo = mid;
        } else {
            hi = mid;
        }
        if (hi - lo < 1e-12) break;
    }
    return 0.5 * (lo + hi);
}

std::uint64_t copula_digest(const Copula& c) {
    std::string bytes(reinterpret_cast<const char*>(c.corr.data.data()),
                      c.corr.data.size() * sizeof(double));
    return fnv1a_digest(bytes);
}

struct Calibration {
    double mu = 0.0;
    double scale = 1.0;
};

struct CalibKey {
    InstrumentId instrument;
    std::uint64_t copula;
    double target;
    double vf;

    bool operator<(const CalibKey& o) const {
        return std::tie(instrument, copula, target, vf) <
               std::tie(o.instrument, o.copula, o.target, o.vf);
    }
};

class Calibrator {
public:
    Calibration calibrate(const InstrumentSpec& spec, const Copula& copula, double target,
                          double vf) {
        const CalibKey key{spec.id, copula_digest(copula), target, vf};
        std::lock_guard<std::mutex> lock(mutex_);
        if (auto it = cache_.find(key); it != cache_.end()) return it->second;
        const Calibration cal = compute(spec, copula, target, vf);
        cache_.emplace(key, cal);
        return cal;
    }

private:
    // Correlated unit-scale latents drawn once per (instrument, copula) with
    // a fixed seed, reused across all (target, vf) evaluations.
    const std::vector<double>& latents_for(const InstrumentSpec& spec, const Copula& copula) {
        const auto key = std::make_pair(spec.id, copula_digest(copula));
        if (auto it = latent_cache_.find(key); it != latent_cache_.end()) return it->second;

        const int m = spec.item_count;
        const stats::Matrix l = cholesky(copula.corr, "copula " + copula.id);
        Rng rng(derive_seed(kCalibrationSeed,
                            {static_cast<std::uint64_t>(spec.id), copula_digest(copula)}));
        std::vector<double> latents(kCalibrationDraws * m);
        std::vector<double> z(m);
        for (std::size_t d = 0; d < kCalibrationDraws; ++d) {
            for (int j = 0; j < m; ++j) z[j] = rng.next_normal();
            for (int j = 0; j < m; ++j) {
                double v = 0.0;
                for (int k = 0; k <= j; ++k) v += l.at(j, k) * z[k];
                latents[d * m + j] = v;
            }
        }
        return latent_cache_.emplace(key, std::move(latents)).first->second;
    }

    double realized_sd(const InstrumentSpec& spec, const std::vector<double>& latents, double mu,
                       double scale, const std::vector<double>& thresholds) const {
        const int m = spec.item_count;
        double sum = 0.0, sum2 = 0.0;
        for (std::size_t d = 0; d < kCalibrationDraws; ++d) {
            int total = 0;
            for (int j = 0; j < m; ++j) {
                total += discretize(mu + scale * latents[d * m + j], thresholds);
            }
            sum += total;
            sum2 += static_cast<double>(total) * total;
        }
        const double n = static_cast<double>(kCalibrationDraws);
        const double var = (sum2 - sum * sum / n) / (n - 1.0);
        return std::sqrt(std::max(var, 0.0));
    }

    Calibration compute(const InstrumentSpec& spec, const Copula& copula, double target,
                        double vf) {
        const auto thresholds = thresholds_for(spec);
        const auto& latents = latents_for(spec, copula);

        const double mu_ref = solve_mu(target, 1.0, spec.item_count, thresholds);
        const double sd_ref = realized_sd(spec, latents, mu_ref, 1.0, thresholds);
        if (sd_ref <= 0.0) {
            throw ValidationError("generator calibration: degenerate reference SD for " +
                                  to_label(spec.id));
        }
        const double target_sd = vf * sd_ref;

        Calibration cal;
        cal.scale = vf;
        for (int iter = 0; iter < 20; ++iter) {
            cal.mu = solve_mu(target, cal.scale, spec.item_count, thresholds);
            const double sd = realized_sd(spec, latents, cal.mu, cal.scale, thresholds);
            if (sd <= 0.0) {
                cal.scale *= 2.0;
                continue;
            }
            const double ratio = target_sd / sd;
            if (std::abs(ratio - 1.0) < 0.004) break;
            cal.scale *= ratio;
        }
        cal.mu = solve_mu(target, cal.scale, spec.item_count, thresholds);
        return cal;
    }

    std::mutex mutex_;
    std::map<CalibKey, Calibration> cache_;
    std::map<std::pair<InstrumentId, std::uint64_t>, std::vector<double>> latent_cache_;
};

bool violates_gateway(const std::vector<int>& items, int total) {
    return total >= 10 && items[0] <= 1 && items[1] <= 1;
}

}  // namespace

// ============================================================================
// COPULAS
// ============================================================================

Copula identity_copula(int dim) {
    Copula c;
    c.id = "identity";
    c.corr = stats::Matrix(dim, dim);
    for (int i = 0; i < dim; ++i) c.corr.at(i, i) = 1.0;
    return c;
}

Copula equicorrelated_copula(int dim, double rho) {
    if (rho < 0.0 || rho >= 1.0) {
        throw ValidationError("equicorrelated copula: rho must be in [0,1)");
    }
    Copula c;
    c.id = "equicorrelated:" + format_double(rho);
    c.corr = stats::Matrix(dim, dim);
    for (int i = 0; i < dim; ++i) {
        for (int j = 0; j < dim; ++j) c.corr.at(i, j) = (i == j) ? 1.0 : rho;
    }
    return c;
}

Copula perturbed_copula(int dim, double rho, int pair_count, double delta) {
    if (pair_count < 1 || 2 * pair_count > dim) {
        throw ValidationError("perturbed copula: pair_count must fit in the dimension");
    }
    Copula c = equicorrelated_copula(dim, rho);
    c.id = "perturbed:" + format_double(rho) + ":" + std::to_string(pair_count) + ":" +
           format_double(delta);
    for (int p = 0; p < pair_count; ++p) {
        const int i = 2 * p, j = 2 * p + 1;
        const double v = rho + delta;
        if (v <= -1.0 || v >= 1.0) {
            throw ValidationError("perturbed copula: entry " + format_double(v) + " outside (-1,1)");
        }
        c.corr.at(i, j) = v;
        c.corr.at(j, i) = v;
    }
    cholesky(c.corr, "copula " + c.id);  // PSD check
    return c;
}

Copula parse_copula(const std::string& text, int dim) {
    const auto parts = split(text, ':');
    try {
        if (parts[0] == "identity" && parts.size() == 1) return identity_copula(dim);
        if (parts[0] == "equicorrelated" && parts.size() == 2) {
            return equicorrelated_copula(dim, std::stod(parts[1]));
        }
        if (parts[0] == "perturbed" && parts.size() == 4) {
            return perturbed_copula(dim, std::stod(parts[1]), std::stoi(parts[2]),
                                    std::stod(parts[3]));
        }
    } catch (const ValidationError&) {
        throw;
    } catch (const std::exception&) {
        throw ValidationError("bad copula descriptor \"" + text + "\"");
    }
    throw ValidationError("bad copula descriptor \"" + text + "\"");
}

// ============================================================================
// SPEC
// ============================================================================

const CohortParams& SynthSpec::cohort_params(const DemographicProfile& p, InstrumentId id) const {
    const auto it = params.find({p, id});
    if (it == params.end()) {
        throw ValidationError("synth spec: no parameters for " + profile_label(p) + " / " +
                              to_label(id));
    }
    return it->second;
}

void SynthSpec::validate() const {
    if (iterations < 1) throw ValidationError("synth spec: iterations must be >= 1");
    if (models.empty()) throw ValidationError("synth spec: at least one model required");
    if (conditions.empty()) throw ValidationError("synth spec: at least one condition required");
    if (instruments.empty()) throw ValidationError("synth spec: at least one instrument required");
    if (profiles.empty()) throw ValidationError("synth spec: at least one profile required");

    for (const auto& profile : profiles) {
        for (InstrumentId id : instruments) {
            const auto& p = cohort_params(profile, id);
            const auto& spec = instrument_spec(id);
            const double effective = p.target_mean + p.bias_offset;
            if (!(effective > 0.0 && effective < spec.total_max)) {
                throw ValidationError("synth spec: effective target mean " + format_double(effective) +
                                      " outside (0," + std::to_string(spec.total_max) + ") for " +
                                      to_label(id));
            }
            if (!(p.variance_factor > 0.0)) {
                throw ValidationError("synth spec: variance_factor must be > 0");
            }
            if (static_cast<int>(p.copula.corr.rows) != spec.item_count ||
                static_cast<int>(p.copula.corr.cols) != spec.item_count) {
                throw ValidationError("synth spec: copula dimension != item count for " + to_label(id));
            }
            cholesky(p.copula.corr, "copula " + p.copula.id);
            if (p.crossing_probability &&
                (*p.crossing_probability < 0.0 || *p.crossing_probability > 1.0)) {
                throw ValidationError("synth spec: crossing_probability outside [0,1]");
            }
        }
    }
}

namespace {

struct CohortOverride {
    std::optional<Race> race;
    std::optional<Gender> gender;
    std::optional<Ses> ses;
    std::optional<Relationship> relationship;
    std::map<std::string, std::string> values;

    bool matches(const DemographicProfile& p) const {
        return (!race || *race == p.race) && (!gender || *gender == p.gender) &&
               (!ses || *ses == p.ses) && (!relationship || *relationship == p.relationship);
    }
};

// target_mean / copula keys may carry an instrument suffix
// ("target_mean_PHQ8"); unsuffixed keys apply to every instrument.
void apply_param(CohortParams& p, InstrumentId id, const std::string& key,
                 const std::string& value, int item_count) {
    const std::string suffix = "_" + to_label(id);
    auto matches = [&](const std::string& base) {
        return key == base || key == base + suffix;
    };
    const bool other_suffix = key.find("_PHQ8") != std::string::npos ||
                              key.find("_GAD7") != std::string::npos ||
                              key.find("_AUDITC") != std::string::npos ||
                              key.find("_PCL5") != std::string::npos;

    try {
        if (matches("target_mean")) p.target_mean = std::stod(value);
        else if (matches("copula")) p.copula = parse_copula(value, item_count);
        else if (key == "variance_factor") p.variance_factor = std::stod(value);
        else if (key == "bias_offset") p.bias_offset = std::stod(value);
        else if (key == "gateway_compliant") p.gateway_compliant = (value == "true" || value == "1");
        else if (key == "crossing_probability") p.crossing_probability = std::stod(value);
        else if (!other_suffix) throw ValidationError("synth spec: unknown cohort key \"" + key + "\"");
    } catch (const ValidationError&) {
        throw;
    } catch (const std::exception&) {
        throw ValidationError("synth spec: bad value for " + key);
    }
}

}  // namespace

SynthSpec parse_synth_spec(std::istream& in) {
    SynthSpec spec;
    spec.profiles = all_profiles();

    std::map<std::string, std::string> defaults;
    std::vector<CohortOverride> overrides;
    std::string section;  // "", "defaults", or "cohort"
    bool listed_profiles = false;

    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;

        if (line.front() == '[') {
            if (line == "[defaults]") {
                section = "defaults";
            } else if (line == "[cohort]") {
                section = "cohort";
                overrides.emplace_back();
            } else {
                throw ValidationError("synth spec line " + std::to_string(lineno) +
                                      ": unknown section " + line);
            }
            continue;
        }

        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ValidationError("synth spec line " + std::to_string(lineno) +
                                  ": expected key = value");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));

        try {
            if (section.empty()) {
                if (key == "seed" || key == "rng_seed") spec.rng_seed = std::stoull(value);
                else if (key == "iterations") spec.iterations = std::stoi(value);
                else if (key == "models") {
                    spec.models.clear();
                    for (const auto& m : split(value, ',')) {
                        if (!trim(m).empty()) spec.models.push_back(trim(m));
                    }
                } else if (key == "conditions") {
                    spec.conditions.clear();
                    for (const auto& c : split(value, ',')) {
                        if (!trim(c).empty()) spec.conditions.push_back(condition_from_label(trim(c)));
                    }
                } else if (key == "instruments") {
                    spec.instruments.clear();
                    for (const auto& i : split(value, ',')) {
                        if (!trim(i).empty()) spec.instruments.push_back(instrument_from_label(trim(i)));
                    }
                } else if (key == "profiles") {
                    if (value == "all") {
                        spec.profiles = all_profiles();
                    } else if (value == "listed") {
                        spec.profiles.clear();
                        listed_profiles = true;
                    } else {
                        throw ValidationError("profiles must be \"all\" or \"listed\"");
                    }
                } else {
                    throw ValidationError("unknown top-level key \"" + key + "\"");
                }
            } else if (section == "defaults") {
                defaults[key] = value;
            } else {  // cohort
                auto& ov = overrides.back();
                if (key == "race") ov.race = race_from_label(value);
                else if (key == "gender") ov.gender = gender_from_label(value);
                else if (key == "ses") ov.ses = ses_from_label(value);
                else if (key == "relationship") ov.relationship = relationship_from_label(value);
                else ov.values[key] = value;
            }
        } catch (const ValidationError& e) {
            throw ValidationError("synth spec line " + std::to_string(lineno) + ": " + e.what());
        } catch (const std::exception&) {
            throw ValidationError("synth spec line " + std::to_string(lineno) + ": bad value for " + key);
        }
    }

    if (listed_profiles) {
        // Fully-specified [cohort] blocks become the profile list.
        for (const auto& ov : overrides) {
            if (!(ov.race && ov.gender && ov.ses && ov.relationship)) {
                throw ValidationError(
                    "synth spec: with profiles = listed every [cohort] block needs race, gender, "
                    "ses, and relationship");
            }
            DemographicProfile p{*ov.race, *ov.gender, *ov.ses, *ov.relationship};
            if (std::find(spec.profiles.begin(), spec.profiles.end(), p) == spec.profiles.end()) {
                spec.profiles.push_back(p);
            }
        }
        std::sort(spec.profiles.begin(), spec.profiles.end());
    }

    for (const auto& profile : spec.profiles) {
        for (InstrumentId id : spec.instruments) {
            const int items = instrument_spec(id).item_count;
            CohortParams p;
            p.copula = identity_copula(items);
            for (const auto& [key, value] : defaults) apply_param(p, id, key, value, items);
            for (const auto& ov : overrides) {
                if (!ov.matches(profile)) continue;
                for (const auto& [key, value] : ov.values) apply_param(p, id, key, value, items);
            }
            spec.params[{profile, id}] = std::move(p);
        }
    }

    spec.validate();
    return spec;
}

// ============================================================================
// GENERATION
// ============================================================================

Dataset generate(const SynthSpec& spec) {
    spec.validate();
    Calibrator calibrator;

    // Precompute per (profile, instrument): calibration + Cholesky factor.
    struct Prepared {
        Calibration cal;
        stats::Matrix chol;
        std::vector<double> thresholds;
    };
    std::map<std::pair<DemographicProfile, InstrumentId>, Prepared> prep;
    for (const auto& profile : spec.profiles) {
        for (InstrumentId id : spec.instruments) {
            const auto& params = spec.cohort_params(profile, id);
            const auto& ispec = instrument_spec(id);
            Prepared p;
            p.thresholds = thresholds_for(ispec);
            p.chol = cholesky(params.copula.corr, "copula " + params.copula.id);
            p.cal = calibrator.calibrate(ispec, params.copula,
                                         params.target_mean + params.bias_offset,
                                         params.variance_factor);
            prep.emplace(std::make_pair(profile, id), std::move(p));
        }
    }

    std::vector<PatientRecord> records;
    records.reserve(spec.profiles.size() * spec.models.size() * spec.conditions.size() *
                    spec.instruments.size() * static_cast<std::size_t>(spec.iterations));

    for (std::size_t ci = 0; ci < spec.profiles.size(); ++ci) {
        const auto& profile = spec.profiles[ci];
        for (std::size_t mi = 0; mi < spec.models.size(); ++mi) {
            for (std::size_t di = 0; di < spec.conditions.size(); ++di) {
                const Condition cond = spec.conditions[di];
                for (std::size_t ii = 0; ii < spec.instruments.size(); ++ii) {
                    const InstrumentId instr = spec.instruments[ii];
                    const auto& params = spec.cohort_params(profile, instr);
                    const auto& ispec = instrument_spec(instr);
                    const auto& p = prep.at({profile, instr});
                    const int m = ispec.item_count;

                    for (int t = 1; t <= spec.iterations; ++t) {
                        PatientRecord rec;
                        rec.model = spec.models[mi];
                        rec.condition = cond;
                        rec.iteration = t;
                        rec.profile = profile;
                        rec.instrument = instr;

                        char idbuf[96];
                        std::snprintf(idbuf, sizeof(idbuf), "synth-c%03zu-m%02zu-%s-%s-i%03d", ci,
                                      mi, to_label(cond).c_str(), to_label(instr).c_str(), t);
                        rec.record_id = idbuf;

                        if (params.crossing_probability && instr == InstrumentId::PHQ8) {
                            // Threshold-pair mode: the clinical record sits one
                            // point below the binary cut; the personal record
                            // crosses it with the planted probability. The
                            // Bernoulli comes from a condition-independent seed
                            // so both sides of a pair agree.
                            rec.items = {2, 1, 1, 1, 1, 1, 1, 1};  // total 9, gateway-safe
                            Rng pair_rng(derive_seed(
                                spec.rng_seed, {kPairSalt, ci, mi, ii, static_cast<std::uint64_t>(t)}));
                            const bool cross = pair_rng.next_double() < *params.crossing_probability;
                            if (cond == Condition::Personal && cross) rec.items[2] += 1;
                        } else {
                            Rng rng(derive_seed(spec.rng_seed,
                                                {ci, mi, di, ii, static_cast<std::uint64_t>(t)}));
                            std::vector<double> z(m);
                            rec.items.assign(m, 0);
                            for (int attempt = 0;; ++attempt) {
                                if (attempt > kMaxGatewayRedraws) {
                                    throw ValidationError(
                                        "generator: gateway-compliant resampling did not converge for " +
                                        profile_label(profile));
                                }
                                for (int j = 0; j < m; ++j) z[j] = rng.next_normal();
                                int total = 0;
                                for (int j = 0; j < m; ++j) {
                                    double latent = 0.0;
                                    for (int k = 0; k <= j; ++k) latent += p.chol.at(j, k) * z[k];
                                    rec.items[j] =
                                        discretize(p.cal.mu + p.cal.scale * latent, p.thresholds);
                                    total += rec.items[j];
                                }
                                if (params.gateway_compliant && instr == InstrumentId::PHQ8 &&
                                    violates_gateway(rec.items, total)) {
                                    continue;
                                }
                                break;
                            }
                        }
                        rec.total = score_instrument(rec.items, ispec);
                        records.push_back(std::move(rec));
                    }
                }
            }
        }
    }

    Provenance prov;
    prov.digest = fnv1a_digest(serialize_records(records));
    return Dataset::from_records(std::move(records), prov);
}

// ============================================================================
// PLANTED TRUTH
// ============================================================================

PlantedTruth planted_truth(const SynthSpec& spec) {
    spec.validate();
    PlantedTruth truth;
    bool all_compliant = true;

    for (const auto& profile : spec.profiles) {
        for (InstrumentId id : spec.instruments) {
            const auto& p = spec.cohort_params(profile, id);
            PlantedCohort c;
            c.profile = profile;
            c.instrument = id;
            c.target_mean = p.target_mean;
            c.bias_offset = p.bias_offset;
            c.planted_si = p.variance_factor;
            c.gateway_compliant = p.gateway_compliant;
            c.copula_id = p.copula.id;
            truth.cohorts.push_back(std::move(c));
            if (id == InstrumentId::PHQ8 && !p.gateway_compliant) all_compliant = false;
        }
    }

    // Distances between the distinct copulas used per instrument, exact on
    // the specified latent matrices.
    for (InstrumentId id : spec.instruments) {
        std::vector<const Copula*> distinct;
        for (const auto& profile : spec.profiles) {
            const auto& c = spec.cohort_params(profile, id).copula;
            const bool known = std::any_of(distinct.begin(), distinct.end(),
                                           [&](const Copula* d) { return d->id == c.id; });
            if (!known) distinct.push_back(&c);
        }
        for (std::size_t a = 0; a < distinct.size(); ++a) {
            for (std::size_t b = a + 1; b < distinct.size(); ++b) {
                PlantedCopulaDistance d;
                d.instrument = id;
                d.copula_a = distinct[a]->id;
                d.copula_b = distinct[b]->id;
                d.frobenius = stats::frobenius_distance(distinct[a]->corr, distinct[b]->corr);
                truth.copula_distances.push_back(std::move(d));
            }
        }
    }

    if (all_compliant) truth.expected_gateway_violations = 0;
    return truth;
}

std::string planted_truth_json(const PlantedTruth& truth) {
    nlohmann::ordered_json j;
    j["cohorts"] = nlohmann::ordered_json::array();
    for (const auto& c : truth.cohorts) {
        nlohmann::ordered_json row;
        row["race"] = to_label(c.profile.race);
        row["gender"] = to_label(c.profile.gender);
        row["ses"] = to_label(c.profile.ses);
        row["relationship"] = to_label(c.profile.relationship);
        row["instrument"] = to_label(c.instrument);
        row["target_mean"] = c.target_mean;
        row["bias_offset"] = c.bias_offset;
        row["planted_si"] = c.planted_si;
        row["gateway_compliant"] = c.gateway_compliant;
        row["copula"] = c.copula_id;
        j["cohorts"].push_back(std::move(row));
    }
    j["copula_distances"] = nlohmann::ordered_json::array();
    for (const auto& d : truth.copula_distances) {
        nlohmann::ordered_json row;
        row["instrument"] = to_label(d.instrument);
        row["copula_a"] = d.copula_a;
        row["copula_b"] = d.copula_b;
        row["frobenius"] = d.frobenius;
        j["copula_distances"].push_back(std::move(row));
    }
    if (truth.expected_gateway_violations) {
        j["expected_gateway_violations"] = *truth.expected_gateway_violations;
    }
    return j.dump(2);
}

}  // namespace simaudit

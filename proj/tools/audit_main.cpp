// audit — epidemiological fidelity audits for simulated patient cohorts.
//
// Subcommands:
//   run       execute the audit battery and write reports
//   validate  schema/consistency diagnostics only
//   synth     generate a seeded synthetic cohort with planted truth
//
// Exit codes: 0 success, 2 validation failure, 3 audit infeasibility.

#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "simaudit/errors.hpp"
#include "simaudit/ingest.hpp"
#include "simaudit/report.hpp"
#include "simaudit/synth.hpp"
#include "simaudit/version.hpp"

namespace {

simaudit::AuditConfig load_config(const std::string& path) {
    if (path.empty()) return {};
    std::ifstream in(path);
    if (!in) throw simaudit::ValidationError("cannot open config file " + path);
    return simaudit::parse_config(in, path);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"epidemiological fidelity audits for simulated patient cohorts", "audit"};
    app.set_version_flag("--version", std::string("audit ") + simaudit::kToolVersion + " (format " +
                                          std::to_string(simaudit::kFormatVersion) + ")");
    app.require_subcommand(1);

    // ---- run ----------------------------------------------------------------
    auto* run = app.add_subcommand("run", "run the audit battery");
    std::string run_records, run_baselines, run_config, run_out;
    std::uint64_t run_seed = 0;
    int run_workers = 0;
    bool run_strict = false;
    run->add_option("--records", run_records, "records JSONL file");
    run->add_option("--baselines", run_baselines, "baselines CSV file");
    run->add_option("--config", run_config, "key=value config file");
    run->add_option("--out", run_out, "output directory");
    auto* seed_opt = run->add_option("--seed", run_seed, "master RNG seed");
    auto* workers_opt = run->add_option("--workers", run_workers, "worker threads");
    run->add_flag("--strict", run_strict, "reject unknown record fields");

    // ---- validate -------------------------------------------------------------
    auto* validate = app.add_subcommand("validate", "diagnose inputs without auditing");
    std::string val_records, val_baselines, val_config;
    bool val_strict = false;
    validate->add_option("--records", val_records, "records JSONL file");
    validate->add_option("--baselines", val_baselines, "baselines CSV file");
    validate->add_option("--config", val_config, "key=value config file");
    validate->add_flag("--strict", val_strict, "reject unknown record fields");

    // ---- synth ------------------------------------------------------------------
    auto* synth = app.add_subcommand("synth", "generate a synthetic cohort");
    std::string synth_spec_path, synth_out, synth_truth;
    synth->add_option("--spec", synth_spec_path, "generator spec file")->required();
    synth->add_option("--out", synth_out, "output records JSONL path")->required();
    synth->add_option("--truth", synth_truth, "also write the planted-truth JSON here");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run) {
            simaudit::AuditConfig cfg = load_config(run_config);
            if (!run_records.empty()) cfg.records_path = run_records;
            if (!run_baselines.empty()) cfg.baselines_path = run_baselines;
            if (!run_out.empty()) cfg.out_dir = run_out;
            if (seed_opt->count() > 0) cfg.rng_seed = run_seed;
            if (workers_opt->count() > 0) cfg.workers = run_workers;
            if (run_strict) cfg.strict = true;
            if (cfg.out_dir.empty()) {
                throw simaudit::ValidationError("no output directory (--out or config `out`)");
            }
            const auto outcome = simaudit::run_audit(cfg);
            for (const auto& w : outcome.warnings) std::cerr << "warning: " << w << "\n";
            std::cout << "wrote " << outcome.files_written.size() << " files to " << cfg.out_dir
                      << "\n";
            return 0;
        }
        if (*validate) {
            simaudit::AuditConfig cfg = load_config(val_config);
            if (!val_records.empty()) cfg.records_path = val_records;
            if (!val_baselines.empty()) cfg.baselines_path = val_baselines;
            if (val_strict) cfg.strict = true;
            const auto result = simaudit::validate_inputs(cfg);
            std::cout << result.text;
            return result.ok ? 0 : 2;
        }
        if (*synth) {
            std::ifstream in(synth_spec_path);
            if (!in) throw simaudit::ValidationError("cannot open spec file " + synth_spec_path);
            const auto spec = simaudit::parse_synth_spec(in);
            const auto dataset = simaudit::generate(spec);
            std::ofstream out(synth_out, std::ios::binary);
            if (!out) throw simaudit::ValidationError("cannot write " + synth_out);
            out << simaudit::serialize_records(dataset.records());
            if (!synth_truth.empty()) {
                std::ofstream truth_out(synth_truth, std::ios::binary);
                if (!truth_out) throw simaudit::ValidationError("cannot write " + synth_truth);
                truth_out << simaudit::planted_truth_json(simaudit::planted_truth(spec)) << "\n";
            }
            std::cout << "wrote " << dataset.records().size() << " records to " << synth_out
                      << "\n";
            return 0;
        }
    } catch (const simaudit::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const simaudit::InfeasibleError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

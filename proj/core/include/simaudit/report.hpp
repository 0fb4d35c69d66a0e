#pragma once

// Orchestration: run the configured audits over a dataset, collect every
// p-value into its hypothesis family, apply the configured multiple-
// comparison correction, and emit deterministic reports.
//
// Outputs (under the configured out directory):
//   report.json           full machine-readable report; the only
//                         non-deterministic field is "generated_at"
//   report.md             human-readable summary rendered from report.json
//   rigidity.csv, stability.csv, transitions.csv, fracture.csv,
//   network_divergence.csv, noise_floor.json, logic_audit.json,
//   bias.csv, intersectional.csv, paradox.csv, symptom_rates.csv

#include <string>
#include <vector>

#include "simaudit/ingest.hpp"

namespace simaudit {

struct AuditOutcome {
    std::string report_json;  // exact bytes of report.json
    std::string report_md;
    std::vector<std::string> files_written;
    std::vector<std::string> warnings;
};

// File-driven entry point: reads records/baselines per the config paths,
// runs the audits, writes all outputs into cfg.out_dir.
AuditOutcome run_audit(const AuditConfig& cfg);

// In-memory core. Writes files only when cfg.out_dir is nonempty.
AuditOutcome run_audit_on(const Dataset& dataset, const BaselineTable& baselines,
                          const AuditConfig& cfg);

struct ValidateResult {
    bool ok = false;
    std::string text;  // diagnostics, one issue per line, ending in a summary
};

// Schema/consistency diagnostics only; no audits are executed.
ValidateResult validate_inputs(const AuditConfig& cfg);

}  // namespace simaudit

#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "lanepatch/eval.hpp"
#include "lanepatch/gt_gen.hpp"
#include "lanepatch/io.hpp"
#include "lanepatch/synth.hpp"

namespace lanepatch {

/// Training GT for every lane that overlaps the grid; NoOverlap lanes are
/// dropped (they are untrainable and unmatchable).
std::vector<SparseLane> gen_gt_lanes(const std::vector<DenseLane>& lanes,
                                     const PresetGrid& grid, GtMode mode);

/// Applies endpoint patching to every sparse record that carries EP deltas.
std::vector<SparseLane> ep_infer_records(const std::vector<PredRecord>& records);

std::vector<std::pair<double, double>> parse_buckets(const std::string& spec);

/// Full evaluation of prediction records against dense ground truth,
/// aggregated over scenes. Returns the report as JSON.
nlohmann::json evaluate_lanes(const std::vector<DenseLane>& gt,
                              const std::vector<PredRecord>& pred, const EvalConfig& cfg,
                              const std::vector<std::pair<double, double>>& buckets,
                              const nlohmann::json& meta);

nlohmann::json eval_report_to_json(const EvalReport& report,
                                   const std::vector<LengthBucketStat>& buckets,
                                   const nlohmann::json& meta);

/// Banker's rounding to the given number of decimal digits.
double round_half_even(double value, int digits);

std::string report_table_markdown(const std::vector<nlohmann::json>& reports);
std::string report_table_csv(const std::vector<nlohmann::json>& reports);

/// Overrides SynthConfig fields from a JSON object ({"scenes": 10, ...}).
void apply_synth_overrides(const nlohmann::json& j, SynthConfig& cfg);

/// Executes a manifest: a seed plus a list of steps (synth, gen-gt, ep-infer,
/// eval, report) whose file paths are resolved inside out_dir. Per-step seeds
/// derive from the manifest seed and the step id.
void run_experiment(const std::string& manifest_path, const std::string& out_dir);

}  // namespace lanepatch

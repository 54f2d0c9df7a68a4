#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "lanepatch/attention.hpp"
#include "lanepatch/ep_post.hpp"
#include "lanepatch/pipeline.hpp"

using nlohmann::json;

namespace {

int thread_cap() {
  const char* env = std::getenv("LANEPATCH_THREADS");
  if (!env) return 0;
  const int n = std::atoi(env);
  return n > 0 ? n : 0;
}

void cmd_synth(const std::string& preset, uint64_t seed, int scenes,
               const std::string& config_path, const std::string& out) {
  lanepatch::SynthConfig cfg = preset == "apollosim-like"
                                   ? lanepatch::SynthConfig::apollosim_like(seed, scenes)
                                   : lanepatch::SynthConfig::openlane_like(seed, scenes);
  if (!config_path.empty()) {
    std::ifstream in(config_path);
    if (!in) throw lanepatch::Error(lanepatch::ErrorCode::InvalidConfig,
                                    "cannot open " + config_path);
    lanepatch::apply_synth_overrides(json::parse(in), cfg);
  }
  lanepatch::write_dense_lanes(out, lanepatch::generate_scene_set(cfg));
}

void cmd_gen_gt(const std::string& in, const std::string& out, const std::string& mode,
                int m, const std::string& range) {
  const auto colon = range.find(':');
  if (colon == std::string::npos) {
    throw lanepatch::Error(lanepatch::ErrorCode::InvalidConfig, "range must be start:end");
  }
  lanepatch::PresetGrid grid = lanepatch::make_grid(
      m, std::stod(range.substr(0, colon)), std::stod(range.substr(colon + 1)));
  auto lanes = lanepatch::read_dense_lanes(in);
  lanepatch::write_sparse_lanes(
      out, lanepatch::gen_gt_lanes(lanes, grid, lanepatch::gt_mode_from_string(mode)));
}

void cmd_eval(const std::string& gt_path, const std::string& pred_path, double iou,
              const std::string& report_path, const std::string& buckets_spec) {
  auto gt = lanepatch::read_dense_lanes(gt_path);
  auto pred = lanepatch::read_lane_records(pred_path);
  lanepatch::EvalConfig cfg = lanepatch::EvalConfig::standard();
  cfg.lane_iou = iou;
  std::vector<std::pair<double, double>> buckets;
  if (!buckets_spec.empty()) buckets = lanepatch::parse_buckets(buckets_spec);
  json report = lanepatch::evaluate_lanes(gt, pred, cfg, buckets, json());
  if (report_path.empty()) {
    std::cout << report.dump(2) << "\n";
  } else {
    lanepatch::atomic_write(report_path, report.dump(2) + "\n");
  }
}

void cmd_attn_bench(int n, int m, int c, int heads, uint64_t seed, bool as_json) {
  using Clock = std::chrono::steady_clock;
  auto feat = lanepatch::FeatureTensor::seeded(n, m, c, seed);
  auto weights = lanepatch::PlAttentionWeights::seeded(c, heads, seed);

  auto t0 = Clock::now();
  auto pla_out = lanepatch::pl_attention_forward(feat, weights);
  auto t1 = Clock::now();
  lanepatch::Matrix all_tokens(n * (m + 1), c);
  all_tokens.d = feat.data;
  auto msa_out = lanepatch::self_attention(weights.ppa, all_tokens);
  auto t2 = Clock::now();
  // Keep the outputs alive so the work cannot be elided.
  volatile float sink = pla_out.lane_feats.d[0] + msa_out.d[0];
  (void)sink;

  auto pla = lanepatch::flop_estimate(lanepatch::AttnKind::PLA, n, m, c, heads);
  auto msa = lanepatch::flop_estimate(lanepatch::AttnKind::MSA, n, m, c, heads);
  const double pla_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
  const double msa_ms = std::chrono::duration<double, std::milli>(t2 - t1).count();

  json j;
  j["n"] = n;
  j["m"] = m;
  j["c"] = c;
  j["heads"] = heads;
  j["convention"] = "multiply-accumulates; score and weighted-sum terms are the "
                    "attention-interaction cost, projections listed separately";
  j["pla"] = {{"projection_macs", pla.projection_macs},
              {"score_macs", pla.score_macs},
              {"weighted_sum_macs", pla.weighted_sum_macs},
              {"interaction_macs", pla.interaction_macs()},
              {"total_macs", pla.total_macs()},
              {"forward_ms", pla_ms}};
  j["msa"] = {{"projection_macs", msa.projection_macs},
              {"score_macs", msa.score_macs},
              {"weighted_sum_macs", msa.weighted_sum_macs},
              {"interaction_macs", msa.interaction_macs()},
              {"total_macs", msa.total_macs()},
              {"forward_ms", msa_ms}};
  j["interaction_ratio"] =
      static_cast<double>(msa.interaction_macs()) / pla.interaction_macs();
  if (as_json) {
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << "PLA interaction MACs: " << pla.interaction_macs() << " (" << pla_ms
              << " ms)\n"
              << "MSA interaction MACs: " << msa.interaction_macs() << " (" << msa_ms
              << " ms)\n"
              << "MSA/PLA ratio: " << j["interaction_ratio"].get<double>() << "\n";
  }
}

void cmd_report(const std::vector<std::string>& inputs, const std::string& out_md,
                const std::string& out_csv) {
  std::vector<json> reports;
  for (const auto& path : inputs) {
    std::ifstream in(path);
    if (!in) throw lanepatch::Error(lanepatch::ErrorCode::InvalidConfig, "cannot open " + path);
    reports.push_back(json::parse(in));
  }
  if (!out_md.empty()) {
    lanepatch::atomic_write(out_md, lanepatch::report_table_markdown(reports));
  }
  if (!out_csv.empty()) {
    lanepatch::atomic_write(out_csv, lanepatch::report_table_csv(reports));
  }
  if (out_md.empty() && out_csv.empty()) {
    std::cout << lanepatch::report_table_markdown(reports);
  }
}

}  // namespace

int main(int argc, char** argv) {
  (void)thread_cap();
  CLI::App app{"Sparse 3D-lane geometry, endpoint patching, and evaluation toolkit"};
  app.require_subcommand(1);

  auto* synth = app.add_subcommand("synth", "Generate a deterministic synthetic scene set");
  std::string preset = "openlane-like", synth_out, synth_config;
  uint64_t seed = 7;
  int scenes = 100;
  synth->add_option("--preset", preset, "openlane-like or apollosim-like")
      ->check(CLI::IsMember({"openlane-like", "apollosim-like"}));
  synth->add_option("--seed", seed);
  synth->add_option("--scenes", scenes);
  synth->add_option("--config", synth_config, "JSON file with config overrides");
  synth->add_option("--out", synth_out)->required();

  auto* gen = app.add_subcommand("gen-gt", "Generate training ground truth");
  std::string gen_in, gen_out, gen_mode = "short", gen_range = "3:103";
  int gen_m = 20;
  gen->add_option("--mode", gen_mode)
      ->check(CLI::IsMember({"short", "long", "persformer", "anchor", "patched"}));
  gen->add_option("--m", gen_m);
  gen->add_option("--range", gen_range, "grid range start:end");
  gen->add_option("--in", gen_in)->required();
  gen->add_option("--out", gen_out)->required();

  auto* ep = app.add_subcommand("ep-infer", "Apply endpoint patching to predictions");
  std::string ep_in, ep_out;
  ep->add_option("--pred", ep_in)->required();
  ep->add_option("--out", ep_out)->required();

  auto* ev = app.add_subcommand("eval", "Evaluate predictions against ground truth");
  std::string ev_gt, ev_pred, ev_report, ev_buckets;
  double ev_iou = 0.75;
  ev->add_option("--gt", ev_gt)->required();
  ev->add_option("--pred", ev_pred)->required();
  ev->add_option("--iou", ev_iou);
  ev->add_option("--report", ev_report, "report JSON path (stdout if omitted)");
  ev->add_option("--per-length-bucket", ev_buckets, "e.g. 0:20,20:40,40:103");

  auto* bench = app.add_subcommand("attn-bench", "PL-attention vs dense attention cost");
  int bn = 40, bm = 30, bc = 256, bheads = 4;
  uint64_t bseed = 7;
  bool bjson = false;
  bench->add_option("--n", bn);
  bench->add_option("--m", bm);
  bench->add_option("--c", bc);
  bench->add_option("--heads", bheads);
  bench->add_option("--seed", bseed);
  bench->add_flag("--json", bjson);

  auto* run = app.add_subcommand("run", "Run an experiment manifest");
  std::string run_manifest, run_out = "runs";
  run->add_option("manifest", run_manifest)->required();
  run->add_option("--out-dir", run_out);

  auto* rep = app.add_subcommand("report", "Render report JSONs as a table");
  std::vector<std::string> rep_inputs;
  std::string rep_md, rep_csv;
  rep->add_option("inputs", rep_inputs)->required();
  rep->add_option("--out-md", rep_md);
  rep->add_option("--out-csv", rep_csv);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*synth) cmd_synth(preset, seed, scenes, synth_config, synth_out);
    if (*gen) cmd_gen_gt(gen_in, gen_out, gen_mode, gen_m, gen_range);
    if (*ep) {
      auto records = lanepatch::read_lane_records(ep_in);
      lanepatch::write_sparse_lanes(ep_out, lanepatch::ep_infer_records(records));
    }
    if (*ev) cmd_eval(ev_gt, ev_pred, ev_iou, ev_report, ev_buckets);
    if (*bench) cmd_attn_bench(bn, bm, bc, bheads, bseed, bjson);
    if (*run) lanepatch::run_experiment(run_manifest, run_out);
    if (*rep) cmd_report(rep_inputs, rep_md, rep_csv);
  } catch (const lanepatch::Error& err) {
    std::cerr << "error: " << err.what() << "\n";
    return err.code() == lanepatch::ErrorCode::StepFailed ? 3 : 2;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 2;
  }
  return 0;
}

#include "lanepatch/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "lanepatch/ep_post.hpp"

namespace lanepatch {

using nlohmann::json;
namespace fs = std::filesystem;

std::vector<SparseLane> gen_gt_lanes(const std::vector<DenseLane>& lanes,
                                     const PresetGrid& grid, GtMode mode) {
  std::vector<SparseLane> out;
  out.reserve(lanes.size());
  for (const auto& lane : lanes) {
    try {
      out.push_back(generate_training_gt(lane, grid, mode));
    } catch (const Error& err) {
      if (err.code() != ErrorCode::NoOverlap) throw;
    }
  }
  return out;
}

std::vector<SparseLane> ep_infer_records(const std::vector<PredRecord>& records) {
  std::vector<SparseLane> out;
  out.reserve(records.size());
  for (const auto& rec : records) {
    if (!std::holds_alternative<SparseLane>(rec.lane)) {
      throw Error(ErrorCode::InvalidConfig, "ep-infer expects sparse lane records");
    }
    const SparseLane& lane = std::get<SparseLane>(rec.lane);
    if (rec.ep) {
      out.push_back(ep_patch_inference(lane, *rec.ep));
    } else {
      out.push_back(lane);
    }
  }
  return out;
}

std::vector<std::pair<double, double>> parse_buckets(const std::string& spec) {
  std::vector<std::pair<double, double>> buckets;
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto colon = item.find(':');
    if (colon == std::string::npos) {
      throw Error(ErrorCode::InvalidConfig, "bucket must be lo:hi, got " + item);
    }
    buckets.emplace_back(std::stod(item.substr(0, colon)), std::stod(item.substr(colon + 1)));
  }
  return buckets;
}

nlohmann::json eval_report_to_json(const EvalReport& report,
                                   const std::vector<LengthBucketStat>& buckets,
                                   const nlohmann::json& meta) {
  json j;
  j["recall"] = report.recall;
  j["precision"] = report.precision;
  j["f1_harmonic"] = report.f1_harmonic;
  j["f1_arith"] = report.f1_arith;
  j["x_err_near"] = report.x_err_near;
  j["x_err_far"] = report.x_err_far;
  j["z_err_near"] = report.z_err_near;
  j["z_err_far"] = report.z_err_far;
  j["tp"] = report.tp;
  j["gt_matched"] = report.gt_matched;
  j["pred_matched"] = report.pred_matched;
  j["n_gt"] = report.n_gt;
  j["n_pred"] = report.n_pred;
  j["total_matched_points"] = report.total_matched_points;
  j["flags"] = report.flags;
  if (!buckets.empty()) {
    json arr = json::array();
    for (const auto& b : buckets) {
      arr.push_back({{"lo", b.lo},
                     {"hi", b.hi},
                     {"recall", b.recall()},
                     {"precision", b.precision()},
                     {"f1", b.f1()},
                     {"n_gt", b.gt_total},
                     {"n_pred", b.pred_total}});
    }
    j["buckets"] = arr;
  }
  if (!meta.is_null()) j["meta"] = meta;
  return j;
}

nlohmann::json evaluate_lanes(const std::vector<DenseLane>& gt,
                              const std::vector<PredRecord>& pred, const EvalConfig& cfg,
                              const std::vector<std::pair<double, double>>& buckets,
                              const nlohmann::json& meta) {
  struct PredSamples {
    std::string scene_id;
    LaneSamples samples;
  };
  std::vector<PredSamples> pred_samples;
  pred_samples.reserve(pred.size());
  for (const auto& rec : pred) {
    PredSamples ps;
    if (std::holds_alternative<DenseLane>(rec.lane)) {
      const DenseLane& lane = std::get<DenseLane>(rec.lane);
      ps.scene_id = lane.scene_id;
      ps.samples = resample_for_eval(lane, cfg);
    } else {
      const SparseLane& lane = std::get<SparseLane>(rec.lane);
      ps.scene_id = lane.scene_id;
      ps.samples = resample_for_eval(lane, cfg);
    }
    pred_samples.push_back(std::move(ps));
  }

  auto gt_groups = group_by_scene(gt);
  std::unordered_map<std::string, std::vector<const LaneSamples*>> pred_by_scene;
  for (const auto& ps : pred_samples) pred_by_scene[ps.scene_id].push_back(&ps.samples);

  EvalAccumulator acc;
  acc.set_length_buckets(buckets);
  std::vector<std::string> seen;
  for (const auto& [scene_id, gt_ptrs] : gt_groups) {
    std::vector<LaneSamples> gs, ps;
    for (const DenseLane* lane : gt_ptrs) gs.push_back(resample_for_eval(*lane, cfg));
    auto it = pred_by_scene.find(scene_id);
    if (it != pred_by_scene.end()) {
      for (const LaneSamples* s : it->second) ps.push_back(*s);
    }
    acc.add(evaluate_scene(gs, ps, cfg));
    seen.push_back(scene_id);
  }
  // Prediction-only scenes still count against precision.
  for (const auto& [scene_id, samples] : pred_by_scene) {
    if (std::find(seen.begin(), seen.end(), scene_id) != seen.end()) continue;
    std::vector<LaneSamples> ps;
    for (const LaneSamples* s : samples) ps.push_back(*s);
    acc.add(evaluate_scene({}, ps, cfg));
  }
  return eval_report_to_json(acc.report(), acc.buckets(), meta);
}

double round_half_even(double value, int digits) {
  const double scale = std::pow(10.0, digits);
  const double v = value * scale;
  const double floor_v = std::floor(v);
  const double frac = v - floor_v;
  double r;
  if (frac > 0.5 + 1e-9) {
    r = floor_v + 1.0;
  } else if (frac < 0.5 - 1e-9) {
    r = floor_v;
  } else {
    r = std::fmod(floor_v, 2.0) == 0.0 ? floor_v : floor_v + 1.0;
  }
  return r / scale;
}

namespace {

std::string fmt(double value, int digits) {
  std::ostringstream out;
  out.setf(std::ios::fixed);
  out.precision(digits);
  out << round_half_even(value, digits);
  return out.str();
}

struct TableRow {
  int m{0};
  std::string mode;
  const json* report{nullptr};
};

std::vector<TableRow> collect_rows(const std::vector<json>& reports) {
  std::vector<TableRow> rows;
  for (const auto& r : reports) {
    TableRow row;
    if (r.contains("meta")) {
      row.m = r["meta"].value("M", 0);
      row.mode = r["meta"].value("mode", "");
    }
    row.report = &r;
    rows.push_back(row);
  }
  std::stable_sort(rows.begin(), rows.end(), [](const TableRow& a, const TableRow& b) {
    if (a.m != b.m) return a.m < b.m;
    return a.mode < b.mode;
  });
  return rows;
}

std::vector<std::string> row_cells(const TableRow& row) {
  const json& r = *row.report;
  return {std::to_string(row.m),
          row.mode,
          fmt(r["recall"].get<double>() * 100.0, 1),
          fmt(r["precision"].get<double>() * 100.0, 1),
          fmt(r["f1_harmonic"].get<double>() * 100.0, 1),
          fmt(r["x_err_near"].get<double>(), 3),
          fmt(r["x_err_far"].get<double>(), 3),
          fmt(r["z_err_near"].get<double>(), 3),
          fmt(r["z_err_far"].get<double>(), 3)};
}

const char* kHeader[] = {"M",      "mode",   "Rec",    "Pre",   "F1",
                         "X near", "X far",  "Z near", "Z far"};

}  // namespace

std::string report_table_markdown(const std::vector<json>& reports) {
  std::ostringstream out;
  out << "|";
  for (const char* h : kHeader) out << " " << h << " |";
  out << "\n|";
  for (size_t i = 0; i < std::size(kHeader); ++i) out << " --- |";
  out << "\n";
  for (const TableRow& row : collect_rows(reports)) {
    out << "|";
    for (const std::string& cell : row_cells(row)) out << " " << cell << " |";
    out << "\n";
  }
  return out.str();
}

std::string report_table_csv(const std::vector<json>& reports) {
  std::ostringstream out;
  for (size_t i = 0; i < std::size(kHeader); ++i) {
    out << (i ? "," : "") << kHeader[i];
  }
  out << "\n";
  for (const TableRow& row : collect_rows(reports)) {
    const auto cells = row_cells(row);
    for (size_t i = 0; i < cells.size(); ++i) out << (i ? "," : "") << cells[i];
    out << "\n";
  }
  return out.str();
}

void apply_synth_overrides(const json& j, SynthConfig& cfg) {
  if (j.contains("scenes")) cfg.scenes = j["scenes"].get<int>();
  if (j.contains("lanes_min")) cfg.lanes_min = j["lanes_min"].get<int>();
  if (j.contains("lanes_max")) cfg.lanes_max = j["lanes_max"].get<int>();
  if (j.contains("curvature_max")) cfg.curvature_max = j["curvature_max"].get<double>();
  if (j.contains("z_slope_max")) cfg.z_slope_max = j["z_slope_max"].get<double>();
  if (j.contains("lateral_spacing")) cfg.lateral_spacing = j["lateral_spacing"].get<double>();
  if (j.contains("dense_step")) cfg.dense_step = j["dense_step"].get<double>();
  if (j.contains("anchor_prob_short")) cfg.anchor_prob_short = j["anchor_prob_short"].get<double>();
  if (j.contains("anchor_prob_long")) cfg.anchor_prob_long = j["anchor_prob_long"].get<double>();
  if (j.contains("mid_start_max")) cfg.mid_start_max = j["mid_start_max"].get<double>();
  if (j.contains("length_hist")) {
    cfg.length_hist.clear();
    for (const auto& b : j["length_hist"]) {
      cfg.length_hist.push_back(LengthBucket{b.at("lo").get<double>(), b.at("hi").get<double>(),
                                             b.at("prob").get<double>()});
    }
  }
}

namespace {

uint64_t fnv1a(const std::string& s) {
  uint64_t h = 14695981039346656037ULL;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  return h;
}

SynthConfig synth_config_from_step(const json& step, uint64_t manifest_seed) {
  const std::string preset = step.value("preset", "openlane-like");
  const uint64_t seed = mix_seed(manifest_seed, fnv1a(step.at("id").get<std::string>()));
  SynthConfig cfg;
  if (preset == "openlane-like") {
    cfg = SynthConfig::openlane_like(seed, step.value("scenes", 100));
  } else if (preset == "apollosim-like") {
    cfg = SynthConfig::apollosim_like(seed, step.value("scenes", 100));
  } else {
    throw Error(ErrorCode::InvalidConfig, "unknown preset: " + preset);
  }
  apply_synth_overrides(step, cfg);
  return cfg;
}

std::pair<double, double> parse_range(const std::string& spec) {
  const auto colon = spec.find(':');
  if (colon == std::string::npos) {
    throw Error(ErrorCode::InvalidConfig, "range must be start:end, got " + spec);
  }
  return {std::stod(spec.substr(0, colon)), std::stod(spec.substr(colon + 1))};
}

}  // namespace

void run_experiment(const std::string& manifest_path, const std::string& out_dir) {
  std::ifstream in(manifest_path);
  if (!in) throw Error(ErrorCode::InvalidConfig, "cannot open manifest " + manifest_path);
  json manifest = json::parse(in);
  const uint64_t seed = manifest.value("seed", 0ULL);
  fs::create_directories(out_dir);
  const auto resolve = [&](const std::string& name) {
    return (fs::path(out_dir) / name).string();
  };

  for (const auto& step : manifest.value("steps", json::array())) {
    const std::string id = step.value("id", "?");
    try {
      const std::string op = step.at("op").get<std::string>();
      if (op == "synth") {
        SynthConfig cfg = synth_config_from_step(step, seed);
        write_dense_lanes(resolve(step.at("out").get<std::string>()),
                          generate_scene_set(cfg));
      } else if (op == "gen-gt") {
        auto lanes = read_dense_lanes(resolve(step.at("in").get<std::string>()));
        auto [lo, hi] = parse_range(step.value("range", "3:103"));
        PresetGrid grid = make_grid(step.value("m", 20), lo, hi);
        GtMode mode = gt_mode_from_string(step.at("mode").get<std::string>());
        write_sparse_lanes(resolve(step.at("out").get<std::string>()),
                           gen_gt_lanes(lanes, grid, mode));
      } else if (op == "ep-infer") {
        auto records = read_lane_records(resolve(step.at("in").get<std::string>()));
        write_sparse_lanes(resolve(step.at("out").get<std::string>()),
                           ep_infer_records(records));
      } else if (op == "eval") {
        auto gt = read_dense_lanes(resolve(step.at("gt").get<std::string>()));
        auto pred = read_lane_records(resolve(step.at("pred").get<std::string>()));
        EvalConfig cfg = EvalConfig::standard();
        if (step.contains("iou")) cfg.lane_iou = step["iou"].get<double>();
        std::vector<std::pair<double, double>> buckets;
        if (step.contains("per_length_bucket")) {
          buckets = parse_buckets(step["per_length_bucket"].get<std::string>());
        }
        json meta = step.value("row", json());
        json report = evaluate_lanes(gt, pred, cfg, buckets, meta);
        atomic_write(resolve(step.at("report").get<std::string>()), report.dump(2) + "\n");
      } else if (op == "report") {
        std::vector<json> reports;
        for (const auto& name : step.at("inputs")) {
          std::ifstream rin(resolve(name.get<std::string>()));
          if (!rin) throw Error(ErrorCode::StepFailed, "missing report " + name.get<std::string>());
          reports.push_back(json::parse(rin));
        }
        if (step.contains("out_md")) {
          atomic_write(resolve(step["out_md"].get<std::string>()),
                       report_table_markdown(reports));
        }
        if (step.contains("out_csv")) {
          atomic_write(resolve(step["out_csv"].get<std::string>()),
                       report_table_csv(reports));
        }
      } else {
        throw Error(ErrorCode::InvalidConfig, "unknown op: " + op);
      }
    } catch (const Error& err) {
      if (err.code() == ErrorCode::StepFailed) throw;
      throw Error(ErrorCode::StepFailed, "step " + id + " failed: " + err.what());
    } catch (const json::exception& err) {
      throw Error(ErrorCode::StepFailed, "step " + id + " failed: " + err.what());
    }
  }
}

}  // namespace lanepatch

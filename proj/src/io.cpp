#include "lanepatch/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace lanepatch {

using nlohmann::json;

namespace {

json point3_array(const std::vector<Point3>& pts) {
  json arr = json::array();
  for (const Point3& p : pts) arr.push_back({p.x, p.y, p.z});
  return arr;
}

std::vector<Point3> parse_point3_array(const json& arr, const std::string& what) {
  std::vector<Point3> pts;
  for (const auto& e : arr) {
    if (!e.is_array() || e.size() != 3) {
      throw Error(ErrorCode::ParseError, "bad 3-vector in " + what);
    }
    pts.push_back(Point3{e[0].get<double>(), e[1].get<double>(), e[2].get<double>()});
  }
  return pts;
}

DenseLane parse_dense(const json& j) {
  std::vector<Point3> pts = parse_point3_array(j.at("points"), "points");
  return DenseLane::create(j.at("scene_id").get<std::string>(),
                           j.at("lane_id").get<std::string>(),
                           j.value("category", 0), std::move(pts));
}

SparseLane parse_sparse(const json& j) {
  SparseLane lane;
  lane.scene_id = j.at("scene_id").get<std::string>();
  lane.lane_id = j.at("lane_id").get<std::string>();
  lane.category = j.value("category", 0);
  const json& g = j.at("grid");
  lane.grid = make_grid(g.at("m").get<int>(), g.at("start").get<double>(),
                        g.at("end").get<double>());
  lane.x = j.at("x").get<std::vector<double>>();
  lane.z = j.at("z").get<std::vector<double>>();
  for (const auto& v : j.at("vis")) lane.vis.push_back(v.get<bool>() ? 1 : 0);
  lane.y = j.contains("y") ? j.at("y").get<std::vector<double>>() : lane.grid.y_values();
  const size_t m = static_cast<size_t>(lane.grid.m);
  if (lane.x.size() != m || lane.z.size() != m || lane.vis.size() != m || lane.y.size() != m) {
    throw Error(ErrorCode::ParseError, "sparse arrays must have grid length");
  }
  if (j.contains("s") != j.contains("e")) {
    throw Error(ErrorCode::ParseError, "s and e must be present together");
  }
  if (j.contains("s")) {
    lane.s = parse_point3_array(j.at("s"), "s");
    lane.e = parse_point3_array(j.at("e"), "e");
    if (lane.s->size() != m || lane.e->size() != m) {
      throw Error(ErrorCode::ParseError, "s/e must have grid length");
    }
  }
  if (j.contains("flags")) {
    for (const auto& f : j.at("flags")) {
      if (f.get<std::string>() == "single_visible") lane.single_visible = true;
    }
  }
  lane.repair_visibility();
  return lane;
}

}  // namespace

std::string dense_lane_to_json(const DenseLane& lane) {
  json j;
  j["scene_id"] = lane.scene_id;
  j["lane_id"] = lane.lane_id;
  j["category"] = lane.category;
  j["points"] = point3_array(lane.points);
  return j.dump();
}

std::string sparse_lane_to_json(const SparseLane& lane) {
  json j;
  j["scene_id"] = lane.scene_id;
  j["lane_id"] = lane.lane_id;
  j["category"] = lane.category;
  j["grid"] = {{"m", lane.grid.m}, {"start", lane.grid.range_start}, {"end", lane.grid.range_end}};
  j["x"] = lane.x;
  j["y"] = lane.y;
  j["z"] = lane.z;
  json vis = json::array();
  for (uint8_t v : lane.vis) vis.push_back(v != 0);
  j["vis"] = vis;
  if (lane.s) {
    j["s"] = point3_array(*lane.s);
    j["e"] = point3_array(*lane.e);
  }
  if (lane.single_visible) j["flags"] = {"single_visible"};
  return j.dump();
}

std::vector<DenseLane> read_dense_lanes(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ParseError, "cannot open " + path);
  std::vector<DenseLane> lanes;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    lanes.push_back(parse_dense(json::parse(line)));
  }
  return lanes;
}

std::vector<PredRecord> read_lane_records(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ParseError, "cannot open " + path);
  std::vector<PredRecord> records;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    json j = json::parse(line);
    PredRecord rec;
    if (j.contains("grid")) {
      SparseLane lane = parse_sparse(j);
      if (j.contains("s_hat") && j.contains("e_hat")) {
        EpPrediction ep;
        ep.s_hat = parse_point3_array(j.at("s_hat"), "s_hat");
        ep.e_hat = parse_point3_array(j.at("e_hat"), "e_hat");
        rec.ep = std::move(ep);
      } else if (lane.s && lane.e) {
        // Patched ground truth doubles as its own oracle EP prediction.
        rec.ep = EpPrediction{*lane.s, *lane.e};
      }
      rec.lane = std::move(lane);
    } else {
      rec.lane = parse_dense(j);
    }
    records.push_back(std::move(rec));
  }
  return records;
}

void write_dense_lanes(const std::string& path, const std::vector<DenseLane>& lanes) {
  std::ostringstream out;
  for (const auto& lane : lanes) out << dense_lane_to_json(lane) << '\n';
  atomic_write(path, out.str());
}

void write_sparse_lanes(const std::string& path, const std::vector<SparseLane>& lanes) {
  std::ostringstream out;
  for (const auto& lane : lanes) out << sparse_lane_to_json(lane) << '\n';
  atomic_write(path, out.str());
}

void atomic_write(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::StepFailed, "cannot write " + tmp);
    out << content;
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    throw Error(ErrorCode::StepFailed, "cannot rename into " + path);
  }
}

}  // namespace lanepatch

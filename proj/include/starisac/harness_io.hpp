#pragma once

// JSON emission of full run traces; separate header so only the CLI and the
// IO tests pull in the JSON dependency.

#include <fstream>

#include <json.hpp>

#include "starisac/harness.hpp"

namespace starisac {

inline nlohmann::json stage_to_json(const StageResult& st) {
  nlohmann::json j;
  j["status"] = to_string(st.status);
  j["converged"] = st.converged;
  j["iterations"] = st.iterations;
  j["objective_trace"] = st.objective_trace;
  j["bound_rate"] = st.bound_rate;
  j["objective_pre_binarization"] = st.objective_pre_binarization;
  j["objective_post_binarization"] = st.objective_post_binarization;
  if (!st.diagnostics.empty()) j["diagnostics"] = st.diagnostics;
  std::vector<double> b(st.star.b.data(), st.star.b.data() + st.star.b.size());
  j["partition"] = b;
  return j;
}

inline nlohmann::json record_to_json(const RunRecord& r) {
  nlohmann::json j;
  j["scheme"] = r.scheme;
  j["seed"] = r.seed;
  j["axis_value"] = r.axis_value;
  j["config_hash"] = r.config_hash;
  j["status"] = to_string(r.status);
  j["rate_total"] = r.rate_total;
  j["rate_prep"] = r.rate_prep;
  j["rate_comm"] = r.rate_comm;
  j["assnr"] = r.slot.assnr;
  j["assnr_min"] = r.assnr_min;
  j["power_prep"] = r.slot.power_prep;
  j["power_comm"] = r.slot.power_comm;
  j["iters"] = r.iters;
  j["wall_ms"] = r.wall_ms;
  j["feasible"] = r.feasible;
  if (!r.slot.feasibility_report.empty()) j["feasibility_report"] = r.slot.feasibility_report;
  j["mc_samples"] = r.slot.mc_samples;
  j["prep"] = stage_to_json(r.slot.prep);
  j["comm"] = stage_to_json(r.slot.comm);
  return j;
}

inline void write_json(const std::vector<RunRecord>& records, std::ostream& os) {
  nlohmann::json j = nlohmann::json::array();
  for (const auto& r : records) j.push_back(record_to_json(r));
  os << j.dump(2) << "\n";
}

inline void write_outputs(const std::vector<RunRecord>& records, const std::string& prefix) {
  {
    std::ofstream f(prefix + ".csv");
    if (!f) throw std::runtime_error("cannot open " + prefix + ".csv");
    write_csv(records, f);
  }
  {
    std::ofstream f(prefix + ".json");
    if (!f) throw std::runtime_error("cannot open " + prefix + ".json");
    write_json(records, f);
  }
}

}  // namespace starisac

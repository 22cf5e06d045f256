#pragma once

#include <atomic>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "starisac/protocol.hpp"

namespace starisac {

// Deterministic textual form of the effective configuration; doubles as the
// config-hash input so identical settings always hash identically.
inline std::string serialize_config(const SystemConfig& c) {
  std::ostringstream os;
  auto num = [&](const char* k, double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    os << k << " = " << buf << "\n";
  };
  os << "[scenario]\n";
  os << "bs_antennas = " << c.bs_antennas << "\n";
  os << "sensor_elements = " << c.sensor_elements << "\n";
  os << "users_indoor = " << c.users_indoor << "\n";
  os << "users_outdoor = " << c.users_outdoor << "\n";
  os << "star_nx = " << c.star_nx << "\n";
  os << "star_nz = " << c.star_nz << "\n";
  num("pmax_dbm", c.pmax_dbm);
  num("noise_user_dbm", c.noise_user_dbm);
  num("noise_sensor_dbm", c.noise_sensor_dbm);
  num("rice_h1", c.rice_h1);
  num("rice_h2_in", c.rice_h2_in);
  num("rice_h2_out", c.rice_h2_out);
  num("pathloss_ref_db", c.pathloss_ref_db);
  num("pathloss_ref_dist", c.pathloss_ref_dist);
  num("pl_exp_bs_star", c.pl_exp_bs_star);
  num("pl_exp_star_in", c.pl_exp_star_in);
  num("pl_exp_star_out", c.pl_exp_star_out);
  num("sens_threshold_db", c.sens_threshold_db);
  os << "n_part = " << c.n_part << "\n";
  num("alpha_db", c.alpha_db);
  num("eta", c.eta);
  os << "[geometry]\n";
  num("bs_x", c.bs_x);
  num("bs_y", c.bs_y);
  num("bs_z", c.bs_z);
  num("user_r_min", c.user_r_min);
  num("user_r_max", c.user_r_max);
  os << "[angle_error]\n";
  num("sigma_elev_prep_deg", c.sigma_elev_prep_deg);
  num("sigma_azim_prep_deg", c.sigma_azim_prep_deg);
  num("sigma_elev_comm_deg", c.sigma_elev_comm_deg);
  num("sigma_azim_comm_deg", c.sigma_azim_comm_deg);
  os << "use_error_statistics = " << (c.use_error_statistics ? "true" : "false") << "\n";
  os << "[monte_carlo]\n";
  os << "mc_samples = " << c.mc_samples << "\n";
  os << "mc_samples_max = " << c.mc_samples_max << "\n";
  num("mc_split_tol", c.mc_split_tol);
  os << "eval_draws = " << c.eval_draws << "\n";
  os << "[solver]\n";
  num("sdp_tol", c.sdp_tol);
  os << "sdp_max_iter = " << c.sdp_max_iter << "\n";
  os << "admm_max_iter = " << c.admm_max_iter << "\n";
  num("qcqp_tol", c.qcqp_tol);
  num("sca_tol", c.sca_tol);
  os << "sca_max_iter = " << c.sca_max_iter << "\n";
  num("bcd_tol", c.bcd_tol);
  os << "bcd_max_iter = " << c.bcd_max_iter << "\n";
  os << "randomization_count = " << c.randomization_count << "\n";
  num("min_rate", c.min_rate);
  os << "[run]\n";
  os << "seed = " << c.seed << "\n";
  os << "scheme = " << to_string(c.scheme) << "\n";
  return os.str();
}

inline std::string config_hash(const SystemConfig& c) {
  std::string s = serialize_config(c);
  std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

struct RunRecord {
  std::string scheme;
  std::uint64_t seed = 0;
  double axis_value = 0.0;
  double rate_total = 0.0, rate_prep = 0.0, rate_comm = 0.0;
  double assnr_min = 0.0;
  double power = 0.0;  // max over stages
  int iters = 0;
  long wall_ms = 0;  // measured; the CSV column is zeroed for determinism
  bool feasible = false;
  Status status = Status::NumericalError;
  std::string config_hash;
  SlotResult slot;  // full traces for the JSON output
};

inline RunRecord run_one(const SystemConfig& cfg, std::uint64_t seed, double axis_value = 0.0) {
  SystemConfig c = cfg;
  c.seed = seed;
  RunRecord rec;
  rec.scheme = to_string(c.scheme);
  rec.seed = seed;
  rec.axis_value = axis_value;
  rec.config_hash = config_hash(c);
  auto t0 = std::chrono::steady_clock::now();
  Geometry geom = sample_geometry(c, seed);
  rec.slot = run_slot(c, geom, seed);
  rec.wall_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                    std::chrono::steady_clock::now() - t0)
                    .count();
  rec.status = rec.slot.status;
  rec.rate_total = rec.slot.rate_total;
  rec.rate_prep = rec.slot.rate_prep;
  rec.rate_comm = rec.slot.rate_comm;
  rec.assnr_min = rec.slot.assnr.empty()
                      ? 0.0
                      : *std::min_element(rec.slot.assnr.begin(), rec.slot.assnr.end());
  rec.power = std::max(rec.slot.power_prep, rec.slot.power_comm);
  rec.iters = rec.slot.iterations;
  rec.feasible = rec.slot.feasible;
  return rec;
}

inline int worker_count(std::size_t jobs) {
  if (const char* env = std::getenv("STARISAC_WORKERS")) {
    int n = std::atoi(env);
    if (n > 0) return static_cast<int>(std::min<std::size_t>(n, jobs));
  }
  unsigned hw = std::thread::hardware_concurrency();
  return static_cast<int>(std::min<std::size_t>(hw > 0 ? hw : 1, jobs));
}

// Runs a batch of independent (config, seed) jobs on a bounded pool; the
// result vector is indexed by job, so assembly order is deterministic.
template <typename JobFn>
inline void run_pool(std::size_t jobs, JobFn&& fn) {
  int workers = worker_count(jobs);
  if (workers <= 1) {
    for (std::size_t i = 0; i < jobs; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int t = 0; t < workers; ++t)
    pool.emplace_back([&]() {
      for (std::size_t i = next.fetch_add(1); i < jobs; i = next.fetch_add(1)) fn(i);
    });
  for (auto& th : pool) th.join();
}

// Scheme variants are config deltas on the same core pipeline.
inline std::vector<RunRecord> run_scheme(Scheme scheme, const SystemConfig& cfg,
                                         const std::vector<std::uint64_t>& seeds,
                                         double axis_value = 0.0) {
  SystemConfig c = cfg;
  c.scheme = scheme;
  std::vector<RunRecord> out(seeds.size());
  run_pool(seeds.size(), [&](std::size_t i) { out[i] = run_one(c, seeds[i], axis_value); });
  return out;
}

// ------------------------------- sweeps ------------------------------------

enum class SweepAxis { Power, Elements, Users, Error };

inline SweepAxis axis_from_string(const std::string& s) {
  if (s == "power") return SweepAxis::Power;
  if (s == "elements") return SweepAxis::Elements;
  if (s == "users") return SweepAxis::Users;
  if (s == "error") return SweepAxis::Error;
  throw std::invalid_argument("unknown sweep axis: " + s);
}

inline const char* to_string(SweepAxis a) {
  switch (a) {
    case SweepAxis::Power: return "power";
    case SweepAxis::Elements: return "elements";
    case SweepAxis::Users: return "users";
    case SweepAxis::Error: return "error";
  }
  return "unknown";
}

inline SystemConfig apply_axis(const SystemConfig& cfg, SweepAxis axis, double value) {
  SystemConfig c = cfg;
  switch (axis) {
    case SweepAxis::Power:
      c.pmax_dbm = value;
      break;
    case SweepAxis::Elements: {
      int n = static_cast<int>(value);
      if (n <= 0 || n % c.star_nx != 0)
        throw std::invalid_argument("elements grid value must be a positive multiple of star_nx");
      c.star_nz = n / c.star_nx;
      c.n_part = std::min(c.n_part, c.star_elements());
      break;
    }
    case SweepAxis::Users: {
      int k = static_cast<int>(value);
      if (k <= 0 || k % 2 != 0) throw std::invalid_argument("users grid value must be positive and even");
      c.users_indoor = k / 2;
      c.users_outdoor = k / 2;
      break;
    }
    case SweepAxis::Error:
      c.sigma_elev_prep_deg = value;
      c.sigma_azim_prep_deg = value;
      c.sigma_elev_comm_deg = value;
      c.sigma_azim_comm_deg = value;
      break;
  }
  c.validate();
  return c;
}

struct SweepPoint {
  std::string scheme;
  double axis_value = 0.0;
  int n = 0;
  double mean_rate = 0.0;
  double stderr_rate = 0.0;
};

struct SweepResult {
  SweepAxis axis = SweepAxis::Power;
  std::vector<RunRecord> records;   // scheme-major, then grid-major, then seed
  std::vector<SweepPoint> summary;  // same ordering, one row per (scheme, point)
};

inline SweepResult sweep(SweepAxis axis, const std::vector<double>& grid, const SystemConfig& cfg,
                         const std::vector<std::uint64_t>& seeds,
                         const std::vector<Scheme>& schemes) {
  SweepResult res;
  res.axis = axis;
  struct Job {
    Scheme scheme;
    double value;
    std::uint64_t seed;
  };
  std::vector<Job> jobs;
  for (Scheme s : schemes)
    for (double v : grid)
      for (std::uint64_t seed : seeds) jobs.push_back({s, v, seed});
  res.records.resize(jobs.size());
  run_pool(jobs.size(), [&](std::size_t i) {
    SystemConfig c = apply_axis(cfg, axis, jobs[i].value);
    c.scheme = jobs[i].scheme;
    res.records[i] = run_one(c, jobs[i].seed, jobs[i].value);
  });
  std::size_t idx = 0;
  for (Scheme s : schemes)
    for (double v : grid) {
      SweepPoint pt;
      pt.scheme = to_string(s);
      pt.axis_value = v;
      double sum = 0.0, sum_sq = 0.0;
      for (std::size_t j = 0; j < seeds.size(); ++j, ++idx) {
        sum += res.records[idx].rate_total;
        sum_sq += res.records[idx].rate_total * res.records[idx].rate_total;
      }
      pt.n = static_cast<int>(seeds.size());
      pt.mean_rate = sum / pt.n;
      double var = pt.n > 1 ? std::max(0.0, (sum_sq - sum * sum / pt.n) / (pt.n - 1)) : 0.0;
      pt.stderr_rate = pt.n > 1 ? std::sqrt(var / pt.n) : 0.0;
      res.summary.push_back(pt);
    }
  return res;
}

// ------------------------------- emission ----------------------------------

namespace detail_harness {

inline std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

}  // namespace detail_harness

// Fixed 11-column schema. The wall_ms column is written as 0 so repeated
// runs produce byte-identical files; measured timing lives in the JSON.
inline void write_csv(const std::vector<RunRecord>& records, std::ostream& os) {
  os << "scheme,seed,axis_value,rate_total,rate_prep,rate_comm,assnr_min,power,iters,wall_ms,feasible\n";
  for (const auto& r : records) {
    os << r.scheme << ',' << r.seed << ',' << detail_harness::fmt(r.axis_value) << ','
       << detail_harness::fmt(r.rate_total) << ',' << detail_harness::fmt(r.rate_prep) << ','
       << detail_harness::fmt(r.rate_comm) << ',' << detail_harness::fmt(r.assnr_min) << ','
       << detail_harness::fmt(r.power) << ',' << r.iters << ',' << 0 << ','
       << (r.feasible ? 1 : 0) << '\n';
  }
}

inline void write_summary_csv(const SweepResult& res, std::ostream& os) {
  os << "scheme,axis,axis_value,n,mean_rate,stderr_rate\n";
  for (const auto& p : res.summary) {
    os << p.scheme << ',' << to_string(res.axis) << ',' << detail_harness::fmt(p.axis_value) << ','
       << p.n << ',' << detail_harness::fmt(p.mean_rate) << ','
       << detail_harness::fmt(p.stderr_rate) << '\n';
  }
}

}  // namespace starisac

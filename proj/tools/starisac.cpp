// Command-line front end: single runs, baseline comparisons, experiment
// sweeps and a quick self-test of the numerical kernels against
// brute-force oracles.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "starisac/channel_io.hpp"
#include "starisac/harness.hpp"
#include "starisac/harness_io.hpp"
#include "starisac/linalg.hpp"
#include "starisac/partition.hpp"
#include "starisac/qcqp.hpp"
#include "starisac/sdp.hpp"
#include "starisac/star_coeffs.hpp"

using namespace starisac;

namespace {

SystemConfig load_or_default(const std::string& path) {
  if (path.empty()) return SystemConfig{};
  return load_config(path);
}

void apply_overrides(SystemConfig& cfg, const std::vector<std::string>& sets) {
  for (const auto& kv : sets) {
    auto eq = kv.find('=');
    if (eq == std::string::npos) throw std::invalid_argument("--set expects key=value, got: " + kv);
    cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
  }
  cfg.validate();
}

std::vector<double> parse_grid(const std::string& s) {
  std::vector<double> grid;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (!tok.empty()) grid.push_back(std::stod(tok));
  }
  if (grid.empty()) throw std::invalid_argument("empty grid");
  return grid;
}

std::vector<Scheme> parse_schemes(const std::string& s) {
  std::vector<Scheme> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (!tok.empty()) out.push_back(scheme_from_string(tok));
  }
  if (out.empty()) throw std::invalid_argument("empty scheme list");
  return out;
}

std::vector<std::uint64_t> seed_range(std::uint64_t first, int count) {
  std::vector<std::uint64_t> seeds;
  for (int i = 0; i < count; ++i) seeds.push_back(first + i);
  return seeds;
}

int exit_code(const std::vector<RunRecord>& records) {
  for (const auto& r : records)
    if (r.status == Status::Infeasible) return 2;
  return 0;
}

// ---- selftest: oracle suites exercising the numerical kernels ----

bool report(const char* name, bool ok) {
  std::printf("%-42s %s\n", name, ok ? "PASS" : "FAIL");
  return ok;
}

bool selftest_eig() {
  CounterRng rng(7, 999);
  bool ok = true;
  for (int n : {4, 16}) {
    MatC a(n, n);
    std::uint64_t ctr = 0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) a(i, j) = rng.cnormal(1000 * n + ctr++);
    a = symmetrize(a);
    EigResult e = eig_hermitian(a);
    MatC rec = e.eigenvectors * e.eigenvalues.asDiagonal().toDenseMatrix().cast<cxd>() *
               e.eigenvectors.adjoint();
    ok = ok && (a - rec).norm() <= 1e-9 * a.norm();
  }
  return report("eig: reconstruction residual", ok);
}

bool selftest_sdp() {
  bool ok = true;
  {
    SdpProblem p;
    p.var_dims = {2};
    p.objective.add(0, MatC::Identity(2, 2));
    for (int i = 0; i < 2; ++i) {
      MatC e = MatC::Zero(2, 2);
      e(i, i) = 1.0;
      p.affine.push_back({SdpLinFun{}.add(0, e), Rel::Le, 1.0});
    }
    SdpSolution s = solve_sdp(p, 1e-8);
    ok = ok && s.status == Status::Optimal && std::abs(s.objective - 2.0) < 1e-5 && s.rel_gap < 1e-6;
  }
  {
    SdpProblem p;
    p.var_dims = {2};
    MatC c = MatC::Zero(2, 2);
    c(0, 0) = 1.0;
    c(1, 1) = -1.0;
    p.objective.add(0, c);
    p.affine.push_back({SdpLinFun{}.add(0, MatC::Identity(2, 2)), Rel::Eq, 1.0});
    SdpSolution s = solve_sdp(p, 1e-8);
    ok = ok && s.status == Status::Optimal && std::abs(s.objective - 1.0) < 1e-5;
  }
  return report("sdp: interior point on known optima", ok);
}

bool selftest_qcqp() {
  QcqpProblem p;
  p.complex_dim = 2;
  p.q_quad = -MatC::Identity(2, 2);
  p.q_lin = VecC::Zero(2);
  p.q_lin(0) = 1.0;
  QcqpConstraint ball;
  ball.s = MatC::Identity(2, 2);
  ball.c = 0.25;
  p.constraints.push_back(ball);
  QcqpResult r = solve_qcqp(p, 1e-10);
  bool ok = r.status == Status::Optimal && std::abs(r.w(0) - cxd(0.5, 0.0)) < 1e-6 &&
            r.kkt_residual < 1e-7;
  return report("qcqp: projection onto power ball", ok);
}

bool selftest_phase_projection() {
  CounterRng rng(11, 998);
  bool ok = true;
  const double step = deg_to_rad(0.1);
  for (int t = 0; t < 100 && ok; ++t) {
    double tr_star = 2 * kPi * rng.uniform(2 * t);
    double tt_star = 2 * kPi * rng.uniform(2 * t + 1);
    double tr = 0.0, tt = 0.0;
    project_phases(tr_star, tt_star, tr, tt);
    if (std::abs(std::cos(tr - tt)) > 1e-9) ok = false;
    double got = std::norm(std::polar(1.0, tr_star) - std::polar(1.0, tr)) +
                 std::norm(std::polar(1.0, tt_star) - std::polar(1.0, tt));
    double best = 1e300;
    for (double a = 0.0; a < 2 * kPi; a += step)
      for (double sign : {1.0, -1.0})
        best = std::min(best, std::norm(std::polar(1.0, tr_star) - std::polar(1.0, a)) +
                                  std::norm(std::polar(1.0, tt_star) -
                                            std::polar(1.0, a - sign * kPi / 2)));
    ok = ok && got <= best + 1e-3;
  }
  return report("projection: phase coupling vs 0.1deg grid", ok);
}

bool selftest_amplitude_projection() {
  CounterRng rng(12, 997);
  bool ok = true;
  for (int t = 0; t < 100 && ok; ++t) {
    double chi_r = 2.0 * rng.uniform(4 * t) - 1.0;
    double chi_t = 2.0 * rng.uniform(4 * t + 1) - 1.0;
    double br = 0.0, bt = 0.0;
    project_amplitudes(std::abs(chi_r), std::abs(chi_t), chi_r >= 0 ? 0.0 : kPi,
                       chi_t >= 0 ? 0.0 : kPi, 0.0, 0.0, br, bt);
    double got = chi_r * br + chi_t * bt;
    double best = -1e300;
    for (int i = 0; i <= 10000; ++i) {
      double ang = kPi / 2.0 * i / 10000.0;
      best = std::max(best, chi_r * std::cos(ang) + chi_t * std::sin(ang));
    }
    ok = ok && got >= best - 1e-3 && std::abs(br * br + bt * bt - 1.0) < 1e-12;
  }
  return report("projection: amplitudes vs circle grid", ok);
}

bool selftest_topk() {
  CounterRng rng(13, 996);
  bool ok = true;
  for (int t = 0; t < 20 && ok; ++t) {
    const int n = 8, n_part = 1 + t % 7;
    VecR b(n);
    for (int i = 0; i < n; ++i) b(i) = rng.uniform(100 * t + i);
    VecR got = project_topk(b, n_part);
    double best = 1e300;
    for (int mask = 0; mask < (1 << n); ++mask) {
      if (__builtin_popcount(mask) != n_part) continue;
      VecR cand = VecR::Zero(n);
      for (int i = 0; i < n; ++i)
        if (mask & (1 << i)) cand(i) = 1.0;
      best = std::min(best, (cand - b).squaredNorm());
    }
    ok = ok && std::abs((got - b).squaredNorm() - best) < 1e-12;
  }
  return report("projection: top-k vs enumeration", ok);
}

int run_selftest() {
  bool ok = true;
  ok = selftest_eig() && ok;
  ok = selftest_sdp() && ok;
  ok = selftest_qcqp() && ok;
  ok = selftest_phase_projection() && ok;
  ok = selftest_amplitude_projection() && ok;
  ok = selftest_topk() && ok;
  std::printf("%s\n", ok ? "selftest: all suites passed" : "selftest: FAILURES");
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"STAR-RIS ISAC two-stage protocol simulator and optimizer"};
  app.require_subcommand(1);

  std::string config_path, out_prefix, dump_path, scheme_name = "Proposed";
  std::string axis_name = "power", grid_str, schemes_str = "Proposed";
  std::vector<std::string> sets;
  std::uint64_t seed = 1, first_seed = 1;
  int seed_count = 20;

  auto* run_cmd = app.add_subcommand("run", "run one scheme on one seed");
  run_cmd->add_option("--config", config_path, "configuration file (key = value)");
  run_cmd->add_option("--scheme", scheme_name,
                      "Proposed|CPS-STAR|IPS-STAR|NoStat-STAR|Fixed-STAR");
  run_cmd->add_option("--seed", seed, "random seed");
  run_cmd->add_option("--out", out_prefix, "output prefix for <prefix>.csv/.json");
  run_cmd->add_option("--dump-channels", dump_path, "write the channel draw as JSON");
  run_cmd->add_option("--set", sets, "override config keys, key=value")->take_all();

  auto* sweep_cmd = app.add_subcommand("sweep", "sweep one axis over a grid");
  sweep_cmd->add_option("--axis", axis_name, "power|elements|users|error")->required();
  sweep_cmd->add_option("--grid", grid_str, "comma-separated grid values")->required();
  sweep_cmd->add_option("--seeds", seed_count, "seeds per grid point");
  sweep_cmd->add_option("--first-seed", first_seed, "first seed of the range");
  sweep_cmd->add_option("--schemes", schemes_str, "comma-separated scheme list");
  sweep_cmd->add_option("--config", config_path, "configuration file");
  sweep_cmd->add_option("--out", out_prefix, "output prefix");
  sweep_cmd->add_option("--set", sets, "override config keys, key=value")->take_all();

  auto* base_cmd = app.add_subcommand("baselines", "run all benchmark schemes");
  base_cmd->add_option("--config", config_path, "configuration file");
  base_cmd->add_option("--seeds", seed_count, "seeds per scheme");
  base_cmd->add_option("--first-seed", first_seed, "first seed of the range");
  base_cmd->add_option("--out", out_prefix, "output prefix");
  base_cmd->add_option("--set", sets, "override config keys, key=value")->take_all();

  app.add_subcommand("selftest", "run the oracle suites for the numerical kernels");

  CLI11_PARSE(app, argc, argv);

  try {
    if (app.got_subcommand("selftest")) return run_selftest();

    SystemConfig cfg = load_or_default(config_path);
    apply_overrides(cfg, sets);

    if (app.got_subcommand("run")) {
      cfg.scheme = scheme_from_string(scheme_name);
      if (!dump_path.empty()) {
        Geometry geom = sample_geometry(cfg, seed);
        dump_channels(sample_channels(cfg, geom, seed), dump_path);
      }
      RunRecord rec = run_one(cfg, seed);
      std::vector<RunRecord> records{rec};
      if (!out_prefix.empty()) write_outputs(records, out_prefix);
      std::printf("scheme=%s seed=%llu status=%s rate_total=%.6f rate_prep=%.6f rate_comm=%.6f "
                  "assnr_min=%.3f power=%.6g iters=%d feasible=%d\n",
                  rec.scheme.c_str(), static_cast<unsigned long long>(rec.seed),
                  to_string(rec.status), rec.rate_total, rec.rate_prep, rec.rate_comm,
                  rec.assnr_min, rec.power, rec.iters, rec.feasible ? 1 : 0);
      if (!rec.slot.feasibility_report.empty())
        std::printf("feasibility: %s\n", rec.slot.feasibility_report.c_str());
      return exit_code(records);
    }

    if (app.got_subcommand("sweep")) {
      SweepAxis axis = axis_from_string(axis_name);
      SweepResult res = sweep(axis, parse_grid(grid_str), cfg, seed_range(first_seed, seed_count),
                              parse_schemes(schemes_str));
      if (!out_prefix.empty()) {
        write_outputs(res.records, out_prefix);
        std::ofstream f(out_prefix + "_summary.csv");
        write_summary_csv(res, f);
      }
      for (const auto& p : res.summary)
        std::printf("%s %s=%g n=%d mean_rate=%.6f stderr=%.6f\n", p.scheme.c_str(),
                    to_string(axis), p.axis_value, p.n, p.mean_rate, p.stderr_rate);
      return exit_code(res.records);
    }

    if (app.got_subcommand("baselines")) {
      std::vector<Scheme> all = {Scheme::Proposed, Scheme::CpsStar, Scheme::IpsStar,
                                 Scheme::NoStatStar, Scheme::FixedStar};
      std::vector<RunRecord> records;
      for (Scheme s : all) {
        auto part = run_scheme(s, cfg, seed_range(first_seed, seed_count));
        double mean = 0.0;
        for (const auto& r : part) mean += r.rate_total / part.size();
        std::printf("%-12s mean_rate=%.6f over %d seeds\n", to_string(s), mean, seed_count);
        records.insert(records.end(), part.begin(), part.end());
      }
      if (!out_prefix.empty()) write_outputs(records, out_prefix);
      return exit_code(records);
    }
  } catch (const std::exception& ex) {
    std::fprintf(stderr, "error: %s\n", ex.what());
    return 1;
  }
  return 0;
}

// Copyright 2026 The qrask Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// qrask: generate problems, run solvers, benchmark, sweep and reconstruct.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "qrask/analysis.hpp"
#include "qrask/error.hpp"
#include "qrask/problems.hpp"
#include "qrask/range.hpp"
#include "qrask/solver.hpp"
#include "qrask/tomo.hpp"

namespace fs = std::filesystem;
using namespace qrask;

namespace {

std::string fmt(double x) {
  if (std::isnan(x)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

// Output stream: a file, or stdout for "-" / empty.
class Out {
 public:
  explicit Out(const std::string& path) {
    if (!path.empty() && path != "-") {
      if (const auto dir = fs::path(path).parent_path(); !dir.empty()) fs::create_directories(dir);
      file_ = std::make_unique<std::ofstream>(path);
      if (!*file_) throw Error("cannot write '" + path + "'");
    }
  }
  std::ostream& os() { return file_ ? *file_ : std::cout; }

 private:
  std::unique_ptr<std::ofstream> file_;
};

// Contamination flags shared by every generator.
struct ContamArgs {
  double corrupt_beta = 0.0;
  double corrupt_lo = kCorruptLo;
  double corrupt_hi = kCorruptHi;
  double noise = 0.0;

  void add(CLI::App* app) {
    app->add_option("--corrupt-beta", corrupt_beta, "fraction of corrupted right-hand side entries");
    app->add_option("--corrupt-lo", corrupt_lo, "lower end of the corruption distribution");
    app->add_option("--corrupt-hi", corrupt_hi, "upper end of the corruption distribution");
    app->add_option("--noise", noise, "relative noise level ||r|| / ||b||");
  }
  Problem apply(Problem p, std::uint64_t seed) const {
    if (corrupt_beta > 0.0 && noise > 0.0) {
      throw ValidationError("choose either --corrupt-beta or --noise, not both");
    }
    if (corrupt_beta > 0.0) return corrupt(std::move(p), corrupt_beta, corrupt_lo, corrupt_hi, seed);
    if (noise > 0.0) return add_noise(std::move(p), noise, seed);
    return p;
  }
};

// Problem source for bench and sweep: a bundle, or a Gaussian generator
// re-seeded per trial.
struct SourceArgs {
  std::string bundle;
  Index m = 500;
  Index n = 1000;
  Index s = 10;
  std::uint64_t seed = 1;
  ContamArgs contam;

  void add(CLI::App* app, bool with_contam) {
    app->add_option("--bundle", bundle, "problem bundle (fixed across trials)");
    app->add_option("--m", m, "rows of the Gaussian problem");
    app->add_option("--n", n, "columns of the Gaussian problem");
    app->add_option("--s", s, "sparsity of the ground truth");
    app->add_option("--seed", seed, "base seed; trial t uses seed + t");
    if (with_contam) contam.add(app);
  }
  Problem make(Index trial) const {
    if (!bundle.empty()) return load_bundle(bundle);
    const std::uint64_t sd = seed + trial;
    return contam.apply(gen_gaussian(m, n, s, sd), sd);
  }
};

struct SolveArgs {
  std::string method = "rask-mm";
  double lambda = 1.0;
  double gamma = 0.0;
  double q = 1.0;
  Index max_iter = 20000;
  double err_tol = 1e-6;
  std::string stop = "errtol";
  double tau = 1.0;
  double delta = std::nan("");
  Index refresh = kDefaultRefreshPeriod;

  void add(CLI::App* app) {
    app->add_option("--method", method, "rask, rask-mm, quantile-rask, quantile-rask-mm");
    app->add_option("--lambda", lambda, "sparsity weight");
    app->add_option("--gamma", gamma, "dual regularisation");
    app->add_option("--q", q, "acceptable ratio of the quantile methods");
    app->add_option("--maxiter", max_iter, "maximum number of iterations");
    app->add_option("--errtol", err_tol, "relative error tolerance (0 disables)");
    app->add_option("--stop", stop, "none, errtol, dp, me");
    app->add_option("--tau", tau, "tuning parameter of dp / me");
    app->add_option("--delta", delta, "contamination level (default: from the problem)");
    app->add_option("--refresh", refresh, "period of the full A^T y refresh");
  }
  SolverConfig config(std::uint64_t seed) const {
    SolverConfig c;
    c.method = parse_method(method);
    c.lambda = lambda;
    c.gamma = gamma;
    c.q = q;
    c.max_iter = max_iter;
    c.err_tol = err_tol;
    c.seed = seed;
    c.stop.kind = parse_stop_kind(stop);
    c.stop.tau = tau;
    c.stop.delta = delta;
    c.refresh_period = refresh;
    return c;
  }
};

// Validates a configuration against a problem and prints its warnings.
void check(const SolverConfig& cfg, const Problem& p) {
  if (uses_momentum(cfg.method) && cfg.gamma == 0.0 &&
      p.contamination.mode == ContaminationMode::corrupt) {
    throw ValidationError("gamma = 0 is not allowed on a corrupted problem; pass --gamma > 0");
  }
  for (const auto& w : cfg.validate(&p)) std::cerr << "warning: " << w << "\n";
}

Problem maybe_stamp(Problem p, const std::string& generator) {
  p.extra["generator"] = generator;
  return p;
}

void write_run_csv(std::ostream& os, const RunRecord& r, Index log_every) {
  os << "k,rel_error,bregman_error,residual_norm,alpha,w,branch\n";
  const Index last = r.stop_index;
  for (Index k = 0; k <= last; ++k) {
    if (k != last && k % log_every != 0) continue;
    os << k << "," << (r.has_truth() ? fmt(r.rel_error[k]) : "nan") << ","
       << (r.has_truth() ? fmt(r.bregman_error[k]) : "nan") << "," << fmt(r.residual_norm[k]) << ","
       << fmt(r.alpha[k]) << "," << fmt(r.w[k]) << ","
       << (r.branch[k] ? to_string(*r.branch[k]) : "none") << "\n";
  }
  os << "stop," << to_string(r.stop_reason) << "," << r.stop_index << "," << fmt(r.wall_seconds)
     << "\n";
}

// "method[,key=value...]" with keys gamma, q, lambda.
struct MethodSpec {
  SolveArgs args;
  std::string label;
};

MethodSpec parse_method_spec(const std::string& text, const SolveArgs& defaults) {
  MethodSpec ms{defaults, text};
  std::stringstream ss(text);
  std::string tok;
  bool first = true;
  while (std::getline(ss, tok, ',')) {
    if (first) {
      ms.args.method = tok;
      first = false;
      continue;
    }
    const auto eq = tok.find('=');
    if (eq == std::string::npos) throw ValidationError("bad method option '" + tok + "'");
    const std::string key = tok.substr(0, eq);
    const double val = std::stod(tok.substr(eq + 1));
    if (key == "gamma") {
      ms.args.gamma = val;
    } else if (key == "q") {
      ms.args.q = val;
    } else if (key == "lambda") {
      ms.args.lambda = val;
    } else {
      throw ValidationError("unknown method option '" + key + "' (gamma, q, lambda)");
    }
  }
  return ms;
}

int cmd_solve(const std::string& bundle, const SolveArgs& sa, std::uint64_t seed, Index log_every,
              const std::string& out) {
  if (log_every < 1) throw ValidationError("--log-every must be positive");
  const Problem p = load_bundle(bundle);
  const SolverConfig cfg = sa.config(seed);
  check(cfg, p);
  const RunRecord r = run(p, cfg);
  Out o(out);
  write_run_csv(o.os(), r, log_every);
  return 0;
}

int cmd_bench(const SourceArgs& src, const SolveArgs& defaults, const std::vector<std::string>& methods,
              Index trials, const std::string& out) {
  if (trials < 1) throw ValidationError("--trials must be >= 1");
  std::vector<MethodSpec> specs;
  for (const auto& m : methods) specs.push_back(parse_method_spec(m, defaults));
  if (specs.empty()) specs.push_back({defaults, defaults.method});
  // Validate every configuration before any run starts.
  const Problem probe = src.make(0);
  for (const auto& s : specs) check(s.args.config(src.seed), probe);

  Out o(out);
  o.os() << "method,lambda,gamma,q,trials,median_it,median_wall_seconds,median_final_error,"
            "reached_tol\n";
  for (const auto& s : specs) {
    const auto recs = run_trials(trials, [&](Index t) {
      const Problem p = t == 0 ? probe : src.make(t);
      return run(p, s.args.config(src.seed + t));
    });
    const Summary sum = aggregate_median(recs);
    Index reached = 0;
    for (const auto& r : recs) reached += r.stop_reason == StopReason::err_tol ? 1 : 0;
    o.os() << s.args.method << "," << fmt(s.args.lambda) << "," << fmt(s.args.gamma) << ","
           << fmt(s.args.q) << "," << trials << "," << fmt(sum.median_iterations) << ","
           << fmt(sum.median_wall_seconds) << "," << fmt(sum.median_final_rel_error) << ","
           << reached << "\n";
  }
  return 0;
}

int cmd_sweep(const SourceArgs& src, const SolveArgs& sa, const std::string& beta_grid,
              const std::string& q_grid, Index iters, Index trials, const std::string& out) {
  if (trials < 1) throw ValidationError("--trials must be >= 1");
  if (!src.bundle.empty()) throw ValidationError("sweep regenerates corruption; use generator flags");
  const auto betas = parse_range(beta_grid);
  const auto qs = parse_range(q_grid);
  SolveArgs base = sa;
  base.max_iter = iters;
  base.stop = "none";
  for (double beta : betas) {
    if (!(beta > 0.0 && beta <= 0.5)) throw ValidationError("beta grid values must lie in (0, 0.5]");
  }
  for (double q : qs) {
    SolveArgs a = base;
    a.q = q;
    a.config(src.seed).validate();
  }
  if (uses_momentum(parse_method(base.method)) && base.gamma == 0.0) {
    throw ValidationError("gamma = 0 is not allowed on a corrupted problem; pass --gamma > 0");
  }
  Out o(out);
  o.os() << "beta,q,median_error\n";
  for (double beta : betas) {
    // Problems are shared across the q grid so cells differ only in q.
    std::vector<Problem> probs;
    for (Index t = 0; t < trials; ++t) {
      const std::uint64_t sd = src.seed + t;
      probs.push_back(corrupt(gen_gaussian(src.m, src.n, src.s, sd), beta, src.contam.corrupt_lo,
                              src.contam.corrupt_hi, sd));
    }
    for (double q : qs) {
      SolveArgs a = base;
      a.q = q;
      const auto recs = run_trials(trials, [&](Index t) { return run(probs[t], a.config(src.seed + t)); });
      o.os() << fmt(beta) << "," << fmt(q) << "," << fmt(aggregate_median(recs).median_final_rel_error)
             << "\n";
    }
  }
  return 0;
}

int cmd_reconstruct(const std::string& bundle, SolveArgs sa, bool method_given, bool q_given,
                    std::uint64_t seed, const std::string& out_dir) {
  Problem p = load_bundle(bundle);
  const auto it = p.extra.find("tomo_N");
  if (it == p.extra.end()) throw ValidationError("bundle '" + bundle + "' is not a tomography bundle");
  const Index N = std::stoull(it->second);
  if (!p.x_hat || p.cols() != N * N) throw ValidationError("tomography bundle lacks an N x N truth");
  if (!method_given) {
    sa.method = p.contamination.mode == ContaminationMode::corrupt ? "quantile-rask-mm" : "rask-mm";
  }
  if (!q_given && !uses_quantile(parse_method(sa.method))) sa.q = 1.0;
  const SolverConfig cfg = sa.config(seed);
  check(cfg, p);
  const RunRecord r = run(p, cfg);
  fs::create_directories(out_dir);
  const fs::path d(out_dir);
  write_pgm((d / "truth.pgm").string(), Phantom::from_flat(*p.x_hat, N).values, N, N);
  write_pgm((d / "reconstruction.pgm").string(), Phantom::from_flat(r.x, N).values, N, N);
  std::ofstream f(d / "metrics.csv");
  if (!f) throw Error("cannot write metrics in '" + out_dir + "'");
  f << "method,stop_reason,stop_index,rel_error,psnr_db,wall_seconds\n"
    << to_string(cfg.method) << "," << to_string(r.stop_reason) << "," << r.stop_index << ","
    << fmt(relative_error(r.x, *p.x_hat)) << "," << fmt(psnr(r.x, *p.x_hat, 1.0)) << ","
    << fmt(r.wall_seconds) << "\n";
  std::cout << "wrote " << (d / "truth.pgm").string() << ", " << (d / "reconstruction.pgm").string()
            << ", " << (d / "metrics.csv").string() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quantile-based randomized sparse Kaczmarz with adaptive momentum"};
  app.require_subcommand(1);

  // gen ----------------------------------------------------------------------
  auto* gen = app.add_subcommand("gen", "write a problem bundle");
  gen->require_subcommand(1);
  std::string gen_out;
  std::uint64_t gen_seed = 1;
  Index gen_s = 10;
  ContamArgs gen_contam;

  auto* gg = gen->add_subcommand("gaussian", "standard-normal matrix with a sparse truth");
  Index gm = 500, gn = 1000;
  gg->add_option("--m", gm, "rows")->required();
  gg->add_option("--n", gn, "columns")->required();

  auto* gt = gen->add_subcommand("tomo", "parallel-beam tomography of a head phantom");
  Index tN = 20, tp = 150;
  std::string ttheta = "0:5:179";
  double tdfactor = 1.4;
  double td = std::nan("");
  gt->add_option("--N", tN, "grid side");
  gt->add_option("--theta", ttheta, "angles in degrees, lo:step:hi or a list");
  gt->add_option("--p", tp, "rays per angle");
  gt->add_option("--dfactor", tdfactor, "detector width as a multiple of N");
  gt->add_option("--d", td, "detector width (overrides --dfactor)");

  auto* gmm = gen->add_subcommand("mm", "Matrix Market file with a sparse truth");
  std::string mm_file;
  gmm->add_option("--file", mm_file, "path to a .mtx file")->required();

  for (auto* sub : {gg, gt, gmm}) {
    sub->add_option("--out", gen_out, "bundle directory")->required();
    sub->add_option("--seed", gen_seed, "seed");
    if (sub != gt) sub->add_option("--s", gen_s, "sparsity of the ground truth");
    gen_contam.add(sub);
  }

  // solve --------------------------------------------------------------------
  auto* solve = app.add_subcommand("solve", "run one solver and write the per-iteration CSV");
  std::string solve_bundle, solve_out;
  std::uint64_t solve_seed = 0;
  Index log_every = 1;
  SolveArgs solve_args;
  solve->add_option("--bundle", solve_bundle, "problem bundle")->required();
  solve->add_option("--seed", solve_seed, "sampling seed");
  solve->add_option("--log-every", log_every, "write every K-th iteration (the last is always written)");
  solve->add_option("--out", solve_out, "CSV path (default stdout)");
  solve_args.add(solve);

  // bench --------------------------------------------------------------------
  auto* bench = app.add_subcommand("bench", "median iterations and wall time over seeded trials");
  SourceArgs bench_src;
  SolveArgs bench_args;
  std::vector<std::string> bench_methods;
  Index bench_trials = 50;
  std::string bench_out;
  bench_src.add(bench, true);
  bench_args.add(bench);
  bench->add_option("--config", bench_methods,
                    "method[,gamma=..][,q=..][,lambda=..]; repeat for several rows");
  bench->add_option("--trials", bench_trials, "number of trials");
  bench->add_option("--out", bench_out, "CSV path (default stdout)");

  // sweep --------------------------------------------------------------------
  auto* sweep = app.add_subcommand("sweep", "median final error over a (beta, q) grid");
  SourceArgs sweep_src;
  sweep_src.m = 500;
  sweep_src.n = 200;
  SolveArgs sweep_args;
  sweep_args.method = "quantile-rask-mm";
  sweep_args.gamma = 0.01;
  std::string beta_grid = "0.1:0.1:0.5", q_grid = "0.1:0.1:1";
  Index sweep_iters = 2000, sweep_trials = 50;
  std::string sweep_out;
  sweep_src.add(sweep, false);
  sweep->add_option("--corrupt-lo", sweep_src.contam.corrupt_lo, "lower end of the corruption distribution");
  sweep->add_option("--corrupt-hi", sweep_src.contam.corrupt_hi, "upper end of the corruption distribution");
  sweep_args.add(sweep);
  sweep->add_option("--beta", beta_grid, "corruption fractions, lo:step:hi or a list");
  sweep->add_option("--qgrid", q_grid, "acceptable ratios, lo:step:hi or a list");
  sweep->add_option("--iters", sweep_iters, "iterations per run");
  sweep->add_option("--trials", sweep_trials, "trials per cell");
  sweep->add_option("--out", sweep_out, "CSV path (default stdout)");

  // reconstruct --------------------------------------------------------------
  auto* rec = app.add_subcommand("reconstruct", "tomography reconstruction with images and metrics");
  std::string rec_bundle, rec_out = "recon";
  std::uint64_t rec_seed = 0;
  SolveArgs rec_args;
  rec_args.stop = "me";
  rec_args.err_tol = 0.0;
  rec_args.gamma = 0.01;
  rec_args.q = 0.8;
  rec_args.tau = 1.0;
  rec->add_option("--bundle", rec_bundle, "tomography bundle")->required();
  rec->add_option("--seed", rec_seed, "sampling seed");
  rec->add_option("--out-dir", rec_out, "output directory");
  rec_args.add(rec);

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) {
      Problem p;
      if (gg->parsed()) {
        p = maybe_stamp(gen_gaussian(gm, gn, gen_s, gen_seed), "gaussian");
      } else if (gt->parsed()) {
        TomoSpec spec;
        spec.N = tN;
        spec.angles_deg = parse_range(ttheta);
        spec.p = tp;
        spec.d = std::isnan(td) ? tdfactor * static_cast<double>(tN) : td;
        p = maybe_stamp(make_tomo_problem(spec, gen_seed), "tomo");
      } else {
        p = maybe_stamp(from_matrix_market(mm_file, gen_s, gen_seed), "mm");
      }
      p = gen_contam.apply(std::move(p), gen_seed);
      save_bundle(p, gen_out);
      std::cout << "wrote " << gen_out << " (" << p.rows() << " x " << p.cols() << ", "
                << to_string(p.contamination.mode) << ", delta " << fmt(p.contamination.delta) << ")\n";
      return 0;
    }
    if (solve->parsed()) return cmd_solve(solve_bundle, solve_args, solve_seed, log_every, solve_out);
    if (bench->parsed()) return cmd_bench(bench_src, bench_args, bench_methods, bench_trials, bench_out);
    if (sweep->parsed()) {
      return cmd_sweep(sweep_src, sweep_args, beta_grid, q_grid, sweep_iters, sweep_trials, sweep_out);
    }
    if (rec->parsed()) {
      return cmd_reconstruct(rec_bundle, rec_args, rec->count("--method") > 0, rec->count("--q") > 0,
                             rec_seed, rec_out);
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 1;
}

#include <cctype>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "spgep/errors.hpp"
#include "spgep/gep.hpp"
#include "spgep/io.hpp"
#include "spgep/sim.hpp"
#include "spgep/tuning.hpp"

namespace {

using nlohmann::ordered_json;
using namespace spgep;

ordered_json matrix_json(const Matrix& m) {
  ordered_json rows = ordered_json::array();
  for (int i = 0; i < m.rows(); ++i) {
    ordered_json row = ordered_json::array();
    for (int j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

PenaltyKind penalty_from(const std::string& s) {
  return s == "lasso" ? PenaltyKind::ElementLasso : PenaltyKind::GroupRow;
}

Method method_from(const std::string& s) {
  return s == "fastpoi" ? Method::FastPoi : Method::Poi;
}

GepPair load_pair(const std::string& a_path, const std::string& b_path, bool b_identity) {
  Matrix a = io::load_matrix(a_path);
  if (b_identity) return GepPair::with_identity_b(std::move(a));
  return GepPair::make(std::move(a), io::load_matrix(b_path));
}

int parse_model_name(std::string s) {
  for (char& c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  if (s == "I") return 1;
  if (s == "II") return 2;
  if (s == "III") return 3;
  if (s == "IV") return 4;
  if (s == "V") return 5;
  try {
    size_t used = 0;
    const int v = std::stoi(s, &used);
    if (used == s.size()) return v;
  } catch (const std::exception&) {
  }
  fail(ErrorKind::InvalidInput, "--model: expected 1..5 or I..V, got '" + s + "'");
}

ordered_json estimate_json(const SubspaceEstimate& est, double lambda_max_value,
                           double epsilon_used) {
  return ordered_json{{"Q", matrix_json(est.q)},
                      {"U", matrix_json(est.u)},
                      {"eigenvalues", est.eigenvalues},
                      {"support", est.support},
                      {"lambda", est.lambda},
                      {"lambda_max", lambda_max_value},
                      {"converged", est.converged},
                      {"outer_iters", est.outer_iters},
                      {"epsilon_used", epsilon_used}};
}

struct SolveOpts {
  std::string a_path, b_path, a2_path, b2_path, u_path;
  bool b_identity = false;
  bool b2_identity = false;
  int d = 0;
  std::string penalty = "group";
  std::string method = "poi";
  double lambda = 0.0;
  double lambda_rel = 0.0;
  bool lambda_set = false;
  bool lambda_rel_set = false;
  int max_outer = 100;
  double tol = 1e-5;
  uint64_t seed = 0;
  bool seed_set = false;
  double grid_ratio = 0.75;
  int grid_len = 31;
};

OuterConfig outer_config(const SolveOpts& o) {
  OuterConfig cfg;
  cfg.max_outer = o.max_outer;
  cfg.outer_tol = o.tol;
  if (o.seed_set) {
    cfg.init = InitKind::RandomOrtho;
    cfg.seed = o.seed;
  }
  return cfg;
}

void check_d(int d, int p) {
  if (d < 1 || d >= p)
    fail(ErrorKind::InvalidInput,
         "need 1 <= d < p (got d = " + std::to_string(d) + ", p = " + std::to_string(p) + ")");
}

int run_solve(const SolveOpts& o) {
  const GepPair pair = load_pair(o.a_path, o.b_path, o.b_identity);
  check_d(o.d, pair.dim());
  const PenaltyKind kind = penalty_from(o.penalty);
  const Method method = method_from(o.method);
  const double lmax = lambda_max(pair, kind, method, o.d);
  const double lambda = o.lambda_rel_set ? o.lambda_rel * lmax : o.lambda;
  if (!(lambda >= 0.0) || !std::isfinite(lambda))
    fail(ErrorKind::InvalidInput, "penalty level must be finite and >= 0");
  const PenaltySpec pen = kind == PenaltyKind::GroupRow
                              ? PenaltySpec::group_row(lambda)
                              : PenaltySpec::element_lasso(lambda, o.d);
  const OuterConfig cfg = outer_config(o);
  const SubspaceEstimate est =
      method == Method::Poi ? poi(pair, o.d, pen, cfg) : fast_poi(pair, o.d, pen, cfg);
  std::cout << estimate_json(est, lmax, pair.epsilon_used).dump(2) << "\n";
  return 0;
}

int run_tune(const SolveOpts& o) {
  const GepPair train = load_pair(o.a_path, o.b_path, o.b_identity);
  const GepPair tune = load_pair(o.a2_path, o.b2_path, o.b2_identity);
  check_d(o.d, train.dim());
  const SelectResult res =
      select_lambda(train, tune, o.d, penalty_from(o.penalty), method_from(o.method),
                    outer_config(o), o.grid_ratio, o.grid_len);
  ordered_json out{
      {"grid", res.report.grid},
      {"scores", res.report.scores},
      {"selected_index", res.report.selected_index},
      {"selected_lambda", res.report.selected_lambda},
      {"estimate", estimate_json(res.estimate, res.report.grid[0], train.epsilon_used)}};
  std::cout << out.dump(2) << "\n";
  return 0;
}

int run_verify(const SolveOpts& o) {
  const GepPair pair = load_pair(o.a_path, o.b_path, o.b_identity);
  const Matrix u = io::load_matrix(o.u_path);
  ordered_json out{{"eigenvalues", eigenvalues_rayleigh(u, pair)}};
  std::cout << out.dump(2) << "\n";
  return 0;
}

struct ExperimentOpts {
  std::string family;
  std::string model = "1";
  std::string method = "poi";
  std::string penalty = "group";
  int d = 0;
  bool d_set = false;
  int p = 200;
  int n = 100;
  int n_tune = 0;
  int n_test = 0;
  int reps = 30;
  uint64_t seed = 20240601;
  double grid_ratio = 0.75;
  int grid_len = 31;
  std::string out_dir;
};

int run_experiment_cmd(const ExperimentOpts& o) {
  const int model = parse_model_name(o.model);
  int d = o.d;
  if (!o.d_set) {
    if (o.family == "lda") d = model == 5 ? 3 : 2;
    else if (o.family == "taichi") d = 1;
    else d = 3;
  }
  std::string kv;
  kv += "family = " + o.family + "\n";
  kv += "model = " + std::to_string(model) + "\n";
  kv += "method = " + o.method + "\n";
  kv += "penalty = " + o.penalty + "\n";
  kv += "d = " + std::to_string(d) + "\n";
  kv += "p = " + std::to_string(o.p) + "\n";
  kv += "n_train = " + std::to_string(o.n) + "\n";
  kv += "n_tune = " + std::to_string(o.n_tune > 0 ? o.n_tune : o.n) + "\n";
  kv += "n_test = " + std::to_string(o.n_test > 0 ? o.n_test : 20 * o.n) + "\n";
  kv += "repetitions = " + std::to_string(o.reps) + "\n";
  kv += "seed = " + std::to_string(o.seed) + "\n";
  kv += "grid_ratio = " + std::to_string(o.grid_ratio) + "\n";
  kv += "grid_len = " + std::to_string(o.grid_len) + "\n";
  const sim::ExperimentSpec spec = sim::spec_from_kv(kv);

  const sim::ExperimentReport report = sim::run_experiment(spec);

  std::filesystem::create_directories(o.out_dir);
  const std::string json_text = report.to_json();
  io::write_text_file(o.out_dir + "/report.json", json_text + "\n");
  io::write_text_file(o.out_dir + "/report.csv", report.to_csv());

  ordered_json summary = ordered_json::parse(json_text);
  summary.erase("repetitions");
  std::cout << summary.dump(2) << "\n";
  return 0;
}

int exit_code_for(ErrorKind k) {
  switch (k) {
    case ErrorKind::ParseError: return 2;
    case ErrorKind::InvalidInput: return 1;
    default: return 3;
  }
}

void emit_error(const std::string& kind, const std::string& msg, const Error* e = nullptr) {
  ordered_json j{{"error", ordered_json{{"kind", kind}, {"message", msg}}}};
  if (e != nullptr) {
    if (e->numerical_rank >= 0) j["error"]["numerical_rank"] = e->numerical_rank;
    if (std::isfinite(e->lambda)) j["error"]["lambda"] = e->lambda;
  }
  std::cerr << j.dump() << std::endl;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sparse estimation of leading generalized eigenspaces "
               "(penalized orthogonal iteration)"};
  app.require_subcommand(1);

  SolveOpts so;
  ExperimentOpts eo;

  const auto add_pair_flags = [&](CLI::App* sub) {
    sub->add_option("--a", so.a_path, "left matrix A (CSV or dense text)")->required();
    auto* g = sub->add_option_group("B matrix");
    g->add_option("--b", so.b_path, "right matrix B");
    g->add_flag("--b-identity", so.b_identity, "use B = I");
    g->require_option(1);
  };
  const auto add_fit_flags = [&](CLI::App* sub) {
    sub->add_option("--d", so.d, "subspace dimension")->required();
    sub->add_option("--penalty", so.penalty, "penalty kind")
        ->check(CLI::IsMember({"lasso", "group"}));
    sub->add_option("--method", so.method, "solver")
        ->check(CLI::IsMember({"poi", "fastpoi"}));
    sub->add_option("--max-outer", so.max_outer, "outer iteration cap");
    sub->add_option("--tol", so.tol, "outer convergence tolerance");
    sub->add_option("--seed", so.seed, "random orthonormal start with this seed");
  };

  CLI::App* solve = app.add_subcommand("solve", "fit one penalty level");
  add_pair_flags(solve);
  add_fit_flags(solve);
  {
    auto* g = solve->add_option_group("penalty level");
    g->add_option("--lambda", so.lambda, "penalty level");
    g->add_option("--lambda-rel", so.lambda_rel, "penalty level as a fraction of lambda_max");
    g->require_option(1);
  }

  CLI::App* tune = app.add_subcommand("tune", "select the penalty level on a held-out pair");
  add_pair_flags(tune);
  add_fit_flags(tune);
  tune->add_option("--a2", so.a2_path, "held-out A")->required();
  {
    auto* g = tune->add_option_group("held-out B");
    g->add_option("--b2", so.b2_path, "held-out B");
    g->add_flag("--b2-identity", so.b2_identity, "use held-out B = I");
    g->require_option(1);
  }
  tune->add_option("--grid-ratio", so.grid_ratio, "geometric grid ratio");
  tune->add_option("--grid-len", so.grid_len, "grid length (plus a zero-fit sentinel)");

  CLI::App* verify = app.add_subcommand("verify", "recompute Rayleigh eigenvalues for a basis");
  add_pair_flags(verify);
  verify->add_option("--u", so.u_path, "basis file (CSV or dense text)")->required();

  CLI::App* exper = app.add_subcommand("experiment", "run a named synthetic study");
  exper->add_option("--family", eo.family, "experiment family")
      ->required()
      ->check(CLI::IsMember({"pca", "lda", "taichi"}));
  exper->add_option("--model", eo.model, "model number (1..5 or I..V)");
  exper->add_option("--method", eo.method, "solver")->check(CLI::IsMember({"poi", "fastpoi"}));
  exper->add_option("--penalty", eo.penalty, "penalty kind")
      ->check(CLI::IsMember({"lasso", "group"}));
  exper->add_option("--d", eo.d, "fitted dimension (defaults per family)");
  exper->add_option("--p", eo.p, "ambient dimension");
  exper->add_option("--n", eo.n, "training size (per class for lda)");
  exper->add_option("--n-tune", eo.n_tune, "tuning size (defaults to --n)");
  exper->add_option("--n-test", eo.n_test, "per-class test size (lda; defaults to 20*n)");
  exper->add_option("--reps", eo.reps, "repetitions");
  exper->add_option("--seed", eo.seed, "master seed");
  exper->add_option("--grid-ratio", eo.grid_ratio, "geometric grid ratio");
  exper->add_option("--grid-len", eo.grid_len, "grid length");
  exper->add_option("--out", eo.out_dir, "directory for report.json / report.csv")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  so.lambda_rel_set = solve->parsed() && solve->count("--lambda-rel") > 0;
  so.lambda_set = solve->parsed() && solve->count("--lambda") > 0;
  for (CLI::App* sub : {solve, tune})
    if (sub->parsed() && sub->count("--seed") > 0) so.seed_set = true;
  eo.d_set = exper->parsed() && exper->count("--d") > 0;

  try {
    if (solve->parsed()) return run_solve(so);
    if (tune->parsed()) return run_tune(so);
    if (verify->parsed()) return run_verify(so);
    if (exper->parsed()) return run_experiment_cmd(eo);
  } catch (const Error& e) {
    emit_error(error_kind_name(e.kind()), e.what(), &e);
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    emit_error("internal", e.what());
    return 3;
  }
  return 1;
}

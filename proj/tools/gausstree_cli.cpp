#include <CLI11.hpp>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "gausstree/gausstree.hpp"

namespace {

constexpr const char* kVersion = "0.1.0";
constexpr std::uint64_t kDefaultSeed = 7;

using namespace gausstree;

std::vector<double> parse_rho_list(const std::string& csv) {
  std::vector<double> out;
  std::stringstream ss(csv);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    try {
      out.push_back(std::stod(cell));
    } catch (...) {
      throw BadInput("bad correlation value: " + cell);
    }
  }
  if (out.empty()) throw BadInput("empty --rho list");
  return out;
}

// "start:stop:step" (inclusive) or a comma list
std::vector<long> parse_grid(const std::string& spec) {
  std::vector<long> out;
  if (spec.find(':') != std::string::npos) {
    long a, b, s;
    char c1, c2;
    std::stringstream ss(spec);
    if (!(ss >> a >> c1 >> b >> c2 >> s) || c1 != ':' || c2 != ':' || s <= 0 || a <= 0 || b < a)
      throw BadInput("bad grid spec, expected start:stop:step");
    for (long n = a; n <= b; n += s) out.push_back(n);
  } else {
    std::stringstream ss(spec);
    std::string cell;
    while (std::getline(ss, cell, ',')) out.push_back(std::stol(cell));
    if (out.empty()) throw BadInput("empty grid");
  }
  return out;
}

std::vector<double> parse_gamma_grid(const std::string& spec) {
  std::vector<double> out;
  if (spec.find(':') != std::string::npos) {
    double a, b, s;
    char c1, c2;
    std::stringstream ss(spec);
    if (!(ss >> a >> c1 >> b >> c2 >> s) || c1 != ':' || c2 != ':' || s <= 0)
      throw BadInput("bad gamma grid, expected start:stop:step");
    for (double g = a; g <= b + 1e-12; g += s) out.push_back(g);
  } else {
    std::stringstream ss(spec);
    std::string cell;
    while (std::getline(ss, cell, ',')) out.push_back(std::stod(cell));
  }
  if (out.empty()) throw BadInput("empty gamma grid");
  return out;
}

void emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
    if (!text.empty() && text.back() != '\n') std::cout << '\n';
  } else {
    std::ofstream f(out_path);
    if (!f) throw BadInput("cannot open output file: " + out_path);
    f << text;
  }
}

json edge_json(Edge e) { return json::array({e.first, e.second}); }

GaussianTreeModel model_with_rho(const TreeStructure& tree, const std::vector<double>& rho) {
  if (rho.size() != tree.edges().size())
    throw BadInput("need exactly d-1 correlations for this tree");
  CorrelationAssignment corr;
  for (std::size_t k = 0; k < rho.size(); ++k)
    corr.set(tree.edges()[k].first, tree.edges()[k].second, rho[k]);
  return GaussianTreeModel(tree, corr);
}

int resolve_threads(int flag_value) {
  if (flag_value > 0) return flag_value;
  if (const char* env = std::getenv("GAUSSTREE_THREADS")) {
    int v = std::atoi(env);
    if (v > 0) return v;
  }
  return default_thread_count();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gaussian tree models: structure learning and error exponents"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);
  app.fallthrough();  // global flags may follow the subcommand
  int threads_flag = 0;
  app.add_option("--threads", threads_flag, "worker threads (default: all cores, env GAUSSTREE_THREADS)");

  // ---- make ----
  auto* make_cmd = app.add_subcommand("make", "construct a model and print its json");
  std::string make_kind, make_rho_csv, make_out;
  int make_d = 0;
  make_cmd->add_option("kind", make_kind, "star | chain | hybrid")->required();
  make_cmd->add_option("--d", make_d, "node count")->required();
  make_cmd->add_option("--rho", make_rho_csv, "comma list of d-1 edge correlations")->required();
  make_cmd->add_option("--out", make_out, "write to file instead of stdout");

  // ---- learn ----
  auto* learn_cmd = app.add_subcommand("learn", "Chow-Liu structure estimate from samples");
  std::string learn_samples, learn_model, learn_out, learn_dump;
  long learn_n = 1000;
  std::uint64_t learn_seed = kDefaultSeed;
  learn_cmd->add_option("--samples", learn_samples, "csv of samples, one row per draw");
  learn_cmd->add_option("--model", learn_model, "model json to sample from");
  learn_cmd->add_option("--n", learn_n, "sample count when drawing from a model");
  learn_cmd->add_option("--seed", learn_seed, "sampling seed");
  learn_cmd->add_option("--dump-samples", learn_dump, "also write the drawn samples as csv");
  learn_cmd->add_option("--out", learn_out, "write to file instead of stdout");

  // ---- exact-exponent ----
  auto* exact_cmd = app.add_subcommand("exact-exponent", "exact error exponent via the crossover solver");
  std::string exact_model, exact_out;
  SolverOptions exact_opts;
  exact_cmd->add_option("--model", exact_model, "model json")->required();
  exact_cmd->add_option("--starts", exact_opts.starts, "solver starts per crossover problem");
  exact_cmd->add_option("--tol", exact_opts.grad_tol, "gradient tolerance");
  exact_cmd->add_option("--seed", exact_opts.seed, "seed for the random starts");
  exact_cmd->add_option("--out", exact_out, "write to file instead of stdout");

  // ---- approx-exponent ----
  auto* approx_cmd = app.add_subcommand("approx-exponent", "closed-form approximate error exponent");
  std::string approx_model, approx_method = "all", approx_out;
  approx_cmd->add_option("--model", approx_model, "model json")->required();
  approx_cmd->add_option("--method", approx_method, "full | triangle | linear | all");
  approx_cmd->add_option("--out", approx_out, "write to file instead of stdout");

  // ---- crossover ----
  auto* cross_cmd = app.add_subcommand("crossover", "crossover rate for a correlation pair");
  double cross_rho_e = 0, cross_rho_ep = 0;
  std::string cross_method = "closed", cross_out;
  SolverOptions cross_opts;
  cross_cmd->add_option("--rho-e", cross_rho_e, "edge correlation")->required();
  cross_cmd->add_option("--rho-ep", cross_rho_ep, "non-edge correlation (path product)")->required();
  cross_cmd->add_option("--method", cross_method, "comma list of closed | snr | exact, or all");
  cross_cmd->add_option("--starts", cross_opts.starts, "exact-solver starts");
  cross_cmd->add_option("--out", cross_out, "write to file instead of stdout");

  // ---- extremal-scan ----
  auto* scan_cmd = app.add_subcommand("extremal-scan", "brute-force extremal-structure verification");
  int scan_d = 0;
  std::string scan_rho_csv, scan_out;
  ExtremalScanOptions scan_opts;
  bool scan_allow_large = false;
  scan_cmd->add_option("--d", scan_d, "node count (enumeration up to 7)")->required();
  scan_cmd->add_option("--rho", scan_rho_csv, "comma list of d-1 correlations")->required();
  scan_cmd->add_option("--perms", scan_opts.max_placements, "placement samples per tree");
  scan_cmd->add_flag("--allow-large-rho", scan_allow_large, "permit |rho| above 0.63055");
  scan_cmd->add_option("--seed", scan_opts.seed, "placement-sampling seed");
  scan_cmd->add_option("--out", scan_out, "write to file instead of stdout");

  // ---- simulate ----
  auto* sim_cmd = app.add_subcommand("simulate", "Monte Carlo error-probability curve");
  std::string sim_model, sim_grid = "250:2500:250", sim_out;
  long sim_trials = 10000;
  std::uint64_t sim_seed = kDefaultSeed;
  bool sim_skip_exact = false;
  SolverOptions sim_opts;
  sim_cmd->add_option("--model", sim_model, "model json")->required();
  sim_cmd->add_option("--n-grid", sim_grid, "sample-size grid, start:stop:step or comma list");
  sim_cmd->add_option("--trials", sim_trials, "trials per grid point");
  sim_cmd->add_option("--seed", sim_seed, "simulation seed");
  sim_cmd->add_flag("--skip-exact", sim_skip_exact, "omit the exact-exponent reference column");
  sim_cmd->add_option("--out", sim_out, "write csv to file instead of stdout");

  // ---- fig5 ----
  auto* fig5_cmd = app.add_subcommand("fig5", "true vs approximate crossover rate on the symmetric star");
  std::string fig5_grid = "0.05:0.55:0.05", fig5_out;
  SolverOptions fig5_opts;
  fig5_cmd->add_option("--gammas", fig5_grid, "gamma grid, start:stop:step or comma list");
  fig5_cmd->add_option("--starts", fig5_opts.starts, "exact-solver starts");
  fig5_cmd->add_option("--out", fig5_out, "write csv to file instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help / --version
    app.exit(e);
    return 2;
  }

  try {
    const int threads = resolve_threads(threads_flag);

    if (*make_cmd) {
      auto rho = parse_rho_list(make_rho_csv);
      std::optional<GaussianTreeModel> model;
      if (make_kind == "star") {
        model = make_star(make_d, rho);
      } else if (make_kind == "chain") {
        model = make_chain(make_d, rho);
      } else if (make_kind == "hybrid") {
        model = model_with_rho(make_hybrid(make_d), rho);
      } else {
        throw BadInput("unknown kind: " + make_kind + " (expected star|chain|hybrid)");
      }
      emit(model_to_json(*model).dump(2), make_out);
      return 0;
    }

    if (*learn_cmd) {
      EmpiricalMoments moments;
      if (!learn_samples.empty()) {
        std::ifstream in(learn_samples);
        if (!in) throw BadInput("cannot open samples file: " + learn_samples);
        moments = moments_from_csv(in);
      } else if (!learn_model.empty()) {
        auto model = load_model(learn_model);
        auto batch = sample(model, learn_n, learn_seed);
        if (!learn_dump.empty()) {
          std::ofstream f(learn_dump);
          if (!f) throw BadInput("cannot open dump file: " + learn_dump);
          write_samples_csv(f, batch);
        }
        moments = empirical_covariance(batch);
      } else {
        throw BadInput("learn needs --samples or --model");
      }
      TreeStructure learned = learn_structure(moments);
      json j;
      j["d"] = learned.node_count();
      j["n"] = moments.n;
      j["edges"] = json::array();
      for (const Edge& e : learned.edges()) j["edges"].push_back(edge_json(e));
      emit(j.dump(2), learn_out);
      return 0;
    }

    if (*exact_cmd) {
      auto model = load_model(exact_model);
      auto rep = exact_error_exponent(model, exact_opts, threads);
      json j;
      if (!rep.value) {
        j["no_error_events"] = true;
      } else {
        j["K_p"] = *rep.value;
        j["argmin"] = {{"edge", edge_json(rep.argmin_edge)},
                       {"non_edge", edge_json(rep.argmin_non_edge)}};
        j["diagnostics"] = {{"crossover_problems", rep.scan.size()},
                            {"max_constraint_violation", rep.max_constraint_violation},
                            {"max_spread", rep.max_spread},
                            {"min_starts_converged", rep.starts_used_min}};
      }
      emit(j.dump(2), exact_out);
      return 0;
    }

    if (*approx_cmd) {
      auto model = load_model(approx_model);
      json j;
      auto add = [&](const ExponentReport& rep) {
        json r;
        if (!rep.value) {
          r["no_error_events"] = true;
        } else {
          r["K_tilde"] = *rep.value;
          r["argmin"] = {{"edge", edge_json(rep.argmin_edge)},
                         {"partner", edge_json(rep.argmin_partner)}};
        }
        j[rep.method] = r;
      };
      if (approx_method == "all") {
        add(approx_exponent_full(model));
        add(approx_exponent_triangle(model));
        add(approx_exponent_linear(model));
      } else {
        add(approx_exponent(model, approx_method));
      }
      emit(j.dump(2), approx_out);
      return 0;
    }

    if (*cross_cmd) {
      json j;
      j["rho_e"] = cross_rho_e;
      j["rho_ep"] = cross_rho_ep;
      std::stringstream ss(cross_method == "all" ? "closed,snr,exact" : cross_method);
      std::string method;
      bool any = false;
      while (std::getline(ss, method, ',')) {
        any = true;
        if (method == "closed") {
          j["closed"] = approx_rate_closed_form(cross_rho_e, cross_rho_ep);
        } else if (method == "snr") {
          j["snr"] = approx_rate_snr(crossover_problem(cross_rho_e, cross_rho_ep));
        } else if (method == "exact") {
          auto res = solve_crossover_rate(crossover_problem(cross_rho_e, cross_rho_ep), cross_opts);
          j["exact"] = res.rate;
          j["exact_diagnostics"] = {{"spread", res.spread},
                                    {"constraint_violation", res.constraint_violation},
                                    {"starts_converged", res.starts_used}};
        } else {
          throw BadInput("unknown method: " + method + " (expected closed|snr|exact)");
        }
      }
      if (!any) throw BadInput("no method given");
      emit(j.dump(2), cross_out);
      return 0;
    }

    if (*scan_cmd) {
      scan_opts.allow_large_rho = scan_allow_large;
      auto rep = verify_extremal(scan_d, parse_rho_list(scan_rho_csv), scan_opts);
      json j;
      j["d"] = rep.d;
      j["trees"] = rep.trees;
      j["evaluations"] = rep.evaluations;
      j["star_K_tilde"] = rep.star_value;
      j["chain_sorted_K_tilde"] = rep.chain_sorted_value;
      j["min"] = {{"K_tilde", rep.min_value}, {"tree_index", rep.min_tree}};
      j["max"] = {{"K_tilde", rep.max_value}, {"tree_index", rep.max_tree}};
      j["chain_claim_checked"] = rep.chain_claim_checked;
      j["counterexamples"] = json::array();
      for (const auto& c : rep.counterexamples)
        j["counterexamples"].push_back({{"tree_index", c.tree_index},
                                        {"placement", c.placement},
                                        {"K_tilde", c.value},
                                        {"claim", c.claim}});
      emit(j.dump(2), scan_out);
      return 0;
    }

    if (*sim_cmd) {
      auto model = load_model(sim_model);
      auto grid = parse_grid(sim_grid);
      auto curve = error_curve(model, grid, sim_trials, sim_seed, threads, !sim_skip_exact, sim_opts);
      std::ostringstream csv;
      csv.precision(12);
      csv << "n,trials,errors,p_hat,ci_lo,ci_hi,sim_exponent,K_p,K_tilde\n";
      for (const auto& pt : curve.points) {
        // errors == 0 marks sim_exponent as the lower bound log(trials)/n
        csv << pt.n << ',' << pt.trials << ',' << pt.errors << ',' << pt.p_hat << ','
            << pt.interval.lo << ',' << pt.interval.hi << ',' << pt.sim_exponent << ','
            << (curve.k_exact ? std::to_string(*curve.k_exact) : "") << ',' << curve.k_tilde
            << '\n';
      }
      emit(csv.str(), sim_out);
      return 0;
    }

    if (*fig5_cmd) {
      auto rows = fig5_experiment(parse_gamma_grid(fig5_grid), fig5_opts, threads);
      std::ostringstream csv;
      csv.precision(12);
      csv << "gamma,rho_e,rho_ep,mi_gap,J_exact,J_tilde,rel_gap\n";
      for (const auto& r : rows)
        csv << r.gamma << ',' << r.rho_e << ',' << r.rho_ep << ',' << r.mi_gap << ','
            << r.exact_rate << ',' << r.approx_rate << ',' << r.rel_gap << '\n';
      emit(csv.str(), fig5_out);
      return 0;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "rmt/compare.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kVersion = "rmtlsd 1.0.0";

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char b : bytes) {
    h ^= b;
    h *= 1099511628211ull;
  }
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%016llx", (unsigned long long)h);
  return buf;
}

void check_keys(const json& o, const std::vector<std::string>& allowed,
                const std::string& ctx) {
  if (!o.is_object()) throw ConfigError(ctx + " must be a JSON object");
  for (auto it = o.begin(); it != o.end(); ++it) {
    if (std::find(allowed.begin(), allowed.end(), it.key()) == allowed.end())
      throw ConfigError("unknown key '" + it.key() + "' in " + ctx);
  }
}

const json& need(const json& o, const std::string& key,
                 const std::string& ctx) {
  auto it = o.find(key);
  if (it == o.end()) throw ConfigError("missing key '" + key + "' in " + ctx);
  return *it;
}

double need_num(const json& o, const std::string& key, const std::string& ctx) {
  const json& v = need(o, key, ctx);
  if (!v.is_number()) throw ConfigError("'" + key + "' must be a number");
  return v.get<double>();
}

int need_int(const json& o, const std::string& key, const std::string& ctx) {
  const json& v = need(o, key, ctx);
  if (!v.is_number_integer())
    throw ConfigError("'" + key + "' must be an integer");
  return v.get<int>();
}

// Eigenvalue lists admit plain numbers and {"value": v, "count": k} blocks.
std::vector<double> eig_list(const json& v, const std::string& ctx) {
  if (!v.is_array()) throw ConfigError(ctx + " must be an array");
  std::vector<double> out;
  for (const json& e : v) {
    if (e.is_number()) {
      out.push_back(e.get<double>());
    } else if (e.is_object()) {
      check_keys(e, {"value", "count"}, ctx + " entry");
      const double value = need_num(e, "value", ctx);
      const int count = need_int(e, "count", ctx);
      if (count < 1) throw ConfigError(ctx + " entry count must be >= 1");
      out.insert(out.end(), size_t(count), value);
    } else {
      throw ConfigError(ctx + " entries must be numbers or {value, count}");
    }
  }
  return out;
}

std::vector<std::vector<double>> matrix_list(const json& v,
                                             const std::string& ctx) {
  if (!v.is_array() || v.empty()) throw ConfigError(ctx + " must be an array");
  std::vector<std::vector<double>> out;
  if (v.front().is_number()) {
    out.push_back(eig_list(v, ctx));
    return out;
  }
  for (const json& row : v) out.push_back(eig_list(row, ctx + " row"));
  return out;
}

struct Experiment {
  rmt::ModelSpec model{rmt::IidCovariance{}};
  int p = 0;
  int n = 0;
  rmt::ZGrid grid = rmt::ZGrid::linspace(0.0, 5.0, 800, 0.01);
  rmt::SolverConfig solver;
  std::vector<std::uint64_t> seeds{1};
  int Q = 200;
  std::string config_hash;
};

rmt::ModelSpec parse_model(const json& m, int p, int n) {
  const std::string family = need(m, "family", "model").get<std::string>();
  if (family == "iid_covariance") {
    check_keys(m, {"family", "sigma_eigs"}, "model");
    return rmt::IidCovariance{eig_list(need(m, "sigma_eigs", "model"),
                                       "sigma_eigs")};
  }
  if (family == "separable") {
    check_keys(m, {"family", "a_eigs", "b_weights"}, "model");
    return rmt::Separable{eig_list(need(m, "a_eigs", "model"), "a_eigs"),
                          eig_list(need(m, "b_weights", "model"), "b_weights")};
  }
  if (family == "variance_profile") {
    check_keys(m, {"family", "profile"}, "model");
    return rmt::VarianceProfile{
        rmt::Expr::parse(need(m, "profile", "model").get<std::string>())};
  }
  if (family == "linear_process") {
    check_keys(m, {"family", "psi", "burn_in"}, "model");
    rmt::LinearProcess lp;
    lp.psi = matrix_list(need(m, "psi", "model"), "psi");
    if (m.contains("burn_in")) lp.burn_in = need_int(m, "burn_in", "model");
    return lp;
  }
  if (family == "diffusion_rcv") {
    check_keys(m, {"family", "gamma", "times", "drift_bound"}, "model");
    rmt::DiffusionRCV d{
        rmt::Expr::parse(need(m, "gamma", "model").get<std::string>()),
        {},
        0.0};
    const json& times = need(m, "times", "model");
    if (times.is_string() && times.get<std::string>() == "equally_spaced") {
      d.times.resize(size_t(n) + 1);
      for (int i = 0; i <= n; ++i) d.times[size_t(i)] = double(i) / n;
    } else {
      d.times = eig_list(times, "times");
    }
    if (m.contains("drift_bound"))
      d.drift_bound = need_num(m, "drift_bound", "model");
    return d;
  }
  if (family == "matrix_ar") {
    check_keys(m, {"family", "a_eigs", "b_diag", "t", "burn_in"}, "model");
    rmt::MatrixAR ar;
    ar.a_eigs = eig_list(need(m, "a_eigs", "model"), "a_eigs");
    ar.b_diag = eig_list(need(m, "b_diag", "model"), "b_diag");
    if (m.contains("t")) ar.t = need_int(m, "t", "model");
    if (m.contains("burn_in")) ar.burn_in = need_int(m, "burn_in", "model");
    return ar;
  }
  if (family == "finite_mixture") {
    check_keys(m, {"family", "eta", "component_eigs", "means"}, "model");
    rmt::FiniteMixture fm;
    fm.eta = eig_list(need(m, "eta", "model"), "eta");
    const json& comps = need(m, "component_eigs", "model");
    if (!comps.is_array()) throw ConfigError("component_eigs must be an array");
    for (const json& comp : comps)
      fm.component_eigs.push_back(eig_list(comp, "component_eigs entry"));
    if (m.contains("means")) {
      for (const json& mu : m["means"])
        fm.means.push_back(eig_list(mu, "means entry"));
    } else {
      fm.means.assign(fm.eta.size(), std::vector<double>(size_t(p), 0.0));
    }
    return fm;
  }
  throw ConfigError("unknown model family '" + family + "'");
  (void)p;
}

Experiment load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  const std::string bytes = ss.str();

  json cfg;
  try {
    cfg = json::parse(bytes);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  check_keys(cfg, {"model", "dims", "zgrid", "solver", "seeds", "Q"},
             "config");

  Experiment ex;
  ex.config_hash = fnv1a_hex(bytes);

  const json& dims = need(cfg, "dims", "config");
  check_keys(dims, {"p", "m", "n"}, "dims");
  if (dims.contains("p") == dims.contains("m"))
    throw ConfigError("dims needs exactly one of 'p' or 'm'");
  ex.p = dims.contains("p") ? need_int(dims, "p", "dims")
                            : need_int(dims, "m", "dims");
  ex.n = need_int(dims, "n", "dims");
  if (ex.p < 1 || ex.n < 1) throw ConfigError("dims must be positive");

  if (cfg.contains("zgrid")) {
    const json& zg = cfg["zgrid"];
    check_keys(zg, {"x_min", "x_max", "count", "eta"}, "zgrid");
    const double x_min = need_num(zg, "x_min", "zgrid");
    const double x_max = need_num(zg, "x_max", "zgrid");
    const int count = need_int(zg, "count", "zgrid");
    const double eta = need_num(zg, "eta", "zgrid");
    if (!(x_min < x_max) || count < 2 || !(eta > 0.0))
      throw ConfigError("zgrid needs x_min < x_max, count >= 2, eta > 0");
    ex.grid = rmt::ZGrid::linspace(x_min, x_max, count, eta);
  }
  if (cfg.contains("solver")) {
    const json& sv = cfg["solver"];
    check_keys(sv, {"tol", "max_iter", "damping"}, "solver");
    if (sv.contains("tol")) ex.solver.tol = need_num(sv, "tol", "solver");
    if (sv.contains("max_iter"))
      ex.solver.max_iter = need_int(sv, "max_iter", "solver");
    if (sv.contains("damping"))
      ex.solver.damping = need_num(sv, "damping", "solver");
  }
  if (cfg.contains("seeds")) {
    ex.seeds.clear();
    for (const json& s : cfg["seeds"]) {
      if (!s.is_number_integer() || s.get<long long>() < 0)
        throw ConfigError("seeds must be non-negative integers");
      ex.seeds.push_back(s.get<std::uint64_t>());
    }
    if (ex.seeds.empty()) throw ConfigError("seeds must be nonempty");
  }
  if (cfg.contains("Q")) {
    ex.Q = need_int(cfg, "Q", "config");
    if (ex.Q < 2) throw ConfigError("Q must be >= 2");
  }
  ex.model = parse_model(need(cfg, "model", "config"), ex.p, ex.n);
  return ex;
}

void write_text(const fs::path& path, const std::string& body) {
  fs::create_directories(path.parent_path().empty() ? "." : path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << body;
}

std::string csv_header(const Experiment& ex) {
  return "# " + std::string(kVersion) + "\n# config_hash " + ex.config_hash +
         "\n";
}

int cmd_simulate(const Experiment& ex, const fs::path& out_dir) {
  rmt::validate(ex.model, ex.p, ex.n);
  for (std::uint64_t seed : ex.seeds) {
    const rmt::DataMatrix X = rmt::simulate(ex.model, ex.p, ex.n, seed);
    const rmt::ESD e = rmt::esd(rmt::gram_covariance(X), X.n());
    std::string body = csv_header(ex) + "value\n";
    for (double v : e.eigenvalues) body += fmt(v) + "\n";
    write_text(out_dir / ("esd_seed" + std::to_string(seed) + ".csv"), body);
  }
  return 0;
}

int cmd_solve(const Experiment& ex, const fs::path& out_dir) {
  rmt::validate(ex.model, ex.p, ex.n);
  const rmt::LsdProblem prob = rmt::problem_for(ex.model, ex.p, ex.n, ex.Q);
  const rmt::LsdSolution sol = rmt::solve_lsd(prob, ex.grid, ex.solver);

  std::string body = csv_header(ex) + "x,rho\n";
  for (size_t i = 0; i < sol.density.x.size(); ++i)
    body += fmt(sol.density.x[i]) + "," + fmt(sol.density.rho[i]) + "\n";
  write_text(out_dir / "density.csv", body);

  double max_res = 0.0;
  for (size_t k = 0; k < sol.field.residual.size(); ++k)
    if (sol.field.converged[k])
      max_res = std::max(max_res, sol.field.residual[k]);
  json side;
  side["tool"] = kVersion;
  side["config_hash"] = ex.config_hash;
  side["c"] = prob.c;
  side["eta"] = sol.density.eta;
  side["Q"] = ex.Q;
  side["link"] = prob.link_descriptor;
  side["atom_at_zero"] = sol.density.atom_at_zero;
  side["converged_fraction"] = sol.density.converged_fraction;
  side["max_converged_residual"] = max_res;
  side["continuous_mass"] = sol.density.continuous_mass();
  write_text(out_dir / "density.json", side.dump(2) + "\n");

  if (sol.density.converged_fraction < 0.5) {
    std::cerr << "solver converged on less than half of the grid\n";
    return 4;
  }
  return 0;
}

int cmd_compare(const Experiment& ex, const fs::path& out_dir) {
  rmt::validate(ex.model, ex.p, ex.n);
  const rmt::LsdProblem prob = rmt::problem_for(ex.model, ex.p, ex.n, ex.Q);
  const rmt::LsdSolution sol = rmt::solve_lsd(prob, ex.grid, ex.solver);
  if (sol.density.converged_fraction < 0.5) {
    std::cerr << "solver converged on less than half of the grid\n";
    return 4;
  }

  json report;
  report["tool"] = kVersion;
  report["config_hash"] = ex.config_hash;
  report["atom_at_zero"] = sol.density.atom_at_zero;
  report["c"] = prob.c;
  json per_seed = json::array();

  const int bins = 60;
  const double lo = ex.grid.x.front(), hi = ex.grid.x.back();
  std::vector<double> ks_all, w1_all;
  for (std::uint64_t seed : ex.seeds) {
    const rmt::DataMatrix X = rmt::simulate(ex.model, ex.p, ex.n, seed);
    const rmt::ESD e = rmt::esd(rmt::gram_covariance(X), X.n());
    const rmt::ComparisonReport r = rmt::compare(e, sol.density, prob);
    ks_all.push_back(r.ks);
    w1_all.push_back(r.w1);
    json jr;
    jr["seed"] = seed;
    jr["ks"] = r.ks;
    jr["w1"] = r.w1;
    jr["moment_gap"] = r.moment_gap;
    jr["converged_fraction"] = r.converged_fraction;
    jr["p"] = r.p;
    jr["n"] = r.n;
    jr["eta"] = r.eta;
    jr["Q"] = ex.Q;
    per_seed.push_back(jr);

    const rmt::Histogram hist = rmt::histogram(e, bins, lo, hi);
    std::string body = csv_header(ex) + "x,hist_density,theory_density\n";
    for (int b = 0; b < bins; ++b) {
      const double center = 0.5 * (hist.edges[size_t(b)] +
                                   hist.edges[size_t(b) + 1]);
      // theory density linearly interpolated at the bin center
      double rho = 0.0;
      const auto& xs = sol.density.x;
      if (!xs.empty() && center >= xs.front() && center <= xs.back()) {
        const auto it = std::lower_bound(xs.begin(), xs.end(), center);
        const size_t j = std::min(size_t(it - xs.begin()), xs.size() - 1);
        if (j == 0 || xs[j] == center) {
          rho = sol.density.rho[j];
        } else {
          const double t = (center - xs[j - 1]) / (xs[j] - xs[j - 1]);
          rho = (1.0 - t) * sol.density.rho[j - 1] + t * sol.density.rho[j];
        }
      }
      body += fmt(center) + "," + fmt(hist.density[size_t(b)]) + "," +
              fmt(rho) + "\n";
    }
    write_text(out_dir / ("overlay_seed" + std::to_string(seed) + ".csv"),
               body);
  }
  report["reports"] = per_seed;
  auto median = [](std::vector<double> v) {
    std::sort(v.begin(), v.end());
    return v.size() % 2 ? v[v.size() / 2]
                        : 0.5 * (v[v.size() / 2 - 1] + v[v.size() / 2]);
  };
  report["median_ks"] = median(ks_all);
  report["max_ks"] = *std::max_element(ks_all.begin(), ks_all.end());
  report["median_w1"] = median(w1_all);
  report["max_w1"] = *std::max_element(w1_all.begin(), w1_all.end());
  write_text(out_dir / "report.json", report.dump(2) + "\n");
  return 0;
}

int cmd_list_models(bool as_json) {
  const std::vector<std::pair<std::string, std::string>> models = {
      {"iid_covariance", "sigma_eigs"},
      {"separable", "a_eigs, b_weights"},
      {"variance_profile", "profile"},
      {"linear_process", "psi, burn_in?"},
      {"diffusion_rcv", "gamma, times, drift_bound?"},
      {"matrix_ar", "a_eigs, b_diag, t?, burn_in?"},
      {"finite_mixture", "eta, component_eigs, means?"}};
  if (as_json) {
    json out = json::array();
    for (const auto& [name, params] : models) {
      json m;
      m["family"] = name;
      m["parameters"] = params;
      out.push_back(m);
    }
    std::cout << out.dump(2) << "\n";
  } else {
    for (const auto& [name, params] : models)
      std::cout << name << ": " << params << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spectral-law engine: simulate data matrices, solve LSD "
               "equations, compare spectra"};
  app.require_subcommand(1);

  std::string config_path, out_dir = ".", seeds_csv;
  double eta_override = -1.0, tol_override = -1.0;

  auto add_common = [&](CLI::App* sub, bool needs_config) {
    auto* c = sub->add_option("--config", config_path, "experiment JSON");
    if (needs_config) c->required();
    sub->add_option("--out", out_dir, "output directory");
    sub->add_option("--seeds", seeds_csv, "comma-separated seed override");
    sub->add_option("--eta", eta_override, "grid eta override");
    sub->add_option("--tol", tol_override, "solver tolerance override");
  };

  CLI::App* sim = app.add_subcommand("simulate", "write per-seed ESD CSVs");
  CLI::App* slv = app.add_subcommand("solve", "write density CSV + sidecar");
  CLI::App* cmp =
      app.add_subcommand("compare", "write comparison report + overlays");
  CLI::App* lst = app.add_subcommand("list-models", "catalog of families");
  bool list_json = false;
  lst->add_flag("--json", list_json, "machine-readable catalog");
  add_common(sim, true);
  add_common(slv, true);
  add_common(cmp, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  if (lst->parsed()) return cmd_list_models(list_json);

  try {
    Experiment ex = load_config(config_path);
    if (!seeds_csv.empty()) {
      ex.seeds.clear();
      std::stringstream ss(seeds_csv);
      std::string tok;
      while (std::getline(ss, tok, ','))
        ex.seeds.push_back(std::stoull(tok));
      if (ex.seeds.empty()) throw ConfigError("empty --seeds override");
    }
    if (eta_override > 0.0) ex.grid.eta = eta_override;
    if (tol_override > 0.0) ex.solver.tol = tol_override;

    if (sim->parsed()) return cmd_simulate(ex, out_dir);
    if (slv->parsed()) return cmd_solve(ex, out_dir);
    if (cmp->parsed()) return cmd_compare(ex, out_dir);
    return 1;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const rmt::ExprParseError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const rmt::SimulateError& e) {
    std::cerr << "model error: " << e.what() << "\n";
    return 3;
  } catch (const rmt::MeasureError& e) {
    std::cerr << "model error: " << e.what() << "\n";
    return 3;
  } catch (const rmt::NothingConverged& e) {
    std::cerr << "solver error: " << e.what() << "\n";
    return 4;
  } catch (const rmt::KernelError& e) {
    std::cerr << "model error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

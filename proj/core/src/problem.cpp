#include "optexec/problem.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <nlohmann/json.hpp>
#include <sstream>
#include <stdexcept>

namespace optexec {

namespace {

constexpr double kGammaStar = 0.4150374992788438;  // 2 - log(3)/log(2)

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

double parse_double(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    const double x = std::stod(value, &pos);
    if (pos != value.size()) throw std::invalid_argument("trailing characters");
    return x;
  } catch (const std::exception&) {
    throw std::invalid_argument("config: bad numeric value for '" + key + "': " + value);
  }
}

int parse_int(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    const int x = std::stoi(value, &pos);
    if (pos != value.size()) throw std::invalid_argument("trailing characters");
    return x;
  } catch (const std::exception&) {
    throw std::invalid_argument("config: bad integer value for '" + key + "': " + value);
  }
}

std::uint64_t parse_u64(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    const std::uint64_t x = std::stoull(value, &pos);
    if (pos != value.size()) throw std::invalid_argument("trailing characters");
    return x;
  } catch (const std::exception&) {
    throw std::invalid_argument("config: bad unsigned value for '" + key + "': " + value);
  }
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  throw std::invalid_argument("config: bad boolean value for '" + key + "': " + value);
}

SolverKind parse_solver(const std::string& value) {
  if (value == "dham") return SolverKind::dham;
  if (value == "dang") return SolverKind::dang;
  if (value == "perturbative") return SolverKind::perturbative;
  if (value == "multistart") return SolverKind::multistart;
  if (value == "monotone") return SolverKind::monotone;
  throw std::invalid_argument("config: unknown solver type '" + value + "'");
}

RegularizationKind parse_regularization(const std::string& value) {
  if (value == "none") return RegularizationKind::none;
  if (value == "spread") return RegularizationKind::spread;
  if (value == "concave_convex") return RegularizationKind::concave_convex;
  throw std::invalid_argument("config: unknown regularization type '" + value + "'");
}

}  // namespace

std::string to_string(SolverKind k) {
  switch (k) {
    case SolverKind::dham: return "dham";
    case SolverKind::dang: return "dang";
    case SolverKind::perturbative: return "perturbative";
    case SolverKind::multistart: return "multistart";
    case SolverKind::monotone: return "monotone";
  }
  return "multistart";
}

std::string to_string(RegularizationKind k) {
  switch (k) {
    case RegularizationKind::none: return "none";
    case RegularizationKind::spread: return "spread";
    case RegularizationKind::concave_convex: return "concave_convex";
  }
  return "none";
}

double ProblemSpec::effective_delta() const {
  if (solver == SolverKind::perturbative) {
    const double eps = std::isnan(perturbative_eps) ? 1.0 - delta : perturbative_eps;
    return 1.0 - eps;
  }
  return delta;
}

void ProblemSpec::validate() const {
  grid.validate();
  if (!(gamma > 0.0) || !(gamma < 1.0))
    throw std::invalid_argument("spec: gamma must lie in (0, 1)");
  const double d_eff = effective_delta();
  if (!(d_eff > 0.0)) throw std::invalid_argument("spec: delta must be positive");
  if (!allow_manipulation_region) {
    if (gamma + d_eff < 1.0 - 1e-12 || gamma < kGammaStar - 1e-12) {
      std::ostringstream msg;
      msg << "spec: (gamma=" << gamma << ", delta=" << d_eff
          << ") violates the no-dynamic-arbitrage region (requires gamma + delta >= 1 "
             "and gamma >= 0.415); set problem.allow_manipulation_region = true to "
             "override";
      throw std::invalid_argument(msg.str());
    }
  }
  if (regularization == RegularizationKind::spread && spread_ratio < 0.0)
    throw std::invalid_argument("spec: spread ratio r must be >= 0");
  if (regularization == RegularizationKind::concave_convex) {
    if (cc_d < 0.0) throw std::invalid_argument("spec: concave-convex d must be >= 0");
    if (!(cc_market_volume > 0.0))
      throw std::invalid_argument("spec: market_volume must be > 0");
    if (!(cc_scale > 0.0)) throw std::invalid_argument("spec: c must be > 0");
  }
  if (dham_order < 1) throw std::invalid_argument("spec: order must be >= 1");
  if (hbar_count < 1) throw std::invalid_argument("spec: hbar_count must be >= 1");
  if (!(hbar_min < hbar_max) || !(hbar_min < 0.0))
    throw std::invalid_argument("spec: hbar grid must lie in negative territory");
  if (dham_init != "gss" && dham_init != "vwap")
    throw std::invalid_argument("spec: init must be 'gss' or 'vwap'");
  if (starts < 1) throw std::invalid_argument("spec: starts must be >= 1");
  if (!(lambda_tolerance > 0.0))
    throw std::invalid_argument("spec: lambda_tolerance must be > 0");
}

ImpactModel ProblemSpec::impact_model() const {
  if (regularization == RegularizationKind::concave_convex)
    return ConcaveConvex{cc_scale, delta, cc_d, cc_market_volume / grid.T};
  return PowerLaw{effective_delta()};
}

double ProblemSpec::spread_value() const {
  if (regularization != RegularizationKind::spread || spread_ratio == 0.0) return 0.0;
  return spread_coefficient(spread_ratio, gamma, impact_model(), grid.X, grid.T);
}

CostModel ProblemSpec::make_model() const {
  return make_cost_model(impact_model(), make_kernel_matrices(gamma, grid), grid,
                         spread_value());
}

ProblemSpec parse_config_text(const std::string& text) {
  ProblemSpec spec;
  using Setter = std::function<void(ProblemSpec&, const std::string&, const std::string&)>;
  static const std::map<std::string, Setter> setters = {
      {"problem.gamma", [](ProblemSpec& s, const std::string& k, const std::string& v) { s.gamma = parse_double(k, v); }},
      {"problem.delta", [](ProblemSpec& s, const std::string& k, const std::string& v) { s.delta = parse_double(k, v); }},
      {"problem.N", [](ProblemSpec& s, const std::string& k, const std::string& v) { s.grid.N = parse_int(k, v); }},
      {"problem.T", [](ProblemSpec& s, const std::string& k, const std::string& v) { s.grid.T = parse_double(k, v); }},
      {"problem.X", [](ProblemSpec& s, const std::string& k, const std::string& v) { s.grid.X = parse_double(k, v); }},
      {"problem.allow_manipulation_region", [](ProblemSpec& s, const std::string& k, const std::string& v) { s.allow_manipulation_region = parse_bool(k, v); }},
      {"regularization.type", [](ProblemSpec& s, const std::string&, const std::string& v) { s.regularization = parse_regularization(v); }},
      {"regularization.r", [](ProblemSpec& s, const std::string& k, const std::string& v) { s.spread_ratio = parse_double(k, v); }},
      {"regularization.d", [](ProblemSpec& s, const std::string& k, const std::string& v) { s.cc_d = parse_double(k, v); }},
      {"regularization.market_volume", [](ProblemSpec& s, const std::string& k, const std::string& v) { s.cc_market_volume = parse_double(k, v); }},
      {"regularization.c", [](ProblemSpec& s, const std::string& k, const std::string& v) { s.cc_scale = parse_double(k, v); }},
      {"solver.type", [](ProblemSpec& s, const std::string&, const std::string& v) { s.solver = parse_solver(v); }},
      {"solver.order", [](ProblemSpec& s, const std::string& k, const std::string& v) { s.dham_order = parse_int(k, v); }},
      {"solver.hbar_min", [](ProblemSpec& s, const std::string& k, const std::string& v) { s.hbar_min = parse_double(k, v); }},
      {"solver.hbar_max", [](ProblemSpec& s, const std::string& k, const std::string& v) { s.hbar_max = parse_double(k, v); }},
      {"solver.hbar_count", [](ProblemSpec& s, const std::string& k, const std::string& v) { s.hbar_count = parse_int(k, v); }},
      {"solver.init", [](ProblemSpec& s, const std::string&, const std::string& v) { s.dham_init = v; }},
      {"solver.lambda_tolerance", [](ProblemSpec& s, const std::string& k, const std::string& v) { s.lambda_tolerance = parse_double(k, v); }},
      {"solver.epsilon", [](ProblemSpec& s, const std::string& k, const std::string& v) { s.dang_epsilon = parse_double(k, v); }},
      {"solver.max_iterations", [](ProblemSpec& s, const std::string& k, const std::string& v) { s.max_iterations = parse_int(k, v); }},
      {"solver.mean_field_window", [](ProblemSpec& s, const std::string& k, const std::string& v) { s.mean_field_window = parse_int(k, v); }},
      {"solver.rel_std_threshold", [](ProblemSpec& s, const std::string& k, const std::string& v) { s.rel_std_threshold = parse_double(k, v); }},
      {"solver.eps", [](ProblemSpec& s, const std::string& k, const std::string& v) { s.perturbative_eps = parse_double(k, v); }},
      {"solver.starts", [](ProblemSpec& s, const std::string& k, const std::string& v) { s.starts = parse_int(k, v); }},
      {"solver.seed", [](ProblemSpec& s, const std::string& k, const std::string& v) { s.seed = parse_u64(k, v); }},
      {"solver.gradient_tolerance", [](ProblemSpec& s, const std::string& k, const std::string& v) { s.gradient_tolerance = parse_double(k, v); }},
      {"solver.step_tolerance", [](ProblemSpec& s, const std::string& k, const std::string& v) { s.step_tolerance = parse_double(k, v); }},
      {"solver.workers", [](ProblemSpec& s, const std::string& k, const std::string& v) { s.workers = parse_int(k, v); }},
      {"output.report", [](ProblemSpec& s, const std::string&, const std::string& v) { s.out_report = v; }},
      {"output.profile", [](ProblemSpec& s, const std::string&, const std::string& v) { s.out_profile = v; }},
      {"output.curve", [](ProblemSpec& s, const std::string&, const std::string& v) { s.out_curve = v; }},
      {"output.starts_csv", [](ProblemSpec& s, const std::string&, const std::string& v) { s.out_starts_csv = v; }},
      {"output.landscape", [](ProblemSpec& s, const std::string&, const std::string& v) { s.out_landscape = v; }},
      {"output.spectra", [](ProblemSpec& s, const std::string&, const std::string& v) { s.out_spectra = v; }},
  };

  std::istringstream in(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw std::invalid_argument("config: malformed section header at line " +
                                    std::to_string(lineno));
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config: expected key = value at line " +
                                  std::to_string(lineno));
    const std::string key = section + "." + trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const auto it = setters.find(key);
    if (it == setters.end())
      throw std::invalid_argument("config: unknown key '" + key + "'");
    it->second(spec, key, value);
  }
  return spec;
}

ProblemSpec parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("config: cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

std::string default_config_text() {
  const ProblemSpec d;
  std::ostringstream out;
  out << "# optexec configuration (all values shown are the defaults)\n"
      << "[problem]\n"
      << "gamma = " << d.gamma << "\n"
      << "delta = " << d.delta << "\n"
      << "N = " << d.grid.N << "\n"
      << "T = " << d.grid.T << "\n"
      << "X = " << d.grid.X << "\n"
      << "# accept (gamma, delta) outside the no-dynamic-arbitrage region\n"
      << "allow_manipulation_region = false\n\n"
      << "[regularization]\n"
      << "# none | spread | concave_convex\n"
      << "type = none\n"
      << "# spread: half bid-ask spread as a ratio of VWAP impact cost\n"
      << "r = " << d.spread_ratio << "\n"
      << "# concave_convex: convex weight, market volume X_M, scale c\n"
      << "d = " << d.cc_d << "\n"
      << "market_volume = " << d.cc_market_volume << "\n"
      << "c = " << d.cc_scale << "\n\n"
      << "[solver]\n"
      << "# dham | dang | perturbative | multistart | monotone\n"
      << "type = multistart\n"
      << "order = " << d.dham_order << "          # dham series truncation\n"
      << "hbar_min = " << d.hbar_min << "    # dham convergence-control grid\n"
      << "hbar_max = " << d.hbar_max << "\n"
      << "hbar_count = " << d.hbar_count << "\n"
      << "init = gss           # dham initial guess: gss | vwap\n"
      << "lambda_tolerance = " << d.lambda_tolerance
      << "   # volume-constraint tolerance relative to X\n"
      << "epsilon = " << d.dang_epsilon << "     # dang impact perturbation\n"
      << "max_iterations = 0       # 0: solver default (dang 500, optimizers 2000)\n"
      << "mean_field_window = " << d.mean_field_window << "\n"
      << "rel_std_threshold = " << d.rel_std_threshold << "\n"
      << "eps = nan            # perturbative nonlinearity; nan -> 1 - delta\n"
      << "starts = " << d.starts << "\n"
      << "seed = " << d.seed << "\n"
      << "gradient_tolerance = " << d.gradient_tolerance
      << "   # < 0: 1e-9 * gradient scale\n"
      << "step_tolerance = " << d.step_tolerance << "\n"
      << "workers = " << d.workers << "        # 0: OPTEXEC_THREADS or hardware\n\n"
      << "[output]\n"
      << "report = \n"
      << "profile = \n"
      << "curve = \n"
      << "starts_csv = \n"
      << "landscape = \n"
      << "spectra = \n";
  return out.str();
}

namespace {

nlohmann::json spec_to_json(const ProblemSpec& s) {
  nlohmann::json j;
  j["gamma"] = s.gamma;
  j["delta"] = s.delta;
  j["N"] = s.grid.N;
  j["T"] = s.grid.T;
  j["X"] = s.grid.X;
  j["allow_manipulation_region"] = s.allow_manipulation_region;
  j["regularization"] = to_string(s.regularization);
  j["r"] = s.spread_ratio;
  j["d"] = s.cc_d;
  j["market_volume"] = s.cc_market_volume;
  j["c"] = s.cc_scale;
  j["solver"] = to_string(s.solver);
  j["order"] = s.dham_order;
  j["hbar_min"] = s.hbar_min;
  j["hbar_max"] = s.hbar_max;
  j["hbar_count"] = s.hbar_count;
  j["init"] = s.dham_init;
  j["lambda_tolerance"] = s.lambda_tolerance;
  j["epsilon"] = s.dang_epsilon;
  j["max_iterations"] = s.max_iterations;
  j["mean_field_window"] = s.mean_field_window;
  j["rel_std_threshold"] = s.rel_std_threshold;
  if (!std::isnan(s.perturbative_eps)) j["eps"] = s.perturbative_eps;
  j["starts"] = s.starts;
  j["seed"] = s.seed;
  j["gradient_tolerance"] = s.gradient_tolerance;
  j["step_tolerance"] = s.step_tolerance;
  return j;
}

ProblemSpec spec_from_json(const nlohmann::json& j) {
  ProblemSpec s;
  s.gamma = j.at("gamma").get<double>();
  s.delta = j.at("delta").get<double>();
  s.grid.N = j.at("N").get<int>();
  s.grid.T = j.at("T").get<double>();
  s.grid.X = j.at("X").get<double>();
  s.allow_manipulation_region = j.value("allow_manipulation_region", false);
  s.regularization = parse_regularization(j.value("regularization", "none"));
  s.spread_ratio = j.value("r", 0.0);
  s.cc_d = j.value("d", 0.0);
  s.cc_market_volume = j.value("market_volume", 1.0);
  s.cc_scale = j.value("c", 1.0);
  s.solver = parse_solver(j.value("solver", "multistart"));
  s.dham_order = j.value("order", 7);
  s.hbar_min = j.value("hbar_min", -120.0);
  s.hbar_max = j.value("hbar_max", 0.0);
  s.hbar_count = j.value("hbar_count", 121);
  s.dham_init = j.value("init", "gss");
  s.lambda_tolerance = j.value("lambda_tolerance", 1e-3);
  s.dang_epsilon = j.value("epsilon", 1e-6);
  s.max_iterations = j.value("max_iterations", 0);
  s.mean_field_window = j.value("mean_field_window", 20);
  s.rel_std_threshold = j.value("rel_std_threshold", 1e-9);
  s.perturbative_eps =
      j.contains("eps") ? j.at("eps").get<double>() : std::numeric_limits<double>::quiet_NaN();
  s.starts = j.value("starts", 100);
  s.seed = j.value("seed", std::uint64_t{12345});
  s.gradient_tolerance = j.value("gradient_tolerance", -1.0);
  s.step_tolerance = j.value("step_tolerance", 1e-8);
  return s;
}

}  // namespace

void save_report_json(const std::string& path, const ProblemSpec& spec,
                      const SolverReport& report) {
  nlohmann::json j;
  j["schema"] = "optexec/report-v1";
  j["spec"] = spec_to_json(spec);
  j["solver"] = report.solver;
  j["strategy"] = {
      {"N", report.strategy.grid.N},
      {"T", report.strategy.grid.T},
      {"X", report.strategy.grid.X},
      {"rates", std::vector<double>(report.strategy.rates.data(),
                                    report.strategy.rates.data() +
                                        report.strategy.rates.size())}};
  j["cost"] = report.cost;
  j["spread_component"] = report.spread_component;
  j["constraint_violation"] = report.constraint_violation;
  if (report.squared_residual) j["squared_residual"] = *report.squared_residual;
  if (report.hbar) j["hbar"] = *report.hbar;
  if (report.lambda) j["lambda"] = *report.lambda;
  j["iterations"] = report.iterations;
  j["converged"] = report.converged;
  j["stationarity"] = report.stationarity;
  j["wall_time_s"] = report.wall_time_s;
  j["seed"] = report.seed;
  if (!report.message.empty()) j["message"] = report.message;
  if (!report.residual_curve.empty()) {
    auto& curve = j["residual_curve"] = nlohmann::json::array();
    for (const auto& [h, e] : report.residual_curve) {
      if (std::isfinite(e))
        curve.push_back({h, e});
      else
        curve.push_back({h, nullptr});
    }
  }
  if (!report.mean_field_trace.empty()) j["mean_field_trace"] = report.mean_field_trace;

  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_report_json: cannot open " + path);
  out << j.dump(2) << '\n';
}

LoadedReport load_report_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_report_json: cannot open " + path);
  nlohmann::json j;
  in >> j;

  LoadedReport loaded;
  loaded.spec = spec_from_json(j.at("spec"));
  SolverReport& r = loaded.report;
  r.solver = j.value("solver", "");
  const auto& js = j.at("strategy");
  GridSpec grid{js.at("N").get<int>(), js.at("T").get<double>(), js.at("X").get<double>()};
  const auto rates = js.at("rates").get<std::vector<double>>();
  r.strategy.grid = grid;
  r.strategy.rates = Eigen::Map<const Eigen::VectorXd>(rates.data(), rates.size());
  r.cost = j.at("cost").get<double>();
  r.spread_component = j.value("spread_component", 0.0);
  r.constraint_violation = j.value("constraint_violation", 0.0);
  if (j.contains("squared_residual")) r.squared_residual = j["squared_residual"].get<double>();
  if (j.contains("hbar")) r.hbar = j["hbar"].get<double>();
  if (j.contains("lambda")) r.lambda = j["lambda"].get<double>();
  r.iterations = j.value("iterations", 0);
  r.converged = j.value("converged", false);
  r.stationarity = j.value("stationarity", 0.0);
  r.wall_time_s = j.value("wall_time_s", 0.0);
  r.seed = j.value("seed", std::uint64_t{0});
  r.message = j.value("message", "");
  return loaded;
}

}  // namespace optexec

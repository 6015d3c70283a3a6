#include "optexec/landscape.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <fstream>
#include <nlohmann/json.hpp>
#include <stdexcept>

#include "optexec/linalg.hpp"
#include "optexec/parallel.hpp"

namespace optexec {

std::string to_string(StationaryClass c) {
  switch (c) {
    case StationaryClass::minimum: return "minimum";
    case StationaryClass::saddle: return "saddle";
    case StationaryClass::maximum: return "maximum";
    case StationaryClass::indeterminate: return "indeterminate";
  }
  return "indeterminate";
}

namespace {

Eigen::VectorXd projected_hessian_eigenvalues(const CostModel& model,
                                              const Eigen::VectorXd& rates) {
  const int n = static_cast<int>(rates.size());
  const Eigen::MatrixXd H = cost_hessian(model, rates);
  const Eigen::MatrixXd Z = zero_sum_basis(n);
  const Eigen::MatrixXd Hp = Z.transpose() * H * Z;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (Hp + Hp.transpose()),
                                                    Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

void check_stationary(const CostModel& model, const Strategy& s) {
  const Eigen::MatrixXd Z = zero_sum_basis(s.grid.N);
  const double pg = (Z.transpose() * cost_gradient(model, s.rates)).norm();
  if (pg > 1e-6 * gradient_scale(model))
    throw std::invalid_argument(
        "landscape: point is not stationary (projected gradient too large)");
}

}  // namespace

StationaryClass classify_stationary_point(const CostModel& model, const Strategy& s,
                                          double tol_eig_rel) {
  check_stationary(model, s);
  const Eigen::VectorXd eig = projected_hessian_eigenvalues(model, s.rates);
  const double tol = tol_eig_rel * std::max(eig.cwiseAbs().maxCoeff(), 1e-300);
  bool any_zero = false, any_pos = false, any_neg = false;
  for (Eigen::Index k = 0; k < eig.size(); ++k) {
    if (std::abs(eig[k]) <= tol) any_zero = true;
    else if (eig[k] > 0.0) any_pos = true;
    else any_neg = true;
  }
  if (any_zero) return StationaryClass::indeterminate;
  if (any_pos && any_neg) return StationaryClass::saddle;
  return any_pos ? StationaryClass::minimum : StationaryClass::maximum;
}

SpectrumResult spectrum(const CostModel& model, const Strategy& s) {
  check_stationary(model, s);
  Eigen::VectorXd eig = projected_hessian_eigenvalues(model, s.rates);
  std::sort(eig.data(), eig.data() + eig.size(), std::greater<double>());
  SpectrumResult out;
  out.eigenvalues = eig;
  double pos_max = 0.0, pos_min = 0.0;
  bool found = false;
  for (Eigen::Index k = 0; k < eig.size(); ++k) {
    if (eig[k] > 0.0) {
      if (!found) {
        pos_max = pos_min = eig[k];
        found = true;
      } else {
        pos_min = eig[k];
      }
    }
  }
  if (found && pos_min > 0.0 && pos_max > pos_min)
    out.log10_spread = std::log10(pos_max / pos_min);
  return out;
}

Eigen::MatrixXd distance_matrix(const std::vector<Strategy>& strategies) {
  const std::size_t n = strategies.size();
  if (n == 0) return Eigen::MatrixXd();
  const Eigen::Index len = strategies.front().rates.size();
  for (const auto& s : strategies)
    if (s.rates.size() != len)
      throw std::invalid_argument("distance_matrix: strategies have unequal lengths");
  Eigen::MatrixXd D = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t a = 0; a < n; ++a) {
    const double dt = strategies[a].grid.dt();
    for (std::size_t b = a + 1; b < n; ++b) {
      const double d = (strategies[a].rates - strategies[b].rates).norm() * dt;
      D(a, b) = D(b, a) = d;
    }
  }
  return D;
}

LandscapeStats summarize(const std::vector<ExtremumRecord>& extrema) {
  LandscapeStats st;
  st.n_extrema = static_cast<int>(extrema.size());
  std::vector<double> minima_costs;
  for (const auto& e : extrema) {
    switch (e.classification) {
      case StationaryClass::minimum:
        ++st.n_minima;
        minima_costs.push_back(e.cost);
        if (e.cost < 0.0) ++st.negative_cost_minima;
        break;
      case StationaryClass::saddle: ++st.n_saddles; break;
      case StationaryClass::maximum: ++st.n_maxima; break;
      case StationaryClass::indeterminate: ++st.n_indeterminate; break;
    }
  }
  if (minima_costs.size() < 2)
    throw std::invalid_argument("summarize: needs at least two minima");
  st.fraction_minima = static_cast<double>(st.n_minima) / st.n_extrema;

  const double n = static_cast<double>(minima_costs.size());
  double mean = 0.0;
  for (double c : minima_costs) mean += c;
  mean /= n;
  double m2 = 0.0, m3 = 0.0, m4 = 0.0;
  for (double c : minima_costs) {
    const double d = c - mean;
    m2 += d * d;
    m3 += d * d * d;
    m4 += d * d * d * d;
  }
  m2 /= n;
  m3 /= n;
  m4 /= n;
  st.mean = mean;
  st.stddev = std::sqrt(m2);
  st.skewness = m2 > 0.0 ? m3 / std::pow(m2, 1.5) : 0.0;
  st.kurtosis = m2 > 0.0 ? m4 / (m2 * m2) : 0.0;
  return st;
}

LandscapeReport analyze_landscape(const CostModel& model,
                                  const std::vector<SolverReport>& extrema,
                                  const LandscapeOptions& opts) {
  LandscapeReport report;
  report.extrema.resize(extrema.size());
  parallel_for(
      extrema.size(),
      [&](std::size_t k) {
        ExtremumRecord rec;
        rec.strategy = extrema[k].strategy;
        rec.cost = extrema[k].cost;
        try {
          rec.classification = classify_stationary_point(model, rec.strategy);
        } catch (const std::invalid_argument&) {
          rec.classification = StationaryClass::indeterminate;
        }
        report.extrema[k] = std::move(rec);
      },
      opts.workers);

  if (opts.with_spectra) {
    const std::size_t count = std::min<std::size_t>(opts.max_spectra, extrema.size());
    report.spectra.resize(count);
    parallel_for(
        count,
        [&](std::size_t k) { report.spectra[k] = spectrum(model, extrema[k].strategy); },
        opts.workers);
  }

  if (opts.with_distances) {
    std::vector<Strategy> all;
    all.reserve(extrema.size() + opts.references.size());
    for (const auto& e : extrema) all.push_back(e.strategy);
    for (const auto& r : opts.references) all.push_back(r);
    report.distances = distance_matrix(all);
  }

  report.stats = summarize(report.extrema);
  return report;
}

void write_landscape_json(const std::string& path, const LandscapeReport& report) {
  nlohmann::json j;
  j["schema"] = "optexec/landscape-v1";
  auto& ex = j["extrema"] = nlohmann::json::array();
  for (const auto& e : report.extrema) {
    nlohmann::json item;
    item["cost"] = e.cost;
    item["classification"] = to_string(e.classification);
    item["rates"] = std::vector<double>(e.strategy.rates.data(),
                                        e.strategy.rates.data() + e.strategy.rates.size());
    ex.push_back(std::move(item));
  }
  j["stats"] = {{"mean", report.stats.mean},
                {"stddev", report.stats.stddev},
                {"skewness", report.stats.skewness},
                {"kurtosis", report.stats.kurtosis},
                {"fraction_minima", report.stats.fraction_minima},
                {"negative_cost_minima", report.stats.negative_cost_minima},
                {"n_extrema", report.stats.n_extrema},
                {"n_minima", report.stats.n_minima},
                {"n_saddles", report.stats.n_saddles},
                {"n_maxima", report.stats.n_maxima},
                {"n_indeterminate", report.stats.n_indeterminate}};
  if (report.distances.size() > 0) {
    auto& d = j["distance_matrix"] = nlohmann::json::array();
    for (Eigen::Index r = 0; r < report.distances.rows(); ++r) {
      std::vector<double> row(report.distances.cols());
      for (Eigen::Index c = 0; c < report.distances.cols(); ++c)
        row[c] = report.distances(r, c);
      d.push_back(row);
    }
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_landscape_json: cannot open " + path);
  out << j.dump(2) << '\n';
}

void write_spectra_csv(const std::string& path, const LandscapeReport& report) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_spectra_csv: cannot open " + path);
  out << "extremum_id,rank,eigenvalue,log10_spread\n";
  for (std::size_t k = 0; k < report.spectra.size(); ++k) {
    const auto& sp = report.spectra[k];
    for (Eigen::Index r = 0; r < sp.eigenvalues.size(); ++r)
      out << k << ',' << r << ',' << format_double(sp.eigenvalues[r]) << ','
          << format_double(sp.log10_spread) << '\n';
  }
}

}  // namespace optexec

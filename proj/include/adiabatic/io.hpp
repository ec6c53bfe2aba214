#pragma once

// JSON reports, CSV time series and the sampled-model file format.
// Floating point output is rounded to 12 significant digits so that
// identical runs produce identical bytes.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <ostream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "adiabatic/analysis.hpp"
#include "adiabatic/counterexample.hpp"
#include "adiabatic/hamiltonian.hpp"
#include "adiabatic/propagation.hpp"
#include "adiabatic/spectral.hpp"

namespace adiabatic {

using Json = nlohmann::ordered_json;

inline std::string format_number(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", value);
  return buf;
}

inline double round12(double value) {
  if (!std::isfinite(value)) return value;
  return std::strtod(format_number(value).c_str(), nullptr);
}

/// Rounded number, or null for non-finite values.
inline Json json_number(double value) {
  if (!std::isfinite(value)) return nullptr;
  return round12(value);
}

inline Json json_array(const std::vector<double>& values) {
  Json out = Json::array();
  for (double v : values) out.push_back(json_number(v));
  return out;
}

inline Json json_pair(std::size_t n, std::size_t m) { return Json::array({n + 1, m + 1}); }

inline const char* convention_name(PhaseConvention c) {
  return c == PhaseConvention::FullAlpha ? "full" : "dynamical";
}

// -- sampled model file ---------------------------------------------------

/// {"dim": N, "times": [...], "matrices": [[[re, im], ...], ...]}, each
/// matrix a flat row-major list of N*N entries.
inline SampledGeneric sampled_from_json(const nlohmann::json& doc) {
  try {
    const auto dim = doc.at("dim").get<long long>();
    detail::require(dim >= 1, ErrorCode::InvalidArgument, "dim must be positive");
    const auto times = doc.at("times").get<std::vector<double>>();
    const auto& mats = doc.at("matrices");
    detail::require(mats.is_array() && mats.size() == times.size(), ErrorCode::InvalidArgument,
                    "matrices must match times in length");
    std::vector<Matrix> matrices;
    matrices.reserve(mats.size());
    for (const auto& entries : mats) {
      detail::require(entries.is_array() && entries.size() == static_cast<std::size_t>(dim * dim),
                      ErrorCode::InvalidArgument, "each matrix needs dim*dim entries");
      Matrix m(dim, dim);
      for (long long i = 0; i < dim * dim; ++i) {
        const auto& z = entries[static_cast<std::size_t>(i)];
        detail::require(z.is_array() && z.size() == 2, ErrorCode::InvalidArgument,
                        "entries are [re, im] pairs");
        m(i / dim, i % dim) = Complex(z[0].get<double>(), z[1].get<double>());
      }
      matrices.push_back(std::move(m));
    }
    return SampledGeneric(times, std::move(matrices));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidArgument, std::string("malformed sampled model: ") + e.what());
  }
}

inline SampledGeneric load_sampled_model(const std::string& path) {
  std::ifstream in(path);
  detail::require(in.good(), ErrorCode::InvalidArgument, "cannot open " + path);
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidArgument, path + ": " + e.what());
  }
  return sampled_from_json(doc);
}

inline nlohmann::json sampled_to_json(const SampledGeneric& model) {
  nlohmann::json doc;
  const Index n = model.dimension();
  doc["dim"] = n;
  doc["times"] = model.times();
  doc["matrices"] = nlohmann::json::array();
  for (const Matrix& m : model.matrices()) {
    nlohmann::json entries = nlohmann::json::array();
    for (Index i = 0; i < n; ++i)
      for (Index j = 0; j < n; ++j) entries.push_back({m(i, j).real(), m(i, j).imag()});
    doc["matrices"].push_back(std::move(entries));
  }
  return doc;
}

// -- reports --------------------------------------------------------------

inline Json to_json(const ConditionReport& report, bool include_series = false) {
  Json out;
  out["max_ratio"] = json_number(report.max_ratio);
  out["arg_max"] = {{"pair", json_pair(report.arg_n, report.arg_m)},
                    {"t", json_number(report.arg_time())}};
  if (include_series) {
    Json series;
    std::vector<double> t(report.grid.nodes());
    for (std::size_t k = 0; k < t.size(); ++k) t[k] = report.grid.time(k);
    series["t"] = json_array(t);
    series["pairs"] = Json::array();
    for (const auto& p : report.pairs)
      series["pairs"].push_back({{"pair", json_pair(p.n, p.m)}, {"ratio", json_array(p.ratio)}});
    out["series"] = std::move(series);
  }
  return out;
}

inline Json to_json(const NecessityResidual& residual) {
  Json out;
  out["window"] = json_number(residual.window);
  out["pairs"] = Json::array();
  for (const auto& p : residual.pairs)
    out["pairs"].push_back({{"pair", json_pair(p.m, p.n)},
                            {"max_coefficient_over_ratio_min", json_number(p.min_window_ratio)},
                            {"max_coefficient_over_ratio_max", json_number(p.max_window_ratio)}});
  return out;
}

inline Json to_json(const AdiabaticReport& report, bool include_series = false) {
  Json out;
  out["level"] = report.level + 1;
  out["phase_convention"] = convention_name(report.convention);
  out["condition"] = to_json(report.condition, include_series);
  out["fidelity"] = {{"min", json_number(report.min_fidelity)},
                     {"argmin_t", json_number(report.argmin_time())}};
  out["coefficient_max"] = json_array(report.coefficient_max);
  out["norm_drift"] = json_number(report.norm_drift);
  if (report.rates) {
    out["bloch"] = {{"exact_rate", json_number(report.rates->exact_rate)},
                    {"reference_rate", json_number(report.rates->reference_rate)},
                    {"rate_ratio", json_number(report.rates->ratio())},
                    {"rates_agree", report.rates->agree}};
  }
  out["thresholds"] = {{"condition", json_number(report.thresholds.condition)},
                       {"fidelity", json_number(report.thresholds.fidelity)},
                       {"rate_tolerance", json_number(report.thresholds.rate_tolerance)}};
  out["verdicts"] = {{"condition_satisfied", report.condition_satisfied},
                     {"approximation_valid", report.approximation_valid}};
  if (include_series) out["fidelity_series"] = json_array(report.fidelity);
  return out;
}

inline Json to_json(const PairEvaluation& eval) {
  Json out;
  out["ratio_a"] = json_number(eval.ratio_a);
  out["ratio_b"] = json_number(eval.ratio_b);
  out["min_fidelity_a"] = json_number(eval.min_fidelity_a);
  out["min_fidelity_b"] = json_number(eval.min_fidelity_b);
  out["at_least_one_invalid"] = eval.at_least_one_invalid;
  out["approximation_valid_a"] = eval.report_a.approximation_valid;
  out["approximation_valid_b"] = eval.report_b.approximation_valid;
  return out;
}

inline Json to_json(const FSweep& sweep, bool include_table = false) {
  auto verdict = [](const std::optional<bool>& v) -> Json {
    return v ? Json(*v) : Json(nullptr);
  };
  Json out;
  out["theta"] = json_number(sweep.theta);
  out["argmax"] = json_number(sweep.r_peak);
  out["max"] = json_number(sweep.f_peak);
  out["verdicts"] = {{"strictly_decreasing", sweep.strictly_decreasing},
                     {"peak_at_cos_theta", verdict(sweep.peak_at_cos_theta)},
                     {"increase_then_decrease", verdict(sweep.increase_then_decrease)},
                     {"above_sin_theta_to_peak", verdict(sweep.above_sin_theta_to_peak)},
                     {"above_sin_half_theta", verdict(sweep.above_sin_half_theta)},
                     {"above_cos_half_theta", verdict(sweep.above_cos_half_theta)}};
  if (include_table) {
    Json table = Json::array();
    for (std::size_t i = 0; i < sweep.r.size(); ++i)
      table.push_back(Json::array({json_number(sweep.r[i]), json_number(sweep.f[i])}));
    out["table"] = std::move(table);
  }
  return out;
}

// -- CSV ------------------------------------------------------------------

inline void write_csv_row(std::ostream& out, const std::vector<double>& values) {
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out << ',';
    out << format_number(values[i]);
  }
  out << '\n';
}

/// t, re(psi_0), im(psi_0), ..., norm
inline void write_trajectory_csv(std::ostream& out, const Trajectory& traj) {
  const Index n = traj.dimension();
  out << 't';
  for (Index i = 0; i < n; ++i) out << ",re_psi_" << i << ",im_psi_" << i;
  out << ",norm\n";
  std::vector<double> row;
  for (std::size_t k = 0; k < traj.states.size(); ++k) {
    row.assign(1, traj.grid.time(k));
    for (Index i = 0; i < n; ++i) {
      row.push_back(traj.states[k](i).real());
      row.push_back(traj.states[k](i).imag());
    }
    row.push_back(traj.states[k].norm());
    write_csv_row(out, row);
  }
}

/// t, fidelity, |c_1| ... |c_N|, ratio_max_at_t
inline void write_report_csv(std::ostream& out, const AdiabaticReport& report) {
  const std::size_t n = report.coefficient_max.size();
  out << "t,fidelity";
  for (std::size_t m = 0; m < n; ++m) out << ",abs_c_" << m + 1;
  out << ",ratio_max_at_t\n";
  std::vector<double> row;
  for (std::size_t k = 0; k < report.fidelity.size(); ++k) {
    row.assign({report.grid().time(k), report.fidelity[k]});
    row.insert(row.end(), report.coefficients[k].begin(), report.coefficients[k].end());
    row.push_back(report.condition.node_max[k]);
    write_csv_row(out, row);
  }
}

inline void write_sweep_csv(std::ostream& out, const FSweep& sweep) {
  out << "r,f\n";
  for (std::size_t i = 0; i < sweep.r.size(); ++i) write_csv_row(out, {sweep.r[i], sweep.f[i]});
}

/// t, exact (bx, by, bz, azimuth), reference (bx, by, bz, azimuth)
inline void write_bloch_csv(std::ostream& out, const TimeGrid& grid, const BlochSeries& exact,
                            const BlochSeries& reference) {
  out << "t,bx,by,bz,azimuth,ref_bx,ref_by,ref_bz,ref_azimuth\n";
  for (std::size_t k = 0; k < grid.nodes(); ++k) {
    const auto& e = exact.vectors[k];
    const auto& r = reference.vectors[k];
    write_csv_row(out, {grid.time(k), e.x(), e.y(), e.z(), exact.azimuth[k], r.x(), r.y(), r.z(),
                        reference.azimuth[k]});
  }
}

}  // namespace adiabatic

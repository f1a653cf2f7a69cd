#pragma once

// CSV and JSON serialization. All numeric output goes through a fixed
// 12-significant-digit formatter so identical runs produce byte-identical
// files.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "oamtherm/kernel.hpp"
#include "oamtherm/optics.hpp"
#include "oamtherm/reconstruct.hpp"
#include "oamtherm/stats.hpp"

namespace oamtherm {

inline std::string format_num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

namespace detail {

/// Like std::stod but tolerant of subnormal magnitudes.
inline double parse_double(const std::string& s) {
  char* end = nullptr;
  double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str()) throw std::runtime_error("bad numeric field: " + s);
  return v;
}

inline std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
  return out;
}

}  // namespace detail

/// Kernel CSV: header "ell" + output ell values; one row per input ell.
inline void write_kernel_csv(const TransitionKernel& kernel,
                             const std::filesystem::path& path) {
  auto out = detail::open_out(path);
  LRange in = kernel.input_range(), outr = kernel.output_range();
  out << "ell";
  for (int lp = outr.lo; lp <= outr.hi; ++lp) out << "," << lp;
  out << "\n";
  for (int ell = in.lo; ell <= in.hi; ++ell) {
    out << ell;
    for (int lp = outr.lo; lp <= outr.hi; ++lp)
      out << "," << format_num(kernel.prob(ell, lp));
    out << "\n";
  }
}

inline TransitionKernel read_kernel_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open: " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty kernel CSV");
  std::vector<int> out_ells;
  {
    std::stringstream ss(line);
    std::string cell;
    std::getline(ss, cell, ',');  // "ell" header
    while (std::getline(ss, cell, ',')) out_ells.push_back(std::stoi(cell));
  }
  if (out_ells.empty()) throw std::runtime_error("kernel CSV: no columns");
  std::vector<int> in_ells;
  std::vector<double> entries;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::getline(ss, cell, ',');
    in_ells.push_back(std::stoi(cell));
    while (std::getline(ss, cell, ',')) entries.push_back(detail::parse_double(cell));
  }
  if (in_ells.empty()) throw std::runtime_error("kernel CSV: no rows");
  return TransitionKernel(LRange(in_ells.front(), in_ells.back()),
                          LRange(out_ells.front(), out_ells.back()),
                          std::move(entries));
}

/// Profile-set CSV: header "ell,b0,...,b{n-1}"; one row per ell.
inline void write_profiles_csv(const std::map<int, IntensityProfile>& profiles,
                               const std::filesystem::path& path) {
  auto out = detail::open_out(path);
  if (profiles.empty()) throw std::invalid_argument("no profiles to write");
  const std::size_t pixels = profiles.begin()->second.bins.size();
  out << "ell";
  for (std::size_t k = 0; k < pixels; ++k) out << ",b" << k;
  out << "\n";
  for (const auto& [ell, p] : profiles) {
    out << ell;
    for (double b : p.bins) out << "," << format_num(b);
    out << "\n";
  }
}

inline std::map<int, IntensityProfile> read_profiles_csv(
    const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open: " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty profiles CSV");
  std::map<int, IntensityProfile> profiles;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::getline(ss, cell, ',');
    int ell = std::stoi(cell);
    IntensityProfile p;
    while (std::getline(ss, cell, ',')) p.bins.push_back(detail::parse_double(cell));
    profiles[ell] = std::move(p);
  }
  return profiles;
}

/// Curve CSV: beta_hw,value,std,ci_lo,ci_hi. Deterministic curves carry
/// zero spread.
inline void write_curve_csv(const std::vector<FluctuationResult>& curve,
                            const std::filesystem::path& path) {
  auto out = detail::open_out(path);
  out << "beta_hw,value,std,ci_lo,ci_hi\n";
  for (const auto& r : curve)
    out << format_num(r.beta_hw) << "," << format_num(r.value) << ",0,"
        << format_num(r.value) << "," << format_num(r.value) << "\n";
}

inline void write_band_csv(const UncertaintyBand& band,
                           const std::filesystem::path& path) {
  auto out = detail::open_out(path);
  out << "beta_hw,value,std,ci_lo,ci_hi\n";
  for (std::size_t i = 0; i < band.beta_grid.size(); ++i)
    out << format_num(band.beta_grid[i]) << "," << format_num(band.mean[i])
        << "," << format_num(band.std_dev[i]) << ","
        << format_num(band.ci95_lo[i]) << "," << format_num(band.ci95_hi[i])
        << "\n";
}

/// Work distribution CSV: work,probability (ascending work).
inline void write_work_csv(const WorkDistribution& dist,
                           const std::filesystem::path& path) {
  auto out = detail::open_out(path);
  out << "work,probability\n";
  for (const auto& [w, p] : dist.atoms())
    out << format_num(w) << "," << format_num(p) << "\n";
}

inline nlohmann::json kernel_to_json(const TransitionKernel& kernel) {
  nlohmann::json j;
  j["input_range"] = {kernel.input_range().lo, kernel.input_range().hi};
  j["output_range"] = {kernel.output_range().lo, kernel.output_range().hi};
  nlohmann::json rows = nlohmann::json::array();
  for (int ell = kernel.input_range().lo; ell <= kernel.input_range().hi;
       ++ell) {
    nlohmann::json row = nlohmann::json::array();
    for (int lp = kernel.output_range().lo; lp <= kernel.output_range().hi;
         ++lp)
      row.push_back(kernel.prob(ell, lp));
    rows.push_back(std::move(row));
  }
  j["entries"] = std::move(rows);
  return j;
}

inline void write_fit_report_json(const FitReport& report,
                                  const std::filesystem::path& path) {
  nlohmann::json j;
  j["kernel"] = kernel_to_json(report.kernel);
  j["residual"] = report.residual;
  j["iterations"] = report.iterations;
  j["converged"] = report.converged;
  auto out = detail::open_out(path);
  out << j.dump(2) << "\n";
}

}  // namespace oamtherm

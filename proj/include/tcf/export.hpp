#pragma once

// Fit-and-save pipeline used by the `fit` command: a built-in test function
// or a CSV of samples goes in, an interpolant JSON and a history CSV come out.

#include <charconv>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "greedy.hpp"
#include "json_io.hpp"
#include "test_functions.hpp"

namespace tcf {

struct SampleData {
  std::vector<cplx> points;
  std::vector<cplx> values;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

inline std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = line.find(',', start);
    out.push_back(trim(line.substr(start, pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

}  // namespace detail

/// Reads samples from CSV with the header `re_z,im_z,re_y,im_y`.  Row numbers
/// in error messages count lines of the file, the header being row 1.
inline SampleData read_samples_csv(std::istream& in) {
  SampleData data;
  std::string line;
  std::size_t row = 0;
  bool header = false;
  while (std::getline(in, line)) {
    ++row;
    const auto body = detail::trim(line);
    if (body.empty()) continue;
    const auto fields = detail::split_commas(body);
    if (!header) {
      if (fields != std::vector<std::string_view>{"re_z", "im_z", "re_y", "im_y"})
        throw std::runtime_error("row " + std::to_string(row) +
                                 ": expected header 're_z,im_z,re_y,im_y'");
      header = true;
      continue;
    }
    if (fields.size() != 4)
      throw std::runtime_error("row " + std::to_string(row) + ": expected 4 fields, found " +
                               std::to_string(fields.size()));
    double v[4];
    for (int i = 0; i < 4; ++i) {
      const auto f = fields[i];
      const auto [end, ec] = std::from_chars(f.data(), f.data() + f.size(), v[i]);
      if (f.empty() || ec != std::errc() || end != f.data() + f.size() || !std::isfinite(v[i]))
        throw std::runtime_error("row " + std::to_string(row) + ": cannot parse '" + std::string(f) +
                                 "' as a finite number");
    }
    data.points.emplace_back(v[0], v[1]);
    data.values.emplace_back(v[2], v[3]);
  }
  if (!header) throw std::runtime_error("row 1: missing header 're_z,im_z,re_y,im_y'");
  if (data.points.empty()) throw std::runtime_error("no sample rows after the header");
  return data;
}

inline SampleData read_samples_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  return read_samples_csv(in);
}

struct ExportedFit {
  FitResult fit;
  std::filesystem::path interpolant_path;
  std::filesystem::path history_path;
};

inline ExportedFit save_fit(FitResult fit, const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  ExportedFit out{std::move(fit), out_dir / "interpolant.json", out_dir / "history.csv"};
  save_interpolant(out.fit.interpolant, out.interpolant_path.string());
  write_history_csv(out.fit.history, out.history_path.string());
  return out;
}

inline ExportedFit fit_and_export(const std::string& function_name, const FitConfig& cfg,
                                  const std::filesystem::path& out_dir) {
  const auto& fn = find_test_function(function_name);
  return save_fit(fit_continuum(fn.f, domain_of(fn.domain), cfg), out_dir);
}

inline ExportedFit fit_samples_and_export(const std::string& csv_path, const FitConfig& cfg,
                                          const std::filesystem::path& out_dir) {
  const auto data = read_samples_csv(csv_path);
  return save_fit(fit_discrete(data.points, data.values, cfg), out_dir);
}

}  // namespace tcf

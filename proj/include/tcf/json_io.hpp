#pragma once

// JSON document for an interpolant:
//   {"nodes": [[re,im],...], "values": [[re,im],...], "weights": [[re,im],...],
//    "real_symmetric": bool}

#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "interpolant.hpp"

namespace tcf {

namespace detail {

inline nlohmann::json complex_array(std::span<const cplx> v) {
  auto arr = nlohmann::json::array();
  for (const auto& z : v) arr.push_back({z.real(), z.imag()});
  return arr;
}

inline std::vector<cplx> parse_complex_array(const nlohmann::json& j, const char* key) {
  if (!j.contains(key) || !j.at(key).is_array())
    throw std::invalid_argument(std::string("tcf json: missing array '") + key + "'");
  std::vector<cplx> out;
  for (const auto& e : j.at(key)) {
    if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number())
      throw std::invalid_argument(std::string("tcf json: '") + key +
                                  "' entries must be [re, im] pairs");
    out.emplace_back(e[0].get<double>(), e[1].get<double>());
  }
  return out;
}

}  // namespace detail

inline nlohmann::json to_json(const TcfInterpolant& tcf) {
  return {{"nodes", detail::complex_array(tcf.nodes())},
          {"values", detail::complex_array(tcf.values())},
          {"weights", detail::complex_array(tcf.weights())},
          {"real_symmetric", tcf.real_symmetric()}};
}

inline TcfInterpolant interpolant_from_json(const nlohmann::json& j) {
  TcfInterpolant tcf(detail::parse_complex_array(j, "nodes"),
                     detail::parse_complex_array(j, "values"),
                     detail::parse_complex_array(j, "weights"));
  if (j.contains("real_symmetric")) {
    const bool flag = j.at("real_symmetric").get<bool>();
    if (flag && !tcf.real_symmetric())
      throw std::invalid_argument("tcf json: real_symmetric set but data has imaginary parts");
  }
  return tcf;
}

inline void save_interpolant(const TcfInterpolant& tcf, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out << to_json(tcf).dump(1) << '\n';
}

inline TcfInterpolant load_interpolant(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  return interpolant_from_json(nlohmann::json::parse(in));
}

}  // namespace tcf

#pragma once

#include <array>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "grsum/fourier.hpp"

namespace grsum {

// Scheme definition file:
//   {
//     "total_dim": N,
//     "physical_dim": d,
//     "basis": [[row 0 ...], ..., [row N-1 ...]],   (columns generate L)
//     "window": [[lo, hi], ...]                     (N - d axes)
//   }
inline CutProjectScheme scheme_from_json(const nlohmann::json& j) {
  const int n = j.at("total_dim").get<int>();
  const int d = j.at("physical_dim").get<int>();
  const auto rows = j.at("basis");
  if (!rows.is_array() || static_cast<int>(rows.size()) != n)
    throw std::invalid_argument("scheme_from_json: basis must have total_dim rows");
  SquareMatrix b(n);
  for (int i = 0; i < n; ++i) {
    if (static_cast<int>(rows[static_cast<std::size_t>(i)].size()) != n)
      throw std::invalid_argument("scheme_from_json: basis row length != total_dim");
    for (int k = 0; k < n; ++k)
      b(i, k) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)].get<double>();
  }
  std::vector<std::array<double, 2>> window;
  for (const auto& iv : j.at("window")) {
    if (!iv.is_array() || iv.size() != 2)
      throw std::invalid_argument("scheme_from_json: window entries are [lo, hi]");
    window.push_back({iv[0].get<double>(), iv[1].get<double>()});
  }
  return CutProjectScheme(n, d, b, std::move(window));
}

inline nlohmann::json scheme_to_json(const CutProjectScheme& s) {
  nlohmann::json j;
  j["total_dim"] = s.total_dim();
  j["physical_dim"] = s.physical_dim();
  nlohmann::json rows = nlohmann::json::array();
  for (int i = 0; i < s.total_dim(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (int k = 0; k < s.total_dim(); ++k) row.push_back(s.lattice().basis()(i, k));
    rows.push_back(row);
  }
  j["basis"] = rows;
  nlohmann::json win = nlohmann::json::array();
  for (const auto& iv : s.window()) win.push_back({iv[0], iv[1]});
  j["window"] = win;
  return j;
}

inline CutProjectScheme load_scheme(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_scheme: cannot open " + path);
  nlohmann::json j;
  in >> j;
  return scheme_from_json(j);
}

}  // namespace grsum

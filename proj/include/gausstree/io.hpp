#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "gausstree/empirical.hpp"
#include "gausstree/errors.hpp"
#include "gausstree/model.hpp"

namespace gausstree {

using nlohmann::json;

// Model file schema: {"d": int, "edges": [[i, j, rho], ...]} with 1-based
// node ids. The reader re-runs every tree and correlation invariant.
inline json model_to_json(const GaussianTreeModel& model) {
  json j;
  j["d"] = model.node_count();
  j["edges"] = json::array();
  const auto& edges = model.tree().edges();
  for (int k = 0; k < static_cast<int>(edges.size()); ++k)
    j["edges"].push_back({edges[k].first, edges[k].second, model.rho(k)});
  return j;
}

inline GaussianTreeModel model_from_json(const json& j) {
  if (!j.is_object() || !j.contains("d") || !j.contains("edges"))
    throw BadInput("model json needs fields \"d\" and \"edges\"");
  int d = j.at("d").get<int>();
  std::vector<Edge> edges;
  CorrelationAssignment corr;
  for (const auto& row : j.at("edges")) {
    if (!row.is_array() || row.size() != 3) throw BadInput("each edge entry must be [i, j, rho]");
    int a = row[0].get<int>(), b = row[1].get<int>();
    edges.push_back(make_edge(a, b));
    corr.set(a, b, row[2].get<double>());
  }
  return GaussianTreeModel(TreeStructure(d, std::move(edges)), corr);
}

inline GaussianTreeModel load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw BadInput("cannot open model file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw BadInput("invalid json in " + path + ": " + e.what());
  }
  return model_from_json(j);
}

// Sample CSV: one row per draw, comma separated, no header.
inline void write_samples_csv(std::ostream& out, const SampleBatch& batch) {
  out.precision(17);
  for (long k = 0; k < batch.n(); ++k) {
    for (Eigen::Index c = 0; c < batch.data.cols(); ++c) {
      if (c) out << ',';
      out << batch.data(k, c);
    }
    out << '\n';
  }
}

inline EmpiricalMoments moments_from_csv(std::istream& in) {
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        row.push_back(std::stod(cell));
      } catch (...) {
        throw BadInput("non-numeric cell in samples csv: " + cell);
      }
    }
    if (!rows.empty() && row.size() != rows.front().size())
      throw BadInput("ragged samples csv");
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw BadInput("empty samples csv");
  SampleBatch batch;
  batch.data.resize(static_cast<long>(rows.size()), static_cast<long>(rows.front().size()));
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < rows[r].size(); ++c)
      batch.data(static_cast<long>(r), static_cast<long>(c)) = rows[r][c];
  return empirical_covariance(batch);
}

}  // namespace gausstree

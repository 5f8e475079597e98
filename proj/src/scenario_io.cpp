#include "privgame/scenario_io.hpp"

#include <fstream>

#include "privgame/errors.hpp"

namespace privgame {

using nlohmann::json;

namespace {

Matrix parse_matrix(const json& doc, const char* key, Index rows, Index cols) {
  if (!doc.contains(key)) {
    if (rows == 0 || cols == 0) return Matrix::Zero(rows, cols);
    throw ScenarioIoError(std::string("missing key '") + key + "'");
  }
  const json& v = doc.at(key);
  if (v.is_number()) {
    if (rows != 1 || cols != 1) {
      throw ScenarioIoError(std::string(key) + ": scalar given for a non-1x1 block");
    }
    return Matrix::Constant(1, 1, v.get<double>());
  }
  if (!v.is_array()) throw ScenarioIoError(std::string(key) + ": expected nested array");
  if (v.empty()) return Matrix::Zero(rows, cols);  // shape checked by the model
  const auto r = static_cast<Index>(v.size());
  const auto c = static_cast<Index>(v.front().is_array() ? v.front().size() : 0);
  Matrix m(r, c);
  for (Index i = 0; i < r; ++i) {
    const json& row = v[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Index>(row.size()) != c) {
      throw ScenarioIoError(std::string(key) + ": rows must be arrays of equal length");
    }
    for (Index j = 0; j < c; ++j) {
      const json& e = row[static_cast<std::size_t>(j)];
      if (!e.is_number()) throw ScenarioIoError(std::string(key) + ": non-numeric entry");
      m(i, j) = e.get<double>();
    }
  }
  return m;
}

json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Index parse_dim(const json& dims, const char* key, Index fallback, bool required) {
  if (!dims.contains(key)) {
    if (required) throw ScenarioIoError(std::string("dims: missing '") + key + "'");
    return fallback;
  }
  const json& v = dims.at(key);
  if (!v.is_number_integer() || v.get<long long>() < 0) {
    throw ScenarioIoError(std::string("dims.") + key + ": expected a nonnegative integer");
  }
  return static_cast<Index>(v.get<long long>());
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioIoError("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ScenarioIoError(path.string() + ": " + e.what());
  }
}

}  // namespace

Scenario parse_scenario(const json& doc) {
  if (!doc.is_object()) throw ScenarioIoError("scenario must be a JSON object");
  if (!doc.contains("dims") || !doc.at("dims").is_object()) {
    throw ScenarioIoError("missing object 'dims'");
  }
  const json& jd = doc.at("dims");
  Dimensions d;
  d.n_x = parse_dim(jd, "n_x", 1, true);
  d.n_w = parse_dim(jd, "n_w", 1, true);
  d.n_z = parse_dim(jd, "n_z", 0, false);
  d.n_y = parse_dim(jd, "n_y", 1, true);

  if (!doc.contains("delta") || !doc.at("delta").is_number()) {
    throw ScenarioIoError("missing numeric 'delta'");
  }
  const double delta = doc.at("delta").get<double>();
  if (!(delta >= 0.0)) throw ScenarioIoError("delta must be nonnegative");

  try {
    return Scenario{GaussianModel(d, parse_matrix(doc, "V_xx", d.n_x, d.n_x),
                                  parse_matrix(doc, "V_ww", d.n_w, d.n_w),
                                  parse_matrix(doc, "V_xw", d.n_x, d.n_w),
                                  parse_matrix(doc, "V_zz", d.n_z, d.n_z),
                                  parse_matrix(doc, "V_xz", d.n_x, d.n_z),
                                  parse_matrix(doc, "V_wz", d.n_w, d.n_z)),
                    delta};
  } catch (const json::exception& e) {
    throw ScenarioIoError(e.what());
  }
}

json scenario_to_json(const Scenario& scenario) {
  const GaussianModel& m = scenario.model;
  const Dimensions& d = m.dims();
  json doc;
  doc["dims"] = {{"n_x", d.n_x}, {"n_w", d.n_w}, {"n_z", d.n_z}, {"n_y", d.n_y}};
  doc["V_xx"] = matrix_to_json(m.V_xx());
  doc["V_ww"] = matrix_to_json(m.V_ww());
  doc["V_xw"] = matrix_to_json(m.V_xw());
  if (d.n_z > 0) {
    doc["V_zz"] = matrix_to_json(m.V_zz());
    doc["V_xz"] = matrix_to_json(m.V_xz());
    doc["V_wz"] = matrix_to_json(m.V_wz());
  }
  doc["delta"] = scenario.delta;
  return doc;
}

Scenario read_scenario_file(const std::filesystem::path& path) {
  return parse_scenario(read_json_file(path));
}

Scenario load_scenario(const std::filesystem::path& path) {
  Scenario s = read_scenario_file(path);
  require_valid(s.model);
  return s;
}

SenderPolicy parse_policy(const json& doc, const Dimensions& dims) {
  if (!doc.is_object()) throw ScenarioIoError("policy must be a JSON object");
  SenderPolicy p;
  p.K_x = parse_matrix(doc, "K_x", dims.n_y, dims.n_x);
  p.K_w = parse_matrix(doc, "K_w", dims.n_y, dims.n_w);
  p.K_z = doc.contains("K_z") ? parse_matrix(doc, "K_z", dims.n_y, dims.n_z)
                              : Matrix(Matrix::Zero(dims.n_y, dims.n_z));
  p.V_vv = parse_matrix(doc, "V_vv", dims.n_y, dims.n_y);
  return p;
}

SenderPolicy load_policy(const std::filesystem::path& path, const Dimensions& dims) {
  return parse_policy(read_json_file(path), dims);
}

json policy_to_json(const SenderPolicy& policy) {
  json doc;
  doc["K_x"] = matrix_to_json(policy.K_x);
  doc["K_w"] = matrix_to_json(policy.K_w);
  if (policy.K_z.size() > 0) doc["K_z"] = matrix_to_json(policy.K_z);
  doc["V_vv"] = matrix_to_json(policy.V_vv);
  return doc;
}

}  // namespace privgame

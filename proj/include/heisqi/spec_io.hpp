#pragma once

#include <optional>
#include <string>
#include <vector>

#include "heisqi/derivation.hpp"
#include "heisqi/error.hpp"
#include "json.hpp"

namespace heisqi {

using json = nlohmann::json;

/// Parsed derivation file:
///   {"n": 1, "derivation": {"matrix": [[...], ...]}, "label": "optional"}
///   {"n": 1, "derivation": {"spectral": [{"eigenvalue": 1, "eigenvectors": [[...]]}, ...]}}
struct SpecFile {
  DerivationSpec spec;
  std::optional<std::string> label;
};

namespace detail {

inline double number_at(const json& v, const std::string& field) {
  if (!v.is_number()) throw Error(ErrorKind::SchemaError, "expected a number", field);
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw Error(ErrorKind::SchemaError, "expected a finite number", field);
  return x;
}

inline Eigen::VectorXd vector_at(const json& v, int d, const std::string& field) {
  if (!v.is_array()) throw Error(ErrorKind::SchemaError, "expected an array of numbers", field);
  if (static_cast<int>(v.size()) != d) {
    throw Error(ErrorKind::DimensionError,
                "expected " + std::to_string(d) + " entries, found " + std::to_string(v.size()), field);
  }
  Eigen::VectorXd out(d);
  for (int j = 0; j < d; ++j) out[j] = number_at(v[static_cast<std::size_t>(j)], field + "[" + std::to_string(j) + "]");
  return out;
}

}  // namespace detail

inline SpecFile spec_from_json(const json& root) {
  if (!root.is_object()) throw Error(ErrorKind::SchemaError, "top level must be an object", "(root)");
  for (const auto& [key, _] : root.items()) {
    if (key != "n" && key != "derivation" && key != "label") {
      throw Error(ErrorKind::SchemaError, "unknown field", key);
    }
  }
  if (!root.contains("n")) throw Error(ErrorKind::SchemaError, "missing required field", "n");
  const json& jn = root["n"];
  if (!jn.is_number_integer() || jn.get<long long>() < 1 || jn.get<long long>() > 1000) {
    throw Error(ErrorKind::SchemaError, "must be a positive integer", "n");
  }
  const int n = static_cast<int>(jn.get<long long>());
  const int d = 2 * n + 1;

  std::optional<std::string> label;
  if (root.contains("label")) {
    if (!root["label"].is_string()) throw Error(ErrorKind::SchemaError, "must be a string", "label");
    label = root["label"].get<std::string>();
  }

  if (!root.contains("derivation")) throw Error(ErrorKind::SchemaError, "missing required field", "derivation");
  const json& der = root["derivation"];
  if (!der.is_object()) throw Error(ErrorKind::SchemaError, "must be an object", "derivation");
  const bool has_m = der.contains("matrix"), has_s = der.contains("spectral");
  if (has_m == has_s || der.size() != 1) {
    throw Error(ErrorKind::SchemaError, "must contain exactly one of \"matrix\" or \"spectral\"", "derivation");
  }

  if (has_m) {
    const json& rows = der["matrix"];
    const std::string f = "derivation.matrix";
    if (!rows.is_array()) throw Error(ErrorKind::SchemaError, "expected an array of rows", f);
    if (static_cast<int>(rows.size()) != d) {
      throw Error(ErrorKind::DimensionError,
                  "expected " + std::to_string(d) + " rows for n = " + std::to_string(n) + ", found " +
                      std::to_string(rows.size()),
                  f);
    }
    Eigen::MatrixXd m(d, d);
    for (int i = 0; i < d; ++i)
      m.row(i) = detail::vector_at(rows[static_cast<std::size_t>(i)], d, f + "[" + std::to_string(i) + "]").transpose();
    return {DerivationSpec::from_matrix(n, std::move(m)), label};
  }

  const json& blocks = der["spectral"];
  const std::string f = "derivation.spectral";
  if (!blocks.is_array() || blocks.empty()) throw Error(ErrorKind::SchemaError, "expected a non-empty array", f);
  std::vector<EigenBlockSpec> out;
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    const std::string fb = f + "[" + std::to_string(b) + "]";
    const json& blk = blocks[b];
    if (!blk.is_object()) throw Error(ErrorKind::SchemaError, "expected an object", fb);
    for (const auto& [key, _] : blk.items())
      if (key != "eigenvalue" && key != "eigenvectors") throw Error(ErrorKind::SchemaError, "unknown field", fb + "." + key);
    if (!blk.contains("eigenvalue")) throw Error(ErrorKind::SchemaError, "missing required field", fb + ".eigenvalue");
    if (!blk.contains("eigenvectors")) throw Error(ErrorKind::SchemaError, "missing required field", fb + ".eigenvectors");
    EigenBlockSpec eb;
    eb.eigenvalue = detail::number_at(blk["eigenvalue"], fb + ".eigenvalue");
    const json& vecs = blk["eigenvectors"];
    const std::string fv = fb + ".eigenvectors";
    if (!vecs.is_array() || vecs.empty()) throw Error(ErrorKind::SchemaError, "expected a non-empty array", fv);
    for (std::size_t j = 0; j < vecs.size(); ++j)
      eb.eigenvectors.push_back(detail::vector_at(vecs[j], d, fv + "[" + std::to_string(j) + "]"));
    out.push_back(std::move(eb));
  }
  return {DerivationSpec::from_spectral(n, std::move(out)), label};
}

/// Parses UTF-8 JSON text; errors name the offending field.
inline SpecFile parse_spec(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::SyntaxError, e.what(), "(root)");
  }
  return spec_from_json(root);
}

inline json spec_to_json(const SpecFile& file) {
  const DerivationSpec& s = file.spec;
  json root;
  root["n"] = s.n();
  if (file.label) root["label"] = *file.label;
  auto vec = [](const Eigen::VectorXd& v) {
    json a = json::array();
    for (Eigen::Index j = 0; j < v.size(); ++j) a.push_back(v[j]);
    return a;
  };
  if (s.is_spectral()) {
    json blocks = json::array();
    for (const auto& b : s.spectral_form()) {
      json vs = json::array();
      for (const auto& v : b.eigenvectors) vs.push_back(vec(v));
      blocks.push_back({{"eigenvalue", b.eigenvalue}, {"eigenvectors", vs}});
    }
    root["derivation"] = {{"spectral", blocks}};
  } else {
    json rows = json::array();
    const auto& m = s.matrix_form();
    for (Eigen::Index i = 0; i < m.rows(); ++i) rows.push_back(vec(m.row(i).transpose()));
    root["derivation"] = {{"matrix", rows}};
  }
  return root;
}

inline std::string serialize_spec(const SpecFile& file) { return spec_to_json(file).dump(2) + "\n"; }

}  // namespace heisqi

#pragma once

// JSON encodings. Matrices are row lists of [re, im] pairs (a bare number is
// read as a real entry).

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "qentro/capacity.hpp"
#include "qentro/channel.hpp"
#include "qentro/continuity.hpp"
#include "qentro/operator_core.hpp"

namespace qentro::io {

using json = nlohmann::json;

/// Rounds to 12 significant digits; non-finite values are kept.
inline double round12(double x) {
  if (!std::isfinite(x)) return x;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  const double r = std::strtod(buf, nullptr);
  return r == 0.0 ? 0.0 : r;  // no negative zero in reports
}

inline json number(double x) {
  if (std::isnan(x)) return nullptr;
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return round12(x);
}

[[noreturn]] inline void parse_fail(const std::string& where, const std::string& what) {
  throw Error(ErrorKind::ParseError, where + ": " + what);
}

inline json read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) parse_fail(path, "cannot open file");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    parse_fail(path, e.what());
  }
}

inline double read_number(const json& j, const std::string& where) {
  if (!j.is_number()) parse_fail(where, "expected a number");
  return j.get<double>();
}

inline Matrix matrix_from_json(const json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) parse_fail(where, "expected a non-empty list of rows");
  const auto rows = static_cast<Eigen::Index>(j.size());
  Eigen::Index cols = -1;
  Matrix m;
  for (Eigen::Index r = 0; r < rows; ++r) {
    const json& row = j[static_cast<std::size_t>(r)];
    const std::string rw = where + "[" + std::to_string(r) + "]";
    if (!row.is_array()) parse_fail(rw, "expected a row list");
    if (cols < 0) {
      cols = static_cast<Eigen::Index>(row.size());
      if (cols == 0) parse_fail(rw, "empty row");
      m.resize(rows, cols);
    } else if (static_cast<Eigen::Index>(row.size()) != cols) {
      parse_fail(rw, "ragged matrix");
    }
    for (Eigen::Index c = 0; c < cols; ++c) {
      const json& e = row[static_cast<std::size_t>(c)];
      const std::string ew = rw + "[" + std::to_string(c) + "]";
      if (e.is_number()) {
        m(r, c) = cplx(e.get<double>(), 0.0);
      } else if (e.is_array() && e.size() == 2 && e[0].is_number() && e[1].is_number()) {
        m(r, c) = cplx(e[0].get<double>(), e[1].get<double>());
      } else {
        parse_fail(ew, "expected a number or [re, im]");
      }
    }
  }
  return m;
}

inline json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c)
      row.push_back(json::array({round12(m(r, c).real()), round12(m(r, c).imag())}));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline json vector_to_json(const std::vector<double>& v) {
  json a = json::array();
  for (double x : v) a.push_back(number(x));
  return a;
}

/// A state is either a bare matrix or {"matrix": ...}.
inline PositiveOperator state_from_json(const json& j, const std::string& where) {
  const bool wrapped = j.is_object();
  if (wrapped && !j.contains("matrix")) parse_fail(where, "missing field 'matrix'");
  return validate_positive(matrix_from_json(wrapped ? j["matrix"] : j, wrapped ? where + ".matrix" : where));
}

inline KrausOperation channel_from_json(const json& j, const std::string& where) {
  if (!j.is_object() || !j.contains("kraus")) parse_fail(where, "missing field 'kraus'");
  const json& ks = j["kraus"];
  if (!ks.is_array() || ks.empty()) parse_fail(where + ".kraus", "expected a non-empty list");
  std::vector<Matrix> kraus;
  for (std::size_t i = 0; i < ks.size(); ++i)
    kraus.push_back(matrix_from_json(ks[i], where + ".kraus[" + std::to_string(i) + "]"));
  KrausOperation phi(std::move(kraus));
  for (const char* key : {"dim_in", "dim_out"}) {
    if (!j.contains(key)) continue;
    const json& d = j[key];
    if (!d.is_number_integer()) parse_fail(where + "." + key, "expected an integer");
    const auto actual = std::string(key) == "dim_in" ? phi.dim_in() : phi.dim_out();
    if (d.get<Eigen::Index>() != actual)
      throw Error(ErrorKind::DimMismatch, where + "." + key + " is " + std::to_string(d.get<long long>()) +
                                              " but the Kraus operators give " + std::to_string(actual));
  }
  return phi;
}

inline json channel_to_json(const KrausOperation& phi) {
  json ks = json::array();
  for (const auto& k : phi.kraus()) ks.push_back(matrix_to_json(k));
  return {{"dim_in", phi.dim_in()}, {"dim_out", phi.dim_out()}, {"kraus", ks}};
}

inline Ensemble ensemble_from_json(const json& j, const std::string& where) {
  if (!j.is_object() || !j.contains("parts") || !j["parts"].is_array())
    parse_fail(where, "missing list 'parts'");
  std::vector<double> w;
  std::vector<PositiveOperator> states;
  for (std::size_t i = 0; i < j["parts"].size(); ++i) {
    const json& p = j["parts"][i];
    const std::string pw = where + ".parts[" + std::to_string(i) + "]";
    if (!p.is_object() || !p.contains("weight") || !p.contains("state"))
      parse_fail(pw, "expected {\"weight\", \"state\"}");
    w.push_back(read_number(p["weight"], pw + ".weight"));
    states.push_back(state_from_json(p["state"], pw + ".state"));
  }
  return Ensemble(std::move(w), std::move(states));
}

inline json ensemble_to_json(const Ensemble& e) {
  json parts = json::array();
  for (std::size_t i = 0; i < e.size(); ++i)
    parts.push_back({{"weight", number(e.weights()[i])}, {"state", matrix_to_json(e.states()[i].matrix())}});
  return {{"parts", parts}};
}

inline ConstraintSet constraint_from_json(const json& j, const std::string& where) {
  if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string()) parse_fail(where, "missing string 'kind'");
  const std::string kind = j["kind"];
  if (kind == "unconstrained") return ConstraintSet::unconstrained();
  if (kind == "mean_observable") {
    if (!j.contains("observable") || !j.contains("bound"))
      parse_fail(where, "mean_observable needs 'observable' and 'bound'");
    return ConstraintSet::mean_observable(HermitianOperator(matrix_from_json(j["observable"], where + ".observable")),
                                          read_number(j["bound"], where + ".bound"));
  }
  if (kind == "fixed_barycenter") {
    if (!j.contains("state")) parse_fail(where, "fixed_barycenter needs 'state'");
    return ConstraintSet::fixed_barycenter(state_from_json(j["state"], where + ".state"));
  }
  parse_fail(where + ".kind", "unknown constraint '" + kind + "'");
}

inline double law_param(const json& j, const char* key, double fallback, const std::string& where) {
  return j.contains(key) ? read_number(j[key], where + "." + key) : fallback;
}

/// Unknown law kinds are kept as Unsupported; the classifier answers Undecided for them.
inline AnalyticKrausFamily family_from_json(const json& j, const std::string& where) {
  if (!j.is_object()) parse_fail(where, "expected an object");
  AnalyticKrausFamily f;
  if (!j.contains("norm_law") || !j["norm_law"].is_object() || !j["norm_law"].contains("kind") ||
      !j["norm_law"]["kind"].is_string())
    parse_fail(where, "missing object 'norm_law' with string 'kind'");
  const json& nl = j["norm_law"];
  const std::string nw = where + ".norm_law";
  const std::string nk = nl["kind"];
  const double c = law_param(nl, "c", 1.0, nw);
  if (nk == "constant")
    f.norm = NormLaw::constant(c);
  else if (nk == "power")
    f.norm = NormLaw::power(c, law_param(nl, "beta", 0.0, nw));
  else if (nk == "log_power")
    f.norm = NormLaw::log_power(c, law_param(nl, "alpha", 0.0, nw));
  else
    f.norm = {NormLaw::Kind::Unsupported, c, 0.0, nk};

  if (j.contains("rank_law")) {
    const json& rl = j["rank_law"];
    const std::string rw = where + ".rank_law";
    if (!rl.is_object() || !rl.contains("kind") || !rl["kind"].is_string())
      parse_fail(rw, "expected an object with string 'kind'");
    const std::string rk = rl["kind"];
    if (rk == "constant")
      f.rank = RankLaw::constant(law_param(rl, "d", 1.0, rw));
    else if (rk == "poly")
      f.rank = RankLaw::poly(law_param(rl, "n", 0.0, rw));
    else
      f.rank = {RankLaw::Kind::Unsupported, 0.0, rk};
  }

  if (j.contains("orthogonality")) {
    const json& o = j["orthogonality"];
    if (!o.is_array()) parse_fail(where + ".orthogonality", "expected a list of flags");
    for (const auto& flag : o) {
      if (!flag.is_string()) parse_fail(where + ".orthogonality", "flags must be strings");
      const std::string s = flag;
      if (s == "ranges_orthogonal")
        f.ranges_orthogonal = true;
      else if (s == "corange_orthogonal")
        f.corange_orthogonal = true;
      else if (s == "projector_multiples")
        f.projector_multiples = true;
      else
        parse_fail(where + ".orthogonality", "unknown flag '" + s + "'");
    }
  }
  return f;
}

}  // namespace qentro::io

#pragma once

// JSON configs and CSV curves. Doubles are written with 17 significant
// digits so that every emitted file parses back to identical values.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "lil/entropy_ct.hpp"
#include "lil/envelopes.hpp"
#include "lil/grid_spaces.hpp"
#include "lil/partitions.hpp"
#include "lil/simulate.hpp"

namespace lil::io {

using json = nlohmann::json;

/// Malformed config; `where` is a JSON pointer to the offending field.
class config_error : public std::runtime_error {
 public:
  config_error(std::string where, const std::string& what)
      : std::runtime_error(where + ": " + what), where_(std::move(where)) {}
  const std::string& where() const noexcept { return where_; }

 private:
  std::string where_;
};

namespace detail {

inline std::string child(const std::string& path, const std::string& key) { return path + "/" + key; }
inline std::string child(const std::string& path, std::size_t i) { return path + "/" + std::to_string(i); }

inline const json& field(const json& j, const std::string& key, const std::string& path) {
  if (!j.is_object()) throw config_error(path.empty() ? "/" : path, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) throw config_error(child(path, key), "missing field");
  return *it;
}

/// Number, or the strings "inf" / "-inf" / "e".
inline double as_number(const json& j, const std::string& path) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf" || s == "Infinity") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    if (s == "e") return std::numbers::e;
  }
  throw config_error(path, "expected a number");
}

inline double number(const json& j, const std::string& key, const std::string& path) {
  return as_number(field(j, key, path), child(path, key));
}

inline double number_or(const json& j, const std::string& key, double fallback, const std::string& path) {
  if (!j.contains(key)) return fallback;
  return number(j, key, path);
}

inline std::string text(const json& j, const std::string& key, const std::string& path) {
  const auto& v = field(j, key, path);
  if (!v.is_string()) throw config_error(child(path, key), "expected a string");
  return v.get<std::string>();
}

inline std::vector<double> numbers(const json& j, const std::string& key, const std::string& path) {
  const auto& v = field(j, key, path);
  const auto p = child(path, key);
  if (!v.is_array()) throw config_error(p, "expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i) out.push_back(as_number(v[i], child(p, i)));
  return out;
}

inline json number_json(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return x;
}

/// Re-throws library validation errors as config errors at `path`.
template <class F>
auto guarded(const std::string& path, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const config_error&) {
    throw;
  } catch (const std::exception& e) {
    throw config_error(path.empty() ? "/" : path, e.what());
  }
}

}  // namespace detail

inline json parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw config_error("/", "cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw config_error("/", std::string("invalid JSON in ") + path + ": " + e.what());
  }
}

// ---- grid spaces ----------------------------------------------------------

inline json to_json(const GridMeasureSpace& s) {
  return {{"size", s.size()}, {"weights", std::vector<double>(s.weights().begin(), s.weights().end())}};
}

/// {size, weights} or {size} alone (uniform probability weights).
inline GridMeasureSpace space_from_json(const json& j, const std::string& path) {
  if (!j.is_object()) throw config_error(path, "expected an axis object");
  if (j.contains("weights")) {
    auto w = detail::numbers(j, "weights", path);
    if (j.contains("size") && detail::number(j, "size", path) != static_cast<double>(w.size()))
      throw config_error(detail::child(path, "size"), "size does not match the number of weights");
    return detail::guarded(detail::child(path, "weights"), [&] { return GridMeasureSpace(std::move(w)); });
  }
  const double n = detail::number(j, "size", path);
  if (!(n >= 1.0) || n != std::floor(n)) throw config_error(detail::child(path, "size"), "expected a positive integer");
  return GridMeasureSpace::uniform_probability(static_cast<std::size_t>(n));
}

inline std::vector<GridMeasureSpace> axes_from_json(const json& j, const std::string& key, const std::string& path) {
  const auto& a = detail::field(j, key, path);
  const auto p = detail::child(path, key);
  if (!a.is_array() || a.empty()) throw config_error(p, "expected a non-empty array of axes");
  std::vector<GridMeasureSpace> out;
  for (std::size_t i = 0; i < a.size(); ++i) out.push_back(space_from_json(a[i], detail::child(p, i)));
  return out;
}

inline json to_json(const GridFunction& f) {
  json axes = json::array();
  for (const auto& a : f.axes()) axes.push_back(to_json(a));
  return {{"axes", axes}, {"values", std::vector<double>(f.values().begin(), f.values().end())}};
}

inline GridFunction grid_function_from_json(const json& j, const std::string& path = "") {
  auto axes = axes_from_json(j, "axes", path);
  auto values = detail::numbers(j, "values", path);
  return detail::guarded(detail::child(path, "values"), [&] { return GridFunction(std::move(axes), std::move(values)); });
}

// ---- envelopes --------------------------------------------------------------

/// Grid-kind JSON (tabulated values at the grid nodes).
inline json to_json(const MomentEnvelope& env) {
  json j;
  j["kind"] = "grid";
  if (env.exponents().size() == 1)
    j["p"] = env.exponents().front();
  else
    j["p_vec"] = env.exponents();
  j["L_low"] = env.domain_low();
  j["L0"] = detail::number_json(env.L0());
  j["L_grid"] = env.grid();
  j["g_values"] = env.grid_values();
  return j;
}

inline std::vector<double> exponents_from_json(const json& j, const std::string& path) {
  if (j.contains("p_vec")) return detail::numbers(j, "p_vec", path);
  return {detail::number(j, "p", path)};
}

/// kind "grid": {p | p_vec, L0, L_grid, g_values[, L_low]}.
/// kind "analytic", family "power": g(L) = c(L) K_R(L) scale L^(1/beta)
///   (beta may be "inf" for bounded summands), {p, scale, beta[, L_grid, sharp_doob, symmetric]}.
inline MomentEnvelope envelope_from_json(const json& j, const std::string& path = "") {
  const auto kind = detail::text(j, "kind", path);
  auto ex = exponents_from_json(j, path);
  for (double q : ex)
    if (!(q >= 1.0)) throw config_error(detail::child(path, j.contains("p_vec") ? "p_vec" : "p"), "exponent must be >= 1");
  const double pbar = *std::max_element(ex.begin(), ex.end());
  if (kind == "grid") {
    const double L0 = detail::number_or(j, "L0", std::numeric_limits<double>::infinity(), path);
    const double low = detail::number_or(j, "L_low", std::max(2.0, pbar), path);
    auto grid = detail::numbers(j, "L_grid", path);
    auto vals = detail::numbers(j, "g_values", path);
    return detail::guarded(detail::child(path, "g_values"), [&] {
      return MomentEnvelope::tabulated(low, L0, std::move(grid), std::move(vals), EnvelopeKind::grid, ex);
    });
  }
  if (kind == "analytic") {
    const auto family = detail::text(j, "family", path);
    if (family != "power") throw config_error(detail::child(path, "family"), "unknown analytic family '" + family + "'");
    const double scale = detail::number(j, "scale", path);
    const double beta = detail::number(j, "beta", path);
    if (!(scale > 0.0)) throw config_error(detail::child(path, "scale"), "must be > 0");
    if (!(beta > 0.0)) throw config_error(detail::child(path, "beta"), "must be > 0");
    EnvelopeOptions opt;
    if (j.contains("sharp_doob")) opt.sharp_doob = j["sharp_doob"].get<bool>();
    if (j.contains("symmetric")) opt.symmetric = j["symmetric"].get<bool>();
    std::vector<double> grid;
    if (j.contains("L_grid")) grid = detail::numbers(j, "L_grid", path);
    const double low = std::max(2.0, pbar);
    return detail::guarded(path, [&] {
      return envelope_from_moments([scale, beta](double L) { return std::isinf(beta) ? scale : scale * std::pow(L, 1.0 / beta); },
                                   low, std::numeric_limits<double>::infinity(), grid, opt, ex);
    });
  }
  throw config_error(detail::child(path, "kind"), "expected \"grid\" or \"analytic\"");
}

// ---- partitions and coverings ---------------------------------------------

inline json to_json(const Partition& part) {
  if (part.kind() == Partition::Kind::geometric) return {{"kind", "geometric"}, {"d", part.d()}};
  if (part.kind() == Partition::Kind::explicit_prefix)
    return {{"kind", "explicit"}, {"A", part.prefix()}, {"continue_d", part.d()}};
  throw std::invalid_argument("to_json: generator partitions are not serializable");
}

inline Partition partition_from_json(const json& j, const std::string& path = "") {
  const auto kind = detail::text(j, "kind", path);
  if (kind == "geometric") {
    const double d = detail::number(j, "d", path);
    if (d != std::floor(d) || d < 2) throw config_error(detail::child(path, "d"), "expected an integer >= 2");
    return Partition::geometric(static_cast<int>(d));
  }
  if (kind == "explicit") {
    const auto a = detail::numbers(j, "A", path);
    std::vector<std::int64_t> A;
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (a[i] != std::floor(a[i]) || a[i] < 1 || a[i] > 9.0e18)
        throw config_error(detail::child(detail::child(path, "A"), i), "expected a positive integer");
      A.push_back(static_cast<std::int64_t>(a[i]));
    }
    const double cd = detail::number_or(j, "continue_d", 2.0, path);
    return detail::guarded(detail::child(path, "A"), [&] { return Partition::explicit_prefix(A, static_cast<int>(cd)); });
  }
  throw config_error(detail::child(path, "kind"), "expected \"geometric\" or \"explicit\"");
}

struct CoveringConfig {
  bool empirical = true;
  double D = 0.0, l = 1.0, C_cov = 1.0, lip = 1.0;
  int d = 1;
};

inline CoveringConfig covering_from_json(const json& j, const std::string& path = "") {
  const auto kind = detail::text(j, "kind", path);
  CoveringConfig c;
  if (kind == "empirical") return c;
  if (kind != "analytic") throw config_error(detail::child(path, "kind"), "expected \"analytic\" or \"empirical\"");
  c.empirical = false;
  c.D = detail::number(j, "D", path);
  c.d = static_cast<int>(detail::number(j, "d", path));
  c.l = detail::number(j, "l", path);
  c.C_cov = detail::number_or(j, "C_cov", 1.0, path);
  c.lip = detail::number_or(j, "lip", 1.0, path);
  detail::guarded(path, [&] { return CoveringFunction::analytic(c.D, c.d, c.l, c.C_cov, c.lip); });
  return c;
}

inline json to_json(const CoveringConfig& c) {
  if (c.empirical) return {{"kind", "empirical"}};
  return {{"kind", "analytic"}, {"D", c.D}, {"d", c.d}, {"l", c.l}, {"C_cov", c.C_cov}, {"lip", c.lip}};
}

// ---- fields -------------------------------------------------------------------

inline json to_json(const NormSpec& n) {
  switch (n.kind) {
    case NormKind::lp: return {{"kind", "lp"}, {"p", n.p}};
    case NormKind::mixed: return {{"kind", "mixed"}, {"p_vec", n.p_vec}};
    case NormKind::cl: return {{"kind", "cl"}, {"p", n.p}};
  }
  return {};
}

inline NormSpec norm_from_json(const json& j, const std::string& path) {
  const auto kind = detail::text(j, "kind", path);
  if (kind == "lp") return NormSpec::lp(detail::number(j, "p", path));
  if (kind == "mixed") return NormSpec::mixed(detail::numbers(j, "p_vec", path));
  if (kind == "cl") return NormSpec::cl(detail::number(j, "p", path));
  throw config_error(detail::child(path, "kind"), "expected \"lp\", \"mixed\" or \"cl\"");
}

inline const char* family_name(Family f) {
  switch (f) {
    case Family::rademacher: return "rademacher";
    case Family::uniform: return "uniform";
    case Family::gaussian: return "gaussian";
    case Family::weibull: return "weibull";
  }
  return "?";
}

inline json to_json(const FieldSpec& s) {
  json axes = json::array();
  for (const auto& a : s.axes) axes.push_back(to_json(a));
  json j{{"family", family_name(s.family)},
         {"param", detail::number_json(s.param)},
         {"coupling", s.coupling == Coupling::common ? "common" : "independent"},
         {"dependence", s.dependence == Dependence::martingale ? "martingale" : "iid"},
         {"lambda", s.lambda},
         {"axes", axes},
         {"norm", to_json(s.norm)}};
  if (!s.scale.empty()) j["scale"] = s.scale;
  return j;
}

inline FieldSpec field_spec_from_json(const json& j, const std::string& path = "") {
  FieldSpec s;
  const auto fam = detail::text(j, "family", path);
  if (fam == "rademacher") s.family = Family::rademacher;
  else if (fam == "uniform") s.family = Family::uniform;
  else if (fam == "gaussian") s.family = Family::gaussian;
  else if (fam == "weibull") s.family = Family::weibull;
  else throw config_error(detail::child(path, "family"), "unknown family '" + fam + "'");
  s.param = detail::number_or(j, "param", 1.0, path);
  if (j.contains("scale")) s.scale = detail::numbers(j, "scale", path);
  if (j.contains("coupling")) {
    const auto c = detail::text(j, "coupling", path);
    if (c == "common") s.coupling = Coupling::common;
    else if (c != "independent") throw config_error(detail::child(path, "coupling"), "expected \"independent\" or \"common\"");
  }
  if (j.contains("dependence")) {
    const auto d = detail::text(j, "dependence", path);
    if (d == "martingale") s.dependence = Dependence::martingale;
    else if (d != "iid") throw config_error(detail::child(path, "dependence"), "expected \"iid\" or \"martingale\"");
  }
  s.lambda = detail::number_or(j, "lambda", 0.5, path);
  s.axes = axes_from_json(j, "axes", path);
  s.norm = norm_from_json(detail::field(j, "norm", path), detail::child(path, "norm"));
  detail::guarded(path, [&] {
    s.validate();
    return 0;
  });
  return s;
}

/// {X: axis, T: [[...], ...], omega: axis, values: [...]} with x fastest, then t, then omega.
inline IndexedField indexed_field_from_json(const json& j, const std::string& path = "") {
  auto X = space_from_json(detail::field(j, "X", path), detail::child(path, "X"));
  auto om = space_from_json(detail::field(j, "omega", path), detail::child(path, "omega"));
  const auto& tj = detail::field(j, "T", path);
  if (!tj.is_array() || tj.empty()) throw config_error(detail::child(path, "T"), "expected a non-empty array of points");
  std::vector<std::vector<double>> T;
  for (std::size_t i = 0; i < tj.size(); ++i) {
    const auto p = detail::child(detail::child(path, "T"), i);
    if (tj[i].is_number()) {
      T.push_back({tj[i].get<double>()});
      continue;
    }
    if (!tj[i].is_array()) throw config_error(p, "expected a point (number or array)");
    std::vector<double> pt;
    for (std::size_t k = 0; k < tj[i].size(); ++k) pt.push_back(detail::as_number(tj[i][k], detail::child(p, k)));
    T.push_back(std::move(pt));
  }
  auto values = detail::numbers(j, "values", path);
  return detail::guarded(path, [&] { return IndexedField(std::move(X), std::move(T), std::move(om), std::move(values)); });
}

inline json to_json(const IndexedField& f) {
  return {{"X", to_json(f.X())}, {"T", f.T()}, {"omega", to_json(f.omega())}, {"values", f.values()}};
}

// ---- CSV ----------------------------------------------------------------------

inline std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  std::ostringstream os;
  os << std::setprecision(17) << x;
  return os.str();
}

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  std::size_t column(const std::string& name) const {
    for (std::size_t i = 0; i < columns.size(); ++i)
      if (columns[i] == name) return i;
    throw std::invalid_argument("CSV: missing column '" + name + "'");
  }
  std::vector<double> values(const std::string& name) const {
    const auto c = column(name);
    std::vector<double> out;
    for (const auto& r : rows) out.push_back(r[c]);
    return out;
  }
  friend bool operator==(const Table&, const Table&) = default;
};

inline std::string to_csv(const Table& t) {
  std::string out;
  for (std::size_t i = 0; i < t.columns.size(); ++i) out += (i ? "," : "") + t.columns[i];
  out += "\n";
  for (const auto& r : t.rows) {
    if (r.size() != t.columns.size()) throw dimension_mismatch("CSV: row width differs from the header");
    for (std::size_t i = 0; i < r.size(); ++i) out += (i ? "," : "") + format_double(r[i]);
    out += "\n";
  }
  return out;
}

inline Table parse_csv(const std::string& text) {
  Table t;
  std::istringstream in(text);
  std::string line;
  auto split = [](const std::string& s) {
    std::vector<std::string> parts;
    std::string cur;
    std::istringstream ls(s);
    while (std::getline(ls, cur, ',')) parts.push_back(cur);
    if (!s.empty() && s.back() == ',') parts.emplace_back();
    return parts;
  };
  if (!std::getline(in, line)) throw std::invalid_argument("CSV: empty input");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  t.columns = split(line);
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto parts = split(line);
    if (parts.size() != t.columns.size())
      throw std::invalid_argument("CSV: line " + std::to_string(lineno) + " has the wrong number of fields");
    std::vector<double> row;
    for (const auto& s : parts) {
      char* end = nullptr;
      const double v = std::strtod(s.c_str(), &end);
      if (s.empty() || *end != '\0')
        throw std::invalid_argument("CSV: line " + std::to_string(lineno) + ": cannot parse '" + s + "'");
      row.push_back(v);
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

inline Table read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_csv(ss.str());
}

inline void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::invalid_argument("cannot write " + path);
  out << text;
}

/// u, bound, d, w, truncation_k, vacuous_flag.
inline Table bound_table(const TailBoundCurve& c) {
  Table t{{"u", "bound", "d", "w", "truncation_k", "vacuous_flag"}, {}};
  for (std::size_t i = 0; i < c.u.size(); ++i) {
    const auto& b = c.points[i];
    t.rows.push_back({c.u[i], c.values[i], static_cast<double>(b.d), b.w, b.truncation_k, c.values[i] >= 1.0 ? 1.0 : 0.0});
  }
  return t;
}

/// u, q_hat, cp_upper_99, trials.
inline Table empirical_table(const EmpiricalCurve& c) {
  Table t{{"u", "q_hat", "cp_upper_99", "trials"}, {}};
  for (std::size_t i = 0; i < c.u.size(); ++i)
    t.rows.push_back({c.u[i], c.q_hat[i], c.cp_upper[i], static_cast<double>(c.trials)});
  return t;
}

inline EmpiricalCurve empirical_from_table(const Table& t) {
  EmpiricalCurve c;
  c.u = t.values("u");
  c.q_hat = t.values("q_hat");
  c.cp_upper = t.values("cp_upper_99");
  const auto n = t.values("trials");
  c.trials = n.empty() ? 0 : static_cast<std::size_t>(n.front());
  return c;
}

}  // namespace lil::io

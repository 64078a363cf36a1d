#pragma once

// Structured-text interchange. Matrices are
//   {"rows": n, "cols": m, "data": [[re, im], ...]}   (row-major)
// and every floating-point number is written in scientific notation with 17
// significant digits, so files round-trip bit-exactly.

#include <nlohmann/json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>

#include "oplab/certify.hpp"
#include "oplab/linalg.hpp"
#include "oplab/posmaps.hpp"
#include "oplab/spectral.hpp"

namespace oplab::io {

using Json = nlohmann::json;

// ---------------------------------------------------------------------------
// text emission
// ---------------------------------------------------------------------------

inline std::string format_double(double x) {
  if (!std::isfinite(x)) {
    throw Error(ErrorKind::NonFinite, "cannot serialize a non-finite number");
  }
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.16e", x);
  return buf;
}

namespace detail {

inline void write_value(std::ostream& out, const Json& j, int indent, int depth) {
  const std::string pad = indent > 0 ? std::string(static_cast<std::size_t>(indent * (depth + 1)), ' ') : "";
  const std::string close_pad = indent > 0 ? std::string(static_cast<std::size_t>(indent * depth), ' ') : "";
  const char* nl = indent > 0 ? "\n" : "";
  switch (j.type()) {
    case Json::value_t::number_float:
      out << format_double(j.get<double>());
      return;
    case Json::value_t::object: {
      if (j.empty()) {
        out << "{}";
        return;
      }
      out << '{' << nl;
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out << ',' << nl;
        first = false;
        out << pad << Json(it.key()).dump() << (indent > 0 ? ": " : ":");
        write_value(out, it.value(), indent, depth + 1);
      }
      out << nl << close_pad << '}';
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) {
        out << "[]";
        return;
      }
      // Arrays of scalars stay on one line.
      const bool flat = std::none_of(j.begin(), j.end(), [](const Json& e) { return e.is_structured(); }) ||
                        indent == 0;
      out << '[' << (flat ? "" : nl);
      bool first = true;
      for (const auto& e : j) {
        if (!first) out << (flat ? ", " : ",") << (flat ? "" : nl);
        first = false;
        if (!flat) out << pad;
        write_value(out, e, indent, depth + 1);
      }
      out << (flat ? "" : nl) << (flat ? "" : close_pad) << ']';
      return;
    }
    default:
      out << j.dump();
  }
}

}  // namespace detail

/// Serializes `j`; floats use format_double. indent = 0 gives a single line.
inline std::string dump(const Json& j, int indent = 2) {
  std::ostringstream out;
  detail::write_value(out, j, indent, 0);
  return out.str();
}

// ---------------------------------------------------------------------------
// parsing helpers
// ---------------------------------------------------------------------------

/// Parses text; syntax errors report the line and column.
inline Json parse_document(const std::string& text, const std::string& source = "<input>") {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw Error(ErrorKind::ParseError,
                source + ":" + std::to_string(line) + ":" + std::to_string(col) + ": " + e.what());
  }
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::IoError, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::IoError, "cannot write " + path);
  out << text;
  if (!out) throw Error(ErrorKind::IoError, "write failed for " + path);
}

inline Json load_document(const std::string& path) { return parse_document(read_file(path), path); }

inline const Json& field(const Json& j, const char* key, const std::string& path) {
  if (!j.is_object()) throw Error(ErrorKind::ParseError, path + ": expected an object");
  const auto it = j.find(key);
  if (it == j.end()) throw Error(ErrorKind::ParseError, path + "/" + key + ": missing field");
  return *it;
}

inline double number_at(const Json& j, const std::string& path) {
  if (!j.is_number()) throw Error(ErrorKind::ParseError, path + ": expected a number");
  return j.get<double>();
}

inline std::int64_t integer_at(const Json& j, const std::string& path) {
  if (!j.is_number_integer()) throw Error(ErrorKind::ParseError, path + ": expected an integer");
  return j.get<std::int64_t>();
}

inline std::string string_at(const Json& j, const std::string& path) {
  if (!j.is_string()) throw Error(ErrorKind::ParseError, path + ": expected a string");
  return j.get<std::string>();
}

// ---------------------------------------------------------------------------
// matrices
// ---------------------------------------------------------------------------

inline Json to_json(const ComplexMatrix& m) {
  Json data = Json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) data.push_back(Json::array({m(i, j).real(), m(i, j).imag()}));
  }
  return Json{{"rows", m.rows()}, {"cols", m.cols()}, {"data", std::move(data)}};
}

inline ComplexMatrix matrix_from_json(const Json& j, const std::string& path = "") {
  const auto rows = integer_at(field(j, "rows", path), path + "/rows");
  const auto cols = integer_at(field(j, "cols", path), path + "/cols");
  if (rows < 1 || cols < 1) throw Error(ErrorKind::ParseError, path + ": rows and cols must be positive");
  const Json& data = field(j, "data", path);
  if (!data.is_array()) throw Error(ErrorKind::ParseError, path + "/data: expected an array");
  if (static_cast<std::int64_t>(data.size()) != rows * cols) {
    throw Error(ErrorKind::ParseError, path + "/data: expected " + std::to_string(rows * cols) + " entries, got " +
                                           std::to_string(data.size()));
  }
  ComplexMatrix m(rows, cols);
  for (std::size_t k = 0; k < data.size(); ++k) {
    const std::string ep = path + "/data/" + std::to_string(k);
    const Json& e = data[k];
    if (!e.is_array() || e.size() != 2) throw Error(ErrorKind::ParseError, ep + ": expected [re, im]");
    const auto i = static_cast<Index>(k) / cols, c = static_cast<Index>(k) % cols;
    m(i, c) = Complex(number_at(e[0], ep + "/0"), number_at(e[1], ep + "/1"));
  }
  try {
    require_finite(m, "matrix");
  } catch (const Error& e) {
    throw Error(ErrorKind::ParseError, path + ": " + e.what());
  }
  return m;
}

// ---------------------------------------------------------------------------
// positive maps
// ---------------------------------------------------------------------------

inline Json to_json(const PositiveMap& map) {
  return std::visit(
      [&map](const auto& v) -> Json {
        using T = std::decay_t<decltype(v)>;
        Json j;
        if constexpr (std::is_same_v<T, PositiveMap::Kraus>) {
          j["variant"] = "kraus";
          j["weights"] = Json::array();
          for (const auto& w : v.weights) j["weights"].push_back(to_json(w));
        } else if constexpr (std::is_same_v<T, PositiveMap::Schur>) {
          j["variant"] = "schur";
          j["multiplier"] = to_json(v.multiplier);
          if (!v.checked) j["unchecked"] = true;
        } else if constexpr (std::is_same_v<T, PositiveMap::Pinching>) {
          j["variant"] = "pinching";
          j["dim"] = map.input_dim();
          j["partition"] = v.partition;
        } else if constexpr (std::is_same_v<T, PositiveMap::LiftSum>) {
          j["variant"] = "lift_sum";
          j["inner"] = to_json(*v.inner);
        } else if constexpr (std::is_same_v<T, PositiveMap::LiftCorner>) {
          j["variant"] = "lift_corner";
          j["inner"] = to_json(*v.inner);
        } else {
          j["variant"] = "compose";
          j["outer"] = to_json(*v.outer);
          j["inner"] = to_json(*v.inner);
        }
        j["input_dim"] = map.input_dim();
        j["output_dim"] = map.output_dim();
        return j;
      },
      map.variant());
}

inline PositiveMap map_from_json(const Json& j, const std::string& path = "", const Tolerance& tol = {}) {
  const std::string variant = string_at(field(j, "variant", path), path + "/variant");
  auto wrap = [&](auto&& build) -> PositiveMap {
    try {
      return build();
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::ParseError) throw;
      throw Error(ErrorKind::ParseError, path + ": " + e.what());
    }
  };
  if (variant == "kraus") {
    const Json& ws = field(j, "weights", path);
    if (!ws.is_array()) throw Error(ErrorKind::ParseError, path + "/weights: expected an array");
    std::vector<ComplexMatrix> weights;
    for (std::size_t i = 0; i < ws.size(); ++i) {
      weights.push_back(matrix_from_json(ws[i], path + "/weights/" + std::to_string(i)));
    }
    return wrap([&] { return PositiveMap::kraus(std::move(weights)); });
  }
  if (variant == "schur") {
    const ComplexMatrix s = matrix_from_json(field(j, "multiplier", path), path + "/multiplier");
    if (j.value("unchecked", false)) return wrap([&] { return PositiveMap::schur_unchecked(s); });
    return wrap([&] { return PositiveMap::schur(PsdMatrix::from_hermitian(s, tol)); });
  }
  if (variant == "pinching") {
    const auto dim = integer_at(field(j, "dim", path), path + "/dim");
    const Json& parts = field(j, "partition", path);
    std::vector<std::vector<Index>> partition;
    try {
      partition = parts.get<std::vector<std::vector<Index>>>();
    } catch (const Json::exception&) {
      throw Error(ErrorKind::ParseError, path + "/partition: expected a list of index lists");
    }
    return wrap([&] { return PositiveMap::pinching(std::move(partition), static_cast<Index>(dim)); });
  }
  if (variant == "identity") {
    const auto dim = integer_at(field(j, "dim", path), path + "/dim");
    return wrap([&] { return PositiveMap::identity(static_cast<Index>(dim)); });
  }
  if (variant == "lift_sum") return PositiveMap::lift_sum(map_from_json(field(j, "inner", path), path + "/inner", tol));
  if (variant == "lift_corner") {
    return PositiveMap::lift_corner(map_from_json(field(j, "inner", path), path + "/inner", tol));
  }
  if (variant == "compose") {
    PositiveMap outer = map_from_json(field(j, "outer", path), path + "/outer", tol);
    PositiveMap inner = map_from_json(field(j, "inner", path), path + "/inner", tol);
    return wrap([&] { return PositiveMap::compose(std::move(outer), std::move(inner)); });
  }
  throw Error(ErrorKind::ParseError, path + "/variant: unknown variant '" + variant + "'");
}

// ---------------------------------------------------------------------------
// certificates and spectral scales
// ---------------------------------------------------------------------------

inline Json to_json(const InequalityCertificate& c) {
  Json j;
  j["theorem_id"] = std::string(to_string(c.theorem));
  j["form"] = c.form == RhsForm::geometric ? "geo" : "beta";
  if (c.beta) j["beta"] = *c.beta;
  j["margin"] = c.margin;
  j["scale"] = c.scale;
  j["accepted"] = c.accepted;
  j["epsilon"] = 0.0;
  Json aux = Json::object();
  for (const auto& [k, v] : c.aux) aux[k] = v;
  j["aux"] = std::move(aux);
  j["lhs"] = to_json(c.lhs);
  j["rhs"] = to_json(c.rhs);
  j["V"] = to_json(c.V);
  return j;
}

inline InequalityCertificate certificate_from_json(const Json& j, const std::string& path = "") {
  InequalityCertificate c;
  const std::string id = string_at(field(j, "theorem_id", path), path + "/theorem_id");
  const auto theorem = theorem_from_string(id);
  if (!theorem) throw Error(ErrorKind::ParseError, path + "/theorem_id: unknown theorem '" + id + "'");
  c.theorem = *theorem;
  c.form = string_at(field(j, "form", path), path + "/form") == "geo" ? RhsForm::geometric : RhsForm::beta;
  if (j.contains("beta")) c.beta = number_at(j["beta"], path + "/beta");
  c.margin = number_at(field(j, "margin", path), path + "/margin");
  c.scale = number_at(field(j, "scale", path), path + "/scale");
  const Json& acc = field(j, "accepted", path);
  if (!acc.is_boolean()) throw Error(ErrorKind::ParseError, path + "/accepted: expected a boolean");
  c.accepted = acc.get<bool>();
  if (j.contains("aux")) {
    for (auto it = j["aux"].begin(); it != j["aux"].end(); ++it) {
      c.aux[it.key()] = number_at(it.value(), path + "/aux/" + it.key());
    }
  }
  c.lhs = matrix_from_json(field(j, "lhs", path), path + "/lhs");
  c.rhs = matrix_from_json(field(j, "rhs", path), path + "/rhs");
  c.V = matrix_from_json(field(j, "V", path), path + "/V");
  return c;
}

/// {"trace_mode": ..., "total": T, "pieces": [[start, value], ...]}; the
/// first piece starts at 0 and each later start is a breakpoint.
inline Json to_json(const SpectralScale& s) {
  Json pieces = Json::array();
  for (Index k = 0; k < s.size(); ++k) {
    const double start = k == 0 ? 0.0 : s.breakpoints()[static_cast<std::size_t>(k - 1)];
    pieces.push_back(Json::array({start, s.values()(k)}));
  }
  return Json{{"trace_mode", std::string(to_string(s.mode()))}, {"total", s.total()}, {"pieces", std::move(pieces)}};
}

inline Json to_json(const DominanceReport& r) {
  Json j;
  j["dominated"] = r.dominated;
  j["trace_mode"] = std::string(to_string(r.mode));
  j["epsilon"] = r.epsilon;
  j["worst_gap"] = r.worst_gap;
  if (r.margin) j["margin"] = *r.margin;
  if (r.witness_t) j["witness_t"] = *r.witness_t;
  if (r.unitary) j["U"] = to_json(*r.unitary);
  return j;
}

}  // namespace oplab::io

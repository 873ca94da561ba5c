#include "pencurv/io.hpp"
#include "pencurv/errors.hpp"

#include "json.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace pencurv {

using nlohmann::json;

namespace {

PencilEntry parse_entry(const json& v, const std::string& where) {
  PencilEntry e;
  if (v.is_number_integer()) {
    e.exact = v.is_number_unsigned() ? Rational(v.get<std::uint64_t>()) : Rational(v.get<std::int64_t>());
  } else if (v.is_number_float()) {
    e.is_float = true;
    e.value = v.get<double>();
    if (!std::isfinite(e.value)) throw ParseError(where + ": entry is not finite");
    e.exact = Rational(e.value);
  } else if (v.is_string()) {
    try {
      e.exact = parse_rational(v.get<std::string>());
    } catch (const ParseError& err) {
      throw ParseError(where + ": " + err.what());
    }
  } else {
    throw ParseError(where + ": entry must be a number or a rational string");
  }
  return e;
}

std::vector<PencilEntry> parse_matrix(const json& m, int d, const std::string& name) {
  if (!m.is_array()) throw ParseError(name + " must be an array");
  std::vector<PencilEntry> out;
  if (!m.empty() && m.front().is_array()) {
    if (static_cast<int>(m.size()) != d)
      throw DimensionMismatch(name + " has " + std::to_string(m.size()) + " rows, expected " + std::to_string(d));
    for (int i = 0; i < d; ++i) {
      if (!m[i].is_array() || static_cast<int>(m[i].size()) != d)
        throw DimensionMismatch(name + " row " + std::to_string(i) + " has " +
                                std::to_string(m[i].is_array() ? m[i].size() : 0) + " entries, expected " +
                                std::to_string(d));
      for (int j = 0; j < d; ++j)
        out.push_back(parse_entry(m[i][j], name + "[" + std::to_string(i) + "][" + std::to_string(j) + "]"));
    }
  } else {
    if (static_cast<int>(m.size()) != d * d)
      throw DimensionMismatch(name + " has " + std::to_string(m.size()) + " entries, expected " +
                              std::to_string(d * d));
    for (int k = 0; k < d * d; ++k)
      out.push_back(parse_entry(m[k], name + "[" + std::to_string(k / d) + "][" + std::to_string(k % d) + "]"));
  }
  return out;
}

std::string entry_text(const PencilEntry& e) {
  if (e.is_float) {
    std::ostringstream os;
    os.precision(17);
    os << e.value;
    return os.str();
  }
  return to_string(e.exact);
}

void check_symmetric(const std::vector<PencilEntry>& m, int d, const char* name) {
  for (int i = 0; i < d; ++i)
    for (int j = i + 1; j < d; ++j) {
      const PencilEntry& x = m[i * d + j];
      const PencilEntry& y = m[j * d + i];
      bool same;
      if (!x.is_float && !y.is_float) {
        same = x.exact == y.exact;
      } else {
        const double a = to_double(x.exact), b = to_double(y.exact);
        same = std::abs(a - b) <= 1e-12 * std::max({1.0, std::abs(a), std::abs(b)});
      }
      if (!same) {
        std::string what = std::string(name) + "[" + std::to_string(i) + "][" + std::to_string(j) + "] = " +
                           entry_text(x) + " differs from " + name + "[" + std::to_string(j) + "][" +
                           std::to_string(i) + "] = " + entry_text(y);
        throw NotSymmetric(what, i, j);
      }
    }
}

json render_entry(const PencilEntry& e) {
  if (e.is_float) return json(e.value);  // integral doubles print as "2.0" and read back as floats
  if (denominator(e.exact) == 1) {
    const Integer n = numerator(e.exact);
    if (n >= std::numeric_limits<std::int64_t>::min() && n <= std::numeric_limits<std::int64_t>::max())
      return json(static_cast<std::int64_t>(n));
  }
  return json(to_string(e.exact));
}

}  // namespace

bool PencilFile::exact() const {
  for (const auto* m : {&a, &b})
    for (const auto& e : *m)
      if (e.is_float) return false;
  return true;
}

PencilQ PencilFile::exact_pencil() const {
  if (!exact()) return to_exact(float_pencil());
  MatQ ma(d, d), mb(d, d);
  for (int k = 0; k < d * d; ++k) {
    ma(k / d, k % d) = a[k].exact;
    mb(k / d, k % d) = b[k].exact;
  }
  return PencilQ(ma, mb);
}

PencilD PencilFile::float_pencil() const {
  MatD ma(d, d), mb(d, d);
  for (int k = 0; k < d * d; ++k) {
    ma(k / d, k % d) = to_double(a[k].exact);
    mb(k / d, k % d) = to_double(b[k].exact);
  }
  return PencilD(ma, mb);
}

PencilFile parse_pencil_file(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("malformed JSON: ") + e.what());
  }
  if (!j.is_object()) throw ParseError("pencil file must be a JSON object");
  for (const char* key : {"A", "B"})
    if (!j.contains(key)) throw ParseError(std::string("missing field ") + key);
  PencilFile f;
  if (j.contains("d")) {
    if (!j["d"].is_number_integer()) throw ParseError("d must be an integer");
    f.d = j["d"].get<int>();
  } else {
    const json& a = j["A"];
    if (!a.is_array() || a.empty()) throw ParseError("A must be a non-empty array");
    f.d = a.front().is_array() ? static_cast<int>(a.size()) : static_cast<int>(std::lround(std::sqrt(a.size())));
  }
  if (f.d < kMinDim || f.d > kMaxDim)
    throw DimensionMismatch("d = " + std::to_string(f.d) + " is outside [" + std::to_string(kMinDim) + ", " +
                            std::to_string(kMaxDim) + "]");
  if (j.contains("label")) {
    if (!j["label"].is_string()) throw ParseError("label must be a string");
    f.label = j["label"].get<std::string>();
  }
  f.a = parse_matrix(j["A"], f.d, "A");
  f.b = parse_matrix(j["B"], f.d, "B");
  check_symmetric(f.a, f.d, "A");
  check_symmetric(f.b, f.d, "B");
  return f;
}

PencilFile read_pencil_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_pencil_file(ss.str());
}

std::string render_pencil_file(const PencilFile& f) {
  json j = json::object();
  j["d"] = f.d;
  if (f.label) j["label"] = *f.label;
  for (const auto& [name, m] : {std::pair{"A", &f.a}, std::pair{"B", &f.b}}) {
    json rows = json::array();
    for (int i = 0; i < f.d; ++i) {
      json row = json::array();
      for (int k = 0; k < f.d; ++k) row.push_back(render_entry((*m)[i * f.d + k]));
      rows.push_back(row);
    }
    j[name] = rows;
  }
  return j.dump(2) + "\n";
}

PencilFile make_pencil_file(const PencilQ& p, std::optional<std::string> label) {
  PencilFile f;
  f.d = p.dim();
  f.label = std::move(label);
  for (int i = 0; i < f.d; ++i)
    for (int k = 0; k < f.d; ++k) {
      f.a.push_back({p.A(i, k), false, 0.0});
      f.b.push_back({p.B(i, k), false, 0.0});
    }
  return f;
}

PencilFile make_pencil_file(const PencilD& p, std::optional<std::string> label) {
  PencilFile f;
  f.d = p.dim();
  f.label = std::move(label);
  for (int i = 0; i < f.d; ++i)
    for (int k = 0; k < f.d; ++k) {
      f.a.push_back({Rational(p.A(i, k)), true, p.A(i, k)});
      f.b.push_back({Rational(p.B(i, k)), true, p.B(i, k)});
    }
  return f;
}

}  // namespace pencurv

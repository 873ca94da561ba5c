#pragma once

#include "pencurv/pencil.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace pencurv {

// One matrix entry as written in a pencil file. Integers and "p/q" or
// decimal strings are exact; JSON numbers with a fraction or exponent are
// floats (their binary value is still recorded exactly).
struct PencilEntry {
  Rational exact;
  bool is_float = false;
  double value = 0;

  bool operator==(const PencilEntry& o) const {
    return exact == o.exact && is_float == o.is_float && (!is_float || value == o.value);
  }
};

// {"d": 3, "label": "...", "A": [[...], ...], "B": [...]}; matrices may be
// nested rows or flat row-major arrays.
struct PencilFile {
  int d = 0;
  std::optional<std::string> label;
  std::vector<PencilEntry> a, b;  // row-major

  bool exact() const;
  PencilQ exact_pencil() const;  // float entries are symmetrized first
  PencilD float_pencil() const;
  bool operator==(const PencilFile&) const = default;
};

PencilFile parse_pencil_file(const std::string& text);
PencilFile read_pencil_file(const std::filesystem::path& path);
std::string render_pencil_file(const PencilFile& f);
PencilFile make_pencil_file(const PencilQ& p, std::optional<std::string> label = std::nullopt);
PencilFile make_pencil_file(const PencilD& p, std::optional<std::string> label = std::nullopt);

}  // namespace pencurv

#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "nlslab/errors.hpp"
#include "nlslab/spectral_field.hpp"

namespace nlslab {

// All floating-point output goes through here: 17 significant digits round-trip
// any double exactly, and using one formatter everywhere keeps files diffable.
inline std::string format_g17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

// Minimal ordered JSON value for emission. Parsing uses nlohmann::json; this
// exists only because emitted reports must keep insertion order and the g17
// number format.
class Json {
 public:
  static Json object() { return Json(Kind::object); }
  static Json array() { return Json(Kind::array); }
  static Json number(double v) {
    Json j(Kind::number);
    j.num_ = v;
    return j;
  }
  static Json integer(long long v) {
    Json j(Kind::integer);
    j.int_ = v;
    return j;
  }
  static Json boolean(bool v) {
    Json j(Kind::boolean);
    j.bool_ = v;
    return j;
  }
  static Json string(std::string v) {
    Json j(Kind::string);
    j.str_ = std::move(v);
    return j;
  }

  Json& set(const std::string& key, Json v) {
    if (kind_ != Kind::object) throw InvalidArgument("Json::set on a non-object");
    members_.emplace_back(key, std::move(v));
    return *this;
  }

  Json& push(Json v) {
    if (kind_ != Kind::array) throw InvalidArgument("Json::push on a non-array");
    items_.push_back(std::move(v));
    return *this;
  }

  std::string dump(int indent = 2) const {
    std::string out;
    write(out, indent, 0);
    out.push_back('\n');
    return out;
  }

 private:
  enum class Kind { object, array, number, integer, boolean, string };

  explicit Json(Kind k) : kind_(k) {}

  static void escape(std::string& out, const std::string& s) {
    out.push_back('"');
    for (char c : s) {
      switch (c) {
        case '"': out += "\\\""; break;
        case '\\': out += "\\\\"; break;
        case '\n': out += "\\n"; break;
        case '\t': out += "\\t"; break;
        case '\r': out += "\\r"; break;
        default:
          if (static_cast<unsigned char>(c) < 0x20) {
            char buf[8];
            std::snprintf(buf, sizeof(buf), "\\u%04x", static_cast<unsigned>(c));
            out += buf;
          } else {
            out.push_back(c);
          }
      }
    }
    out.push_back('"');
  }

  void write(std::string& out, int indent, int depth) const {
    const std::string pad(static_cast<size_t>(indent) * (depth + 1), ' ');
    const std::string close_pad(static_cast<size_t>(indent) * depth, ' ');
    switch (kind_) {
      case Kind::number: out += format_g17(num_); break;
      case Kind::integer: out += std::to_string(int_); break;
      case Kind::boolean: out += bool_ ? "true" : "false"; break;
      case Kind::string: escape(out, str_); break;
      case Kind::object: {
        if (members_.empty()) {
          out += "{}";
          break;
        }
        out += "{\n";
        for (size_t i = 0; i < members_.size(); ++i) {
          out += pad;
          escape(out, members_[i].first);
          out += ": ";
          members_[i].second.write(out, indent, depth + 1);
          out += i + 1 < members_.size() ? ",\n" : "\n";
        }
        out += close_pad + "}";
        break;
      }
      case Kind::array: {
        if (items_.empty()) {
          out += "[]";
          break;
        }
        // Arrays of scalars stay on one line; arrays of containers get one
        // element per line (coefficient triples read better that way).
        bool scalars = true;
        for (const auto& v : items_)
          if (v.kind_ == Kind::object || v.kind_ == Kind::array) scalars = false;
        if (scalars) {
          out += "[";
          for (size_t i = 0; i < items_.size(); ++i) {
            items_[i].write(out, indent, depth + 1);
            if (i + 1 < items_.size()) out += ", ";
          }
          out += "]";
          break;
        }
        out += "[\n";
        for (size_t i = 0; i < items_.size(); ++i) {
          out += pad;
          items_[i].write(out, indent, depth + 1);
          out += i + 1 < items_.size() ? ",\n" : "\n";
        }
        out += close_pad + "]";
        break;
      }
    }
  }

  Kind kind_;
  double num_ = 0.0;
  long long int_ = 0;
  bool bool_ = false;
  std::string str_;
  std::vector<std::pair<std::string, Json>> members_;
  std::vector<Json> items_;
};

// Write-to-temp-then-rename so readers never observe a half-written file.
inline void atomic_write_file(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw InvalidArgument("cannot open for writing: " + tmp);
    out << content;
    out.flush();
    if (!out) throw InvalidArgument("write failed: " + tmp);
  }
  std::filesystem::rename(tmp, path);
}

inline void write_csv(const std::string& path, const std::vector<std::string>& header,
                      const std::vector<std::vector<double>>& rows) {
  std::string out;
  for (size_t i = 0; i < header.size(); ++i) {
    out += header[i];
    out += i + 1 < header.size() ? ',' : '\n';
  }
  for (const auto& row : rows) {
    if (row.size() != header.size())
      throw InvalidArgument("write_csv: row width does not match header");
    for (size_t i = 0; i < row.size(); ++i) {
      out += format_g17(row[i]);
      out += i + 1 < row.size() ? ',' : '\n';
    }
  }
  atomic_write_file(path, out);
}

// ---- field serialization ----------------------------------------------------

// {"nmax": N, "coeffs": [[n, re, im], ...]} with only nonzero coefficients,
// sorted by n. nmax records the window even when the tail is zero.
inline Json field_to_json(const SpectralField& f) {
  Json coeffs = Json::array();
  for (int n = -f.nmax(); n <= f.nmax(); ++n) {
    const cdouble a = f.coeff(n);
    if (a == cdouble(0.0, 0.0)) continue;
    Json triple = Json::array();
    triple.push(Json::integer(n)).push(Json::number(a.real())).push(Json::number(a.imag()));
    coeffs.push(std::move(triple));
  }
  Json j = Json::object();
  j.set("nmax", Json::integer(f.nmax()));
  j.set("coeffs", std::move(coeffs));
  return j;
}

inline SpectralField field_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("nmax") || !j.contains("coeffs"))
    throw InvalidArgument("field: expected {\"nmax\": int, \"coeffs\": [[n, re, im], ...]}");
  if (!j["nmax"].is_number_integer() || j["nmax"].get<long long>() < 0)
    throw InvalidArgument("field: nmax must be a nonnegative integer");
  const int nmax = j["nmax"].get<int>();
  SpectralField f(nmax);
  if (!j["coeffs"].is_array()) throw InvalidArgument("field: coeffs must be an array");
  for (const auto& entry : j["coeffs"]) {
    if (!entry.is_array() || entry.size() != 3 || !entry[0].is_number_integer() ||
        !entry[1].is_number() || !entry[2].is_number())
      throw InvalidArgument("field: each coeff must be [n, re, im]");
    const int n = entry[0].get<int>();
    if (std::abs(n) > nmax) throw InvalidArgument("field: coeff index outside nmax window");
    const double re = entry[1].get<double>();
    const double im = entry[2].get<double>();
    if (!std::isfinite(re) || !std::isfinite(im))
      throw InvalidArgument("field: coefficients must be finite");
    f.set(n, cdouble(re, im));
  }
  return f;
}

inline SpectralField read_field_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open field file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument("field file " + path + ": " + e.what());
  }
  return field_from_json(j);
}

// ---- checked config access ---------------------------------------------------

// Navigates a dotted path ("solver.dt"); every failure names the full path so
// a bad config is a one-line fix.
inline const nlohmann::json& config_at(const nlohmann::json& root, const std::string& dotted) {
  const nlohmann::json* cur = &root;
  size_t start = 0;
  while (true) {
    const size_t dot = dotted.find('.', start);
    const std::string key = dotted.substr(start, dot == std::string::npos ? dot : dot - start);
    if (!cur->is_object() || !cur->contains(key))
      throw InvalidArgument("config error at " + dotted + ": missing");
    cur = &(*cur)[key];
    if (dot == std::string::npos) return *cur;
    start = dot + 1;
  }
}

inline bool config_has(const nlohmann::json& root, const std::string& dotted) {
  try {
    config_at(root, dotted);
    return true;
  } catch (const InvalidArgument&) {
    return false;
  }
}

inline double config_number(const nlohmann::json& root, const std::string& dotted) {
  const auto& v = config_at(root, dotted);
  if (!v.is_number()) throw InvalidArgument("config error at " + dotted + ": expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw InvalidArgument("config error at " + dotted + ": must be finite");
  return x;
}

inline long long config_integer(const nlohmann::json& root, const std::string& dotted) {
  const auto& v = config_at(root, dotted);
  if (!v.is_number_integer())
    throw InvalidArgument("config error at " + dotted + ": expected an integer");
  return v.get<long long>();
}

inline std::string config_string(const nlohmann::json& root, const std::string& dotted) {
  const auto& v = config_at(root, dotted);
  if (!v.is_string()) throw InvalidArgument("config error at " + dotted + ": expected a string");
  return v.get<std::string>();
}

inline bool config_bool(const nlohmann::json& root, const std::string& dotted) {
  const auto& v = config_at(root, dotted);
  if (!v.is_boolean()) throw InvalidArgument("config error at " + dotted + ": expected a boolean");
  return v.get<bool>();
}

template <typename T>
T config_or(const nlohmann::json& root, const std::string& dotted, T fallback);

template <>
inline double config_or<double>(const nlohmann::json& root, const std::string& dotted,
                                double fallback) {
  return config_has(root, dotted) ? config_number(root, dotted) : fallback;
}

template <>
inline long long config_or<long long>(const nlohmann::json& root, const std::string& dotted,
                                      long long fallback) {
  return config_has(root, dotted) ? config_integer(root, dotted) : fallback;
}

template <>
inline bool config_or<bool>(const nlohmann::json& root, const std::string& dotted, bool fallback) {
  return config_has(root, dotted) ? config_bool(root, dotted) : fallback;
}

template <>
inline std::string config_or<std::string>(const nlohmann::json& root, const std::string& dotted,
                                          std::string fallback) {
  return config_has(root, dotted) ? config_string(root, dotted) : fallback;
}

inline nlohmann::json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open config file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument("config file " + path + ": " + e.what());
  }
  return j;
}

}  // namespace nlslab

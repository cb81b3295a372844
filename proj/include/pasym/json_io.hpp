#pragma once

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "pasym/errors.hpp"

namespace pasym {

using Json = nlohmann::ordered_json;

namespace detail {

// Numbers are printed with %.17g so identical runs give byte-identical
// reports regardless of the library's shortest-round-trip formatting.
inline void write_json(std::ostream& os, const Json& j, int indent, int depth) {
  const std::string pad(static_cast<std::size_t>(indent) * depth, ' ');
  const std::string pad_in(static_cast<std::size_t>(indent) * (depth + 1), ' ');
  switch (j.type()) {
    case nlohmann::detail::value_t::object: {
      if (j.empty()) {
        os << "{}";
        return;
      }
      os << "{\n";
      std::size_t i = 0;
      for (const auto& [key, val] : j.items()) {
        os << pad_in << Json(key).dump() << ": ";
        write_json(os, val, indent, depth + 1);
        if (++i != j.size()) os << ',';
        os << '\n';
      }
      os << pad << '}';
      return;
    }
    case nlohmann::detail::value_t::array: {
      if (j.empty()) {
        os << "[]";
        return;
      }
      os << "[\n";
      for (std::size_t i = 0; i < j.size(); ++i) {
        os << pad_in;
        write_json(os, j[i], indent, depth + 1);
        if (i + 1 != j.size()) os << ',';
        os << '\n';
      }
      os << pad << ']';
      return;
    }
    case nlohmann::detail::value_t::number_float: {
      const double v = j.get<double>();
      if (!std::isfinite(v)) {
        os << "null";
        return;
      }
      char buf[40];
      std::snprintf(buf, sizeof(buf), "%.17g", v);
      os << buf;
      return;
    }
    default:
      os << j.dump();
      return;
  }
}

}  // namespace detail

inline std::string dump_json(const Json& j, int indent = 2) {
  std::ostringstream os;
  detail::write_json(os, j, indent, 0);
  os << '\n';
  return os.str();
}

inline void save_json(const std::string& path, const Json& j) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw DomainError("cannot open for writing: " + path);
  f << dump_json(j);
}

inline Json load_json(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw DomainError("cannot open: " + path);
  try {
    return Json::parse(f);
  } catch (const nlohmann::json::parse_error& e) {
    throw DomainError("json parse error in " + path + ": " + e.what());
  }
}

}  // namespace pasym

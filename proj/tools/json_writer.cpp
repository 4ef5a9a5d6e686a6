#include "json_writer.hpp"

#include <array>
#include <charconv>
#include <cmath>

namespace conecusp::cli {

std::string format_double(double v) {
  if (!std::isfinite(v)) return "null";
  std::array<char, 64> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  std::string out(buf.data(), res.ptr);
  if (out.find_first_of(".eE") == std::string::npos) out += ".0";
  return out;
}

namespace {

bool is_scalar(const Json& v) { return !v.is_array() && !v.is_object(); }

void write_scalar(const Json& v, std::string& out) {
  if (v.is_number_float()) {
    out += format_double(v.get<double>());
  } else {
    out += v.dump();
  }
}

void write(const Json& v, int depth, std::string& out) {
  const std::string pad(2 * (depth + 1), ' ');
  const std::string close_pad(2 * depth, ' ');
  if (v.is_object()) {
    if (v.empty()) {
      out += "{}";
      return;
    }
    out += "{\n";
    bool first = true;
    for (auto it = v.begin(); it != v.end(); ++it) {
      if (!first) out += ",\n";
      first = false;
      out += pad;
      out += Json(it.key()).dump();
      out += ": ";
      write(it.value(), depth + 1, out);
    }
    out += "\n" + close_pad + "}";
  } else if (v.is_array()) {
    if (v.empty()) {
      out += "[]";
      return;
    }
    bool flat = true;
    for (const auto& e : v) flat = flat && is_scalar(e);
    if (flat) {
      out += "[";
      for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ", ";
        write_scalar(v[i], out);
      }
      out += "]";
      return;
    }
    out += "[\n";
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (i) out += ",\n";
      out += pad;
      write(v[i], depth + 1, out);
    }
    out += "\n" + close_pad + "]";
  } else {
    write_scalar(v, out);
  }
}

}  // namespace

std::string to_text(const Json& value) {
  std::string out;
  write(value, 0, out);
  out += "\n";
  return out;
}

}  // namespace conecusp::cli

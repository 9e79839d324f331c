#pragma once

#include <cmath>
#include <cstdint>
#include <string>

#include <fmt/format.h>

#include "pcx/types.hpp"

namespace pcx::detail {

// Flat JSON object writer. Doubles use 17 significant digits; non-finite
// values are written as the strings "inf", "-inf" and "nan".
class JsonLine {
 public:
  static std::string number(double v) {
    if (std::isnan(v)) return "\"nan\"";
    if (std::isinf(v)) return v > 0 ? "\"inf\"" : "\"-inf\"";
    return fmt::format("{:.17g}", v);
  }

  static std::string quote(const std::string& s) {
    std::string out = "\"";
    for (char ch : s) {
      switch (ch) {
        case '"': out += "\\\""; break;
        case '\\': out += "\\\\"; break;
        case '\n': out += "\\n"; break;
        case '\t': out += "\\t"; break;
        default:
          if (static_cast<unsigned char>(ch) < 0x20) out += fmt::format("\\u{:04x}", static_cast<int>(ch));
          else out += ch;
      }
    }
    return out + "\"";
  }

  JsonLine& raw(const std::string& key, const std::string& json) {
    if (!body_.empty()) body_ += ',';
    body_ += quote(key);
    body_ += ':';
    body_ += json;
    return *this;
  }
  JsonLine& add(const std::string& key, double v) { return raw(key, number(v)); }
  JsonLine& add(const std::string& key, int v) { return raw(key, std::to_string(v)); }
  JsonLine& add(const std::string& key, std::uint64_t v) { return raw(key, std::to_string(v)); }
  JsonLine& add(const std::string& key, bool v) { return raw(key, v ? "true" : "false"); }
  JsonLine& add(const std::string& key, const std::string& v) { return raw(key, quote(v)); }
  JsonLine& add(const std::string& key, const char* v) { return raw(key, quote(v)); }
  JsonLine& add(const std::string& key, const Vector& v) {
    std::string arr = "[";
    for (Eigen::Index i = 0; i < v.size(); ++i) {
      if (i) arr += ',';
      arr += number(v[i]);
    }
    return raw(key, arr + "]");
  }
  template <typename Seq>
  JsonLine& add_list(const std::string& key, const Seq& seq) {
    std::string arr = "[";
    bool first = true;
    for (const auto& e : seq) {
      if (!first) arr += ',';
      first = false;
      if constexpr (std::is_floating_point_v<std::decay_t<decltype(e)>>) arr += number(e);
      else arr += std::to_string(e);
    }
    return raw(key, arr + "]");
  }

  std::string str() const { return "{" + body_ + "}"; }

 private:
  std::string body_;
};

}  // namespace pcx::detail

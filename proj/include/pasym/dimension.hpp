#pragma once

#include <array>
#include <cctype>
#include <cmath>
#include <string>
#include <string_view>

#include "pasym/errors.hpp"
#include "pasym/rational.hpp"

#include <json.hpp>

namespace pasym {

/// Ordered base units. Fixed to the four the library works in; everything
/// else is expressed as rational powers of these.
inline constexpr int kNumBaseUnits = 4;
inline constexpr std::array<const char*, kNumBaseUnits> kBaseUnitNames{"kg", "m", "s", "K"};

inline int base_unit_index(std::string_view name) {
  for (int i = 0; i < kNumBaseUnits; ++i)
    if (name == kBaseUnitNames[i]) return i;
  return -1;
}

/// Rational exponent tuple over (kg, m, s, K). The all-zero Dimension is
/// dimensionless.
class Dimension {
 public:
  Dimension() = default;
  explicit Dimension(std::array<Rational, kNumBaseUnits> exponents)
      : exp_(std::move(exponents)) {}

  static Dimension base(int index, Rational e = Rational(1)) {
    Dimension d;
    d.exp_[index] = e;
    return d;
  }

  const Rational& operator[](int i) const { return exp_[i]; }
  const std::array<Rational, kNumBaseUnits>& exponents() const { return exp_; }

  bool dimensionless() const {
    for (const auto& e : exp_)
      if (!e.is_zero()) return false;
    return true;
  }

  friend Dimension operator*(const Dimension& a, const Dimension& b) {
    Dimension d;
    for (int i = 0; i < kNumBaseUnits; ++i) d.exp_[i] = a.exp_[i] + b.exp_[i];
    return d;
  }
  friend Dimension operator/(const Dimension& a, const Dimension& b) {
    Dimension d;
    for (int i = 0; i < kNumBaseUnits; ++i) d.exp_[i] = a.exp_[i] - b.exp_[i];
    return d;
  }
  Dimension pow(const Rational& r) const {
    Dimension d;
    for (int i = 0; i < kNumBaseUnits; ++i) d.exp_[i] = exp_[i] * r;
    return d;
  }
  Dimension inverse() const { return pow(Rational(-1)); }

  friend bool operator==(const Dimension& a, const Dimension& b) { return a.exp_ == b.exp_; }

  /// "kg m^2 s^-2", "1" for dimensionless.
  std::string to_string() const {
    std::string out;
    for (int i = 0; i < kNumBaseUnits; ++i) {
      if (exp_[i].is_zero()) continue;
      if (!out.empty()) out += ' ';
      out += kBaseUnitNames[i];
      if (!(exp_[i] == Rational(1))) out += '^' + exp_[i].to_string();
    }
    return out.empty() ? "1" : out;
  }

  /// Parses a minimal unit grammar: products of kg|m|s|K tokens with optional
  /// `^` rational exponents (parentheses allowed) and `/` division, e.g.
  /// "m/s^2", "kg*m^2/s^2/K", "s^(1/2)", "1".
  static Dimension parse(std::string_view text) {
    Dimension d;
    std::size_t i = 0;
    bool dividing = false;
    bool expect_factor = true;
    auto skip_ws = [&] {
      while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    };
    skip_ws();
    if (i == text.size()) return d;  // empty means dimensionless
    while (i < text.size()) {
      skip_ws();
      if (i == text.size()) break;
      const char c = text[i];
      if (c == '*' || c == '/') {
        if (expect_factor) throw DimensionError("unit parse: misplaced '" + std::string(1, c) + "'");
        dividing = (c == '/');
        expect_factor = true;
        ++i;
        continue;
      }
      // factor: base token or literal 1
      if (c == '1') {
        ++i;
        expect_factor = false;
        dividing = false;
        continue;
      }
      std::size_t start = i;
      while (i < text.size() && std::isalpha(static_cast<unsigned char>(text[i]))) ++i;
      const int unit = base_unit_index(text.substr(start, i - start));
      if (unit < 0)
        throw DimensionError("unit parse: unknown token in '" + std::string(text) + "'");
      Rational e(1);
      skip_ws();
      if (i < text.size() && text[i] == '^') {
        ++i;
        skip_ws();
        bool paren = (i < text.size() && text[i] == '(');
        if (paren) ++i;
        std::size_t estart = i;
        if (i < text.size() && (text[i] == '-' || text[i] == '+')) ++i;
        while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) ++i;
        // '/' continues the exponent only when a digit follows (s^1/2), else
        // it is a unit division (m^2/s^2)
        if (i + 1 < text.size() && text[i] == '/' &&
            std::isdigit(static_cast<unsigned char>(text[i + 1]))) {
          ++i;
          while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) ++i;
        }
        e = Rational::parse(text.substr(estart, i - estart));
        if (paren) {
          if (i >= text.size() || text[i] != ')')
            throw DimensionError("unit parse: missing ')' in '" + std::string(text) + "'");
          ++i;
        }
      }
      d.exp_[unit] += dividing ? -e : e;
      expect_factor = false;
      dividing = false;  // '/' binds to the factor that follows it
    }
    if (expect_factor) throw DimensionError("unit parse: dangling operator in '" + std::string(text) + "'");
    return d;
  }

  /// JSON object {"kg":"1","m":"2","s":"-2"}; omitted keys mean zero.
  nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json j = nlohmann::ordered_json::object();
    for (int i = 0; i < kNumBaseUnits; ++i)
      if (!exp_[i].is_zero()) j[kBaseUnitNames[i]] = exp_[i].to_string();
    return j;
  }
  static Dimension from_json(const nlohmann::json& j) {
    Dimension d;
    for (const auto& [key, val] : j.items()) {
      const int unit = base_unit_index(key);
      if (unit < 0) throw DimensionError("dimension json: unknown base unit '" + key + "'");
      d.exp_[unit] = val.is_string() ? Rational::parse(val.get<std::string>())
                                     : Rational(val.get<std::int64_t>());
    }
    return d;
  }

 private:
  std::array<Rational, kNumBaseUnits> exp_{};
};

namespace units {
inline Dimension dimensionless() { return Dimension{}; }
inline Dimension kg() { return Dimension::base(0); }
inline Dimension m() { return Dimension::base(1); }
inline Dimension s() { return Dimension::base(2); }
inline Dimension K() { return Dimension::base(3); }
inline Dimension velocity() { return m() / s(); }
inline Dimension acceleration() { return m() / s().pow(2); }
inline Dimension momentum() { return kg() * m() / s(); }
inline Dimension energy() { return kg() * m().pow(2) / s().pow(2); }
}  // namespace units

/// A real value tagged with a Dimension.
struct Quantity {
  double value = 0.0;
  Dimension dim;

  Quantity() = default;
  Quantity(double v, Dimension d) : value(v), dim(std::move(d)) {
    if (!std::isfinite(value)) throw NonFiniteError("Quantity: non-finite value");
  }
};

inline Quantity operator*(const Quantity& a, const Quantity& b) {
  return {a.value * b.value, a.dim * b.dim};
}
inline Quantity operator/(const Quantity& a, const Quantity& b) {
  return {a.value / b.value, a.dim / b.dim};
}

/// Change of unit convention: one strictly positive factor per base unit.
/// The factor is what multiplies a quantity's numerical value when base unit
/// u is replaced (lengths m -> cm gives scale 100 for m).
struct UnitScaling {
  std::array<double, kNumBaseUnits> scale{1.0, 1.0, 1.0, 1.0};

  static UnitScaling identity() { return {}; }

  void validate() const {
    for (double s : scale)
      if (!(s > 0.0) || !std::isfinite(s))
        throw DomainError("UnitScaling: scales must be strictly positive");
  }

  /// Multiplier applied to a value of the given Dimension.
  double factor(const Dimension& d) const {
    double f = 1.0;
    for (int i = 0; i < kNumBaseUnits; ++i)
      if (!d[i].is_zero()) f *= std::pow(scale[i], d[i].value());
    return f;
  }
  double log_factor(const Dimension& d) const {
    double f = 0.0;
    for (int i = 0; i < kNumBaseUnits; ++i)
      if (!d[i].is_zero()) f += d[i].value() * std::log(scale[i]);
    return f;
  }

  UnitScaling composed(const UnitScaling& then) const {
    UnitScaling r;
    for (int i = 0; i < kNumBaseUnits; ++i) r.scale[i] = scale[i] * then.scale[i];
    return r;
  }
};

/// Re-expresses q in the new unit convention. The Dimension is unchanged;
/// only the numerical value moves.
inline Quantity rescale_quantity(const Quantity& q, const UnitScaling& s) {
  s.validate();
  return {q.value * s.factor(q.dim), q.dim};
}

}  // namespace pasym

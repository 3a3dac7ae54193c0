#include "chiral/lab/units.hpp"

#include <cctype>
#include <cmath>
#include <sstream>

#include "chiral/reservoir/physical.hpp"

namespace chiral::lab {

namespace si = reservoir::si;

Real UnitSystem::e0_joule() const { return si::h * e0_hz; }

Real UnitSystem::k0_per_m() const { return std::sqrt(2.0 * mass_b_amu * si::amu * e0_joule()) / si::hbar; }

Real UnitSystem::rate_per_s() const { return e0_joule() / si::hbar; }

namespace {

[[noreturn]] void fail(const std::string& key, const std::string& msg) {
  throw Error(ErrorCode::ConfigError, "key '" + key + "': " + msg);
}

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

}  // namespace

Real parse_quantity(const std::string& key, const std::string& text, Dimension dim, const UnitSystem& u) {
  const std::string t = trim(text);
  if (t.empty()) fail(key, "empty value");
  std::size_t used = 0;
  Real v = 0.0;
  try {
    v = std::stod(t, &used);
  } catch (const std::exception&) {
    fail(key, "expected a number, got '" + t + "'");
  }
  if (!std::isfinite(v)) fail(key, "value is not finite");
  const std::string unit = trim(t.substr(used));
  if (unit.empty()) return v;

  const Real e0 = u.e0_joule();
  const Real k0 = u.k0_per_m();
  switch (dim) {
    case Dimension::None:
      fail(key, "unit '" + unit + "' does not fit this quantity");
    case Dimension::Energy:
      if (unit == "E0") return v;
      if (unit == "Hz") return v * si::h / e0;
      if (unit == "kHz") return v * 1e3 * si::h / e0;
      if (unit == "MHz") return v * 1e6 * si::h / e0;
      if (unit == "nK") return v * 1e-9 * si::k_b / e0;
      if (unit == "uK") return v * 1e-6 * si::k_b / e0;
      if (unit == "mK") return v * 1e-3 * si::k_b / e0;
      if (unit == "K") return v * si::k_b / e0;
      fail(key, "unit '" + unit + "' does not fit this quantity");
    case Dimension::Wavevector:
      if (unit == "k0") return v;
      if (unit == "1/um" || unit == "um^-1") return v * 1e6 / k0;
      if (unit == "1/m" || unit == "m^-1") return v / k0;
      fail(key, "unit '" + unit + "' does not fit this quantity");
    case Dimension::Length:
      if (unit == "1/k0") return v;
      if (unit == "nm") return v * 1e-9 * k0;
      if (unit == "um") return v * 1e-6 * k0;
      if (unit == "mm") return v * 1e-3 * k0;
      if (unit == "m") return v * k0;
      fail(key, "unit '" + unit + "' does not fit this quantity");
    case Dimension::Coupling:
      if (unit == "E0/k0") return v;
      if (unit == "J*m" || unit == "Jm") return v / (e0 / k0);
      fail(key, "unit '" + unit + "' does not fit this quantity");
  }
  fail(key, "unit '" + unit + "' does not fit this quantity");
}

}  // namespace chiral::lab

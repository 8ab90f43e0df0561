#pragma once

// Physical constants, unit conversions and density-derived length scales for
// the 32p+32p <-> 32s+33s Forster-resonance simulations.
//
// Native units across the library:
//   length   micrometre (um)
//   time     microsecond (us)
//   energy   megahertz (MHz), plain frequency convention: a level splitting
//            of E MHz accrues phase 2*pi*E*T with T in us
//   density  atoms/cm^3 at the API surface only; converted once on entry
//
// Dipole matrix elements are carried in atomic units (a0*e); the product
// r_ps*r_ps' / R^3 is turned into MHz with kAtomicToMHzPerUm3 below.

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace rydqpm::units {

// Conversion e^2*a0^2 / (4*pi*eps0*h), expressed in MHz*um^3.
// Derivation (CODATA 2018): e = 1.602176634e-19 C, a0 = 5.29177210903e-11 m,
// eps0 = 8.8541878128e-12 F/m, h = 6.62607015e-34 J s gives
// 9.750085633354996e-16 Hz m^3; x1e18 um^3/m^3, x1e-6 MHz/Hz.
// Frozen as a literal so golden outputs are bit-stable.
inline constexpr double kAtomicToMHzPerUm3 = 9.750085633354996e-4;

// 32p->32s and 32p->33s radial matrix elements, atomic units.
inline constexpr double kRadialPS = 964.0;
inline constexpr double kRadialPSPrime = 941.0;

// pp<->ss' resonance field and linear Stark-detuning slope near it.
inline constexpr double kResonanceFieldVcm = 11.49;
inline constexpr double kDetuningSlopeMHzPerVcm = 170.0;

// Linearisation of E(F) is only trusted this far from resonance.
inline constexpr double kLinearFieldRangeVcm = 0.5;

inline constexpr double kCm3ToUm3 = 1e-12;  // (atoms/cm^3) -> (atoms/um^3)

struct PhysicalConstants {
  double r_ps = kRadialPS;
  double r_ps_prime = kRadialPSPrime;
  double f0_v_cm = kResonanceFieldVcm;
  double detuning_slope = kDetuningSlopeMHzPerVcm;
  double atomic_to_mhz_per_um3 = kAtomicToMHzPerUm3;
};

/// Atom density, stored as atoms/cm^3. Positive by construction.
class Density {
 public:
  explicit Density(double per_cm3) : per_cm3_(per_cm3) {
    if (!(per_cm3 > 0.0) || !std::isfinite(per_cm3))
      throw std::invalid_argument("Density must be positive and finite, got " +
                                  std::to_string(per_cm3));
  }
  double per_cm3() const { return per_cm3_; }
  double per_um3() const { return per_cm3_ * kCm3ToUm3; }

 private:
  double per_cm3_;
};

/// Stark detuning E(F) = 170*(F - F0) MHz. Valid as a linearisation for
/// |F - F0| <= 0.5 V/cm; callers outside that window should attach the
/// warning from linear_range_warning() to their run metadata.
inline double detuning_from_field(double field_v_cm) {
  if (!std::isfinite(field_v_cm))
    throw std::invalid_argument("detuning_from_field: non-finite field");
  return kDetuningSlopeMHzPerVcm * (field_v_cm - kResonanceFieldVcm);
}

inline double field_from_detuning(double detuning_mhz) {
  if (!std::isfinite(detuning_mhz))
    throw std::invalid_argument("field_from_detuning: non-finite detuning");
  return kResonanceFieldVcm + detuning_mhz / kDetuningSlopeMHzPerVcm;
}

inline bool field_in_linear_range(double field_v_cm) {
  return std::abs(field_v_cm - kResonanceFieldVcm) <= kLinearFieldRangeVcm;
}

inline std::string linear_range_warning(double field_v_cm) {
  return "field " + std::to_string(field_v_cm) +
         " V/cm lies outside the linear Stark window |F-F0| <= " +
         std::to_string(kLinearFieldRangeVcm) + " V/cm";
}

/// Most probable nearest-neighbour separation R0 = (2 pi rho)^(-1/3), um.
inline double r0_from_density(const Density& rho) {
  return std::pow(2.0 * std::numbers::pi * rho.per_um3(), -1.0 / 3.0);
}

/// Mean nearest-neighbour separation (3 ln2 / (4 pi rho))^(1/3) ~= 1.01 R0.
inline double r_avg_from_density(const Density& rho) {
  return std::pow(3.0 * std::numbers::ln2 /
                      (4.0 * std::numbers::pi * rho.per_um3()),
                  1.0 / 3.0);
}

/// Radial part of the dipole-dipole coupling, r_ps*r_ps'/R^3 in MHz.
/// The channel-dependent angular factor lives in pair_coupling.
inline double coupling_prefactor(double separation_um) {
  if (!(separation_um > 0.0) || !std::isfinite(separation_um))
    throw std::invalid_argument("coupling_prefactor: separation must be > 0");
  const double r3 = separation_um * separation_um * separation_um;
  return kRadialPS * kRadialPSPrime * kAtomicToMHzPerUm3 / r3;
}

}  // namespace rydqpm::units

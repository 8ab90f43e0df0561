#include "rydqpm/pair_coupling.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace rydqpm::pair {

namespace {
constexpr double kInvSqrt2 = std::numbers::sqrt2 / 2.0;
}

void validate(const AtomPair& pair) {
  if (!(pair.separation_um > 0.0) || !std::isfinite(pair.separation_um))
    throw std::invalid_argument("AtomPair: separation must be > 0");
  if (!(pair.theta >= 0.0 && pair.theta <= std::numbers::pi))
    throw std::invalid_argument("AtomPair: theta outside [0, pi]");
  if (!(pair.phi >= 0.0 && pair.phi < 2.0 * std::numbers::pi))
    throw std::invalid_argument("AtomPair: phi outside [0, 2 pi)");
}

std::complex<double> angular_delta_m2(double radial_mhz, double theta,
                                      double phi, bool conjugated) {
  const double s = std::sin(theta);
  const double magnitude = -kInvSqrt2 * radial_mhz * s * s;
  const double sign = conjugated ? 1.0 : -1.0;
  return {magnitude * std::cos(2.0 * phi), sign * magnitude * std::sin(2.0 * phi)};
}

double angular_delta_m0(double radial_mhz, double theta) {
  const double s = std::sin(theta);
  return kInvSqrt2 * radial_mhz * (s * s - 2.0 / 3.0);
}

std::complex<double> channel_coupling(const AtomPair& pair) {
  validate(pair);
  const double radial = units::coupling_prefactor(pair.separation_um);
  switch (pair.channel) {
    case Channel::PlusPlus:
      return angular_delta_m2(radial, pair.theta, pair.phi, false);
    case Channel::MinusMinus:
      return angular_delta_m2(radial, pair.theta, pair.phi, true);
    case Channel::PlusMinus:
    case Channel::MinusPlus:
      return {angular_delta_m0(radial, pair.theta), 0.0};
  }
  throw std::logic_error("channel_coupling: unreachable");
}

PairEigensystem pair_eigensystem(double detuning_mhz,
                                 std::complex<double> coupling_mhz) {
  if (!std::isfinite(detuning_mhz) || !std::isfinite(std::abs(coupling_mhz)))
    throw std::invalid_argument("pair_eigensystem: non-finite input");
  const double gamma = generalized_rabi(detuning_mhz, coupling_mhz);
  return PairEigensystem{
      0.5 * (detuning_mhz + gamma),
      0.5 * (detuning_mhz - gamma),
      std::atan2(2.0 * std::abs(coupling_mhz), detuning_mhz),
  };
}

double generalized_rabi(double detuning_mhz, std::complex<double> coupling_mhz) {
  const double v = std::abs(coupling_mhz);
  return std::hypot(detuning_mhz, 2.0 * v);
}

}  // namespace rydqpm::pair

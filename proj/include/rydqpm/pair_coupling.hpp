#pragma once

// Dipole-dipole coupling channels of a single 32p+32p pair near the
// pp <-> ss' Forster resonance, and the resulting two-level eigensystem.
//
// In the reduced basis (|m_j|=3/2 p states only) the pair dynamics splits
// into four independent two-level systems labelled by the m_j signs of the
// initial pp state. Each pp state couples to one symmetric ss' combination
// with strength
//
//   V(++) = -(r_ps r_ps' / sqrt(2) R^3) sin^2(Theta) e^(-2i Phi)
//   V(--) = conj(V(++))
//   V(+-) = V(-+) = (r_ps r_ps' / sqrt(2) R^3) (sin^2(Theta) - 2/3)

#include <array>
#include <complex>

#include "rydqpm/units.hpp"

namespace rydqpm::pair {

enum class Channel { PlusPlus = 0, MinusMinus = 1, PlusMinus = 2, MinusPlus = 3 };

inline constexpr std::array<Channel, 4> kAllChannels = {
    Channel::PlusPlus, Channel::MinusMinus, Channel::PlusMinus,
    Channel::MinusPlus};

struct AtomPair {
  double separation_um;  ///< R > 0
  double theta;          ///< polar angle vs field axis, [0, pi]
  double phi;            ///< azimuth, [0, 2 pi)
  Channel channel;
};

/// Eigenstructure of H = [[0, V], [V*, E]]:
/// e_pm = (E +- sqrt(E^2 + 4|V|^2)) / 2, tan(alpha) = 2|V| / E.
struct PairEigensystem {
  double e_plus_mhz;
  double e_minus_mhz;
  double alpha;  ///< mixing angle, [0, pi]
};

void validate(const AtomPair& pair);

// The two angular shapes of the reduced-basis DD matrix elements. The
// multi-atom exchange couplings reuse them with squared radial elements.

/// |Delta M_J| = 2 shape: -(1/sqrt 2) sin^2(Theta) e^(-2i Phi), times
/// `radial_mhz`. `conjugated` selects the mirror-sign channel.
std::complex<double> angular_delta_m2(double radial_mhz, double theta,
                                      double phi, bool conjugated);

/// Delta M_J = 0 shape: (1/sqrt 2)(sin^2(Theta) - 2/3), times `radial_mhz`.
double angular_delta_m0(double radial_mhz, double theta);

/// Channel coupling V for one pair, MHz (complex for the ++/-- channels).
std::complex<double> channel_coupling(const AtomPair& pair);

PairEigensystem pair_eigensystem(double detuning_mhz,
                                 std::complex<double> coupling_mhz);

/// Generalized Rabi frequency Gamma = sqrt(E^2 + 4 |V|^2), MHz.
double generalized_rabi(double detuning_mhz, std::complex<double> coupling_mhz);

}  // namespace rydqpm::pair

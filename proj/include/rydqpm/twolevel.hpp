#pragma once

// Exact propagation of one pp <-> ss' channel under piecewise-constant
// detuning, quasi-phase-matching (QPM) sequences, Bloch-sphere trajectory
// sampling and the zone-ledger phase-spread model.
//
// Conventions: the propagator is U = exp(-i 2 pi H T) for
// H = [[0, V], [V*, E]] (MHz, T in us), so a zone accrues Rabi phase
// phi = 2 pi Gamma T with Gamma = sqrt(E^2 + 4 |V|^2).

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace rydqpm::twolevel {

using Complex = std::complex<double>;

/// 2x2 complex transfer matrix acting on amplitudes (C_pp, C_ss').
struct TransferMatrix2 {
  Complex u11{1.0, 0.0}, u12{0.0, 0.0};
  Complex u21{0.0, 0.0}, u22{1.0, 0.0};

  static TransferMatrix2 identity() { return {}; }

  TransferMatrix2 operator*(const TransferMatrix2& rhs) const {
    return {u11 * rhs.u11 + u12 * rhs.u21, u11 * rhs.u12 + u12 * rhs.u22,
            u21 * rhs.u11 + u22 * rhs.u21, u21 * rhs.u12 + u22 * rhs.u22};
  }

  /// max-norm of U^dag U - I.
  double unitarity_error() const;
};

struct Zone {
  double detuning_mhz;
  double duration_us;
};

class PulseSequence {
 public:
  explicit PulseSequence(std::vector<Zone> zones);

  const std::vector<Zone>& zones() const { return zones_; }
  double total_time_us() const { return total_time_us_; }

  /// Prefix of the sequence ending at `time_us`; the final zone is
  /// shortened so the prefix sums exactly to `time_us`.
  PulseSequence truncated(double time_us) const;

 private:
  std::vector<Zone> zones_;
  double total_time_us_;
};

/// N equal zones of duration T/N with detunings +E, -E, +E, ...
/// N must be even and >= 2.
PulseSequence qpm_sequence(double detuning_mhz, double total_time_us, int zones);

/// U(E, T) = exp(-i 2 pi H T), H = [[0, V], [V*, E]]. T = 0 gives identity.
TransferMatrix2 propagator(double detuning_mhz, Complex coupling_mhz,
                           double duration_us);

/// |U21|^2 = (4|V|^2 / Gamma^2) sin^2(pi Gamma T); 0 when Gamma = 0.
double transfer_probability(double detuning_mhz, Complex coupling_mhz,
                            double duration_us);

/// Time-ordered product of zone propagators (first zone rightmost).
TransferMatrix2 sequence_propagator(const PulseSequence& seq,
                                    Complex coupling_mhz);

/// Thrown by qpm_approx_transfer when the large-detuning expansion does not
/// apply; carries the computed validity expression.
class OutOfRegimeError : public std::runtime_error {
 public:
  OutOfRegimeError(const std::string& what, double validity)
      : std::runtime_error(what), validity_(validity) {}
  double validity() const { return validity_; }

 private:
  double validity_;
};

namespace detail {
/// Large-detuning N-zone transfer (4|V|^2/Gamma_N^2) sin^2(pi Gamma_N T),
/// Gamma_N = Gamma/N, without the even-N or validity checks. N = 1 is the
/// constant-detuning formula.
double qpm_envelope_transfer(double detuning_mhz, Complex coupling_mhz,
                             double total_time_us, int zones);
/// Validity expression 2^(N/2) (2|V|/Gamma_N)^2 sin^2(pi Gamma_N T).
double qpm_validity(double detuning_mhz, Complex coupling_mhz,
                    double total_time_us, int zones);
}  // namespace detail

/// Approximate N-zone QPM transfer probability. Requires an even N >= 2 and
/// validity < 0.1, otherwise throws OutOfRegimeError.
double qpm_approx_transfer(double detuning_mhz, Complex coupling_mhz,
                           double total_time_us, int zones);

enum class BoundaryFlag { None = 0, BeforeJump = 1, AfterJump = 2 };

struct BlochPoint {
  double time_us;
  double theta_b;    ///< polar angle, [0, pi]; sin^2(theta_b/2) = p_transfer
  double varphi_b;   ///< relative phase arg(C_ss') - arg(C_pp), unwrapped
  double p_transfer; ///< |C_ss'|^2
  int zone_index;
  BoundaryFlag boundary;
};

/// State trajectory from |pp> sampled every `dt_us` within each zone plus
/// the exact zone boundaries (a point just before and just after each jump).
/// varphi_b is unwrapped by nearest-branch continuity.
std::vector<BlochPoint> bloch_trajectory(const PulseSequence& seq,
                                         Complex coupling_mhz, double dt_us);

/// Zone-ledger model of the accumulated Rabi-phase spread across couplings.
///
/// Within a zone each coupling accrues phase at 2 pi Gamma_i; after a
/// detuning sign reversal the accrued spread unwinds at twice that rate with
/// alternating direction, so for an alternating-sign sequence the spread at
/// every zone boundary equals the spread at the end of zone 1. Returns
/// (boundary time, max - min accumulated phase) per zone boundary.
std::vector<std::pair<double, double>> dephasing_phase_spread(
    const PulseSequence& seq, const std::vector<Complex>& couplings_mhz);

}  // namespace rydqpm::twolevel

#include "rydqpm/twolevel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "rydqpm/pair_coupling.hpp"

namespace rydqpm::twolevel {

namespace {

constexpr double kPi = std::numbers::pi;

// sin(pi Gamma T) / Gamma with the Gamma -> 0 limit (pi T) handled by series.
double sin_over_gamma(double gamma, double t_us) {
  const double x = kPi * gamma * t_us;
  if (std::abs(x) < 1e-6) {
    return kPi * t_us * (1.0 - x * x / 6.0);
  }
  return std::sin(x) / gamma;
}

}  // namespace

double TransferMatrix2::unitarity_error() const {
  const Complex g11 = std::conj(u11) * u11 + std::conj(u21) * u21;
  const Complex g12 = std::conj(u11) * u12 + std::conj(u21) * u22;
  const Complex g21 = std::conj(u12) * u11 + std::conj(u22) * u21;
  const Complex g22 = std::conj(u12) * u12 + std::conj(u22) * u22;
  return std::max({std::abs(g11 - 1.0), std::abs(g12), std::abs(g21),
                   std::abs(g22 - 1.0)});
}

PulseSequence::PulseSequence(std::vector<Zone> zones) : zones_(std::move(zones)) {
  if (zones_.empty())
    throw std::invalid_argument("PulseSequence: needs at least one zone");
  total_time_us_ = 0.0;
  for (const Zone& z : zones_) {
    if (!(z.duration_us > 0.0) || !std::isfinite(z.duration_us))
      throw std::invalid_argument("PulseSequence: zone durations must be > 0");
    if (!std::isfinite(z.detuning_mhz))
      throw std::invalid_argument("PulseSequence: non-finite detuning");
    total_time_us_ += z.duration_us;
  }
}

PulseSequence PulseSequence::truncated(double time_us) const {
  if (!(time_us > 0.0) || time_us > total_time_us_ * (1.0 + 1e-12))
    throw std::invalid_argument("PulseSequence::truncated: time outside sequence");
  std::vector<Zone> cut;
  double remaining = time_us;
  for (const Zone& z : zones_) {
    if (remaining <= z.duration_us || &z == &zones_.back()) {
      cut.push_back({z.detuning_mhz, std::min(remaining, z.duration_us)});
      break;
    }
    cut.push_back(z);
    remaining -= z.duration_us;
  }
  return PulseSequence(std::move(cut));
}

PulseSequence qpm_sequence(double detuning_mhz, double total_time_us, int zones) {
  if (zones < 2 || zones % 2 != 0)
    throw std::invalid_argument(
        "qpm_sequence: zone count must be even and >= 2");
  if (!(total_time_us > 0.0))
    throw std::invalid_argument("qpm_sequence: total time must be > 0");
  std::vector<Zone> z(static_cast<std::size_t>(zones));
  const double tau = total_time_us / zones;
  for (int k = 0; k < zones; ++k)
    z[static_cast<std::size_t>(k)] = {k % 2 == 0 ? detuning_mhz : -detuning_mhz,
                                      tau};
  return PulseSequence(std::move(z));
}

TransferMatrix2 propagator(double detuning_mhz, Complex coupling_mhz,
                           double duration_us) {
  if (duration_us < 0.0 || !std::isfinite(duration_us))
    throw std::invalid_argument("propagator: duration must be >= 0");
  const double gamma = pair::generalized_rabi(detuning_mhz, coupling_mhz);
  const double half_phi = kPi * gamma * duration_us;
  const double c = std::cos(half_phi);
  const double snc = sin_over_gamma(gamma, duration_us);
  // Global phase from splitting off the traceless part of H.
  const Complex phase = std::polar(1.0, -kPi * detuning_mhz * duration_us);
  const Complex i_unit{0.0, 1.0};
  return {phase * (c + i_unit * detuning_mhz * snc),
          phase * (-i_unit * 2.0 * coupling_mhz * snc),
          phase * (-i_unit * 2.0 * std::conj(coupling_mhz) * snc),
          phase * (c - i_unit * detuning_mhz * snc)};
}

double transfer_probability(double detuning_mhz, Complex coupling_mhz,
                            double duration_us) {
  if (duration_us < 0.0 || !std::isfinite(duration_us))
    throw std::invalid_argument("transfer_probability: duration must be >= 0");
  const double gamma = pair::generalized_rabi(detuning_mhz, coupling_mhz);
  const double v = std::abs(coupling_mhz);
  if (gamma == 0.0) return 0.0;
  const double amp = 2.0 * v * sin_over_gamma(gamma, duration_us);
  return amp * amp;
}

TransferMatrix2 sequence_propagator(const PulseSequence& seq,
                                    Complex coupling_mhz) {
  TransferMatrix2 u = TransferMatrix2::identity();
  for (const Zone& z : seq.zones())
    u = propagator(z.detuning_mhz, coupling_mhz, z.duration_us) * u;
  return u;
}

namespace detail {

double qpm_envelope_transfer(double detuning_mhz, Complex coupling_mhz,
                             double total_time_us, int zones) {
  const double gamma_n =
      pair::generalized_rabi(detuning_mhz, coupling_mhz) / zones;
  const double v = std::abs(coupling_mhz);
  if (gamma_n == 0.0) return 0.0;
  const double amp = 2.0 * v * sin_over_gamma(gamma_n, total_time_us);
  return amp * amp;
}

double qpm_validity(double detuning_mhz, Complex coupling_mhz,
                    double total_time_us, int zones) {
  const double gamma_n =
      pair::generalized_rabi(detuning_mhz, coupling_mhz) / zones;
  const double v = std::abs(coupling_mhz);
  if (gamma_n == 0.0) return std::numeric_limits<double>::infinity();
  const double s = std::sin(kPi * gamma_n * total_time_us);
  const double ratio = 2.0 * v / gamma_n;
  return std::pow(2.0, 0.5 * zones) * ratio * ratio * s * s;
}

}  // namespace detail

double qpm_approx_transfer(double detuning_mhz, Complex coupling_mhz,
                           double total_time_us, int zones) {
  if (zones < 2 || zones % 2 != 0)
    throw std::invalid_argument(
        "qpm_approx_transfer: zone count must be even and >= 2");
  if (!(total_time_us >= 0.0))
    throw std::invalid_argument("qpm_approx_transfer: time must be >= 0");
  const double validity =
      detail::qpm_validity(detuning_mhz, coupling_mhz, total_time_us, zones);
  if (!(validity < 0.1))
    throw OutOfRegimeError(
        "qpm_approx_transfer: validity expression " + std::to_string(validity) +
            " >= 0.1; the large-detuning expansion does not apply",
        validity);
  return detail::qpm_envelope_transfer(detuning_mhz, coupling_mhz,
                                       total_time_us, zones);
}

namespace {

// Bloch angles of U * (1, 0)^T up to global phase; varphi is raw (-pi, pi].
BlochPoint bloch_point(const TransferMatrix2& u, double time_us, int zone_index,
                       BoundaryFlag flag) {
  const Complex c_pp = u.u11;
  const Complex c_ss = u.u21;
  const double p = std::norm(c_ss);
  const double theta = 2.0 * std::atan2(std::abs(c_ss), std::abs(c_pp));
  double varphi = 0.0;
  if (std::abs(c_ss) > 1e-14 && std::abs(c_pp) > 1e-14)
    varphi = std::arg(c_ss) - std::arg(c_pp);
  return {time_us, theta, varphi, p, zone_index, flag};
}

double unwrap_to(double raw, double previous) {
  const double two_pi = 2.0 * kPi;
  double k = std::round((previous - raw) / two_pi);
  return raw + k * two_pi;
}

}  // namespace

std::vector<BlochPoint> bloch_trajectory(const PulseSequence& seq,
                                         Complex coupling_mhz, double dt_us) {
  double min_zone = std::numeric_limits<double>::infinity();
  for (const Zone& z : seq.zones()) min_zone = std::min(min_zone, z.duration_us);
  if (!(dt_us > 0.0) || dt_us > min_zone)
    throw std::invalid_argument(
        "bloch_trajectory: dt must be > 0 and <= the shortest zone");

  std::vector<BlochPoint> out;
  TransferMatrix2 at_zone_start = TransferMatrix2::identity();
  double zone_start_time = 0.0;
  const int n_zones = static_cast<int>(seq.zones().size());

  out.push_back(bloch_point(at_zone_start, 0.0, 0, BoundaryFlag::AfterJump));

  for (int k = 0; k < n_zones; ++k) {
    const Zone& z = seq.zones()[static_cast<std::size_t>(k)];
    const int n_steps = static_cast<int>(std::floor(z.duration_us / dt_us));
    for (int s = 1; s <= n_steps; ++s) {
      const double local = s * dt_us;
      if (local >= z.duration_us - 1e-15) break;  // boundary handled below
      const TransferMatrix2 u =
          propagator(z.detuning_mhz, coupling_mhz, local) * at_zone_start;
      out.push_back(bloch_point(u, zone_start_time + local, k, BoundaryFlag::None));
    }
    const TransferMatrix2 at_end =
        propagator(z.detuning_mhz, coupling_mhz, z.duration_us) * at_zone_start;
    const double t_end = zone_start_time + z.duration_us;
    out.push_back(bloch_point(at_end, t_end, k, BoundaryFlag::BeforeJump));
    if (k + 1 < n_zones)
      out.push_back(bloch_point(at_end, t_end, k + 1, BoundaryFlag::AfterJump));
    at_zone_start = at_end;
    zone_start_time = t_end;
  }

  // Nearest-branch unwrapping; points with negligible transfer amplitude
  // inherit the previous phase (the raw value is meaningless there).
  for (std::size_t i = 1; i < out.size(); ++i) {
    if (out[i].p_transfer < 1e-20)
      out[i].varphi_b = out[i - 1].varphi_b;
    else
      out[i].varphi_b = unwrap_to(out[i].varphi_b, out[i - 1].varphi_b);
  }
  return out;
}

std::vector<std::pair<double, double>> dephasing_phase_spread(
    const PulseSequence& seq, const std::vector<Complex>& couplings_mhz) {
  if (couplings_mhz.size() < 2)
    throw std::invalid_argument(
        "dephasing_phase_spread: needs at least two couplings");

  // Effective elapsed-time ledger shared by all couplings: rate +1 in zone 1,
  // +-2 with alternating direction after each detuning sign reversal.
  std::vector<std::pair<double, double>> out;
  out.reserve(seq.zones().size());
  double ledger = 0.0;
  double rate = 1.0;
  double time = 0.0;
  double previous_detuning = seq.zones().front().detuning_mhz;
  bool first = true;
  for (const Zone& z : seq.zones()) {
    if (!first && z.detuning_mhz * previous_detuning < 0.0)
      rate = rate > 0.0 ? -2.0 : 2.0;
    first = false;
    previous_detuning = z.detuning_mhz;
    ledger += rate * z.duration_us;
    time += z.duration_us;

    double gamma_min = std::numeric_limits<double>::infinity();
    double gamma_max = 0.0;
    for (const Complex& v : couplings_mhz) {
      const double g = pair::generalized_rabi(z.detuning_mhz, v);
      gamma_min = std::min(gamma_min, g);
      gamma_max = std::max(gamma_max, g);
    }
    out.emplace_back(time, 2.0 * kPi * (gamma_max - gamma_min) * std::abs(ledger));
  }
  return out;
}

}  // namespace rydqpm::twolevel

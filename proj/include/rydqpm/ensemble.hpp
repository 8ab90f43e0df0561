#pragma once

// Monte Carlo ensembles of nearest-neighbour pairs: random frozen-gas
// sampling from the nearest-neighbour distribution, Gaussian ordered arrays,
// detuning lineshapes and time evolutions under the 2-atom model.
//
// Sampling is deterministic under (config, seed): sample i always draws from
// Rng(seed, i), and reductions use the fixed blocked tree in parallel.hpp,
// so results are bit-identical for any worker count.

#include <array>
#include <complex>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "rydqpm/pair_coupling.hpp"
#include "rydqpm/rng.hpp"
#include "rydqpm/twolevel.hpp"
#include "rydqpm/units.hpp"

namespace rydqpm::ensemble {

using ChannelWeights = std::array<double, 4>;
inline constexpr ChannelWeights kEqualWeights = {0.25, 0.25, 0.25, 0.25};

struct EnsembleConfig {
  units::Density rho;
  std::size_t n_samples = 1;
  std::uint64_t seed = 0;
  ChannelWeights channel_weights = kEqualWeights;

  void validate() const;
  std::uint64_t fingerprint() const;
};

struct OrderedConfig {
  double r_mean_um = 3.0;
  double r_sigma_um = 0.05;
  double theta = 0.0;
  std::size_t n_samples = 1;
  std::uint64_t seed = 0;
  ChannelWeights channel_weights = kEqualWeights;

  void validate() const;
  std::uint64_t fingerprint() const;
};

struct RecordMetadata {
  std::string model;  ///< "2-atom" | "4-atom" | "ordered"
  std::uint64_t seed = 0;
  std::uint64_t config_hash = 0;
  std::map<std::string, std::string> notes;
};

struct EvolutionRecord {
  std::vector<double> times_us;
  std::vector<double> p_population;  ///< pp fraction, p(0) = 1
  RecordMetadata meta;
};

/// Nearest-neighbour distance draw from G(R) = 4 pi rho R^2 exp(-4/3 pi rho R^3)
/// via the inverse CDF R = (-3 ln(1-u) / (4 pi rho))^(1/3).
double sample_nn_distance(const units::Density& rho, Rng& rng);

/// Isotropic orientation: cos(theta) uniform on [-1,1], phi uniform [0,2pi).
std::pair<double, double> sample_orientation(Rng& rng);

pair::Channel sample_channel(const ChannelWeights& weights, Rng& rng);

/// The pair drawn by substream `index` of a random-gas ensemble.
pair::AtomPair sample_pair(const EnsembleConfig& cfg, std::uint64_t index);

/// The pair drawn by substream `index` of an ordered array (Gaussian R at
/// fixed theta; non-positive draws are rejected and redrawn).
pair::AtomPair sample_pair(const OrderedConfig& cfg, std::uint64_t index);

/// Ensemble-mean transfer probability at interaction time T for each listed
/// detuning. All detunings share one sample set, so the E -> -E symmetry of
/// the single-pair transfer carries over exactly.
std::vector<std::pair<double, double>> lineshape(
    const EnsembleConfig& cfg, double interaction_time_us,
    const std::vector<double>& detunings_mhz, int n_workers = 0);

/// q-th percentile (0 < q < 100) of |V| over the sampled ensemble,
/// linearly interpolated.
double percentile_coupling(const EnsembleConfig& cfg, double q);

/// Mean pp population along one fixed pulse sequence, evaluated by
/// truncating the sequence at each requested time (partial final zone).
EvolutionRecord ensemble_evolution(const EnsembleConfig& cfg,
                                   const twolevel::PulseSequence& seq,
                                   const std::vector<double>& times_us,
                                   int n_workers = 0);

/// Mean pp population for delay-scan QPM data: each requested time T is the
/// endpoint of a fresh N-zone sequence with zone duration T/N, the way a
/// jump-sequence delay scan is actually acquired.
EvolutionRecord qpm_delay_scan(const EnsembleConfig& cfg, double detuning_mhz,
                               int zones, const std::vector<double>& times_us,
                               int n_workers = 0);

EvolutionRecord ordered_array_evolution(const OrderedConfig& cfg,
                                        const twolevel::PulseSequence& seq,
                                        const std::vector<double>& times_us,
                                        int n_workers = 0);

EvolutionRecord ordered_qpm_delay_scan(const OrderedConfig& cfg,
                                       double detuning_mhz, int zones,
                                       const std::vector<double>& times_us,
                                       int n_workers = 0);

/// Mean |V| over the sampled ordered ensemble (used to pick detunings in
/// units of the typical coupling).
double ordered_mean_coupling(const OrderedConfig& cfg);

// ---- record analysis -------------------------------------------------

class NotApplicableError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Time at which the oscillation envelope (peak-to-trough of consecutive
/// extrema, normalised to the first oscillation) falls below 1/e, found by
/// linear interpolation between extremum midpoints. Returns +infinity for
/// a record whose contrast never decays that far; throws NotApplicableError
/// when fewer than two extrema exist.
double dephasing_time(const EvolutionRecord& record);

/// Michelson contrast (max-min)/(max+min) of the transfer signal 1 - p,
/// using the global maximum and the minimum that follows it.
double modulation_contrast(const EvolutionRecord& record);

/// Largest peak-to-trough difference between consecutive extrema of p
/// occurring after `after_time_us` (0 when no extrema are found there).
double oscillation_amplitude_after(const EvolutionRecord& record,
                                   double after_time_us);

}  // namespace rydqpm::ensemble

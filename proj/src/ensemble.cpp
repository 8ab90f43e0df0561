#include "rydqpm/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "rydqpm/parallel.hpp"

namespace rydqpm::ensemble {

namespace {

constexpr double kPi = std::numbers::pi;

void validate_weights(const ChannelWeights& w) {
  double sum = 0.0;
  for (double x : w) {
    if (!(x >= 0.0) || !std::isfinite(x))
      throw std::invalid_argument("channel weights must be non-negative");
    sum += x;
  }
  if (std::abs(sum - 1.0) > 1e-12)
    throw std::invalid_argument("channel weights must sum to 1");
}

std::uint64_t mix64(std::uint64_t h, std::uint64_t v) {
  h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  return h;
}

std::uint64_t mix_double(std::uint64_t h, double v) {
  std::uint64_t bits;
  static_assert(sizeof(bits) == sizeof(v));
  std::memcpy(&bits, &v, sizeof(bits));
  return mix64(h, bits);
}

void check_times(const std::vector<double>& times_us, double total_us) {
  if (times_us.empty())
    throw std::invalid_argument("time grid must not be empty");
  double prev = -1.0;
  for (double t : times_us) {
    if (!(t >= 0.0) || t > total_us * (1.0 + 1e-12))
      throw std::invalid_argument("time " + std::to_string(t) +
                                  " outside [0, total_time]");
    if (t < prev)
      throw std::invalid_argument("time grid must be non-decreasing");
    prev = t;
  }
}

// pp population of one pair along a fixed sequence at each grid time,
// accumulated into acc. Walks zone boundaries once.
template <typename Sampler>
void evolution_kernel(const Sampler& sampler,
                      const twolevel::PulseSequence& seq,
                      const std::vector<double>& times_us, std::uint64_t i,
                      double* acc) {
  const std::complex<double> v = pair::channel_coupling(sampler(i));
  std::size_t zone = 0;
  double zone_start = 0.0;
  twolevel::TransferMatrix2 boundary = twolevel::TransferMatrix2::identity();
  const auto& zones = seq.zones();
  for (std::size_t j = 0; j < times_us.size(); ++j) {
    const double t = times_us[j];
    while (zone + 1 < zones.size() &&
           t > zone_start + zones[zone].duration_us + 1e-15) {
      boundary = twolevel::propagator(zones[zone].detuning_mhz, v,
                                      zones[zone].duration_us) *
                 boundary;
      zone_start += zones[zone].duration_us;
      ++zone;
    }
    const twolevel::TransferMatrix2 u =
        twolevel::propagator(zones[zone].detuning_mhz, v, t - zone_start) *
        boundary;
    acc[j] += std::norm(u.u11);
  }
}

// pp population of one pair for delay-scan QPM data: a fresh N-zone sequence
// per requested time.
template <typename Sampler>
void delay_scan_kernel(const Sampler& sampler, double detuning_mhz, int zones,
                       const std::vector<double>& times_us, std::uint64_t i,
                       double* acc) {
  const std::complex<double> v = pair::channel_coupling(sampler(i));
  for (std::size_t j = 0; j < times_us.size(); ++j) {
    const double t = times_us[j];
    if (t <= 0.0) {
      acc[j] += 1.0;
      continue;
    }
    const double tau = t / zones;
    twolevel::TransferMatrix2 u = twolevel::TransferMatrix2::identity();
    for (int k = 0; k < zones; ++k) {
      const double e = k % 2 == 0 ? detuning_mhz : -detuning_mhz;
      u = twolevel::propagator(e, v, tau) * u;
    }
    acc[j] += std::norm(u.u11);
  }
}

template <typename Config>
EvolutionRecord make_record(const Config& cfg, const std::string& model,
                            std::vector<double> times,
                            std::vector<double> p_pop) {
  EvolutionRecord rec;
  rec.times_us = std::move(times);
  rec.p_population = std::move(p_pop);
  rec.meta.model = model;
  rec.meta.seed = cfg.seed;
  rec.meta.config_hash = cfg.fingerprint();
  return rec;
}

}  // namespace

void EnsembleConfig::validate() const {
  if (n_samples < 1)
    throw std::invalid_argument("EnsembleConfig: n_samples must be >= 1");
  validate_weights(channel_weights);
}

std::uint64_t EnsembleConfig::fingerprint() const {
  std::uint64_t h = 0x2a8f1d3be7c90641ULL;
  h = mix_double(h, rho.per_cm3());
  h = mix64(h, n_samples);
  h = mix64(h, seed);
  for (double w : channel_weights) h = mix_double(h, w);
  return h;
}

void OrderedConfig::validate() const {
  if (!(r_mean_um > 0.0))
    throw std::invalid_argument("OrderedConfig: r_mean must be > 0");
  if (!(r_sigma_um >= 0.0))
    throw std::invalid_argument("OrderedConfig: r_sigma must be >= 0");
  if (n_samples < 1)
    throw std::invalid_argument("OrderedConfig: n_samples must be >= 1");
  validate_weights(channel_weights);
}

std::uint64_t OrderedConfig::fingerprint() const {
  std::uint64_t h = 0x5ce4a90fd13b2687ULL;
  h = mix_double(h, r_mean_um);
  h = mix_double(h, r_sigma_um);
  h = mix_double(h, theta);
  h = mix64(h, n_samples);
  h = mix64(h, seed);
  for (double w : channel_weights) h = mix_double(h, w);
  return h;
}

double sample_nn_distance(const units::Density& rho, Rng& rng) {
  const double u = rng.uniform01_open_low();  // (0, 1], safe in the log
  return std::cbrt(-3.0 * std::log(u) / (4.0 * kPi * rho.per_um3()));
}

std::pair<double, double> sample_orientation(Rng& rng) {
  const double cos_theta = rng.uniform(-1.0, 1.0);
  const double phi = rng.uniform(0.0, 2.0 * kPi);
  return {std::acos(std::clamp(cos_theta, -1.0, 1.0)), phi};
}

pair::Channel sample_channel(const ChannelWeights& weights, Rng& rng) {
  const double u = rng.uniform01();
  double cumulative = 0.0;
  for (std::size_t c = 0; c < weights.size(); ++c) {
    cumulative += weights[c];
    if (u < cumulative) return pair::kAllChannels[c];
  }
  return pair::kAllChannels.back();
}

pair::AtomPair sample_pair(const EnsembleConfig& cfg, std::uint64_t index) {
  Rng rng(cfg.seed, index);
  const double r = sample_nn_distance(cfg.rho, rng);
  const auto [theta, phi] = sample_orientation(rng);
  return {r, theta, phi, sample_channel(cfg.channel_weights, rng)};
}

pair::AtomPair sample_pair(const OrderedConfig& cfg, std::uint64_t index) {
  Rng rng(cfg.seed, index);
  double r = cfg.r_mean_um + cfg.r_sigma_um * rng.gaussian();
  while (!(r > 0.0)) r = cfg.r_mean_um + cfg.r_sigma_um * rng.gaussian();
  const double phi = rng.uniform(0.0, 2.0 * kPi);
  return {r, cfg.theta, phi, sample_channel(cfg.channel_weights, rng)};
}

std::vector<std::pair<double, double>> lineshape(
    const EnsembleConfig& cfg, double interaction_time_us,
    const std::vector<double>& detunings_mhz, int n_workers) {
  cfg.validate();
  if (!(interaction_time_us > 0.0))
    throw std::invalid_argument("lineshape: interaction time must be > 0");

  const std::vector<double> means = blocked_mean(
      cfg.n_samples, detunings_mhz.size(),
      [&](std::size_t i, double* acc) {
        const std::complex<double> v = pair::channel_coupling(sample_pair(cfg, i));
        for (std::size_t j = 0; j < detunings_mhz.size(); ++j)
          acc[j] += twolevel::transfer_probability(detunings_mhz[j], v,
                                                   interaction_time_us);
      },
      n_workers);

  std::vector<std::pair<double, double>> out(detunings_mhz.size());
  for (std::size_t j = 0; j < detunings_mhz.size(); ++j)
    out[j] = {detunings_mhz[j], means[j]};
  return out;
}

double percentile_coupling(const EnsembleConfig& cfg, double q) {
  cfg.validate();
  if (!(q > 0.0 && q < 100.0))
    throw std::invalid_argument("percentile_coupling: q must be in (0, 100)");
  std::vector<double> magnitudes(cfg.n_samples);
  for (std::size_t i = 0; i < cfg.n_samples; ++i)
    magnitudes[i] = std::abs(pair::channel_coupling(sample_pair(cfg, i)));
  std::sort(magnitudes.begin(), magnitudes.end());
  const double h = (q / 100.0) * static_cast<double>(magnitudes.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, magnitudes.size() - 1);
  return magnitudes[lo] + (h - static_cast<double>(lo)) *
                              (magnitudes[hi] - magnitudes[lo]);
}

EvolutionRecord ensemble_evolution(const EnsembleConfig& cfg,
                                   const twolevel::PulseSequence& seq,
                                   const std::vector<double>& times_us,
                                   int n_workers) {
  cfg.validate();
  check_times(times_us, seq.total_time_us());
  auto sampler = [&](std::uint64_t i) { return sample_pair(cfg, i); };
  std::vector<double> p = blocked_mean(
      cfg.n_samples, times_us.size(),
      [&](std::size_t i, double* acc) {
        evolution_kernel(sampler, seq, times_us, i, acc);
      },
      n_workers);
  return make_record(cfg, "2-atom", times_us, std::move(p));
}

EvolutionRecord qpm_delay_scan(const EnsembleConfig& cfg, double detuning_mhz,
                               int zones, const std::vector<double>& times_us,
                               int n_workers) {
  cfg.validate();
  if (zones < 2 || zones % 2 != 0)
    throw std::invalid_argument("qpm_delay_scan: zone count must be even >= 2");
  check_times(times_us, std::numeric_limits<double>::infinity());
  auto sampler = [&](std::uint64_t i) { return sample_pair(cfg, i); };
  std::vector<double> p = blocked_mean(
      cfg.n_samples, times_us.size(),
      [&](std::size_t i, double* acc) {
        delay_scan_kernel(sampler, detuning_mhz, zones, times_us, i, acc);
      },
      n_workers);
  EvolutionRecord rec = make_record(cfg, "2-atom", times_us, std::move(p));
  rec.meta.notes["scan"] = "qpm-delay";
  return rec;
}

EvolutionRecord ordered_array_evolution(const OrderedConfig& cfg,
                                        const twolevel::PulseSequence& seq,
                                        const std::vector<double>& times_us,
                                        int n_workers) {
  cfg.validate();
  check_times(times_us, seq.total_time_us());
  auto sampler = [&](std::uint64_t i) { return sample_pair(cfg, i); };
  std::vector<double> p = blocked_mean(
      cfg.n_samples, times_us.size(),
      [&](std::size_t i, double* acc) {
        evolution_kernel(sampler, seq, times_us, i, acc);
      },
      n_workers);
  return make_record(cfg, "ordered", times_us, std::move(p));
}

EvolutionRecord ordered_qpm_delay_scan(const OrderedConfig& cfg,
                                       double detuning_mhz, int zones,
                                       const std::vector<double>& times_us,
                                       int n_workers) {
  cfg.validate();
  if (zones < 2 || zones % 2 != 0)
    throw std::invalid_argument(
        "ordered_qpm_delay_scan: zone count must be even >= 2");
  check_times(times_us, std::numeric_limits<double>::infinity());
  auto sampler = [&](std::uint64_t i) { return sample_pair(cfg, i); };
  std::vector<double> p = blocked_mean(
      cfg.n_samples, times_us.size(),
      [&](std::size_t i, double* acc) {
        delay_scan_kernel(sampler, detuning_mhz, zones, times_us, i, acc);
      },
      n_workers);
  EvolutionRecord rec = make_record(cfg, "ordered", times_us, std::move(p));
  rec.meta.notes["scan"] = "qpm-delay";
  return rec;
}

double ordered_mean_coupling(const OrderedConfig& cfg) {
  cfg.validate();
  double sum = 0.0;
  for (std::size_t i = 0; i < cfg.n_samples; ++i)
    sum += std::abs(pair::channel_coupling(sample_pair(cfg, i)));
  return sum / static_cast<double>(cfg.n_samples);
}

namespace {

struct Extremum {
  std::size_t index;
  double value;
};

std::vector<Extremum> find_extrema(const EvolutionRecord& record) {
  std::vector<Extremum> out;
  const auto& p = record.p_population;
  for (std::size_t i = 1; i + 1 < p.size(); ++i) {
    const double dl = p[i] - p[i - 1];
    const double dr = p[i + 1] - p[i];
    if ((dl > 0.0 && dr < 0.0) || (dl < 0.0 && dr > 0.0))
      out.push_back({i, p[i]});
  }
  return out;
}

}  // namespace

double dephasing_time(const EvolutionRecord& record) {
  const std::vector<Extremum> ext = find_extrema(record);
  if (ext.size() < 2)
    throw NotApplicableError(
        "dephasing_time: record shows fewer than two oscillation extrema");

  std::vector<double> amplitude(ext.size() - 1);
  std::vector<double> mid_time(ext.size() - 1);
  for (std::size_t j = 0; j + 1 < ext.size(); ++j) {
    amplitude[j] = std::abs(ext[j + 1].value - ext[j].value);
    mid_time[j] = 0.5 * (record.times_us[ext[j].index] +
                         record.times_us[ext[j + 1].index]);
  }
  const double reference = amplitude.front();
  if (reference <= 0.0)
    throw NotApplicableError("dephasing_time: first oscillation has no contrast");

  const double threshold = reference / std::numbers::e;
  for (std::size_t j = 1; j < amplitude.size(); ++j) {
    if (amplitude[j] < threshold) {
      const double a0 = amplitude[j - 1];
      const double a1 = amplitude[j];
      const double w = a0 > a1 ? (a0 - threshold) / (a0 - a1) : 1.0;
      return mid_time[j - 1] + w * (mid_time[j] - mid_time[j - 1]);
    }
  }
  return std::numeric_limits<double>::infinity();
}

double modulation_contrast(const EvolutionRecord& record) {
  const auto& p = record.p_population;
  std::size_t peak = 0;
  double max_transfer = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (1.0 - p[i] > max_transfer) {
      max_transfer = 1.0 - p[i];
      peak = i;
    }
  }
  if (max_transfer <= 0.0) return 0.0;
  double min_after = max_transfer;
  for (std::size_t i = peak; i < p.size(); ++i)
    min_after = std::min(min_after, 1.0 - p[i]);
  return (max_transfer - min_after) / (max_transfer + min_after);
}

double oscillation_amplitude_after(const EvolutionRecord& record,
                                   double after_time_us) {
  const std::vector<Extremum> ext = find_extrema(record);
  double amplitude = 0.0;
  for (std::size_t j = 0; j + 1 < ext.size(); ++j) {
    if (record.times_us[ext[j].index] < after_time_us) continue;
    amplitude = std::max(amplitude, std::abs(ext[j + 1].value - ext[j].value));
  }
  return amplitude;
}

}  // namespace rydqpm::ensemble

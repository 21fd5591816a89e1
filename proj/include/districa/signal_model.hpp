#ifndef DISTRICA_SIGNAL_MODEL_HPP
#define DISTRICA_SIGNAL_MODEL_HPP

#include <cstdint>
#include <vector>

#include "districa/types.hpp"

namespace districa {

struct SourceSpec {
  enum class Kind { Sinusoid, Square, MixedNoise };

  Kind kind = Kind::Sinusoid;
  double frequency = 0.0;  // cycles/sample
  double phase = 0.0;      // radians
  double alpha = 0.0;      // uniform weight of MixedNoise
  double gain = 1.0;       // output multiplier

  static SourceSpec sinusoid(double frequency, double phase = 0.0);
  static SourceSpec square(double frequency, double phase = 0.0);
  static SourceSpec mixed_noise(double alpha);

  void validate() const;
};

/// Gain that brings a source to unit variance (analytic: 1/2 for a sinusoid,
/// 1 for a square wave, α²/12 + (1-α)² for mixed noise).
double unit_variance_gain(const SourceSpec& spec);

inline SourceSpec standardized(SourceSpec spec) {
  spec.gain = unit_variance_gain(spec);
  return spec;
}

struct MixingModel {
  MatrixXd mixing;                  // A, M×M
  std::vector<SourceSpec> sources;  // length M
  VectorXd normalization;           // per-sensor scale; empty until calibrated

  Index dim() const { return mixing.rows(); }
  bool calibrated() const { return normalization.size() == mixing.rows(); }
  void validate() const;
};

struct DriftSchedule {
  MatrixXd delta;
  std::vector<double> profile;  // p(i)
};

/// Samples t0 .. t0+N-1 of every source as an N×M batch. Noise sources draw
/// from a stream keyed on (seed, source index, t0).
Batch generate_sources(const std::vector<SourceSpec>& specs, Index samples, std::int64_t t0,
                       std::uint64_t seed);

/// A with i.i.d. N(0,1) entries.
MatrixXd random_mixing(Index m, std::uint64_t seed);

/// Sets the per-sensor scale so that A·s has unit sample variance on `sources`.
MixingModel calibrated(MixingModel model, const Batch& sources);

/// y(t) = diag(normalization)·A·s(t). Requires a calibrated model.
Batch mix(const MixingModel& model, const Batch& sources);

/// Calibrates `model` on first use, then mixes.
Batch mix_and_normalize(MixingModel& model, const Batch& sources);

/// Δ with i.i.d. N(0,1) entries rescaled to ‖Δ‖_F = ratio·‖A‖_F.
DriftSchedule make_drift_schedule(const MatrixXd& mixing, std::vector<double> profile, double ratio,
                                  std::uint64_t seed);

/// Zero for the first third, linear ramp 0→1 over the middle third, then 1.
std::vector<double> default_drift_profile(Index length);

/// Model with A replaced by A + Δ·p(i); normalization is kept.
MixingModel drift_mixing(const MixingModel& model, const DriftSchedule& schedule, Index i);

}  // namespace districa

#endif  // DISTRICA_SIGNAL_MODEL_HPP

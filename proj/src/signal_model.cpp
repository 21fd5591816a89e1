#include "districa/signal_model.hpp"

#include <cmath>
#include <numbers>
#include <random>

namespace districa {

namespace {

std::mt19937_64 keyed_stream(std::uint64_t seed, std::uint64_t stream, std::int64_t t0) {
  const auto t = static_cast<std::uint64_t>(t0);
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(t),
                    static_cast<std::uint32_t>(t >> 32)};
  return std::mt19937_64(seq);
}

}  // namespace

SourceSpec SourceSpec::sinusoid(double frequency, double phase) {
  SourceSpec s{Kind::Sinusoid, frequency, phase, 0.0, 1.0};
  s.validate();
  return s;
}

SourceSpec SourceSpec::square(double frequency, double phase) {
  SourceSpec s{Kind::Square, frequency, phase, 0.0, 1.0};
  s.validate();
  return s;
}

SourceSpec SourceSpec::mixed_noise(double alpha) {
  SourceSpec s{Kind::MixedNoise, 0.0, 0.0, alpha, 1.0};
  s.validate();
  return s;
}

void SourceSpec::validate() const {
  if (kind == Kind::MixedNoise) {
    require(alpha >= 0.0 && alpha <= 1.0, ErrorKind::InvalidInput, "mixed-noise alpha must lie in [0, 1]");
  } else {
    require(frequency > 0.0 && frequency < 0.5, ErrorKind::InvalidInput,
            "periodic source frequency must lie in (0, 0.5)");
  }
  require(std::isfinite(gain), ErrorKind::InvalidInput, "source gain must be finite");
}

double unit_variance_gain(const SourceSpec& spec) {
  switch (spec.kind) {
    case SourceSpec::Kind::Sinusoid: return std::numbers::sqrt2;
    case SourceSpec::Kind::Square: return 1.0;
    case SourceSpec::Kind::MixedNoise: {
      const double a = spec.alpha;
      return 1.0 / std::sqrt(a * a / 12.0 + (1.0 - a) * (1.0 - a));
    }
  }
  return 1.0;
}

void MixingModel::validate() const {
  require(mixing.rows() == mixing.cols() && mixing.rows() >= 1, ErrorKind::InvalidInput,
          "mixing matrix must be square");
  require(mixing.allFinite(), ErrorKind::InvalidInput, "mixing matrix has non-finite entries");
  require(static_cast<Index>(sources.size()) == mixing.rows(), ErrorKind::InvalidInput,
          "one source spec per mixing column required");
}

Batch generate_sources(const std::vector<SourceSpec>& specs, Index samples, std::int64_t t0,
                       std::uint64_t seed) {
  require(samples >= 1, ErrorKind::InvalidInput, "need at least one sample");
  require(!specs.empty(), ErrorKind::InvalidInput, "need at least one source");
  const Index m = static_cast<Index>(specs.size());
  MatrixXd s(samples, m);
  constexpr double two_pi = 2.0 * std::numbers::pi;
  for (Index j = 0; j < m; ++j) {
    const SourceSpec& spec = specs[static_cast<std::size_t>(j)];
    spec.validate();
    switch (spec.kind) {
      case SourceSpec::Kind::Sinusoid:
        for (Index t = 0; t < samples; ++t) {
          const double time = static_cast<double>(t0 + t);
          s(t, j) = std::sin(two_pi * spec.frequency * time + spec.phase);
        }
        break;
      case SourceSpec::Kind::Square:
        for (Index t = 0; t < samples; ++t) {
          const double time = static_cast<double>(t0 + t);
          const double v = std::sin(two_pi * spec.frequency * time + spec.phase);
          s(t, j) = static_cast<double>((v > 0.0) - (v < 0.0));
        }
        break;
      case SourceSpec::Kind::MixedNoise: {
        auto rng = keyed_stream(seed, static_cast<std::uint64_t>(j), t0);
        std::uniform_real_distribution<double> uniform(-0.5, 0.5);
        std::normal_distribution<double> normal(0.0, 1.0);
        for (Index t = 0; t < samples; ++t) {
          const double u = uniform(rng);
          const double n = normal(rng);
          s(t, j) = spec.alpha * u + (1.0 - spec.alpha) * n;
        }
        break;
      }
    }
    if (spec.gain != 1.0) s.col(j) *= spec.gain;
  }
  return Batch(std::move(s));
}

MatrixXd random_mixing(Index m, std::uint64_t seed) {
  auto rng = keyed_stream(seed, 0xA, 0);
  std::normal_distribution<double> normal(0.0, 1.0);
  MatrixXd a(m, m);
  for (Index j = 0; j < m; ++j)
    for (Index i = 0; i < m; ++i) a(i, j) = normal(rng);
  return a;
}

MixingModel calibrated(MixingModel model, const Batch& sources) {
  model.validate();
  require(sources.channels() == model.dim(), ErrorKind::InvalidInput, "source count does not match A");
  require(sources.samples() >= 2, ErrorKind::InvalidInput, "calibration needs at least 2 samples");
  const MatrixXd raw = sources.data * model.mixing.transpose();
  const MatrixXd c = raw.rowwise() - raw.colwise().mean();
  const VectorXd var = c.colwise().squaredNorm().transpose() / static_cast<double>(raw.rows());
  require((var.array() > 0.0).all(), ErrorKind::InvalidInput, "sensor with zero variance in calibration batch");
  model.normalization = var.cwiseSqrt().cwiseInverse();
  return model;
}

Batch mix(const MixingModel& model, const Batch& sources) {
  model.validate();
  require(model.calibrated(), ErrorKind::InvalidInput, "mixing model has no normalization");
  require(sources.channels() == model.dim(), ErrorKind::InvalidInput, "source count does not match A");
  MatrixXd y = sources.data * model.mixing.transpose();
  y *= model.normalization.asDiagonal();
  return Batch(std::move(y));
}

Batch mix_and_normalize(MixingModel& model, const Batch& sources) {
  if (!model.calibrated()) model = calibrated(std::move(model), sources);
  return mix(model, sources);
}

DriftSchedule make_drift_schedule(const MatrixXd& mixing, std::vector<double> profile, double ratio,
                                  std::uint64_t seed) {
  require(ratio >= 0.0, ErrorKind::InvalidInput, "drift ratio must be non-negative");
  auto rng = keyed_stream(seed, 0xD, 0);
  std::normal_distribution<double> normal(0.0, 1.0);
  MatrixXd delta(mixing.rows(), mixing.cols());
  for (Index j = 0; j < delta.cols(); ++j)
    for (Index i = 0; i < delta.rows(); ++i) delta(i, j) = normal(rng);
  delta *= ratio * mixing.norm() / delta.norm();
  return {std::move(delta), std::move(profile)};
}

std::vector<double> default_drift_profile(Index length) {
  std::vector<double> p(static_cast<std::size_t>(std::max<Index>(length, 0)), 0.0);
  const Index third = length / 3;
  const Index ramp_end = 2 * third;
  for (Index i = 0; i < length; ++i) {
    double v = 0.0;
    if (i >= ramp_end) {
      v = 1.0;
    } else if (i >= third && third > 0) {
      v = static_cast<double>(i - third + 1) / static_cast<double>(third);
    }
    p[static_cast<std::size_t>(i)] = v;
  }
  return p;
}

MixingModel drift_mixing(const MixingModel& model, const DriftSchedule& schedule, Index i) {
  require(i >= 0 && i < static_cast<Index>(schedule.profile.size()), ErrorKind::InvalidInput,
          "drift index outside schedule");
  require(schedule.delta.rows() == model.mixing.rows() && schedule.delta.cols() == model.mixing.cols(),
          ErrorKind::InvalidInput, "drift matrix shape mismatch");
  MixingModel out = model;
  out.mixing += schedule.delta * schedule.profile[static_cast<std::size_t>(i)];
  return out;
}

}  // namespace districa

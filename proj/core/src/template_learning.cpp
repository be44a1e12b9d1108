#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/Dense>
#include <fmt/format.h>

#include "gencs/beat_model.hpp"
#include "gencs/error.hpp"

namespace gencs {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kMinWidth = 1e-4;  // rad

double wrap_phase(double phi) {
  phi = std::fmod(phi + kPi, kTwoPi);
  if (phi < 0.0) phi += kTwoPi;
  return phi - kPi;
}

// Parameter vector layout: [a0 c0 w0 a1 c1 w1 ...].
Eigen::VectorXd model(const Eigen::VectorXd& theta, const std::vector<double>& phase) {
  const auto waves = theta.size() / 3;
  Eigen::VectorXd out = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(phase.size()));
  for (Eigen::Index k = 0; k < waves; ++k) {
    const double a = theta(3 * k), c = theta(3 * k + 1), w = theta(3 * k + 2);
    for (std::size_t j = 0; j < phase.size(); ++j) {
      const double d = wrap_phase(phase[j] - c);
      out(static_cast<Eigen::Index>(j)) += a * std::exp(-0.5 * d * d / (w * w));
    }
  }
  return out;
}

Eigen::MatrixXd jacobian(const Eigen::VectorXd& theta, const std::vector<double>& phase) {
  const auto waves = theta.size() / 3;
  Eigen::MatrixXd jac(static_cast<Eigen::Index>(phase.size()), theta.size());
  for (Eigen::Index k = 0; k < waves; ++k) {
    const double a = theta(3 * k), c = theta(3 * k + 1), w = theta(3 * k + 2);
    for (std::size_t j = 0; j < phase.size(); ++j) {
      const auto row = static_cast<Eigen::Index>(j);
      const double d = wrap_phase(phase[j] - c);
      const double g = std::exp(-0.5 * d * d / (w * w));
      jac(row, 3 * k) = g;
      jac(row, 3 * k + 1) = a * g * d / (w * w);
      jac(row, 3 * k + 2) = a * g * d * d / (w * w * w);
    }
  }
  return jac;
}

bool widths_valid(const Eigen::VectorXd& theta) {
  for (Eigen::Index k = 0; k < theta.size() / 3; ++k) {
    if (!(theta(3 * k + 2) > kMinWidth)) return false;
  }
  return theta.allFinite();
}

}  // namespace

AveragedBeat average_beats(const SampledSignal& snippet, const GroundTruth& peaks) {
  if (snippet.fs() != kCanonicalFs) {
    throw RateError(fmt::format("learn_template: snippet at {} Hz; resample to {} Hz first",
                                snippet.fs(), kCanonicalFs));
  }
  if (peaks.fs() != snippet.fs()) throw ValidationError("learn_template: peak rate differs from snippet");
  const double fs = snippet.fs();
  const auto spans = beat_layout(peaks, 1.0);
  const auto x = snippet.samples();
  const auto last = static_cast<double>(snippet.size() - 1);

  // A beat is complete when its RR comes from a real interval and its whole
  // [-rr/2, rr/2) window lies inside the snippet.
  std::vector<BeatSpan> complete;
  for (const auto& s : spans) {
    if (peaks.size() < 2) break;
    const double peak = static_cast<double>(s.peak);
    const double half = s.rr * fs / 2.0;
    if (peak - half >= 0.0 && peak + half <= last) complete.push_back(s);
  }
  AveragedBeat avg;
  avg.beats = complete.size();
  if (complete.empty()) return avg;

  double rr_sum = 0.0;
  for (const auto& s : complete) rr_sum += s.rr;
  avg.mean_rr = rr_sum / static_cast<double>(complete.size());

  const auto length = static_cast<std::size_t>(std::llround(avg.mean_rr * fs));
  const auto origin = static_cast<double>(std::llround(avg.mean_rr * fs / 2.0));
  avg.phase.resize(length);
  avg.value.assign(length, 0.0);
  for (std::size_t j = 0; j < length; ++j) {
    avg.phase[j] = kTwoPi * (static_cast<double>(j) - origin) / (avg.mean_rr * fs);
  }
  for (const auto& s : complete) {
    for (std::size_t j = 0; j < length; ++j) {
      const double pos =
          static_cast<double>(s.peak) + avg.phase[j] / kTwoPi * s.rr * fs;
      const double clamped = std::clamp(pos, 0.0, last);
      const auto i0 = static_cast<std::size_t>(std::floor(clamped));
      const double frac = clamped - static_cast<double>(i0);
      const double v = i0 + 1 < snippet.size() ? x[i0] + frac * (x[i0 + 1] - x[i0]) : x[i0];
      avg.value[j] += v;
    }
  }
  for (auto& v : avg.value) v /= static_cast<double>(complete.size());
  return avg;
}

BeatTemplate learn_template(const SampledSignal& snippet, const GroundTruth& peaks,
                            const LearnOptions& options) {
  const auto avg = average_beats(snippet, peaks);
  if (avg.beats < options.min_beats) {
    throw ValidationError(fmt::format("learn_template: insufficient data, {} complete beats (need {})",
                                      avg.beats, options.min_beats));
  }

  // Initial guess: the default morphology moved to the snippet's heart rate.
  // QRS phases scale with 1/rr, P/T phases are rate independent.
  const auto init = default_template();
  const double qrs_scale = init.reference_rr / avg.mean_rr;
  const auto waves = static_cast<Eigen::Index>(init.waves.size());
  Eigen::VectorXd theta(3 * waves);
  for (Eigen::Index k = 0; k < waves; ++k) {
    const auto& w = init.waves[static_cast<std::size_t>(k)];
    const double s = init.is_qrs(static_cast<std::size_t>(k)) ? qrs_scale : 1.0;
    theta(3 * k) = w.amplitude;
    theta(3 * k + 1) = w.center * s;
    theta(3 * k + 2) = w.width * s;
  }

  const Eigen::Map<const Eigen::VectorXd> target(avg.value.data(),
                                                 static_cast<Eigen::Index>(avg.value.size()));

  // Amplitudes enter linearly: start from their least-squares values.
  {
    Eigen::MatrixXd basis(target.size(), waves);
    const auto jac = jacobian(theta, avg.phase);
    for (Eigen::Index k = 0; k < waves; ++k) basis.col(k) = jac.col(3 * k);
    const Eigen::VectorXd amps = basis.colPivHouseholderQr().solve(target);
    for (Eigen::Index k = 0; k < waves; ++k) theta(3 * k) = amps(k);
  }

  auto cost_of = [&](const Eigen::VectorXd& th) { return (target - model(th, avg.phase)).squaredNorm(); };
  double cost = cost_of(theta);
  bool converged = false;
  int iteration = 0;
  for (; iteration < options.max_iterations; ++iteration) {
    const Eigen::VectorXd residual = target - model(theta, avg.phase);
    const Eigen::MatrixXd jac = jacobian(theta, avg.phase);
    Eigen::MatrixXd normal = jac.transpose() * jac;
    // Tiny ridge keeps the normal equations solvable when a wave collapses.
    normal.diagonal().array() += 1e-12 * (1.0 + normal.diagonal().maxCoeff());
    const Eigen::VectorXd step = normal.ldlt().solve(jac.transpose() * residual);
    if (!step.allFinite()) break;

    double alpha = 1.0;
    bool accepted = false;
    Eigen::VectorXd candidate;
    double candidate_cost = cost;
    for (int halving = 0; halving < 40; ++halving, alpha *= 0.5) {
      candidate = theta + alpha * step;
      if (!widths_valid(candidate)) continue;
      candidate_cost = cost_of(candidate);
      if (candidate_cost <= cost) {
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      // No descent along the Gauss-Newton direction: a stationary point.
      converged = true;
      break;
    }
    const double step_size = (alpha * step).norm();
    const double improvement = cost - candidate_cost;
    theta = candidate;
    cost = candidate_cost;
    if (step_size <= options.step_tolerance * (1.0 + theta.norm()) ||
        improvement <= 1e-15 * (1.0 + cost)) {
      converged = true;
      break;
    }
  }

  BeatTemplate out;
  out.reference_rr = avg.mean_rr;
  out.fit_residual = std::sqrt(cost / static_cast<double>(target.size()));
  out.converged = converged;
  for (Eigen::Index k = 0; k < waves; ++k) {
    out.waves.push_back({theta(3 * k), wrap_phase(theta(3 * k + 1)), theta(3 * k + 2)});
  }
  std::sort(out.waves.begin(), out.waves.end(),
            [](const GaussianWave& a, const GaussianWave& b) { return a.center < b.center; });
  out.validate();
  return out;
}

}  // namespace gencs

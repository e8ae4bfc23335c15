#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "nanosqueeze/model.hpp"
#include "nanosqueeze/spectra.hpp"

namespace nanosqueeze {

struct TrajectoryConfig {
  double dt = 0.0;          // s
  double duration = 0.0;    // s, total over all streams after burn-in
  int n_segments = 256;     // Welch segments, split evenly over streams
  std::uint64_t seed = 1;
  double burn_in = 0.0;     // s, per stream
  int n_streams = 16;       // independent noise streams

  int segments_per_stream() const { return n_segments / n_streams; }
  /// Samples per Welch segment implied by duration and overlap.
  long segment_points() const;
};

/// dt = 0.02 / r with r = max(mu, gamma + 4|chi|, 2 g); segment length giving
/// eight bins across the slowest relaxation rate; burn-in 50 relaxation times.
TrajectoryConfig default_trajectory_config(const DriftModel& model);

/// Throws std::invalid_argument when the step or duration invariants fail.
void validate(const TrajectoryConfig& cfg, const DriftModel& model);

/// Real quadrature form of the model: x = [x_a, p_a, x_b, p_b].
struct QuadratureModel {
  Eigen::Matrix4d drift;
  Eigen::MatrixXd coupling;     // 4 x input_dim
  Eigen::MatrixXd noise_chol;   // Cholesky factor of the symmetric input covariance
  double sqrt_mu_ext = 0.0;
};
QuadratureModel quadrature_model(const DriftModel& model);

/// Output quadratures X'_c(theta) and Y'_c(theta) sampled every dt; one
/// vector per stream.
struct OutputSeries {
  double dt = 0.0;
  double theta = 0.0;
  DriveMode mode = DriveMode::red();
  EffectiveParams params;
  std::vector<std::vector<double>> x_out;
  std::vector<std::vector<double>> y_out;
};

/// Euler-Maruyama integration of the symmetric-ordering classical analogue.
/// The output uses the same noise increment that drives the cavity.
OutputSeries simulate_output(const DriftModel& model, double theta,
                             const TrajectoryConfig& cfg);

// Symmetric-ordered PSD of vacuum in the unitary convention; subtracted to
// obtain normally-ordered spectra. Checked by the calibration run.
inline constexpr double kVacuumFloor = 1.0;

/// Hann-windowed, 50%-overlap Welch average of both quadratures with the
/// vacuum floor removed. Grid holds the non-negative FFT frequencies. Throws
/// std::invalid_argument naming the required duration when a stream is too
/// short for its share of segments.
SpectrumResult estimate_spectrum(const OutputSeries& series,
                                 const TrajectoryConfig& cfg);

/// Analytic counterpart of an estimated spectrum: the squeezed-quadrature
/// spectrum averaged over +w and -w (a real time series cannot tell them
/// apart), on the non-negative grid.
std::vector<double> symmetrized_spectrum(const DriftModel& model, double theta,
                                         const std::vector<double>& omega);

struct SpectrumComparison {
  long bins = 0;
  double fraction_within_3sigma = 0.0;
  double max_deviation_sigma = 0.0;
  std::vector<double> analytic;   // per bin, full estimated grid
};

/// Bins with 0 <= w <= omega_max are counted.
SpectrumComparison compare_to_analytic(const SpectrumResult& estimate,
                                       const DriftModel& model, double omega_max);

/// Raw symmetric-ordered PSD level of the calibration (empty-cavity) run,
/// averaged over all bins up to `omega_max`.
struct Calibration {
  SpectrumResult raw;                    // floor not subtracted
  double floor = 0.0;
  double stderr_floor = 0.0;
  double max_bin_deviation_sigma = 0.0;  // largest |bin - floor| / stderr
  double fraction_within_3sigma = 0.0;
};
Calibration calibrate_vacuum_floor(double mu, const TrajectoryConfig& cfg,
                                   double omega_max);

/// Time-averaged symmetric covariance of the intracavity quadratures with a
/// batch-means standard error per entry (one batch per stream).
struct CovarianceEstimate {
  Eigen::Matrix4d mean;
  Eigen::Matrix4d stderr_;
};
CovarianceEstimate simulate_covariance(const DriftModel& model,
                                       const TrajectoryConfig& cfg);

}  // namespace nanosqueeze

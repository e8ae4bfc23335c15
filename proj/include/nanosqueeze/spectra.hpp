#pragma once

#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "nanosqueeze/model.hpp"

namespace nanosqueeze {

/// Frequency offsets from the cavity resonance (rotating frame), rad/s.
struct SpectrumGrid {
  std::vector<double> omega;

  /// `points` must be odd so that 0 is a grid point.
  static SpectrumGrid symmetric(double half_span, int points);
  /// Default grid over +-20 max(mu, gamma + 4|chi|, 2g): at least 2049 points,
  /// more when needed to put four points across the slowest drift rate.
  static SpectrumGrid default_for(const DriftModel& model);
  /// Throws std::invalid_argument unless strictly increasing and containing 0.
  void validate() const;
  std::size_t size() const { return omega.size(); }
};

inline constexpr int kDefaultGridPoints = 2049;
inline constexpr double kDefaultGridSpanFactor = 20.0;
inline constexpr int kMaxDefaultGridPoints = (1 << 21) + 1;

struct Amplifier {
  double gain = 1.0;
  double added_noise = 0.0;
};

struct SpectrumResult {
  SpectrumGrid grid;
  std::vector<double> S_squeezed;       // X'_c at theta
  std::vector<double> S_antisqueezed;   // Y'_c at theta
  std::vector<double> S_squeezed_stderr;  // only for estimated spectra
  double theta = 0.0;
  DriveMode mode = DriveMode::red();
  EffectiveParams params;
  std::optional<Amplifier> amplifier;
  double max_imag_residue = 0.0;  // relative to max(1, |S|)
};

// Imaginary residue, relative to max(1, |S|), allowed before it is discarded.
inline constexpr double kSpectrumImagTol = 1e-10;

/// Input-output transfer T(w) = -(D A(w)^{-1} B + P), 4 x input_dim, with B
/// the input coupling and P the projection onto the external input port.
/// Throws NoSteadyState if A(w) is numerically singular.
Eigen::MatrixXcd transfer_matrix(const DriftModel& model, double omega);

/// Delta-stripped output moments at one frequency.
struct OutputMoments {
  std::complex<double> aa;    // <a_o a_o>(w)
  std::complex<double> adad;  // <a_o+ a_o+>(w)
  std::complex<double> ada;   // <a_o+ a_o>(w)
};
OutputMoments output_moments(const DriftModel& model, double omega);

/// Normally-ordered output quadrature spectra on a grid. Grid points are
/// evaluated in parallel; results are in grid order.
SpectrumResult output_spectrum(const DriftModel& model, double theta,
                               const SpectrumGrid& grid);

struct ClosedFormSpectrum {
  double squeezed = 0.0;
  std::optional<double> antisqueezed;
};

/// Zero-temperature closed forms for real chi. Throws std::domain_error for
/// n_m0 != 0 or complex chi, NoSteadyState above threshold.
ClosedFormSpectrum closed_form_spectrum(const EffectiveParams& params,
                                        const DriveMode& mode, double omega);

/// S -> A S + 2 (A - 1)(n_a + 1) on both quadratures.
SpectrumResult amplifier_noise(const SpectrumResult& spec, double gain,
                               double added_noise);

// Tail share of the integral beyond which the grid is rejected.
inline constexpr double kMaxTailFraction = 1e-3;

/// kSpectrumIntegralNorm / mu_ext * integral of S_squeezed, trapezoid plus an
/// analytic w^-4 tail on both ends. Equals the intracavity S_X'c at theta.
double integrate_spectrum(const SpectrumResult& spec);

struct NormalModeReport {
  bool split = false;
  bool marginal = false;
  double lhs = 0.0;             // 8 g^2
  double rhs = 0.0;             // mu^2 + (gamma + 4 chi)^2
  double asymptote = 0.0;       // g
  std::vector<double> found_minima;  // located minima of S_squeezed, rad/s
};

/// Red drive with real chi: evaluates the splitting inequality and locates
/// the off-resonant minima of S_squeezed.
NormalModeReport detect_normal_mode_splitting(const EffectiveParams& params);

}  // namespace nanosqueeze

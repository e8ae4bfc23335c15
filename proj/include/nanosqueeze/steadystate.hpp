#pragma once

#include <complex>
#include <optional>
#include <stdexcept>
#include <string>

#include "nanosqueeze/model.hpp"

namespace nanosqueeze {

/// Thrown when the linear system has no stationary state (above threshold,
/// or a Blue drive beyond the heating instability).
class NoSteadyState : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// <s^2>, <s+^2>, <s+ s> for one mode.
struct ModeMoments {
  std::complex<double> second{0.0, 0.0};
  std::complex<double> second_dag{0.0, 0.0};
  double number = 0.0;
};

/// Stationary second moments of (a, b). Zero means are implied.
struct MomentState {
  std::complex<double> a2, ada, b2, bdb, ab, abd, adb, bd2, ad2, adbd;

  /// Builds from N(i,j) = <v_i v_j>, v = [a, a+, b, b+].
  static MomentState from_matrix(const Matrix4cd& n);
  Matrix4cd matrix() const;

  ModeMoments cavity() const { return {a2, ad2, ada.real()}; }
  ModeMoments mechanics() const { return {b2, bd2, bdb.real()}; }

  /// Symmetrised covariance of (x_a, p_a, x_b, p_b), x = s + s+,
  /// p = -i (s - s+). Vacuum is the identity.
  Eigen::Matrix4d symmetric_covariance() const;
  /// Smallest eigenvalue of sigma + i Omega; non-negative for physical states.
  double physicality_margin() const;
};

/// Normally-ordered quadrature variances at rotation phi:
///   S_X = e^{-2i phi} <s^2> + e^{2i phi} <s+^2> + 2 <s+ s>,  S_Y flips the
///   sign of the first two terms.
struct QuadratureSqueezing {
  double S_X = 0.0;
  double S_Y = 0.0;
  double phi = 0.0;
};

template <typename Scalar>
QuadratureSqueezing quadrature_squeezing(const std::complex<Scalar>& second,
                                         const std::complex<Scalar>& second_dag,
                                         Scalar number, Scalar phi) {
  const std::complex<Scalar> rot = std::polar(Scalar(1), Scalar(-2) * phi);
  const Scalar phase_part = (rot * second + std::conj(rot) * second_dag).real();
  return {static_cast<double>(phase_part + 2 * number),
          static_cast<double>(-phase_part + 2 * number),
          static_cast<double>(phi)};
}

inline QuadratureSqueezing quadrature_squeezing(const ModeMoments& m, double phi) {
  return quadrature_squeezing<double>(m.second, m.second_dag, m.number, phi);
}

struct SteadySolution {
  MomentState moments;
  double condition_number = 0.0;
  bool near_threshold = false;
};

// Moment solves with a larger condition number carry the near-threshold flag.
inline constexpr double kNearThresholdCondition = 1e12;

/// Solves drift N + N drift^T + diffusion = 0 (the vectorised 16x16 system
/// for all second moments) with full pivoting. Throws NoSteadyState when the
/// model is unstable or the system is singular.
SteadySolution solve_steady_moments(const DriftModel& model);

/// Closed-form squeezed-quadrature variance S_Y'm at phi = -pi/4 for real chi
/// (and psi = pi/4 for the two-tone drive).
double closed_form_SYm(const EffectiveParams& params, const DriveMode& mode);

/// Red-drive value of S_Y'm exactly at threshold, valid when 4 g^2 < mu^2.
double red_threshold_SYm(const EffectiveParams& params);

struct CavityRelationCheck {
  double nanoresonator_SY = 0.0;   // S_Y'm at phi = -pi/4
  double cavity_SX = 0.0;          // S_X'c at theta = -pi/4
  double offset = 0.0;             // 2 mu (n gamma - 2 chi)/(4 g^2 + gamma mu + 4 mu chi)
  double residual = 0.0;           // S_Y'm - (S_X'c + offset)
  double bath_bound = 0.0;         // (4 g^2 + gamma mu) / (2 gamma mu)
  bool bath_condition = false;     // n_m0 < bath_bound
  bool bath_marginal = false;      // n_m0 at the bound within 1e-12 relative
};

/// Red drive only: checks the cavity/nanoresonator squeezing relation using
/// moment-solver values on both sides.
CavityRelationCheck cavity_nanores_relation_check(const EffectiveParams& params);

/// Adiabatic-elimination occupation with chi = 0 and Gamma = 4 g^2 / mu.
/// Throws NoSteadyState for a Blue drive with Gamma >= gamma.
double final_phonon_number(const EffectiveParams& params, const DriveMode& mode);

struct OptimalPhases {
  double phi = 0.0;                // mechanical quadrature
  double theta = 0.0;              // local oscillator
  std::optional<double> psi;       // relative drive phase, two-tone only
};

/// Phases minimising the squeezed-quadrature variance for a pump phase arg_chi.
OptimalPhases optimal_phases(const DriveMode& mode, double arg_chi);

}  // namespace nanosqueeze

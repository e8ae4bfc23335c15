#pragma once

#include <complex>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "nanosqueeze/params.hpp"

namespace nanosqueeze {

using Matrix4cd = Eigen::Matrix<std::complex<double>, 4, 4>;
using Vector4cd = Eigen::Matrix<std::complex<double>, 4, 1>;

/// Which sideband(s) the cavity is driven on. The relative drive phase psi
/// exists only for the two-tone drive.
class DriveMode {
 public:
  enum class Kind { Blue, Red, BlueRed };

  static DriveMode blue() { return DriveMode(Kind::Blue, 0.0); }
  static DriveMode red() { return DriveMode(Kind::Red, 0.0); }
  static DriveMode blue_red(double psi) { return DriveMode(Kind::BlueRed, psi); }
  /// Accepts "blue", "red", "bluered"/"blue_red"/"br".
  static DriveMode parse(const std::string& name, double psi = 0.0);

  Kind kind() const { return kind_; }
  bool is_blue() const { return kind_ == Kind::Blue; }
  bool is_red() const { return kind_ == Kind::Red; }
  bool is_blue_red() const { return kind_ == Kind::BlueRed; }
  /// Throws std::logic_error unless is_blue_red().
  double psi() const;
  std::string name() const;

  friend bool operator==(const DriveMode&, const DriveMode&) = default;

 private:
  DriveMode(Kind k, double psi) : kind_(k), psi_(psi) {}
  Kind kind_;
  double psi_;
};

/// Linear Langevin system  v' = drift v + input_coupling v_in  for the mode
/// vector v = [a, a+, b, b+], with  <v_in,i(t) v_in,j(t')> = C_in(i,j) delta.
///
/// The input vector is [a_in, a_in+, b_in, b_in+] and, when mu_int > 0, is
/// extended by the internal-loss port [c_in, c_in+]. The boundary condition
/// uses only the external port: a_out = sqrt(mu_ext) a - a_in.
struct DriftModel {
  Matrix4cd drift;               // A(w) = i w I + drift
  Eigen::Matrix4d damping;       // D = diag(sqrt(mu_ext), sqrt(mu_ext), sqrt(gamma), sqrt(gamma))
  Eigen::MatrixXd input_corr;    // C_in, 4x4 or 6x6
  Eigen::MatrixXd input_coupling;  // 4 x input_dim()
  DriveMode mode = DriveMode::red();
  EffectiveParams params;

  int input_dim() const { return static_cast<int>(input_corr.rows()); }
  /// input_coupling C_in input_coupling^T, the moment-equation source term.
  Matrix4cd diffusion() const;
  /// A(w) = i w I + drift.
  Matrix4cd dynamical(double omega) const;
};

DriftModel build_drift(const EffectiveParams& params, const DriveMode& mode);

/// Input delta-correlation coefficients, 4x4 (or 6x6 with an internal-loss
/// vacuum port when mu_int > 0).
Eigen::MatrixXd input_correlations(double n_m0, double mu_int);

struct StabilityMargin {
  std::string label;
  double value = 0.0;
  double bound = 0.0;
  bool pass() const { return value < bound; }
};

struct StabilityReport {
  bool analytic_pass = false;
  std::vector<StabilityMargin> analytic_margins;
  bool eigenvalue_pass = false;
  double max_real_eigenvalue = 0.0;

  /// False when the closed-form inequalities and the spectrum of the drift
  /// disagree, i.e. the analytic regime assumptions do not hold.
  bool consistent() const { return analytic_pass == eigenvalue_pass; }
  /// The first violated analytic condition, or the eigenvalue criterion.
  std::string violated() const;
};

/// Real parts above -stability_epsilon count as unstable.
double stability_epsilon(const EffectiveParams& params);

/// Analytic threshold on |chi| for the mode (the tightest inequality).
double chi_threshold(const EffectiveParams& params, const DriveMode& mode);

StabilityReport stability(const EffectiveParams& params, const DriveMode& mode);

/// Largest real part over the eigenvalues of the drift.
double max_real_eigenvalue(const DriftModel& model);

}  // namespace nanosqueeze

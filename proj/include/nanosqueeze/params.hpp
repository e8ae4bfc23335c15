#pragma once

#include <complex>
#include <optional>
#include <string>
#include <vector>

namespace nanosqueeze {

class DriveMode;

/// Lab-level description of the cavity + nanoresonator device. Angular
/// frequencies are stored in rad/s.
struct PhysicalParams {
  double omega_c = 0.0;  // cavity resonance, rad/s
  double nu = 0.0;       // mechanical resonance, rad/s
  double mass = 0.0;     // kg
  double beta = 0.0;     // C0 / C_sigma
  double d = 0.0;        // equilibrium gap, m
  std::optional<double> L;        // H
  std::optional<double> C_sigma;  // F
  double C_c0 = 0.0;     // pump capacitance, F
  double x_c0 = 0.0;     // pump capacitor gap, m
  double V0 = 0.0;       // V
  double VP = 0.0;       // V
  double E_drive = 0.0;  // cavity drive amplitude, 1/s
  double Q_cavity = 0.0;
  double Q_mech = 0.0;
  double T_m = 0.0;      // K

  /// Throws std::domain_error naming the first offending field.
  void validate() const;
};

/// Model-level parameters feeding the linearised dynamics. All rates in 1/s.
struct EffectiveParams {
  double g = 0.0;
  std::complex<double> chi{0.0, 0.0};
  double gamma = 0.0;
  double mu_ext = 0.0;
  double mu_int = 0.0;
  double n_m0 = 0.0;

  /// Total cavity damping.
  double mu() const { return mu_ext + mu_int; }
  /// Adiabatic-elimination cooling/heating rate 4 g^2 / mu.
  double cooling_rate() const { return 4.0 * g * g / mu(); }
  void validate() const;
};

// Tolerance on omega_c = 1/sqrt(L C_sigma) when both are supplied.
inline constexpr double kResonanceConsistencyTol = 5e-3;

/// Half-width of the mechanical ground state, sqrt(hbar / (2 m nu)).
double zero_point_width(double mass, double nu);

/// Single-photon coupling beta omega_c dx / (2 d). Appends a warning when
/// delta_x >= d (linearised capacitance no longer valid).
double derive_kappa(double beta, double omega_c, double delta_x, double d,
                    std::vector<std::string>* warnings = nullptr);

/// Effective coupling kappa E / nu; identical for blue, red and two-tone drives.
double derive_g(double kappa, double E_drive, double nu);

/// Amplitude k0 = C_c0 V0 VP / x_c0^2 of the spring-constant modulation.
double spring_modulation(double C_c0, double V0, double VP, double x_c0);

/// |chi| = k0 / (8 m nu).
double derive_chi(double C_c0, double V0, double VP, double x_c0, double mass,
                  double nu);

/// V0 VP needed for a target |chi|; inverse of derive_chi.
double required_bias_product(double chi, double C_c0, double x_c0, double mass,
                             double nu);

/// Drive amplitude E giving a target coupling g; inverse of derive_g.
double drive_for_coupling(double g, double kappa, double nu);

/// (E / nu)^2.
double drive_photon_number(double E_drive, double nu);

/// n_d hbar omega_c^2. This convention is the one that matches the quoted
/// microwave figures; it is flagged as convention-dependent in reports.
double circulating_power(double n_d, double omega_c);

/// omega / Q.
double damping_from_q(double omega, double Q);

/// Bose occupation 1/(exp(hbar nu / k T) - 1); zero at T = 0.
double thermal_occupancy(double nu, double T);

/// omega_c / sqrt(L C_sigma) - 1 relative mismatch.
double resonance_mismatch(double omega_c, double L, double C_sigma);

/// Full chain from lab quantities to model rates (chi taken real, positive).
EffectiveParams derive_effective(const PhysicalParams& p,
                                 std::vector<std::string>* warnings = nullptr);

struct FeasibilityCheck {
  std::string label;
  double value = 0.0;
  double bound = 0.0;
  bool pass = false;
  std::string note;
};

struct FeasibilityReport {
  std::vector<FeasibilityCheck> checks;
  std::vector<std::string> notes;

  bool all_pass() const;
  const FeasibilityCheck* find(const std::string& label) const;
};

// "much less than" is read as a ratio of at most 0.1 throughout the report.
inline constexpr double kMuchLessRatio = 0.1;

/// Resolved-sideband, adiabatic, quantum-limited and stability checks. The
/// physical block is optional: the sideband ratio needs nu.
FeasibilityReport feasibility_report(const std::optional<PhysicalParams>& p,
                                     const EffectiveParams& e,
                                     const DriveMode& mode);

}  // namespace nanosqueeze

#include "nanosqueeze/params.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "nanosqueeze/constants.hpp"
#include "nanosqueeze/model.hpp"
#include "nanosqueeze/steadystate.hpp"

namespace nanosqueeze {

namespace {

void require_positive(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw std::domain_error(std::string(name) + " must be positive and finite");
  }
}

void require_non_negative(double v, const char* name) {
  if (!(v >= 0.0) || !std::isfinite(v)) {
    throw std::domain_error(std::string(name) + " must be non-negative and finite");
  }
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(4);
  os << v;
  return os.str();
}

}  // namespace

void PhysicalParams::validate() const {
  require_positive(omega_c, "omega_c");
  require_positive(nu, "nu");
  require_positive(mass, "mass");
  require_positive(d, "d");
  require_positive(C_c0, "C_c0");
  require_positive(x_c0, "x_c0");
  require_positive(Q_cavity, "Q_cavity");
  require_positive(Q_mech, "Q_mech");
  require_non_negative(V0, "V0");
  require_non_negative(VP, "VP");
  require_non_negative(E_drive, "E_drive");
  require_non_negative(T_m, "T_m");
  if (!(beta > 0.0 && beta < 1.0)) {
    throw std::domain_error("beta must lie in (0, 1)");
  }
  if (L) require_positive(*L, "L");
  if (C_sigma) require_positive(*C_sigma, "C_sigma");
  if (L && C_sigma) {
    const double mismatch = resonance_mismatch(omega_c, *L, *C_sigma);
    if (std::abs(mismatch) > kResonanceConsistencyTol) {
      throw std::domain_error("omega_c disagrees with 1/sqrt(L C_sigma) by " +
                              fmt(100.0 * mismatch) + "%");
    }
  }
}

void EffectiveParams::validate() const {
  require_non_negative(g, "g");
  require_positive(gamma, "gamma");
  require_positive(mu_ext, "mu_ext");
  require_non_negative(mu_int, "mu_int");
  require_non_negative(n_m0, "n_m0");
  if (!std::isfinite(chi.real()) || !std::isfinite(chi.imag())) {
    throw std::domain_error("chi must be finite");
  }
}

double zero_point_width(double mass, double nu) {
  require_positive(mass, "mass");
  require_positive(nu, "nu");
  return std::sqrt(kHbar / (2.0 * mass * nu));
}

double derive_kappa(double beta, double omega_c, double delta_x, double d,
                    std::vector<std::string>* warnings) {
  require_positive(beta, "beta");
  require_positive(omega_c, "omega_c");
  require_positive(delta_x, "delta_x");
  require_positive(d, "d");
  if (delta_x >= d && warnings) {
    warnings->push_back("zero-point width " + fmt(delta_x) +
                        " m is not small compared with the gap " + fmt(d) +
                        " m; linearised coupling invalid");
  }
  return beta * omega_c * delta_x / (2.0 * d);
}

double derive_g(double kappa, double E_drive, double nu) {
  require_non_negative(kappa, "kappa");
  require_non_negative(E_drive, "E_drive");
  require_positive(nu, "nu");
  return kappa * E_drive / nu;
}

double spring_modulation(double C_c0, double V0, double VP, double x_c0) {
  require_positive(C_c0, "C_c0");
  require_positive(x_c0, "x_c0");
  require_non_negative(V0, "V0");
  require_non_negative(VP, "VP");
  return C_c0 * V0 * VP / (x_c0 * x_c0);
}

double derive_chi(double C_c0, double V0, double VP, double x_c0, double mass,
                  double nu) {
  require_positive(mass, "mass");
  require_positive(nu, "nu");
  return spring_modulation(C_c0, V0, VP, x_c0) / (8.0 * mass * nu);
}

double required_bias_product(double chi, double C_c0, double x_c0, double mass,
                             double nu) {
  require_non_negative(chi, "chi");
  require_positive(C_c0, "C_c0");
  require_positive(x_c0, "x_c0");
  require_positive(mass, "mass");
  require_positive(nu, "nu");
  return 8.0 * mass * nu * chi * x_c0 * x_c0 / C_c0;
}

double drive_for_coupling(double g, double kappa, double nu) {
  require_non_negative(g, "g");
  require_positive(kappa, "kappa");
  require_positive(nu, "nu");
  return g * nu / kappa;
}

double drive_photon_number(double E_drive, double nu) {
  require_non_negative(E_drive, "E_drive");
  require_positive(nu, "nu");
  const double amp = E_drive / nu;
  return amp * amp;
}

double circulating_power(double n_d, double omega_c) {
  require_non_negative(n_d, "n_d");
  require_positive(omega_c, "omega_c");
  return n_d * kHbar * omega_c * omega_c;
}

double damping_from_q(double omega, double Q) {
  require_positive(omega, "omega");
  require_positive(Q, "Q");
  return omega / Q;
}

double thermal_occupancy(double nu, double T) {
  require_positive(nu, "nu");
  require_non_negative(T, "T");
  if (T == 0.0) return 0.0;
  return 1.0 / std::expm1(kHbar * nu / (kBoltzmann * T));
}

double resonance_mismatch(double omega_c, double L, double C_sigma) {
  require_positive(omega_c, "omega_c");
  require_positive(L, "L");
  require_positive(C_sigma, "C_sigma");
  return omega_c * std::sqrt(L * C_sigma) - 1.0;
}

EffectiveParams derive_effective(const PhysicalParams& p,
                                 std::vector<std::string>* warnings) {
  p.validate();
  const double dx = zero_point_width(p.mass, p.nu);
  const double kappa = derive_kappa(p.beta, p.omega_c, dx, p.d, warnings);
  EffectiveParams e;
  e.g = derive_g(kappa, p.E_drive, p.nu);
  e.chi = derive_chi(p.C_c0, p.V0, p.VP, p.x_c0, p.mass, p.nu);
  e.gamma = damping_from_q(p.nu, p.Q_mech);
  e.mu_ext = damping_from_q(p.omega_c, p.Q_cavity);
  e.mu_int = 0.0;
  e.n_m0 = thermal_occupancy(p.nu, p.T_m);
  return e;
}

bool FeasibilityReport::all_pass() const {
  for (const auto& c : checks) {
    if (!c.pass) return false;
  }
  return true;
}

const FeasibilityCheck* FeasibilityReport::find(const std::string& label) const {
  for (const auto& c : checks) {
    if (c.label == label) return &c;
  }
  return nullptr;
}

FeasibilityReport feasibility_report(const std::optional<PhysicalParams>& p,
                                     const EffectiveParams& e,
                                     const DriveMode& mode) {
  e.validate();
  FeasibilityReport r;
  const double mu = e.mu();

  if (p) {
    // Resolved sideband: |detuning| = nu must dominate mu.
    const double ratio = p->nu / mu;
    r.checks.push_back({"resolved_sideband", ratio, 1.0 / kMuchLessRatio,
                        ratio >= 1.0 / kMuchLessRatio, "nu / mu"});
  }

  const double eps = std::max(e.g, std::abs(e.chi)) / mu;
  r.checks.push_back({"adiabatic", eps, kMuchLessRatio, eps <= kMuchLessRatio,
                      "max(g, |chi|) / mu"});

  const double Gamma = e.cooling_rate();
  double n_final = std::numeric_limits<double>::infinity();
  try {
    n_final = final_phonon_number(e, mode);
  } catch (const NoSteadyState&) {
  }
  r.checks.push_back({"quantum_limited_occupation", n_final, kMuchLessRatio,
                      n_final <= kMuchLessRatio, "final phonon number, chi = 0"});
  const double damping_ratio =
      Gamma > 0.0 ? e.gamma / Gamma : std::numeric_limits<double>::infinity();
  r.checks.push_back({"quantum_limited_damping", damping_ratio, kMuchLessRatio,
                      damping_ratio <= kMuchLessRatio, "gamma / (4 g^2 / mu)"});

  const StabilityReport s = stability(e, mode);
  r.checks.push_back({"stable", s.max_real_eigenvalue, -stability_epsilon(e),
                      s.eigenvalue_pass,
                      s.consistent() ? "max Re eigenvalue of drift"
                                     : "eigenvalue and analytic criteria disagree"});

  r.notes.push_back("cooling rate Gamma = 4 g^2 / mu = " + fmt(Gamma) + " 1/s");
  if (mode.is_red() && e.chi.real() >= 0.0 && std::abs(e.chi.imag()) == 0.0) {
    const double split_lhs = 8.0 * e.g * e.g;
    const double gc = e.gamma + 4.0 * std::abs(e.chi);
    if (split_lhs > mu * mu + gc * gc) {
      r.notes.push_back(
          "normal-mode splitting regime: outside the adiabatic limit and "
          "likely beyond the cavity's linear circulating-power range");
    }
  }
  return r;
}

}  // namespace nanosqueeze

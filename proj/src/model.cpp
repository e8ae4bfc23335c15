#include "nanosqueeze/model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace nanosqueeze {

using cd = std::complex<double>;

DriveMode DriveMode::parse(const std::string& name, double psi) {
  if (name == "blue") return blue();
  if (name == "red") return red();
  if (name == "bluered" || name == "blue_red" || name == "br" || name == "blue-red") {
    return blue_red(psi);
  }
  throw std::invalid_argument("unknown drive mode '" + name + "'");
}

double DriveMode::psi() const {
  if (kind_ != Kind::BlueRed) {
    throw std::logic_error("psi is only defined for the two-tone drive");
  }
  return psi_;
}

std::string DriveMode::name() const {
  switch (kind_) {
    case Kind::Blue: return "blue";
    case Kind::Red: return "red";
    case Kind::BlueRed: return "bluered";
  }
  return "?";
}

Matrix4cd DriftModel::diffusion() const {
  const Eigen::MatrixXcd b = input_coupling.cast<cd>();
  return b * input_corr.cast<cd>() * b.transpose();
}

Matrix4cd DriftModel::dynamical(double omega) const {
  return drift + cd(0.0, omega) * Matrix4cd::Identity();
}

Eigen::MatrixXd input_correlations(double n_m0, double mu_int) {
  if (n_m0 < 0.0) throw std::domain_error("n_m0 must be non-negative");
  const int dim = mu_int > 0.0 ? 6 : 4;
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(dim, dim);
  c(0, 1) = 1.0;
  c(2, 3) = n_m0 + 1.0;
  c(3, 2) = n_m0;
  if (dim == 6) c(4, 5) = 1.0;
  return c;
}

DriftModel build_drift(const EffectiveParams& params, const DriveMode& mode) {
  params.validate();
  const cd i(0.0, 1.0);
  const double g = params.g;
  const double mu = params.mu();
  const cd chi = params.chi;

  DriftModel m;
  m.mode = mode;
  m.params = params;
  m.drift.setZero();
  m.drift(0, 0) = m.drift(1, 1) = -mu / 2.0;
  m.drift(2, 2) = m.drift(3, 3) = -params.gamma / 2.0;
  m.drift(2, 3) = -2.0 * i * chi;
  m.drift(3, 2) = 2.0 * i * std::conj(chi);

  switch (mode.kind()) {
    case DriveMode::Kind::Blue:
      m.drift(0, 3) = -i * g;
      m.drift(1, 2) = i * g;
      m.drift(2, 1) = -i * g;
      m.drift(3, 0) = i * g;
      break;
    case DriveMode::Kind::Red:
      m.drift(0, 2) = i * g;
      m.drift(1, 3) = -i * g;
      m.drift(2, 0) = i * g;
      m.drift(3, 1) = -i * g;
      break;
    case DriveMode::Kind::BlueRed: {
      const cd e = std::polar(1.0, mode.psi());
      m.drift(0, 2) = -i * g / e;
      m.drift(0, 3) = -i * g * e;
      m.drift(1, 2) = i * g / e;
      m.drift(1, 3) = i * g * e;
      m.drift(2, 0) = m.drift(2, 1) = -i * g * e;
      m.drift(3, 0) = m.drift(3, 1) = i * g / e;
      break;
    }
  }

  const double s_ext = std::sqrt(params.mu_ext);
  const double s_mech = std::sqrt(params.gamma);
  m.damping = Eigen::Vector4d(s_ext, s_ext, s_mech, s_mech).asDiagonal();

  m.input_corr = input_correlations(params.n_m0, params.mu_int);
  m.input_coupling = Eigen::MatrixXd::Zero(4, m.input_dim());
  m.input_coupling.leftCols(4) = m.damping;
  if (m.input_dim() == 6) {
    const double s_int = std::sqrt(params.mu_int);
    m.input_coupling(0, 4) = s_int;
    m.input_coupling(1, 5) = s_int;
  }
  return m;
}

double stability_epsilon(const EffectiveParams& params) {
  return 1e-12 * std::max(params.mu(), params.gamma);
}

double max_real_eigenvalue(const DriftModel& model) {
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(model.drift, false);
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error("eigenvalue computation failed");
  }
  return solver.eigenvalues().real().maxCoeff();
}

namespace {

std::vector<StabilityMargin> analytic_margins(const EffectiveParams& p,
                                              const DriveMode& mode) {
  const double chi = std::abs(p.chi);
  const double mu = p.mu();
  const double g2 = p.g * p.g;
  switch (mode.kind()) {
    case DriveMode::Kind::Blue:
      return {{"|chi| < gamma/4 - g^2/mu", chi, p.gamma / 4.0 - g2 / mu}};
    case DriveMode::Kind::Red:
      return {{"|chi| < gamma/4 + g^2/mu", chi, p.gamma / 4.0 + g2 / mu},
              {"|chi| < (gamma + mu)/4", chi, (p.gamma + mu) / 4.0}};
    case DriveMode::Kind::BlueRed:
      return {{"|chi| < gamma/4", chi, p.gamma / 4.0}};
  }
  return {};
}

}  // namespace

double chi_threshold(const EffectiveParams& params, const DriveMode& mode) {
  double bound = std::numeric_limits<double>::infinity();
  for (const auto& m : analytic_margins(params, mode)) bound = std::min(bound, m.bound);
  return bound;
}

StabilityReport stability(const EffectiveParams& params, const DriveMode& mode) {
  StabilityReport r;
  r.analytic_margins = analytic_margins(params, mode);
  r.analytic_pass = std::all_of(r.analytic_margins.begin(), r.analytic_margins.end(),
                                [](const StabilityMargin& m) { return m.pass(); });
  r.max_real_eigenvalue = max_real_eigenvalue(build_drift(params, mode));
  r.eigenvalue_pass = r.max_real_eigenvalue < -stability_epsilon(params);
  return r;
}

std::string StabilityReport::violated() const {
  for (const auto& m : analytic_margins) {
    if (!m.pass()) return m.label;
  }
  if (!eigenvalue_pass) return "max Re eigenvalue of drift >= 0";
  return {};
}

}  // namespace nanosqueeze

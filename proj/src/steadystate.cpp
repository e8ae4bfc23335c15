#include "nanosqueeze/steadystate.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace nanosqueeze {

using cd = std::complex<double>;
using std::numbers::pi;

MomentState MomentState::from_matrix(const Matrix4cd& n) {
  MomentState m;
  m.a2 = n(0, 0);
  m.ada = n(1, 0);
  m.b2 = n(2, 2);
  m.bdb = n(3, 2);
  m.ab = n(0, 2);
  m.abd = n(0, 3);
  m.adb = n(1, 2);
  m.bd2 = n(3, 3);
  m.ad2 = n(1, 1);
  m.adbd = n(1, 3);
  return m;
}

Matrix4cd MomentState::matrix() const {
  // N(i,j) = <v_i v_j>; only the commutators [a, a+] = [b, b+] = 1 differ
  // between N(i,j) and N(j,i).
  Matrix4cd n;
  n(0, 0) = a2;
  n(0, 1) = ada + 1.0;
  n(1, 0) = ada;
  n(1, 1) = ad2;
  n(2, 2) = b2;
  n(2, 3) = bdb + 1.0;
  n(3, 2) = bdb;
  n(3, 3) = bd2;
  n(0, 2) = n(2, 0) = ab;
  n(0, 3) = n(3, 0) = abd;
  n(1, 2) = n(2, 1) = adb;
  n(1, 3) = n(3, 1) = adbd;
  return n;
}

namespace {

Matrix4cd quadrature_transform() {
  const cd i(0.0, 1.0);
  Matrix4cd u = Matrix4cd::Zero();
  u(0, 0) = 1.0;
  u(0, 1) = 1.0;
  u(1, 0) = -i;
  u(1, 1) = i;
  u(2, 2) = 1.0;
  u(2, 3) = 1.0;
  u(3, 2) = -i;
  u(3, 3) = i;
  return u;
}

}  // namespace

Eigen::Matrix4d MomentState::symmetric_covariance() const {
  const Matrix4cd u = quadrature_transform();
  const Matrix4cd raw = u * matrix() * u.transpose();
  return (0.5 * (raw + raw.transpose())).real();
}

double MomentState::physicality_margin() const {
  Eigen::Matrix4cd h = symmetric_covariance().cast<cd>();
  const cd i(0.0, 1.0);
  h(0, 1) += i;
  h(1, 0) -= i;
  h(2, 3) += i;
  h(3, 2) -= i;
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> es(h, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

SteadySolution solve_steady_moments(const DriftModel& model) {
  const double max_re = max_real_eigenvalue(model);
  if (!(max_re < -stability_epsilon(model.params))) {
    std::ostringstream os;
    os << "no steady state: drift has an eigenvalue with real part " << max_re;
    throw NoSteadyState(os.str());
  }

  // vec(drift N + N drift^T) = (I (x) drift + drift (x) I) vec(N), column-major.
  // Assembled and solved in extended precision: near threshold the system is
  // ill-conditioned and the squeezed variance is a difference of large moments.
  using ld = std::complex<long double>;
  using Matrix16ld = Eigen::Matrix<ld, 16, 16>;
  using Vector16ld = Eigen::Matrix<ld, 16, 1>;
  const Eigen::Matrix<ld, 4, 4> m = model.drift.cast<ld>();
  Matrix16ld lhs = Matrix16ld::Zero();
  for (int blk = 0; blk < 4; ++blk) {
    lhs.block<4, 4>(4 * blk, 4 * blk) += m;
    for (int k = 0; k < 4; ++k) {
      lhs.block<4, 4>(4 * blk, 4 * k) += m(blk, k) * Eigen::Matrix<ld, 4, 4>::Identity();
    }
  }
  const Eigen::MatrixXcd b = model.input_coupling.cast<cd>();
  const Eigen::Matrix<ld, 4, 4> q =
      (b.cast<ld>() * model.input_corr.cast<cd>().cast<ld>() * b.transpose().cast<ld>());
  Vector16ld rhs;
  for (int c = 0; c < 4; ++c) rhs.segment<4>(4 * c) = -q.col(c);

  const Eigen::JacobiSVD<Eigen::Matrix<cd, 16, 16>> svd(lhs.cast<cd>());
  const auto& sv = svd.singularValues();
  const double cond = sv(sv.size() - 1) > 0.0 ? sv(0) / sv(sv.size() - 1)
                                              : std::numeric_limits<double>::infinity();
  if (!std::isfinite(cond) || cond > 1e15) {
    std::ostringstream os;
    os << "moment system singular at threshold (condition number " << cond << ")";
    throw NoSteadyState(os.str());
  }

  const Vector16ld x = lhs.fullPivLu().solve(rhs);
  Matrix4cd n;
  for (int c = 0; c < 4; ++c) n.col(c) = x.segment<4>(4 * c).cast<cd>();

  SteadySolution s;
  s.moments = MomentState::from_matrix(n);
  s.condition_number = cond;
  s.near_threshold = cond > kNearThresholdCondition;
  return s;
}

namespace {

double real_chi(const EffectiveParams& p) {
  if (std::abs(p.chi.imag()) > 1e-14 * std::max(1.0, std::abs(p.chi))) {
    throw std::domain_error("closed forms require real chi");
  }
  return p.chi.real();
}

void require_below_threshold(const EffectiveParams& p, const DriveMode& mode) {
  const StabilityReport s = stability(p, mode);
  if (!s.analytic_pass) {
    throw NoSteadyState("closed form requested at or above threshold: " + s.violated());
  }
}

bool is_quarter_pi(double psi) {
  const double r = std::remainder(psi - pi / 4.0, pi);
  return std::abs(r) < 1e-12;
}

}  // namespace

double closed_form_SYm(const EffectiveParams& p, const DriveMode& mode) {
  p.validate();
  const double chi = real_chi(p);
  require_below_threshold(p, mode);
  const double mu = p.mu();
  const double gm = p.gamma;
  const double n = p.n_m0;
  const double g2 = p.g * p.g;
  switch (mode.kind()) {
    case DriveMode::Kind::Blue:
      return 2.0 *
             (mu * (n * gm - 2.0 * chi) * (gm + mu + 4.0 * chi) -
              4.0 * g2 * (n * gm - mu - 2.0 * chi)) /
             ((gm + mu + 4.0 * chi) * (mu * gm + 4.0 * mu * chi - 4.0 * g2));
    case DriveMode::Kind::Red:
      return 2.0 * (n * gm - 2.0 * chi) * (4.0 * g2 + mu * gm + mu * mu + 4.0 * mu * chi) /
             ((gm + mu + 4.0 * chi) * (4.0 * g2 + mu * gm + 4.0 * mu * chi));
    case DriveMode::Kind::BlueRed:
      if (!is_quarter_pi(mode.psi())) {
        throw std::domain_error("two-tone closed form assumes psi = pi/4");
      }
      return (2.0 * n * gm - 4.0 * chi) / (gm + 4.0 * chi);
  }
  return 0.0;
}

double red_threshold_SYm(const EffectiveParams& p) {
  p.validate();
  const double mu = p.mu();
  const double g2 = p.g * p.g;
  if (!(4.0 * g2 < mu * mu)) {
    throw std::domain_error("threshold closed form requires 4 g^2 < mu^2");
  }
  const double gm = p.gamma;
  const double num = 8.0 * g2 + 2.0 * gm * mu + mu * mu;
  const double den = 4.0 * g2 + 2.0 * gm * mu + mu * mu;
  return -0.5 * num / den + p.n_m0 * gm * mu * num / ((4.0 * g2 + gm * mu) * den);
}

CavityRelationCheck cavity_nanores_relation_check(const EffectiveParams& p) {
  const DriveMode mode = DriveMode::red();
  const double chi = real_chi(p);
  const SteadySolution s = solve_steady_moments(build_drift(p, mode));
  const double mu = p.mu();
  const double g2 = p.g * p.g;
  const double gm = p.gamma;

  CavityRelationCheck c;
  c.nanoresonator_SY = quadrature_squeezing(s.moments.mechanics(), -pi / 4.0).S_Y;
  c.cavity_SX = quadrature_squeezing(s.moments.cavity(), -pi / 4.0).S_X;
  c.offset = 2.0 * mu * (p.n_m0 * gm - 2.0 * chi) / (4.0 * g2 + gm * mu + 4.0 * mu * chi);
  c.residual = c.nanoresonator_SY - (c.cavity_SX + c.offset);
  c.bath_bound = (4.0 * g2 + gm * mu) / (2.0 * gm * mu);
  c.bath_marginal = std::abs(p.n_m0 - c.bath_bound) <= 1e-12 * c.bath_bound;
  c.bath_condition = p.n_m0 < c.bath_bound && !c.bath_marginal;
  return c;
}

double final_phonon_number(const EffectiveParams& p, const DriveMode& mode) {
  p.validate();
  const double Gamma = p.cooling_rate();
  const double gm = p.gamma;
  const double n = p.n_m0;
  switch (mode.kind()) {
    case DriveMode::Kind::Blue:
      if (Gamma >= gm) {
        throw NoSteadyState("blue-sideband instability: Gamma >= gamma");
      }
      return (Gamma + gm * n) / (gm - Gamma);
    case DriveMode::Kind::Red:
      return gm * n / (Gamma + gm);
    case DriveMode::Kind::BlueRed:
      return n + 2.0 * Gamma / gm;
  }
  return 0.0;
}

OptimalPhases optimal_phases(const DriveMode& mode, double arg_chi) {
  OptimalPhases o;
  o.phi = -pi / 4.0 + arg_chi / 2.0;
  switch (mode.kind()) {
    case DriveMode::Kind::Blue:
      // The cavity follows b+, so its quadrature phase turns the other way.
      o.theta = -pi / 4.0 - arg_chi / 2.0;
      break;
    case DriveMode::Kind::Red:
      o.theta = -pi / 4.0 + arg_chi / 2.0;
      break;
    case DriveMode::Kind::BlueRed:
      o.theta = 0.0;
      o.psi = pi / 4.0 + arg_chi / 2.0;
      break;
  }
  return o;
}

}  // namespace nanosqueeze

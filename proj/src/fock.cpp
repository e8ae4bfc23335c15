#include "nanosqueeze/fock.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include <Eigen/SparseLU>
#include <unsupported/Eigen/KroneckerProduct>

namespace nanosqueeze::fock {

using cd = std::complex<double>;
using Triplet = Eigen::Triplet<cd>;
using std::numbers::pi;

void FockConfig::validate() const {
  if (n_cav < 2) throw std::invalid_argument("n_cav must be >= 2");
  if (n_mech < 4) throw std::invalid_argument("n_mech must be >= 4");
  if (!(solver_tol > 0.0)) throw std::invalid_argument("solver_tol must be positive");
  if (!(max_time > 0.0)) throw std::invalid_argument("max_time must be positive");
}

SparseMatrix annihilation(int n) {
  SparseMatrix a(n, n);
  std::vector<Triplet> t;
  for (int k = 1; k < n; ++k) t.emplace_back(k - 1, k, std::sqrt(static_cast<double>(k)));
  a.setFromTriplets(t.begin(), t.end());
  return a;
}

SparseMatrix identity(int n) {
  SparseMatrix id(n, n);
  id.setIdentity();
  return id;
}

namespace {

SparseMatrix kron(const SparseMatrix& x, const SparseMatrix& y) {
  SparseMatrix out = Eigen::kroneckerProduct(x, y).eval();
  out.makeCompressed();
  return out;
}

SparseMatrix adjoint(const SparseMatrix& x) { return SparseMatrix(x.adjoint()); }

}  // namespace

SparseMatrix liouvillian(const SparseMatrix& h,
                         const std::vector<Dissipator>& dissipators) {
  const int dim = static_cast<int>(h.rows());
  const SparseMatrix id = identity(dim);
  const cd i(0.0, 1.0);
  // vec(X rho Y) = (Y^T (x) X) vec(rho)
  SparseMatrix l = -i * kron(id, h) + i * kron(SparseMatrix(h.transpose()), id);
  for (const auto& d : dissipators) {
    if (d.rate == 0.0) continue;
    const SparseMatrix cdc = adjoint(d.op) * d.op;
    SparseMatrix term = kron(SparseMatrix(d.op.conjugate()), d.op) -
                        0.5 * kron(id, cdc) -
                        0.5 * kron(SparseMatrix(cdc.transpose()), id);
    l += d.rate * term;
  }
  l.makeCompressed();
  return l;
}

Eigen::MatrixXcd solve_steady_state(const SparseMatrix& L, int dim) {
  const int n = dim * dim;
  // Replace the (0,0) population equation by Tr(rho) = 1; the population
  // rows of L sum to zero, so one of them is redundant.
  std::vector<Triplet> t;
  t.reserve(L.nonZeros() + dim);
  for (int col = 0; col < L.outerSize(); ++col) {
    for (SparseMatrix::InnerIterator it(L, col); it; ++it) {
      if (it.row() != 0) t.emplace_back(it.row(), it.col(), it.value());
    }
  }
  for (int k = 0; k < dim; ++k) t.emplace_back(0, k + k * dim, 1.0);
  SparseMatrix m(n, n);
  m.setFromTriplets(t.begin(), t.end());
  m.makeCompressed();

  Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>> lu;
  lu.compute(m);
  if (lu.info() != Eigen::Success) {
    throw NoSteadyState("Liouvillian factorisation failed: " + lu.lastErrorMessage());
  }
  Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(n);
  rhs(0) = 1.0;
  const Eigen::VectorXcd x = lu.solve(rhs);
  if (lu.info() != Eigen::Success || !x.allFinite()) {
    throw NoSteadyState("Liouvillian null-space solve failed");
  }
  Eigen::MatrixXcd rho = Eigen::Map<const Eigen::MatrixXcd>(x.data(), dim, dim);
  rho = 0.5 * (rho + rho.adjoint()).eval();
  return rho / rho.trace();
}

Eigen::MatrixXcd integrate_to_steady(const SparseMatrix& L,
                                     const Eigen::MatrixXcd& rho0,
                                     const FockConfig& cfg, double slowest_rate) {
  if (!(slowest_rate > 0.0)) throw NoSteadyState("no relaxation: slowest rate <= 0");
  const Eigen::Index dim = rho0.rows();
  // Infinity norm bounds the spectral radius; keep RK4 inside its region.
  double norm = 0.0;
  {
    Eigen::VectorXd row_sums = Eigen::VectorXd::Zero(L.rows());
    for (int col = 0; col < L.outerSize(); ++col) {
      for (SparseMatrix::InnerIterator it(L, col); it; ++it) {
        row_sums(it.row()) += std::abs(it.value());
      }
    }
    norm = row_sums.maxCoeff();
  }
  const double relax = 1.0 / slowest_rate;
  const int steps_per_relax = std::max(1, static_cast<int>(std::ceil(relax * norm / 2.0)));
  const double h = relax / steps_per_relax;

  Eigen::VectorXcd x = Eigen::Map<const Eigen::VectorXcd>(rho0.data(), dim * dim);
  Eigen::VectorXcd k1, k2, k3, k4;
  const int max_chunks = static_cast<int>(std::ceil(cfg.max_time));
  for (int chunk = 0; chunk < max_chunks; ++chunk) {
    const Eigen::VectorXcd before = x;
    for (int s = 0; s < steps_per_relax; ++s) {
      k1 = L * x;
      k2 = L * (x + 0.5 * h * k1);
      k3 = L * (x + 0.5 * h * k2);
      k4 = L * (x + h * k3);
      x += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    if ((x - before).norm() < cfg.solver_tol * std::max(1.0, x.norm())) {
      Eigen::MatrixXcd rho = Eigen::Map<const Eigen::MatrixXcd>(x.data(), dim, dim);
      rho = 0.5 * (rho + rho.adjoint()).eval();
      return rho / rho.trace();
    }
  }
  throw std::runtime_error("master equation did not relax within max_time");
}

Eigen::MatrixXcd steady_state(const SparseMatrix& L, int dim, const FockConfig& cfg,
                              double slowest_rate) {
  if (dim <= kDirectSolveMaxDim) return solve_steady_state(L, dim);
  Eigen::MatrixXcd vacuum = Eigen::MatrixXcd::Zero(dim, dim);
  vacuum(0, 0) = 1.0;
  return integrate_to_steady(L, vacuum, cfg, slowest_rate);
}

double DensityState::hermiticity_error() const {
  return (rho - rho.adjoint()).cwiseAbs().maxCoeff();
}

double DensityState::min_eigenvalue() const {
  const Eigen::MatrixXcd h = 0.5 * (rho + rho.adjoint());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

double DensityState::top_population_cav() const {
  if (n_cav == 1) return 0.0;
  double p = 0.0;
  for (int m = 0; m < n_mech; ++m) {
    const int k = (n_cav - 1) * n_mech + m;
    p += rho(k, k).real();
  }
  return p;
}

double DensityState::top_population_mech() const {
  double p = 0.0;
  for (int c = 0; c < n_cav; ++c) {
    const int k = c * n_mech + n_mech - 1;
    p += rho(k, k).real();
  }
  return p;
}

std::complex<double> DensityState::expect(const SparseMatrix& op) const {
  // Tr(rho op) = sum_{ij} rho_ji op_ij
  cd acc = 0.0;
  for (int col = 0; col < op.outerSize(); ++col) {
    for (SparseMatrix::InnerIterator it(op, col); it; ++it) {
      acc += rho(it.col(), it.row()) * it.value();
    }
  }
  return acc;
}

FullModel full_model(const EffectiveParams& p, const DriveMode& mode, int n_cav,
                     int n_mech) {
  FullModel f;
  f.a = kron(annihilation(n_cav), identity(n_mech));
  f.b = kron(identity(n_cav), annihilation(n_mech));
  const SparseMatrix ad = adjoint(f.a);
  const SparseMatrix bd = adjoint(f.b);
  const cd chi = p.chi;
  const double g = p.g;

  SparseMatrix h = std::conj(chi) * SparseMatrix(f.b * f.b) + chi * SparseMatrix(bd * bd);
  switch (mode.kind()) {
    case DriveMode::Kind::Blue:
      h += g * SparseMatrix(f.a * f.b + ad * bd);
      break;
    case DriveMode::Kind::Red:
      // Sign matches the Langevin equations a' = +i g b, b' = +i g a.
      h -= g * SparseMatrix(ad * f.b + f.a * bd);
      break;
    case DriveMode::Kind::BlueRed: {
      const cd e = std::polar(1.0, mode.psi());
      const SparseMatrix quad = SparseMatrix(f.b * std::conj(e) + bd * e);
      h += g * SparseMatrix((f.a + ad) * quad);
      break;
    }
  }
  f.hamiltonian = h;
  f.dissipators = {{p.gamma * (p.n_m0 + 1.0), f.b},
                   {p.gamma * p.n_m0, bd},
                   {p.mu(), f.a}};
  return f;
}

namespace {

MomentState moments_of(const DensityState& s, const SparseMatrix& a,
                       const SparseMatrix& b) {
  const SparseMatrix ad = adjoint(a);
  const SparseMatrix bd = adjoint(b);
  MomentState m;
  m.a2 = s.expect(a * a);
  m.ada = s.expect(ad * a);
  m.b2 = s.expect(b * b);
  m.bdb = s.expect(bd * b);
  m.ab = s.expect(a * b);
  m.abd = s.expect(a * bd);
  m.adb = s.expect(ad * b);
  m.bd2 = s.expect(bd * bd);
  m.ad2 = s.expect(ad * ad);
  m.adbd = s.expect(ad * bd);
  return m;
}

double slowest_drift_rate(const EffectiveParams& p, const DriveMode& mode) {
  const DriftModel model = build_drift(p, mode);
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(model.drift, false);
  return -es.eigenvalues().real().maxCoeff();
}

// Fock levels needed for the adequacy threshold, from the number-distribution
// tail of a Gaussian state: P(k) ~ r^k with r = s / (s + 1), s = <n> + |<s^2>|.
// At least twice the current truncation.
int escalated_size(int n, const DensityState& state, const SparseMatrix& op) {
  const SparseMatrix dag = adjoint(op);
  const double s = state.expect(dag * op).real() + std::abs(state.expect(op * op));
  int needed = 2 * n;
  if (s > 0.0) {
    const double r = s / (s + 1.0);
    needed = static_cast<int>(std::ceil(1.25 * std::log(0.1 * kTopLevelPopulation) / std::log(r)));
  }
  return std::max(2 * n, needed);
}

DensityState solve_full(const EffectiveParams& p, const DriveMode& mode,
                        const FockConfig& cfg, double slowest, FullModel& model) {
  model = full_model(p, mode, cfg.n_cav, cfg.n_mech);
  const SparseMatrix L = liouvillian(model.hamiltonian, model.dissipators);
  const int dim = cfg.n_cav * cfg.n_mech;
  return {steady_state(L, dim, cfg, slowest), cfg.n_cav, cfg.n_mech};
}

}  // namespace

FullResult full_me_steady(const EffectiveParams& params, const DriveMode& mode,
                          FockConfig cfg) {
  params.validate();
  cfg.validate();
  const double slowest = slowest_drift_rate(params, mode);
  if (!(slowest > stability_epsilon(params))) {
    std::ostringstream os;
    os << "no steady state: drift has an eigenvalue with real part " << -slowest;
    throw NoSteadyState(os.str());
  }

  FullModel model;
  DensityState state = solve_full(params, mode, cfg, slowest, model);
  for (int attempt = 0;; ++attempt) {
    const bool cav_bad = state.top_population_cav() > kTopLevelPopulation;
    const bool mech_bad = state.top_population_mech() > kTopLevelPopulation;
    if (!cav_bad && !mech_bad) break;
    if (attempt > 0 || !cfg.auto_escalate) {
      std::ostringstream os;
      os << "Fock truncation inadequate for the "
         << (cav_bad ? "cavity" : "mechanical") << " mode (top-level population "
         << (cav_bad ? state.top_population_cav() : state.top_population_mech())
         << " with n_cav = " << cfg.n_cav << ", n_mech = " << cfg.n_mech << ")";
      throw TruncationError(os.str());
    }
    if (cav_bad) {
      cfg.n_cav = escalated_size(cfg.n_cav, state, model.a);
    }
    if (mech_bad) {
      cfg.n_mech = escalated_size(cfg.n_mech, state, model.b);
    }
    state = solve_full(params, mode, cfg, slowest, model);
  }
  return {moments_of(state, model.a, model.b), state, cfg};
}

namespace {

DensityState solve_reduced(const EffectiveParams& p, const DriveMode& mode,
                           const FockConfig& cfg, double slowest, SparseMatrix& b) {
  b = annihilation(cfg.n_mech);
  const SparseMatrix bd = adjoint(b);
  const cd chi = p.chi;
  const SparseMatrix h = std::conj(chi) * SparseMatrix(b * b) + chi * SparseMatrix(bd * bd);
  const double Gamma = p.cooling_rate();
  std::vector<Dissipator> diss = {{p.gamma * (p.n_m0 + 1.0), b}, {p.gamma * p.n_m0, bd}};
  switch (mode.kind()) {
    case DriveMode::Kind::Blue:
      diss.push_back({Gamma, bd});
      break;
    case DriveMode::Kind::Red:
      diss.push_back({Gamma, b});
      break;
    case DriveMode::Kind::BlueRed: {
      const cd e = std::polar(1.0, mode.psi());
      diss.push_back({2.0 * Gamma, SparseMatrix(b * std::conj(e) + bd * e)});
      break;
    }
  }
  const SparseMatrix L = liouvillian(h, diss);
  return {steady_state(L, cfg.n_mech, cfg, slowest), 1, cfg.n_mech};
}

}  // namespace

MechanicalResult reduced_me_steady(const EffectiveParams& params,
                                   const DriveMode& mode, FockConfig cfg) {
  params.validate();
  cfg.validate();
  const double eps = adiabatic_epsilon(params);
  if (eps > 0.1) {
    throw std::domain_error("reduced master equation needs max(g, |chi|)/mu <= 0.1");
  }
  const double Gamma = params.cooling_rate();
  const double chi = std::abs(params.chi);
  double damping = 0.0;
  switch (mode.kind()) {
    case DriveMode::Kind::Blue: damping = params.gamma - Gamma; break;
    case DriveMode::Kind::Red: damping = params.gamma + Gamma; break;
    case DriveMode::Kind::BlueRed: damping = params.gamma; break;
  }
  const double slowest = damping / 2.0 - 2.0 * chi;
  if (!(slowest > stability_epsilon(params))) {
    throw NoSteadyState(mode.is_blue() && Gamma >= params.gamma
                            ? "blue-sideband instability: Gamma >= gamma"
                            : "reduced mechanics above parametric threshold");
  }

  SparseMatrix b;
  DensityState state = solve_reduced(params, mode, cfg, slowest, b);
  for (int attempt = 0; state.top_population_mech() > kTopLevelPopulation; ++attempt) {
    if (attempt > 0 || !cfg.auto_escalate) {
      std::ostringstream os;
      os << "Fock truncation inadequate for the mechanical mode (top-level population "
         << state.top_population_mech() << " with n_mech = " << cfg.n_mech << ")";
      throw TruncationError(os.str());
    }
    cfg.n_mech = escalated_size(cfg.n_mech, state, b);
    state = solve_reduced(params, mode, cfg, slowest, b);
  }

  MechanicalResult r;
  const SparseMatrix bd = adjoint(b);
  r.moments.second = state.expect(b * b);
  r.moments.second_dag = state.expect(bd * bd);
  r.moments.number = state.expect(bd * b).real();
  r.squeezing = quadrature_squeezing(r.moments, -pi / 4.0 + std::arg(params.chi) / 2.0);
  r.state = std::move(state);
  r.used = cfg;
  return r;
}

double adiabatic_epsilon(const EffectiveParams& p) {
  return std::max(p.g, std::abs(p.chi)) / p.mu();
}

namespace {

double mechanical_discrepancy(const EffectiveParams& p, const DriveMode& mode,
                              const FockConfig& cfg) {
  const FullResult full = full_me_steady(p, mode, cfg);
  const MechanicalResult red = reduced_me_steady(p, mode, cfg);
  const ModeMoments f = full.moments.mechanics();
  const double scale = std::max({f.number, std::abs(f.second), 1e-300});
  const double dn = std::abs(f.number - red.moments.number);
  const double d2 = std::abs(f.second - red.moments.second);
  return std::max(dn, d2) / scale;
}

}  // namespace

AdiabaticReport adiabatic_consistency(const EffectiveParams& params,
                                      const DriveMode& mode, FockConfig cfg) {
  AdiabaticReport r;
  r.epsilon = adiabatic_epsilon(params);
  if (r.epsilon > 0.1) {
    throw std::domain_error("adiabatic consistency needs max(g, |chi|)/mu <= 0.1");
  }
  EffectiveParams half = params;
  half.g *= 0.5;
  half.chi *= 0.5;
  r.discrepancy = mechanical_discrepancy(params, mode, cfg);
  r.discrepancy_half = mechanical_discrepancy(half, mode, cfg);
  r.improvement = r.discrepancy_half > 0.0 ? r.discrepancy / r.discrepancy_half
                                           : std::numeric_limits<double>::infinity();
  return r;
}

double gaussianity_residual(const DensityState& state) {
  const SparseMatrix a = kron(annihilation(state.n_cav), identity(state.n_mech));
  const SparseMatrix b = kron(identity(state.n_cav), annihilation(state.n_mech));
  const SparseMatrix ad = adjoint(a);
  const SparseMatrix bd = adjoint(b);
  auto e = [&](const SparseMatrix& op) { return state.expect(op); };

  double worst = 0.0;
  for (const auto* pair : {&a, &b}) {
    const SparseMatrix& s = *pair;
    const SparseMatrix sd = adjoint(s);
    const cd n = e(sd * s);
    const cd s2 = e(s * s);
    const cd sd2 = e(sd * sd);
    // <s+^2 s^2> = <s+^2><s^2> + 2 <s+ s>^2 ;  <s^4> = 3 <s^2>^2
    worst = std::max(worst, std::abs(e(sd * sd * s * s) - (sd2 * s2 + 2.0 * n * n)));
    worst = std::max(worst, std::abs(e(s * s * s * s) - 3.0 * s2 * s2));
  }
  // <a+ b+ a b> = <a+ b+><a b> + <a+ a><b+ b> + <a+ b><b+ a>
  const cd lhs = e(ad * bd * a * b);
  const cd rhs = e(ad * bd) * e(a * b) + e(ad * a) * e(bd * b) + e(ad * b) * e(bd * a);
  worst = std::max(worst, std::abs(lhs - rhs));
  return worst;
}

}  // namespace nanosqueeze::fock

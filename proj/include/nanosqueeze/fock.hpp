#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "nanosqueeze/model.hpp"
#include "nanosqueeze/steadystate.hpp"

namespace nanosqueeze::fock {

using SparseMatrix = Eigen::SparseMatrix<std::complex<double>>;

struct FockConfig {
  int n_cav = 6;
  int n_mech = 12;
  double solver_tol = 1e-9;
  // Integration horizon in units of the slowest relaxation time, used only
  // when the Hilbert space is too large for a direct solve.
  double max_time = 200.0;
  bool auto_escalate = true;

  void validate() const;
};

// Largest Hilbert-space dimension solved directly; larger problems integrate.
inline constexpr int kDirectSolveMaxDim = 400;
// Steady-state population allowed on the top Fock level of each mode.
inline constexpr double kTopLevelPopulation = 1e-6;

/// Thrown when the highest Fock level carries too much population.
class TruncationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct DensityState {
  Eigen::MatrixXcd rho;
  int n_cav = 1;
  int n_mech = 1;

  std::complex<double> trace() const { return rho.trace(); }
  double hermiticity_error() const;
  double min_eigenvalue() const;
  /// Zero for a mechanics-only state (n_cav = 1).
  double top_population_cav() const;
  double top_population_mech() const;
  /// <op> = Tr(rho op).
  std::complex<double> expect(const SparseMatrix& op) const;
};

/// a (dimension n) in the number basis.
SparseMatrix annihilation(int n);
SparseMatrix identity(int n);

/// Column-stacked Liouvillian L with vec(rho') = L vec(rho) for
///   rho' = -i[H, rho] + sum_k rate_k D[c_k] rho,
///   D[c] rho = c rho c+ - (c+ c rho + rho c+ c) / 2.
struct Dissipator {
  double rate;
  SparseMatrix op;
};
SparseMatrix liouvillian(const SparseMatrix& hamiltonian,
                         const std::vector<Dissipator>& dissipators);

/// Null vector of L normalised to unit trace (direct sparse solve with the
/// trace condition replacing one equation).
Eigen::MatrixXcd solve_steady_state(const SparseMatrix& L, int dim);

/// RK4 relaxation from rho0 until the state changes by less than
/// solver_tol per relaxation time 1/slowest_rate. Throws std::runtime_error
/// if max_time relaxation times pass first.
Eigen::MatrixXcd integrate_to_steady(const SparseMatrix& L,
                                     const Eigen::MatrixXcd& rho0,
                                     const FockConfig& cfg, double slowest_rate);

/// Direct solve up to kDirectSolveMaxDim, integration from vacuum above.
Eigen::MatrixXcd steady_state(const SparseMatrix& L, int dim,
                              const FockConfig& cfg, double slowest_rate);

/// Hamiltonian and dissipators of the cavity + mechanics master equation,
/// with the cavity as the first tensor factor.
struct FullModel {
  SparseMatrix hamiltonian;
  std::vector<Dissipator> dissipators;
  SparseMatrix a;
  SparseMatrix b;
};
FullModel full_model(const EffectiveParams& params, const DriveMode& mode,
                     int n_cav, int n_mech);

struct FullResult {
  MomentState moments;
  DensityState state;
  FockConfig used;
};

/// Cavity + mechanics master equation with the mode's effective Hamiltonian.
FullResult full_me_steady(const EffectiveParams& params, const DriveMode& mode,
                          FockConfig cfg = {});

struct MechanicalResult {
  ModeMoments moments;
  QuadratureSqueezing squeezing;   // at phi = -pi/4 + arg(chi)/2
  DensityState state;
  FockConfig used;
};

/// Mechanics-only master equation after adiabatic elimination of the cavity.
MechanicalResult reduced_me_steady(const EffectiveParams& params,
                                   const DriveMode& mode, FockConfig cfg = {});

struct AdiabaticReport {
  double epsilon = 0.0;
  double discrepancy = 0.0;        // at epsilon
  double discrepancy_half = 0.0;   // at epsilon / 2 (g and chi halved)
  double improvement = 0.0;        // discrepancy / discrepancy_half
};

/// max(g, |chi|) / mu.
double adiabatic_epsilon(const EffectiveParams& params);

/// Relative disagreement of the mechanical moments between the full and
/// reduced master equations, at the given parameters and with g, chi halved.
AdiabaticReport adiabatic_consistency(const EffectiveParams& params,
                                      const DriveMode& mode, FockConfig cfg = {});

/// Largest deviation of <b+^2 b^2>, <b+ b b+ b>-style fourth moments from
/// their Wick factorisation, for both modes.
double gaussianity_residual(const DensityState& state);

}  // namespace nanosqueeze::fock

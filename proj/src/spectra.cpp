#include "nanosqueeze/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "nanosqueeze/constants.hpp"
#include "nanosqueeze/parallel.hpp"
#include "nanosqueeze/steadystate.hpp"

namespace nanosqueeze {

using cd = std::complex<double>;
using std::numbers::pi;

SpectrumGrid SpectrumGrid::symmetric(double half_span, int points) {
  if (!(half_span > 0.0)) throw std::invalid_argument("grid span must be positive");
  if (points < 3 || points % 2 == 0) {
    throw std::invalid_argument("symmetric grid needs an odd number (>= 3) of points");
  }
  SpectrumGrid g;
  g.omega.resize(points);
  const int half = points / 2;
  for (int k = 0; k < points; ++k) {
    g.omega[k] = half_span * static_cast<double>(k - half) / half;
  }
  g.omega[half] = 0.0;
  return g;
}

SpectrumGrid SpectrumGrid::default_for(const DriftModel& model) {
  const EffectiveParams& p = model.params;
  const double scale =
      std::max({p.mu(), p.gamma + 4.0 * std::abs(p.chi), 2.0 * p.g});
  const double half_span = kDefaultGridSpanFactor * scale;
  const double slowest = -max_real_eigenvalue(model);
  int points = kDefaultGridPoints;
  if (slowest > 0.0) {
    const double wanted = 2.0 * half_span / (0.25 * slowest) + 1.0;
    if (wanted > points) {
      points = static_cast<int>(std::min<double>(wanted, kMaxDefaultGridPoints));
      if (points % 2 == 0) ++points;
    }
  }
  return symmetric(half_span, points);
}

void SpectrumGrid::validate() const {
  if (omega.size() < 2) throw std::invalid_argument("grid needs at least two points");
  bool has_zero = false;
  for (std::size_t k = 0; k < omega.size(); ++k) {
    if (k > 0 && !(omega[k] > omega[k - 1])) {
      throw std::invalid_argument("grid must be strictly increasing");
    }
    if (omega[k] == 0.0) has_zero = true;
  }
  if (!has_zero) throw std::invalid_argument("grid must contain omega = 0");
}

Eigen::MatrixXcd transfer_matrix(const DriftModel& model, double omega) {
  const Eigen::FullPivLU<Matrix4cd> lu(model.dynamical(omega));
  if (!lu.isInvertible() || lu.rcond() < 1e-14) {
    std::ostringstream os;
    os << "A(omega) is singular at omega = " << omega;
    throw NoSteadyState(os.str());
  }
  const Eigen::MatrixXcd coupling = model.input_coupling.cast<cd>();
  Eigen::MatrixXcd t = -(model.damping.cast<cd>() * lu.solve(coupling));
  t.leftCols(4) -= Eigen::Matrix4cd::Identity();
  return t;
}

OutputMoments output_moments(const DriftModel& model, double omega) {
  const Eigen::MatrixXcd tp = transfer_matrix(model, omega);
  const Eigen::MatrixXcd tm = transfer_matrix(model, -omega);
  const Eigen::MatrixXcd c = model.input_corr.cast<cd>();
  OutputMoments m;
  m.aa = (tp.row(0) * c * tm.row(0).transpose())(0, 0);
  m.adad = (tp.row(1) * c * tm.row(1).transpose())(0, 0);
  m.ada = (tp.row(1) * c * tm.row(0).transpose())(0, 0);
  return m;
}

namespace {

struct QuadraturePair {
  cd x;
  cd y;
};

QuadraturePair quadratures_at(const DriftModel& model, double theta, double omega) {
  const OutputMoments m = output_moments(model, omega);
  const cd rot = std::polar(1.0, -2.0 * theta);
  const cd phase = rot * m.aa + std::conj(rot) * m.adad;
  return {phase + 2.0 * m.ada, -phase + 2.0 * m.ada};
}

void require_stable(const DriftModel& model) {
  const double re = max_real_eigenvalue(model);
  if (!(re < -stability_epsilon(model.params))) {
    std::ostringstream os;
    os << "model is unstable (max Re eigenvalue " << re << ")";
    throw NoSteadyState(os.str());
  }
}

}  // namespace

SpectrumResult output_spectrum(const DriftModel& model, double theta,
                               const SpectrumGrid& grid) {
  grid.validate();
  require_stable(model);
  SpectrumResult r;
  r.grid = grid;
  r.theta = theta;
  r.mode = model.mode;
  r.params = model.params;
  const std::size_t n = grid.size();
  r.S_squeezed.resize(n);
  r.S_antisqueezed.resize(n);
  std::vector<double> residue(n);
  parallel_for(n, [&](std::size_t k) {
    const QuadraturePair q = quadratures_at(model, theta, grid.omega[k]);
    r.S_squeezed[k] = q.x.real();
    r.S_antisqueezed[k] = q.y.real();
    const double size = std::max({1.0, std::abs(q.x.real()), std::abs(q.y.real())});
    residue[k] = std::max(std::abs(q.x.imag()), std::abs(q.y.imag())) / size;
  });
  r.max_imag_residue = *std::max_element(residue.begin(), residue.end());
  if (r.max_imag_residue > kSpectrumImagTol) {
    std::ostringstream os;
    os << "spectrum has imaginary residue " << r.max_imag_residue;
    throw std::runtime_error(os.str());
  }
  return r;
}

ClosedFormSpectrum closed_form_spectrum(const EffectiveParams& p,
                                        const DriveMode& mode, double omega) {
  p.validate();
  if (p.n_m0 != 0.0) {
    throw std::domain_error("closed-form spectra are zero-temperature only");
  }
  if (std::abs(p.chi.imag()) > 1e-14 * std::max(1.0, std::abs(p.chi))) {
    throw std::domain_error("closed-form spectra require real chi");
  }
  const StabilityReport s = stability(p, mode);
  if (!s.analytic_pass) throw NoSteadyState("above threshold: " + s.violated());

  const double chi = p.chi.real();
  const double mu = p.mu();
  const double gm = p.gamma;
  const double g2 = p.g * p.g;
  const double w2 = omega * omega;
  const double w4 = w2 * w2;
  ClosedFormSpectrum r;
  switch (mode.kind()) {
    case DriveMode::Kind::Blue: {
      const double c0 = 4.0 * g2 - gm * mu + 4.0 * mu * chi;
      const double c1 = 8.0 * g2 + mu * mu + (gm - 4.0 * chi) * (gm - 4.0 * chi);
      r.squeezed = 32.0 * g2 * mu * (gm - 2.0 * chi) / (c0 * c0 + 4.0 * c1 * w2 + 16.0 * w4);
      break;
    }
    case DriveMode::Kind::Red: {
      const double c0 = 4.0 * g2 + gm * mu + 4.0 * mu * chi;
      const double c1 = -8.0 * g2 + mu * mu + (gm + 4.0 * chi) * (gm + 4.0 * chi);
      r.squeezed = -64.0 * g2 * mu * chi / (c0 * c0 + 4.0 * c1 * w2 + 16.0 * w4);
      break;
    }
    case DriveMode::Kind::BlueRed: {
      if (std::abs(std::remainder(mode.psi() - pi / 4.0, pi)) > 1e-12) {
        throw std::domain_error("two-tone closed form assumes psi = pi/4");
      }
      const double gc = gm + 4.0 * chi;
      r.squeezed = 0.0;
      r.antisqueezed = 64.0 * g2 * gm * mu / ((mu * mu + 4.0 * w2) * (gc * gc + 4.0 * w2));
      break;
    }
  }
  return r;
}

SpectrumResult amplifier_noise(const SpectrumResult& spec, double gain,
                               double added_noise) {
  if (!(gain >= 1.0)) throw std::domain_error("amplifier gain must be >= 1");
  if (!(added_noise >= 0.0)) throw std::domain_error("amplifier noise must be >= 0");
  SpectrumResult r = spec;
  const double floor = 2.0 * (gain - 1.0) * (added_noise + 1.0);
  for (auto& s : r.S_squeezed) s = gain * s + floor;
  for (auto& s : r.S_antisqueezed) s = gain * s + floor;
  for (auto& e : r.S_squeezed_stderr) e *= gain;
  const double prev_gain = spec.amplifier ? spec.amplifier->gain : 1.0;
  r.amplifier = Amplifier{prev_gain * gain, added_noise};
  return r;
}

double integrate_spectrum(const SpectrumResult& spec) {
  spec.grid.validate();
  if (spec.amplifier && spec.amplifier->gain != 1.0) {
    throw std::domain_error("cannot integrate an amplified spectrum (flat noise floor)");
  }
  const auto& w = spec.grid.omega;
  const auto& s = spec.S_squeezed;
  double body = 0.0;
  double body_abs = 0.0;
  for (std::size_t k = 1; k < w.size(); ++k) {
    const double h = w[k] - w[k - 1];
    body += 0.5 * h * (s[k] + s[k - 1]);
    body_abs += 0.5 * h * (std::abs(s[k]) + std::abs(s[k - 1]));
  }
  // S ~ c / w^4 beyond the grid: integral_{|w0|}^inf = S(w0) |w0| / 3.
  const double tail_lo = s.front() * std::abs(w.front()) / 3.0;
  const double tail_hi = s.back() * std::abs(w.back()) / 3.0;
  const double tail = tail_lo + tail_hi;
  if (body_abs > 0.0) {
    const double frac = (std::abs(tail_lo) + std::abs(tail_hi)) / body_abs;
    if (frac > kMaxTailFraction) {
      const double span = std::max(std::abs(w.front()), std::abs(w.back()));
      const double needed = span * std::cbrt(frac / kMaxTailFraction);
      std::ostringstream os;
      os << "grid span too narrow: tail is " << frac
         << " of the integral; need |omega| up to about " << needed << " rad/s";
      throw std::invalid_argument(os.str());
    }
  }
  return kSpectrumIntegralNorm / spec.params.mu_ext * (body + tail);
}

namespace {

double squeezed_at(const DriftModel& model, double theta, double omega) {
  return quadratures_at(model, theta, omega).x.real();
}

double golden_min(const DriftModel& model, double theta, double lo, double hi,
                  double tol) {
  const double r = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = hi - r * (hi - lo);
  double x2 = lo + r * (hi - lo);
  double f1 = squeezed_at(model, theta, x1);
  double f2 = squeezed_at(model, theta, x2);
  while (hi - lo > tol) {
    if (f1 < f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - r * (hi - lo);
      f1 = squeezed_at(model, theta, x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + r * (hi - lo);
      f2 = squeezed_at(model, theta, x2);
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

NormalModeReport detect_normal_mode_splitting(const EffectiveParams& p) {
  p.validate();
  if (std::abs(p.chi.imag()) > 1e-14 * std::max(1.0, std::abs(p.chi))) {
    throw std::domain_error("splitting detection assumes real chi");
  }
  const double chi = p.chi.real();
  const double mu = p.mu();
  NormalModeReport r;
  r.lhs = 8.0 * p.g * p.g;
  r.rhs = mu * mu + (p.gamma + 4.0 * chi) * (p.gamma + 4.0 * chi);
  r.asymptote = p.g;
  r.marginal = std::abs(r.lhs - r.rhs) <= 1e-9 * r.rhs;
  r.split = r.lhs > r.rhs && !r.marginal;
  if (!r.split) return r;

  const DriftModel model = build_drift(p, DriveMode::red());
  require_stable(model);
  const double theta = optimal_phases(DriveMode::red(), 0.0).theta;
  const double w_max = 3.0 * std::max(p.g, mu);
  constexpr int kScan = 4000;
  const double h = w_max / kScan;
  std::vector<double> s(kScan + 1);
  for (int k = 0; k <= kScan; ++k) s[k] = squeezed_at(model, theta, k * h);
  for (int k = 1; k < kScan; ++k) {
    if (s[k] < s[k - 1] && s[k] <= s[k + 1]) {
      const double w = golden_min(model, theta, (k - 1) * h, (k + 1) * h, 1e-4 * p.g);
      r.found_minima.push_back(-w);
      r.found_minima.push_back(w);
    }
  }
  std::sort(r.found_minima.begin(), r.found_minima.end());
  return r;
}

}  // namespace nanosqueeze

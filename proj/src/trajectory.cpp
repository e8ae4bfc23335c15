#include "nanosqueeze/trajectory.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>

#include <unsupported/Eigen/FFT>

#include "nanosqueeze/parallel.hpp"
#include "nanosqueeze/steadystate.hpp"

namespace nanosqueeze {

using cd = std::complex<double>;

namespace {

double rate_scale(const EffectiveParams& p) {
  return std::max({p.mu(), p.gamma + 4.0 * std::abs(p.chi), 2.0 * p.g});
}

double slowest_rate(const DriftModel& model) {
  Eigen::ComplexEigenSolver<Matrix4cd> es(model.drift, false);
  return -es.eigenvalues().real().maxCoeff();
}

// Quadrature transform for one mode: (s, s+) -> (s + s+, -i (s - s+)).
Eigen::MatrixXcd quadrature_transform(int modes) {
  Eigen::MatrixXcd u = Eigen::MatrixXcd::Zero(2 * modes, 2 * modes);
  const cd i(0.0, 1.0);
  for (int m = 0; m < modes; ++m) {
    u(2 * m, 2 * m) = 1.0;
    u(2 * m, 2 * m + 1) = 1.0;
    u(2 * m + 1, 2 * m) = -i;
    u(2 * m + 1, 2 * m + 1) = i;
  }
  return u;
}

Eigen::MatrixXd real_part_checked(const Eigen::MatrixXcd& m, const char* what) {
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  if (m.imag().cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw std::logic_error(std::string("quadrature ") + what + " is not real");
  }
  return m.real();
}

std::mt19937_64 stream_engine(std::uint64_t seed, int stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream)};
  return std::mt19937_64(seq);
}

long steps_for(double seconds, double dt) {
  return static_cast<long>(std::llround(seconds / dt));
}

long stream_points(const TrajectoryConfig& cfg) {
  return steps_for(cfg.duration / cfg.n_streams, cfg.dt);
}

// Runs one stream through burn-in and then calls record(step, x_old, x_new,
// input_increment) for each retained step.
template <typename Record>
void integrate_stream(const QuadratureModel& q, const TrajectoryConfig& cfg, int stream,
                      long points, Record&& record) {
  std::mt19937_64 engine = stream_engine(cfg.seed, stream);
  std::normal_distribution<double> normal;
  const int n_in = static_cast<int>(q.coupling.cols());
  const double sqrt_dt = std::sqrt(cfg.dt);
  const Eigen::Matrix4d step = Eigen::Matrix4d::Identity() + cfg.dt * q.drift;
  const Eigen::MatrixXd kick = q.coupling * q.noise_chol;

  Eigen::Vector4d x = Eigen::Vector4d::Zero();
  Eigen::VectorXd zeta(n_in);
  Eigen::VectorXd dw(n_in);
  const long burn = steps_for(cfg.burn_in, cfg.dt);
  for (long k = 0; k < burn + points; ++k) {
    for (int j = 0; j < n_in; ++j) zeta(j) = normal(engine);
    dw.noalias() = sqrt_dt * (q.noise_chol * zeta);
    const Eigen::Vector4d next = step * x + sqrt_dt * (kick * zeta);
    if (k >= burn) record(k - burn, x, next, dw);
    x = next;
  }
}

}  // namespace

long TrajectoryConfig::segment_points() const {
  const int per_stream = segments_per_stream();
  if (per_stream < 1 || dt <= 0.0) return 0;
  const long points = steps_for(duration / n_streams, dt);
  return 2 * points / (per_stream + 1);
}

TrajectoryConfig default_trajectory_config(const DriftModel& model) {
  const double slow = slowest_rate(model);
  if (!(slow > 0.0)) throw NoSteadyState("trajectory needs a stable model");
  TrajectoryConfig cfg;
  cfg.dt = 0.02 / rate_scale(model.params);
  // Frequency resolution 2 pi / (L dt) of one eighth of the slowest rate.
  const double wanted = 8.0 * 2.0 * std::numbers::pi / (slow * cfg.dt);
  const long len = static_cast<long>(std::bit_ceil(static_cast<unsigned long>(std::ceil(wanted))));
  cfg.duration = cfg.n_streams * (cfg.segments_per_stream() + 1) * (len / 2) * cfg.dt;
  cfg.burn_in = 50.0 / slow;
  return cfg;
}

void validate(const TrajectoryConfig& cfg, const DriftModel& model) {
  const double scale = rate_scale(model.params);
  if (!(cfg.dt > 0.0) || !(cfg.dt < 0.05 / scale)) {
    std::ostringstream os;
    os << "dt must satisfy 0 < dt < 0.05 / max(mu, gamma + 4|chi|, 2g) = " << 0.05 / scale;
    throw std::invalid_argument(os.str());
  }
  if (cfg.n_streams < 1 || cfg.n_segments < cfg.n_streams || cfg.n_segments % cfg.n_streams != 0) {
    throw std::invalid_argument("n_segments must be a positive multiple of n_streams");
  }
  if (!(cfg.burn_in >= 0.0)) throw std::invalid_argument("burn_in must be non-negative");
  const double slow = slowest_rate(model);
  if (!(slow > stability_epsilon(model.params))) {
    throw NoSteadyState("trajectory needs a stable model");
  }
  if (!(cfg.duration >= 50.0 / slow)) {
    std::ostringstream os;
    os << "duration must be at least 50 relaxation times (" << 50.0 / slow << " s)";
    throw std::invalid_argument(os.str());
  }
  if (cfg.segment_points() < 16) {
    throw std::invalid_argument("duration too short for 16-point Welch segments");
  }
}

QuadratureModel quadrature_model(const DriftModel& model) {
  const int n_in = model.input_dim();
  const Eigen::MatrixXcd u = quadrature_transform(2);
  const Eigen::MatrixXcd u_in = quadrature_transform(n_in / 2);
  const Eigen::MatrixXcd u_inv = u.inverse();
  const Eigen::MatrixXcd u_in_inv = u_in.inverse();

  QuadratureModel q;
  q.drift = real_part_checked(u * model.drift * u_inv, "drift");
  q.coupling = real_part_checked(u * model.input_coupling.cast<cd>() * u_in_inv, "coupling");
  const Eigen::MatrixXcd c = u_in * model.input_corr.cast<cd>() * u_in.transpose();
  const Eigen::MatrixXd sym = real_part_checked(0.5 * (c + c.transpose()), "input covariance");
  const Eigen::LLT<Eigen::MatrixXd> llt(sym);
  if (llt.info() != Eigen::Success) {
    throw std::logic_error("symmetric input covariance is not positive definite");
  }
  q.noise_chol = llt.matrixL();
  q.sqrt_mu_ext = std::sqrt(model.params.mu_ext);
  return q;
}

OutputSeries simulate_output(const DriftModel& model, double theta,
                             const TrajectoryConfig& cfg) {
  validate(cfg, model);
  const QuadratureModel q = quadrature_model(model);
  const long points = stream_points(cfg);
  const double c = std::cos(theta);
  const double s = std::sin(theta);

  OutputSeries out;
  out.dt = cfg.dt;
  out.theta = theta;
  out.mode = model.mode;
  out.params = model.params;
  out.x_out.assign(cfg.n_streams, {});
  out.y_out.assign(cfg.n_streams, {});
  parallel_for(static_cast<std::size_t>(cfg.n_streams), [&](std::size_t stream) {
    auto& xs = out.x_out[stream];
    auto& ys = out.y_out[stream];
    xs.resize(points);
    ys.resize(points);
    integrate_stream(q, cfg, static_cast<int>(stream), points,
                     [&](long k, const Eigen::Vector4d& x0, const Eigen::Vector4d& x1,
                         const Eigen::VectorXd& dw) {
                       // Midpoint intracavity value against the increment that drove it.
                       const double y0 = q.sqrt_mu_ext * 0.5 * (x0(0) + x1(0)) - dw(0) / cfg.dt;
                       const double y1 = q.sqrt_mu_ext * 0.5 * (x0(1) + x1(1)) - dw(1) / cfg.dt;
                       xs[k] = c * y0 + s * y1;
                       ys[k] = -s * y0 + c * y1;
                     });
  });
  return out;
}

namespace {

struct WelchSums {
  Eigen::ArrayXd sum_x, sum_x2, sum_y;
  long count = 0;
};

WelchSums welch_stream(const std::vector<double>& xs, const std::vector<double>& ys,
                       long len, int segments, double dt) {
  const long bins = len / 2 + 1;
  Eigen::ArrayXd window(len);
  for (long k = 0; k < len; ++k) {
    window(k) = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * k / len);
  }
  const double norm = dt / window.square().sum();

  WelchSums w{Eigen::ArrayXd::Zero(bins), Eigen::ArrayXd::Zero(bins), Eigen::ArrayXd::Zero(bins), 0};
  Eigen::FFT<double> fft;
  fft.SetFlag(Eigen::FFT<double>::HalfSpectrum);
  std::vector<double> buf(len);
  std::vector<cd> spec;
  auto periodogram = [&](const std::vector<double>& series, long start) {
    for (long k = 0; k < len; ++k) buf[k] = window(k) * series[start + k];
    fft.fwd(spec, buf);
    Eigen::ArrayXd p(bins);
    for (long k = 0; k < bins; ++k) p(k) = norm * std::norm(spec[k]);
    return p;
  };
  for (int seg = 0; seg < segments; ++seg) {
    const long start = seg * (len / 2);
    const Eigen::ArrayXd px = periodogram(xs, start);
    w.sum_x += px;
    w.sum_x2 += px.square();
    w.sum_y += periodogram(ys, start);
    ++w.count;
  }
  return w;
}

}  // namespace

SpectrumResult estimate_spectrum(const OutputSeries& series, const TrajectoryConfig& cfg) {
  const long len = cfg.segment_points();
  const int per_stream = cfg.segments_per_stream();
  if (series.x_out.size() != static_cast<std::size_t>(cfg.n_streams) || len < 16) {
    throw std::invalid_argument("series does not match the trajectory configuration");
  }
  const long needed = (per_stream + 1) * (len / 2);
  for (const auto& xs : series.x_out) {
    if (static_cast<long>(xs.size()) < needed) {
      std::ostringstream os;
      os << "insufficient data: need " << needed << " samples per stream ("
         << cfg.n_streams * needed * cfg.dt << " s in total)";
      throw std::invalid_argument(os.str());
    }
  }

  std::vector<WelchSums> parts(cfg.n_streams);
  parallel_for(parts.size(), [&](std::size_t s) {
    parts[s] = welch_stream(series.x_out[s], series.y_out[s], len, per_stream, cfg.dt);
  });
  WelchSums total = parts.front();
  for (std::size_t s = 1; s < parts.size(); ++s) {
    total.sum_x += parts[s].sum_x;
    total.sum_x2 += parts[s].sum_x2;
    total.sum_y += parts[s].sum_y;
    total.count += parts[s].count;
  }

  const double k = static_cast<double>(total.count);
  const Eigen::ArrayXd mean_x = total.sum_x / k;
  const Eigen::ArrayXd var_x = ((total.sum_x2 - k * mean_x.square()) / (k - 1.0)).max(0.0);
  const Eigen::ArrayXd mean_y = total.sum_y / k;

  SpectrumResult r;
  r.theta = series.theta;
  r.mode = series.mode;
  r.params = series.params;
  const long bins = len / 2 + 1;
  r.grid.omega.resize(bins);
  r.S_squeezed.resize(bins);
  r.S_antisqueezed.resize(bins);
  r.S_squeezed_stderr.resize(bins);
  const double d_omega = 2.0 * std::numbers::pi / (len * cfg.dt);
  for (long b = 0; b < bins; ++b) {
    r.grid.omega[b] = b * d_omega;
    r.S_squeezed[b] = mean_x(b) - kVacuumFloor;
    r.S_antisqueezed[b] = mean_y(b) - kVacuumFloor;
    r.S_squeezed_stderr[b] = std::sqrt(var_x(b) / k);
  }
  return r;
}

std::vector<double> symmetrized_spectrum(const DriftModel& model, double theta,
                                         const std::vector<double>& omega) {
  SpectrumGrid full;
  for (auto it = omega.rbegin(); it != omega.rend(); ++it) {
    if (*it > 0.0) full.omega.push_back(-*it);
  }
  const std::size_t negatives = full.omega.size();
  full.omega.insert(full.omega.end(), omega.begin(), omega.end());
  const SpectrumResult s = output_spectrum(model, theta, full);
  std::vector<double> out(omega.size());
  for (std::size_t k = 0; k < omega.size(); ++k) {
    const double plus = s.S_squeezed[negatives + k];
    out[k] = omega[k] > 0.0 ? 0.5 * (plus + s.S_squeezed[negatives - k]) : plus;
  }
  return out;
}

SpectrumComparison compare_to_analytic(const SpectrumResult& estimate,
                                       const DriftModel& model, double omega_max) {
  SpectrumComparison c;
  c.analytic = symmetrized_spectrum(model, estimate.theta, estimate.grid.omega);
  long within = 0;
  for (std::size_t b = 0; b < estimate.grid.size(); ++b) {
    if (estimate.grid.omega[b] > omega_max) break;
    const double dev =
        std::abs(estimate.S_squeezed[b] - c.analytic[b]) / estimate.S_squeezed_stderr[b];
    c.max_deviation_sigma = std::max(c.max_deviation_sigma, dev);
    if (dev < 3.0) ++within;
    ++c.bins;
  }
  if (c.bins == 0) throw std::invalid_argument("omega_max below the first frequency bin");
  c.fraction_within_3sigma = static_cast<double>(within) / c.bins;
  return c;
}

Calibration calibrate_vacuum_floor(double mu, const TrajectoryConfig& cfg, double omega_max) {
  EffectiveParams p;
  p.mu_ext = mu;
  p.gamma = mu;
  const DriftModel model = build_drift(p, DriveMode::red());
  const OutputSeries series = simulate_output(model, 0.0, cfg);
  Calibration cal;
  cal.raw = estimate_spectrum(series, cfg);
  long n = 0;
  long within = 0;
  for (std::size_t b = 0; b < cal.raw.grid.size(); ++b) {
    cal.raw.S_squeezed[b] += kVacuumFloor;
    cal.raw.S_antisqueezed[b] += kVacuumFloor;
    if (cal.raw.grid.omega[b] > omega_max) continue;
    const double dev = std::abs(cal.raw.S_squeezed[b] - kVacuumFloor) / cal.raw.S_squeezed_stderr[b];
    cal.max_bin_deviation_sigma = std::max(cal.max_bin_deviation_sigma, dev);
    if (dev < 3.0) ++within;
    ++n;
  }
  if (n == 0) throw std::invalid_argument("omega_max below the first frequency bin");
  cal.fraction_within_3sigma = static_cast<double>(within) / n;

  // Band level per stream; streams are independent, bins and overlapping
  // segments are not.
  TrajectoryConfig single = cfg;
  single.n_streams = 1;
  single.n_segments = cfg.segments_per_stream();
  single.duration = cfg.duration / cfg.n_streams;
  std::vector<double> levels(cfg.n_streams);
  for (int s = 0; s < cfg.n_streams; ++s) {
    OutputSeries one = series;
    one.x_out = {series.x_out[s]};
    one.y_out = {series.y_out[s]};
    const SpectrumResult r = estimate_spectrum(one, single);
    double sum = 0.0;
    long count = 0;
    for (std::size_t b = 0; b < r.grid.size() && r.grid.omega[b] <= omega_max; ++b) {
      sum += r.S_squeezed[b] + kVacuumFloor;
      ++count;
    }
    levels[s] = sum / count;
  }
  double mean = 0.0;
  for (double l : levels) mean += l;
  mean /= levels.size();
  double var = 0.0;
  for (double l : levels) var += (l - mean) * (l - mean);
  const double k = static_cast<double>(levels.size());
  cal.floor = mean;
  cal.stderr_floor = k > 1.0 ? std::sqrt(var / (k - 1.0) / k) : 0.0;
  return cal;
}

CovarianceEstimate simulate_covariance(const DriftModel& model, const TrajectoryConfig& cfg) {
  validate(cfg, model);
  const QuadratureModel q = quadrature_model(model);
  const long points = stream_points(cfg);
  std::vector<Eigen::Matrix4d> batch(cfg.n_streams, Eigen::Matrix4d::Zero());
  parallel_for(batch.size(), [&](std::size_t stream) {
    Eigen::Matrix4d acc = Eigen::Matrix4d::Zero();
    integrate_stream(q, cfg, static_cast<int>(stream), points,
                     [&](long, const Eigen::Vector4d&, const Eigen::Vector4d& x1,
                         const Eigen::VectorXd&) { acc.noalias() += x1 * x1.transpose(); });
    batch[stream] = acc / static_cast<double>(points);
  });
  CovarianceEstimate est;
  est.mean = Eigen::Matrix4d::Zero();
  for (const auto& b : batch) est.mean += b;
  est.mean /= batch.size();
  Eigen::Matrix4d var = Eigen::Matrix4d::Zero();
  for (const auto& b : batch) var += (b - est.mean).cwiseAbs2();
  const double n = static_cast<double>(batch.size());
  est.stderr_ = (var / (n - 1.0) / n).cwiseSqrt();
  return est;
}

}  // namespace nanosqueeze

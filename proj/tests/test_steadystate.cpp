#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>
#include <random>

#include "nanosqueeze/steadystate.hpp"

using namespace nanosqueeze;
using doctest::Approx;
using cd = std::complex<double>;

namespace {

constexpr double kPi = std::numbers::pi;

EffectiveParams base(double g, cd chi, double n = 0.0) {
  EffectiveParams p;
  p.mu_ext = 1.0;
  p.gamma = 0.003334;
  p.g = g;
  p.chi = chi;
  p.n_m0 = n;
  return p;
}

MomentState moments(const EffectiveParams& p, const DriveMode& mode) {
  return solve_steady_moments(build_drift(p, mode)).moments;
}

double S_Ym(const EffectiveParams& p, const DriveMode& mode, double phi = -kPi / 4.0) {
  return quadrature_squeezing(moments(p, mode).mechanics(), phi).S_Y;
}

// Random stable zero- or finite-temperature point with real chi.
EffectiveParams random_point(std::mt19937_64& rng, const DriveMode& mode) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  EffectiveParams p;
  p.mu_ext = std::pow(10.0, 4.0 + 2.0 * u(rng));
  p.gamma = p.mu_ext * std::pow(10.0, -4.0 + 2.5 * u(rng));
  const double g_max = mode.is_blue() ? 0.95 * std::sqrt(p.gamma * p.mu() / 4.0) : 0.5 * p.mu();
  p.g = g_max * u(rng);
  p.n_m0 = 4.0 * u(rng);
  p.chi = 0.98 * u(rng) * chi_threshold(p, mode);
  return p;
}

}  // namespace

TEST_CASE("vacuum and thermal fixed points") {
  for (const auto& mode : {DriveMode::blue(), DriveMode::red(), DriveMode::blue_red(kPi / 4.0)}) {
    const MomentState vac = moments(base(0.0, 0.0), mode);
    CHECK(vac.matrix().cwiseAbs().maxCoeff() <= 1.0);
    CHECK(std::abs(vac.bdb) < 1e-15);
    CHECK(std::abs(vac.ada) < 1e-15);
    CHECK(std::abs(vac.b2) < 1e-15);

    const MomentState hot = moments(base(0.0, 0.0, 3.0), mode);
    CHECK(hot.bdb.real() == Approx(3.0).epsilon(1e-13));
    CHECK(std::abs(hot.b2) < 1e-13);
    CHECK(std::abs(hot.ada) < 1e-13);
    CHECK(std::abs(hot.ab) + std::abs(hot.abd) < 1e-13);
  }
}

TEST_CASE("quadrature variances by direct substitution") {
  const ModeMoments vac{};
  for (double phi : {-1.0, 0.0, 0.4}) {
    CHECK(quadrature_squeezing(vac, phi).S_X == 0.0);
    CHECK(quadrature_squeezing(vac, phi).S_Y == 0.0);
    const QuadratureSqueezing th = quadrature_squeezing(ModeMoments{0.0, 0.0, 1.7}, phi);
    CHECK(th.S_X == Approx(3.4));
    CHECK(th.S_Y == Approx(3.4));
  }
  const QuadratureSqueezing q = quadrature_squeezing(ModeMoments{-0.3, -0.3, 0.5}, 0.0);
  CHECK(q.S_X == Approx(2.0 * 0.5 - 2.0 * 0.3));
  CHECK(q.S_Y == Approx(2.0 * 0.5 + 2.0 * 0.3));
}

TEST_CASE("red fiducial squeezing against the closed form") {
  const EffectiveParams p = base(0.09, 0.003);
  // Closed form evaluated independently in double precision.
  const double reference = -0.2594152633196178;
  CHECK(S_Ym(p, DriveMode::red()) == Approx(reference).epsilon(1e-10));
  CHECK(closed_form_SYm(p, DriveMode::red()) == Approx(reference).epsilon(1e-12));
}

TEST_CASE("blue and two-tone closed forms against independent evaluation") {
  CHECK(closed_form_SYm(base(0.02, 0.0003), DriveMode::blue()) == Approx(0.6773919631892746).epsilon(1e-12));
  CHECK(closed_form_SYm(base(0.02, 0.0003, 1.5), DriveMode::blue()) == Approx(4.080960140085453).epsilon(1e-12));
  const DriveMode br = DriveMode::blue_red(kPi / 4.0);
  CHECK(closed_form_SYm(base(0.09, 0.0005), br) == Approx(-0.3749531308586427).epsilon(1e-12));
  CHECK(closed_form_SYm(base(0.09, 0.0005, 1.5), br) == Approx(1.5001874765654293).epsilon(1e-12));
}

TEST_CASE("closed forms preconditions") {
  CHECK_THROWS_AS(closed_form_SYm(base(0.09, cd(0.001, 0.001)), DriveMode::red()), std::domain_error);
  CHECK_THROWS_AS(closed_form_SYm(base(0.09, 0.01), DriveMode::red()), NoSteadyState);
  CHECK_THROWS_AS(closed_form_SYm(base(0.09, 0.0005), DriveMode::blue_red(0.1)), std::domain_error);
  for (const auto& mode : {DriveMode::red(), DriveMode::blue_red(kPi / 4.0)}) {
    CHECK(closed_form_SYm(base(0.01, 0.0), mode) == Approx(0.0).epsilon(1e-15));
  }
  CHECK(closed_form_SYm(base(0.0, 0.0), DriveMode::blue()) == Approx(0.0).epsilon(1e-15));
  // Unpumped blue drive still heats, close to 2 Gamma / (gamma - Gamma).
  const EffectiveParams heated = base(0.01, 0.0);
  const double rate = heated.cooling_rate();
  CHECK(closed_form_SYm(heated, DriveMode::blue()) == Approx(S_Ym(heated, DriveMode::blue())).epsilon(1e-9));
  CHECK(closed_form_SYm(heated, DriveMode::blue()) ==
        Approx(2.0 * rate / (heated.gamma - rate)).epsilon(1e-2));
}

TEST_CASE("moment solver equals the closed forms on random stable points") {
  std::mt19937_64 rng(11);
  for (const auto& mode : {DriveMode::blue(), DriveMode::red(), DriveMode::blue_red(kPi / 4.0)}) {
    double worst = 0.0;
    for (int k = 0; k < 150; ++k) {
      const EffectiveParams p = random_point(rng, mode);
      const double cf = closed_form_SYm(p, mode);
      const double num = S_Ym(p, mode);
      worst = std::max(worst, std::abs(num - cf) / std::max(1.0, std::abs(cf)));
    }
    CAPTURE(mode.name());
    CHECK(worst < 1e-9);
  }
}

TEST_CASE("two-tone squeezing approaches -1/2 + n at threshold") {
  const DriveMode br = DriveMode::blue_red(kPi / 4.0);
  for (double n : {0.0, 1.0}) {
    const EffectiveParams p = base(0.09, (1.0 - 1e-7) * 0.003334 / 4.0, n);
    CHECK(closed_form_SYm(p, br) == Approx(-0.5 + n).epsilon(1e-6));
  }
}

TEST_CASE("red threshold limit in the adiabatic regime") {
  for (double n : {0.0, 1.0}) {
    EffectiveParams p = base(1e-3, 0.0, n);
    const double thr = chi_threshold(p, DriveMode::red());
    p.chi = 0.999 * thr;
    CHECK(std::abs(S_Ym(p, DriveMode::red()) - (-0.5 + n)) < 1e-2);
    // Exact at-threshold expression agrees with the limit of the solver.
    p.chi = (1.0 - 1e-9) * thr;
    CHECK(S_Ym(p, DriveMode::red()) == Approx(red_threshold_SYm(p)).epsilon(1e-6));
  }
}

TEST_CASE("conjugate quadrature diverges toward threshold") {
  EffectiveParams p = base(1e-3, 0.0);
  const double thr = chi_threshold(p, DriveMode::red());
  double previous = -1.0;
  for (double f : {0.0, 0.5, 0.9, 0.99, 0.999, 0.9999, 1.0 - 1e-6}) {
    p.chi = f * thr;
    const double sx = quadrature_squeezing(moments(p, DriveMode::red()).mechanics(), -kPi / 4.0).S_X;
    CHECK(sx > previous);
    previous = sx;
  }
  CHECK(previous > 1e3);
}

TEST_CASE("condition number flags the approach to threshold") {
  EffectiveParams p = base(0.09, 0.003);
  const double thr = chi_threshold(p, DriveMode::red());
  const SteadySolution far = solve_steady_moments(build_drift(p, DriveMode::red()));
  CHECK_FALSE(far.near_threshold);
  p.chi = (1.0 - 1e-9) * thr;
  const SteadySolution near = solve_steady_moments(build_drift(p, DriveMode::red()));
  CHECK(near.condition_number > far.condition_number * 1e6);
  p.chi = 1.01 * thr;
  CHECK_THROWS_AS(solve_steady_moments(build_drift(p, DriveMode::red())), NoSteadyState);
}

TEST_CASE("steady states are physical") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> phase(-kPi, kPi);
  for (const auto& mode : {DriveMode::blue(), DriveMode::red(), DriveMode::blue_red(0.6)}) {
    for (int k = 0; k < 100; ++k) {
      EffectiveParams p = random_point(rng, mode);
      p.chi = std::polar(std::abs(p.chi), phase(rng));
      const MomentState m = moments(p, mode);
      CHECK(m.bdb.real() >= 0.0);
      CHECK(m.ada.real() >= -1e-15);
      CHECK(std::abs(m.bd2 - std::conj(m.b2)) < 1e-12 * (1.0 + std::abs(m.b2)));
      CHECK(std::abs(m.adbd - std::conj(m.ab)) < 1e-12 * (1.0 + std::abs(m.ab)));
      CHECK(m.physicality_margin() > -1e-9);
      for (double phi : {0.0, 0.3, -kPi / 4.0}) {
        const QuadratureSqueezing b = quadrature_squeezing(m.mechanics(), phi);
        const QuadratureSqueezing a = quadrature_squeezing(m.cavity(), phi);
        CHECK(b.S_X >= -1.0);
        CHECK((b.S_X + 1.0) * (b.S_Y + 1.0) >= 1.0 - 1e-9);
        CHECK((a.S_X + 1.0) * (a.S_Y + 1.0) >= 1.0 - 1e-9);
      }
    }
  }
}

TEST_CASE("pump phase rotation turns the squeezed quadrature by half the angle") {
  const EffectiveParams p0 = base(0.09, 0.004, 0.5);
  const MomentState m0 = moments(p0, DriveMode::red());
  const double min0 = 2.0 * m0.bdb.real() - 2.0 * std::abs(m0.b2);
  for (double two_alpha : {0.4, -1.0, kPi / 2.0}) {
    EffectiveParams p = p0;
    p.chi = std::polar(0.004, two_alpha);
    const ModeMoments m = moments(p, DriveMode::red()).mechanics();
    double best = 1e300;
    double best_phi = 0.0;
    for (int k = 0; k <= 20000; ++k) {
      const double phi = -kPi / 2.0 + kPi * k / 20000.0;
      const double sx = quadrature_squeezing(m, phi).S_X;
      if (sx < best) {
        best = sx;
        best_phi = phi;
      }
    }
    CHECK(best == Approx(min0).epsilon(1e-6));
    const double phi0 = -kPi / 4.0 + kPi / 2.0;   // S_X minimum for real chi
    double shift = best_phi - phi0 - two_alpha / 2.0;
    shift = std::remainder(shift, kPi);
    CHECK(std::abs(shift) < 2e-4);
  }
}

TEST_CASE("optimal phases") {
  const OptimalPhases red = optimal_phases(DriveMode::red(), 0.0);
  CHECK(red.phi == Approx(-kPi / 4.0));
  CHECK(red.theta == Approx(-kPi / 4.0));
  CHECK_FALSE(red.psi.has_value());
  const OptimalPhases br = optimal_phases(DriveMode::blue_red(0.0), 0.0);
  REQUIRE(br.psi.has_value());
  CHECK(*br.psi == Approx(kPi / 4.0));
  CHECK(br.theta == 0.0);

  // arg chi = -pi/2: the squeezed quadrature Y at phi is the position quadrature.
  EffectiveParams p = base(0.09, std::polar(0.004, -kPi / 2.0));
  const OptimalPhases o = optimal_phases(DriveMode::red(), -kPi / 2.0);
  const ModeMoments m = moments(p, DriveMode::red()).mechanics();
  const double position = quadrature_squeezing(m, 0.0).S_X;
  CHECK(quadrature_squeezing(m, o.phi).S_Y == Approx(position).epsilon(1e-12));
  CHECK(position == Approx(2.0 * m.number - 2.0 * std::abs(m.second)).epsilon(1e-9));
}

TEST_CASE("optimal local-oscillator angle minimises the intracavity variance") {
  std::uniform_real_distribution<double> phase(-kPi, kPi);
  std::mt19937_64 rng(3);
  for (int k = 0; k < 5; ++k) {
    const double arg = phase(rng);
    const ModeMoments a = moments(base(0.09, std::polar(0.004, arg)), DriveMode::red()).cavity();
    const double at_theta = quadrature_squeezing(a, optimal_phases(DriveMode::red(), arg).theta).S_X;
    CHECK(at_theta == Approx(2.0 * a.number - 2.0 * std::abs(a.second)).epsilon(1e-9));
  }
  // Blue: the labelled angle follows the pump phase, so the variance there is phase independent.
  const ModeMoments real_pump = moments(base(0.02, 3e-4), DriveMode::blue()).cavity();
  const double reference = quadrature_squeezing(real_pump, -kPi / 4.0).S_X;
  for (int k = 0; k < 5; ++k) {
    const double arg = phase(rng);
    const ModeMoments a = moments(base(0.02, std::polar(3e-4, arg)), DriveMode::blue()).cavity();
    CHECK(quadrature_squeezing(a, optimal_phases(DriveMode::blue(), arg).theta).S_X ==
          Approx(reference).epsilon(1e-9));
  }
  // Two-tone: the optimum needs psi tied to the pump phase.
  const double arg = 0.8;
  const OptimalPhases o = optimal_phases(DriveMode::blue_red(0.0), arg);
  EffectiveParams p = base(0.09, std::polar(5e-4, arg));
  const DriveMode br = DriveMode::blue_red(*o.psi);
  const ModeMoments b = moments(p, br).mechanics();
  CHECK(quadrature_squeezing(b, o.phi).S_Y == Approx(2.0 * b.number - 2.0 * std::abs(b.second)).epsilon(1e-9));
  p.chi = 5e-4;
  CHECK(quadrature_squeezing(b, o.phi).S_Y ==
        Approx(closed_form_SYm(p, DriveMode::blue_red(kPi / 4.0))).epsilon(1e-9));
}

TEST_CASE("cavity and nanoresonator squeezing relation") {
  const CavityRelationCheck c = cavity_nanores_relation_check(base(0.09, 0.003));
  CHECK(std::abs(c.residual) < 1e-10);
  CHECK(c.bath_condition);
  const CavityRelationCheck zero = cavity_nanores_relation_check(base(0.09, 0.0));
  CHECK(std::abs(zero.nanoresonator_SY) < 1e-13);
  CHECK(std::abs(zero.cavity_SX) < 1e-13);

  std::mt19937_64 rng(2);
  for (int k = 0; k < 50; ++k) {
    const EffectiveParams p = random_point(rng, DriveMode::red());
    CHECK(std::abs(cavity_nanores_relation_check(p).residual) < 1e-9);
  }

  EffectiveParams edge = base(0.09, 0.003);
  edge.n_m0 = (4.0 * 0.0081 + 0.003334) / (2.0 * 0.003334);
  const CavityRelationCheck b = cavity_nanores_relation_check(edge);
  CHECK(b.bath_marginal);
  CHECK_FALSE(b.bath_condition);
}

TEST_CASE("adiabatic occupation formulas") {
  EffectiveParams p;
  p.mu_ext = 3.77e5;
  p.gamma = 1.26e3;
  p.g = 3.39e4;
  p.n_m0 = 50.0;
  // 1.26e3 * 50 / (4 g^2/mu + 1.26e3), evaluated independently.
  CHECK(final_phonon_number(p, DriveMode::red()) == Approx(4.6828973985875).epsilon(1e-12));
  p.n_m0 = 100.0;
  CHECK(final_phonon_number(p, DriveMode::red()) < 10.0);
  p.g = 0.0;
  CHECK(final_phonon_number(p, DriveMode::red()) == 100.0);
  CHECK(final_phonon_number(p, DriveMode::blue()) == Approx(100.0));
  CHECK(final_phonon_number(p, DriveMode::blue_red(0.0)) == 100.0);
  p.g = 2e4;
  CHECK_THROWS_AS(final_phonon_number(p, DriveMode::blue()), NoSteadyState);
}

TEST_CASE("red occupation from the solver approaches the cooling formula") {
  EffectiveParams p = base(0.005, 0.0, 10.0);
  p.gamma = 1e-5;
  const double expected = final_phonon_number(p, DriveMode::red());
  CHECK(moments(p, DriveMode::red()).bdb.real() == Approx(expected).epsilon(2e-3));
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <hyptheta/periods.hpp>
#include <hyptheta/rng.hpp>

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/ellint_1.hpp>

using namespace hyptheta;

namespace {

std::vector<double> random_ascending_roots(int g, SplitMix64& rng) {
  std::vector<double> e;
  for (long long v : rng.distinct(2 * g + 2, -40, 40)) e.push_back(double(v));
  // Shrink tight gaps a little to keep the quadrature fast.
  return e;
}

// Independent quadrature oracle with endpoint singularities handled by
// tanh-sinh transformation.
double oracle_segment(const std::vector<double>& roots, int t, int power) {
  boost::math::quadrature::tanh_sinh<double> integ(15);
  double a = roots[t], b = roots[t + 1];
  // Two-argument form: xc is b - x near the right endpoint (positive)
  // and a - x near the left endpoint (negative), avoiding cancellation
  // in the singular factors.
  auto f = [&](double x, double xc) {
    double da = xc < 0 ? -xc : x - a;
    double db = xc > 0 ? xc : b - x;
    double prod = da * db;
    for (std::size_t r = 0; r < roots.size(); ++r) {
      if (static_cast<int>(r) == t || static_cast<int>(r) == t + 1) continue;
      prod *= std::abs(x - roots[r]);
    }
    return std::pow(x, power) / std::sqrt(prod);
  };
  return integ.integrate(f, a, b, 1e-13);
}

}  // namespace

TEST_CASE("agm agrees with the complete elliptic integral") {
  for (double k : {0.1, 0.3, 0.5, 0.7, 0.9, 0.99}) {
    double kp = std::sqrt(1 - k * k);
    double pi = 3.14159265358979323846;
    CHECK(std::abs(pi / (2 * agm(1, kp)) - boost::math::ellint_1(k)) < 1e-13);
  }
  CHECK(agm(1, 1) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK_THROWS_AS(agm(-1, 1), std::invalid_argument);
}

TEST_CASE("segment integrals match tanh-sinh quadrature") {
  std::vector<double> roots = {-3, -1, 0, 2, 4, 7, 9, 11};  // genus 3
  for (int t = 0; t <= 6; ++t) {
    SegmentIntegrals seg = segment_integrals(roots, t, 3, 1e-13);
    for (int j = 0; j < 3; ++j) {
      double want = oracle_segment(roots, t, j);
      CHECK(std::abs(seg.value[j] - want) <= 1e-10 * std::max(1.0, std::abs(want)));
    }
    CHECK(seg.error < 1e-12);
  }
}

TEST_CASE("genus 1 period ratio matches the AGM oracle") {
  SplitMix64 rng(41);
  for (int trial = 0; trial < 5; ++trial) {
    std::vector<double> e = random_ascending_roots(1, rng);
    PeriodData data = compute_periods(e, 1e-13);
    Complex tau = data.tau(0, 0);
    Complex want = genus1_tau_agm(e);
    INFO("roots ", e[0], " ", e[1], " ", e[2], " ", e[3]);
    CHECK(std::abs(tau.real()) < 1e-10);
    CHECK(std::abs(tau - want) < 1e-10);
  }
}

TEST_CASE("period matrices are symmetric with positive imaginary part") {
  SplitMix64 rng(42);
  for (int g = 1; g <= 4; ++g) {
    std::vector<double> e = random_ascending_roots(g, rng);
    PeriodData data = compute_periods(e, 1e-12);
    INFO("genus ", g);
    CHECK(data.tau_symmetry_residual < 1e-8);
    CHECK(data.bilinear_residual < 1e-8);
    CHECK(data.min_im_eigenvalue > 0);
    CHECK(data.quadrature_error < 1e-10);
  }
}

TEST_CASE("abel images of branch points are half periods with table parities") {
  SplitMix64 rng(43);
  for (int g = 1; g <= 4; ++g) {
    std::vector<double> e = random_ascending_roots(g, rng);
    PeriodData data = compute_periods(e, 1e-12);
    AbelCertificate cert = abel_certificate(data);
    INFO("genus ", g);
    CHECK(cert.pass);
    CHECK(cert.mismatches == 0);
    CHECK(cert.max_residual < 1e-8);
  }
}

TEST_CASE("tau is invariant under affine rescaling of the roots") {
  std::vector<double> e = {-2, 0, 1, 3, 6, 8};  // genus 2
  PeriodData base = compute_periods(e, 1e-13);
  std::vector<double> moved;
  for (double v : e) moved.push_back(2.5 * v - 4.0);
  PeriodData shifted = compute_periods(moved, 1e-13);
  CHECK((base.tau - shifted.tau).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("node doubling stability") {
  std::vector<double> e = {-5, -2, 0, 1, 4, 6, 7, 10};  // genus 3
  PeriodData loose = compute_periods(e, 1e-9);
  PeriodData tight = compute_periods(e, 1e-13);
  CHECK((loose.tau - tight.tau).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("input validation") {
  CHECK_THROWS_AS(compute_periods({0, 1, 2}), std::invalid_argument);
  CHECK_THROWS_AS(compute_periods({0, 1, 1, 2}), std::invalid_argument);
  CHECK_THROWS_AS(compute_periods({3, 1, 0, 2}), std::invalid_argument);
  CHECK_THROWS_AS(genus1_tau_agm({0, 1, 2}), std::invalid_argument);
}

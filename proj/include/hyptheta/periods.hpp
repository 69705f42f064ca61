#pragma once

// Period matrices of real hyperelliptic curves y^2 = f(x) with
// f = prod (x - e_i) over 2g+2 real ascending roots.  Branch cuts sit
// on the even segments [e_{2m}, e_{2m+1}]; cycle a_m is the loop
// around the odd segment (e_{2m-1}, e_{2m}), and b_k is the sum of the
// loops around the cuts k..g.  All sign and phase choices below are
// frozen; if they were wrong the certificates (Riemann bilinear
// residual, Im tau positivity, Abel half-period parities against the
// branch characteristic table) would fail rather than being repaired
// silently.

#include <hyptheta/charkit.hpp>

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

namespace hyptheta {

using CMatrix = Eigen::MatrixXcd;
using Complex = std::complex<double>;

inline Complex i_power(int n) {
  switch (((n % 4) + 4) % 4) {
    case 0: return {1, 0};
    case 1: return {0, 1};
    case 2: return {-1, 0};
    default: return {0, -1};
  }
}

// Holomorphic differentials du_j = c x^{g-j} dx / y with c = 1/2, so
// column j of the period matrices carries the descending power g-j.
// The factor 1/2 normalizes the Thomae proportionality constants to
// eighth roots of unity, and the descending order makes the symmetric
// function vectors in the derivative formulas pair with the columns
// coefficient by coefficient.
inline constexpr double kDifferentialScale = 0.5;

struct SegmentIntegrals {
  std::vector<double> value;  // moments j = 1..g over one real segment
  double error = 0;           // node-doubling estimate, relative
  int nodes = 0;
};

// Gauss-Chebyshev integration of x^{j-1} / sqrt|f| over the segment
// (e_t, e_{t+1}); the two endpoint factors of f form the Chebyshev
// weight, the others stay in the smooth part.
inline SegmentIntegrals segment_integrals(const std::vector<double>& roots, int t, int g,
                                          double tol = 1e-12) {
  int n = static_cast<int>(roots.size());
  if (t < 0 || t + 1 >= n) throw std::invalid_argument("segment index out of range");
  double a = roots[t], b = roots[t + 1];
  double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  const double pi = 3.14159265358979323846264338327950288;

  auto sample = [&](int nodes) {
    std::vector<double> acc(g, 0.0);
    for (int k = 1; k <= nodes; ++k) {
      double x = mid + half * std::cos((2 * k - 1) * pi / (2 * nodes));
      double smooth = 1.0;
      for (int r = 0; r < n; ++r) {
        if (r == t || r == t + 1) continue;
        smooth *= std::abs(x - roots[r]);
      }
      double h = 1.0 / std::sqrt(smooth);
      double mono = 1.0;
      for (int j = 0; j < g; ++j) {
        acc[j] += h * mono;
        mono *= x;
      }
    }
    for (double& v : acc) v *= pi / nodes;
    return acc;
  };

  SegmentIntegrals out;
  int nodes = 32;
  std::vector<double> prev = sample(nodes);
  for (;;) {
    nodes *= 2;
    std::vector<double> cur = sample(nodes);
    double rel = 0;
    for (int j = 0; j < g; ++j) {
      double scale = std::max(std::abs(cur[j]), 1e-300);
      rel = std::max(rel, std::abs(cur[j] - prev[j]) / scale);
    }
    if (rel <= tol || nodes >= (1 << 15)) {
      out.value = std::move(cur);
      out.error = rel;
      out.nodes = nodes;
      return out;
    }
    prev = std::move(cur);
  }
}

struct PeriodData {
  int g = 0;
  std::vector<double> roots;
  CMatrix omega, omega_prime, tau;        // rows = cycles, columns = differentials
  double tau_symmetry_residual = 0;       // max |tau - tau^T|
  double bilinear_residual = 0;           // max |omega^T omega' - omega'^T omega|
  double min_im_eigenvalue = 0;           // smallest eigenvalue of Im tau
  double quadrature_error = 0;            // worst node-doubling estimate
  std::vector<Eigen::RowVectorXcd> abel;  // Abel images of the roots, normalized frame
};

inline PeriodData compute_periods(const std::vector<double>& roots, double tol = 1e-12) {
  int n = static_cast<int>(roots.size());
  if (n < 4 || n % 2 != 0) throw std::invalid_argument("need 2g+2 roots with g >= 1");
  int g = n / 2 - 1;
  check_genus(g);
  for (int i = 1; i < n; ++i)
    if (!(roots[i - 1] < roots[i])) throw std::invalid_argument("roots must be real ascending");

  PeriodData data;
  data.g = g;
  data.roots = roots;

  std::vector<SegmentIntegrals> seg(2 * g + 1);
  for (int t = 0; t <= 2 * g; ++t) {
    seg[t] = segment_integrals(roots, t, g, tol);
    data.quadrature_error = std::max(data.quadrature_error, seg[t].error);
  }

  // All loops carry the positive (counterclockwise) orientation; the
  // upper-bank phase of y is i^N with N the number of roots to the
  // right.  This makes a_g-periods positive and det omega real with
  // the sign that normalizes the Thomae constants.
  const double c2 = 2.0 * kDifferentialScale;
  data.omega = CMatrix::Zero(g, g);
  for (int m = 1; m <= g; ++m) {
    double sign = ((g - m) % 2 == 0) ? 1.0 : -1.0;
    for (int j = 0; j < g; ++j)
      data.omega(m - 1, j) = c2 * sign * seg[2 * m - 1].value[g - 1 - j];
  }

  // Loop integrals around the cuts (e_{2m}, e_{2m+1}).
  CMatrix gap_loops = CMatrix::Zero(g, g);
  for (int m = 1; m <= g; ++m) {
    double sign = ((g - m) % 2 == 0) ? 1.0 : -1.0;
    for (int j = 0; j < g; ++j)
      gap_loops(m - 1, j) = Complex(0, 1) * c2 * sign * seg[2 * m].value[g - 1 - j];
  }
  // b_k = sum of the gap loops from k outward: the loop around gap m
  // meets a_m with intersection +1 and a_{m+1} with -1, so the partial
  // sums telescope to the canonical pairing.
  data.omega_prime = CMatrix::Zero(g, g);
  for (int k = 1; k <= g; ++k)
    for (int m = k; m <= g; ++m) data.omega_prime.row(k - 1) += gap_loops.row(m - 1);

  CMatrix bilinear = data.omega.transpose() * data.omega_prime -
                     data.omega_prime.transpose() * data.omega;
  data.bilinear_residual = bilinear.cwiseAbs().maxCoeff();

  CMatrix omega_inv = data.omega.inverse();
  data.tau = data.omega_prime * omega_inv;
  data.tau_symmetry_residual = (data.tau - data.tau.transpose()).cwiseAbs().maxCoeff();

  Eigen::MatrixXd im_tau = data.tau.imag();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (im_tau + im_tau.transpose()));
  data.min_im_eigenvalue = es.eigenvalues().minCoeff();
  if (data.min_im_eigenvalue <= 0)
    throw std::runtime_error("period matrix has non-positive imaginary part");

  // Abel images of the branch points along the upper bank from e_0.
  Eigen::RowVectorXcd partial = Eigen::RowVectorXcd::Zero(g);
  data.abel.push_back(partial * omega_inv);
  for (int r = 1; r < n; ++r) {
    Complex phase_inv = i_power(-(2 * g + 1 - (r - 1)));
    for (int j = 0; j < g; ++j)
      partial(j) += kDifferentialScale * phase_inv * seg[r - 1].value[g - 1 - j];
    data.abel.push_back(partial * omega_inv);
  }
  return data;
}

// ---------------------------------------------------------------------------
// Certificates.

// Abel images of branch points must be half periods whose parities
// reproduce the branch characteristic table.
struct AbelCertificate {
  bool pass = false;
  double max_residual = 0;  // distance of 2x, 2y from integers
  int mismatches = 0;       // parity disagreements with the table
};

inline AbelCertificate abel_certificate(const PeriodData& data) {
  AbelCertificate cert;
  cert.pass = true;
  int g = data.g;
  Eigen::MatrixXd im_tau = data.tau.imag();
  Eigen::MatrixXd re_tau = data.tau.real();
  Eigen::MatrixXd im_inv = im_tau.inverse();
  for (int r = 0; r < 2 * g + 2; ++r) {
    Eigen::RowVectorXd y = data.abel[r].imag() * im_inv;        // tau coefficient
    Eigen::RowVectorXd x = data.abel[r].real() - y * re_tau;    // lattice coefficient
    Char expected = branch_char(g, r);
    for (int j = 0; j < g; ++j) {
      double ty = 2 * y(j), tx = 2 * x(j);
      long ry = std::lround(ty), rx = std::lround(tx);
      cert.max_residual = std::max({cert.max_residual, std::abs(ty - ry), std::abs(tx - rx)});
      int want_top = (expected.top >> j) & 1;
      int want_bottom = (expected.bottom >> j) & 1;
      if (((ry % 2) + 2) % 2 != want_top) ++cert.mismatches;
      if (((rx % 2) + 2) % 2 != want_bottom) ++cert.mismatches;
    }
  }
  if (cert.mismatches > 0 || cert.max_residual > 1e-6) cert.pass = false;
  return cert;
}

// ---------------------------------------------------------------------------
// Genus 1 oracle: arithmetic-geometric mean.

inline double agm(double a, double b) {
  if (a <= 0 || b <= 0) throw std::invalid_argument("agm needs positive arguments");
  for (int i = 0; i < 64; ++i) {
    double an = 0.5 * (a + b), bn = std::sqrt(a * b);
    if (std::abs(an - bn) <= 1e-16 * an) return an;
    a = an;
    b = bn;
  }
  return 0.5 * (a + b);
}

// tau for genus 1 from the cross ratio of the four roots:
// k^2 = (e2-e1)(e3-e0) / ((e2-e0)(e3-e1)), tau = i AGM(1,k') / AGM(1,k).
inline Complex genus1_tau_agm(const std::vector<double>& e) {
  if (e.size() != 4) throw std::invalid_argument("genus 1 needs four roots");
  for (int i = 1; i < 4; ++i)
    if (!(e[i - 1] < e[i])) throw std::invalid_argument("roots must be ascending");
  double k2 = ((e[2] - e[1]) * (e[3] - e[0])) / ((e[2] - e[0]) * (e[3] - e[1]));
  double k = std::sqrt(k2), kp = std::sqrt(1 - k2);
  return Complex(0, agm(1, kp) / agm(1, k));
}

}  // namespace hyptheta

#pragma once

// Theta series with half-integer characteristics on the Siegel upper
// half space, their v- and tau-derivatives, and the numeric checks
// tying them to the exact rational layer: Thomae proportionality at
// orders 1..3, vanishing counts of singular even constants, the chi
// form displays, and the modular transformation laws.
//
// Conventions: characteristic [eps'; eps] gives shifts a = eps'/2,
// b = eps/2, and
//   theta[c](v; tau) = sum_n exp(i pi (n+a)^T tau (n+a)
//                                + 2 i pi (n+a)^T (v+b)).
// tau derivatives treat all g^2 entries of tau as independent, so the
// heat equation reads d^2/dv_m dv_n = 4 i pi d/dtau_{mn} exactly.

#include <hyptheta/charkit.hpp>
#include <hyptheta/goepel.hpp>
#include <hyptheta/periods.hpp>
#include <hyptheta/thomae.hpp>

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace hyptheta {

inline constexpr double kPi = 3.14159265358979323846264338327950288;

inline double min_im_eigenvalue(const CMatrix& tau) {
  Eigen::MatrixXd im = tau.imag();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (im + im.transpose()));
  return es.eigenvalues().minCoeff();
}

// Truncation radius for absolute tail below tol: the Gaussian decay is
// governed by the smallest eigenvalue of Im tau.
inline int theta_truncation_radius(const CMatrix& tau, double tol) {
  double lam = min_im_eigenvalue(tau);
  if (lam <= 0) throw std::invalid_argument("Im tau must be positive definite");
  double L = std::max(std::log(1.0 / tol), 1.0);
  return static_cast<int>(std::ceil(std::sqrt(L / (kPi * lam)))) + static_cast<int>(tau.rows()) + 2;
}

struct ThetaDerivatives {
  Complex value{0, 0};
  Eigen::VectorXcd gradient;  // d/dv_n at the evaluation point
  CMatrix dtau;               // d/dtau_{mn}, independent entries
};

// One pass over the truncated lattice accumulating value, gradient and
// tau derivative together.
inline ThetaDerivatives theta_full(const CMatrix& tau, const Char& c,
                                   const Eigen::VectorXcd& v, double tol = 1e-11) {
  int g = static_cast<int>(tau.rows());
  if (c.g != g) throw std::invalid_argument("characteristic genus mismatch");
  int R = theta_truncation_radius(tau, tol);

  ThetaDerivatives out;
  out.gradient = Eigen::VectorXcd::Zero(g);
  out.dtau = CMatrix::Zero(g, g);

  std::vector<int> n(g, -R);
  std::vector<double> x(g);
  const Complex two_i_pi(0, 2 * kPi), i_pi(0, kPi);
  for (;;) {
    for (int i = 0; i < g; ++i) x[i] = n[i] + 0.5 * ((c.top >> i) & 1);
    Complex quad(0, 0), lin(0, 0);
    for (int i = 0; i < g; ++i) {
      Complex row(0, 0);
      for (int j = 0; j < g; ++j) row += tau(i, j) * x[j];
      quad += x[i] * row;
      lin += x[i] * (v(i) + 0.5 * ((c.bottom >> i) & 1));
    }
    Complex term = std::exp(i_pi * quad + two_i_pi * lin);
    out.value += term;
    for (int i = 0; i < g; ++i) out.gradient(i) += two_i_pi * x[i] * term;
    for (int i = 0; i < g; ++i)
      for (int j = 0; j < g; ++j) out.dtau(i, j) += i_pi * x[i] * x[j] * term;

    int k = 0;
    while (k < g && n[k] == R) n[k++] = -R;
    if (k == g) break;
    ++n[k];
  }
  return out;
}

inline Complex theta_value(const CMatrix& tau, const Char& c, const Eigen::VectorXcd& v,
                           double tol = 1e-11) {
  return theta_full(tau, c, v, tol).value;
}

inline Complex theta_constant(const CMatrix& tau, const Char& c, double tol = 1e-11) {
  return theta_value(tau, c, Eigen::VectorXcd::Zero(tau.rows()), tol);
}

inline Eigen::VectorXcd theta_gradient(const CMatrix& tau, const Char& c, double tol = 1e-11) {
  return theta_full(tau, c, Eigen::VectorXcd::Zero(tau.rows()), tol).gradient;
}

inline CMatrix theta_dtau(const CMatrix& tau, const Char& c, double tol = 1e-11) {
  return theta_full(tau, c, Eigen::VectorXcd::Zero(tau.rows()), tol).dtau;
}

// ---------------------------------------------------------------------------
// Vanishing scan over even characteristics.

struct VanishingScan {
  int count = 0;
  std::vector<Char> vanishing;
  double max_magnitude = 0;   // largest even theta constant
  double threshold = 0;       // absolute cutoff used
  double largest_vanishing = 0, smallest_surviving = 0;
};

inline VanishingScan scan_even_constants(const CMatrix& tau, double rel_threshold = 1e-6,
                                         double tol = 1e-11) {
  int g = static_cast<int>(tau.rows());
  VanishingScan scan;
  std::vector<std::pair<Char, double>> mags;
  for (std::uint32_t code = 0; code < (1u << (2 * g)); ++code) {
    Char c = char_from_code(g, code);
    if (is_odd(c)) continue;
    double m = std::abs(theta_constant(tau, c, tol));
    mags.emplace_back(c, m);
    scan.max_magnitude = std::max(scan.max_magnitude, m);
  }
  scan.threshold = rel_threshold * scan.max_magnitude;
  scan.smallest_surviving = scan.max_magnitude;
  for (auto& [c, m] : mags) {
    if (m < scan.threshold) {
      ++scan.count;
      scan.vanishing.push_back(c);
      scan.largest_vanishing = std::max(scan.largest_vanishing, m);
    } else {
      scan.smallest_surviving = std::min(scan.smallest_surviving, m);
    }
  }
  return scan;
}

// ---------------------------------------------------------------------------
// Thomae proportionality checks.

namespace detail {

inline RootSystem exact_roots_from_doubles(int g, const std::vector<double>& roots) {
  std::vector<Rat> e;
  for (double v : roots) e.push_back(Rat(v));  // dyadic, exact
  return make_roots(g, std::move(e));
}

inline double quarter_root(const Rat& prod) {
  double p = mpq_get_d(prod.get_mpq_t());
  if (p <= 0) throw std::logic_error("quarter root of non-positive product");
  return std::pow(p, 0.25);
}

}  // namespace detail

struct ThomaeOrderCheck {
  int order = 0;  // 1: constants, 2: gradients, 3: tau derivatives
  int cases = 0;
  double max_rel_residual = 0;   // after the per-characteristic epsilon fit
  double max_abs_dev = 0;        // max | |eps| - 1 |
  double max_eighth_dev = 0;     // max | eps^8 - 1 |
  double max_spread = 0;         // max |eps_c - eps_first| (constancy witness)
  Complex eps_first{0, 0};
};

// Verifies the three Thomae displays on one curve: each theta quantity
// against its root-difference expression, with the proportionality
// constant fitted per characteristic and its constancy reported.
inline std::vector<ThomaeOrderCheck> verify_thomae(const PeriodData& pd, double tol = 1e-11) {
  int g = pd.g;
  RootSystem roots = detail::exact_roots_from_doubles(g, pd.roots);
  Complex det_omega = pd.omega.determinant();
  Complex pref = std::sqrt(det_omega / std::pow(kPi, g));

  std::vector<ThomaeOrderCheck> checks(3);
  for (int i = 0; i < 3; ++i) checks[i].order = i + 1;

  auto fit = [](ThomaeOrderCheck& chk, const Eigen::VectorXcd& lhs, const Eigen::VectorXcd& rhs) {
    Complex eps = rhs.dot(lhs) / rhs.dot(rhs);  // least squares scalar fit
    double rel = (lhs - eps * rhs).norm() / rhs.norm();
    chk.max_rel_residual = std::max(chk.max_rel_residual, rel);
    chk.max_abs_dev = std::max(chk.max_abs_dev, std::abs(std::abs(eps) - 1.0));
    Complex e8 = eps;
    for (int t = 0; t < 3; ++t) e8 *= e8;
    chk.max_eighth_dev = std::max(chk.max_eighth_dev, std::abs(e8 - Complex(1, 0)));
    if (chk.cases == 0) chk.eps_first = eps;
    chk.max_spread = std::max(chk.max_spread, std::abs(eps - chk.eps_first));
    ++chk.cases;
  };

  for (std::uint32_t code = 0; code < (1u << (2 * g)); ++code) {
    Char c = char_from_code(g, code);
    int m = multiplicity(c);
    const PartitionClass& pc = partition_of_char(c);
    std::vector<int> side = pc.indices;
    std::vector<int> other = partition_complement(g, side);
    Rat delta_prod = vandermonde(roots, side) * vandermonde(roots, other);
    Complex scalar = pref * detail::quarter_root(delta_prod);

    if (m == 0) {
      Eigen::VectorXcd lhs(1), rhs(1);
      lhs(0) = theta_constant(pd.tau, c, tol);
      rhs(0) = scalar;
      fit(checks[0], lhs, rhs);
    } else if (m == 1) {
      Eigen::VectorXcd lhs = theta_gradient(pd.tau, c, tol);
      std::vector<Rat> svec = thomae_svector(roots, side);
      Eigen::VectorXcd dir = Eigen::VectorXcd::Zero(g);
      for (int nrow = 0; nrow < g; ++nrow)
        for (int j = 0; j < g; ++j)
          dir(nrow) += pd.omega(nrow, j) * mpq_get_d(svec[j].get_mpq_t());
      fit(checks[1], lhs, Eigen::VectorXcd(scalar * dir));
    } else if (m == 2) {
      CMatrix hess = Complex(0, 4 * kPi) * theta_dtau(pd.tau, c, tol);
      std::vector<Rat> smat = s_matrix(roots, side);
      CMatrix shat(g, g);
      for (int i = 0; i < g; ++i)
        for (int j = 0; j < g; ++j) shat(i, j) = mpq_get_d(smat[i * g + j].get_mpq_t());
      CMatrix rhs_mat = scalar * (pd.omega * shat * pd.omega.transpose());
      Eigen::VectorXcd lhs(g * g), rhs(g * g);
      for (int i = 0; i < g; ++i)
        for (int j = 0; j < g; ++j) {
          lhs(i * g + j) = hess(i, j);
          rhs(i * g + j) = rhs_mat(i, j);
        }
      fit(checks[2], lhs, rhs);
    }
  }
  return checks;
}

// ---------------------------------------------------------------------------
// Heat equation residual: second central differences of the series in v
// (two Richardson levels) against 4 i pi times the termwise tau
// derivative, worst entry relative to the derivative scale.

inline double heat_equation_residual(const CMatrix& tau, const Char& c, double tol = 1e-15) {
  int g = static_cast<int>(tau.rows());
  CMatrix dt = theta_dtau(tau, c, tol);
  double scale = std::max(dt.cwiseAbs().maxCoeff(), 1e-300);
  double worst = 0;
  auto val = [&](const Eigen::VectorXcd& v) { return theta_value(tau, c, v, tol); };
  for (int m = 0; m < g; ++m)
    for (int n = 0; n < g; ++n) {
      auto second = [&](double h) {
        Eigen::VectorXcd v = Eigen::VectorXcd::Zero(g);
        if (m == n) {
          v(m) = h;
          Complex up = val(v);
          v(m) = -h;
          return (up - 2.0 * val(Eigen::VectorXcd::Zero(g)) + val(v)) / (h * h);
        }
        Complex sum(0, 0);
        for (int sm : {1, -1})
          for (int sn : {1, -1}) {
            v(m) = sm * h;
            v(n) = sn * h;
            sum += static_cast<double>(sm * sn) * val(v);
          }
        return sum / (4 * h * h);
      };
      auto level1 = [&](double h) { return (4.0 * second(h / 2) - second(h)) / 3.0; };
      Complex fd = (16.0 * level1(4e-3) - level1(8e-3)) / 15.0;
      worst = std::max(worst, std::abs(fd - Complex(0, 4 * kPi) * dt(m, n)) / scale);
    }
  return worst;
}

// ---------------------------------------------------------------------------
// Chi form displays at genus 3.

struct ChiFormCheck {
  double chi18_rel = 0;        // d_tau chi18 vs its root-difference display
  double chi4_rho_rel = 0;     // worst of the 30 variants vs the display
  double chi4_mutual_rel = 0;  // worst pairwise deviation among the 30
  int variants = 0;
  bool pass = false;
};

inline ChiFormCheck chi_forms_genus3(const PeriodData& pd, double tol = 1e-11) {
  if (pd.g != 3) throw std::invalid_argument("chi form displays are genus 3");
  ChiFormCheck out;
  RootSystem roots = detail::exact_roots_from_doubles(3, pd.roots);
  Char singular = k_char(3);

  CMatrix dtheta_sing = theta_dtau(pd.tau, singular, tol);
  std::vector<Rat> smat = s_matrix(roots, {});
  CMatrix shat(3, 3);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) shat(i, j) = mpq_get_d(smat[i * 3 + j].get_mpq_t());
  CMatrix omega_s = pd.omega * shat * pd.omega.transpose();
  Complex det_omega = pd.omega.determinant();
  Complex inv4ipi = 1.0 / Complex(0, 4 * kPi);

  // chi18: the product of all 36 even constants, differentiated once.
  Complex prod35(1, 0);
  for (std::uint32_t code = 0; code < 64; ++code) {
    Char c = char_from_code(3, code);
    if (is_odd(c) || c == singular) continue;
    prod35 *= theta_constant(pd.tau, c, tol);
  }
  CMatrix lhs18 = dtheta_sing * prod35;
  double delta4 = mpq_get_d(detail::rat_pow(full_vandermonde(roots), 4).get_mpq_t());
  CMatrix rhs18 = -inv4ipi * std::pow(det_omega / std::pow(kPi, 3), 18) * delta4 * omega_s;
  out.chi18_rel = (lhs18 - rhs18).cwiseAbs().maxCoeff() / rhs18.cwiseAbs().maxCoeff();

  // chi4: one variant per singular rank-3 system; all 30 coincide.
  double delta1 = mpq_get_d(full_vandermonde(roots).get_mpq_t());
  CMatrix rhs4 = -inv4ipi * std::pow(det_omega / std::pow(kPi, 3), 4) * delta1 * omega_s;
  std::vector<CMatrix> variants;
  for (const SingularSystemWitness& wit : cached_rank_g_report(3).witnesses) {
    Complex prod7(1, 0);
    for (const Char& c : wit.elements)
      if (multiplicity(c) == 0) prod7 *= theta_constant(pd.tau, c, tol);
    variants.push_back(dtheta_sing * prod7);
    out.chi4_rho_rel = std::max(
        out.chi4_rho_rel,
        (variants.back() - rhs4).cwiseAbs().maxCoeff() / rhs4.cwiseAbs().maxCoeff());
  }
  out.variants = static_cast<int>(variants.size());
  double scale = rhs4.cwiseAbs().maxCoeff();
  for (std::size_t i = 0; i < variants.size(); ++i)
    for (std::size_t l = 0; l < i; ++l)
      out.chi4_mutual_rel = std::max(
          out.chi4_mutual_rel, (variants[i] - variants[l]).cwiseAbs().maxCoeff() / scale);
  out.pass = out.chi18_rel < 1e-6 && out.chi4_rho_rel < 1e-6 && out.chi4_mutual_rel < 1e-8;
  return out;
}

// ---------------------------------------------------------------------------
// Modular transformation checks.

inline CMatrix symplectic_block(const Symplectic& s, char which) {
  int g = s.g;
  CMatrix m(g, g);
  const std::vector<int>& src = which == 'a' ? s.a : which == 'b' ? s.b : which == 'c' ? s.c : s.d;
  for (int i = 0; i < g; ++i)
    for (int j = 0; j < g; ++j) m(i, j) = static_cast<double>(src[i * g + j]);
  return m;
}

inline CMatrix modular_tau(const Symplectic& s, const CMatrix& tau) {
  CMatrix a = symplectic_block(s, 'a'), b = symplectic_block(s, 'b');
  CMatrix c = symplectic_block(s, 'c'), d = symplectic_block(s, 'd');
  return (a * tau + b) * (c * tau + d).inverse();
}

struct TransformCheck {
  std::string name;
  double dev8 = 0;      // | mult^8 - 1 |
  double residual = 0;  // relative shape residual after the scalar fit
  bool pass = false;
};

namespace detail {

inline Complex pow_int(Complex base, int e) {
  Complex r(1, 0);
  for (int i = 0; i < std::abs(e); ++i) r = e > 0 ? r * base : r / base;
  return r;
}

inline double eighth_dev(Complex mult) {
  Complex m8 = mult;
  for (int t = 0; t < 3; ++t) m8 *= m8;
  return std::abs(m8 - Complex(1, 0));
}

}  // namespace detail

// Scalar monomial law: the product of theta constants over a set of
// nonsingular even characteristics is a modular form of weight d/2 up
// to an eighth root of unity.
inline TransformCheck check_monomial_transform(const CMatrix& tau, const Symplectic& s,
                                               const std::vector<Char>& chars,
                                               const std::string& name, double tol = 1e-11) {
  TransformCheck out;
  out.name = name;
  CMatrix c = symplectic_block(s, 'c'), d = symplectic_block(s, 'd');
  CMatrix moved_tau = modular_tau(s, tau);
  Complex lhs(1, 0), rhs(1, 0);
  for (const Char& ch : chars) {
    lhs *= theta_value(moved_tau, gamma_action(s, ch), Eigen::VectorXcd::Zero(tau.rows()), tol);
    rhs *= theta_value(tau, ch, Eigen::VectorXcd::Zero(tau.rows()), tol);
  }
  int deg = static_cast<int>(chars.size());
  Complex det_cd = (c * tau + d).determinant();
  // mult^8 is branch free: (det^{d/2})^8 = det^{4d}.
  Complex lhs8 = detail::pow_int(lhs, 8), rhs8 = detail::pow_int(rhs, 8);
  Complex mult8 = lhs8 / (detail::pow_int(det_cd, 4 * deg) * rhs8);
  out.dev8 = std::abs(mult8 - Complex(1, 0));
  out.residual = out.dev8;
  out.pass = out.dev8 < 1e-6;
  return out;
}

// Matrix law for the tau gradient of a monomial with exactly one
// singular member (or for the bare singular theta when chars = {c2}):
//   dtau psi(gamma tau) = eps det(c tau+d)^{1/2} (c tau+d) dtau psi (c tau+d)^T.
inline TransformCheck check_gradient_transform(const CMatrix& tau, const Symplectic& s,
                                               const Char& singular,
                                               const std::vector<Char>& plain_chars,
                                               const std::string& name, double tol = 1e-11) {
  TransformCheck out;
  out.name = name;
  CMatrix c = symplectic_block(s, 'c'), d = symplectic_block(s, 'd');
  CMatrix cd = c * tau + d;
  CMatrix moved_tau = modular_tau(s, tau);

  Char moved_singular = gamma_action(s, singular);
  CMatrix lhs = theta_dtau(moved_tau, moved_singular, tol);
  for (const Char& ch : plain_chars)
    lhs *= theta_value(moved_tau, gamma_action(s, ch), Eigen::VectorXcd::Zero(tau.rows()), tol);

  CMatrix base = theta_dtau(tau, singular, tol);
  for (const Char& ch : plain_chars)
    base *= theta_value(tau, ch, Eigen::VectorXcd::Zero(tau.rows()), tol);
  CMatrix shape = cd * base * cd.transpose();

  // The scalar multiplying the conjugated matrix is eps det^{deg/2}
  // with deg the full monomial degree; its eighth power against
  // det^{4 deg} is branch free.
  Complex num(0, 0), den(0, 0);
  for (int i = 0; i < shape.rows(); ++i)
    for (int j = 0; j < shape.cols(); ++j) {
      num += std::conj(shape(i, j)) * lhs(i, j);
      den += std::conj(shape(i, j)) * shape(i, j);
    }
  Complex fitted = num / den;
  out.residual = (lhs - fitted * shape).cwiseAbs().maxCoeff() /
                 std::max(shape.cwiseAbs().maxCoeff(), 1e-300);
  int deg = 1 + static_cast<int>(plain_chars.size());
  Complex fitted8 = detail::pow_int(fitted, 8);
  Complex det_cd = cd.determinant();
  Complex mult8 = fitted8 / detail::pow_int(det_cd, 4 * deg);
  out.dev8 = std::abs(mult8 - Complex(1, 0));
  out.pass = out.dev8 < 1e-6 && out.residual < 1e-6;
  return out;
}

}  // namespace hyptheta

#pragma once

// Exact rational layer of the rho map.  The rho map sends theta
// constants and their derivatives on the hyperelliptic locus to
// algebraic expressions in the branch roots e_0 .. e_{2g+1}: products
// of ordered root differences to quarter-integer powers, elementary
// symmetric polynomials, and the S matrices entering second tau
// derivatives.  Everything here is computed in exact rational
// arithmetic, so the polynomial identities among Goepel-system
// monomials are checked with no tolerance at all.

#include <hyptheta/charkit.hpp>
#include <hyptheta/goepel.hpp>
#include <hyptheta/rng.hpp>

#include <gmpxx.h>

#include <algorithm>
#include <array>
#include <bit>
#include <cstdint>
#include <functional>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace hyptheta {

using Rat = mpq_class;

// Branch roots e_0 .. e_{2g+1}, pairwise distinct, otherwise arbitrary
// rationals.  Ascending real values correspond to the normally ordered
// convention in which every ordered difference is positive.
struct RootSystem {
  int g = 0;
  std::vector<Rat> e;
};

inline RootSystem make_roots(int g, std::vector<Rat> e) {
  check_genus(g);
  if (static_cast<int>(e.size()) != 2 * g + 2)
    throw std::invalid_argument("expected 2g+2 roots");
  for (std::size_t i = 0; i < e.size(); ++i)
    for (std::size_t l = 0; l < i; ++l)
      if (e[i] == e[l]) throw std::invalid_argument("roots must be pairwise distinct");
  return RootSystem{g, std::move(e)};
}

inline RootSystem random_integer_roots(int g, SplitMix64& rng, long long lo = -50,
                                       long long hi = 50) {
  std::vector<Rat> e;
  for (long long v : rng.distinct(2 * g + 2, lo, hi)) e.push_back(Rat(static_cast<long>(v)));
  return make_roots(g, std::move(e));
}

// Ordered difference [ab] = e_max(a,b) - e_min(a,b) (by index).
inline Rat ordered_factor(const RootSystem& roots, int a, int b) {
  if (a == b) throw std::invalid_argument("ordered factor needs distinct indices");
  if (a < b) std::swap(a, b);
  return roots.e[a] - roots.e[b];
}

// Delta(I): product of ordered differences over index pairs inside I.
inline Rat vandermonde(const RootSystem& roots, const std::vector<int>& indices) {
  Rat prod = 1;
  for (std::size_t i = 0; i < indices.size(); ++i)
    for (std::size_t l = 0; l < i; ++l) prod *= ordered_factor(roots, indices[i], indices[l]);
  return prod;
}

inline std::vector<int> all_indices(int g) {
  std::vector<int> idx(2 * g + 2);
  for (int i = 0; i < 2 * g + 2; ++i) idx[i] = i;
  return idx;
}

inline Rat full_vandermonde(const RootSystem& roots) {
  return vandermonde(roots, all_indices(roots.g));
}

// Elementary symmetric polynomial s_k of the roots indexed by I;
// s_0 = 1, s_k = 0 outside 0 <= k <= |I|.
inline Rat elem_sym(const RootSystem& roots, const std::vector<int>& indices, int k) {
  if (k < 0 || k > static_cast<int>(indices.size())) return 0;
  std::vector<Rat> s(k + 1, 0);
  s[0] = 1;
  for (int idx : indices)
    for (int j = k; j >= 1; --j) s[j] += s[j - 1] * roots.e[idx];
  return s[k];
}

// S matrix of a multiplicity-2 partition side I2 (|I2| = g - 3):
//   S_ij = (-1)^{i+j} (2 s_{i-2} s_{j-2} - s_{i-1} s_{j-3} - s_{i-3} s_{j-1})
// with 1-based indices and s_k built on I2.  Symmetric by construction.
inline std::vector<Rat> s_matrix(const RootSystem& roots, const std::vector<int>& I2) {
  int g = roots.g;
  if (static_cast<int>(I2.size()) != (g >= 3 ? g - 3 : 0))
    throw std::invalid_argument("S matrix side must have g-3 indices");
  std::vector<Rat> s(g + 1, 0);
  for (int k = 0; k <= g; ++k) s[k] = elem_sym(roots, I2, k);
  auto sv = [&](int k) -> Rat { return (k < 0 || k > g) ? Rat(0) : s[k]; };
  std::vector<Rat> mat(g * g);
  for (int i = 1; i <= g; ++i)
    for (int j = 1; j <= g; ++j) {
      Rat v = 2 * sv(i - 2) * sv(j - 2) - sv(i - 1) * sv(j - 3) - sv(i - 3) * sv(j - 1);
      if ((i + j) & 1) v = -v;
      mat[(i - 1) * g + (j - 1)] = v;
    }
  return mat;
}

// Gradient direction of a first-derivative theta constant in the
// u frame: entry j (1-based) is (-1)^{j-1} s_{j-1}(I1).
inline std::vector<Rat> thomae_svector(const RootSystem& roots, const std::vector<int>& I1) {
  int g = roots.g;
  if (static_cast<int>(I1.size()) != g - 1)
    throw std::invalid_argument("gradient side must have g-1 indices");
  std::vector<Rat> v(g);
  for (int j = 1; j <= g; ++j) {
    Rat s = elem_sym(roots, I1, j - 1);
    v[j - 1] = (j % 2 == 0) ? -s : s;
  }
  return v;
}

// ---------------------------------------------------------------------------
// Exponent maps: quarter-integer powers of the ordered differences.

struct ExponentMap {
  int n = 0;               // number of root indices
  std::vector<int> q;      // quarter units; pair (i > l) stored at i(i-1)/2 + l

  explicit ExponentMap(int indices = 0) : n(indices), q(indices * (indices - 1) / 2, 0) {}

  int& at(int i, int l) {
    if (i == l || i >= n || l >= n || i < 0 || l < 0)
      throw std::invalid_argument("bad pair index");
    if (i < l) std::swap(i, l);
    return q[i * (i - 1) / 2 + l];
  }
  int get(int i, int l) const { return const_cast<ExponentMap*>(this)->at(i, l); }

  void add_within(const std::vector<int>& indices, int quarters) {
    for (std::size_t i = 0; i < indices.size(); ++i)
      for (std::size_t l = 0; l < i; ++l) at(indices[i], indices[l]) += quarters;
  }
  void add_all(int quarters) {
    for (int& v : q) v += quarters;
  }
  void add(const ExponentMap& other, int scale = 1) {
    if (other.n != n) throw std::invalid_argument("exponent map size mismatch");
    for (std::size_t i = 0; i < q.size(); ++i) q[i] += scale * other.q[i];
  }
  bool uniform(int quarters) const {
    for (int v : q)
      if (v != quarters) return false;
    return true;
  }
  long long total_quarters() const {
    long long t = 0;
    for (int v : q) t += v;
    return t;
  }
  friend bool operator==(const ExponentMap&, const ExponentMap&) = default;

  // Evaluates the product of ordered differences; all entries must be
  // multiples of 4 (integer powers).
  Rat evaluate(const RootSystem& roots) const {
    if (2 * roots.g + 2 != n) throw std::invalid_argument("root count mismatch");
    Rat prod = 1;
    int idx = 0;
    for (int i = 1; i < n; ++i)
      for (int l = 0; l < i; ++l, ++idx) {
        int quarters = q[idx];
        if (quarters % 4 != 0) throw std::logic_error("exponent map not integral");
        int e = quarters / 4;
        if (e == 0) continue;
        Rat f = ordered_factor(roots, i, l);
        for (int t = 0; t < std::abs(e); ++t) {
          if (e > 0) prod *= f;
          else prod /= f;
        }
      }
    return prod;
  }
};

// Quarter content of one even characteristic under the Thomae
// formulas: one quarter on every pair inside either side of its
// partition.
inline ExponentMap char_quarters(int g, const Char& c) {
  if (is_odd(c)) throw std::invalid_argument("quarter content needs an even characteristic");
  ExponentMap m(2 * g + 2);
  const PartitionClass& pc = partition_of_char(c);
  m.add_within(pc.indices, 1);
  m.add_within(partition_complement(g, pc.indices), 1);
  return m;
}

// ---------------------------------------------------------------------------
// Symbolic rho images.

struct RhoImage {
  int g = 0;
  int omega_half_power = 0;  // power of (det omega / pi^g)^{1/2}
  int inv_4ipi_power = 0;    // power of 1/(4 i pi)
  ExponentMap quarters;      // quarter units over the 2g+2 roots
  std::vector<std::vector<int>> matrix_factors;  // S-matrix sides (tau derivatives)
  std::vector<std::vector<int>> gradient_factors;  // s-vector sides (first derivatives)
};

// Nonsingular even theta constant: (det omega/pi^g)^{1/2} times the
// quarter-power content of its partition.
inline RhoImage rho_theta(int g, const Char& c) {
  if (multiplicity(c) != 0) throw std::invalid_argument("rho_theta needs multiplicity 0");
  RhoImage img;
  img.g = g;
  img.omega_half_power = 1;
  img.quarters = char_quarters(g, c);
  return img;
}

// Gradient of an odd multiplicity-1 theta constant.
inline RhoImage rho_dtheta(int g, const Char& c) {
  if (multiplicity(c) != 1) throw std::invalid_argument("rho_dtheta needs multiplicity 1");
  RhoImage img;
  img.g = g;
  img.omega_half_power = 1;
  // An odd characteristic vanishes to first order; its quarter content
  // uses both partition sides exactly like the even case.
  const PartitionClass& pc = partition_of_char(c);
  img.quarters = ExponentMap(2 * g + 2);
  img.quarters.add_within(pc.indices, 1);
  img.quarters.add_within(partition_complement(g, pc.indices), 1);
  img.gradient_factors.push_back(pc.indices);
  return img;
}

// First tau derivative of a singular multiplicity-2 theta constant.
inline RhoImage rho_d2theta(int g, const Char& c) {
  if (multiplicity(c) != 2) throw std::invalid_argument("rho_d2theta needs multiplicity 2");
  RhoImage img;
  img.g = g;
  img.omega_half_power = 1;
  img.inv_4ipi_power = 1;
  img.quarters = char_quarters(g, c);
  img.matrix_factors.push_back(partition_of_char(c).indices);
  return img;
}

// Product of theta constants, each singular member differentiated once
// in tau: the rho image of the lowest non-vanishing tau derivative of
// the monomial.
inline RhoImage rho_monomial(int g, const std::vector<Char>& chars) {
  RhoImage img;
  img.g = g;
  img.quarters = ExponentMap(2 * g + 2);
  for (const Char& c : chars) {
    int m = multiplicity(c);
    RhoImage part = m == 0 ? rho_theta(g, c) : m == 2 ? rho_d2theta(g, c) : rho_dtheta(g, c);
    img.omega_half_power += part.omega_half_power;
    img.inv_4ipi_power += part.inv_4ipi_power;
    img.quarters.add(part.quarters);
    for (auto& f : part.matrix_factors) img.matrix_factors.push_back(std::move(f));
    for (auto& f : part.gradient_factors) img.gradient_factors.push_back(std::move(f));
  }
  return img;
}

// ---------------------------------------------------------------------------
// Cached structure reports (the identity checks consume their witnesses).

inline const RankGStructureReport& cached_rank_g_report(int g) {
  static std::map<int, RankGStructureReport> cache;
  auto it = cache.find(g);
  if (it == cache.end()) it = cache.emplace(g, verify_structure_rank_g(g)).first;
  if (!it->second.ok)
    throw std::logic_error("rank-g structure verification failed: " + it->second.failure);
  return it->second;
}

inline const Rank2StructureReport& cached_rank2_report() {
  static Rank2StructureReport report = verify_structure_rank2_g3();
  if (!report.ok)
    throw std::logic_error("rank-2 structure verification failed: " + report.failure);
  return report;
}

// ---------------------------------------------------------------------------
// Quasi-invariant I1: sum over the 105 perfect matchings of the 8
// branch indices of the product of the four ordered pair differences.

namespace detail {

inline void for_each_matching(std::uint32_t remaining,
                              std::vector<std::array<int, 2>>& acc,
                              const std::function<void(const std::vector<std::array<int, 2>>&)>& fn) {
  if (!remaining) {
    fn(acc);
    return;
  }
  int first = std::countr_zero(remaining);
  std::uint32_t rest = remaining & ~(1u << first);
  for (int partner = first + 1; partner < 8; ++partner) {
    if (!((rest >> partner) & 1u)) continue;
    acc.push_back({first, partner});
    for_each_matching(rest & ~(1u << partner), acc, fn);
    acc.pop_back();
  }
}

}  // namespace detail

inline Rat quasi_invariant_I1(const RootSystem& roots) {
  if (roots.g != 3) throw std::invalid_argument("I1 is defined for genus 3");
  Rat sum = 0;
  std::vector<std::array<int, 2>> acc;
  detail::for_each_matching(0xffu, acc, [&](const std::vector<std::array<int, 2>>& m) {
    Rat term = 1;
    for (const auto& p : m) term *= ordered_factor(roots, p[0], p[1]);
    sum += term;
  });
  return sum;
}

// Same sum built from the pair-partition witnesses of the rank-2
// structure: an independent construction of the same 105 terms.
inline Rat quasi_invariant_I1_from_witnesses(const RootSystem& roots) {
  if (roots.g != 3) throw std::invalid_argument("I1 is defined for genus 3");
  Rat sum = 0;
  for (const PairPartitionWitness& wit : cached_rank2_report().witnesses) {
    Rat term = 1;
    for (const auto& p : wit.pairs) term *= ordered_factor(roots, p[0], p[1]);
    sum += term;
  }
  return sum;
}

// ---------------------------------------------------------------------------
// Exact identities.

struct IdentityReport {
  std::string name;
  bool pass = false;
  long long cases = 0;         // sub-identities checked
  int sign = 0;                // +1 when values agree exactly, -1 up to sign, 0 mixed
  bool exponents_match = false;
  std::string detail;
};

namespace detail {

inline void combine_sign(IdentityReport& rep, const Rat& lhs, const Rat& rhs) {
  int s = lhs == rhs ? 1 : (lhs == -rhs ? -1 : 0);
  if (s == 0) {
    rep.pass = false;
    rep.sign = 0;
    return;
  }
  if (rep.sign == 0) rep.sign = s;
  else if (rep.sign != s) rep.sign = 0;  // mixed signs across cases
  if (s == 0) rep.pass = false;
}

inline ExponentMap monomial_quarters(int g, const std::vector<Char>& chars) {
  ExponentMap sum(2 * g + 2);
  for (const Char& c : chars) sum.add(char_quarters(g, c));
  return sum;
}

inline Rat monomial_value(const RootSystem& roots, const std::vector<Char>& chars) {
  Rat prod = 1;
  for (const Char& c : chars) {
    const PartitionClass& pc = partition_of_char(c);
    prod *= vandermonde(roots, pc.indices);
    prod *= vandermonde(roots, partition_complement(roots.g, pc.indices));
  }
  return prod;
}

inline std::vector<Char> all_even_chars(int g) {
  std::vector<Char> out;
  for (std::uint32_t code = 0; code < (1u << (2 * g)); ++code) {
    Char c = char_from_code(g, code);
    if (!is_odd(c)) out.push_back(c);
  }
  return out;
}

inline Rat rat_pow(Rat base, int e) {
  Rat r = 1;
  for (int i = 0; i < std::abs(e); ++i) {
    if (e > 0) r *= base;
    else r /= base;
  }
  return r;
}

}  // namespace detail

// Checks one named identity on one root system.  Each check compares
// exponent maps structurally (an identity of rational functions) and
// evaluates both sides exactly.
inline IdentityReport verify_identity(const std::string& name, const RootSystem& roots) {
  IdentityReport rep;
  rep.name = name;
  rep.pass = true;
  rep.exponents_match = true;
  int g = roots.g;
  int n = 2 * g + 2;

  auto require_genus = [&](int want) {
    if (g != want)
      throw std::invalid_argument("identity " + name + " needs genus " + std::to_string(want));
  };

  if (name == "chi4") {
    // Each of the 30 singular rank-3 systems: the monomial's quarter
    // content is the full discriminant, uniformly one unit per pair.
    require_genus(3);
    Rat target = detail::rat_pow(full_vandermonde(roots), 4);
    for (const SingularSystemWitness& wit : cached_rank_g_report(3).witnesses) {
      ExponentMap lhs = detail::monomial_quarters(g, wit.elements);
      if (!lhs.uniform(4)) rep.exponents_match = rep.pass = false;
      detail::combine_sign(rep, detail::monomial_value(roots, wit.elements), target);
      ++rep.cases;
    }
    rep.detail = "30 systems, degree 112 = 4 x 28";
  } else if (name == "chi18") {
    require_genus(3);
    std::vector<Char> evens = detail::all_even_chars(3);
    ExponentMap lhs = detail::monomial_quarters(g, evens);
    if (!lhs.uniform(16)) rep.exponents_match = rep.pass = false;
    detail::combine_sign(rep, detail::monomial_value(roots, evens),
                         detail::rat_pow(full_vandermonde(roots), 16));
    rep.cases = 1;
    rep.detail = "36 even characteristics, degree 448 = 16 x 28";
  } else if (name == "chi68") {
    require_genus(4);
    std::vector<Char> evens = detail::all_even_chars(4);
    ExponentMap lhs = detail::monomial_quarters(g, evens);
    if (!lhs.uniform(64)) rep.exponents_match = rep.pass = false;
    detail::combine_sign(rep, detail::monomial_value(roots, evens),
                         detail::rat_pow(full_vandermonde(roots), 64));
    rep.cases = 1;
    rep.detail = "136 even characteristics, degree 2880 = 64 x 45";
  } else if (name == "phi2_equal") {
    // The two transversal classes of every pair partition carry equal
    // quarter content.
    require_genus(3);
    for (const PairPartitionWitness& wit : cached_rank2_report().witnesses) {
      ExponentMap a = detail::monomial_quarters(g, wit.transversal_a);
      ExponentMap b = detail::monomial_quarters(g, wit.transversal_b);
      if (!(a == b)) rep.exponents_match = rep.pass = false;
      detail::combine_sign(rep, detail::monomial_value(roots, wit.transversal_a),
                           detail::monomial_value(roots, wit.transversal_b));
      ++rep.cases;
    }
    rep.detail = "105 pair partitions";
  } else if (name == "h0") {
    // Quotient identity: the singular system's content over either
    // transversal class reduces to the fourth power of the product of
    // the four pair differences.
    require_genus(3);
    for (const PairPartitionWitness& wit : cached_rank2_report().witnesses) {
      ExponentMap target(n);
      Rat pair_prod = 1;
      for (const auto& p : wit.pairs) {
        target.at(p[1], p[0]) += 4;  // each pair difference to the first power
        pair_prod *= ordered_factor(roots, p[0], p[1]);
      }
      ExponentMap numer(n);
      numer.add_all(1);  // quarter content of the singular member's tau derivative
      for (const Char& c : wit.singular_system)
        if (multiplicity(c) == 0) numer.add(char_quarters(g, c));
      Rat numer_value = full_vandermonde(roots);
      for (const Char& c : wit.singular_system)
        if (multiplicity(c) == 0) {
          const PartitionClass& pc = partition_of_char(c);
          numer_value *= vandermonde(roots, pc.indices);
          numer_value *= vandermonde(roots, partition_complement(g, pc.indices));
        }
      for (const std::vector<Char>* cls : {&wit.transversal_a, &wit.transversal_b}) {
        ExponentMap lhs = numer;
        lhs.add(detail::monomial_quarters(g, *cls), -1);
        if (!(lhs == target)) rep.exponents_match = rep.pass = false;
        Rat lhs_value = numer_value / detail::monomial_value(roots, *cls);
        detail::combine_sign(rep, lhs_value, detail::rat_pow(pair_prod, 4));
        ++rep.cases;
      }
    }
    rep.detail = "105 partitions x 2 transversal classes, degree 16 = 4 x 4";
  } else if (name == "mu8") {
    require_genus(4);
    for (const SingularSystemWitness& wit : cached_rank_g_report(4).witnesses) {
      ExponentMap target(n);
      target.add_all(8);
      target.at(wit.kappa[1], wit.kappa[0]) = 0;
      ExponentMap lhs = detail::monomial_quarters(g, wit.elements);
      if (!(lhs == target)) rep.exponents_match = rep.pass = false;
      Rat rhs = detail::rat_pow(full_vandermonde(roots), 8) /
                detail::rat_pow(ordered_factor(roots, wit.kappa[0], wit.kappa[1]), 8);
      detail::combine_sign(rep, detail::monomial_value(roots, wit.elements), rhs);
      ++rep.cases;
    }
    rep.detail = "1350 systems, degree 352 = 8 x 44";
  } else if (name == "I1_translation") {
    require_genus(3);
    Rat base = quasi_invariant_I1(roots);
    RootSystem shifted = roots;
    Rat c(7, 3);
    for (Rat& v : shifted.e) v += c;
    rep.pass = quasi_invariant_I1(shifted) == base;
    rep.sign = rep.pass ? 1 : 0;
    rep.exponents_match = rep.pass;
    rep.cases = 1;
    rep.detail = "I1(e + c) = I1(e)";
  } else {
    throw std::invalid_argument("unknown identity " + name);
  }
  if (rep.sign == 0) rep.pass = false;
  return rep;
}

inline std::vector<std::string> identity_names(int g) {
  if (g == 3) return {"chi4", "chi18", "phi2_equal", "h0", "I1_translation"};
  if (g == 4) return {"mu8", "chi68"};
  return {};
}

// ---------------------------------------------------------------------------
// Further I1 properties: homogeneity, Moebius covariance, asymmetry.

struct I1Properties {
  bool translation = false;
  bool homogeneity = false;   // I1(lambda e) = lambda^4 I1(e)
  bool moebius = false;       // I1(e~) prod(c e_i + d) = (ad - bc)^4 I1(e)
  bool witnesses_agree = false;
  bool asymmetric = false;    // some root transposition changes the value
  int moebius_weight = 1, moebius_degree = 4;
};

inline I1Properties check_I1_properties(const RootSystem& roots, SplitMix64& rng) {
  if (roots.g != 3) throw std::invalid_argument("I1 is defined for genus 3");
  I1Properties props;
  Rat base = quasi_invariant_I1(roots);
  props.witnesses_agree = quasi_invariant_I1_from_witnesses(roots) == base;

  RootSystem shifted = roots;
  for (Rat& v : shifted.e) v += Rat(5, 7);
  props.translation = quasi_invariant_I1(shifted) == base;

  RootSystem scaled = roots;
  Rat lambda(3, 2);
  for (Rat& v : scaled.e) v *= lambda;
  props.homogeneity = quasi_invariant_I1(scaled) == detail::rat_pow(lambda, 4) * base;

  // Random Moebius map avoiding poles at the roots.
  for (int attempt = 0; attempt < 64 && !props.moebius; ++attempt) {
    Rat a(static_cast<long>(rng.range(-9, 9))), b(static_cast<long>(rng.range(-9, 9)));
    Rat c(static_cast<long>(rng.range(-9, 9))), d(static_cast<long>(rng.range(-9, 9)));
    Rat det = a * d - b * c;
    if (det == 0) continue;
    bool pole = false;
    RootSystem moved = roots;
    Rat jac = 1;
    for (Rat& v : moved.e) {
      Rat den = c * v + d;
      if (den == 0) {
        pole = true;
        break;
      }
      jac *= den;
      v = (a * v + b) / den;
    }
    if (pole) continue;
    props.moebius = quasi_invariant_I1(moved) * jac == detail::rat_pow(det, 4) * base;
    break;
  }

  for (int i = 0; i < 7 && !props.asymmetric; ++i) {
    RootSystem swapped = roots;
    std::swap(swapped.e[i], swapped.e[i + 1]);
    props.asymmetric = quasi_invariant_I1(swapped) != base;
  }
  return props;
}

}  // namespace hyptheta

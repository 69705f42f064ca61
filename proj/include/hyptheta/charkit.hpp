#pragma once

// Half-integer theta characteristics of a hyperelliptic curve of genus g,
// their parity and pairing combinatorics, the dictionary between
// characteristics and partitions of the 2g+2 branch indices, and the
// affine action of the integer symplectic group on characteristics.
//
// A characteristic is a 2 x g bit matrix [eps'; eps].  The top row eps'
// multiplies the tau-periods, the bottom row eps the unit periods.  Rows
// are stored as bitmasks with bit j-1 holding column j, so column 1 is
// the least significant bit and the leftmost digit of the string form.

#include <algorithm>
#include <bit>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace hyptheta {

constexpr int kMaxGenus = 8;

struct Char {
  int g = 0;
  std::uint32_t top = 0;     // eps' row
  std::uint32_t bottom = 0;  // eps row
  friend bool operator==(const Char&, const Char&) = default;
};

inline void check_genus(int g) {
  if (g < 1 || g > kMaxGenus) throw std::invalid_argument("genus out of range");
}

inline std::uint32_t row_mask(int g) { return (1u << g) - 1u; }

inline Char char_zero(int g) {
  check_genus(g);
  return Char{g, 0, 0};
}

// Group law: rows add mod 2.
inline Char char_add(const Char& x, const Char& y) {
  if (x.g != y.g) throw std::invalid_argument("genus mismatch");
  return Char{x.g, x.top ^ y.top, x.bottom ^ y.bottom};
}

// Dense index: top row bits above bottom row bits, 0 .. 4^g - 1.
inline std::uint32_t char_code(const Char& c) {
  return (c.top << c.g) | c.bottom;
}

inline Char char_from_code(int g, std::uint32_t code) {
  check_genus(g);
  return Char{g, code >> g, code & row_mask(g)};
}

inline bool char_less(const Char& x, const Char& y) {
  return char_code(x) < char_code(y);
}

// A characteristic is odd iff eps . eps' is odd; odd ones are exactly
// those whose theta function vanishes at the origin.
inline int parity(const Char& c) {
  return std::popcount(c.top & c.bottom) & 1;
}

inline bool is_odd(const Char& c) { return parity(c) == 1; }

// Alternating bilinear pairing |P,Q| = p.q' - p'.q mod 2 (p = bottom
// row of P, p' = top row).  |P,P| = 0.
inline int pairing(const Char& p, const Char& q) {
  if (p.g != q.g) throw std::invalid_argument("genus mismatch");
  return (std::popcount(p.bottom & q.top) + std::popcount(p.top & q.bottom)) & 1;
}

// |P,Q,R| = |P,Q| + |P,R| + |Q,R| mod 2; 0 means the triple is
// syzygetic, 1 azygetic.  Unlike the bare pairing, this is invariant
// under a common translation of all three arguments.
inline int triple_relation(const Char& p, const Char& q, const Char& r) {
  return (pairing(p, q) + pairing(p, r) + pairing(q, r)) & 1;
}

// String form "t1..tg/b1..bg", column 1 first, e.g. "111/101".
inline std::string to_string(const Char& c) {
  std::string s;
  for (int j = 0; j < c.g; ++j) s += ((c.top >> j) & 1u) ? '1' : '0';
  s += '/';
  for (int j = 0; j < c.g; ++j) s += ((c.bottom >> j) & 1u) ? '1' : '0';
  return s;
}

inline Char parse_char(const std::string& s) {
  auto slash = s.find('/');
  if (slash == std::string::npos || slash == 0 || slash * 2 + 1 != s.size())
    throw std::invalid_argument("characteristic must look like 101/110");
  int g = static_cast<int>(slash);
  check_genus(g);
  Char c{g, 0, 0};
  for (int j = 0; j < g; ++j) {
    char t = s[j], b = s[slash + 1 + j];
    if ((t != '0' && t != '1') || (b != '0' && b != '1'))
      throw std::invalid_argument("characteristic digits must be 0 or 1");
    if (t == '1') c.top |= 1u << j;
    if (b == '1') c.bottom |= 1u << j;
  }
  return c;
}

// Characteristic of branch point k, 0 <= k <= 2g+1, fixed by the curve
// marking: the image of branch point k under the Abel map based at
// branch point 0 is the half period with these rows.
//   k = 0:      [0; 0]
//   k = 2m-1:   [delta_m; 1..1 0..0] with m-1 leading ones (even)
//   k = 2m:     [delta_m; 1..1 0..0] with m   leading ones (odd)
//   k = 2g+1:   [0; 1..1]                                  (even)
inline Char branch_char(int g, int k) {
  check_genus(g);
  if (k < 0 || k > 2 * g + 1) throw std::invalid_argument("branch index out of range");
  if (k == 0) return Char{g, 0, 0};
  if (k == 2 * g + 1) return Char{g, 0, row_mask(g)};
  int m = (k + 1) / 2;  // k = 2m-1 or k = 2m
  std::uint32_t ones = (k % 2 == 0) ? ((1u << m) - 1u) : ((1u << (m - 1)) - 1u);
  return Char{g, 1u << (m - 1), ones};
}

// Riemann constant characteristic [K] = sum of the g odd branch
// characteristics [eps_2], [eps_4], ..., [eps_2g].
inline Char k_char(int g) {
  Char k = char_zero(g);
  for (int m = 1; m <= g; ++m) k = char_add(k, branch_char(g, 2 * m));
  return k;
}

// ---------------------------------------------------------------------------
// Partition avatar.  Each characteristic equals [I] = sum_{i in I}
// [eps_i] + [K] for exactly one unordered splitting {I, J} of the
// branch indices {0, ..., 2g+1} with |I| = g+1-2m, |J| = g+1+2m.  The
// canonical representative is the side of size <= g+1, and for m = 0
// (both sides of size g+1) the side containing index 0.  The integer
// m >= 0 is the multiplicity: the theta function of the characteristic
// vanishes at the origin to order exactly m.

struct PartitionClass {
  std::vector<int> indices;  // canonical representative, ascending
  int m = 0;
};

namespace detail {

// Applies fn to every subset mask of {0,...,n-1} with k elements.
template <typename Fn>
void for_each_subset(int n, int k, Fn fn) {
  std::uint32_t limit = 1u << n;
  for (std::uint32_t mask = 0; mask < limit; ++mask)
    if (std::popcount(mask) == k) fn(mask);
}

inline std::vector<int> mask_to_indices(std::uint32_t mask) {
  std::vector<int> out;
  for (int i = 0; i < 32; ++i)
    if ((mask >> i) & 1u) out.push_back(i);
  return out;
}

}  // namespace detail

struct PartitionTable {
  int g = 0;
  std::vector<PartitionClass> by_code;  // indexed by char_code
};

inline Char char_of_partition(int g, const std::vector<int>& indices);

// Table mapping every characteristic code to its canonical partition.
// Built once per genus; construction verifies the correspondence is a
// bijection onto all 4^g characteristics.
inline const PartitionTable& partition_table(int g) {
  check_genus(g);
  static std::map<int, PartitionTable> cache;
  auto it = cache.find(g);
  if (it != cache.end()) return it->second;

  PartitionTable table;
  table.g = g;
  table.by_code.assign(1u << (2 * g), PartitionClass{});
  std::vector<bool> seen(1u << (2 * g), false);
  int n = 2 * g + 2;
  for (int m = 0; 2 * m <= g + 1; ++m) {
    int size = g + 1 - 2 * m;
    detail::for_each_subset(n, size, [&](std::uint32_t mask) {
      if (m == 0 && !(mask & 1u)) return;  // canonical m = 0 side holds index 0
      std::vector<int> indices = detail::mask_to_indices(mask);
      Char c = char_of_partition(g, indices);
      std::uint32_t code = char_code(c);
      if (seen[code]) throw std::logic_error("partition dictionary not injective");
      seen[code] = true;
      table.by_code[code] = PartitionClass{std::move(indices), m};
    });
  }
  for (bool s : seen)
    if (!s) throw std::logic_error("partition dictionary not surjective");
  return cache.emplace(g, std::move(table)).first->second;
}

inline Char char_of_partition(int g, const std::vector<int>& indices) {
  check_genus(g);
  Char c = k_char(g);
  std::uint32_t mask = 0;
  for (int i : indices) {
    if (i < 0 || i > 2 * g + 1) throw std::invalid_argument("branch index out of range");
    if ((mask >> i) & 1u) throw std::invalid_argument("duplicate branch index");
    mask |= 1u << i;
    c = char_add(c, branch_char(g, i));
  }
  int size = static_cast<int>(indices.size());
  if ((g + 1 - size) % 2 != 0)
    throw std::invalid_argument("partition size must have the parity of g+1");
  return c;
}

inline const PartitionClass& partition_of_char(const Char& c) {
  return partition_table(c.g).by_code[char_code(c)];
}

// Multiplicity of a characteristic: vanishing order of its theta value
// at the origin, read off from the partition dictionary.
inline int multiplicity(const Char& c) { return partition_of_char(c).m; }

inline std::vector<int> partition_complement(int g, const std::vector<int>& indices) {
  std::uint32_t mask = 0;
  for (int i : indices) mask |= 1u << i;
  std::vector<int> out;
  for (int i = 0; i < 2 * g + 2; ++i)
    if (!((mask >> i) & 1u)) out.push_back(i);
  return out;
}

// Counts of even and odd characteristics: 2^{g-1}(2^g + 1) and
// 2^{g-1}(2^g - 1).
struct ParityCensus {
  long long even = 0;
  long long odd = 0;
};

inline ParityCensus parity_census(int g) {
  check_genus(g);
  ParityCensus census;
  for (std::uint32_t code = 0; code < (1u << (2 * g)); ++code) {
    if (is_odd(char_from_code(g, code)))
      ++census.odd;
    else
      ++census.even;
  }
  return census;
}

// Number of characteristics of each multiplicity m.
inline std::map<int, long long> multiplicity_census(int g) {
  std::map<int, long long> census;
  const PartitionTable& table = partition_table(g);
  for (const PartitionClass& pc : table.by_code) ++census[pc.m];
  return census;
}

// ---------------------------------------------------------------------------
// Integer symplectic group Sp(2g, Z), block form [[a, b], [c, d]],
// acting on characteristics by the affine transformation below and on
// period matrices by tau -> (a tau + b)(c tau + d)^{-1}.

struct Symplectic {
  int g = 0;
  std::vector<int> a, b, c, d;  // row-major g x g integer blocks
};

namespace detail {

inline int at(const std::vector<int>& mat, int g, int i, int j) {
  return mat[i * g + j];
}

// Entry (i,j) of x^t y for g x g blocks.
inline long long tdot(const std::vector<int>& x, const std::vector<int>& y, int g,
                      int i, int j) {
  long long s = 0;
  for (int k = 0; k < g; ++k) s += static_cast<long long>(at(x, g, k, i)) * at(y, g, k, j);
  return s;
}

}  // namespace detail

// Validates the defining relations a^t c = c^t a, b^t d = d^t b,
// a^t d - c^t b = 1.
inline Symplectic make_symplectic(int g, std::vector<int> a, std::vector<int> b,
                                  std::vector<int> c, std::vector<int> d) {
  check_genus(g);
  std::size_t len = static_cast<std::size_t>(g) * g;
  if (a.size() != len || b.size() != len || c.size() != len || d.size() != len)
    throw std::invalid_argument("block size mismatch");
  for (int i = 0; i < g; ++i)
    for (int j = 0; j < g; ++j) {
      if (detail::tdot(a, c, g, i, j) != detail::tdot(c, a, g, i, j))
        throw std::invalid_argument("a^t c not symmetric");
      if (detail::tdot(b, d, g, i, j) != detail::tdot(d, b, g, i, j))
        throw std::invalid_argument("b^t d not symmetric");
      if (detail::tdot(a, d, g, i, j) - detail::tdot(c, b, g, i, j) != (i == j ? 1 : 0))
        throw std::invalid_argument("a^t d - c^t b != 1");
    }
  return Symplectic{g, std::move(a), std::move(b), std::move(c), std::move(d)};
}

inline Symplectic sp_identity(int g) {
  std::vector<int> id(g * g, 0), zero(g * g, 0);
  for (int i = 0; i < g; ++i) id[i * g + i] = 1;
  return make_symplectic(g, id, zero, zero, id);
}

// Exchange generator [[0, 1], [-1, 0]]: swaps the two rows of every
// characteristic and sends tau to -tau^{-1}.
inline Symplectic sp_exchange(int g) {
  std::vector<int> id(g * g, 0), nid(g * g, 0), zero(g * g, 0);
  for (int i = 0; i < g; ++i) {
    id[i * g + i] = 1;
    nid[i * g + i] = -1;
  }
  return make_symplectic(g, zero, id, nid, zero);
}

// Shear generator [[1, b], [0, 1]] with b the elementary symmetric
// matrix E_kk (k = l) or E_kl + E_lk (k != l); tau -> tau + b.  These
// shears together with the exchange generate Sp(2g, Z).
inline Symplectic sp_shear(int g, int k, int l) {
  check_genus(g);
  if (k < 1 || k > g || l < 1 || l > g) throw std::invalid_argument("shear index out of range");
  std::vector<int> id(g * g, 0), zero(g * g, 0), b(g * g, 0);
  for (int i = 0; i < g; ++i) id[i * g + i] = 1;
  b[(k - 1) * g + (l - 1)] = 1;
  b[(l - 1) * g + (k - 1)] = 1;
  if (k == l) b[(k - 1) * g + (k - 1)] = 1;
  return make_symplectic(g, id, std::move(b), zero, id);
}

inline Symplectic sp_mul(const Symplectic& x, const Symplectic& y) {
  if (x.g != y.g) throw std::invalid_argument("genus mismatch");
  int g = x.g;
  std::vector<int> a(g * g), b(g * g), c(g * g), d(g * g);
  for (int i = 0; i < g; ++i)
    for (int j = 0; j < g; ++j) {
      long long sa = 0, sb = 0, sc = 0, sd = 0;
      for (int k = 0; k < g; ++k) {
        sa += static_cast<long long>(detail::at(x.a, g, i, k)) * detail::at(y.a, g, k, j) +
              static_cast<long long>(detail::at(x.b, g, i, k)) * detail::at(y.c, g, k, j);
        sb += static_cast<long long>(detail::at(x.a, g, i, k)) * detail::at(y.b, g, k, j) +
              static_cast<long long>(detail::at(x.b, g, i, k)) * detail::at(y.d, g, k, j);
        sc += static_cast<long long>(detail::at(x.c, g, i, k)) * detail::at(y.a, g, k, j) +
              static_cast<long long>(detail::at(x.d, g, i, k)) * detail::at(y.c, g, k, j);
        sd += static_cast<long long>(detail::at(x.c, g, i, k)) * detail::at(y.b, g, k, j) +
              static_cast<long long>(detail::at(x.d, g, i, k)) * detail::at(y.d, g, k, j);
      }
      a[i * g + j] = static_cast<int>(sa);
      b[i * g + j] = static_cast<int>(sb);
      c[i * g + j] = static_cast<int>(sc);
      d[i * g + j] = static_cast<int>(sd);
    }
  return make_symplectic(g, std::move(a), std::move(b), std::move(c), std::move(d));
}

// Characteristic transported by gamma: the result labels at gamma<tau>
// the same theta function the input labels at tau.  Rows transform as
//   top'    = d eps' - c eps + diag(c^t d)
//   bottom' = -b eps' + a eps + diag(a^t b)      (all mod 2).
// Composing actions of gamma_1 then gamma_2 gives the action of
// gamma_2 gamma_1.
inline Char gamma_action(const Symplectic& gamma, const Char& ch) {
  if (gamma.g != ch.g) throw std::invalid_argument("genus mismatch");
  int g = gamma.g;
  Char out{g, 0, 0};
  for (int j = 0; j < g; ++j) {
    long long t = detail::tdot(gamma.c, gamma.d, g, j, j);
    long long bo = detail::tdot(gamma.a, gamma.b, g, j, j);
    for (int i = 0; i < g; ++i) {
      int epsp = (ch.top >> i) & 1, eps = (ch.bottom >> i) & 1;
      t += static_cast<long long>(detail::at(gamma.d, g, j, i)) * epsp -
           static_cast<long long>(detail::at(gamma.c, g, j, i)) * eps;
      bo += -static_cast<long long>(detail::at(gamma.b, g, j, i)) * epsp +
            static_cast<long long>(detail::at(gamma.a, g, j, i)) * eps;
    }
    if (((t % 2) + 2) % 2) out.top |= 1u << j;
    if (((bo % 2) + 2) % 2) out.bottom |= 1u << j;
  }
  return out;
}

}  // namespace hyptheta

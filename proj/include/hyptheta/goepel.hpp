#pragma once

// Goepel groups and systems.  A Goepel group of rank r is a rank-r
// subgroup of the characteristic group on which the pairing vanishes
// identically (an isotropic subgroup); a Goepel system is a coset of
// such a group.  This header enumerates groups, decomposes the
// characteristic group into the cosets of each, classifies systems by
// parity and multiplicity content, and verifies the combinatorial
// structure of the wholly even systems containing singular
// characteristics, extracting the index-partition witnesses that drive
// the polynomial identities of the rho map.

#include <hyptheta/charkit.hpp>

#include <algorithm>
#include <array>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace hyptheta {

struct GoepelGroup {
  int g = 0, r = 0;
  std::vector<Char> generators;  // the basis found by the enumerator
  std::vector<Char> elements;    // all 2^r elements, sorted by code
};

enum class SystemType { wholly_even, wholly_odd, mixed };

struct GoepelSystem {
  int g = 0, r = 0;
  std::vector<Char> elements;  // sorted by code
  SystemType type = SystemType::mixed;
  int odd_count = 0;
  std::map<int, int> multiplicity_profile;  // multiplicity m -> count

  bool singular() const {
    for (const auto& [m, n] : multiplicity_profile)
      if (m >= 2 && n > 0) return true;
    return false;
  }
};

inline int code_pairing(std::uint32_t x, std::uint32_t y, int g) {
  std::uint32_t xt = x >> g, xb = x & row_mask(g);
  std::uint32_t yt = y >> g, yb = y & row_mask(g);
  return (std::popcount(xb & yt) + std::popcount(xt & yb)) & 1;
}

// Number of rank-r isotropic subgroups: the ordered isotropic bases
// divided by the ordered bases per subgroup.
inline long long isotropic_subgroup_count(int g, int r) {
  check_genus(g);
  if (r < 1 || r > g) throw std::invalid_argument("rank out of range");
  if (g > 5) throw std::invalid_argument("count formula guarded to genus 5");
  long long num = 1, den = 1;
  for (int t = 0; t < r; ++t) {
    num *= (1ll << (2 * g - t)) - (1ll << t);
    den *= (1ll << r) - (1ll << t);
  }
  return num / den;
}

// Enumerates every rank-r Goepel group exactly once.  Generators are
// grown in increasing code order, each minimal in its coset modulo the
// span so far; the greedy minimal basis of any group survives this
// pruning, and the final set-of-elements key removes the remaining
// duplicates.
inline std::vector<GoepelGroup> enumerate_groups(int g, int r) {
  check_genus(g);
  if (r < 1 || r > g) throw std::invalid_argument("rank out of range");
  std::uint32_t n = 1u << (2 * g);
  std::set<std::vector<std::uint32_t>> seen;
  std::vector<GoepelGroup> out;
  std::vector<std::uint32_t> gens;
  std::vector<std::uint32_t> span{0};

  auto extend = [&](auto&& self) -> void {
    if (static_cast<int>(gens.size()) == r) {
      std::vector<std::uint32_t> key = span;
      std::sort(key.begin(), key.end());
      if (seen.insert(key).second) {
        GoepelGroup grp;
        grp.g = g;
        grp.r = r;
        for (std::uint32_t c : gens) grp.generators.push_back(char_from_code(g, c));
        for (std::uint32_t c : key) grp.elements.push_back(char_from_code(g, c));
        out.push_back(std::move(grp));
      }
      return;
    }
    for (std::uint32_t cand = gens.empty() ? 1 : gens.back() + 1; cand < n; ++cand) {
      bool ok = true;
      for (std::uint32_t s : span) {
        std::uint32_t moved = cand ^ s;
        if (moved == 0 || moved < cand) {  // inside span, or not minimal in coset
          ok = false;
          break;
        }
      }
      if (ok)
        for (std::uint32_t t : gens)
          if (code_pairing(cand, t, g)) {
            ok = false;
            break;
          }
      if (!ok) continue;
      std::size_t old = span.size();
      for (std::size_t i = 0; i < old; ++i) span.push_back(span[i] ^ cand);
      gens.push_back(cand);
      self(self);
      gens.pop_back();
      span.resize(old);
    }
  };
  extend(extend);
  return out;
}

// Decomposes the whole characteristic group into the 2^{2g-r} cosets of
// the given group, classifying each.
inline std::vector<GoepelSystem> systems_of_group(const GoepelGroup& grp) {
  int g = grp.g;
  std::uint32_t n = 1u << (2 * g);
  std::vector<std::uint32_t> elems;
  for (const Char& c : grp.elements) elems.push_back(char_code(c));
  std::vector<bool> visited(n, false);
  std::vector<GoepelSystem> out;
  for (std::uint32_t base = 0; base < n; ++base) {
    if (visited[base]) continue;
    GoepelSystem sys;
    sys.g = g;
    sys.r = grp.r;
    std::vector<std::uint32_t> codes;
    for (std::uint32_t e : elems) {
      std::uint32_t c = base ^ e;
      visited[c] = true;
      codes.push_back(c);
    }
    std::sort(codes.begin(), codes.end());
    for (std::uint32_t c : codes) {
      Char ch = char_from_code(g, c);
      if (is_odd(ch)) ++sys.odd_count;
      ++sys.multiplicity_profile[multiplicity(ch)];
      sys.elements.push_back(ch);
    }
    sys.type = sys.odd_count == 0 ? SystemType::wholly_even
               : sys.odd_count == static_cast<int>(codes.size()) ? SystemType::wholly_odd
                                                                 : SystemType::mixed;
    out.push_back(std::move(sys));
  }
  return out;
}

struct SystemTypeCensus {
  long long wholly_even = 0, wholly_odd = 0, mixed = 0;
  friend bool operator==(const SystemTypeCensus&, const SystemTypeCensus&) = default;
};

inline SystemTypeCensus census_systems(const std::vector<GoepelSystem>& systems) {
  SystemTypeCensus census;
  for (const GoepelSystem& s : systems) {
    if (s.type == SystemType::wholly_even) ++census.wholly_even;
    else if (s.type == SystemType::wholly_odd) ++census.wholly_odd;
    else ++census.mixed;
  }
  return census;
}

// Per-group closed forms with s = g - r: 2^{s-1}(2^s + 1) wholly even,
// 2^{s-1}(2^s - 1) wholly odd, 2^{2s}(2^r - 1) mixed cosets.
inline SystemTypeCensus expected_census_per_group(int g, int r) {
  int s = g - r;
  long long h = 1ll << s;
  return SystemTypeCensus{h * (h + 1) / 2, h * (h - 1) / 2, h * h * ((1ll << r) - 1)};
}

// ---------------------------------------------------------------------------
// Classification of wholly even systems by multiplicity profile.

struct WhollyEvenClassification {
  int g = 0, r = 0;
  long long group_count = 0;
  bool census_ok = true;  // every group matched the per-group closed forms
  std::string failure;
  std::map<std::map<int, int>, long long> profile_census;
  std::vector<GoepelSystem> plain;     // wholly even, all multiplicities 0
  std::vector<GoepelSystem> singular;  // wholly even with a multiplicity >= 2 member
  // Filled when r == g-1 (three wholly even systems per group): how many
  // groups have all three plain, and how many exactly one singular.
  long long plain_groups = 0, one_singular_groups = 0, other_groups = 0;
};

inline WhollyEvenClassification classify_wholly_even(int g, int r,
                                                     const std::vector<GoepelGroup>& groups) {
  WhollyEvenClassification cls;
  cls.g = g;
  cls.r = r;
  cls.group_count = static_cast<long long>(groups.size());
  SystemTypeCensus expected = expected_census_per_group(g, r);
  for (const GoepelGroup& grp : groups) {
    std::vector<GoepelSystem> systems = systems_of_group(grp);
    if (cls.census_ok && !(census_systems(systems) == expected)) {
      cls.census_ok = false;
      std::ostringstream msg;
      msg << "coset census mismatch for group with generators";
      for (const Char& c : grp.generators) msg << ' ' << to_string(c);
      cls.failure = msg.str();
    }
    int singular_here = 0;
    for (GoepelSystem& sys : systems) {
      if (sys.type != SystemType::wholly_even) continue;
      ++cls.profile_census[sys.multiplicity_profile];
      if (sys.singular()) {
        ++singular_here;
        cls.singular.push_back(std::move(sys));
      } else {
        cls.plain.push_back(std::move(sys));
      }
    }
    if (r == g - 1) {
      if (singular_here == 0) ++cls.plain_groups;
      else if (singular_here == 1) ++cls.one_singular_groups;
      else ++cls.other_groups;
    }
  }
  return cls;
}

inline WhollyEvenClassification classify_wholly_even(int g, int r) {
  return classify_wholly_even(g, r, enumerate_groups(g, r));
}

// ---------------------------------------------------------------------------
// Structure of singular wholly even systems of rank g (genus 3 rank 3,
// genus 4 rank 4).  Away from the singular members, the system is an
// interlocking grid over an 8-index set R: one anchor split of R into
// sides A and B of size 4, plus six mixed splits obtained by matching
// the three 2+2 splittings of A with those of B.  Every one of the
// seven splits can serve as the anchor, which is why 35 splits times 6
// matchings construct each system exactly 7 times.

struct SplitMatching {
  std::array<int, 2> a_pair{};  // splitting of side A: {a_pair, A minus a_pair}
  std::array<int, 2> b_pair{};  // matched splitting of side B
};

struct SingularSystemWitness {
  std::vector<Char> elements;
  std::array<int, 2> kappa{-1, -1};  // genus 4 singleton indices; unused at genus 3
  std::vector<int> side_a, side_b;   // anchor split of R, side_a holds min(R)
  std::array<SplitMatching, 3> matching;
  int valid_anchors = 0;  // number of splits that work as the anchor (expected 7)
};

struct RankGStructureReport {
  int g = 0;
  bool ok = false;
  std::string failure;
  long long plain_count = 0, singular_count = 0;
  std::vector<SingularSystemWitness> witnesses;
  std::map<std::pair<int, int>, long long> kappa_census;  // genus 4 only
  long long constructions = 0, distinct_constructed = 0;
  int min_hits = 0, max_hits = 0;  // times each system was constructed (expected 7)
  bool construction_matches = false;
};

namespace detail {

inline std::uint32_t indices_to_mask(const std::vector<int>& v) {
  std::uint32_t m = 0;
  for (int i : v) m |= 1u << i;
  return m;
}

// Side of the split {s, r_mask^s} containing the lowest index of r_mask.
inline std::uint32_t canon_side(std::uint32_t s, std::uint32_t r_mask) {
  std::uint32_t low = r_mask & (~r_mask + 1);
  return (s & low) ? s : (r_mask ^ s);
}

// Checks the grid structure of `splits` (canonical masks over r_mask,
// exactly 7) around the anchor at position `anchor`; on success fills
// the three splitting matchings.
inline bool anchor_structure(std::uint32_t r_mask, const std::vector<std::uint32_t>& splits,
                             std::size_t anchor, std::array<SplitMatching, 3>* out) {
  std::uint32_t a_mask = splits[anchor];
  std::uint32_t b_mask = r_mask ^ a_mask;
  std::map<std::uint32_t, std::vector<std::uint32_t>> buckets;  // A-splitting -> co-sided B-pairs
  for (std::size_t i = 0; i < splits.size(); ++i) {
    if (i == anchor) continue;
    std::uint32_t s = splits[i];
    std::uint32_t p = s & a_mask;
    if (std::popcount(p) != 2) return false;
    std::uint32_t id = canon_side(p, a_mask);
    std::uint32_t q = (p == id) ? (s & b_mask) : (b_mask ^ (s & b_mask));
    buckets[id].push_back(q);
  }
  if (buckets.size() != 3) return false;
  int slot = 0;
  for (const auto& [id, qs] : buckets) {
    if (qs.size() != 2 || (qs[0] ^ qs[1]) != b_mask) return false;
    if (out) {
      std::vector<int> ap = mask_to_indices(id);
      std::vector<int> bp = mask_to_indices(canon_side(qs[0], b_mask));
      (*out)[slot].a_pair = {ap[0], ap[1]};
      (*out)[slot].b_pair = {bp[0], bp[1]};
    }
    ++slot;
  }
  return true;
}

inline std::string describe_system(const GoepelSystem& sys) {
  std::string s = "{";
  for (std::size_t i = 0; i < sys.elements.size(); ++i) {
    if (i) s += ", ";
    s += to_string(sys.elements[i]);
  }
  return s + "}";
}

inline std::vector<std::uint32_t> system_key(const std::vector<Char>& elements) {
  std::vector<std::uint32_t> key;
  for (const Char& c : elements) key.push_back(char_code(c));
  std::sort(key.begin(), key.end());
  return key;
}

// Tests whether a set of characteristics is a wholly even Goepel system
// (a coset of an isotropic subgroup with all members even).
inline bool is_wholly_even_system(int g, const std::vector<Char>& chars) {
  if (chars.empty()) return false;
  std::set<std::uint32_t> codes;
  for (const Char& c : chars) {
    if (is_odd(c)) return false;
    codes.insert(char_code(c));
  }
  if (codes.size() != chars.size()) return false;
  std::uint32_t base = *codes.begin();
  std::set<std::uint32_t> grp;
  for (std::uint32_t c : codes) grp.insert(c ^ base);
  for (std::uint32_t x : grp)
    for (std::uint32_t y : grp) {
      if (!grp.count(x ^ y)) return false;
      if (code_pairing(x, y, g)) return false;
    }
  return true;
}

// The three 2+2 splittings of a 4-index mask, each named by its side
// containing the lowest index.
inline std::vector<std::uint32_t> splittings_of_four(std::uint32_t mask) {
  std::vector<int> idx = mask_to_indices(mask);
  std::vector<std::uint32_t> out;
  for (int partner = 1; partner <= 3; ++partner)
    out.push_back((1u << idx[0]) | (1u << idx[partner]));
  return out;
}

}  // namespace detail

// Verifies the rank-g structure theorem at genus 3 or 4 and runs the
// construction sweep in the opposite direction.
inline RankGStructureReport verify_structure_rank_g(int g) {
  if (g != 3 && g != 4) throw std::invalid_argument("rank-g structure needs genus 3 or 4");
  RankGStructureReport report;
  report.g = g;
  WhollyEvenClassification cls = classify_wholly_even(g, g);
  report.plain_count = static_cast<long long>(cls.plain.size());
  report.singular_count = static_cast<long long>(cls.singular.size());
  if (!cls.census_ok) {
    report.failure = cls.failure;
    return report;
  }
  std::uint32_t all_mask = (1u << (2 * g + 2)) - 1u;
  std::set<std::vector<std::uint32_t>> singular_keys;

  for (const GoepelSystem& sys : cls.singular) {
    SingularSystemWitness wit;
    wit.elements = sys.elements;
    std::vector<std::uint32_t> stripped;  // splits over R, canonical masks
    std::uint32_t r_mask = all_mask;
    if (g == 3) {
      // Exactly one multiplicity-2 member, the empty-partition characteristic.
      Char k = char_of_partition(3, {});
      std::vector<std::uint32_t> split_masks;
      for (const Char& c : sys.elements) {
        const PartitionClass& pc = partition_of_char(c);
        if (pc.m == 2) {
          if (!(c == k)) {
            report.failure = "unexpected multiplicity-2 member in " + detail::describe_system(sys);
            return report;
          }
          continue;
        }
        if (pc.m != 0) {
          report.failure = "odd-multiplicity member in " + detail::describe_system(sys);
          return report;
        }
        split_masks.push_back(detail::canon_side(detail::indices_to_mask(pc.indices), r_mask));
      }
      if (split_masks.size() != 7) {
        report.failure = "expected 7 nonsingular members in " + detail::describe_system(sys);
        return report;
      }
      stripped = split_masks;
    } else {
      // Two multiplicity-2 members with singleton representatives.
      std::vector<int> kappas;
      std::vector<std::uint32_t> t_masks;
      for (const Char& c : sys.elements) {
        const PartitionClass& pc = partition_of_char(c);
        if (pc.m == 2) {
          if (pc.indices.size() != 1) {
            report.failure = "multiplicity-2 member without singleton side in " +
                             detail::describe_system(sys);
            return report;
          }
          kappas.push_back(pc.indices[0]);
        }
      }
      if (kappas.size() != 2) {
        report.failure = "expected exactly 2 singular members in " + detail::describe_system(sys);
        return report;
      }
      std::sort(kappas.begin(), kappas.end());
      wit.kappa = {kappas[0], kappas[1]};
      std::uint32_t k1 = 1u << kappas[0], k2 = 1u << kappas[1];
      r_mask = all_mask ^ k1 ^ k2;
      for (const Char& c : sys.elements) {
        const PartitionClass& pc = partition_of_char(c);
        if (pc.m != 0) continue;
        std::uint32_t side = detail::indices_to_mask(pc.indices);
        if (!(side & k1)) side = all_mask ^ side;  // use the side holding kappa_1
        if (side & k2) {
          report.failure = "kappa indices on one side of " + to_string(c) + " in " +
                           detail::describe_system(sys);
          return report;
        }
        t_masks.push_back(side ^ k1);
      }
      if (t_masks.size() != 14) {
        report.failure = "expected 14 nonsingular members in " + detail::describe_system(sys);
        return report;
      }
      // The fourteen stripped sides pair up into seven splits of R.
      std::set<std::uint32_t> canon;
      std::map<std::uint32_t, int> hits;
      for (std::uint32_t t : t_masks) {
        std::uint32_t c = detail::canon_side(t, r_mask);
        canon.insert(c);
        ++hits[c];
      }
      if (canon.size() != 7) {
        report.failure = "stripped sides do not form 7 splits in " + detail::describe_system(sys);
        return report;
      }
      for (const auto& [c, n] : hits)
        if (n != 2) {
          report.failure = "split not doubly covered in " + detail::describe_system(sys);
          return report;
        }
      stripped.assign(canon.begin(), canon.end());
    }

    std::sort(stripped.begin(), stripped.end());
    bool witness_set = false;
    for (std::size_t anchor = 0; anchor < stripped.size(); ++anchor) {
      std::array<SplitMatching, 3> matching;
      if (detail::anchor_structure(r_mask, stripped, anchor, &matching)) {
        ++wit.valid_anchors;
        if (!witness_set) {
          std::uint32_t a_mask = stripped[anchor];
          wit.side_a = detail::mask_to_indices(a_mask);
          wit.side_b = detail::mask_to_indices(r_mask ^ a_mask);
          wit.matching = matching;
          witness_set = true;
        }
      }
    }
    if (wit.valid_anchors != 7) {
      std::ostringstream msg;
      msg << "system admits " << wit.valid_anchors << " anchors instead of 7: "
          << detail::describe_system(sys);
      report.failure = msg.str();
      return report;
    }
    if (g == 4) ++report.kappa_census[{wit.kappa[0], wit.kappa[1]}];
    singular_keys.insert(detail::system_key(sys.elements));
    report.witnesses.push_back(std::move(wit));
  }

  // Construction sweep: every anchor split and matching yields a valid
  // singular system; collectively they hit each one exactly 7 times.
  std::map<std::vector<std::uint32_t>, int> constructed;
  std::vector<std::pair<int, int>> kappa_pairs;
  if (g == 3) {
    kappa_pairs.push_back({-1, -1});
  } else {
    for (int k1 = 0; k1 <= 9; ++k1)
      for (int k2 = k1 + 1; k2 <= 9; ++k2) kappa_pairs.push_back({k1, k2});
  }
  int perms[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
  for (const auto& [k1, k2] : kappa_pairs) {
    std::uint32_t r_mask = all_mask;
    if (g == 4) r_mask ^= (1u << k1) | (1u << k2);
    std::vector<int> rest = detail::mask_to_indices(r_mask);
    // All 4+4 splits of R: sides containing rest[0].
    std::vector<std::uint32_t> a_sides;
    detail::for_each_subset(7, 3, [&](std::uint32_t pick) {
      std::uint32_t a = 1u << rest[0];
      for (int b = 0; b < 7; ++b)
        if ((pick >> b) & 1u) a |= 1u << rest[b + 1];
      a_sides.push_back(a);
    });
    for (std::uint32_t a_mask : a_sides) {
      std::uint32_t b_mask = r_mask ^ a_mask;
      std::vector<std::uint32_t> a_spl = detail::splittings_of_four(a_mask);
      std::vector<std::uint32_t> b_spl = detail::splittings_of_four(b_mask);
      for (auto& perm : perms) {
        std::vector<std::uint32_t> sides;  // one side per split of the system
        sides.push_back(a_mask);
        for (int t = 0; t < 3; ++t) {
          std::uint32_t p = a_spl[t], q = b_spl[perm[t]];
          sides.push_back(p | q);
          sides.push_back(p | (b_mask ^ q));
        }
        std::vector<Char> chars;
        if (g == 3) {
          chars.push_back(char_of_partition(3, {}));
          for (std::uint32_t s : sides)
            chars.push_back(char_of_partition(3, detail::mask_to_indices(s)));
        } else {
          chars.push_back(char_of_partition(4, {k1}));
          chars.push_back(char_of_partition(4, {k2}));
          for (std::uint32_t s : sides) {
            std::vector<int> with_k1 = detail::mask_to_indices(s | (1u << k1));
            std::vector<int> with_k2 = detail::mask_to_indices(s | (1u << k2));
            chars.push_back(char_of_partition(4, with_k1));
            chars.push_back(char_of_partition(4, with_k2));
          }
        }
        ++report.constructions;
        if (!detail::is_wholly_even_system(g, chars)) {
          report.failure = "constructed set is not a wholly even Goepel system";
          return report;
        }
        ++constructed[detail::system_key(chars)];
      }
    }
  }
  report.distinct_constructed = static_cast<long long>(constructed.size());
  report.min_hits = report.max_hits = constructed.empty() ? 0 : constructed.begin()->second;
  std::set<std::vector<std::uint32_t>> constructed_keys;
  for (const auto& [key, hits] : constructed) {
    report.min_hits = std::min(report.min_hits, hits);
    report.max_hits = std::max(report.max_hits, hits);
    constructed_keys.insert(key);
  }
  report.construction_matches = (constructed_keys == singular_keys);
  report.ok = report.construction_matches && report.min_hits == 7 && report.max_hits == 7;
  if (!report.ok && report.failure.empty())
    report.failure = "construction sweep does not reproduce the singular systems";
  return report;
}

// ---------------------------------------------------------------------------
// Structure of the rank-2 triples at genus 3.  Each group with a
// singular wholly even system determines a partition of the 8 indices
// into 4 pairs: the singular system consists of the empty-partition
// characteristic plus the three 2+2 groupings of the pairs, and the two
// plain systems are the two parity classes of transversal splits.

struct PairPartitionWitness {
  std::vector<Char> singular_system;
  std::array<std::array<int, 2>, 4> pairs{};  // ascending; pairs[0] holds index 0
  std::vector<Char> transversal_a, transversal_b;
};

struct Rank2StructureReport {
  bool ok = false;
  std::string failure;
  long long plain_groups = 0, one_singular_groups = 0;
  std::vector<PairPartitionWitness> witnesses;
  bool partitions_distinct = false;
};

inline Rank2StructureReport verify_structure_rank2_g3() {
  Rank2StructureReport report;
  std::vector<GoepelGroup> groups = enumerate_groups(3, 2);
  std::set<std::array<std::array<int, 2>, 4>> seen_partitions;
  for (const GoepelGroup& grp : groups) {
    std::vector<GoepelSystem> systems = systems_of_group(grp);
    std::vector<GoepelSystem> even;
    for (GoepelSystem& sys : systems)
      if (sys.type == SystemType::wholly_even) even.push_back(std::move(sys));
    if (even.size() != 3) {
      report.failure = "group without exactly 3 wholly even systems";
      return report;
    }
    std::vector<std::size_t> singular_pos;
    for (std::size_t i = 0; i < 3; ++i)
      if (even[i].singular()) singular_pos.push_back(i);
    if (singular_pos.empty()) {
      ++report.plain_groups;
      continue;
    }
    if (singular_pos.size() != 1) {
      report.failure = "group with several singular wholly even systems";
      return report;
    }
    ++report.one_singular_groups;
    const GoepelSystem& a1 = even[singular_pos[0]];

    PairPartitionWitness wit;
    wit.singular_system = a1.elements;
    // Intersect the 0-sides of the three grouping characteristics: the
    // common pair; subtracting it from each side gives the other three.
    std::uint32_t common = (1u << 8) - 1u;
    std::vector<std::uint32_t> zero_sides;
    Char k = char_of_partition(3, {});
    for (const Char& c : a1.elements) {
      const PartitionClass& pc = partition_of_char(c);
      if (pc.m == 2) {
        if (!(c == k)) {
          report.failure = "singular member is not the empty partition in " +
                           detail::describe_system(a1);
          return report;
        }
        continue;
      }
      if (pc.m != 0) {
        report.failure = "odd member inside wholly even system " + detail::describe_system(a1);
        return report;
      }
      std::uint32_t side = detail::indices_to_mask(pc.indices);  // canonical: holds 0
      zero_sides.push_back(side);
      common &= side;
    }
    if (zero_sides.size() != 3 || std::popcount(common) != 2) {
      report.failure = "no common pair in " + detail::describe_system(a1);
      return report;
    }
    std::vector<std::uint32_t> pair_masks{common};
    std::uint32_t covered = common;
    for (std::uint32_t side : zero_sides) {
      std::uint32_t pm = side ^ common;
      if (std::popcount(pm) != 2 || (pm & covered)) {
        report.failure = "pair extraction failed in " + detail::describe_system(a1);
        return report;
      }
      pair_masks.push_back(pm);
      covered |= pm;
    }
    if (covered != (1u << 8) - 1u) {
      report.failure = "pairs do not cover the 8 indices in " + detail::describe_system(a1);
      return report;
    }
    std::sort(pair_masks.begin() + 1, pair_masks.end());
    for (int t = 0; t < 4; ++t) {
      std::vector<int> p = detail::mask_to_indices(pair_masks[t]);
      wit.pairs[t] = {p[0], p[1]};
    }
    if (!seen_partitions.insert(wit.pairs).second) {
      report.failure = "duplicate pair partition across groups";
      return report;
    }

    // The two plain systems must be the two parity classes of
    // transversal splits of the pair partition.
    std::vector<const GoepelSystem*> plains;
    for (std::size_t i = 0; i < 3; ++i)
      if (i != singular_pos[0]) plains.push_back(&even[i]);
    std::set<std::uint32_t> t_sides[2];
    for (int cls_idx = 0; cls_idx < 2; ++cls_idx) {
      for (const Char& c : plains[cls_idx]->elements) {
        const PartitionClass& pc = partition_of_char(c);
        std::uint32_t side = detail::indices_to_mask(pc.indices);
        for (std::uint32_t pm : pair_masks)
          if (std::popcount(side & pm) != 1) {
            report.failure = "non-transversal member " + to_string(c) + " in plain system of " +
                             detail::describe_system(a1);
            return report;
          }
        t_sides[cls_idx].insert(side);
      }
      if (t_sides[cls_idx].size() != 4) {
        report.failure = "plain system does not hold 4 distinct transversal splits";
        return report;
      }
    }
    // Parity relative to a reference transversal: well defined on
    // splits because complementary transversals differ in all 4 pairs.
    std::uint32_t ref = *t_sides[0].begin();
    auto rel_parity = [&](std::uint32_t side) {
      int diff = 0;
      for (std::uint32_t pm : pair_masks)
        if ((side & pm) != (ref & pm)) ++diff;
      return diff & 1;
    };
    for (std::uint32_t side : t_sides[0])
      if (rel_parity(side) != 0) {
        report.failure = "mixed parity inside one transversal class";
        return report;
      }
    for (std::uint32_t side : t_sides[1])
      if (rel_parity(side) != 1) {
        report.failure = "transversal classes are not parity-separated";
        return report;
      }
    wit.transversal_a = plains[0]->elements;
    wit.transversal_b = plains[1]->elements;
    report.witnesses.push_back(std::move(wit));
  }
  report.partitions_distinct =
      (static_cast<long long>(seen_partitions.size()) == report.one_singular_groups);
  report.ok = report.partitions_distinct && report.failure.empty();
  return report;
}

// ---------------------------------------------------------------------------
// Group cache.  Format: one header line "hyptheta-goepel-cache 1 g r
// count", then one line per group with its 2^r element codes in hex,
// ascending.  Reads validate every group and reject the file on any
// mismatch, falling back to enumeration.

inline void write_group_cache(const std::string& path, const std::vector<GoepelGroup>& groups) {
  if (groups.empty()) throw std::invalid_argument("refusing to cache an empty group list");
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write cache file " + path);
  out << "hyptheta-goepel-cache 1 " << groups[0].g << ' ' << groups[0].r << ' ' << groups.size()
      << '\n';
  out << std::hex;
  for (const GoepelGroup& grp : groups) {
    for (std::size_t i = 0; i < grp.elements.size(); ++i)
      out << (i ? " " : "") << char_code(grp.elements[i]);
    out << '\n';
  }
}

inline std::optional<std::vector<GoepelGroup>> read_group_cache(const std::string& path, int g,
                                                               int r) {
  std::ifstream in(path);
  if (!in) return std::nullopt;
  std::string magic;
  int version = 0, fg = 0, fr = 0;
  long long count = 0;
  if (!(in >> magic >> version >> fg >> fr >> count)) return std::nullopt;
  if (magic != "hyptheta-goepel-cache" || version != 1 || fg != g || fr != r || count <= 0)
    return std::nullopt;
  std::vector<GoepelGroup> groups;
  in >> std::hex;
  for (long long line = 0; line < count; ++line) {
    GoepelGroup grp;
    grp.g = g;
    grp.r = r;
    std::vector<Char> elems;
    for (int i = 0; i < (1 << r); ++i) {
      std::uint32_t code;
      if (!(in >> code) || code >= (1u << (2 * g))) return std::nullopt;
      elems.push_back(char_from_code(g, code));
    }
    std::vector<std::uint32_t> codes;
    for (const Char& c : elems) codes.push_back(char_code(c));
    std::set<std::uint32_t> codeset(codes.begin(), codes.end());
    if (codeset.size() != codes.size() || !codeset.count(0)) return std::nullopt;
    for (std::uint32_t x : codes)
      for (std::uint32_t y : codes) {
        if (!codeset.count(x ^ y)) return std::nullopt;
        if (code_pairing(x, y, g)) return std::nullopt;
      }
    grp.elements = std::move(elems);
    groups.push_back(std::move(grp));
  }
  std::set<std::vector<std::uint32_t>> distinct;
  for (const GoepelGroup& grp : groups) distinct.insert(detail::system_key(grp.elements));
  if (static_cast<long long>(distinct.size()) != count) return std::nullopt;
  return groups;
}

}  // namespace hyptheta

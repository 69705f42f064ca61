#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <hyptheta/charkit.hpp>

#include <map>
#include <vector>

using namespace hyptheta;

namespace {

// Reference censuses for the acceptance genera.
constexpr long long kEven1 = 3, kOdd1 = 1;
constexpr long long kEven2 = 10, kOdd2 = 6;
constexpr long long kEven3 = 36, kOdd3 = 28;
constexpr long long kEven4 = 136, kOdd4 = 120;

std::vector<Char> all_chars(int g) {
  std::vector<Char> out;
  for (std::uint32_t code = 0; code < (1u << (2 * g)); ++code)
    out.push_back(char_from_code(g, code));
  return out;
}

}  // namespace

TEST_CASE("row encoding and string form round trip") {
  Char c = parse_char("111/101");
  CHECK(c.g == 3);
  CHECK(c.top == 0b111u);
  CHECK(c.bottom == 0b101u);
  CHECK(to_string(c) == "111/101");
  for (int g = 1; g <= 4; ++g)
    for (const Char& x : all_chars(g)) CHECK(parse_char(to_string(x)) == x);
  CHECK_THROWS_AS(parse_char("11/1"), std::invalid_argument);
  CHECK_THROWS_AS(parse_char("1a/10"), std::invalid_argument);
  CHECK_THROWS_AS(parse_char("101"), std::invalid_argument);
}

TEST_CASE("branch characteristics follow the marking table") {
  // Genus 3 table, columns written as strings top/bottom.
  CHECK(to_string(branch_char(3, 0)) == "000/000");
  CHECK(to_string(branch_char(3, 1)) == "100/000");
  CHECK(to_string(branch_char(3, 2)) == "100/100");
  CHECK(to_string(branch_char(3, 3)) == "010/100");
  CHECK(to_string(branch_char(3, 4)) == "010/110");
  CHECK(to_string(branch_char(3, 5)) == "001/110");
  CHECK(to_string(branch_char(3, 6)) == "001/111");
  CHECK(to_string(branch_char(3, 7)) == "000/111");

  // Parity pattern: the even-index nonzero branch points are odd.
  for (int g = 1; g <= 4; ++g) {
    CHECK(parity(branch_char(g, 0)) == 0);
    CHECK(parity(branch_char(g, 2 * g + 1)) == 0);
    for (int m = 1; m <= g; ++m) {
      CHECK(parity(branch_char(g, 2 * m)) == 1);
      CHECK(parity(branch_char(g, 2 * m - 1)) == 0);
    }
  }

  // All branch characteristics sum to zero, so [I] = [complement of I].
  for (int g = 1; g <= 4; ++g) {
    Char sum = char_zero(g);
    for (int k = 0; k <= 2 * g + 1; ++k) sum = char_add(sum, branch_char(g, k));
    CHECK(sum == char_zero(g));
  }
}

TEST_CASE("Riemann constant characteristic") {
  CHECK(to_string(k_char(1)) == "1/1");
  CHECK(to_string(k_char(2)) == "11/01");
  CHECK(to_string(k_char(3)) == "111/101");
  CHECK(to_string(k_char(4)) == "1111/0101");
  // Closed form of the bottom row: column j holds (g - j + 1) mod 2.
  for (int g = 1; g <= kMaxGenus; ++g) {
    Char k = k_char(g);
    CHECK(k.top == row_mask(g));
    for (int j = 1; j <= g; ++j) CHECK((int)((k.bottom >> (j - 1)) & 1u) == (g - j + 1) % 2);
  }
}

TEST_CASE("pairing is alternating, bilinear, and azygetic on branch triples") {
  for (int g = 1; g <= 3; ++g) {
    auto chars = all_chars(g);
    for (const Char& p : chars) {
      CHECK(pairing(p, p) == 0);
      for (const Char& q : chars) {
        CHECK(pairing(p, q) == pairing(q, p));  // alternating == symmetric mod 2
        for (const Char& r : chars)
          CHECK(pairing(p, char_add(q, r)) == ((pairing(p, q) + pairing(p, r)) & 1));
      }
    }
  }
  // Distinct nonzero branch characteristics pair to 1; together with
  // |P,0| = 0 this makes every distinct branch triple azygetic.
  for (int g = 1; g <= 4; ++g)
    for (int i = 0; i <= 2 * g + 1; ++i)
      for (int j = i + 1; j <= 2 * g + 1; ++j) {
        CHECK(pairing(branch_char(g, i), branch_char(g, j)) == (i == 0 ? 0 : 1));
        for (int k = j + 1; k <= 2 * g + 1; ++k)
          CHECK(triple_relation(branch_char(g, i), branch_char(g, j), branch_char(g, k)) == 1);
      }
}

TEST_CASE("triple relation is invariant under common translation") {
  int g = 2;
  auto chars = all_chars(g);
  for (const Char& p : chars)
    for (const Char& q : chars)
      for (const Char& r : chars) {
        int base = triple_relation(p, q, r);
        for (const Char& t : chars)
          CHECK(triple_relation(char_add(p, t), char_add(q, t), char_add(r, t)) == base);
      }
}

TEST_CASE("parity census") {
  CHECK(parity_census(1).even == kEven1);
  CHECK(parity_census(1).odd == kOdd1);
  CHECK(parity_census(2).even == kEven2);
  CHECK(parity_census(2).odd == kOdd2);
  CHECK(parity_census(3).even == kEven3);
  CHECK(parity_census(3).odd == kOdd3);
  CHECK(parity_census(4).even == kEven4);
  CHECK(parity_census(4).odd == kOdd4);
  for (int g = 1; g <= 6; ++g) {
    ParityCensus pc = parity_census(g);
    long long h = 1ll << (g - 1), f = 1ll << g;
    CHECK(pc.even == h * (f + 1));
    CHECK(pc.odd == h * (f - 1));
  }
}

TEST_CASE("partition dictionary is a parity-respecting bijection") {
  for (int g = 1; g <= 4; ++g) {
    // Table construction throws unless the map code -> partition is a
    // bijection, so reaching this point already certifies that.
    const PartitionTable& table = partition_table(g);
    CHECK((int)table.by_code.size() == 1 << (2 * g));
    for (const Char& c : all_chars(g)) {
      const PartitionClass& pc = partition_of_char(c);
      CHECK(char_of_partition(g, pc.indices) == c);
      CHECK(parity(c) == pc.m % 2);
      // The complementary side yields the same characteristic.
      CHECK(char_of_partition(g, partition_complement(g, pc.indices)) == c);
      // Canonical representative: smaller side; ties keep index 0.
      int size = (int)pc.indices.size();
      CHECK(size == g + 1 - 2 * pc.m);
      if (size == g + 1) CHECK(pc.indices.front() == 0);
    }
  }
}

TEST_CASE("multiplicity census") {
  std::map<int, long long> c1 = multiplicity_census(1);
  CHECK(c1 == std::map<int, long long>{{0, 3}, {1, 1}});
  std::map<int, long long> c2 = multiplicity_census(2);
  CHECK(c2 == std::map<int, long long>{{0, 10}, {1, 6}});
  std::map<int, long long> c3 = multiplicity_census(3);
  CHECK(c3 == std::map<int, long long>{{0, 35}, {1, 28}, {2, 1}});
  std::map<int, long long> c4 = multiplicity_census(4);
  CHECK(c4 == std::map<int, long long>{{0, 126}, {1, 120}, {2, 10}});
}

TEST_CASE("the K characteristic realizes the expected partition") {
  // Odd genus: empty side; even genus: the singleton {0}.
  CHECK(partition_of_char(k_char(1)).indices.empty());
  CHECK(partition_of_char(k_char(1)).m == 1);
  CHECK(partition_of_char(k_char(3)).indices.empty());
  CHECK(partition_of_char(k_char(3)).m == 2);
  CHECK(partition_of_char(k_char(2)).indices == std::vector<int>{0});
  CHECK(partition_of_char(k_char(2)).m == 1);
  CHECK(partition_of_char(k_char(4)).indices == std::vector<int>{0});
  CHECK(partition_of_char(k_char(4)).m == 2);
}

TEST_CASE("genus 4 singleton partitions") {
  const char* expected[10] = {
      "1111/0101", "0111/0101", "0111/1101", "1011/1101", "1011/1001",
      "1101/1001", "1101/1011", "1110/1011", "1110/1010", "1111/1010"};
  for (int k = 0; k <= 9; ++k) {
    Char c = char_of_partition(4, {k});
    CHECK(to_string(c) == expected[k]);
    CHECK(multiplicity(c) == 2);
    CHECK(parity(c) == 0);
  }
}

TEST_CASE("partition input validation") {
  CHECK_THROWS_AS(char_of_partition(3, {0}), std::invalid_argument);  // wrong size parity
  CHECK_THROWS_AS(char_of_partition(3, {0, 0, 1, 2}), std::invalid_argument);
  CHECK_THROWS_AS(char_of_partition(3, {8, 1, 2, 3}), std::invalid_argument);
  CHECK_NOTHROW(char_of_partition(3, {0, 1}));  // size 2 = multiplicity 1 side
}

TEST_CASE("symplectic constructor validates the defining relations") {
  CHECK_NOTHROW(sp_identity(3));
  CHECK_NOTHROW(sp_exchange(4));
  CHECK_NOTHROW(sp_shear(3, 1, 3));
  // Asymmetric b block with a = d = 1, c = 0 is not symplectic.
  std::vector<int> id{1, 0, 0, 1}, zero{0, 0, 0, 0}, bad{0, 1, 0, 0};
  CHECK_THROWS_AS(make_symplectic(2, id, bad, zero, id), std::invalid_argument);
}

TEST_CASE("exchange generator swaps the rows of a characteristic") {
  for (int g = 1; g <= 3; ++g) {
    Symplectic j = sp_exchange(g);
    for (const Char& c : all_chars(g)) {
      Char swapped = gamma_action(j, c);
      CHECK(swapped.top == c.bottom);
      CHECK(swapped.bottom == c.top);
    }
  }
}

TEST_CASE("shear action at genus 1 matches the classical rule") {
  Symplectic t = sp_shear(1, 1, 1);
  for (const Char& c : all_chars(1)) {
    Char moved = gamma_action(t, c);
    CHECK(moved.top == c.top);
    CHECK(moved.bottom == ((c.bottom ^ c.top ^ 1u) & 1u));
  }
}

TEST_CASE("gamma action composes as a left action and is a bijection") {
  int g = 2;
  std::vector<Symplectic> gens{sp_exchange(g), sp_shear(g, 1, 1), sp_shear(g, 2, 2),
                               sp_shear(g, 1, 2)};
  for (const Symplectic& x : gens)
    for (const Symplectic& y : gens) {
      Symplectic xy = sp_mul(x, y);
      for (const Char& c : all_chars(g))
        CHECK(gamma_action(x, gamma_action(y, c)) == gamma_action(xy, c));
    }
  // Injectivity on the finite set of characteristics.
  for (const Symplectic& x : gens) {
    std::vector<bool> hit(1u << (2 * g), false);
    for (const Char& c : all_chars(g)) {
      std::uint32_t code = char_code(gamma_action(x, c));
      CHECK(!hit[code]);
      hit[code] = true;
    }
  }
}

TEST_CASE("gamma action preserves parity and triple relations") {
  // Parity is intrinsic.  Multiplicity is not: the vanishing dictionary
  // is tied to the curve marking, which the action transforms, so only
  // the multiplicity census is invariant, not each characteristic's m.
  for (int g = 2; g <= 4; ++g) {
    std::vector<Symplectic> gens{sp_exchange(g)};
    for (int k = 1; k <= g; ++k)
      for (int l = k; l <= g; ++l) gens.push_back(sp_shear(g, k, l));
    gens.push_back(sp_mul(sp_exchange(g), sp_shear(g, 1, g)));
    for (const Symplectic& x : gens) {
      std::map<int, long long> census;
      for (const Char& c : all_chars(g)) {
        Char moved = gamma_action(x, c);
        CHECK(parity(moved) == parity(c));
        ++census[multiplicity(moved)];
      }
      CHECK(census == multiplicity_census(g));
    }
    // Triple relation invariance on a few fixed triples.
    auto chars = all_chars(g);
    for (const Symplectic& x : gens)
      for (std::size_t i = 0; i < chars.size(); i += 3)
        for (std::size_t j = i + 1; j < chars.size(); j += 5) {
          const Char& p = chars[i];
          const Char& q = chars[j];
          const Char& r = chars[(i + j) % chars.size()];
          CHECK(triple_relation(gamma_action(x, p), gamma_action(x, q), gamma_action(x, r)) ==
                triple_relation(p, q, r));
        }
  }
}

#include <gtest/gtest.h>

#include <numeric>
#include <random>

#include "fixtures.hpp"

using namespace symconj;
using namespace symconj::testing;

namespace {

using I64Matrix = std::vector<std::vector<std::int64_t>>;

// Oracle determinant: Laplace expansion along the first row.
std::int64_t laplace(const I64Matrix& m) {
  const std::size_t n = m.size();
  if (n == 0) return 1;
  if (n == 1) return m[0][0];
  std::int64_t total = 0;
  for (std::size_t c = 0; c < n; ++c) {
    if (m[0][c] == 0) continue;
    I64Matrix minor;
    for (std::size_t r = 1; r < n; ++r) {
      std::vector<std::int64_t> row;
      for (std::size_t j = 0; j < n; ++j)
        if (j != c) row.push_back(m[r][j]);
      minor.push_back(row);
    }
    total += (c % 2 ? -1 : 1) * m[0][c] * laplace(minor);
  }
  return total;
}

void subsets(std::size_t n, std::size_t k, std::size_t from, std::vector<std::size_t>& cur,
             std::vector<std::vector<std::size_t>>& out) {
  if (cur.size() == k) {
    out.push_back(cur);
    return;
  }
  for (std::size_t i = from; i < n; ++i) {
    cur.push_back(i);
    subsets(n, k, i + 1, cur, out);
    cur.pop_back();
  }
}

// Oracle invariant factors: d_k = D_k / D_{k-1}, D_k the gcd of all k x k minors.
std::vector<std::int64_t> determinantal_factors(const I64Matrix& m) {
  const std::size_t R = m.size(), C = m.empty() ? 0 : m[0].size();
  std::vector<std::int64_t> out;
  std::int64_t prev = 1;
  bool zero = false;
  for (std::size_t k = 1; k <= std::min(R, C); ++k) {
    if (zero) {
      out.push_back(0);
      continue;
    }
    std::vector<std::vector<std::size_t>> rs, cs;
    std::vector<std::size_t> cur;
    subsets(R, k, 0, cur, rs);
    subsets(C, k, 0, cur, cs);
    std::int64_t g = 0;
    for (const auto& r : rs)
      for (const auto& c : cs) {
        I64Matrix sub(k, std::vector<std::int64_t>(k));
        for (std::size_t i = 0; i < k; ++i)
          for (std::size_t j = 0; j < k; ++j) sub[i][j] = m[r[i]][c[j]];
        g = std::gcd(g, laplace(sub));
      }
    if (g == 0) {
      zero = true;
      out.push_back(0);
      continue;
    }
    out.push_back(g / prev);
    prev = g;
  }
  return out;
}

I64Matrix to_i64(const IntMatrix& m) {
  I64Matrix out(m.rows(), std::vector<std::int64_t>(m.cols()));
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) out[i][j] = static_cast<std::int64_t>(m(i, j));
  return out;
}

std::vector<BigInt> big(std::initializer_list<int> v) { return std::vector<BigInt>(v.begin(), v.end()); }

// Oracle: compare two count matrices under every permutation.
bool brute_equal_up_to_permutation(const CountMatrix& a, const CountMatrix& b) {
  const std::size_t n = a.rows();
  if (b.rows() != n) return false;
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  do {
    bool ok = true;
    for (std::size_t i = 0; i < n && ok; ++i)
      for (std::size_t j = 0; j < n && ok; ++j) ok = a(i, j) == b(perm[i], perm[j]);
    if (ok) return true;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return false;
}

}  // namespace

TEST(SmithNormalForm, Examples) {
  const auto id = IntMatrix::identity(3);
  const auto s = smith_normal_form(id);
  EXPECT_EQ(s.D, id);
  EXPECT_EQ(s.U, id);
  EXPECT_EQ(s.V, id);
  const auto m = IntMatrix::from(std::vector<std::vector<int>>{{2, 0}, {0, 3}});
  const auto t = smith_normal_form(m);
  EXPECT_EQ(t.factors(), big({1, 6}));
  EXPECT_EQ(t.U * m * t.V, t.D);
  EXPECT_EQ(smith_normal_form(identity_minus(to_int_matrix(full3()->matrix()))).factors(), big({1, 1, 2}));
  EXPECT_EQ(determinant(identity_minus(to_int_matrix(full3()->matrix()))), BigInt(-2));
}

TEST(SmithNormalForm, CertificateOn500RandomMatrices) {
  std::mt19937 rng(2024);
  std::uniform_int_distribution<int> entry(-5, 5);
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t R = 1 + trial % 6, C = 1 + (trial / 6) % 6;
    IntMatrix m(R, C);
    for (std::size_t i = 0; i < R; ++i)
      for (std::size_t j = 0; j < C; ++j) m(i, j) = entry(rng);
    const auto s = smith_normal_form(m);
    ASSERT_EQ(s.U * m * s.V, s.D);
    EXPECT_EQ(abs(BigInt(laplace(to_i64(s.U)))), 1);
    EXPECT_EQ(abs(BigInt(laplace(to_i64(s.V)))), 1);
    for (std::size_t i = 0; i < R; ++i)
      for (std::size_t j = 0; j < C; ++j)
        if (i != j) { EXPECT_EQ(s.D(i, j), 0); }
    const auto f = s.factors();
    for (std::size_t i = 0; i + 1 < f.size(); ++i) {
      EXPECT_GE(f[i], 0);
      if (f[i] == 0)
        EXPECT_EQ(f[i + 1], 0);
      else
        EXPECT_EQ(f[i + 1] % f[i], 0);
    }
    const auto oracle = determinantal_factors(to_i64(m));
    ASSERT_EQ(f.size(), oracle.size());
    for (std::size_t i = 0; i < f.size(); ++i) EXPECT_EQ(f[i], BigInt(oracle[i]));
    if (R == C) { EXPECT_EQ(determinant(m), BigInt(laplace(to_i64(m)))); }
  }
}

TEST(BowenFranks, Examples) {
  const auto f2 = bowen_franks(full2()->matrix());
  EXPECT_TRUE(f2.bf.empty());
  EXPECT_EQ(f2.det_sign, -1);
  const auto f3 = bowen_franks(full3()->matrix());
  EXPECT_EQ(f3.bf, big({2}));
  EXPECT_EQ(f3.det_sign, -1);
  const auto g = bowen_franks(golden()->matrix());
  EXPECT_TRUE(g.bf.empty());
  EXPECT_EQ(g.det_sign, -1);
}

TEST(KTheory, Examples) {
  const auto f2 = k_theory(full2()->matrix());
  EXPECT_TRUE(f2.k0.empty());
  EXPECT_EQ(f2.k1_rank, 0);
  const auto f3 = k_theory(full3()->matrix());
  EXPECT_EQ(f3.k0, big({2}));
  EXPECT_EQ(f3.k1_rank, 0);
}

TEST(KTheory, SingularInstancesHavePositiveK1Rank) {
  // Search all 3x3 0-1 matrices for valid spaces with det(I - A^t) = 0.
  std::size_t found = 0;
  for (int bits = 0; bits < 512; ++bits) {
    std::vector<std::vector<int>> rows(3, std::vector<int>(3));
    for (int i = 0; i < 9; ++i) rows[i / 3][i % 3] = (bits >> i) & 1;
    const TransitionMatrix a(rows);
    if (!a.is_irreducible() || a.is_permutation()) continue;
    const auto r = invariants(a);
    I64Matrix m(3, std::vector<std::int64_t>(3));
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) m[i][j] = (i == j) - rows[j][i];
    const auto oracle = determinantal_factors(m);
    EXPECT_EQ(r.k1_rank, std::count(oracle.begin(), oracle.end(), 0));
    if (laplace(m) == 0) {
      ++found;
      EXPECT_GE(r.k1_rank, 1);
      EXPECT_EQ(r.det_sign, 0);
      // Zero factors are kept in the BF list: the group has a free part.
      EXPECT_NE(std::find(r.bf.begin(), r.bf.end(), BigInt(0)), r.bf.end());
    } else {
      BigInt prod = 1;
      for (const auto& d : r.bf) prod *= d;
      EXPECT_EQ(prod, abs(r.det));
    }
  }
  EXPECT_GT(found, 0u);
}

TEST(OutSplit, Examples) {
  const auto g = golden();
  const auto trivial = out_split(g, {{{0, 1}}, {{0}}});
  EXPECT_EQ(trivial.split->matrix(), g->matrix());
  EXPECT_TRUE(verify_inverse_pair(ShiftMap(trivial.h), ShiftMap(trivial.h_inv), 2, 3));

  const auto s = out_split(g, {{{0}, {1}}, {{0}}});
  EXPECT_EQ(s.split->alphabet(), 3);
  EXPECT_EQ(s.split->matrix().rows(), (std::vector<std::vector<int>>{{1, 1, 0}, {0, 0, 1}, {1, 1, 0}}));
  EXPECT_TRUE(verify_inverse_pair(ShiftMap(s.h), ShiftMap(s.h_inv), 3, 4));

  auto bad = [&](const SplitPartition& p) {
    try {
      out_split(g, p);
    } catch (const Error& e) {
      return e.kind() == ErrorKind::InvalidPartition;
    }
    return false;
  };
  EXPECT_TRUE(bad({{{0}}, {{0}}}));          // follower 2 of state 1 uncovered
  EXPECT_TRUE(bad({{{0}, {}, {1}}, {{0}}}));  // empty block
  EXPECT_TRUE(bad({{{0, 1}}, {{0, 1}}}));    // 2 does not follow 2
  EXPECT_TRUE(bad({{{0, 1}}}));              // missing state
}

TEST(OutSplit, InvariantsUnchangedAcross100RandomSplits) {
  for (std::uint32_t seed = 0; seed < 100; ++seed) {
    const auto gen = generate_conjugacy(seed);
    ASSERT_LE(gen.b->alphabet(), 5);
    const auto a = invariants(gen.a->matrix());
    const auto b = invariants(gen.b->matrix());
    EXPECT_EQ(a.bf, b.bf);
    EXPECT_EQ(a.det_sign, b.det_sign);
    EXPECT_EQ(a.det, b.det);
    EXPECT_EQ(a.k0, b.k0);
    EXPECT_EQ(a.k1_rank, b.k1_rank);
    EXPECT_TRUE(verify_inverse_pair(ShiftMap(gen.h), ShiftMap(gen.h_inv), 2, 3));
    for (int n = 1; n <= 6; ++n) EXPECT_EQ(trace_power(gen.a->matrix(), n), trace_power(gen.b->matrix(), n));
  }
}

TEST(TotalAmalgamation, Examples) {
  const auto g = golden();
  EXPECT_TRUE(equal_up_to_permutation(total_amalgamation(g->matrix()), CountMatrix::from(g->matrix().rows())));
  const auto s = out_split(g, {{{0}, {1}}, {{0}}});
  EXPECT_TRUE(equal_up_to_permutation(total_amalgamation(s.split->matrix()), CountMatrix::from(g->matrix().rows())));
  // Full shifts collapse to one state carrying the edge count.
  EXPECT_EQ(total_amalgamation(full2()->matrix()), CountMatrix::from(std::vector<std::vector<int>>{{2}}));
  EXPECT_EQ(total_amalgamation(full3()->matrix()), CountMatrix::from(std::vector<std::vector<int>>{{3}}));
}

TEST(TotalAmalgamation, NoIdenticalColumnsRemainAndSumsPreserved) {
  std::mt19937 rng(77);
  for (int trial = 0; trial < 200; ++trial) {
    const auto m = random_base_matrix(rng, 2 + trial % 4);
    const auto t = total_amalgamation(m);
    for (std::size_t i = 0; i < t.cols(); ++i)
      for (std::size_t j = i + 1; j < t.cols(); ++j) {
        bool same = true;
        for (std::size_t k = 0; k < t.rows(); ++k) same = same && t(k, i) == t(k, j);
        EXPECT_FALSE(same);
      }
    std::int64_t edges = 0, orig = 0;
    for (std::size_t i = 0; i < t.rows(); ++i)
      for (std::size_t j = 0; j < t.cols(); ++j) edges += t(i, j);
    for (const auto& r : m.rows()) orig += std::accumulate(r.begin(), r.end(), 0);
    EXPECT_LE(edges, orig);
  }
}

TEST(EqualUpToPermutation, MatchesBruteForce) {
  std::mt19937 rng(5);
  std::uniform_int_distribution<int> e(0, 2);
  for (int trial = 0; trial < 400; ++trial) {
    const std::size_t n = 1 + trial % 5;
    CountMatrix a(n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) a(i, j) = e(rng);
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    CountMatrix b(n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) b(perm[i], perm[j]) = a(i, j);
    if (trial % 2) b(rng() % n, rng() % n) += 1;
    EXPECT_EQ(equal_up_to_permutation(a, b), brute_equal_up_to_permutation(a, b));
  }
}

TEST(DecideOneSidedConjugacy, Examples) {
  const auto g = golden();
  const auto s = out_split(g, {{{0}, {1}}, {{0}}});
  EXPECT_TRUE(decide_one_sided_conjugacy(g->matrix(), s.split->matrix()));
  EXPECT_FALSE(decide_one_sided_conjugacy(full2()->matrix(), full3()->matrix()));
  EXPECT_TRUE(decide_one_sided_conjugacy(full3()->matrix(), full3()->matrix()));
  EXPECT_FALSE(decide_one_sided_conjugacy(g->matrix(), full2()->matrix()));
  std::vector<std::vector<int>> big(13, std::vector<int>(13, 1));
  try {
    decide_one_sided_conjugacy(TransitionMatrix(big), full2()->matrix());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::TooLarge);
  }
}

TEST(DecideOneSidedConjugacy, AgreesWithGeneratedAndSearchedConjugacies) {
  for (std::uint32_t seed = 0; seed < 60; ++seed) {
    const auto gen = generate_conjugacy(seed);
    EXPECT_TRUE(decide_one_sided_conjugacy(gen.a->matrix(), gen.b->matrix())) << seed;
    EXPECT_TRUE(decide_one_sided_conjugacy(gen.b->matrix(), gen.a->matrix())) << seed;
  }
  // Pairs of small matrices: a block-code conjugacy found by search implies a
  // positive decision; an invariant obstruction implies a negative one.
  std::mt19937 rng(99);
  for (int trial = 0; trial < 40; ++trial) {
    const auto a = build_shift_space(random_base_matrix(rng, 2 + trial % 2));
    const auto b = build_shift_space(random_base_matrix(rng, 2 + (trial / 2) % 2));
    const bool decided = decide_one_sided_conjugacy(a->matrix(), b->matrix());
    const auto found = search_conjugacy(a, b, 2, 20000);
    if (found.h) { EXPECT_TRUE(decided); }
    if (obstruction_report(a->matrix(), b->matrix()).coe_ruled_out) { EXPECT_FALSE(decided); }
  }
}

TEST(ObstructionReport, Examples) {
  const auto r = obstruction_report(full2()->matrix(), full3()->matrix());
  EXPECT_TRUE(r.coe_ruled_out);
  const auto g = golden();
  const auto s = out_split(g, {{{0}, {1}}, {{0}}});
  EXPECT_FALSE(obstruction_report(g->matrix(), s.split->matrix()).coe_ruled_out);
  EXPECT_FALSE(obstruction_report(g->matrix(), g->matrix()).coe_ruled_out);
  EXPECT_EQ(obstruction_report(g->matrix(), g->matrix()).reason, "no obstruction found");
}

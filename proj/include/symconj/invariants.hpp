#pragma once

#include <algorithm>
#include <boost/multiprecision/cpp_int.hpp>
#include <cstdint>
#include <functional>
#include <map>
#include <numeric>
#include <random>
#include <string>
#include <tuple>
#include <vector>

#include "shift_map.hpp"
#include "shift_space.hpp"

namespace symconj {

using BigInt = boost::multiprecision::cpp_int;

/// Dense row-major integer matrix.
template <typename T>
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, T fill = T(0)) : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = T(1);
    return m;
  }

  template <typename U>
  static Matrix from(const std::vector<std::vector<U>>& rows) {
    Matrix m(rows.size(), rows.empty() ? 0 : rows[0].size());
    for (std::size_t i = 0; i < m.rows_; ++i) {
      if (rows[i].size() != m.cols_) throw Error(ErrorKind::NotSquare, "ragged matrix");
      for (std::size_t j = 0; j < m.cols_; ++j) m(i, j) = T(rows[i][j]);
    }
    return m;
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  T& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const T& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  Matrix transpose() const {
    Matrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
  }

  friend Matrix operator*(const Matrix& a, const Matrix& b) {
    if (a.cols_ != b.rows_) throw Error(ErrorKind::InvalidArgument, "shape mismatch in product");
    Matrix c(a.rows_, b.cols_);
    for (std::size_t i = 0; i < a.rows_; ++i)
      for (std::size_t k = 0; k < a.cols_; ++k) {
        if (a(i, k) == 0) continue;
        for (std::size_t j = 0; j < b.cols_; ++j) c(i, j) += a(i, k) * b(k, j);
      }
    return c;
  }

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0, cols_ = 0;
  std::vector<T> data_;
};

using IntMatrix = Matrix<BigInt>;
using CountMatrix = Matrix<std::int64_t>;

inline IntMatrix to_int_matrix(const TransitionMatrix& a) { return IntMatrix::from(a.rows()); }

/// I - A.
inline IntMatrix identity_minus(const IntMatrix& a) {
  IntMatrix m = IntMatrix::identity(a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) m(i, j) -= a(i, j);
  return m;
}

/// Exact determinant by fraction-free (Bareiss) elimination.
inline BigInt determinant(IntMatrix m) {
  const std::size_t n = m.rows();
  if (n != m.cols()) throw Error(ErrorKind::NotSquare, "determinant of non-square matrix");
  if (n == 0) return 1;
  BigInt prev = 1;
  int sign = 1;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (m(k, k) == 0) {
      std::size_t r = k + 1;
      while (r < n && m(r, k) == 0) ++r;
      if (r == n) return 0;
      for (std::size_t j = 0; j < n; ++j) std::swap(m(k, j), m(r, j));
      sign = -sign;
    }
    for (std::size_t i = k + 1; i < n; ++i)
      for (std::size_t j = k + 1; j < n; ++j) m(i, j) = (m(i, j) * m(k, k) - m(i, k) * m(k, j)) / prev;
    prev = m(k, k);
  }
  return sign * m(n - 1, n - 1);
}

struct SmithForm {
  IntMatrix U, D, V;  // U * M * V = D

  /// Diagonal of D, d1 | d2 | ... ; zeros last.
  std::vector<BigInt> factors() const {
    std::vector<BigInt> f;
    for (std::size_t i = 0; i < std::min(D.rows(), D.cols()); ++i) f.push_back(D(i, i));
    return f;
  }
};

/// Smith normal form with unimodular transforms. Pivot: least nonzero
/// absolute value in the remaining block, ties to the lowest (row, column).
inline SmithForm smith_normal_form(const IntMatrix& m) {
  const std::size_t R = m.rows(), C = m.cols();
  IntMatrix D = m, U = IntMatrix::identity(R), V = IntMatrix::identity(C);
  auto swap_rows = [&](std::size_t a, std::size_t b) {
    if (a == b) return;
    for (std::size_t j = 0; j < C; ++j) std::swap(D(a, j), D(b, j));
    for (std::size_t j = 0; j < R; ++j) std::swap(U(a, j), U(b, j));
  };
  auto swap_cols = [&](std::size_t a, std::size_t b) {
    if (a == b) return;
    for (std::size_t i = 0; i < R; ++i) std::swap(D(i, a), D(i, b));
    for (std::size_t i = 0; i < C; ++i) std::swap(V(i, a), V(i, b));
  };
  // row_dst += q * row_src
  auto add_row = [&](std::size_t dst, std::size_t src, const BigInt& q) {
    for (std::size_t j = 0; j < C; ++j) D(dst, j) += q * D(src, j);
    for (std::size_t j = 0; j < R; ++j) U(dst, j) += q * U(src, j);
  };
  auto add_col = [&](std::size_t dst, std::size_t src, const BigInt& q) {
    for (std::size_t i = 0; i < R; ++i) D(i, dst) += q * D(i, src);
    for (std::size_t i = 0; i < C; ++i) V(i, dst) += q * V(i, src);
  };

  const std::size_t n = std::min(R, C);
  for (std::size_t t = 0; t < n; ++t) {
    for (;;) {
      std::size_t pi = R, pj = C;
      BigInt best = 0;
      for (std::size_t i = t; i < R; ++i)
        for (std::size_t j = t; j < C; ++j) {
          if (D(i, j) == 0) continue;
          BigInt a = abs(D(i, j));
          if (pi == R || a < best) {
            best = a;
            pi = i;
            pj = j;
          }
        }
      if (pi == R) return {U, D, V};
      swap_rows(t, pi);
      swap_cols(t, pj);
      bool clean = true;
      for (std::size_t i = t + 1; i < R; ++i) {
        if (D(i, t) == 0) continue;
        add_row(i, t, -(D(i, t) / D(t, t)));
        if (D(i, t) != 0) clean = false;
      }
      for (std::size_t j = t + 1; j < C; ++j) {
        if (D(t, j) == 0) continue;
        add_col(j, t, -(D(t, j) / D(t, t)));
        if (D(t, j) != 0) clean = false;
      }
      if (!clean) continue;
      bool divides = true;
      for (std::size_t i = t + 1; i < R && divides; ++i)
        for (std::size_t j = t + 1; j < C; ++j)
          if (D(i, j) % D(t, t) != 0) {
            add_row(t, i, 1);
            divides = false;
            break;
          }
      if (divides) break;
    }
    if (D(t, t) < 0) {
      for (std::size_t j = 0; j < C; ++j) D(t, j) = -D(t, j);
      for (std::size_t j = 0; j < R; ++j) U(t, j) = -U(t, j);
    }
  }
  return {U, D, V};
}

inline int sign_of(const BigInt& x) { return x > 0 ? 1 : (x < 0 ? -1 : 0); }

struct InvariantReport {
  std::vector<BigInt> bf;  // nonunit invariant factors of Z^N / (I - A) Z^N; 0 stands for a Z summand
  int det_sign = 0;        // sign of det(I - A)
  std::vector<BigInt> k0;  // nonunit invariant factors of coker(I - A^t)
  int k1_rank = 0;         // rank of ker(I - A^t)
  BigInt det;
};

namespace detail {
inline std::vector<BigInt> nonunit(const std::vector<BigInt>& f) {
  std::vector<BigInt> out;
  for (const auto& d : f)
    if (d != 1) out.push_back(d);
  return out;
}
}  // namespace detail

inline InvariantReport bowen_franks(const TransitionMatrix& a) {
  const IntMatrix m = identity_minus(to_int_matrix(a));
  InvariantReport r;
  r.bf = detail::nonunit(smith_normal_form(m).factors());
  r.det = determinant(m);
  r.det_sign = sign_of(r.det);
  return r;
}

inline InvariantReport k_theory(const TransitionMatrix& a) {
  const IntMatrix m = identity_minus(to_int_matrix(a)).transpose();
  InvariantReport r;
  const auto f = smith_normal_form(m).factors();
  r.k0 = detail::nonunit(f);
  r.k1_rank = static_cast<int>(std::count(f.begin(), f.end(), BigInt(0)));
  r.det = determinant(m);
  r.det_sign = sign_of(r.det);
  return r;
}

inline InvariantReport invariants(const TransitionMatrix& a) {
  InvariantReport r = bowen_franks(a);
  const InvariantReport k = k_theory(a);
  r.k0 = k.k0;
  r.k1_rank = k.k1_rank;
  return r;
}

/// trace(A^n), the number of points fixed by sigma^n.
inline BigInt trace_power(const TransitionMatrix& a, int n) {
  IntMatrix m = to_int_matrix(a);
  IntMatrix p = IntMatrix::identity(m.rows());
  for (int i = 0; i < n; ++i) p = p * m;
  BigInt t = 0;
  for (std::size_t i = 0; i < p.rows(); ++i) t += p(i, i);
  return t;
}

// ---------------------------------------------------------------------------
// State splitting and amalgamation

/// Partition of each state's follower set; blocks[i] lists the blocks of state i.
using SplitPartition = std::vector<std::vector<std::vector<Symbol>>>;

struct OutSplit {
  SpacePtr split;
  BlockCode h;      // X_A -> X_split, window 2
  BlockCode h_inv;  // X_split -> X_A, window 1
  std::vector<std::pair<Symbol, int>> origin;  // new state -> (old state, block)
};

/// Out-splitting: state i becomes one state per block of its followers; the
/// copy for block p has edges to every copy of every follower in p.
inline OutSplit out_split(const SpacePtr& s, const SplitPartition& partition) {
  const int n = s->alphabet();
  if (static_cast<int>(partition.size()) != n) throw Error(ErrorKind::InvalidPartition, "one partition per state required");
  std::vector<std::pair<Symbol, int>> origin;
  std::vector<std::vector<int>> block_of(n, std::vector<int>(n, -1));
  std::vector<int> first_copy(n);
  for (int i = 0; i < n; ++i) {
    first_copy[i] = static_cast<int>(origin.size());
    if (partition[i].empty()) throw Error(ErrorKind::InvalidPartition, "state " + std::to_string(i + 1) + " has no blocks");
    for (std::size_t p = 0; p < partition[i].size(); ++p) {
      if (partition[i][p].empty()) throw Error(ErrorKind::InvalidPartition, "empty block");
      for (Symbol j : partition[i][p]) {
        if (j < 0 || j >= n || !s->allowed(i, j)) throw Error(ErrorKind::InvalidPartition, "block contains a non-follower");
        if (block_of[i][j] >= 0) throw Error(ErrorKind::InvalidPartition, "follower listed twice");
        block_of[i][j] = static_cast<int>(p);
      }
      origin.emplace_back(i, static_cast<int>(p));
    }
    for (Symbol j : s->followers(i))
      if (block_of[i][j] < 0) throw Error(ErrorKind::InvalidPartition, "follower not covered");
  }
  const std::size_t m = origin.size();
  if (m > static_cast<std::size_t>(kMaxAlphabet)) throw Error(ErrorKind::TooLarge, "split alphabet too large");
  std::vector<std::vector<int>> rows(m, std::vector<int>(m, 0));
  for (std::size_t a = 0; a < m; ++a) {
    auto [i, p] = origin[a];
    for (std::size_t b = 0; b < m; ++b)
      if (block_of[i][origin[b].first] == p) rows[a][b] = 1;
  }
  auto split = build_shift_space(rows);
  std::map<Word, Symbol> htab;
  for (const Word& w : s->words(2)) htab[w] = first_copy[sym(w, 0)] + block_of[sym(w, 0)][sym(w, 1)];
  std::map<Word, Symbol> itab;
  for (std::size_t a = 0; a < m; ++a) itab[Word(1, static_cast<char>(a))] = origin[a].first;
  BlockCode h = compile_block_code(s, split, 2, htab);
  BlockCode h_inv = compile_block_code(split, s, 1, itab);
  return OutSplit{split, h, h_inv, origin};
}

/// Random partition of every follower set, keeping the split within `max_states`.
template <typename Rng>
SplitPartition random_split_partition(const ShiftSpace& s, Rng& rng, int max_states) {
  const int n = s.alphabet();
  SplitPartition part(n);
  int total = n;
  for (int i = 0; i < n; ++i) {
    const auto& fol = s.followers(i);
    int blocks = 1;
    if (fol.size() > 1 && total < max_states) {
      std::uniform_int_distribution<int> d(1, std::min<int>(static_cast<int>(fol.size()), 1 + max_states - total));
      blocks = d(rng);
    }
    total += blocks - 1;
    part[i].resize(blocks);
    std::vector<Symbol> shuffled = fol;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    for (int b = 0; b < blocks; ++b) part[i][b].push_back(shuffled[b]);
    std::uniform_int_distribution<int> pick(0, blocks - 1);
    for (std::size_t k = static_cast<std::size_t>(blocks); k < shuffled.size(); ++k) part[i][pick(rng)].push_back(shuffled[k]);
    for (auto& blk : part[i]) std::sort(blk.begin(), blk.end());
  }
  return part;
}

namespace detail {

inline std::vector<std::int64_t> state_signature(const CountMatrix& m, std::size_t i) {
  std::vector<std::int64_t> row, col;
  std::int64_t rs = 0, cs = 0;
  for (std::size_t j = 0; j < m.cols(); ++j) {
    row.push_back(m(i, j));
    col.push_back(m(j, i));
    rs += m(i, j);
    cs += m(j, i);
  }
  std::sort(row.begin(), row.end());
  std::sort(col.begin(), col.end());
  std::vector<std::int64_t> sig{rs, cs, m(i, i)};
  sig.insert(sig.end(), row.begin(), row.end());
  sig.insert(sig.end(), col.begin(), col.end());
  return sig;
}

}  // namespace detail

/// Merges states with identical columns (equal predecessor counts), adding
/// their rows, until no two columns agree. This undoes out-splittings; the
/// result is a nonnegative integer matrix with states ordered by signature.
inline CountMatrix total_amalgamation(const TransitionMatrix& a) {
  CountMatrix m = CountMatrix::from(a.rows());
  for (bool merged = true; merged;) {
    merged = false;
    const std::size_t n = m.rows();
    for (std::size_t i = 0; i < n && !merged; ++i)
      for (std::size_t j = i + 1; j < n && !merged; ++j) {
        bool same = true;
        for (std::size_t k = 0; k < n && same; ++k) same = m(k, i) == m(k, j);
        if (!same) continue;
        CountMatrix next(n - 1, n - 1);
        auto idx = [&](std::size_t x) { return x < j ? x : x - 1; };
        for (std::size_t r = 0; r < n; ++r) {
          if (r == j) continue;
          for (std::size_t c = 0; c < n; ++c) {
            if (c == j) continue;
            std::int64_t v = m(r, c);
            if (r == i) v += m(j, c);
            next(idx(r), idx(c)) = v;
          }
        }
        m = std::move(next);
        merged = true;
      }
  }
  const std::size_t n = m.rows();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    return detail::state_signature(m, x) < detail::state_signature(m, y);
  });
  CountMatrix out(n, n);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c) out(r, c) = m(order[r], order[c]);
  return out;
}

/// Backtracking search for a permutation P with P a P^-1 = b, restricted to
/// states with equal signatures.
inline bool equal_up_to_permutation(const CountMatrix& a, const CountMatrix& b) {
  const std::size_t n = a.rows();
  if (n != b.rows() || a.cols() != n || b.cols() != n) return false;
  std::vector<std::vector<std::int64_t>> sa(n), sb(n);
  for (std::size_t i = 0; i < n; ++i) {
    sa[i] = detail::state_signature(a, i);
    sb[i] = detail::state_signature(b, i);
  }
  {
    auto x = sa, y = sb;
    std::sort(x.begin(), x.end());
    std::sort(y.begin(), y.end());
    if (x != y) return false;
  }
  std::vector<int> map(n, -1);
  std::vector<char> used(n, 0);
  std::function<bool(std::size_t)> rec = [&](std::size_t i) {
    if (i == n) return true;
    for (std::size_t j = 0; j < n; ++j) {
      if (used[j] || sa[i] != sb[j]) continue;
      bool ok = a(i, i) == b(j, j);
      for (std::size_t k = 0; k < i && ok; ++k)
        ok = a(i, k) == b(j, static_cast<std::size_t>(map[k])) && a(k, i) == b(static_cast<std::size_t>(map[k]), j);
      if (!ok) continue;
      map[i] = static_cast<int>(j);
      used[j] = 1;
      if (rec(i + 1)) return true;
      used[j] = 0;
    }
    map[i] = -1;
    return false;
  };
  return rec(0);
}

inline constexpr int kMaxDecideStates = 12;

/// One-sided conjugacy of X_A and X_B: equal total amalgamations up to a
/// permutation of states.
inline bool decide_one_sided_conjugacy(const TransitionMatrix& a, const TransitionMatrix& b) {
  if (a.size() > kMaxDecideStates || b.size() > kMaxDecideStates)
    throw Error(ErrorKind::TooLarge, "decision limited to " + std::to_string(kMaxDecideStates) + " states");
  return equal_up_to_permutation(total_amalgamation(a), total_amalgamation(b));
}

struct ObstructionReport {
  InvariantReport a, b;
  bool coe_ruled_out = false;  // and with it strong COE, eventual conjugacy, conjugacy
  std::string reason;
};

/// Invariant comparison. Agreement is reported as "no obstruction" and is
/// never a claim of equivalence.
inline ObstructionReport obstruction_report(const TransitionMatrix& a, const TransitionMatrix& b) {
  ObstructionReport r{invariants(a), invariants(b), false, ""};
  if (r.a.bf != r.b.bf) {
    r.coe_ruled_out = true;
    r.reason = "Bowen-Franks groups differ";
  } else if (r.a.det_sign != r.b.det_sign) {
    r.coe_ruled_out = true;
    r.reason = "signs of det(I - A) differ";
  } else {
    r.reason = "no obstruction found";
  }
  return r;
}

}  // namespace symconj

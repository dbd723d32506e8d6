#pragma once

#include <algorithm>
#include <compare>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <numeric>
#include <queue>
#include <string>
#include <tuple>
#include <unordered_map>
#include <vector>

#include "errors.hpp"
#include "word.hpp"

namespace symconj {

/// Square 0-1 matrix; entry (i,j) = 1 allows symbol j to follow symbol i.
class TransitionMatrix {
 public:
  TransitionMatrix() = default;

  explicit TransitionMatrix(const std::vector<std::vector<int>>& rows) {
    n_ = static_cast<int>(rows.size());
    if (n_ == 0) throw Error(ErrorKind::NotSquare, "empty matrix");
    if (n_ > kMaxAlphabet) throw Error(ErrorKind::TooLarge, "alphabet exceeds " + std::to_string(kMaxAlphabet));
    entries_.reserve(static_cast<std::size_t>(n_) * n_);
    for (const auto& row : rows) {
      if (static_cast<int>(row.size()) != n_) throw Error(ErrorKind::NotSquare, "row length differs from row count");
      for (int v : row) {
        if (v != 0 && v != 1) throw Error(ErrorKind::NotZeroOne, "entry " + std::to_string(v));
        entries_.push_back(static_cast<std::uint8_t>(v));
      }
    }
  }

  int size() const noexcept { return n_; }
  bool operator()(int i, int j) const { return entries_[static_cast<std::size_t>(i) * n_ + j] != 0; }

  std::vector<std::vector<int>> rows() const {
    std::vector<std::vector<int>> out(n_, std::vector<int>(n_));
    for (int i = 0; i < n_; ++i)
      for (int j = 0; j < n_; ++j) out[i][j] = (*this)(i, j) ? 1 : 0;
    return out;
  }

  bool is_permutation() const {
    for (int i = 0; i < n_; ++i) {
      int r = 0, c = 0;
      for (int j = 0; j < n_; ++j) {
        r += (*this)(i, j);
        c += (*this)(j, i);
      }
      if (r != 1 || c != 1) return false;
    }
    return true;
  }

  bool is_irreducible() const {
    if (n_ == 1) return (*this)(0, 0) != 0;  // [0] has no cycle
    auto reach_all = [&](bool transpose) {
      std::vector<char> seen(n_, 0);
      std::vector<int> stack{0};
      seen[0] = 1;
      while (!stack.empty()) {
        int i = stack.back();
        stack.pop_back();
        for (int j = 0; j < n_; ++j) {
          bool edge = transpose ? (*this)(j, i) : (*this)(i, j);
          if (edge && !seen[j]) {
            seen[j] = 1;
            stack.push_back(j);
          }
        }
      }
      return std::all_of(seen.begin(), seen.end(), [](char c) { return c != 0; });
    };
    return reach_all(false) && reach_all(true);
  }

  friend bool operator==(const TransitionMatrix&, const TransitionMatrix&) = default;

 private:
  int n_ = 0;
  std::vector<std::uint8_t> entries_;
};

/// An eventually periodic point pre . cyc . cyc . cyc ...
///
/// Canonical form: `cyc` is primitive and `pre` cannot be shortened, which
/// for a nonempty preperiod means pre.back() != cyc.back(). A canonical
/// point is uniquely determined by the sequence it denotes.
struct Point {
  Word pre;
  Word cyc;

  friend auto operator<=>(const Point&, const Point&) = default;
  friend bool operator==(const Point&, const Point&) = default;
};

/// Primitive root of a nonempty word.
inline Word primitive_root(const Word& w) {
  const std::size_t n = w.size();
  for (std::size_t d = 1; d < n; ++d) {
    if (n % d) continue;
    bool ok = true;
    for (std::size_t i = d; i < n && ok; ++i) ok = w[i] == w[i - d];
    if (ok) return w.substr(0, d);
  }
  return w;
}

/// Canonical form without admissibility checking.
inline Point canonicalize(Word pre, Word cyc) {
  if (cyc.empty()) throw Error(ErrorKind::InvalidArgument, "empty cycle");
  cyc = primitive_root(cyc);
  while (!pre.empty() && pre.back() == cyc.back()) {
    pre.pop_back();
    std::rotate(cyc.rbegin(), cyc.rbegin() + 1, cyc.rend());
  }
  return Point{std::move(pre), std::move(cyc)};
}

inline Symbol symbol_at(const Point& p, std::size_t i) {
  if (i < p.pre.size()) return sym(p.pre, i);
  return sym(p.cyc, (i - p.pre.size()) % p.cyc.size());
}

/// First n symbols.
inline Word expand(const Point& p, std::size_t n) {
  Word w(n, '\0');
  for (std::size_t i = 0; i < n; ++i) w[i] = static_cast<char>(symbol_at(p, i));
  return w;
}

/// Symbols [from, from + n).
inline Word window(const Point& p, std::size_t from, std::size_t n) {
  Word w(n, '\0');
  for (std::size_t i = 0; i < n; ++i) w[i] = static_cast<char>(symbol_at(p, from + i));
  return w;
}

/// sigma^k of a canonical point; the result is canonical again.
inline Point shift_by(const Point& p, std::size_t k) {
  if (k < p.pre.size()) return Point{p.pre.substr(k), p.cyc};
  const std::size_t r = (k - p.pre.size()) % p.cyc.size();
  Word c = p.cyc;
  std::rotate(c.begin(), c.begin() + static_cast<std::ptrdiff_t>(r), c.end());
  return Point{Word{}, std::move(c)};
}

/// sigma^ka(a) == sigma^kb(b) for canonical a, b, without materialising either.
inline bool shifted_equal(const Point& a, std::size_t ka, const Point& b, std::size_t kb) {
  const std::size_t pa = ka < a.pre.size() ? a.pre.size() - ka : 0;
  const std::size_t pb = kb < b.pre.size() ? b.pre.size() - kb : 0;
  if (pa != pb || a.cyc.size() != b.cyc.size()) return false;
  for (std::size_t i = 0; i < pa; ++i)
    if (a.pre[ka + i] != b.pre[kb + i]) return false;
  const std::size_t n = a.cyc.size();
  const std::size_t ra = ka < a.pre.size() ? 0 : (ka - a.pre.size()) % n;
  const std::size_t rb = kb < b.pre.size() ? 0 : (kb - b.pre.size()) % n;
  for (std::size_t i = 0; i < n; ++i)
    if (a.cyc[(ra + i) % n] != b.cyc[(rb + i) % n]) return false;
  return true;
}

/// Least rotation of a word; two eventually periodic points have a common
/// shift iff their cycles share a least rotation.
inline Word least_rotation(const Word& c) {
  Word best = c;
  Word r = c;
  for (std::size_t i = 1; i < c.size(); ++i) {
    std::rotate(r.begin(), r.begin() + 1, r.end());
    if (r < best) best = r;
  }
  return best;
}

inline bool tail_equivalent(const Point& a, const Point& b) {
  return a.cyc.size() == b.cyc.size() && least_rotation(a.cyc) == least_rotation(b.cyc);
}

/// A validated one-sided topological Markov shift with cached word tables.
class ShiftSpace {
 public:
  struct WordTable {
    std::vector<Word> words;  // sorted
    std::unordered_map<Word, std::size_t> index;
  };

  explicit ShiftSpace(TransitionMatrix m) : matrix_(std::move(m)) {
    if (!matrix_.is_irreducible()) throw Error(ErrorKind::NotIrreducible, "transition graph is not strongly connected");
    if (matrix_.is_permutation()) throw Error(ErrorKind::PermutationMatrix, "matrix is a permutation matrix");
    const int n = matrix_.size();
    followers_.resize(n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (matrix_(i, j)) followers_[i].push_back(j);
    return_cycle_.resize(n);
    for (int s = 0; s < n; ++s) return_cycle_[s] = shortest_return(s);
  }

  const TransitionMatrix& matrix() const noexcept { return matrix_; }
  int alphabet() const noexcept { return matrix_.size(); }
  bool allowed(Symbol a, Symbol b) const { return matrix_(a, b); }
  const std::vector<Symbol>& followers(Symbol a) const { return followers_[a]; }

  bool admissible(const Word& w) const {
    for (std::size_t i = 0; i < w.size(); ++i) {
      if (sym(w, i) >= alphabet()) return false;
      if (i && !allowed(sym(w, i - 1), sym(w, i))) return false;
    }
    return true;
  }

  /// pre . cyc . cyc admissible, including the wrap from cyc.back() to cyc.front().
  bool contains(const Point& p) const {
    if (p.cyc.empty()) return false;
    return admissible(p.pre + p.cyc + p.cyc.substr(0, 1));
  }

  /// Shortest nonempty word c with s -> c[0] allowed and c.back() == s.
  const Word& return_cycle(Symbol s) const { return return_cycle_[s]; }

  const WordTable& table(int depth) const {
    if (depth < 0 || depth > kMaxDepth) throw Error(ErrorKind::DepthOverflow, "depth " + std::to_string(depth));
    std::lock_guard lock(mutex_);
    return table_unlocked(depth);
  }

  const std::vector<Word>& words(int depth) const { return table(depth).words; }

  std::size_t index_of(const Word& w) const {
    const auto& t = table(static_cast<int>(w.size()));
    auto it = t.index.find(w);
    if (it == t.index.end()) throw Error(ErrorKind::InadmissibleWord, format_word(w));
    return it->second;
  }

 private:
  const WordTable& table_unlocked(int depth) const {
    auto it = tables_.find(depth);
    if (it != tables_.end()) return *it->second;
    auto t = std::make_unique<WordTable>();
    if (depth == 0) {
      t->words.push_back(Word{});
    } else if (depth == 1) {
      for (int s = 0; s < alphabet(); ++s) t->words.push_back(Word(1, static_cast<char>(s)));
    } else {
      const auto& prev = table_unlocked(depth - 1);
      for (const Word& w : prev.words)
        for (Symbol s : followers_[sym(w, w.size() - 1)]) t->words.push_back(w + static_cast<char>(s));
    }
    for (std::size_t i = 0; i < t->words.size(); ++i) t->index.emplace(t->words[i], i);
    auto& ref = *t;
    tables_.emplace(depth, std::move(t));
    return ref;
  }

  Word shortest_return(Symbol s) const {
    const int n = alphabet();
    std::vector<int> parent(n, -2);
    std::queue<int> q;
    for (Symbol f : followers_[s]) {
      if (parent[f] == -2) {
        parent[f] = -1;
        q.push(f);
      }
    }
    while (!q.empty()) {
      int v = q.front();
      q.pop();
      if (v == s) break;
      for (Symbol f : followers_[v])
        if (parent[f] == -2) {
          parent[f] = v;
          q.push(f);
        }
    }
    Word path;
    for (int v = s; v != -1; v = parent[v]) path.push_back(static_cast<char>(v));
    std::reverse(path.begin(), path.end());
    return path;
  }

  TransitionMatrix matrix_;
  std::vector<std::vector<Symbol>> followers_;
  std::vector<Word> return_cycle_;
  mutable std::mutex mutex_;
  mutable std::map<int, std::unique_ptr<WordTable>> tables_;
};

using SpacePtr = std::shared_ptr<const ShiftSpace>;

inline SpacePtr build_shift_space(const TransitionMatrix& m) { return std::make_shared<const ShiftSpace>(m); }

inline SpacePtr build_shift_space(const std::vector<std::vector<int>>& rows) {
  return build_shift_space(TransitionMatrix(rows));
}

inline std::vector<Word> allowed_words(const ShiftSpace& s, int depth) {
  if (depth < 1) throw Error(ErrorKind::InvalidArgument, "depth must be >= 1");
  return s.words(depth);
}

inline Point canonical_point(const ShiftSpace& s, const Word& pre, const Word& cyc) {
  if (cyc.empty()) throw Error(ErrorKind::InvalidArgument, "empty cycle");
  Point raw{pre, cyc};
  if (!s.contains(raw)) throw Error(ErrorKind::InadmissibleWord, format_word(pre) + " | " + format_word(cyc));
  return canonicalize(pre, cyc);
}

inline Point shift_point(const Point& p) { return shift_by(p, 1); }

/// Closed admissible primitive words of length n (cycles read from their first symbol).
inline std::vector<Word> primitive_cycles(const ShiftSpace& s, int n) {
  std::vector<Word> out;
  for (const Word& w : s.words(n)) {
    if (!s.allowed(sym(w, w.size() - 1), sym(w, 0))) continue;
    if (primitive_root(w).size() != w.size()) continue;
    out.push_back(w);
  }
  return out;
}

/// All canonical points with |pre| <= max_pre and |cyc| <= max_cyc, sorted by
/// (|pre|, |cyc|, pre, cyc).
inline std::vector<Point> enumerate_points(const ShiftSpace& s, int max_pre, int max_cyc) {
  if (max_cyc < 1) throw Error(ErrorKind::InvalidArgument, "max_cyc must be >= 1");
  if (max_pre < 0 || max_pre > kMaxDepth || max_cyc > kMaxDepth) throw Error(ErrorKind::DepthOverflow, "enumeration bounds");
  std::vector<Point> out;
  for (int c = 1; c <= max_cyc; ++c) {
    for (const Word& cyc : primitive_cycles(s, c)) {
      out.push_back(Point{Word{}, cyc});
      for (int l = 1; l <= max_pre; ++l) {
        for (const Word& pre : s.words(l)) {
          if (pre.back() == cyc.back()) continue;
          if (!s.allowed(sym(pre, pre.size() - 1), sym(cyc, 0))) continue;
          out.push_back(Point{pre, cyc});
        }
      }
    }
  }
  std::sort(out.begin(), out.end(), [](const Point& a, const Point& b) {
    return std::forward_as_tuple(a.pre.size(), a.cyc.size(), a.pre, a.cyc) <
           std::forward_as_tuple(b.pre.size(), b.cyc.size(), b.pre, b.cyc);
  });
  return out;
}

/// Points of sigma-period dividing n: fixed points of sigma^n.
inline std::size_t count_periodic_points(const ShiftSpace& s, int n) {
  std::size_t total = 0;
  for (int d = 1; d <= n; ++d)
    if (n % d == 0) total += primitive_cycles(s, d).size();
  return total;
}

/// Test points grouped by depth-d cylinder: every allowed d-word w is
/// followed by each enumerated tail that may follow it, plus the shortest
/// return cycle of w.back() so that no cylinder is empty.
struct PointFamily {
  int depth = 0;
  std::vector<std::vector<Point>> by_cylinder;  // aligned with words(depth)

  std::size_t size() const {
    std::size_t n = 0;
    for (const auto& c : by_cylinder) n += c.size();
    return n;
  }

  template <typename F>
  void for_each(F&& f) const {
    for (const auto& c : by_cylinder)
      for (const Point& p : c) f(p);
  }
};

inline PointFamily cylinder_family(const ShiftSpace& s, int depth, int max_pre, int max_cyc) {
  if (depth < 1 || depth > kMaxDepth) throw Error(ErrorKind::DepthOverflow, "family depth " + std::to_string(depth));
  const auto tails = enumerate_points(s, max_pre, max_cyc);
  PointFamily fam;
  fam.depth = depth;
  const auto& ws = s.words(depth);
  fam.by_cylinder.resize(ws.size());
  for (std::size_t i = 0; i < ws.size(); ++i) {
    const Word& w = ws[i];
    const Symbol last = sym(w, w.size() - 1);
    auto& bucket = fam.by_cylinder[i];
    bucket.push_back(canonicalize(w, s.return_cycle(last)));
    for (const Point& t : tails) {
      if (!s.allowed(last, symbol_at(t, 0))) continue;
      bucket.push_back(canonicalize(w + t.pre, t.cyc));
    }
    std::sort(bucket.begin(), bucket.end());
    bucket.erase(std::unique(bucket.begin(), bucket.end()), bucket.end());
  }
  return fam;
}

}  // namespace symconj

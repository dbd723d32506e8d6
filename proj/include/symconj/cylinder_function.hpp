#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <queue>
#include <vector>

#include "shift_space.hpp"

namespace symconj {

/// A locally constant integer function, stored as a table over the allowed
/// words of a fixed depth. Functions of different depths compare equal when
/// they agree after refinement.
class CylinderFunction {
 public:
  CylinderFunction(SpacePtr space, int depth, std::vector<std::int64_t> values)
      : space_(std::move(space)), depth_(depth), values_(std::move(values)) {
    if (depth_ < 1 || depth_ > kMaxDepth) throw Error(ErrorKind::DepthOverflow, "function depth " + std::to_string(depth_));
    if (values_.size() != space_->words(depth_).size())
      throw Error(ErrorKind::NotTotal, "table size does not match allowed words at depth " + std::to_string(depth_));
  }

  static CylinderFunction constant(SpacePtr space, std::int64_t c) {
    const std::size_t n = space->words(1).size();
    return CylinderFunction(std::move(space), 1, std::vector<std::int64_t>(n, c));
  }

  static CylinderFunction from_table(SpacePtr space, int depth, const std::map<Word, std::int64_t>& table) {
    const auto& ws = space->words(depth);
    for (const auto& [w, v] : table) {
      if (static_cast<int>(w.size()) != depth || !space->admissible(w))
        throw Error(ErrorKind::InadmissibleWord, format_word(w));
    }
    std::vector<std::int64_t> vals;
    vals.reserve(ws.size());
    for (const Word& w : ws) {
      auto it = table.find(w);
      if (it == table.end()) throw Error(ErrorKind::NotTotal, "missing value for " + format_word(w));
      vals.push_back(it->second);
    }
    return CylinderFunction(std::move(space), depth, std::move(vals));
  }

  const SpacePtr& space() const noexcept { return space_; }
  int depth() const noexcept { return depth_; }
  const std::vector<std::int64_t>& values() const noexcept { return values_; }

  /// Value on the cylinder of `w`; |w| >= depth, only the prefix is read.
  std::int64_t at(const Word& w) const {
    if (static_cast<int>(w.size()) < depth_) throw Error(ErrorKind::InvalidArgument, "word shorter than depth");
    return values_[space_->index_of(w.substr(0, depth_))];
  }

  std::int64_t operator()(const Point& p) const { return values_[space_->index_of(expand(p, depth_))]; }

  CylinderFunction refine(int depth) const {
    if (depth < depth_) throw Error(ErrorKind::InvalidArgument, "refinement cannot lower depth");
    if (depth == depth_) return *this;
    const auto& ws = space_->words(depth);
    std::vector<std::int64_t> vals;
    vals.reserve(ws.size());
    for (const Word& w : ws) vals.push_back(at(w));
    return CylinderFunction(space_, depth, std::move(vals));
  }

  /// Least-depth representative of the same function.
  CylinderFunction coarsen() const {
    CylinderFunction cur = *this;
    while (cur.depth_ > 1) {
      const int d = cur.depth_ - 1;
      const auto& coarse = space_->words(d);
      std::vector<std::int64_t> vals(coarse.size());
      std::vector<char> set(coarse.size(), 0);
      bool ok = true;
      const auto& fine = space_->words(cur.depth_);
      for (std::size_t i = 0; i < fine.size() && ok; ++i) {
        const std::size_t j = space_->index_of(fine[i].substr(0, d));
        if (!set[j]) {
          set[j] = 1;
          vals[j] = cur.values_[i];
        } else {
          ok = vals[j] == cur.values_[i];
        }
      }
      if (!ok) break;
      cur = CylinderFunction(space_, d, std::move(vals));
    }
    return cur;
  }

  std::int64_t min_value() const { return *std::min_element(values_.begin(), values_.end()); }
  std::int64_t max_value() const { return *std::max_element(values_.begin(), values_.end()); }

  bool is_constant() const { return min_value() == max_value(); }

  friend bool operator==(const CylinderFunction& f, const CylinderFunction& g) {
    if (f.space_.get() != g.space_.get()) return false;
    const int d = std::max(f.depth_, g.depth_);
    return f.refine(d).values_ == g.refine(d).values_;
  }

 private:
  SpacePtr space_;
  int depth_;
  std::vector<std::int64_t> values_;
};

inline CylinderFunction indicator(const SpacePtr& s, const Word& w) {
  if (w.empty() || !s->admissible(w)) throw Error(ErrorKind::InadmissibleWord, format_word(w));
  const int d = static_cast<int>(w.size());
  std::vector<std::int64_t> vals(s->words(d).size(), 0);
  vals[s->index_of(w)] = 1;
  return CylinderFunction(s, d, std::move(vals));
}

inline std::int64_t evaluate(const CylinderFunction& f, const Point& p) { return f(p); }

inline CylinderFunction combine(std::int64_t c1, const CylinderFunction& f, std::int64_t c2, const CylinderFunction& g) {
  if (f.space().get() != g.space().get()) throw Error(ErrorKind::SpaceMismatch, "combine over different spaces");
  const int d = std::max(f.depth(), g.depth());
  auto a = f.refine(d).values();
  const auto b = g.refine(d).values();
  for (std::size_t i = 0; i < a.size(); ++i) a[i] = c1 * a[i] + c2 * b[i];
  return CylinderFunction(f.space(), d, std::move(a));
}

/// f o sigma, at depth(f) + 1.
inline CylinderFunction compose_shift(const CylinderFunction& f) {
  const auto& s = f.space();
  const auto& ws = s->words(f.depth() + 1);
  std::vector<std::int64_t> vals;
  vals.reserve(ws.size());
  for (const Word& w : ws) vals.push_back(f.at(w.substr(1)));
  return CylinderFunction(s, f.depth() + 1, std::move(vals));
}

/// g - (c + b - b o sigma); zero exactly when b is a transfer function for g.
inline CylinderFunction coboundary_defect(const CylinderFunction& g, std::int64_t c, const CylinderFunction& b) {
  const auto cb = combine(1, b, -1, compose_shift(b));
  auto defect = combine(1, g, -1, cb);
  return combine(1, defect, -c, CylinderFunction::constant(g.space(), 1));
}

/// Search for b of depth <= max_depth with g = c + b - b o sigma.
///
/// At a fixed depth m the equation is a potential-difference system on the
/// graph of m-words (edges are the (m+1)-words), so it is solved exactly by
/// propagating along a spanning tree and checking every remaining edge. The
/// returned b vanishes on the lexicographically first m-word.
inline std::optional<CylinderFunction> find_transfer(const SpacePtr& s, const CylinderFunction& g, std::int64_t c,
                                                     int max_depth) {
  if (max_depth > kMaxDepth) throw Error(ErrorKind::DepthOverflow, "transfer depth " + std::to_string(max_depth));
  for (int m = std::max(1, g.depth() - 1); m <= max_depth; ++m) {
    const int big = std::max(g.depth(), m + 1);
    const auto& edges = s->words(m + 1);
    std::vector<std::optional<std::int64_t>> edge_val(edges.size());
    bool consistent = true;
    for (const Word& w : s->words(big)) {
      const std::size_t e = s->index_of(w.substr(0, m + 1));
      const std::int64_t v = g.at(w) - c;
      if (edge_val[e] && *edge_val[e] != v) {
        consistent = false;
        break;
      }
      edge_val[e] = v;
    }
    if (!consistent) continue;

    const auto& verts = s->words(m);
    std::vector<std::vector<std::pair<std::size_t, std::int64_t>>> adj(verts.size());
    for (std::size_t e = 0; e < edges.size(); ++e) {
      const std::size_t from = s->index_of(edges[e].substr(0, m));
      const std::size_t to = s->index_of(edges[e].substr(1));
      // b(from) - b(to) = val
      adj[from].emplace_back(to, -*edge_val[e]);
      adj[to].emplace_back(from, *edge_val[e]);
    }
    std::vector<std::optional<std::int64_t>> b(verts.size());
    b[0] = 0;
    std::queue<std::size_t> q;
    q.push(0);
    while (!q.empty()) {
      const std::size_t v = q.front();
      q.pop();
      for (auto [u, delta] : adj[v]) {
        if (!b[u]) {
          b[u] = *b[v] + delta;
          q.push(u);
        }
      }
    }
    bool ok = true;
    for (std::size_t e = 0; e < edges.size() && ok; ++e) {
      const std::size_t from = s->index_of(edges[e].substr(0, m));
      const std::size_t to = s->index_of(edges[e].substr(1));
      ok = b[from] && b[to] && *b[from] - *b[to] == *edge_val[e];
    }
    if (!ok) continue;
    std::vector<std::int64_t> vals;
    vals.reserve(b.size());
    for (auto& v : b) vals.push_back(*v);
    return CylinderFunction(s, m, std::move(vals));
  }
  return std::nullopt;
}

/// A periodic point whose Birkhoff sum of g over one period differs from
/// period * c. Such a point rules out every transfer function at every depth.
inline std::optional<Point> birkhoff_obstruction(const CylinderFunction& g, std::int64_t c, int max_period) {
  const auto& s = *g.space();
  for (int n = 1; n <= max_period; ++n) {
    for (const Word& cyc : primitive_cycles(s, n)) {
      Point p{Word{}, cyc};
      std::int64_t total = 0;
      for (int i = 0; i < n; ++i) total += g(shift_by(p, static_cast<std::size_t>(i)));
      if (total != static_cast<std::int64_t>(n) * c) return p;
    }
  }
  return std::nullopt;
}

}  // namespace symconj

#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <unordered_map>
#include <vector>

#include "cylinder_function.hpp"
#include "shift_space.hpp"

namespace symconj {

/// Sliding block code with anticipation only: h(x)_n = table(x_n ... x_{n+m-1}).
class BlockCode {
 public:
  BlockCode(SpacePtr source, SpacePtr target, int window, std::vector<Symbol> table)
      : source_(std::move(source)), target_(std::move(target)), window_(window), table_(std::move(table)) {}

  const SpacePtr& source() const noexcept { return source_; }
  const SpacePtr& target() const noexcept { return target_; }
  int window() const noexcept { return window_; }
  const std::vector<Symbol>& table() const noexcept { return table_; }

  Symbol at(const Word& w) const { return table_[source_->index_of(w.substr(0, window_))]; }

  /// Image of a finite word; |u| - window + 1 symbols.
  Word apply(const Word& u) const {
    Word out;
    for (std::size_t i = 0; i + window_ <= u.size(); ++i) out.push_back(static_cast<char>(at(u.substr(i, window_))));
    return out;
  }

 private:
  SpacePtr source_, target_;
  int window_;
  std::vector<Symbol> table_;  // aligned with source->words(window)
};

inline BlockCode compile_block_code(const SpacePtr& src, const SpacePtr& tgt, int window,
                                    const std::map<Word, Symbol>& table) {
  if (window < 1 || window > kMaxDepth) throw Error(ErrorKind::DepthOverflow, "window " + std::to_string(window));
  for (const auto& [w, v] : table) {
    if (static_cast<int>(w.size()) != window || !src->admissible(w))
      throw Error(ErrorKind::InadmissibleWord, "table key " + format_word(w));
    if (v < 0 || v >= tgt->alphabet()) throw Error(ErrorKind::InvalidArgument, "target symbol out of range");
  }
  std::vector<Symbol> vals;
  for (const Word& w : src->words(window)) {
    auto it = table.find(w);
    if (it == table.end()) throw Error(ErrorKind::NotTotal, "no image for " + format_word(w));
    vals.push_back(it->second);
  }
  BlockCode code(src, tgt, window, std::move(vals));
  for (const Word& w : src->words(window + 1)) {
    const Word img = code.apply(w);
    if (!tgt->allowed(sym(img, 0), sym(img, 1)))
      throw Error(ErrorKind::ImageInadmissible, "image of " + format_word(w) + " is " + format_word(img));
  }
  return code;
}

inline BlockCode identity_code(const SpacePtr& s) {
  std::map<Word, Symbol> t;
  for (int a = 0; a < s->alphabet(); ++a) t[Word(1, static_cast<char>(a))] = a;
  return compile_block_code(s, s, 1, t);
}

/// g o h as a single block code of window m_h + m_g - 1.
inline BlockCode compose(const BlockCode& g, const BlockCode& h) {
  if (h.target().get() != g.source().get()) throw Error(ErrorKind::SpaceMismatch, "compose: h target != g source");
  const int window = h.window() + g.window() - 1;
  std::map<Word, Symbol> t;
  for (const Word& u : h.source()->words(window)) t[u] = g.at(h.apply(u));
  return compile_block_code(h.source(), g.target(), window, t);
}

/// Deterministic transducer reading source symbols and emitting target words.
class Transducer {
 public:
  struct Edge {
    int next = -1;
    Word out;
  };

  Transducer(SpacePtr source, SpacePtr target, std::vector<std::string> states, int initial,
             std::vector<std::optional<Edge>> delta)
      : source_(std::move(source)),
        target_(std::move(target)),
        states_(std::move(states)),
        initial_(initial),
        delta_(std::move(delta)) {}

  const SpacePtr& source() const noexcept { return source_; }
  const SpacePtr& target() const noexcept { return target_; }
  const std::vector<std::string>& states() const noexcept { return states_; }
  int initial() const noexcept { return initial_; }
  const std::optional<Edge>& edge(int state, Symbol a) const {
    return delta_[static_cast<std::size_t>(state) * source_->alphabet() + a];
  }

  /// Output emitted while reading u from the initial state.
  Word run(const Word& u) const {
    Word out;
    int st = initial_;
    for (std::size_t i = 0; i < u.size(); ++i) {
      const auto& e = edge(st, sym(u, i));
      if (!e) throw Error(ErrorKind::NotTotal, "no transition from state " + states_[st]);
      out += e->out;
      st = e->next;
    }
    return out;
  }

 private:
  SpacePtr source_, target_;
  std::vector<std::string> states_;
  int initial_;
  std::vector<std::optional<Edge>> delta_;  // state * alphabet + symbol
};

struct TransducerEdgeSpec {
  std::string state;
  Symbol in;
  Word out;
  std::string next;
};

/// Builds and validates a transducer: total on reachable admissible input,
/// admissible output, and no reachable cycle that emits nothing.
inline Transducer compile_transducer(const SpacePtr& src, const SpacePtr& tgt, const std::vector<std::string>& states,
                                     const std::string& initial, const std::vector<TransducerEdgeSpec>& edges) {
  std::unordered_map<std::string, int> id;
  for (std::size_t i = 0; i < states.size(); ++i)
    if (!id.emplace(states[i], static_cast<int>(i)).second) throw Error(ErrorKind::InvalidArgument, "duplicate state " + states[i]);
  auto lookup = [&](const std::string& s) {
    auto it = id.find(s);
    if (it == id.end()) throw Error(ErrorKind::InvalidArgument, "unknown state '" + s + "'");
    return it->second;
  };
  const int n = src->alphabet();
  std::vector<std::optional<Transducer::Edge>> delta(states.size() * static_cast<std::size_t>(n));
  for (const auto& e : edges) {
    if (e.in < 0 || e.in >= n) throw Error(ErrorKind::InvalidArgument, "input symbol out of range");
    for (std::size_t i = 0; i < e.out.size(); ++i)
      if (sym(e.out, i) >= tgt->alphabet()) throw Error(ErrorKind::InvalidArgument, "output symbol out of range");
    auto& slot = delta[static_cast<std::size_t>(lookup(e.state)) * n + e.in];
    if (slot) throw Error(ErrorKind::InvalidArgument, "nondeterministic transition at state " + e.state);
    slot = Transducer::Edge{lookup(e.next), e.out};
  }
  Transducer t(src, tgt, states, lookup(initial), std::move(delta));

  // Configurations (state, last input + 1, last output + 1); 0 = none yet.
  using Config = std::tuple<int, int, int>;
  std::map<Config, std::vector<std::pair<Config, bool>>> graph;
  std::vector<Config> stack{{t.initial(), 0, 0}};
  graph[stack.back()];
  while (!stack.empty()) {
    auto [st, last_in, last_out] = stack.back();
    stack.pop_back();
    auto& succ = graph[{st, last_in, last_out}];
    for (Symbol a = 0; a < n; ++a) {
      if (last_in && !src->allowed(last_in - 1, a)) continue;
      const auto& e = t.edge(st, a);
      if (!e) throw Error(ErrorKind::NotTotal, "no transition from state '" + states[st] + "' on symbol " + std::to_string(a + 1));
      int lo = last_out;
      for (std::size_t i = 0; i < e->out.size(); ++i) {
        if (lo && !tgt->allowed(lo - 1, sym(e->out, i)))
          throw Error(ErrorKind::ImageInadmissible, "state '" + states[st] + "' emits " + format_word(e->out) + " after symbol " + std::to_string(lo));
        lo = sym(e->out, i) + 1;
      }
      Config next{e->next, a + 1, lo};
      succ.emplace_back(next, e->out.empty());
      if (!graph.count(next)) {
        graph[next];
        stack.push_back(next);
      }
    }
  }
  // A cycle made only of silent edges would stall some admissible input.
  std::map<Config, int> color;
  std::function<bool(const Config&)> silent_cycle = [&](const Config& c) {
    color[c] = 1;
    for (const auto& [nx, silent] : graph[c]) {
      if (!silent) continue;
      if (color[nx] == 1) return true;
      if (color[nx] == 0 && silent_cycle(nx)) return true;
    }
    color[c] = 2;
    return false;
  };
  for (const auto& [c, _] : graph)
    if (color[c] == 0 && silent_cycle(c)) throw Error(ErrorKind::StallingCycle, "reachable cycle with empty output at state '" + states[std::get<0>(c)] + "'");
  return t;
}

/// States are the allowed words shorter than the window (the input buffer);
/// a full buffer of window-1 symbols emits one symbol per input.
inline Transducer block_to_transducer(const BlockCode& c) {
  const auto& src = c.source();
  const int m = c.window();
  std::vector<std::string> names;
  std::map<Word, std::string> name_of;
  for (int len = 0; len < m; ++len)
    for (const Word& w : src->words(len)) {
      std::string nm = len == 0 ? std::string("start") : format_word(w);
      name_of[w] = nm;
      names.push_back(nm);
    }
  std::vector<TransducerEdgeSpec> edges;
  for (const auto& [buf, nm] : name_of) {
    for (Symbol a = 0; a < src->alphabet(); ++a) {
      if (!buf.empty() && !src->allowed(sym(buf, buf.size() - 1), a)) continue;
      Word ext = buf + static_cast<char>(a);
      if (static_cast<int>(ext.size()) < m) {
        edges.push_back({nm, a, Word{}, name_of.at(ext)});
      } else {
        Word next = ext.substr(1);
        edges.push_back({nm, a, Word(1, static_cast<char>(c.at(ext))), m == 1 ? nm : name_of.at(next)});
      }
    }
  }
  return compile_transducer(src, c.target(), names, "start", edges);
}

/// A continuous map X_A -> X_B given by a transducer, optionally remembering
/// the block code it came from (used for a faster application path).
class ShiftMap {
 public:
  ShiftMap(Transducer t) : transducer_(std::move(t)) {}  // NOLINT(google-explicit-constructor)
  ShiftMap(const BlockCode& c) : transducer_(block_to_transducer(c)), block_(c) {}  // NOLINT

  const SpacePtr& source() const noexcept { return transducer_.source(); }
  const SpacePtr& target() const noexcept { return transducer_.target(); }
  const Transducer& transducer() const noexcept { return transducer_; }
  const std::optional<BlockCode>& block() const noexcept { return block_; }

 private:
  Transducer transducer_;
  std::optional<BlockCode> block_;
};

inline Point apply_map(const BlockCode& c, const Point& p) {
  const std::size_t len = p.pre.size() + p.cyc.size();
  const Word img = c.apply(expand(p, len + c.window() - 1));
  return canonicalize(img.substr(0, p.pre.size()), img.substr(p.pre.size()));
}

/// Runs the transducer over the preperiod, then over whole cycle passes until
/// the state at the start of a pass repeats.
inline Point apply_map(const Transducer& t, const Point& p) {
  Word out;
  int st = t.initial();
  auto step = [&](Symbol a) {
    const auto& e = t.edge(st, a);
    if (!e) throw Error(ErrorKind::NotTotal, "no transition from state '" + t.states()[st] + "'");
    out += e->out;
    st = e->next;
  };
  for (std::size_t i = 0; i < p.pre.size(); ++i) step(sym(p.pre, i));
  std::vector<long> seen(t.states().size(), -1);
  while (seen[st] < 0) {
    seen[st] = static_cast<long>(out.size());
    for (std::size_t i = 0; i < p.cyc.size(); ++i) step(sym(p.cyc, i));
  }
  const std::size_t mark = static_cast<std::size_t>(seen[st]);
  if (mark == out.size()) throw Error(ErrorKind::StallingCycle, "cycle emits nothing");
  return canonicalize(out.substr(0, mark), out.substr(mark));
}

inline Point apply_map(const ShiftMap& h, const Point& p) {
  if (h.block()) return apply_map(*h.block(), p);
  return apply_map(h.transducer(), p);
}

/// g o h as a product transducer over the reachable state pairs.
inline ShiftMap compose(const ShiftMap& g, const ShiftMap& h) {
  if (h.target().get() != g.source().get()) throw Error(ErrorKind::SpaceMismatch, "compose: h target != g source");
  if (g.block() && h.block()) return ShiftMap(compose(*g.block(), *h.block()));
  const Transducer& th = h.transducer();
  const Transducer& tg = g.transducer();
  auto name = [&](int a, int b) { return th.states()[a] + "|" + tg.states()[b]; };
  std::map<std::pair<int, int>, bool> seen;
  std::vector<std::pair<int, int>> todo{{th.initial(), tg.initial()}};
  std::vector<std::string> names;
  std::vector<TransducerEdgeSpec> edges;
  seen[todo.back()] = true;
  while (!todo.empty()) {
    auto [a, b] = todo.back();
    todo.pop_back();
    names.push_back(name(a, b));
    for (Symbol x = 0; x < h.source()->alphabet(); ++x) {
      const auto& e = th.edge(a, x);
      if (!e) continue;
      int st = b;
      Word out;
      bool total = true;
      for (std::size_t i = 0; i < e->out.size() && total; ++i) {
        const auto& f = tg.edge(st, sym(e->out, i));
        if (!f) {
          total = false;
          break;
        }
        out += f->out;
        st = f->next;
      }
      if (!total) continue;  // unreachable under admissible input; validation decides
      edges.push_back({name(a, b), x, out, name(e->next, st)});
      if (!seen[{e->next, st}]) {
        seen[{e->next, st}] = true;
        todo.emplace_back(e->next, st);
      }
    }
  }
  return ShiftMap(compile_transducer(h.source(), g.target(), names, name(th.initial(), tg.initial()), edges));
}

struct InverseCheck {
  bool ok = true;
  std::optional<Point> witness;
  bool witness_in_target = false;  // true when h(hInv(q)) != q failed

  explicit operator bool() const noexcept { return ok; }
};

inline InverseCheck verify_inverse_pair(const ShiftMap& h, const ShiftMap& h_inv, int max_pre, int max_cyc) {
  if (h.target().get() != h_inv.source().get() || h_inv.target().get() != h.source().get())
    throw Error(ErrorKind::SpaceMismatch, "maps do not form a pair A->B, B->A");
  for (const Point& p : enumerate_points(*h.source(), max_pre, max_cyc))
    if (apply_map(h_inv, apply_map(h, p)) != p) return {false, p, false};
  for (const Point& q : enumerate_points(*h.target(), max_pre, max_cyc))
    if (apply_map(h, apply_map(h_inv, q)) != q) return {false, q, true};
  return {};
}

/// Looks for a block code g with g o h = id and h o g = id, window <= max_window.
///
/// At window w every target w-word must come from source words of length
/// w + m - 1 sharing a single first symbol; that symbol is g's value.
inline std::optional<BlockCode> search_inverse(const BlockCode& h, int max_window) {
  if (max_window > kMaxDepth) throw Error(ErrorKind::DepthOverflow, "window " + std::to_string(max_window));
  const auto& A = h.source();
  const auto& B = h.target();
  const int m = h.window();
  for (int w = 1; w <= max_window; ++w) {
    if (w + m - 1 > kMaxDepth) break;
    std::map<Word, std::set<Symbol>> first;
    for (const Word& u : A->words(w + m - 1)) first[h.apply(u)].insert(sym(u, 0));
    std::map<Word, Symbol> table;
    bool ok = true;
    for (const Word& v : B->words(w)) {
      auto it = first.find(v);
      if (it == first.end() || it->second.size() != 1) {
        ok = false;
        break;
      }
      table[v] = *it->second.begin();
    }
    if (!ok) continue;
    std::optional<BlockCode> g;
    try {
      g = compile_block_code(B, A, w, table);
    } catch (const Error&) {
      continue;
    }
    // h o g = id on target words; g o h = id holds by construction but is rechecked.
    for (const Word& v : B->words(w + m - 1)) {
      if (h.apply(g->apply(v)) != v.substr(0, 1)) {
        ok = false;
        break;
      }
    }
    for (const Word& u : A->words(m + w - 1)) {
      if (!ok) break;
      if (g->apply(h.apply(u)) != u.substr(0, 1)) ok = false;
    }
    if (ok) return g;
  }
  return std::nullopt;
}

/// Bounded search for a block-code conjugacy A -> B: codes of window <= max_window
/// enumerated in lexicographic table order, each tested with search_inverse.
/// `budget` caps the number of complete tables examined.
struct ConjugacySearch {
  std::optional<BlockCode> h, h_inv;
  bool exhausted = false;  // every candidate up to max_window was examined
};

inline ConjugacySearch search_conjugacy(const SpacePtr& A, const SpacePtr& B, int max_window, std::size_t budget = 200000) {
  ConjugacySearch result;
  std::size_t examined = 0;
  bool truncated = false;
  for (int m = 1; m <= max_window && !result.h; ++m) {
    const auto& keys = A->words(m);
    const auto& ext = A->words(m + 1);
    // Each (m+1)-word constrains the pair (prefix, suffix) of window words.
    std::vector<std::vector<std::pair<std::size_t, bool>>> constraints(keys.size());
    for (const Word& e : ext) {
      const std::size_t a = A->index_of(e.substr(0, m));
      const std::size_t b = A->index_of(e.substr(1));
      const std::size_t later = std::max(a, b);
      constraints[later].emplace_back(later == a ? b : a, later == a);
    }
    std::vector<Symbol> table(keys.size(), 0);
    std::function<bool(std::size_t)> rec = [&](std::size_t i) -> bool {
      if (examined >= budget) {
        truncated = true;
        return true;
      }
      if (i == keys.size()) {
        ++examined;
        BlockCode h(A, B, m, table);
        auto g = search_inverse(h, max_window);
        if (g) {
          result.h = h;
          result.h_inv = *g;
          return true;
        }
        return false;
      }
      for (Symbol v = 0; v < B->alphabet(); ++v) {
        table[i] = v;
        bool ok = true;
        for (auto [other, i_is_prefix] : constraints[i]) {
          const Symbol a = i_is_prefix ? v : table[other];
          const Symbol b = i_is_prefix ? table[other] : v;
          if (!B->allowed(a, b)) {
            ok = false;
            break;
          }
        }
        if (ok && rec(i + 1)) return true;
      }
      return false;
    };
    rec(0);
    if (truncated) break;
  }
  result.exhausted = !truncated && !result.h;
  return result;
}

/// f o h for f over the target. The depth is the least d at which every
/// allowed source d-word already forces depth(f) output symbols.
inline CylinderFunction pullback(const CylinderFunction& f, const ShiftMap& h, int max_depth = kMaxDepth) {
  if (f.space().get() != h.target().get()) throw Error(ErrorKind::SpaceMismatch, "pullback: f is not over the target");
  const auto& A = h.source();
  const std::size_t need = static_cast<std::size_t>(f.depth());
  for (int d = 1; d <= std::min(max_depth, kMaxDepth); ++d) {
    const auto& ws = A->words(d);
    std::vector<std::int64_t> vals;
    vals.reserve(ws.size());
    bool ok = true;
    for (const Word& u : ws) {
      const Word out = h.block() ? h.block()->apply(u) : h.transducer().run(u);
      if (out.size() < need) {
        ok = false;
        break;
      }
      vals.push_back(f.at(out));
    }
    if (ok) return CylinderFunction(A, d, std::move(vals));
  }
  throw Error(ErrorKind::DepthOverflow, "output not determined within depth " + std::to_string(max_depth));
}

}  // namespace symconj

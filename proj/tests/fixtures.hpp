#pragma once

#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "symconj/symconj.hpp"

namespace symconj::testing {

inline SpacePtr full2() { return build_shift_space({{1, 1}, {1, 1}}); }
inline SpacePtr full3() { return build_shift_space({{1, 1, 1}, {1, 1, 1}, {1, 1, 1}}); }
inline SpacePtr golden() { return build_shift_space({{1, 1}, {1, 0}}); }

inline Point pt(const char* pre, const char* cyc) { return canonicalize(digits(pre), digits(cyc)); }

inline BlockCode swap_code(const SpacePtr& s) {
  return compile_block_code(s, s, 1, {{digits("1"), 1}, {digits("2"), 0}});
}

/// Full 2-shift, x -> (phi(x1,x2), x2, x3, ...), phi(a,1) = a, phi(a,2) = other(a).
/// An involution; eventually conjugate with lag 1, not a conjugacy.
inline ShiftMap lag_one_recoder(const SpacePtr& s) {
  std::vector<TransducerEdgeSpec> e;
  for (Symbol a = 0; a < 2; ++a) {
    const std::string buf = "b" + std::to_string(a + 1);
    e.push_back({"start", a, Word{}, buf});
    for (Symbol b = 0; b < 2; ++b) {
      const Symbol first = b == 0 ? a : 1 - a;
      e.push_back({buf, b, Word{static_cast<char>(first), static_cast<char>(b)}, "copy"});
    }
    e.push_back({"copy", a, Word(1, static_cast<char>(a)), "copy"});
  }
  return ShiftMap(compile_transducer(s, s, {"start", "b1", "b2", "copy"}, "start", e));
}

/// Full 2-shift, swaps x1 and x2 when x3 = 2. Eventually conjugate with lag 2.
inline ShiftMap lag_two_recoder(const SpacePtr& s) {
  std::vector<TransducerEdgeSpec> e;
  std::vector<std::string> states{"start", "copy"};
  for (Symbol a = 0; a < 2; ++a) {
    const std::string b1 = "b" + std::to_string(a + 1);
    states.push_back(b1);
    e.push_back({"start", a, Word{}, b1});
    e.push_back({"copy", a, Word(1, static_cast<char>(a)), "copy"});
    for (Symbol b = 0; b < 2; ++b) {
      const std::string b2 = b1 + std::to_string(b + 1);
      states.push_back(b2);
      e.push_back({b1, b, Word{}, b2});
      for (Symbol c = 0; c < 2; ++c) {
        Word out = c == 1 ? Word{static_cast<char>(b), static_cast<char>(a)} : Word{static_cast<char>(a), static_cast<char>(b)};
        out.push_back(static_cast<char>(c));
        e.push_back({b2, c, out, "copy"});
      }
    }
  }
  return ShiftMap(compile_transducer(s, s, states, "start", e));
}

/// Golden mean -> full 2-shift: parse into blocks 1 and 21, emit 1 and 2.
inline ShiftMap golden_parse(const SpacePtr& g, const SpacePtr& f2) {
  return ShiftMap(compile_transducer(g, f2, {"ready", "after2"}, "ready",
                                     {{"ready", 0, digits("1"), "ready"},
                                      {"ready", 1, Word{}, "after2"},
                                      {"after2", 0, digits("2"), "ready"}}));
}

/// Inverse of golden_parse: 1 -> 1, 2 -> 21.
inline ShiftMap golden_unparse(const SpacePtr& f2, const SpacePtr& g) {
  return ShiftMap(compile_transducer(f2, g, {"ready"}, "ready",
                                     {{"ready", 0, digits("1"), "ready"}, {"ready", 1, digits("21"), "ready"}}));
}

/// Full 2-shift, x -> x1 x1 x2 x3 ... (continuous, not surjective).
inline ShiftMap duplicator(const SpacePtr& s) {
  std::vector<TransducerEdgeSpec> e;
  for (Symbol a = 0; a < 2; ++a) {
    e.push_back({"start", a, Word{static_cast<char>(a), static_cast<char>(a)}, "copy"});
    e.push_back({"copy", a, Word(1, static_cast<char>(a)), "copy"});
  }
  return ShiftMap(compile_transducer(s, s, {"start", "copy"}, "start", e));
}

/// Full 2-shift, x -> x1 y2 y3 ... where y = x if x1 = 1 and y = complement(x)
/// otherwise. An involution that does not preserve tail equivalence.
inline ShiftMap tail_flipper(const SpacePtr& s) {
  std::vector<TransducerEdgeSpec> e{{"start", 0, digits("1"), "copy"}, {"start", 1, digits("2"), "flip"}};
  for (Symbol a = 0; a < 2; ++a) {
    e.push_back({"copy", a, Word(1, static_cast<char>(a)), "copy"});
    e.push_back({"flip", a, Word(1, static_cast<char>(1 - a)), "flip"});
  }
  return ShiftMap(compile_transducer(s, s, {"start", "copy", "flip"}, "start", e));
}

/// The shift itself as a transducer: drops the first symbol.
inline ShiftMap shift_transducer(const SpacePtr& s) {
  std::vector<TransducerEdgeSpec> e;
  for (Symbol a = 0; a < s->alphabet(); ++a) {
    e.push_back({"start", a, Word{}, "copy"});
    e.push_back({"copy", a, Word(1, static_cast<char>(a)), "copy"});
  }
  return ShiftMap(compile_transducer(s, s, {"start", "copy"}, "start", e));
}

/// A ground-truth conjugacy: one or two composed out-splits of a random base.
struct GeneratedConjugacy {
  SpacePtr a, b;
  BlockCode h, h_inv;
  int splits = 0;
};

template <typename Rng>
TransitionMatrix random_base_matrix(Rng& rng, int n) {
  std::bernoulli_distribution coin(0.6);
  for (;;) {
    std::vector<std::vector<int>> rows(n, std::vector<int>(n));
    for (auto& r : rows)
      for (auto& v : r) v = coin(rng);
    TransitionMatrix m(rows);
    if (m.is_irreducible() && !m.is_permutation()) return m;
  }
}

inline GeneratedConjugacy generate_conjugacy(std::uint32_t seed, int max_states = 5) {
  std::mt19937 rng(seed);
  const int n = 2 + static_cast<int>(rng() % 2);
  const int splits = 1 + static_cast<int>(rng() % 2);
  const SpacePtr a = build_shift_space(random_base_matrix(rng, n));
  OutSplit first = out_split(a, random_split_partition(*a, rng, max_states));
  GeneratedConjugacy g{a, first.split, first.h, first.h_inv, 1};
  if (splits == 2) {
    OutSplit second = out_split(first.split, random_split_partition(*first.split, rng, max_states));
    g.b = second.split;
    g.h = compose(second.h, first.h);
    g.h_inv = compose(first.h_inv, second.h_inv);
    g.splits = 2;
  }
  return g;
}

// ---------------------------------------------------------------------------
// Independent oracles: work on explicit symbol expansions only.

inline constexpr std::size_t kOracleLength = 96;

/// First n symbols of sigma^k(p), computed by indexing the raw sequence.
inline Word oracle_seq(const Point& p, std::size_t k = 0, std::size_t n = kOracleLength) {
  Word w;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j = k + i;
    w.push_back(j < p.pre.size() ? p.pre[j] : p.cyc[(j - p.pre.size()) % p.cyc.size()]);
  }
  return w;
}

/// First n symbols of h(p): steps the transducer's edge table over the raw
/// input sequence.
inline Word oracle_image(const ShiftMap& h, const Point& p, std::size_t n = kOracleLength) {
  const Transducer& t = h.transducer();
  Word out;
  int st = t.initial();
  for (std::size_t i = 0; out.size() < n; ++i) {
    const Symbol a = static_cast<unsigned char>(oracle_seq(p, i, 1)[0]);
    const auto& e = t.edge(st, a);
    out += e->out;
    st = e->next;
  }
  return out.substr(0, n);
}

/// Value of a cylinder function on the sequence whose first symbols are `seq`.
inline std::int64_t oracle_eval_word(const CylinderFunction& f, const Word& seq) {
  const auto& ws = f.space()->words(f.depth());
  const Word key = seq.substr(0, static_cast<std::size_t>(f.depth()));
  for (std::size_t i = 0; i < ws.size(); ++i)
    if (ws[i] == key) return f.values()[i];
  throw std::logic_error("oracle_eval_word: inadmissible word");
}

}  // namespace symconj::testing

#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cylinder_function.hpp"
#include "shift_map.hpp"
#include "shift_space.hpp"

namespace symconj {

struct OrbitParams {
  int depth = 8;  // cap on cylinder depths; also the indicator depth for the Psi check
  int max_pre = 3;
  int max_cyc = 4;
  int horizon_multiplier = 2;
};

/// An Error that names the point where a check broke down.
class WitnessError : public Error {
 public:
  WitnessError(ErrorKind kind, const std::string& what, std::optional<Point> witness)
      : Error(kind, what), witness_(std::move(witness)) {}
  const std::optional<Point>& witness() const noexcept { return witness_; }

 private:
  std::optional<Point> witness_;
};

/// Orbit cocycles: sigma_B^k(x)(h(sigma_A x)) = sigma_B^l(x)(h(x)).
struct OrbitCocyclePair {
  CylinderFunction k;
  CylinderFunction l;

  int depth() const { return k.depth(); }
  /// l - k, the function whose cohomology class separates the rungs.
  CylinderFunction gap() const { return combine(1, l, -1, k); }
};

/// For each depth-`depth` cylinder, the least pair (l first, then k) that
/// aligns h(sigma x) with h(x) for every test point x of the cylinder.
///
/// Throws NoAlignment (with witness) when some h(sigma x), h(x) have
/// different eventual cycles, which no pair can ever fix; throws
/// NotConstantOnCylinders when no single pair serves a whole cylinder
/// within the horizon.
inline OrbitCocyclePair orbit_cocycles(const ShiftMap& h, int depth, const OrbitParams& params) {
  const auto& A = h.source();
  const PointFamily fam = cylinder_family(*A, depth, params.max_pre, params.max_cyc);
  std::vector<std::int64_t> kv, lv;
  kv.reserve(fam.by_cylinder.size());
  lv.reserve(fam.by_cylinder.size());
  for (std::size_t c = 0; c < fam.by_cylinder.size(); ++c) {
    const auto& pts = fam.by_cylinder[c];
    std::vector<std::pair<Point, Point>> img;  // (h(sigma x), h(x))
    img.reserve(pts.size());
    std::size_t longest = 0;
    for (const Point& x : pts) {
      Point u = apply_map(h, shift_point(x));
      Point v = apply_map(h, x);
      if (!tail_equivalent(u, v))
        throw WitnessError(ErrorKind::NoAlignment, "h(sigma x) and h(x) lie on different orbits", x);
      longest = std::max({longest, u.pre.size() + u.cyc.size(), v.pre.size() + v.cyc.size()});
      img.emplace_back(std::move(u), std::move(v));
    }
    const std::size_t horizon = static_cast<std::size_t>(params.horizon_multiplier) * (depth + longest);
    bool found = false;
    for (std::size_t l = 0; l <= horizon && !found; ++l) {
      for (std::size_t k = 0; k <= horizon && !found; ++k) {
        found = std::all_of(img.begin(), img.end(),
                            [&](const auto& uv) { return shifted_equal(uv.first, k, uv.second, l); });
        if (found) {
          kv.push_back(static_cast<std::int64_t>(k));
          lv.push_back(static_cast<std::int64_t>(l));
        }
      }
    }
    if (!found)
      throw Error(ErrorKind::NotConstantOnCylinders,
                  "no common cocycle on cylinder " + format_word(A->words(depth)[c]) + " at depth " + std::to_string(depth));
  }
  return OrbitCocyclePair{CylinderFunction(A, depth, std::move(kv)), CylinderFunction(A, depth, std::move(lv))};
}

/// orbit_cocycles at the least depth in [1, params.depth] where it succeeds.
inline OrbitCocyclePair find_orbit_cocycles(const ShiftMap& h, const OrbitParams& params) {
  for (int d = 1;; ++d) {
    try {
      return orbit_cocycles(h, d, params);
    } catch (const WitnessError&) {
      throw;
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::NotConstantOnCylinders || d >= params.depth) throw;
    }
  }
}

/// Psi_h(f)(x) = sum_{i=0}^{l(x)} f(sigma^i h x) - sum_{j=0}^{k(x)} f(sigma^j h sigma x),
/// upper limits included.
inline std::int64_t psi_at(const ShiftMap& h, const OrbitCocyclePair& kl, const CylinderFunction& f, const Point& x) {
  const Point hx = apply_map(h, x);
  const Point hsx = apply_map(h, shift_point(x));
  const auto l = kl.l(x);
  const auto k = kl.k(x);
  std::int64_t total = 0;
  for (std::int64_t i = 0; i <= l; ++i) total += f(shift_by(hx, static_cast<std::size_t>(i)));
  for (std::int64_t j = 0; j <= k; ++j) total -= f(shift_by(hsx, static_cast<std::size_t>(j)));
  return total;
}

/// Evaluates Psi_h on many potentials, caching the images of the test points.
class PsiEvaluator {
 public:
  PsiEvaluator(ShiftMap h, OrbitCocyclePair kl, OrbitParams params)
      : h_(std::move(h)), kl_(std::move(kl)), params_(params) {}

  const OrbitCocyclePair& cocycles() const noexcept { return kl_; }

  /// Psi_h(f) as a cylinder function, at the least depth on which its values
  /// are constant over every test cylinder.
  CylinderFunction operator()(const CylinderFunction& f) {
    if (f.space().get() != h_.target().get()) throw Error(ErrorKind::SpaceMismatch, "psi: f is not over the target");
    const int cap = std::max(params_.depth, kl_.depth());
    for (int d = kl_.depth(); d <= cap; ++d) {
      const auto& level = level_at(d);
      std::vector<std::int64_t> vals;
      vals.reserve(level.size());
      bool constant = true;
      for (const auto& cyl : level) {
        std::optional<std::int64_t> val;
        for (const auto& s : cyl) {
          std::int64_t total = 0;
          for (std::int64_t i = 0; i <= s.l; ++i) total += f(shift_by(s.hx, static_cast<std::size_t>(i)));
          for (std::int64_t j = 0; j <= s.k; ++j) total -= f(shift_by(s.hsx, static_cast<std::size_t>(j)));
          if (val && *val != total) {
            constant = false;
            break;
          }
          val = total;
        }
        if (!constant) break;
        vals.push_back(*val);
      }
      if (constant) return CylinderFunction(h_.source(), d, std::move(vals)).coarsen();
    }
    throw Error(ErrorKind::NotConstantOnCylinders, "Psi_h(f) not locally constant up to depth " + std::to_string(cap));
  }

 private:
  struct Sample {
    Point hx, hsx;
    std::int64_t k, l;
  };

  const std::vector<std::vector<Sample>>& level_at(int d) {
    auto it = levels_.find(d);
    if (it != levels_.end()) return it->second;
    const PointFamily fam = cylinder_family(*h_.source(), d, params_.max_pre, params_.max_cyc);
    std::vector<std::vector<Sample>> level(fam.by_cylinder.size());
    for (std::size_t c = 0; c < fam.by_cylinder.size(); ++c)
      for (const Point& x : fam.by_cylinder[c])
        level[c].push_back(Sample{apply_map(h_, x), apply_map(h_, shift_point(x)), kl_.k(x), kl_.l(x)});
    return levels_.emplace(d, std::move(level)).first->second;
  }

  ShiftMap h_;
  OrbitCocyclePair kl_;
  OrbitParams params_;
  std::map<int, std::vector<std::vector<Sample>>> levels_;
};

inline CylinderFunction psi(const ShiftMap& h, const OrbitCocyclePair& kl, const CylinderFunction& f,
                            const OrbitParams& params) {
  PsiEvaluator eval(h, kl, params);
  return eval(f);
}

struct PsiCheck {
  bool ok = true;
  std::optional<Word> witness_word;  // indicator of this word separates the two sides
  std::optional<Point> witness_point;

  explicit operator bool() const noexcept { return ok; }
};

namespace detail {

// Signed multiset of depth-d prefixes; zero everywhere iff every depth-d
// indicator takes equal values on both sides.
inline std::optional<Word> first_nonzero(const std::map<Word, std::int64_t>& counts) {
  for (const auto& [w, c] : counts)
    if (c != 0) return w;
  return std::nullopt;
}

}  // namespace detail

/// Psi_h(f) = f o h for every indicator of an allowed target word of length
/// `depth` (hence for every f of depth <= depth), pointwise on the test family.
inline PsiCheck psi_equals_pullback(const ShiftMap& h, const OrbitCocyclePair& kl, int depth, const OrbitParams& params) {
  const PointFamily fam = cylinder_family(*h.source(), kl.depth(), params.max_pre, params.max_cyc);
  const std::size_t d = static_cast<std::size_t>(depth);
  PsiCheck result;
  for (const auto& cyl : fam.by_cylinder) {
    for (const Point& x : cyl) {
      const Point hx = apply_map(h, x);
      const Point hsx = apply_map(h, shift_point(x));
      std::map<Word, std::int64_t> counts;
      for (std::int64_t i = 0; i <= kl.l(x); ++i) ++counts[window(hx, static_cast<std::size_t>(i), d)];
      for (std::int64_t j = 0; j <= kl.k(x); ++j) --counts[window(hsx, static_cast<std::size_t>(j), d)];
      --counts[window(hx, 0, d)];
      if (auto w = detail::first_nonzero(counts)) return PsiCheck{false, *w, x};
    }
  }
  return result;
}

/// The same identity parameterised by source potentials g, through
/// f = g o h^-1: Psi_h(g o h^-1) = g for every depth-`depth` indicator g.
inline PsiCheck psi_equals_pullback_dual(const ShiftMap& h, const ShiftMap& h_inv, const OrbitCocyclePair& kl, int depth,
                                         const OrbitParams& params) {
  const PointFamily fam = cylinder_family(*h.source(), kl.depth(), params.max_pre, params.max_cyc);
  const std::size_t d = static_cast<std::size_t>(depth);
  for (const auto& cyl : fam.by_cylinder) {
    for (const Point& x : cyl) {
      const Point hx = apply_map(h, x);
      const Point hsx = apply_map(h, shift_point(x));
      std::map<Word, std::int64_t> counts;
      for (std::int64_t i = 0; i <= kl.l(x); ++i)
        ++counts[expand(apply_map(h_inv, shift_by(hx, static_cast<std::size_t>(i))), d)];
      for (std::int64_t j = 0; j <= kl.k(x); ++j)
        --counts[expand(apply_map(h_inv, shift_by(hsx, static_cast<std::size_t>(j))), d)];
      --counts[expand(x, d)];
      if (auto w = detail::first_nonzero(counts)) return PsiCheck{false, *w, x};
    }
  }
  return PsiCheck{};
}

enum class CheckStatus { Holds, Fails, Undecided };

struct CheckResult {
  CheckStatus status = CheckStatus::Undecided;
  std::optional<Point> witness;
  bool witness_in_target = false;

  bool holds() const noexcept { return status == CheckStatus::Holds; }
};

/// h(sigma x) = sigma h(x) on every test point.
inline CheckResult check_conjugacy(const ShiftMap& h, const PointFamily& fam) {
  if (fam.size() == 0) return {};
  for (const auto& cyl : fam.by_cylinder)
    for (const Point& x : cyl)
      if (!shifted_equal(apply_map(h, shift_point(x)), 0, apply_map(h, x), 1))
        return CheckResult{CheckStatus::Fails, x, false};
  return CheckResult{CheckStatus::Holds, std::nullopt, false};
}

/// sigma^K h sigma = sigma^{K+1} h on source test points, and the mirror
/// equation for h_inv on target test points.
inline CheckResult check_eventual_conjugacy(const ShiftMap& h, const ShiftMap& h_inv, int lag, const PointFamily& fam_a,
                                            const PointFamily& fam_b) {
  if (fam_a.size() == 0 || fam_b.size() == 0) return {};
  const std::size_t K = static_cast<std::size_t>(lag);
  for (const auto& cyl : fam_a.by_cylinder)
    for (const Point& x : cyl)
      if (!shifted_equal(apply_map(h, shift_point(x)), K, apply_map(h, x), K + 1)) return {CheckStatus::Fails, x, false};
  for (const auto& cyl : fam_b.by_cylinder)
    for (const Point& y : cyl)
      if (!shifted_equal(apply_map(h_inv, shift_point(y)), K, apply_map(h_inv, y), K + 1))
        return {CheckStatus::Fails, y, true};
  return {CheckStatus::Holds, std::nullopt, false};
}

struct StrongCoeResult {
  std::optional<CylinderFunction> b1, b2;
  std::optional<Point> refutation1, refutation2;  // periodic points with Birkhoff sum of l-k != period

  bool certified() const noexcept { return b1 && b2; }
  bool refuted() const noexcept { return refutation1 || refutation2; }
};

/// Transfer functions with l_i - k_i = 1 + b_i - b_i o sigma, searched up to
/// `max_depth`. Absence below the cap is not a refutation; the Birkhoff test
/// on periodic points is.
inline StrongCoeResult check_strong_coe(const OrbitCocyclePair& forward, const OrbitCocyclePair& backward, int max_depth,
                                        int max_period = 6) {
  StrongCoeResult r;
  const auto g1 = forward.gap();
  const auto g2 = backward.gap();
  r.b1 = find_transfer(g1.space(), g1, 1, max_depth);
  r.b2 = find_transfer(g2.space(), g2, 1, max_depth);
  if (!r.b1) r.refutation1 = birkhoff_obstruction(g1, 1, max_period);
  if (!r.b2) r.refutation2 = birkhoff_obstruction(g2, 1, max_period);
  return r;
}

inline StrongCoeResult check_strong_coe(const ShiftMap& h, const ShiftMap& h_inv, int max_depth, const OrbitParams& params) {
  return check_strong_coe(find_orbit_cocycles(h, params), find_orbit_cocycles(h_inv, params), max_depth);
}

struct LemmaOutcome {
  enum class Kind { Equal, Periodic } kind = Kind::Equal;
  int period = 0;  // p + q when Periodic
  int p = 0;       // y = sigma^p w
  int q = 0;       // w = sigma^q y
};

/// Cancellation argument: given sigma^K y = sigma^K w and equal multisets
/// {y, ..., sigma^{K-1} y} = {w, ..., sigma^{K-1} w}, either y = w or y is
/// periodic with period p + q where y = sigma^p w and w = sigma^q y.
inline LemmaOutcome lemma_reduce(int lag, const Point& y, const Point& w) {
  if (lag < 0) throw Error(ErrorKind::InvalidArgument, "negative lag");
  const std::size_t K = static_cast<std::size_t>(lag);
  if (!shifted_equal(y, K, w, K)) throw Error(ErrorKind::PreconditionFailed, "sigma^K y != sigma^K w");
  std::vector<Point> ys, ws;
  for (std::size_t i = 0; i < K; ++i) {
    ys.push_back(shift_by(y, i));
    ws.push_back(shift_by(w, i));
  }
  std::sort(ys.begin(), ys.end());
  std::sort(ws.begin(), ws.end());
  if (ys != ws) throw Error(ErrorKind::PreconditionFailed, "orbit segments of y and w differ as multisets");
  if (y == w) return LemmaOutcome{};
  int p = -1, q = -1;
  for (std::size_t i = 0; i < K && p < 0; ++i)
    if (shifted_equal(w, i, y, 0)) p = static_cast<int>(i);
  for (std::size_t j = 0; j < K && q < 0; ++j)
    if (shifted_equal(y, j, w, 0)) q = static_cast<int>(j);
  if (p < 0 || q < 0 || !shifted_equal(y, static_cast<std::size_t>(p + q), y, 0))
    throw Error(ErrorKind::InconsistentRoutes, "cancellation did not close up");
  return LemmaOutcome{LemmaOutcome::Kind::Periodic, p + q, p, q};
}

enum class Rung { Conjugacy, EventualConjugacy, StrongCOE, COE, NotEquivalent, Undecided };

inline std::string_view to_string(Rung r) {
  switch (r) {
    case Rung::Conjugacy: return "Conjugacy";
    case Rung::EventualConjugacy: return "EventualConjugacy";
    case Rung::StrongCOE: return "StrongCOE";
    case Rung::COE: return "COE";
    case Rung::NotEquivalent: return "NotEquivalent";
    case Rung::Undecided: return "Undecided";
  }
  return "Undecided";
}

struct Verdict {
  Rung rung = Rung::Undecided;
  std::optional<int> lag;
  std::optional<OrbitCocyclePair> forward, backward;
  std::optional<CylinderFunction> b1, b2;
  std::optional<Point> witness;
  bool witness_in_target = false;
  std::optional<Word> witness_indicator;
  std::optional<Point> witness_indicator_point;
  std::optional<bool> psi_equals_pullback;
  bool route_direct = false;
  bool route_theorem = false;
  std::string strong;  // "certified", "refuted", "undecided" or "" when not examined
  int depth_reached = 0;
  std::string note;
};

/// Places h on the ladder conjugacy / eventual conjugacy / strong COE / COE.
///
/// Conjugacy is established twice: directly (h sigma = sigma h), and through
/// eventual conjugacy at the lag read off the cocycles together with
/// Psi_h(f) = f o h. The two must agree; disagreement raises InconsistentRoutes.
inline Verdict classify(const ShiftMap& h, const ShiftMap& h_inv, const OrbitParams& params) {
  Verdict v;
  v.depth_reached = params.depth;
  try {
    v.forward = find_orbit_cocycles(h, params);
  } catch (const WitnessError& e) {
    v.rung = Rung::NotEquivalent;
    v.witness = e.witness();
    v.note = "h(sigma x) and h(x) are not orbit equivalent";
    return v;
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::NotConstantOnCylinders) throw;
    v.note = "forward cocycles not locally constant up to depth cap";
    return v;
  }
  try {
    v.backward = find_orbit_cocycles(h_inv, params);
  } catch (const WitnessError& e) {
    v.rung = Rung::NotEquivalent;
    v.witness = e.witness();
    v.witness_in_target = true;
    v.note = "h^-1(sigma y) and h^-1(y) are not orbit equivalent";
    return v;
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::NotConstantOnCylinders) throw;
    v.note = "backward cocycles not locally constant up to depth cap";
    return v;
  }
  v.depth_reached = std::max(v.forward->depth(), v.backward->depth());

  const PointFamily fam_a = cylinder_family(*h.source(), v.forward->depth(), params.max_pre, params.max_cyc);
  const PointFamily fam_b = cylinder_family(*h.target(), v.backward->depth(), params.max_pre, params.max_cyc);

  const CheckResult direct = check_conjugacy(h, fam_a);
  v.route_direct = direct.holds();

  const auto gap1 = v.forward->gap();
  const auto gap2 = v.backward->gap();
  const bool unit_gap = gap1.is_constant() && gap1.min_value() == 1 && gap2.is_constant() && gap2.min_value() == 1;
  const PsiCheck psi_check = psi_equals_pullback(h, *v.forward, params.depth, params);
  v.psi_equals_pullback = psi_check.ok;
  if (!psi_check.ok) {
    v.witness_indicator = psi_check.witness_word;
    v.witness_indicator_point = psi_check.witness_point;
  }
  bool eventual = false;
  int lag = 0;
  if (unit_gap) {
    lag = static_cast<int>(std::max(v.forward->k.max_value(), v.backward->k.max_value()));
    eventual = check_eventual_conjugacy(h, h_inv, lag, fam_a, fam_b).holds();
  }
  v.route_theorem = eventual && psi_check.ok;
  if (v.route_direct != v.route_theorem)
    throw WitnessError(ErrorKind::InconsistentRoutes, "direct conjugacy check and Psi route disagree", direct.witness);

  if (v.route_direct) {
    v.rung = Rung::Conjugacy;
    v.lag = 0;
    return v;
  }
  v.witness = direct.witness;
  if (eventual) {
    v.rung = Rung::EventualConjugacy;
    v.lag = lag;
    return v;
  }
  const StrongCoeResult strong = check_strong_coe(*v.forward, *v.backward, params.depth);
  if (strong.certified()) {
    v.rung = Rung::StrongCOE;
    v.b1 = strong.b1;
    v.b2 = strong.b2;
    v.strong = "certified";
    return v;
  }
  v.rung = Rung::COE;
  v.strong = strong.refuted() ? "refuted" : "undecided";
  if (strong.refuted()) v.note = "Birkhoff sum of l-k over a periodic orbit differs from its period";
  return v;
}

}  // namespace symconj

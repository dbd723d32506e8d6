#pragma once

#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "invariants.hpp"
#include "orbit_equiv.hpp"

namespace symconj::io {

using json = nlohmann::ordered_json;

// Matrix: {"n": N, "rows": [[0,1,...],...]}

inline json to_json(const TransitionMatrix& m) { return json{{"n", m.size()}, {"rows", m.rows()}}; }

inline TransitionMatrix matrix_from_json(const json& j) {
  try {
    const auto rows = j.at("rows").get<std::vector<std::vector<int>>>();
    if (j.contains("n") && j.at("n").get<int>() != static_cast<int>(rows.size()))
      throw Error(ErrorKind::Parse, "\"n\" does not match the number of rows");
    return TransitionMatrix(rows);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Parse, e.what());
  }
}

// Point: {"pre": "1,2", "cyc": "1"}

inline json to_json(const Point& p) { return json{{"pre", format_word(p.pre)}, {"cyc", format_word(p.cyc)}}; }

inline Point point_from_json(const ShiftSpace& s, const json& j) {
  try {
    return canonical_point(s, parse_word(j.at("pre").get<std::string>()), parse_word(j.at("cyc").get<std::string>()));
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Parse, e.what());
  }
}

// Function: {"depth": m, "values": {"1,2": 3, ...}}

inline json to_json(const CylinderFunction& f) {
  json values = json::object();
  const auto& ws = f.space()->words(f.depth());
  for (std::size_t i = 0; i < ws.size(); ++i) values[format_word(ws[i])] = f.values()[i];
  return json{{"depth", f.depth()}, {"values", values}};
}

inline CylinderFunction function_from_json(const SpacePtr& s, const json& j) {
  try {
    const int depth = j.at("depth").get<int>();
    std::map<Word, std::int64_t> table;
    for (const auto& [k, v] : j.at("values").items()) table[parse_word(k)] = v.get<std::int64_t>();
    return CylinderFunction::from_table(s, depth, table);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Parse, e.what());
  }
}

// Map: {"type":"block","window":m,"table":{"1,2":"1",...}}
//  or  {"type":"transducer","states":[...],"initial":s0,
//       "delta":[{"state":s,"in":a,"out":[b,...],"next":s'}]}

inline json to_json(const BlockCode& c) {
  json table = json::object();
  const auto& ws = c.source()->words(c.window());
  for (std::size_t i = 0; i < ws.size(); ++i) table[format_word(ws[i])] = std::to_string(c.table()[i] + 1);
  return json{{"type", "block"}, {"window", c.window()}, {"table", table}};
}

inline json to_json(const Transducer& t) {
  json delta = json::array();
  const int n = t.source()->alphabet();
  for (std::size_t st = 0; st < t.states().size(); ++st)
    for (Symbol a = 0; a < n; ++a) {
      const auto& e = t.edge(static_cast<int>(st), a);
      if (!e) continue;
      std::vector<int> out;
      for (std::size_t i = 0; i < e->out.size(); ++i) out.push_back(sym(e->out, i) + 1);
      delta.push_back(json{{"state", t.states()[st]}, {"in", a + 1}, {"out", out}, {"next", t.states()[e->next]}});
    }
  return json{{"type", "transducer"}, {"states", t.states()}, {"initial", t.states()[t.initial()]}, {"delta", delta}};
}

inline json to_json(const ShiftMap& h) { return h.block() ? to_json(*h.block()) : to_json(h.transducer()); }

inline ShiftMap map_from_json(const SpacePtr& src, const SpacePtr& tgt, const json& j) {
  try {
    const std::string type = j.at("type").get<std::string>();
    if (type == "block") {
      const int window = j.at("window").get<int>();
      std::map<Word, Symbol> table;
      for (const auto& [k, v] : j.at("table").items()) {
        const Word out = v.is_string() ? parse_word(v.get<std::string>()) : Word(1, static_cast<char>(v.get<int>() - 1));
        if (out.size() != 1) throw Error(ErrorKind::Parse, "block table values are single symbols");
        table[parse_word(k)] = sym(out, 0);
      }
      return ShiftMap(compile_block_code(src, tgt, window, table));
    }
    if (type == "transducer") {
      const auto states = j.at("states").get<std::vector<std::string>>();
      std::vector<TransducerEdgeSpec> edges;
      for (const auto& e : j.at("delta")) {
        Word out;
        for (int s : e.at("out").get<std::vector<int>>()) {
          if (s < 1 || s > kMaxAlphabet) throw Error(ErrorKind::Parse, "output symbol out of range");
          out.push_back(static_cast<char>(s - 1));
        }
        edges.push_back({e.at("state").get<std::string>(), e.at("in").get<int>() - 1, out, e.at("next").get<std::string>()});
      }
      return ShiftMap(compile_transducer(src, tgt, states, j.at("initial").get<std::string>(), edges));
    }
    throw Error(ErrorKind::Parse, "unknown map type '" + type + "'");
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Parse, e.what());
  }
}

// Report: {"bf":[...],"detSign":s,"k0":[...],"k1Rank":r,"obstruction":{...}}

inline json big_list(const std::vector<BigInt>& v) {
  json a = json::array();
  for (const auto& x : v) a.push_back(static_cast<long long>(x));
  return a;
}

inline json to_json(const InvariantReport& r) {
  return json{{"bf", big_list(r.bf)},
              {"detSign", r.det_sign},
              {"k0", big_list(r.k0)},
              {"k1Rank", r.k1_rank},
              {"det", static_cast<long long>(r.det)}};
}

inline std::vector<BigInt> big_list_from_json(const json& j) {
  std::vector<BigInt> v;
  for (const auto& x : j) v.emplace_back(x.get<long long>());
  return v;
}

inline InvariantReport report_from_json(const json& j) {
  try {
    InvariantReport r;
    r.bf = big_list_from_json(j.at("bf"));
    r.det_sign = j.at("detSign").get<int>();
    r.k0 = big_list_from_json(j.at("k0"));
    r.k1_rank = j.at("k1Rank").get<int>();
    r.det = j.at("det").get<long long>();
    return r;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Parse, e.what());
  }
}

inline json to_json(const ObstructionReport& r) {
  const bool out = r.coe_ruled_out;
  return json{{"a", to_json(r.a)},
              {"b", to_json(r.b)},
              {"obstruction",
               {{"coe", out}, {"strongCoe", out}, {"eventualConjugacy", out}, {"conjugacy", out}, {"reason", r.reason}}}};
}

inline ObstructionReport obstruction_from_json(const json& j) {
  try {
    return ObstructionReport{report_from_json(j.at("a")), report_from_json(j.at("b")),
                             j.at("obstruction").at("coe").get<bool>(), j.at("obstruction").at("reason").get<std::string>()};
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Parse, e.what());
  }
}

// Verdict: stable key order.

inline json to_json(const OrbitCocyclePair& kl) { return json{{"k", to_json(kl.k)}, {"l", to_json(kl.l)}}; }

inline json to_json(const Verdict& v) {
  json j;
  j["verdict"] = std::string(to_string(v.rung));
  j["K"] = v.lag ? json(*v.lag) : json(nullptr);
  if (v.witness) {
    j["witness"] = to_json(*v.witness);
    j["witness"]["space"] = v.witness_in_target ? "target" : "source";
  } else {
    j["witness"] = nullptr;
  }
  json coc = json::object();
  if (v.forward) coc["forward"] = to_json(*v.forward);
  if (v.backward) coc["backward"] = to_json(*v.backward);
  j["cocycles"] = coc;
  j["routes"] = json{{"direct", v.route_direct}, {"theorem", v.route_theorem}};
  j["psiEqualsPullback"] = v.psi_equals_pullback ? json(*v.psi_equals_pullback) : json(nullptr);
  if (v.witness_indicator) {
    j["witnessIndicator"] = json{{"word", format_word(*v.witness_indicator)}, {"point", to_json(*v.witness_indicator_point)}};
  } else {
    j["witnessIndicator"] = nullptr;
  }
  json transfers = json::object();
  if (v.b1) transfers["b1"] = to_json(*v.b1);
  if (v.b2) transfers["b2"] = to_json(*v.b2);
  j["transfers"] = transfers;
  j["strong"] = v.strong.empty() ? json(nullptr) : json(v.strong);
  j["depth"] = v.depth_reached;
  j["note"] = v.note;
  return j;
}

inline OrbitCocyclePair cocycles_from_json(const SpacePtr& src, const json& j) {
  return OrbitCocyclePair{function_from_json(src, j.at("k")), function_from_json(src, j.at("l"))};
}

inline Rung rung_from_string(const std::string& s) {
  for (Rung r : {Rung::Conjugacy, Rung::EventualConjugacy, Rung::StrongCOE, Rung::COE, Rung::NotEquivalent, Rung::Undecided})
    if (to_string(r) == s) return r;
  throw Error(ErrorKind::Parse, "unknown verdict '" + s + "'");
}

/// Inverse of to_json(Verdict); `a` and `b` are the source and target spaces.
inline Verdict verdict_from_json(const SpacePtr& a, const SpacePtr& b, const json& j) {
  try {
    Verdict v;
    v.rung = rung_from_string(j.at("verdict").get<std::string>());
    if (!j.at("K").is_null()) v.lag = j.at("K").get<int>();
    if (!j.at("witness").is_null()) {
      v.witness_in_target = j.at("witness").at("space").get<std::string>() == "target";
      v.witness = point_from_json(v.witness_in_target ? *b : *a, j.at("witness"));
    }
    const json& coc = j.at("cocycles");
    if (coc.contains("forward")) v.forward = cocycles_from_json(a, coc.at("forward"));
    if (coc.contains("backward")) v.backward = cocycles_from_json(b, coc.at("backward"));
    v.route_direct = j.at("routes").at("direct").get<bool>();
    v.route_theorem = j.at("routes").at("theorem").get<bool>();
    if (!j.at("psiEqualsPullback").is_null()) v.psi_equals_pullback = j.at("psiEqualsPullback").get<bool>();
    if (!j.at("witnessIndicator").is_null()) {
      v.witness_indicator = parse_word(j.at("witnessIndicator").at("word").get<std::string>());
      v.witness_indicator_point = point_from_json(*a, j.at("witnessIndicator").at("point"));
    }
    const json& tr = j.at("transfers");
    if (tr.contains("b1")) v.b1 = function_from_json(a, tr.at("b1"));
    if (tr.contains("b2")) v.b2 = function_from_json(b, tr.at("b2"));
    if (!j.at("strong").is_null()) v.strong = j.at("strong").get<std::string>();
    v.depth_reached = j.at("depth").get<int>();
    v.note = j.at("note").get<std::string>();
    return v;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Parse, e.what());
  }
}

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Parse, "cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Parse, path + ": " + e.what());
  }
}

inline std::string dump(const json& j) { return j.dump(2) + "\n"; }

}  // namespace symconj::io

#pragma once

// ComplexSpec documents (schema "specschema-1"), builtin example complexes,
// and truncated covers of a compact complex under a deck-group annotation.

#include <algorithm>
#include <map>
#include <numeric>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include <json.hpp>

#include "polyheat/complex.hpp"
#include "polyheat/group.hpp"

namespace polyheat {

inline ComplexData parse_complex_spec(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const std::exception& e) {
    throw ParseError(std::string("spec document is not valid JSON: ") + e.what());
  }
  try {
    if (j.contains("schema") && j["schema"] != "specschema-1")
      throw ParseError("unsupported schema: " + j["schema"].dump());
    ComplexData d;
    d.dimension = j.at("dimension").get<int>();
    for (const auto& v : j.value("vertices", nlohmann::json::array()))
      d.vertices.push_back({v.at("id").get<std::string>(), -1});
    for (const auto& e : j.value("edges", nlohmann::json::array())) {
      EdgeData ed;
      ed.id = e.at("id").get<std::string>();
      ed.ends[0] = e.at("ends").at(0).get<std::string>();
      ed.ends[1] = e.at("ends").at(1).get<std::string>();
      ed.length = e.at("length").get<double>();
      d.edges.push_back(std::move(ed));
    }
    for (const auto& f : j.value("faces", nlohmann::json::array())) {
      FaceData fd;
      fd.id = f.at("id").get<std::string>();
      for (const auto& v : f.at("cycle")) fd.cycle.push_back(v.get<std::string>());
      for (const auto& c : f.at("chart"))
        fd.chart.push_back({c.at(0).get<double>(), c.at(1).get<double>()});
      if (f.contains("edges"))
        for (const auto& e : f["edges"]) fd.edges.push_back(e.get<std::string>());
      d.faces.push_back(std::move(fd));
    }
    if (j.contains("group")) {
      const auto& g = j["group"];
      std::string type = g.at("type").get<std::string>();
      if (type == "zd") {
        d.group.kind = GroupKind::zd;
        d.group.rank = g.at("d").get<int>();
      } else if (type == "free") {
        d.group.kind = GroupKind::free_group;
        d.group.rank = g.at("rank").get<int>();
      } else {
        throw ParseError("unknown group type: " + type);
      }
      for (const auto& r : g.value("gluing", nlohmann::json::array()))
        d.group.rules.push_back({r.at("cell").get<std::string>(),
                                 r.at("action").get<std::string>(),
                                 r.at("target").get<std::string>()});
    }
    return d;
  } catch (const ParseError&) {
    throw;
  } catch (const std::exception& e) {
    throw ParseError(std::string("spec document malformed: ") + e.what());
  }
}

inline std::string complex_spec_to_json(const ComplexData& d) {
  nlohmann::ordered_json j;
  j["schema"] = "specschema-1";
  j["dimension"] = d.dimension;
  j["vertices"] = nlohmann::json::array();
  for (const auto& v : d.vertices) j["vertices"].push_back({{"id", v.id}});
  j["edges"] = nlohmann::json::array();
  for (const auto& e : d.edges)
    j["edges"].push_back({{"id", e.id},
                          {"ends", {e.ends[0], e.ends[1]}},
                          {"length", e.length}});
  if (!d.faces.empty()) {
    j["faces"] = nlohmann::json::array();
    for (const auto& f : d.faces) {
      nlohmann::ordered_json jf;
      jf["id"] = f.id;
      jf["cycle"] = f.cycle;
      jf["chart"] = nlohmann::json::array();
      for (auto c : f.chart) jf["chart"].push_back({c.x, c.y});
      if (!f.edges.empty()) jf["edges"] = f.edges;
      j["faces"].push_back(jf);
    }
  }
  if (d.group.kind != GroupKind::none) {
    nlohmann::ordered_json jg;
    jg["type"] = d.group.kind == GroupKind::zd ? "zd" : "free";
    jg[d.group.kind == GroupKind::zd ? "d" : "rank"] = d.group.rank;
    jg["gluing"] = nlohmann::json::array();
    for (const auto& r : d.group.rules)
      jg["gluing"].push_back(
          {{"cell", r.cell}, {"action", r.action}, {"target", r.target}});
    j["group"] = jg;
  }
  return j.dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// Builtin example complexes.

inline ComplexData make_interval(double L = 1.0) {
  ComplexData d;
  d.dimension = 1;
  d.vertices = {{"v0"}, {"v1"}};
  EdgeData e;
  e.id = "e";
  e.ends[0] = "v0";
  e.ends[1] = "v1";
  e.length = L;
  d.edges = {e};
  return d;
}

inline ComplexData make_circle(double circumference = 1.0, int arcs = 4) {
  ComplexData d;
  d.dimension = 1;
  for (int i = 0; i < arcs; ++i) d.vertices.push_back({"v" + std::to_string(i)});
  for (int i = 0; i < arcs; ++i) {
    EdgeData e;
    e.id = "a" + std::to_string(i);
    e.ends[0] = "v" + std::to_string(i);
    e.ends[1] = "v" + std::to_string((i + 1) % arcs);
    e.length = circumference / arcs;
    d.edges.push_back(std::move(e));
  }
  return d;
}

inline ComplexData make_star(int legs, double leg_length = 1.0) {
  if (legs < 1) throw RangeError("star needs at least one leg");
  ComplexData d;
  d.dimension = 1;
  d.vertices.push_back({"c"});
  for (int i = 1; i <= legs; ++i) {
    d.vertices.push_back({"t" + std::to_string(i)});
    EdgeData e;
    e.id = "l" + std::to_string(i);
    e.ends[0] = "c";
    e.ends[1] = "t" + std::to_string(i);
    e.length = leg_length;
    d.edges.push_back(std::move(e));
  }
  return d;
}

// Two star vertices joined by a unit bridge, m legs at u and n legs at v.
inline ComplexData make_two_star(int m, int n) {
  if (m < 1 || n < 1) throw RangeError("two-star needs legs at both vertices");
  ComplexData d;
  d.dimension = 1;
  d.vertices = {{"u"}, {"v"}};
  EdgeData b;
  b.id = "uv";
  b.ends[0] = "u";
  b.ends[1] = "v";
  b.length = 1.0;
  d.edges.push_back(std::move(b));
  for (int i = 1; i <= m; ++i) {
    d.vertices.push_back({"u" + std::to_string(i)});
    EdgeData e;
    e.id = "ul" + std::to_string(i);
    e.ends[0] = "u";
    e.ends[1] = "u" + std::to_string(i);
    e.length = 1.0;
    d.edges.push_back(std::move(e));
  }
  for (int i = 1; i <= n; ++i) {
    d.vertices.push_back({"v" + std::to_string(i)});
    EdgeData e;
    e.id = "vl" + std::to_string(i);
    e.ends[0] = "v";
    e.ends[1] = "v" + std::to_string(i);
    e.length = 1.0;
    d.edges.push_back(std::move(e));
  }
  return d;
}

// Unit square with one face.  Carries the Z^2 deck annotation used to unroll
// square grids; building it directly just gives the square.
inline ComplexData make_square() {
  ComplexData d;
  d.dimension = 2;
  d.vertices = {{"sw"}, {"se"}, {"ne"}, {"nw"}};
  auto edge = [](const char* id, const char* a, const char* b) {
    EdgeData e;
    e.id = id;
    e.ends[0] = a;
    e.ends[1] = b;
    e.length = 1.0;
    return e;
  };
  d.edges = {edge("b", "sw", "se"), edge("r", "se", "ne"), edge("t", "nw", "ne"),
             edge("l", "sw", "nw")};
  FaceData f;
  f.id = "sq";
  f.cycle = {"sw", "se", "ne", "nw"};
  f.chart = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  d.faces = {f};
  d.group.kind = GroupKind::zd;
  d.group.rank = 2;
  d.group.rules = {{"r", "1,0", "l"}, {"t", "0,1", "b"}};
  return d;
}

// Unit interval with the Z deck annotation; unrolls to a path graph.
inline ComplexData make_zline() {
  ComplexData d = make_interval(1.0);
  d.group.kind = GroupKind::zd;
  d.group.rank = 1;
  d.group.rules = {{"v1", "1", "v0"}};
  return d;
}

// Three unit squares in an L, with the rank-2 free-group deck annotation:
// the right edge of B maps by generator a to the left edge of A, the top
// edge of C maps by b to the bottom edge of A.  Unrolls to a tree of L
// pieces.
inline ComplexData make_lshape() {
  ComplexData d;
  d.dimension = 2;
  for (const char* id : {"g00", "g10", "g20", "g01", "g11", "g21", "g02", "g12"})
    d.vertices.push_back({id});
  auto edge = [](const char* id, const char* a, const char* b) {
    EdgeData e;
    e.id = id;
    e.ends[0] = a;
    e.ends[1] = b;
    e.length = 1.0;
    return e;
  };
  d.edges = {edge("ab", "g00", "g10"), edge("bb", "g10", "g20"),
             edge("br", "g20", "g21"), edge("bt", "g11", "g21"),
             edge("m1", "g10", "g11"), edge("at", "g01", "g11"),
             edge("al", "g00", "g01"), edge("cr", "g11", "g12"),
             edge("ct", "g02", "g12"), edge("cl", "g01", "g02")};
  auto face = [](const char* id, std::initializer_list<const char*> cyc,
                 std::initializer_list<Vec2> chart) {
    FaceData f;
    f.id = id;
    for (auto c : cyc) f.cycle.push_back(c);
    f.chart.assign(chart.begin(), chart.end());
    return f;
  };
  d.faces = {
      face("A", {"g00", "g10", "g11", "g01"}, {{0, 0}, {1, 0}, {1, 1}, {0, 1}}),
      face("B", {"g10", "g20", "g21", "g11"}, {{1, 0}, {2, 0}, {2, 1}, {1, 1}}),
      face("C", {"g01", "g11", "g12", "g02"}, {{0, 1}, {1, 1}, {1, 2}, {0, 2}}),
  };
  d.group.kind = GroupKind::free_group;
  d.group.rank = 2;
  d.group.rules = {{"br", "a", "al"}, {"ct", "b", "ab"}};
  return d;
}

// ---------------------------------------------------------------------------
// Truncated cover: instantiate one copy of the base complex per group element
// in B_G(radius) and glue copies along the deck rules.

namespace detail {

class UnionFind {
 public:
  explicit UnionFind(size_t n) : parent_(n) {
    std::iota(parent_.begin(), parent_.end(), size_t{0});
  }
  size_t find(size_t a) {
    while (parent_[a] != a) {
      parent_[a] = parent_[parent_[a]];
      a = parent_[a];
    }
    return a;
  }
  void unite(size_t a, size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (a > b) std::swap(a, b);  // keep the smallest index as representative
    parent_[b] = a;
  }

 private:
  std::vector<size_t> parent_;
};

}  // namespace detail

inline ComplexData build_truncated_cover(const ComplexData& base, int radius) {
  if (base.group.kind == GroupKind::none)
    throw ConstructionError("base complex carries no deck-group annotation");
  GroupModel G{base.group.kind == GroupKind::zd ? GroupModel::Kind::zd
                                                : GroupModel::Kind::free_group,
               base.group.rank};
  auto words = group_ball(G, radius);
  std::map<std::string, int> word_index;
  for (size_t i = 0; i < words.size(); ++i)
    word_index[words[i]] = static_cast<int>(i);

  std::map<std::string, int> base_vid, base_eid;
  for (size_t i = 0; i < base.vertices.size(); ++i)
    base_vid[base.vertices[i].id] = static_cast<int>(i);
  for (size_t i = 0; i < base.edges.size(); ++i)
    base_eid[base.edges[i].id] = static_cast<int>(i);

  size_t nv = base.vertices.size(), ne = base.edges.size(), nc = words.size();
  detail::UnionFind vuf(nv * nc), euf(ne * nc);
  auto vat = [&](int copy, int v) { return static_cast<size_t>(copy) * nv + v; };
  auto eat = [&](int copy, int e) { return static_cast<size_t>(copy) * ne + e; };

  // (copy, cell, is_edge) triples whose gluing partner left the truncation
  std::vector<std::tuple<int, int, bool>> cut;
  for (const auto& rule : base.group.rules) {
    if (rule.action == group_identity(G) ||
        (base.group.kind == GroupKind::free_group && rule.action == "e"))
      throw ConstructionError("deck rule with identity action self-glues");
    bool is_edge = base_eid.count(rule.cell) > 0;
    bool tgt_edge = base_eid.count(rule.target) > 0;
    if (is_edge != tgt_edge ||
        (!is_edge && (!base_vid.count(rule.cell) || !base_vid.count(rule.target))))
      throw GluingError("deck rule joins cells of different kinds or unknown ids: " +
                        rule.cell + " -> " + rule.target);
    for (size_t c = 0; c < nc; ++c) {
      std::string back = group_mul(G, words[c], group_inverse(G, rule.action));
      if (!word_index.count(back))
        cut.push_back({static_cast<int>(c),
                       is_edge ? base_eid[rule.target] : base_vid[rule.target],
                       is_edge});
      std::string h = group_mul(G, words[c], rule.action);
      auto it = word_index.find(h);
      if (it == word_index.end()) {
        cut.push_back({static_cast<int>(c),
                       is_edge ? base_eid[rule.cell] : base_vid[rule.cell],
                       is_edge});
        continue;
      }
      int hc = it->second;
      if (is_edge) {
        int e0 = base_eid[rule.cell], e1 = base_eid[rule.target];
        euf.unite(eat(static_cast<int>(c), e0), eat(hc, e1));
        for (int k = 0; k < 2; ++k)
          vuf.unite(vat(static_cast<int>(c), base_vid.at(base.edges[e0].ends[k])),
                    vat(hc, base_vid.at(base.edges[e1].ends[k])));
      } else {
        vuf.unite(vat(static_cast<int>(c), base_vid[rule.cell]),
                  vat(hc, base_vid[rule.target]));
      }
    }
  }

  ComplexData out;
  out.dimension = base.dimension;
  out.deck.kind = base.group.kind;
  out.deck.rank = base.group.rank;
  out.deck.radius = radius;
  out.deck.words = words;
  out.deck.identity_copy = 0;

  auto inst_id = [&](const std::string& id, size_t copy) {
    return id + "@" + words[copy];
  };

  std::vector<std::string> vname(nv * nc), ename(ne * nc);
  for (size_t c = 0; c < nc; ++c)
    for (size_t v = 0; v < nv; ++v) {
      size_t slot = vat(static_cast<int>(c), static_cast<int>(v));
      if (vuf.find(slot) == slot) {
        vname[slot] = inst_id(base.vertices[v].id, c);
        out.vertices.push_back({vname[slot], static_cast<int>(c)});
      }
    }
  for (size_t c = 0; c < nc; ++c)
    for (size_t e = 0; e < ne; ++e) {
      size_t slot = eat(static_cast<int>(c), static_cast<int>(e));
      if (euf.find(slot) == slot) {
        ename[slot] = inst_id(base.edges[e].id, c);
        EdgeData ed;
        ed.id = ename[slot];
        ed.length = base.edges[e].length;
        ed.copy = static_cast<int>(c);
        for (int k = 0; k < 2; ++k) {
          size_t vslot = vuf.find(
              vat(static_cast<int>(c), base_vid.at(base.edges[e].ends[k])));
          ed.ends[k] = vname[vslot];
        }
        if (ed.ends[0] == ed.ends[1])
          throw GluingError("truncated cover produced a loop at " + ed.id);
        out.edges.push_back(std::move(ed));
      }
    }
  for (size_t c = 0; c < nc; ++c)
    for (const auto& f : base.faces) {
      FaceData fd;
      fd.id = inst_id(f.id, c);
      fd.copy = static_cast<int>(c);
      fd.chart = f.chart;
      for (const auto& vidstr : f.cycle) {
        size_t vslot = vuf.find(vat(static_cast<int>(c), base_vid.at(vidstr)));
        fd.cycle.push_back(vname[vslot]);
      }
      if (!f.edges.empty())
        for (const auto& eidstr : f.edges) {
          size_t eslot = euf.find(eat(static_cast<int>(c), base_eid.at(eidstr)));
          fd.edges.push_back(ename[eslot]);
        }
      else
        for (size_t i = 0; i < f.cycle.size(); ++i) {
          // infer the base edge joining consecutive cycle vertices
          int a = base_vid.at(f.cycle[i]);
          int b = base_vid.at(f.cycle[(i + 1) % f.cycle.size()]);
          int found = -1;
          for (size_t e = 0; e < ne; ++e) {
            int x = base_vid.at(base.edges[e].ends[0]);
            int y = base_vid.at(base.edges[e].ends[1]);
            if (std::minmax(x, y) == std::minmax(a, b)) found = static_cast<int>(e);
          }
          if (found < 0)
            throw ParseError("face " + f.id + " has a side with no edge");
          fd.edges.push_back(ename[euf.find(eat(static_cast<int>(c), found))]);
        }
      out.faces.push_back(std::move(fd));
    }

  std::set<std::string> exposed;
  for (auto [c, cell, is_edge] : cut)
    exposed.insert(is_edge ? ename[euf.find(eat(c, cell))]
                           : vname[vuf.find(vat(c, cell))]);
  out.deck.exposed.assign(exposed.begin(), exposed.end());
  for (size_t c = 0; c < nc; ++c)
    out.deck.orbit[words[c]] = vname[vuf.find(vat(static_cast<int>(c), 0))];
  return out;
}

// Builtin registry used by the CLI.  Cover radius applies when the builtin
// carries a deck annotation and radius >= 0.
inline ComplexData builtin_complex(const std::string& name, int radius = -1) {
  ComplexData base;
  if (name == "interval")
    base = make_interval();
  else if (name == "circle")
    base = make_circle();
  else if (name.rfind("star", 0) == 0 && name.size() > 4)
    base = make_star(std::stoi(name.substr(4)));
  else if (name.rfind("twostar", 0) == 0) {
    auto rest = name.substr(7);
    auto us = rest.find('_', 1);
    if (rest.empty() || rest[0] != '_' || us == std::string::npos)
      throw ParseError("twostar builtin is twostar_M_N");
    base = make_two_star(std::stoi(rest.substr(1, us - 1)),
                         std::stoi(rest.substr(us + 1)));
  } else if (name == "square")
    base = make_square();
  else if (name == "lshape")
    base = make_lshape();
  else if (name == "zline")
    base = make_zline();
  else
    throw ParseError("unknown builtin complex: " + name);
  if (radius >= 0) {
    if (base.group.kind == GroupKind::none)
      throw ConstructionError("builtin " + name + " has no deck group to unroll");
    return build_truncated_cover(base, radius);
  }
  return base;
}

}  // namespace polyheat

#include "spe/serialize.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "spe/errors.hpp"

namespace spe {

using nlohmann::json;

namespace {

json real_to_json(double x) {
  if (x == kInf) return "inf";
  if (x == -kInf) return "-inf";
  return x;
}

double real_from_json(const json& j) {
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    if (s == "inf") return kInf;
    if (s == "-inf") return -kInf;
    fail(ErrorKind::io, "bad real token '" + s + "'");
  }
  return j.get<double>();
}

json outcomes_to_json(const Outcomes& v);

Outcomes outcomes_from_json(const json& j);

json outcomes_to_json(const Outcomes& v) {
  json j;
  if (v.is_empty()) {
    j["kind"] = "empty";
  } else if (v.is_strings()) {
    j["kind"] = "strings";
    j["items"] = v.as_strings().items;
    j["complemented"] = v.as_strings().complemented;
  } else if (v.is_reals()) {
    j["kind"] = "reals";
    json items = json::array();
    for (double r : v.as_reals().items) items.push_back(real_to_json(r));
    j["items"] = items;
  } else if (v.is_interval()) {
    const auto& iv = v.as_interval();
    j["kind"] = "interval";
    j["lo"] = real_to_json(iv.lo);
    j["lo_open"] = iv.lo_open;
    j["hi"] = real_to_json(iv.hi);
    j["hi_open"] = iv.hi_open;
  } else {
    j["kind"] = "union";
    json members = json::array();
    for (const Outcomes& m : v.as_union().members) members.push_back(outcomes_to_json(m));
    j["members"] = members;
  }
  return j;
}

Outcomes outcomes_from_json(const json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "empty") return Outcomes::empty();
  if (kind == "strings")
    return Outcomes::strings(j.at("items").get<std::vector<std::string>>(),
                             j.at("complemented").get<bool>());
  if (kind == "reals") {
    std::vector<double> items;
    for (const auto& item : j.at("items")) items.push_back(real_from_json(item));
    return Outcomes::reals(std::move(items));
  }
  if (kind == "interval")
    return Outcomes::interval(real_from_json(j.at("lo")), j.at("lo_open").get<bool>(),
                              real_from_json(j.at("hi")), j.at("hi_open").get<bool>());
  if (kind == "union") {
    std::vector<Outcomes> members;
    for (const auto& m : j.at("members")) members.push_back(outcomes_from_json(m));
    return union_of(members);
  }
  fail(ErrorKind::io, "bad outcomes kind '" + kind + "'");
}

json event_to_json(const EventPtr& e);
EventPtr event_from_json(const json& j);

json transform_to_json(const TransformPtr& t) {
  json j;
  switch (t->kind) {
    case Transform::Kind::identity:
      j["kind"] = "id";
      j["var"] = t->var;
      return j;
    case Transform::Kind::reciprocal:
      j["kind"] = "reciprocal";
      break;
    case Transform::Kind::abs_value:
      j["kind"] = "abs";
      break;
    case Transform::Kind::root:
      j["kind"] = "root";
      j["degree"] = t->root_degree;
      break;
    case Transform::Kind::exponential:
      j["kind"] = "exp";
      j["base"] = t->base;
      break;
    case Transform::Kind::logarithm:
      j["kind"] = "log";
      j["base"] = t->base;
      break;
    case Transform::Kind::polynomial:
      j["kind"] = "poly";
      j["coeffs"] = t->coeffs;
      break;
    case Transform::Kind::piecewise: {
      j["kind"] = "piecewise";
      json pieces = json::array();
      for (const auto& [pt, pe] : t->pieces) {
        json p;
        p["transform"] = transform_to_json(pt);
        p["guard"] = event_to_json(pe);
        pieces.push_back(p);
      }
      j["pieces"] = pieces;
      return j;
    }
  }
  j["inner"] = transform_to_json(t->inner);
  return j;
}

TransformPtr transform_from_json(const json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "id") return identity(j.at("var").get<std::string>());
  if (kind == "piecewise") {
    std::vector<std::pair<TransformPtr, EventPtr>> pieces;
    for (const auto& p : j.at("pieces"))
      pieces.emplace_back(transform_from_json(p.at("transform")), event_from_json(p.at("guard")));
    return piecewise(std::move(pieces));
  }
  TransformPtr inner = transform_from_json(j.at("inner"));
  if (kind == "reciprocal") return reciprocal(inner);
  if (kind == "abs") return abs_value(inner);
  if (kind == "root") return root(inner, j.at("degree").get<int>());
  if (kind == "exp") return exponential(inner, j.at("base").get<double>());
  if (kind == "log") return logarithm(inner, j.at("base").get<double>());
  if (kind == "poly") return polynomial(inner, j.at("coeffs").get<std::vector<double>>());
  fail(ErrorKind::io, "bad transform kind '" + kind + "'");
}

json event_to_json(const EventPtr& e) {
  json j;
  switch (e->kind) {
    case Event::Kind::containment:
      j["kind"] = "in";
      j["transform"] = transform_to_json(e->transform);
      j["values"] = outcomes_to_json(e->values);
      return j;
    case Event::Kind::conjunction:
      j["kind"] = "and";
      break;
    case Event::Kind::disjunction:
      j["kind"] = "or";
      break;
  }
  json children = json::array();
  for (const auto& c : e->children) children.push_back(event_to_json(c));
  j["children"] = children;
  return j;
}

EventPtr event_from_json(const json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "in")
    return containment(transform_from_json(j.at("transform")), outcomes_from_json(j.at("values")));
  std::vector<EventPtr> children;
  for (const auto& c : j.at("children")) children.push_back(event_from_json(c));
  if (kind == "and") return conjunction(std::move(children));
  if (kind == "or") return disjunction(std::move(children));
  fail(ErrorKind::io, "bad event kind '" + kind + "'");
}

json dist_to_json(const Distribution& d) {
  json j;
  if (std::holds_alternative<DistReal>(d)) {
    const auto& dr = std::get<DistReal>(d);
    j["kind"] = "real";
    j["family"] = dr.F->family();
    j["params"] = dr.F->params();
    j["lo"] = real_to_json(dr.lo);
    j["hi"] = real_to_json(dr.hi);
  } else if (std::holds_alternative<DistInt>(d)) {
    const auto& di = std::get<DistInt>(d);
    j["kind"] = "int";
    j["family"] = di.F->family();
    j["params"] = di.F->params();
    j["lo"] = real_to_json(di.lo);
    j["hi"] = real_to_json(di.hi);
  } else {
    const auto& ds = std::get<DistStr>(d);
    j["kind"] = "str";
    json atoms = json::array();
    for (const auto& [s, w] : ds.atoms) {
      json a;
      a["label"] = s;
      a["weight"] = w;
      atoms.push_back(a);
    }
    j["atoms"] = atoms;
  }
  return j;
}

Distribution dist_from_json(const json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "real") {
    CdfPtr F = make_cdf(j.at("family").get<std::string>(), j.at("params").get<std::vector<double>>());
    return make_dist_real(std::move(F), real_from_json(j.at("lo")), real_from_json(j.at("hi")));
  }
  if (kind == "int") {
    CdfPtr F = make_cdf(j.at("family").get<std::string>(), j.at("params").get<std::vector<double>>());
    return make_dist_int(std::move(F), real_from_json(j.at("lo")), real_from_json(j.at("hi")));
  }
  if (kind == "str") {
    std::vector<std::pair<std::string, double>> atoms;
    for (const auto& a : j.at("atoms"))
      atoms.emplace_back(a.at("label").get<std::string>(), a.at("weight").get<double>());
    return make_dist_str(std::move(atoms));
  }
  fail(ErrorKind::io, "bad distribution kind '" + kind + "'");
}

}  // namespace

std::string outcomes_to_json_text(const Outcomes& v) { return outcomes_to_json(v).dump(); }

Outcomes outcomes_from_json_text(const std::string& text) {
  return outcomes_from_json(json::parse(text));
}

std::string save_graph(const Graph& g, NodeId root) {
  json j;
  j["format"] = "spe-graph-v1";
  j["root"] = root;
  json nodes = json::array();
  for (size_t i = 0; i < g.size(); ++i) {
    const Node& n = g.node(static_cast<NodeId>(i));
    json nj;
    nj["id"] = static_cast<NodeId>(i);
    if (std::holds_alternative<LeafNode>(n.data)) {
      const auto& l = std::get<LeafNode>(n.data);
      nj["kind"] = "leaf";
      nj["var"] = l.var;
      nj["dist"] = dist_to_json(l.dist);
      json env = json::array();
      for (const auto& [x, t] : l.env.entries) {
        json entry;
        entry["var"] = x;
        entry["transform"] = transform_to_json(t);
        env.push_back(entry);
      }
      nj["env"] = env;
    } else if (std::holds_alternative<SumNode>(n.data)) {
      const auto& s = std::get<SumNode>(n.data);
      nj["kind"] = "sum";
      nj["children"] = s.children;
      nj["weights"] = s.weights;
    } else {
      nj["kind"] = "product";
      nj["children"] = std::get<ProductNode>(n.data).children;
    }
    nodes.push_back(std::move(nj));
  }
  j["nodes"] = nodes;
  return j.dump(2) + "\n";
}

LoadedGraph load_graph(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const std::exception& ex) {
    fail(ErrorKind::io, std::string("bad graph file: ") + ex.what());
  }
  if (j.value("format", "") != "spe-graph-v1") fail(ErrorKind::io, "unrecognized graph format");
  LoadedGraph out;
  for (const auto& nj : j.at("nodes")) {
    const std::string kind = nj.at("kind").get<std::string>();
    Node n;
    if (kind == "leaf") {
      LeafNode l;
      l.var = nj.at("var").get<std::string>();
      l.dist = dist_from_json(nj.at("dist"));
      for (const auto& entry : nj.at("env"))
        l.env.entries.emplace_back(entry.at("var").get<std::string>(),
                                   transform_from_json(entry.at("transform")));
      n.scope.reserve(l.env.entries.size());
      for (const auto& [x, t] : l.env.entries) n.scope.push_back(x);
      std::sort(n.scope.begin(), n.scope.end());
      n.data = std::move(l);
    } else if (kind == "sum") {
      SumNode s;
      s.children = nj.at("children").get<std::vector<NodeId>>();
      s.weights = nj.at("weights").get<std::vector<double>>();
      for (NodeId c : s.children) {
        if (c < 0 || static_cast<size_t>(c) >= out.graph.size())
          fail(ErrorKind::io, "sum child id out of range");
      }
      n.scope = out.graph.node(s.children.at(0)).scope;
      n.data = std::move(s);
    } else if (kind == "product") {
      ProductNode p;
      p.children = nj.at("children").get<std::vector<NodeId>>();
      for (NodeId c : p.children) {
        if (c < 0 || static_cast<size_t>(c) >= out.graph.size())
          fail(ErrorKind::io, "product child id out of range");
        n.scope.insert(n.scope.end(), out.graph.node(c).scope.begin(),
                       out.graph.node(c).scope.end());
      }
      std::sort(n.scope.begin(), n.scope.end());
      n.data = std::move(p);
    } else {
      fail(ErrorKind::io, "bad node kind '" + kind + "'");
    }
    out.graph.append_raw(std::move(n));
  }
  out.root = j.at("root").get<NodeId>();
  if (out.root < 0 || static_cast<size_t>(out.root) >= out.graph.size())
    fail(ErrorKind::io, "root id out of range");
  auto violations = validate(out.graph, out.root);
  if (!violations.empty())
    fail(ErrorKind::io, "loaded graph violates " + violations.front().condition + ": " +
                            violations.front().message);
  return out;
}

void write_file_atomic(const std::string& path, const std::string& content) {
  std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) fail(ErrorKind::io, "cannot write '" + tmp + "'");
    out << content;
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0)
    fail(ErrorKind::io, "cannot rename '" + tmp + "' to '" + path + "'");
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::io, "cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace spe

#include "crystal/lattice_spec.hpp"

#include "crystal/bundled.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace crystal {

using nlohmann::json;

namespace {

const json& require(const json& doc, const char* key) {
  auto it = doc.find(key);
  if (it == doc.end()) throw SpecError(std::string("missing field '") + key + "'");
  return *it;
}

double parse_weight(const json& w) {
  if (w.is_number()) return w.get<double>();
  if (w.is_string()) {
    const std::string s = w.get<std::string>();
    auto slash = s.find('/');
    try {
      std::size_t used = 0;
      if (slash == std::string::npos) {
        double v = std::stod(s, &used);
        if (used != s.size()) throw SpecError("bad weight '" + s + "'");
        return v;
      }
      std::string num = s.substr(0, slash), den = s.substr(slash + 1);
      std::size_t un = 0, ud = 0;
      double a = std::stod(num, &un), b = std::stod(den, &ud);
      if (un != num.size() || ud != den.size()) throw SpecError("bad weight '" + s + "'");
      return a / b;
    } catch (const std::logic_error&) {
      throw SpecError("bad weight '" + s + "'");
    }
  }
  throw SpecError("weight must be a number or a \"p/q\" string");
}

Eigen::VectorXd real_vector(const json& v, int d, const std::string& what) {
  if (!v.is_array() || static_cast<int>(v.size()) != d)
    throw SpecError(what + " must be an array of " + std::to_string(d) + " numbers");
  Eigen::VectorXd out(d);
  for (int i = 0; i < d; ++i) {
    if (!v[static_cast<std::size_t>(i)].is_number()) throw SpecError(what + " must contain numbers");
    out[i] = v[static_cast<std::size_t>(i)].get<double>();
    if (!std::isfinite(out[i])) throw SpecError(what + " must be finite");
  }
  return out;
}

}  // namespace

LatticeSpec lattice_spec_from_json(const json& doc) {
  if (!doc.is_object()) throw SpecError("lattice spec must be a JSON object");
  const json& jd = require(doc, "dimension");
  if (!jd.is_number_integer() || jd.get<int>() < 1)
    throw SpecError("dimension must be a positive integer");
  const int d = jd.get<int>();

  const json& jb = require(doc, "basis");
  if (!jb.is_array() || static_cast<int>(jb.size()) != d)
    throw SpecError("basis must list " + std::to_string(d) + " vectors");
  Eigen::MatrixXd basis(d, d);
  for (int i = 0; i < d; ++i)
    basis.col(i) = real_vector(jb[static_cast<std::size_t>(i)], d, "basis vector");
  if (std::abs(basis.determinant()) < 1e-12) throw SpecError("basis is singular");

  const json& jv = require(doc, "vertices");
  if (!jv.is_array() || jv.empty()) throw SpecError("vertices must be a nonempty array");
  std::vector<std::string> ids;
  std::set<std::string> unique;
  for (const json& v : jv) {
    if (!v.is_string()) throw SpecError("vertex ids must be strings");
    ids.push_back(v.get<std::string>());
    if (!unique.insert(ids.back()).second) throw SpecError("duplicate vertex id '" + ids.back() + "'");
  }

  const json& je = require(doc, "edges");
  if (!je.is_array()) throw SpecError("edges must be an array");
  std::vector<EdgeSpec> edges;
  for (const json& e : je) {
    if (!e.is_object()) throw SpecError("each edge must be an object");
    EdgeSpec es;
    es.tail = require(e, "tail").get<std::string>();
    es.head = require(e, "head").get<std::string>();
    const json& js = require(e, "shift");
    if (!js.is_array() || static_cast<int>(js.size()) != d)
      throw SpecError("edge shift must have " + std::to_string(d) + " integers");
    es.shift.resize(d);
    for (int i = 0; i < d; ++i) {
      if (!js[static_cast<std::size_t>(i)].is_number_integer())
        throw SpecError("edge shift entries must be integers");
      es.shift[i] = js[static_cast<std::size_t>(i)].get<int>();
    }
    es.weight = parse_weight(require(e, "weight"));
    if (!(es.weight > 0.0) || !std::isfinite(es.weight))
      throw SpecError("edge " + es.tail + "->" + es.head + " has nonpositive weight");
    edges.push_back(std::move(es));
  }

  LatticeSpec spec;
  spec.graph = QuotientGraph::from_edges(d, ids, edges);
  spec.basis = basis;
  if (auto jp = doc.find("positions"); jp != doc.end() && !jp->is_null()) {
    if (!jp->is_object()) throw SpecError("positions must map vertex ids to coordinates");
    Eigen::MatrixXd pos(d, static_cast<Eigen::Index>(ids.size()));
    std::vector<bool> given(ids.size(), false);
    for (auto it = jp->begin(); it != jp->end(); ++it) {
      int v = spec.graph.vertex_index(it.key());
      pos.col(v) = real_vector(it.value(), d, "position of '" + it.key() + "'");
      given[static_cast<std::size_t>(v)] = true;
    }
    for (std::size_t v = 0; v < ids.size(); ++v)
      if (!given[v]) throw SpecError("positions missing vertex '" + ids[v] + "'");
    spec.positions = pos;
  }
  return spec;
}

LatticeSpec parse_lattice_spec(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw SpecError(std::string("malformed lattice spec: ") + e.what());
  } catch (const json::type_error& e) {
    throw SpecError(std::string("malformed lattice spec: ") + e.what());
  }
  try {
    return lattice_spec_from_json(doc);
  } catch (const json::exception& e) {
    throw SpecError(std::string("malformed lattice spec: ") + e.what());
  }
}

json lattice_spec_to_json(const LatticeSpec& spec) {
  const QuotientGraph& g = spec.graph;
  const int d = g.dimension();
  json doc;
  doc["dimension"] = d;
  json basis = json::array();
  for (int i = 0; i < d; ++i) {
    json col = json::array();
    for (int j = 0; j < d; ++j) col.push_back(spec.basis(j, i));
    basis.push_back(col);
  }
  doc["basis"] = basis;
  doc["vertices"] = g.vertex_ids();
  json edges = json::array();
  // Listed edges are the first half of the dart list (see from_edges).
  for (int e = 0; e < g.num_darts() / 2; ++e) {
    const Dart& dart = g.dart(e);
    json je;
    je["tail"] = g.vertex_ids()[static_cast<std::size_t>(dart.tail)];
    je["head"] = g.vertex_ids()[static_cast<std::size_t>(dart.head)];
    je["shift"] = std::vector<int>(dart.shift.data(), dart.shift.data() + d);
    je["weight"] = dart.weight;
    edges.push_back(je);
  }
  doc["edges"] = edges;
  if (spec.positions) {
    json pos = json::object();
    for (int v = 0; v < g.num_vertices(); ++v) {
      Eigen::VectorXd x = spec.positions->col(v);
      pos[g.vertex_ids()[static_cast<std::size_t>(v)]] = std::vector<double>(x.data(), x.data() + d);
    }
    doc["positions"] = pos;
  }
  return doc;
}

LatticeSpec load_lattice_spec(const std::string& source) {
  std::string name = source;
  if (name.rfind("bundled:", 0) == 0) name = name.substr(8);
  if (auto text = bundled_lattice(name)) return parse_lattice_spec(std::string(*text));
  std::ifstream in(source);
  if (!in) throw SpecError("cannot open lattice spec '" + source + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_lattice_spec(ss.str());
}

}  // namespace crystal

#include "zeff/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <unordered_map>

namespace zeff::io {

namespace {

[[noreturn]] void fail(const std::string& field, const std::string& what) {
  throw ParseError("field '" + field + "': " + what);
}

const json& expect(const json& doc, const std::string& field) {
  if (!doc.is_object()) fail(field, "enclosing value is not an object");
  auto it = doc.find(field);
  if (it == doc.end()) fail(field, "missing");
  return *it;
}

double expect_number(const json& value, const std::string& field) {
  if (!value.is_number()) fail(field, "expected a number");
  return value.get<double>();
}

RealMat diag_from(const json& entries, const std::string& field) {
  if (!entries.is_array()) fail(field, "expected an array of numbers");
  RealMat m = RealMat::Zero(entries.size(), entries.size());
  for (std::size_t i = 0; i < entries.size(); ++i)
    m(static_cast<Index>(i), static_cast<Index>(i)) = expect_number(entries[i], field);
  return m;
}

RealMat dense_from(const json& rows, const std::string& field) {
  if (!rows.is_array() || rows.empty()) fail(field, "expected a nonempty array of rows");
  const std::size_t ncols = rows[0].is_array() ? rows[0].size() : 0;
  RealMat m(static_cast<Index>(rows.size()), static_cast<Index>(ncols));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (!rows[i].is_array() || rows[i].size() != ncols) fail(field, "ragged rows");
    for (std::size_t j = 0; j < ncols; ++j)
      m(static_cast<Index>(i), static_cast<Index>(j)) = expect_number(rows[i][j], field);
  }
  return m;
}

RealMat sigma_from(const json& doc, Index expected_size, const std::string& field) {
  const json& entry = expect(doc, field);
  if (entry.contains("diag")) {
    RealMat m = diag_from(entry["diag"], field + ".diag");
    if (m.rows() != expected_size)
      fail(field + ".diag", "expected " + std::to_string(expected_size) + " entries, got " +
                                std::to_string(m.rows()));
    return m;
  }
  if (entry.contains("dense")) {
    RealMat m = dense_from(entry["dense"], field + ".dense");
    if (m.rows() != expected_size || m.cols() != expected_size)
      fail(field + ".dense", "expected a " + std::to_string(expected_size) + "x" +
                                 std::to_string(expected_size) + " matrix");
    return m;
  }
  fail(field, "expected either 'diag' or 'dense'");
}

}  // namespace

Index NetworkFile::node_id(const std::string& name) const {
  for (std::size_t i = 0; i < node_names.size(); ++i)
    if (node_names[i] == name) return static_cast<Index>(i);
  throw ParseError("unknown node name '" + name + "'");
}

ZProblem<double> ZProblemFile::problem(const Tolerances& tol) const {
  const Index n = u_dim + e_dim + j_dim;
  const RealMat id = RealMat::Identity(n, n);
  OrthoDecomp<double> decomp(
      n,
      {Subspace<double>::from_orthonormal(id.leftCols(u_dim)),
       Subspace<double>::from_orthonormal(id.middleCols(u_dim, e_dim)),
       Subspace<double>::from_orthonormal(id.rightCols(j_dim))},
      tol);
  return ZProblem<double>(decomp, sigma, tol);
}

NetworkFile parse_network(const json& doc) {
  NetworkFile out;
  const json& nodes = expect(doc, "nodes");
  if (!nodes.is_array() || nodes.empty()) fail("nodes", "expected a nonempty array of names");
  std::unordered_map<std::string, Index> ids;
  for (const auto& n : nodes) {
    if (!n.is_string()) fail("nodes", "node names must be strings");
    const std::string name = n.get<std::string>();
    if (ids.count(name)) fail("nodes", "duplicate node name '" + name + "'");
    ids[name] = static_cast<Index>(out.node_names.size());
    out.node_names.push_back(name);
  }

  const json& edges = expect(doc, "edges");
  if (!edges.is_array()) fail("edges", "expected an array");
  std::vector<std::pair<Index, Index>> edge_list;
  for (std::size_t i = 0; i < edges.size(); ++i) {
    const std::string field = "edges[" + std::to_string(i) + "]";
    const json& e = edges[i];
    const json& tail = expect(e, "tail");
    const json& head = expect(e, "head");
    if (!tail.is_string() || !head.is_string()) fail(field, "tail/head must be node names");
    const auto t = ids.find(tail.get<std::string>());
    const auto h = ids.find(head.get<std::string>());
    if (t == ids.end()) fail(field + ".tail", "unknown node '" + tail.get<std::string>() + "'");
    if (h == ids.end()) fail(field + ".head", "unknown node '" + head.get<std::string>() + "'");
    edge_list.emplace_back(t->second, h->second);
  }
  try {
    out.graph = Digraph(static_cast<Index>(out.node_names.size()), std::move(edge_list));
  } catch (const Error& e) {
    fail("edges", e.what());
  }

  out.sigma = sigma_from(doc, out.graph.edge_count(), "sigma");

  if (doc.contains("boundary")) {
    const json& bdry = doc["boundary"];
    if (!bdry.is_array()) fail("boundary", "expected an array of node names");
    std::vector<Index> b;
    for (const auto& n : bdry) {
      if (!n.is_string()) fail("boundary", "node names must be strings");
      const auto it = ids.find(n.get<std::string>());
      if (it == ids.end()) fail("boundary", "unknown node '" + n.get<std::string>() + "'");
      b.push_back(it->second);
    }
    out.boundary = std::move(b);
  }
  return out;
}

LatticeFile parse_lattice(const json& doc) {
  LatticeFile out;
  const json& d = expect(doc, "d");
  if (!d.is_number_integer()) fail("d", "expected an integer");
  const json& tau = expect(doc, "tau");
  if (!tau.is_array()) fail("tau", "expected an array of integers");
  std::vector<Index> periods;
  for (const auto& t : tau) {
    if (!t.is_number_integer()) fail("tau", "expected integers");
    periods.push_back(t.get<Index>());
  }
  try {
    out.lattice = Lattice(d.get<Index>(), std::move(periods));
  } catch (const Error& e) {
    fail("tau", e.what());
  }
  out.sigma = sigma_from(doc, out.lattice.edge_count(), "sigma");
  return out;
}

ZProblemFile parse_zproblem(const json& doc) {
  ZProblemFile out;
  const json& dims = expect(doc, "dims");
  const auto dim = [&](const char* name) {
    if (!dims.is_object() || !dims.contains(name))
      fail(std::string("dims.") + name, "missing");
    const json& v = dims[name];
    if (!v.is_number_integer() || v.get<Index>() < 0)
      fail(std::string("dims.") + name, "expected a nonnegative integer");
    return v.get<Index>();
  };
  out.u_dim = dim("u");
  out.e_dim = dim("e");
  out.j_dim = dim("j");
  out.sigma = sigma_from(doc, out.u_dim + out.e_dim + out.j_dim, "sigma");
  return out;
}

json matrix_to_json(const RealMat& m) {
  json rows = json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

RealMat matrix_from_json(const json& doc, const std::string& field) {
  return dense_from(doc, field);
}

json vector_to_json(const RealVec& v) {
  json out = json::array();
  for (Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

RealVec parse_vector_literal(const std::string& text) {
  std::vector<double> values;
  std::stringstream ss(text);
  std::string token;
  while (std::getline(ss, token, ',')) {
    try {
      values.push_back(std::stod(token));
    } catch (const std::exception&) {
      throw ParseError("invalid vector literal '" + text + "'");
    }
  }
  if (values.empty()) throw ParseError("empty vector literal");
  RealVec v(static_cast<Index>(values.size()));
  for (std::size_t i = 0; i < values.size(); ++i) v(static_cast<Index>(i)) = values[i];
  return v;
}

json serialize(const NetworkFile& file) {
  json doc;
  doc["nodes"] = file.node_names;
  json edges = json::array();
  for (const auto& [tail, head] : file.graph.edges())
    edges.push_back({{"tail", file.node_names[tail]}, {"head", file.node_names[head]}});
  doc["edges"] = std::move(edges);
  doc["sigma"] = {{"dense", matrix_to_json(file.sigma)}};
  if (file.boundary) {
    json b = json::array();
    for (Index i : *file.boundary) b.push_back(file.node_names[i]);
    doc["boundary"] = std::move(b);
  }
  return doc;
}

json serialize(const LatticeFile& file) {
  json doc;
  doc["d"] = file.lattice.dim();
  doc["tau"] = file.lattice.tau();
  doc["sigma"] = {{"dense", matrix_to_json(file.sigma)}};
  return doc;
}

json serialize(const ZProblemFile& file) {
  json doc;
  doc["dims"] = {{"u", file.u_dim}, {"e", file.e_dim}, {"j", file.j_dim}};
  doc["sigma"] = {{"dense", matrix_to_json(file.sigma)}};
  return doc;
}

json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError("cannot parse '" + path + "': " + e.what());
  }
}

NetworkFile read_network(const std::string& path) { return parse_network(load_json(path)); }
LatticeFile read_lattice(const std::string& path) { return parse_lattice(load_json(path)); }
ZProblemFile read_zproblem(const std::string& path) { return parse_zproblem(load_json(path)); }

std::string format_matrix(const RealMat& m) {
  std::string out;
  char buf[64];
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      std::snprintf(buf, sizeof(buf), "% .17g", m(i, j));
      out += buf;
      if (j + 1 < m.cols()) out += "  ";
    }
    out += '\n';
  }
  return out;
}

std::string format_vector(const RealVec& v) {
  std::string out = "[";
  char buf[64];
  for (Index i = 0; i < v.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.17g", v(i));
    out += buf;
    if (i + 1 < v.size()) out += ", ";
  }
  out += "]";
  return out;
}

}  // namespace zeff::io

#pragma once

#include "json.hpp"

#include <optional>
#include <string>
#include <vector>

#include "zeff/lattice.hpp"
#include "zeff/network.hpp"
#include "zeff/types.hpp"

namespace zeff::io {

using json = nlohmann::json;

/// A network file: named nodes, directed edges, an edge conductivity given
/// either as per-edge conductances or as a dense matrix, and an optional
/// boundary list.
struct NetworkFile {
  std::vector<std::string> node_names;
  Digraph graph{0, {}};
  RealMat sigma;
  std::optional<std::vector<Index>> boundary;

  ElectricalNetwork<double> network(const Tolerances& tol = {}) const {
    return ElectricalNetwork<double>(graph, sigma, tol);
  }
  Index node_id(const std::string& name) const;
};

struct LatticeFile {
  Lattice lattice{1, {1}};
  RealMat sigma;

  LatticeNetwork<double> network(const Tolerances& tol = {}) const {
    return LatticeNetwork<double>(lattice, sigma, tol);
  }
};

/// Coordinate-aligned Z-problem: U spans the first dims[0] coordinates,
/// E the next dims[1], J the last dims[2].
struct ZProblemFile {
  Index u_dim = 0;
  Index e_dim = 0;
  Index j_dim = 0;
  RealMat sigma;

  ZProblem<double> problem(const Tolerances& tol = {}) const;
};

NetworkFile parse_network(const json& doc);
LatticeFile parse_lattice(const json& doc);
ZProblemFile parse_zproblem(const json& doc);

json serialize(const NetworkFile& file);
json serialize(const LatticeFile& file);
json serialize(const ZProblemFile& file);

NetworkFile read_network(const std::string& path);
LatticeFile read_lattice(const std::string& path);
ZProblemFile read_zproblem(const std::string& path);

json load_json(const std::string& path);

json matrix_to_json(const RealMat& m);
RealMat matrix_from_json(const json& doc, const std::string& field);
json vector_to_json(const RealVec& v);
RealVec parse_vector_literal(const std::string& text);

/// Matrix text with 17 significant digits per entry.
std::string format_matrix(const RealMat& m);
std::string format_vector(const RealVec& v);

}  // namespace zeff::io

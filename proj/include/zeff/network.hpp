#pragma once

#include <algorithm>
#include <limits>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "zeff/hodge.hpp"
#include "zeff/numkit.hpp"
#include "zeff/types.hpp"
#include "zeff/zproblem.hpp"

namespace zeff {

/// Finite directed graph without self-loops. Nodes and edges keep their
/// declaration order; all matrices are indexed accordingly.
class Digraph {
 public:
  Digraph(Index node_count, std::vector<std::pair<Index, Index>> edges)
      : node_count_(node_count), edges_(std::move(edges)) {
    if (node_count_ < 0) throw DimensionError("Digraph: negative node count");
    for (const auto& [tail, head] : edges_) {
      if (tail < 0 || tail >= node_count_ || head < 0 || head >= node_count_)
        throw DimensionError("Digraph: edge endpoint out of range");
      if (tail == head) throw DimensionError("Digraph: self-loops are not allowed");
    }
  }

  Index node_count() const { return node_count_; }
  Index edge_count() const { return static_cast<Index>(edges_.size()); }
  const std::vector<std::pair<Index, Index>>& edges() const { return edges_; }
  Index tail(Index e) const { return edges_.at(e).first; }
  Index head(Index e) const { return edges_.at(e).second; }

 private:
  Index node_count_ = 0;
  std::vector<std::pair<Index, Index>> edges_;
};

/// Chain p0 -> p1 -> ... -> p_{n-1}.
inline Digraph path_digraph(Index nodes) {
  std::vector<std::pair<Index, Index>> edges;
  for (Index i = 0; i + 1 < nodes; ++i) edges.emplace_back(i, i + 1);
  return Digraph(nodes, std::move(edges));
}

/// Two nodes joined by k parallel edges.
inline Digraph parallel_digraph(Index edge_count) {
  std::vector<std::pair<Index, Index>> edges(static_cast<std::size_t>(edge_count), {0, 1});
  return Digraph(2, std::move(edges));
}

/// Gradient D (edges x nodes) and divergence D_bullet (nodes x edges); the
/// adjoint relation D^* = -D_bullet holds exactly over the integers.
template <class Scalar = double>
struct IncidenceOperators {
  Mat<Scalar> d;
  Mat<Scalar> dbullet;
};

template <class Scalar = double>
IncidenceOperators<Scalar> incidence(const Digraph& g) {
  IncidenceOperators<Scalar> out;
  out.d = Mat<Scalar>::Zero(g.edge_count(), g.node_count());
  for (Index e = 0; e < g.edge_count(); ++e) {
    out.d(e, g.head(e)) += Scalar(1);
    out.d(e, g.tail(e)) -= Scalar(1);
  }
  out.dbullet = -out.d.transpose();
  return out;
}

/// Edge conductivity attached to a digraph; sigma acts on the edge space
/// and must be self-adjoint PSD.
template <class Scalar = double>
class ElectricalNetwork {
 public:
  ElectricalNetwork(Digraph graph, Mat<Scalar> sigma, Tolerances tol = {})
      : graph_(std::move(graph)), sigma_(std::move(sigma)), tol_(tol) {
    tol_.validate();
    if (sigma_.rows() != graph_.edge_count() || sigma_.cols() != graph_.edge_count())
      throw DimensionError("ElectricalNetwork: sigma must be square on the edge space");
    if (!is_psd(sigma_, tol_))
      throw HypothesisError("ElectricalNetwork: sigma must be self-adjoint PSD");
  }

  static ElectricalNetwork from_conductances(Digraph graph, const RealVec& g,
                                             Tolerances tol = {}) {
    if (g.size() != graph.edge_count())
      throw DimensionError("ElectricalNetwork: one conductance per edge expected");
    Mat<Scalar> sigma = Mat<Scalar>::Zero(g.size(), g.size());
    for (Index i = 0; i < g.size(); ++i) sigma(i, i) = Scalar(g(i));
    return ElectricalNetwork(std::move(graph), std::move(sigma), tol);
  }

  const Digraph& graph() const { return graph_; }
  const Mat<Scalar>& sigma() const { return sigma_; }
  const Tolerances& tol() const { return tol_; }

 private:
  Digraph graph_;
  Mat<Scalar> sigma_;
  Tolerances tol_;
};

/// K_sigma = -D_bullet sigma D = D^* sigma D (weighted graph Laplacian).
template <class Scalar>
Mat<Scalar> kirchhoff(const ElectricalNetwork<Scalar>& net) {
  const auto inc = incidence<Scalar>(net.graph());
  return inc.d.adjoint() * net.sigma() * inc.d;
}

/// Connected-component labels in node order (plain union-find).
inline std::vector<Index> component_labels(const Digraph& g) {
  std::vector<Index> parent(static_cast<std::size_t>(g.node_count()));
  std::iota(parent.begin(), parent.end(), Index(0));
  const auto find = [&](Index x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  };
  for (Index e = 0; e < g.edge_count(); ++e) {
    const Index a = find(g.tail(e)), b = find(g.head(e));
    if (a != b) parent[a] = b;
  }
  std::vector<Index> label(parent.size());
  std::vector<Index> seen;
  for (std::size_t i = 0; i < parent.size(); ++i) {
    const Index root = find(static_cast<Index>(i));
    auto it = std::find(seen.begin(), seen.end(), root);
    if (it == seen.end()) {
      seen.push_back(root);
      it = std::prev(seen.end());
    }
    label[i] = static_cast<Index>(it - seen.begin());
  }
  return label;
}

inline Index component_count(const Digraph& g) {
  const auto labels = component_labels(g);
  return labels.empty() ? 0 : 1 + *std::max_element(labels.begin(), labels.end());
}

inline bool is_connected(const Digraph& g) { return component_count(g) <= 1; }

/// ker D spanned by the normalized component indicator functions.
template <class Scalar = double>
Subspace<Scalar> components_kernel(const Digraph& g) {
  const auto labels = component_labels(g);
  const Index k = g.node_count() == 0 ? 0 : 1 + *std::max_element(labels.begin(), labels.end());
  Mat<Scalar> basis = Mat<Scalar>::Zero(g.node_count(), k);
  std::vector<double> size(static_cast<std::size_t>(k), 0.0);
  for (Index p = 0; p < g.node_count(); ++p) size[labels[p]] += 1.0;
  for (Index p = 0; p < g.node_count(); ++p)
    basis(p, labels[p]) = Scalar(1.0 / std::sqrt(size[labels[p]]));
  return Subspace<Scalar>::from_orthonormal(std::move(basis));
}

/// Splits the node set into boundary (kept in the given order) and interior
/// (declaration order); both must be nonempty.
class BoundaryPartition {
 public:
  BoundaryPartition(Index node_count, std::vector<Index> boundary)
      : boundary_(std::move(boundary)) {
    std::vector<bool> on_boundary(static_cast<std::size_t>(node_count), false);
    for (Index b : boundary_) {
      if (b < 0 || b >= node_count) throw DimensionError("BoundaryPartition: node out of range");
      if (on_boundary[b]) throw DimensionError("BoundaryPartition: duplicate boundary node");
      on_boundary[b] = true;
    }
    for (Index p = 0; p < node_count; ++p)
      if (!on_boundary[p]) interior_.push_back(p);
    if (boundary_.empty() || interior_.empty())
      throw DimensionError("BoundaryPartition: boundary and interior must both be nonempty");
  }

  const std::vector<Index>& boundary() const { return boundary_; }
  const std::vector<Index>& interior() const { return interior_; }

 private:
  std::vector<Index> boundary_;
  std::vector<Index> interior_;
};

namespace detail {

template <class Scalar>
Mat<Scalar> submatrix(const Mat<Scalar>& a, const std::vector<Index>& rows,
                      const std::vector<Index>& cols) {
  Mat<Scalar> out(static_cast<Index>(rows.size()), static_cast<Index>(cols.size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < cols.size(); ++j) out(i, j) = a(rows[i], cols[j]);
  return out;
}

}  // namespace detail

/// Boundary response map via elimination of the interior block of K_sigma.
template <class Scalar>
Mat<Scalar> dtn_schur(const ElectricalNetwork<Scalar>& net, const BoundaryPartition& bp) {
  const Mat<Scalar> k = kirchhoff(net);
  const auto& b = bp.boundary();
  const auto& in = bp.interior();
  const Mat<Scalar> kbb = detail::submatrix(k, b, b);
  const Mat<Scalar> kbi = detail::submatrix(k, b, in);
  const Mat<Scalar> kib = detail::submatrix(k, in, b);
  const Mat<Scalar> kii = detail::submatrix(k, in, in);
  return kbb - kbi * pinv(kii, net.tol()) * kib;
}

/// Orthogonal triple (U, E, J) of the edge space for the boundary-value
/// problem: U holds gradients of interior-harmonic potentials, E gradients
/// of potentials vanishing on the boundary, J the divergence-free fields.
template <class Scalar>
OrthoDecomp<Scalar> dirichlet_triple(const Digraph& g, const BoundaryPartition& bp,
                                     const Tolerances& tol = {}) {
  const auto inc = incidence<Scalar>(g);
  const auto currents = kernel(inc.dbullet, tol);  // ker D_bullet in the edge space
  const Mat<Scalar> t = currents.projection();
  Mat<Scalar> interior_mask = Mat<Scalar>::Zero(g.node_count(), g.node_count());
  for (Index p : bp.interior()) interior_mask(p, p) = Scalar(1);
  const Mat<Scalar> u_op = inc.d * interior_mask;
  const auto hd = hodge_decompose(t, u_op, tol);
  return OrthoDecomp<Scalar>(g.edge_count(), {hd.harmonic, hd.ran_U, hd.ran_Tstar}, tol);
}

/// The Z-problem on the edge space whose effective operator carries the
/// boundary response.
template <class Scalar>
ZProblem<Scalar> dirichlet_zproblem(const ElectricalNetwork<Scalar>& net,
                                    const BoundaryPartition& bp) {
  return ZProblem<Scalar>(dirichlet_triple<Scalar>(net.graph(), bp), net.sigma(), net.tol());
}

/// Boundary response map computed through the Z-problem route: the lift of
/// boundary data into U (solving the identity-conductivity boundary-value
/// problem) conjugates the effective operator back to boundary functions.
template <class Scalar>
Mat<Scalar> dtn_zproblem(const ElectricalNetwork<Scalar>& net, const BoundaryPartition& bp) {
  const Digraph& g = net.graph();
  if (!is_connected(g))
    throw ConnectivityError("dtn_zproblem: the lift operator needs a connected graph");

  const auto zp = dirichlet_zproblem(net, bp);
  const auto eff = effective_operator(zp);

  const auto inc = incidence<Scalar>(g);
  const Mat<Scalar> ki = inc.d.adjoint() * inc.d;
  const auto& b = bp.boundary();
  const auto& in = bp.interior();
  const Mat<Scalar> kii = detail::submatrix(ki, in, in);
  const Mat<Scalar> kib = detail::submatrix(ki, in, b);
  const Eigen::LDLT<Mat<Scalar>> interior_solver(kii);
  if (interior_solver.info() != Eigen::Success)
    throw NumericalError("dtn_zproblem: interior solve failed");

  const Index nb = static_cast<Index>(b.size());
  Mat<Scalar> lift = Mat<Scalar>::Zero(zp.u_space().dim(), nb);
  for (Index col = 0; col < nb; ++col) {
    Vec<Scalar> f = Vec<Scalar>::Zero(nb);
    f(col) = Scalar(1);
    const Vec<Scalar> interior_values = interior_solver.solve(Vec<Scalar>(-(kib * f)));
    Vec<Scalar> u = Vec<Scalar>::Zero(g.node_count());
    for (std::size_t i = 0; i < b.size(); ++i) u(b[i]) = f(static_cast<Index>(i));
    for (std::size_t i = 0; i < in.size(); ++i) u(in[i]) = interior_values(static_cast<Index>(i));
    lift.col(col) = zp.u_space().coords(Vec<Scalar>(inc.d * u));
  }
  return lift.adjoint() * eff.matrix * lift;
}

/// Scalar relating injected current to the potential drop between p and q,
/// obtained as the 1x1 effective operator of the node-space Z-problem with
/// operator K_sigma and the splitting span{delta_p} + rest + span{delta_q}.
template <class Scalar>
Scalar effective_conductivity(const ElectricalNetwork<Scalar>& net, Index p, Index q) {
  const Index n = net.graph().node_count();
  if (p == q) throw DimensionError("effective_conductivity: p and q must be distinct");
  if (p < 0 || p >= n || q < 0 || q >= n)
    throw DimensionError("effective_conductivity: node out of range");

  Mat<Scalar> bu = Mat<Scalar>::Zero(n, 1);
  bu(p, 0) = Scalar(1);
  Mat<Scalar> bj = Mat<Scalar>::Zero(n, 1);
  bj(q, 0) = Scalar(1);
  Mat<Scalar> be = Mat<Scalar>::Zero(n, n - 2);
  Index col = 0;
  for (Index x = 0; x < n; ++x)
    if (x != p && x != q) be(x, col++) = Scalar(1);

  const OrthoDecomp<Scalar> decomp(
      n, {Subspace<Scalar>::from_orthonormal(std::move(bu)),
          Subspace<Scalar>::from_orthonormal(std::move(be)),
          Subspace<Scalar>::from_orthonormal(std::move(bj))},
      net.tol());
  const ZProblem<Scalar> zp(decomp, kirchhoff(net), net.tol());
  return effective_operator(zp).matrix(0, 0);
}

/// 1 / sigma_eff with an infinity sentinel at zero.
inline double effective_resistance_from(double sigma_eff, const Tolerances& tol = {}) {
  if (std::abs(sigma_eff) <= tol.eq_atol) return std::numeric_limits<double>::infinity();
  return 1.0 / sigma_eff;
}

template <class Scalar>
struct EffcondZeroReport {
  bool is_zero = false;
  bool distinct_components = false;
  Vec<Scalar> witness_potential;  // set when is_zero
  Index intersection_dim = 0;     // dim(ran D inter ker sigma)
};

/// Searches ran D inter ker sigma for a gradient field separating p and q;
/// such a field exists exactly when the effective conductivity vanishes.
template <class Scalar>
EffcondZeroReport<Scalar> effcond_zero_test(const ElectricalNetwork<Scalar>& net, Index p,
                                            Index q) {
  if (p == q) throw DimensionError("effcond_zero_test: p and q must be distinct");
  const Digraph& g = net.graph();
  const auto inc = incidence<Scalar>(g);
  const auto labels = component_labels(g);

  EffcondZeroReport<Scalar> out;
  const auto meet = intersection(range_of(inc.d, net.tol()), kernel(net.sigma(), net.tol()),
                                 net.tol());
  out.intersection_dim = meet.dim();

  if (labels[p] != labels[q]) {
    out.is_zero = true;
    out.distinct_components = true;
    Vec<Scalar> chi = Vec<Scalar>::Zero(g.node_count());
    for (Index x = 0; x < g.node_count(); ++x)
      if (labels[x] == labels[p]) chi(x) = Scalar(1);
    out.witness_potential = chi;
    return out;
  }

  const Mat<Scalar> dp = pinv(inc.d, net.tol());
  double best = 0.0;
  for (Index i = 0; i < meet.dim(); ++i) {
    const Vec<Scalar> u = dp * meet.basis().col(i);
    const double drop = std::abs(u(p) - u(q));
    if (drop > best) {
      best = drop;
      out.witness_potential = u;
    }
  }
  out.is_zero = best > net.tol().eq_atol;
  return out;
}

template <class Scalar>
struct DtnEffcondRelation {
  bool holds = false;
  Mat<Scalar> lhs;  // boundary response with boundary {p, q}
  Mat<Scalar> rhs;  // sigma_eff times the rank-one coupling of delta_p - delta_q
  double residual = 0.0;
};

/// The boundary response for boundary {p, q} is the rank-one operator
/// sigma_eff ((delta_p - delta_q)|, .) (delta_p - delta_q)|.
template <class Scalar>
DtnEffcondRelation<Scalar> dtn_effcond_relation(const ElectricalNetwork<Scalar>& net, Index p,
                                                Index q) {
  if (p == q) throw DimensionError("dtn_effcond_relation: p and q must be distinct");
  if (net.graph().node_count() <= 2)
    throw DimensionError("dtn_effcond_relation: needs a nonempty interior");
  const BoundaryPartition bp(net.graph().node_count(), {p, q});
  DtnEffcondRelation<Scalar> out;
  out.lhs = dtn_schur(net, bp);
  const Scalar eff = effective_conductivity(net, p, q);
  Mat<Scalar> coupling(2, 2);
  coupling << Scalar(1), Scalar(-1), Scalar(-1), Scalar(1);
  out.rhs = eff * coupling;
  out.residual = max_abs_diff<Scalar>(out.lhs, out.rhs);
  out.holds = out.residual <= net.tol().eq_atol * std::max(1.0, out.lhs.norm());
  return out;
}

}  // namespace zeff

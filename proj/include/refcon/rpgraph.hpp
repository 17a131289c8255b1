#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "refcon/dataset.hpp"
#include "refcon/matrix.hpp"

namespace refcon {

// Relative tolerance for comparing an edge weight against 1.
inline constexpr double kTauEq = 1e-9;

// Complete weighted digraph over countries. weights(m, n) is the quantity
// of n valued at m's prices relative to m's own expenditure.
struct RPGraph {
  std::vector<std::string> ids;
  Matrix cross;                     // cross(a, b) = p_a · q_b
  Matrix weights;                   // cross(m, n) / cross(m, m), diagonal 1
  std::vector<double> expenditure;  // cross(m, m)

  std::size_t size() const { return ids.size(); }
};

RPGraph build_graph(const PooledDataset& data);

// Graph restricted to the given vertices, in that order.
RPGraph induced_subgraph(const RPGraph& g, std::span<const std::size_t> vertices);

struct ViolationCycle {
  std::vector<std::size_t> vertices;  // v0 .. v_{L-1}; the edge v_{L-1} -> v0 closes it
  std::vector<double> edge_weights;   // weight of v_l -> v_{l+1}
};

struct ConsistencyResult {
  bool satisfied = true;
  std::optional<ViolationCycle> witness;
  // CEWEC only: every (i, j) with an RP-walk i -> j and w(j, i) < 1.
  std::vector<std::pair<std::size_t, std::size_t>> violating_pairs;
};

// reach(u, v): an RP-walk (every weight <= 1) leads from u to v.
// strict(u, v): some such walk uses a weight < 1.
struct ReachabilityRelation {
  BitMatrix reach;
  BitMatrix strict;

  std::size_t size() const { return reach.size(); }
};

ReachabilityRelation reachability(const RPGraph& g);

struct RevealedSets {
  std::vector<std::size_t> vrp;  // u with reach(u, v)
  std::vector<std::size_t> vrw;  // u with reach(v, u)
};

RevealedSets vrp_vrw(const ReachabilityRelation& rel, std::size_t v);

ConsistencyResult check_cewec(const RPGraph& g);

// Vertices of a CEWEC-consistent sub-graph. The heuristic repeatedly drops
// the vertex involved in the most violating pairs (ties: the one listed
// last). exact = true enumerates subsets and requires n <= 15.
std::vector<std::size_t> max_reference_set(const RPGraph& g, bool exact = false);

// Every cycle's weight product is at least 1.
ConsistencyResult check_harp(const RPGraph& g);

// Share of the cycle's total expenditure that an arbitrageur could extract.
// Throws DomainError unless the cycle is a CEWEC violation in g.
double money_pump_index(const RPGraph& g, const ViolationCycle& cycle);

struct HomotheticCandidate {
  std::vector<std::size_t> members;  // ascending
  std::size_t seed = 0;
  double share = 0.0;  // (output share + population share) / 2
};

HomotheticCandidate greedy_homothetic_refset(const PooledDataset& data);

// Incrementally maintained all-pairs minimum of log weight products over a
// growing vertex set. add() refuses a vertex that would close a cycle with
// product below 1.
class LogPathClosure {
 public:
  explicit LogPathClosure(const Matrix& log_weights);

  bool add(std::size_t v);
  const std::vector<std::size_t>& members() const { return members_; }
  // Minimum log product over walks between members a and b (positions).
  double at(std::size_t a, std::size_t b) const { return dist_(a, b); }

 private:
  const Matrix& lw_;
  std::vector<std::size_t> members_;
  Matrix dist_;
};

}  // namespace refcon

#include "refcon/rpgraph.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <deque>
#include <limits>
#include <numeric>

#include "refcon/error.hpp"
#include "refcon/kernels.hpp"
#include "refcon/parallel.hpp"

namespace refcon {
namespace {

bool weak_edge(double w) { return w <= 1.0 + kTauEq; }
bool strict_edge(double w) { return w < 1.0 - kTauEq; }

BitMatrix direct_relation(const RPGraph& g) {
  const std::size_t n = g.size();
  BitMatrix d(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j || weak_edge(g.weights(i, j))) d.set(i, j);
    }
  }
  return d;
}

// One boolean product step: out(i) = OR over k in a(i) of b(k).
BitMatrix bool_product(const BitMatrix& a, const BitMatrix& b) {
  const std::size_t n = a.size();
  BitMatrix out(n);
  const auto& k = kernels::active();
  for (std::size_t i = 0; i < n; ++i) {
    auto dst = out.row(i);
    const auto ai = a.row(i);
    for (std::size_t w = 0; w < ai.size(); ++w) {
      std::uint64_t bits = ai[w];
      while (bits != 0) {
        const std::size_t c = w * 64 + static_cast<std::size_t>(std::countr_zero(bits));
        bits &= bits - 1;
        k.or_row(b.row(c).data(), dst.data(), dst.size());
      }
    }
  }
  return out;
}

// Reflexive-transitive closure by repeated squaring.
BitMatrix closure(BitMatrix r) {
  for (;;) {
    BitMatrix sq = bool_product(r, r);
    if (sq == r) return r;
    r = std::move(sq);
  }
}

// Shortest edge path from -> to using weak edges, by BFS.
std::vector<std::size_t> weak_path(const RPGraph& g, std::size_t from, std::size_t to) {
  const std::size_t n = g.size();
  constexpr std::size_t none = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> parent(n, none);
  std::deque<std::size_t> queue{from};
  parent[from] = from;
  while (!queue.empty() && parent[to] == none) {
    const std::size_t u = queue.front();
    queue.pop_front();
    for (std::size_t v = 0; v < n; ++v) {
      if (parent[v] == none && v != u && weak_edge(g.weights(u, v))) {
        parent[v] = u;
        queue.push_back(v);
      }
    }
  }
  if (parent[to] == none) throw NumericalError("closure and path search disagree");
  std::vector<std::size_t> path{to};
  while (path.back() != from) path.push_back(parent[path.back()]);
  std::reverse(path.begin(), path.end());
  return path;
}

ViolationCycle make_cycle(const RPGraph& g, std::vector<std::size_t> vertices) {
  ViolationCycle c;
  c.vertices = std::move(vertices);
  for (std::size_t l = 0; l < c.vertices.size(); ++l) {
    const std::size_t next = c.vertices[(l + 1) % c.vertices.size()];
    c.edge_weights.push_back(g.weights(c.vertices[l], next));
  }
  return c;
}

std::vector<std::pair<std::size_t, std::size_t>> violating_pairs(const RPGraph& g,
                                                                 const BitMatrix& reach) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (std::size_t i = 0; i < g.size(); ++i) {
    for (std::size_t j = 0; j < g.size(); ++j) {
      if (i != j && reach.test(i, j) && strict_edge(g.weights(j, i))) out.emplace_back(i, j);
    }
  }
  return out;
}

bool subset_is_consistent(const RPGraph& g, std::span<const std::size_t> vs) {
  const RPGraph sub = induced_subgraph(g, vs);
  return violating_pairs(sub, closure(direct_relation(sub))).empty();
}

// Witness fallback: Floyd-Warshall on log weights with successor tracking.
std::optional<ViolationCycle> negative_cycle_by_min_paths(const RPGraph& g, const Matrix& cost) {
  const std::size_t n = g.size();
  Matrix d = cost;
  std::vector<std::size_t> next(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) next[i * n + j] = j;
    d(i, i) = 0.0;
  }
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        if (d(i, k) + d(k, j) < d(i, j)) {
          d(i, j) = d(i, k) + d(k, j);
          next[i * n + j] = next[i * n + k];
        }
      }
    }
  }
  double best = 0.0;
  std::size_t bi = n, bj = n;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i != j && d(i, j) + cost(j, i) < best) {
        best = d(i, j) + cost(j, i);
        bi = i;
        bj = j;
      }
    }
  }
  if (bi == n) return std::nullopt;
  std::vector<std::size_t> cyc{bi};
  for (std::size_t u = bi; u != bj && cyc.size() <= n;) {
    u = next[u * n + bj];
    cyc.push_back(u);
  }
  return make_cycle(g, std::move(cyc));
}

}  // namespace

RPGraph build_graph(const PooledDataset& data) {
  const std::size_t n = data.size();
  RPGraph g;
  g.cross = Matrix(n, n);
  g.weights = Matrix(n, n);
  g.expenditure.resize(n);
  g.ids.reserve(n);
  for (std::size_t a = 0; a < n; ++a) {
    g.ids.push_back(data[a].id);
    for (std::size_t b = 0; b < n; ++b) {
      g.cross(a, b) = kernels::dot(data[a].prices, data[b].quantities);
    }
  }
  for (std::size_t m = 0; m < n; ++m) {
    const double mm = g.cross(m, m);
    if (!(mm > 0.0)) throw ValidationError("zero total expenditure for '" + g.ids[m] + "'");
    g.expenditure[m] = mm;
    for (std::size_t k = 0; k < n; ++k) g.weights(m, k) = g.cross(m, k) / mm;
    g.weights(m, m) = 1.0;
  }
  return g;
}

RPGraph induced_subgraph(const RPGraph& g, std::span<const std::size_t> vertices) {
  const std::size_t n = vertices.size();
  RPGraph s;
  s.cross = Matrix(n, n);
  s.weights = Matrix(n, n);
  for (std::size_t a = 0; a < n; ++a) {
    s.ids.push_back(g.ids.at(vertices[a]));
    s.expenditure.push_back(g.expenditure[vertices[a]]);
    for (std::size_t b = 0; b < n; ++b) {
      s.cross(a, b) = g.cross(vertices[a], vertices[b]);
      s.weights(a, b) = g.weights(vertices[a], vertices[b]);
    }
  }
  return s;
}

ReachabilityRelation reachability(const RPGraph& g) {
  const std::size_t n = g.size();
  ReachabilityRelation rel;
  rel.reach = closure(direct_relation(g));

  BitMatrix strict_edges(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i != j && strict_edge(g.weights(i, j))) strict_edges.set(i, j);
    }
  }
  // strict = reach · S · reach
  rel.strict = bool_product(rel.reach, bool_product(strict_edges, rel.reach));
  return rel;
}

RevealedSets vrp_vrw(const ReachabilityRelation& rel, std::size_t v) {
  if (v >= rel.size()) throw DomainError("vertex out of range");
  RevealedSets s;
  for (std::size_t u = 0; u < rel.size(); ++u) {
    if (rel.reach.test(u, v)) s.vrp.push_back(u);
    if (rel.reach.test(v, u)) s.vrw.push_back(u);
  }
  return s;
}

ConsistencyResult check_cewec(const RPGraph& g) {
  ConsistencyResult r;
  const BitMatrix reach = closure(direct_relation(g));
  r.violating_pairs = violating_pairs(g, reach);
  r.satisfied = r.violating_pairs.empty();
  if (!r.satisfied) {
    const auto [i, j] = r.violating_pairs.front();
    r.witness = make_cycle(g, weak_path(g, i, j));
  }
  return r;
}

std::vector<std::size_t> max_reference_set(const RPGraph& g, bool exact) {
  const std::size_t n = g.size();
  std::vector<std::size_t> all(n);
  std::iota(all.begin(), all.end(), 0);

  if (exact) {
    if (n > 15) throw ConfigurationError("exact reference-set search is limited to 15 countries");
    // Combinations of each size in lexicographic order; the first consistent
    // one of the largest size wins.
    for (std::size_t size = n; size >= 1; --size) {
      std::vector<std::size_t> pick(size);
      std::iota(pick.begin(), pick.end(), 0);
      for (;;) {
        if (subset_is_consistent(g, pick)) return pick;
        std::size_t pos = size;
        while (pos > 0 && pick[pos - 1] == n - size + pos - 1) --pos;
        if (pos == 0) break;
        ++pick[pos - 1];
        for (std::size_t t = pos; t < size; ++t) pick[t] = pick[t - 1] + 1;
      }
    }
    return {};
  }

  std::vector<std::size_t> keep = all;
  for (;;) {
    const RPGraph sub = induced_subgraph(g, keep);
    const auto pairs = violating_pairs(sub, closure(direct_relation(sub)));
    if (pairs.empty()) return keep;
    std::vector<std::size_t> count(keep.size(), 0);
    for (const auto& [i, j] : pairs) {
      ++count[i];
      ++count[j];
    }
    std::size_t worst = 0;
    for (std::size_t v = 0; v < keep.size(); ++v) {
      if (count[v] >= count[worst]) worst = v;
    }
    keep.erase(keep.begin() + static_cast<std::ptrdiff_t>(worst));
  }
}

ConsistencyResult check_harp(const RPGraph& g) {
  const std::size_t n = g.size();
  ConsistencyResult r;
  if (n == 0) return r;
  Matrix cost(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) cost(i, j) = std::log(g.weights(i, j));
  }
  // Virtual source at distance 0 to every vertex. A relaxation in round n
  // certifies a cycle whose log product is negative.
  const double eps = kTauEq / static_cast<double>(n);
  std::vector<double> dist(n, 0.0);
  std::vector<std::size_t> pred(n, n);
  std::size_t touched = n;
  for (std::size_t round = 0; round < n; ++round) {
    touched = n;
    for (std::size_t u = 0; u < n; ++u) {
      for (std::size_t v = 0; v < n; ++v) {
        if (u == v) continue;
        const double cand = dist[u] + cost(u, v);
        if (cand < dist[v] - eps) {
          dist[v] = cand;
          pred[v] = u;
          touched = v;
        }
      }
    }
    if (touched == n) return r;
  }
  r.satisfied = false;
  // Walk back n steps to land on the cycle, then collect it.
  std::size_t v = touched;
  for (std::size_t s = 0; s < n && v != n; ++s) v = pred[v];
  if (v != n) {
    std::vector<std::size_t> cyc{v};
    for (std::size_t u = pred[v]; u != v && u != n && cyc.size() <= n; u = pred[u]) {
      cyc.push_back(u);
    }
    std::reverse(cyc.begin(), cyc.end());
    ViolationCycle c = make_cycle(g, std::move(cyc));
    double log_product = 0.0;
    for (double w : c.edge_weights) log_product += std::log(w);
    if (c.vertices.size() <= n && log_product < 0.0) {
      r.witness = std::move(c);
      return r;
    }
  }
  r.witness = negative_cycle_by_min_paths(g, cost);
  return r;
}

double money_pump_index(const RPGraph& g, const ViolationCycle& cycle) {
  const auto& vs = cycle.vertices;
  if (vs.size() < 2) throw DomainError("a money-pump cycle needs at least two countries");
  double pumped = 0.0;
  double total = 0.0;
  bool any_strict = false;
  for (std::size_t l = 0; l < vs.size(); ++l) {
    const std::size_t a = vs[l];
    const std::size_t b = vs[(l + 1) % vs.size()];
    if (a >= g.size() || b >= g.size()) throw DomainError("cycle vertex out of range");
    const double w = g.weights(a, b);
    if (!weak_edge(w)) throw DomainError("cycle contains an edge weight above 1");
    any_strict = any_strict || strict_edge(w);
    pumped += g.expenditure[a] - g.cross(a, b);
    total += g.expenditure[a];
  }
  if (!any_strict) throw DomainError("cycle is not a revealed-preference violation");
  return pumped / total;
}

LogPathClosure::LogPathClosure(const Matrix& log_weights)
    : lw_(log_weights), dist_(log_weights.rows(), log_weights.rows()) {}

bool LogPathClosure::add(std::size_t v) {
  const std::size_t m = members_.size();
  constexpr double inf = std::numeric_limits<double>::infinity();
  std::vector<double> out(m, inf);  // v -> x
  std::vector<double> in(m, inf);   // x -> v
  const auto& k = kernels::active();
  for (std::size_t y = 0; y < m; ++y) {
    k.min_plus_row(lw_(v, members_[y]), dist_.row(y).data(), out.data(), m);
  }
  for (std::size_t x = 0; x < m; ++x) {
    const auto row = dist_.row(x);
    double best = inf;
    for (std::size_t y = 0; y < m; ++y) best = std::min(best, row[y] + lw_(members_[y], v));
    in[x] = best;
  }
  for (std::size_t x = 0; x < m; ++x) {
    if (out[x] + in[x] < -kTauEq) return false;
  }
  for (std::size_t x = 0; x < m; ++x) {
    k.min_plus_row(in[x], out.data(), dist_.row(x).data(), m);
    dist_(x, m) = in[x];
    dist_(m, x) = out[x];
  }
  dist_(m, m) = 0.0;
  members_.push_back(v);
  return true;
}

HomotheticCandidate greedy_homothetic_refset(const PooledDataset& data) {
  const std::size_t n = data.size();
  if (n == 0) throw EmptyDatasetError("no countries");
  const RPGraph g = build_graph(data);
  Matrix lw(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) lw(i, j) = std::log(g.weights(i, j));
  }

  std::vector<double> norm(n);
  for (std::size_t i = 0; i < n; ++i) {
    norm[i] = std::sqrt(kernels::dot(data[i].prices, data[i].prices));
  }
  std::vector<double> pop(n), output(n);
  double pop_total = 0.0, out_total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    pop[i] = data[i].population.value_or(1.0);
    output[i] = pop[i] * data.expenditure(i);
    pop_total += pop[i];
    out_total += output[i];
  }

  std::vector<HomotheticCandidate> cands(n);
  parallel_for(n, [&](std::size_t seed) {
    std::vector<std::pair<double, std::size_t>> order;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == seed) continue;
      const double cos = kernels::dot(data[seed].prices, data[j].prices) / (norm[seed] * norm[j]);
      order.emplace_back(-cos, j);
    }
    std::sort(order.begin(), order.end());
    LogPathClosure cl(lw);
    cl.add(seed);
    for (const auto& [neg_cos, j] : order) cl.add(j);
    HomotheticCandidate c;
    c.seed = seed;
    c.members = cl.members();
    std::sort(c.members.begin(), c.members.end());
    double p = 0.0, o = 0.0;
    for (std::size_t i : c.members) {
      p += pop[i];
      o += output[i];
    }
    c.share = 0.5 * (o / out_total + p / pop_total);
    cands[seed] = std::move(c);
  });

  std::size_t best = 0;
  for (std::size_t s = 1; s < n; ++s) {
    if (cands[s].share > cands[best].share + 1e-15) best = s;
  }
  return cands[best];
}

}  // namespace refcon

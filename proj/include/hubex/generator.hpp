#pragma once

#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <stdexcept>
#include <utility>
#include <vector>

#include "hubex/graph.hpp"

namespace hubex {

struct GenConfig {
  std::size_t n = 1000;
  double degree = 8;                // average out-degree
  std::uint64_t cardinality = 100;  // target distinct (v_grp, e_grp) keys
  double cycle_fraction = 0.05;     // share of edges pointing backwards
  std::uint64_t seed = 1;
};

/// Vertex and edge group counts: C_v = ceil(sqrt(C)), C_e = ceil(C / C_v).
inline std::pair<Group, Group> split_cardinality(std::uint64_t c) {
  if (c == 0) throw std::invalid_argument("cardinality must be at least 1");
  auto cv = static_cast<std::uint64_t>(std::ceil(std::sqrt(static_cast<double>(c))));
  while (cv * cv < c) ++cv;
  while (cv > 1 && (cv - 1) * (cv - 1) >= c) --cv;
  auto ce = (c + cv - 1) / cv;
  return {static_cast<Group>(cv), static_cast<Group>(ce)};
}

/// Random graph over a shuffled topological order: each edge joins two
/// distinct uniformly chosen vertices, pointing forward in the order, or
/// backward with probability cycle_fraction.
inline AttributedGraph generate(const GenConfig& cfg) {
  if (cfg.degree < 0) throw std::invalid_argument("degree must be non-negative");
  if (cfg.cycle_fraction < 0 || cfg.cycle_fraction > 1)
    throw std::invalid_argument("cycle fraction must be within [0, 1]");
  auto [cv, ce] = split_cardinality(cfg.cardinality);
  std::mt19937_64 rng(cfg.seed);
  std::uniform_int_distribution<Group> vgrp(0, cv - 1), egrp(0, ce - 1);
  std::uniform_int_distribution<Measure> measure(1, 100);

  std::vector<Vertex> vertices(cfg.n);
  for (std::size_t i = 0; i < cfg.n; ++i) {
    vertices[i].vid = i;
    vertices[i].grp = vgrp(rng);
    vertices[i].mr = measure(rng);
  }
  std::vector<VertexId> order(cfg.n);
  std::iota(order.begin(), order.end(), VertexId{0});
  std::shuffle(order.begin(), order.end(), rng);

  std::vector<EdgeRecord> edges;
  if (cfg.n >= 2) {
    const auto m = static_cast<std::size_t>(std::llround(static_cast<double>(cfg.n) * cfg.degree));
    edges.reserve(m);
    std::uniform_int_distribution<std::size_t> pos(0, cfg.n - 1);
    std::bernoulli_distribution back(cfg.cycle_fraction);
    for (std::size_t i = 0; i < m; ++i) {
      std::size_t a = pos(rng), b = pos(rng);
      while (b == a) b = pos(rng);
      if (a > b) std::swap(a, b);
      if (back(rng)) std::swap(a, b);
      edges.push_back({order[a], order[b], egrp(rng), measure(rng), {}});
    }
  }
  return AttributedGraph(std::move(vertices), std::move(edges), false, false);
}

}  // namespace hubex

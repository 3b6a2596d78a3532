#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

#include "spe/distributions.hpp"
#include "spe/events.hpp"

namespace spe {

using NodeId = int32_t;

struct LeafNode {
  std::string var;
  Distribution dist;
  Environment env;  // first entry is var -> identity(var)
};

struct SumNode {
  std::vector<NodeId> children;
  std::vector<double> weights;  // nonnegative, positive total
};

struct ProductNode {
  std::vector<NodeId> children;  // pairwise disjoint scopes
};

struct Node {
  std::variant<LeafNode, SumNode, ProductNode> data;
  std::vector<std::string> scope;  // sorted
};

// A rooted DAG of sum/product/leaf nodes. Nodes are immutable once created;
// children always have smaller ids than their parents. With interning on,
// structurally identical nodes share one id.
class Graph {
 public:
  explicit Graph(bool interning = true) : interning_(interning) {}

  NodeId leaf(std::string var, Distribution dist, Environment env);
  NodeId sum(std::vector<NodeId> children, std::vector<double> weights);
  NodeId product(std::vector<NodeId> children);

  // Appends a node verbatim (deserialization); populates the intern index
  // without merging duplicates.
  NodeId append_raw(Node node);

  const Node& node(NodeId id) const { return nodes_.at(static_cast<size_t>(id)); }
  size_t size() const { return nodes_.size(); }
  bool interning() const { return interning_; }
  void set_interning(bool on) { interning_ = on; }

  size_t reachable_count(NodeId root) const;
  std::vector<NodeId> reachable(NodeId root) const;

 private:
  NodeId push(Node node, const std::string& key);

  std::vector<Node> nodes_;
  std::unordered_map<std::string, NodeId> intern_;
  bool interning_;
};

std::string node_key(const Node& node);

struct Violation {
  NodeId node;
  std::string condition;  // C1..C5 or "acyclic"
  std::string message;
};

std::vector<Violation> validate(const Graph& g, NodeId root);

const std::vector<std::string>& scope(const Graph& g, NodeId id);

// Per-query evaluation settings and caches.
struct QueryOptions {
  bool memoize = true;
  // Inclusion-exclusion enumerates subsets of disjunction clauses at product
  // nodes; events beyond this clause count are rejected.
  int max_ie_clauses = 20;
};

double prob(const Graph& g, NodeId root, const EventPtr& e,
            const QueryOptions& opts = {});

Density density(const Graph& g, NodeId root, const EventPtr& e,
                const QueryOptions& opts = {});

using Assignment = std::unordered_map<std::string, Outcome>;

Assignment simulate(const Graph& g, NodeId root,
                    std::span<const std::string> request, std::mt19937_64& rng);

// Deterministic uniform draw in [0, 1).
double next_uniform(std::mt19937_64& rng);

// Canonical structural key of an event, used for memoization.
std::string event_key(const EventPtr& e);

}  // namespace spe

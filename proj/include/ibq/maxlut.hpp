#pragma once

// Mutual-information-maximizing lookup tables for two-input factor-graph
// nodes over binary code symbols, and cascades of them for higher degrees.

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "ibq/info.hpp"

namespace ibq {

enum class NodeFunction { CheckXor, VariableEqual };

/// p(m|x) for a binary code symbol x: two rows, one per symbol value.
class MessageDist {
 public:
  MessageDist() = default;
  explicit MessageDist(ConditionalDist cond);

  /// Hard-decision message with crossover eps (labels 0 = "x is 0").
  static MessageDist binary_symmetric(double eps);
  /// Message that carries no information: a single label.
  static MessageDist uninformative();

  const ConditionalDist& cond() const { return cond_; }
  std::size_t size() const { return cond_.cols(); }
  double operator()(std::size_t x, std::size_t m) const { return cond_(x, m); }
  /// Joint with a uniform code symbol, p(x, m) = p(m|x) / 2.
  JointXY joint() const;
  /// I(X;M) under a uniform code symbol.
  double information() const;

 private:
  ConditionalDist cond_;
};

/// p((l,z)|x3) over the product alphabet, outcome index l * |Z| + z.
/// For CheckXor the pair (x1, x2) is uniform over the two solutions of
/// x1 xor x2 = x3.
ConditionalDist node_joint(NodeFunction f, const MessageDist& a, const MessageDist& b);

/// Two-input table v = table[l * in_right + z].
struct NodeLut {
  std::size_t in_left = 0;
  std::size_t in_right = 0;
  std::size_t out_size = 0;
  std::vector<std::uint16_t> table;
  MessageDist out;             // p(v|x3)
  double relevant_info = 0.0;  // I(V;X3)
  double input_info = 0.0;     // I((L,Z);X3)

  int operator()(int l, int z) const { return table[static_cast<std::size_t>(l) * in_right + z]; }
};

/// Globally optimal table of the given output size. Output labels are sorted
/// by descending LLR of x3.
NodeLut build_max_lut(NodeFunction f, const MessageDist& a, const MessageDist& b, int out_size);

enum class Schedule { LeftFold, BalancedTree };

/// One two-input stage. Slots 0..k-1 are the chain inputs; stage s writes
/// slot k + s. A right slot of -1 feeds the constant label 0 (used for a
/// lone input that only needs requantizing).
struct LutStage {
  NodeLut lut;
  int left = 0;
  int right = 0;
};

struct LutChain {
  std::size_t num_inputs = 0;
  std::vector<LutStage> stages;
  int output_slot = 0;
  MessageDist output;

  /// Integer evaluation: labels holds one label per input.
  int evaluate(std::span<const int> labels) const;
};

/// Combines d - 1 incoming messages with two-input max-LUT stages, every
/// intermediate alphabet of size out_size.
LutChain cascade_node(NodeFunction f, std::span<const MessageDist> inputs, int out_size,
                      Schedule schedule);

/// "lut L Z V", L rows of Z labels, then the two rows of p(v|x3).
void write_lut(std::ostream& os, const NodeLut& lut);
NodeLut read_lut(std::istream& is);

}  // namespace ibq

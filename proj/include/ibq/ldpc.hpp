#pragma once

// Sparse binary parity-check codes: regular construction and a systematic
// GF(2) encoder.

#include <cstdint>
#include <span>
#include <vector>

namespace ibq {

/// Parity-check matrix stored as adjacency lists. Edges are numbered
/// check-major: the edges of check c are check_offset(c) .. check_offset(c+1)-1
/// in the order of checks()[c].
class LdpcCode {
 public:
  LdpcCode() = default;
  /// General sparse code: one list of variable indices per check.
  LdpcCode(std::size_t num_vars, std::vector<std::vector<int>> checks);

  std::size_t n() const { return num_vars_; }
  std::size_t m() const { return checks_.size(); }
  std::size_t num_edges() const { return edge_var_.size(); }
  const std::vector<std::vector<int>>& checks() const { return checks_; }
  const std::vector<std::vector<int>>& var_checks() const { return var_checks_; }
  /// Edge ids incident to each variable, in increasing check order.
  const std::vector<std::vector<int>>& var_edges() const { return var_edges_; }
  int check_offset(std::size_t c) const { return check_offset_[c]; }
  int edge_var(std::size_t e) const { return edge_var_[e]; }

  /// Degree if every variable (check) has the same degree, else 0.
  int var_degree() const;
  int check_degree() const;
  /// 1 - m/n.
  double design_rate() const { return 1.0 - static_cast<double>(m()) / static_cast<double>(n()); }

  bool satisfies(std::span<const std::uint8_t> bits) const;
  /// Number of length-4 cycles in the Tanner graph.
  long long four_cycles() const;

  friend bool operator==(const LdpcCode& a, const LdpcCode& b) {
    return a.num_vars_ == b.num_vars_ && a.checks_ == b.checks_;
  }

 private:
  std::size_t num_vars_ = 0;
  std::vector<std::vector<int>> checks_;
  std::vector<std::vector<int>> var_checks_;
  std::vector<std::vector<int>> var_edges_;
  std::vector<int> check_offset_;
  std::vector<int> edge_var_;
};

/// (dv, dc)-regular code from a random socket permutation. Duplicate edges
/// are always repaired; 4-cycles are removed where local swaps allow
/// (check four_cycles() for what is left). Deterministic given the seed.
LdpcCode construct_regular_ldpc(int n, int dv, int dc, std::uint64_t seed);

/// Systematic encoder from the reduced row-echelon form of H over GF(2).
/// A rank-deficient H simply yields a larger code: k = n - rank.
class LdpcEncoder {
 public:
  explicit LdpcEncoder(const LdpcCode& code);

  std::size_t n() const { return n_; }
  std::size_t k() const { return free_cols_.size(); }
  std::size_t rank() const { return pivot_cols_.size(); }
  /// Message bits go to the free columns in increasing order.
  std::vector<std::uint8_t> encode(std::span<const std::uint8_t> info) const;

 private:
  std::size_t n_ = 0;
  std::size_t words_ = 0;
  std::vector<std::uint64_t> rows_;  // rank() rows of the reduced matrix
  std::vector<int> pivot_cols_;
  std::vector<int> free_cols_;
};

}  // namespace ibq

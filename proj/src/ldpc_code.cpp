#include "ibq/ldpc.hpp"

#include <algorithm>
#include <bit>
#include <map>
#include <stdexcept>
#include <utility>

#include "ibq/rng.hpp"

namespace ibq {

LdpcCode::LdpcCode(std::size_t num_vars, std::vector<std::vector<int>> checks)
    : num_vars_(num_vars), checks_(std::move(checks)) {
  if (num_vars_ == 0) throw std::invalid_argument("code has no variables");
  var_checks_.assign(num_vars_, {});
  var_edges_.assign(num_vars_, {});
  check_offset_.assign(checks_.size() + 1, 0);
  for (std::size_t c = 0; c < checks_.size(); ++c) {
    const auto& row = checks_[c];
    if (row.empty()) throw std::invalid_argument("check with no variables");
    for (std::size_t k = 0; k < row.size(); ++k) {
      const int v = row[k];
      if (v < 0 || static_cast<std::size_t>(v) >= num_vars_) {
        throw std::invalid_argument("check refers to a variable out of range");
      }
      if (std::count(row.begin(), row.end(), v) > 1) throw std::invalid_argument("duplicate edge");
      var_checks_[v].push_back(static_cast<int>(c));
      var_edges_[v].push_back(static_cast<int>(edge_var_.size()));
      edge_var_.push_back(v);
    }
    check_offset_[c + 1] = static_cast<int>(edge_var_.size());
  }
}

int LdpcCode::var_degree() const {
  const std::size_t d = var_checks_.front().size();
  for (const auto& vc : var_checks_) {
    if (vc.size() != d) return 0;
  }
  return static_cast<int>(d);
}

int LdpcCode::check_degree() const {
  if (checks_.empty()) return 0;
  const std::size_t d = checks_.front().size();
  for (const auto& row : checks_) {
    if (row.size() != d) return 0;
  }
  return static_cast<int>(d);
}

bool LdpcCode::satisfies(std::span<const std::uint8_t> bits) const {
  if (bits.size() != num_vars_) throw std::invalid_argument("word length does not match the code");
  for (const auto& row : checks_) {
    unsigned parity = 0;
    for (int v : row) parity ^= bits[v];
    if (parity & 1U) return false;
  }
  return true;
}

long long LdpcCode::four_cycles() const {
  std::map<std::pair<int, int>, long long> shared;
  for (const auto& vc : var_checks_) {
    for (std::size_t a = 0; a < vc.size(); ++a) {
      for (std::size_t b = a + 1; b < vc.size(); ++b) ++shared[{std::min(vc[a], vc[b]), std::max(vc[a], vc[b])}];
    }
  }
  long long total = 0;
  for (const auto& [pair, k] : shared) total += k * (k - 1) / 2;
  return total;
}

namespace {

std::size_t bounded(std::mt19937_64& rng, std::size_t n) {
  return static_cast<std::size_t>(rng() % n);  // bias is negligible for n << 2^64
}

/// Mutable Tanner graph used during construction; edge e belongs to check e / dc.
class SocketGraph {
 public:
  SocketGraph(int n, int dv, int dc, std::mt19937_64& rng)
      : dc_(dc), m_(n * dv / dc), edge_var_(static_cast<std::size_t>(n) * dv), var_checks_(n), scratch_(m_, 0) {
    for (std::size_t s = 0; s < edge_var_.size(); ++s) edge_var_[s] = static_cast<int>(s) / dv;
    for (std::size_t i = edge_var_.size(); i > 1; --i) std::swap(edge_var_[i - 1], edge_var_[bounded(rng, i)]);
    for (std::size_t e = 0; e < edge_var_.size(); ++e) var_checks_[edge_var_[e]].push_back(check_of(e));
  }

  std::size_t num_edges() const { return edge_var_.size(); }
  int check_of(std::size_t e) const { return static_cast<int>(e) / dc_; }
  int var_of(std::size_t e) const { return edge_var_[e]; }

  int multiplicity(int c, int v) const {
    int k = 0;
    for (int i = c * dc_; i < (c + 1) * dc_; ++i) k += edge_var_[i] == v;
    return k;
  }

  void swap_vars(std::size_t e, std::size_t f) {
    const int c = check_of(e), d = check_of(f);
    const int v = edge_var_[e], w = edge_var_[f];
    auto& vc = var_checks_[v];
    *std::find(vc.begin(), vc.end(), c) = d;
    auto& wc = var_checks_[w];
    *std::find(wc.begin(), wc.end(), d) = c;
    std::swap(edge_var_[e], edge_var_[f]);
  }

  /// 4-cycles through check c, minus those shared with check `except`
  /// (counted separately so a pair is not double counted).
  long long cycles_at(int c, int except) {
    touched_.clear();
    for (int i = c * dc_; i < (c + 1) * dc_; ++i) {
      for (int other : var_checks_[edge_var_[i]]) {
        if (other == c) continue;
        if (scratch_[other]++ == 0) touched_.push_back(other);
      }
    }
    long long total = 0;
    for (int other : touched_) {
      const long long k = scratch_[other];
      if (other != except) total += k * (k - 1) / 2;
      scratch_[other] = 0;
    }
    return total;
  }

  long long pair_cycles(int c, int d) const {
    long long k = 0;
    for (int i = c * dc_; i < (c + 1) * dc_; ++i) {
      for (int j = d * dc_; j < (d + 1) * dc_; ++j) k += edge_var_[i] == edge_var_[j];
    }
    return k * (k - 1) / 2;
  }

  long long local_cost(int c, int d) { return cycles_at(c, d) + cycles_at(d, c) + pair_cycles(c, d); }

  /// Whether swapping the variables of e and f leaves both checks free of
  /// duplicate edges.
  bool swap_keeps_simple(std::size_t e, std::size_t f) const {
    const int c = check_of(e), d = check_of(f);
    if (c == d) return false;
    return multiplicity(c, edge_var_[f]) == 0 && multiplicity(d, edge_var_[e]) == 0;
  }

  std::vector<std::vector<int>> rows() const {
    std::vector<std::vector<int>> out(m_);
    for (int c = 0; c < m_; ++c) {
      out[c].assign(edge_var_.begin() + c * dc_, edge_var_.begin() + (c + 1) * dc_);
      std::sort(out[c].begin(), out[c].end());
    }
    return out;
  }

  int num_checks() const { return m_; }

 private:
  int dc_;
  int m_;
  std::vector<int> edge_var_;
  std::vector<std::vector<int>> var_checks_;
  std::vector<int> scratch_;
  std::vector<int> touched_;
};

}  // namespace

LdpcCode construct_regular_ldpc(int n, int dv, int dc, std::uint64_t seed) {
  if (n < 1 || dv < 1 || dc < 1) throw std::invalid_argument("code parameters must be positive");
  if ((static_cast<long long>(n) * dv) % dc != 0) throw std::invalid_argument("n * dv must be divisible by dc");
  if (dc > n) throw std::invalid_argument("check degree exceeds code length");
  auto rng = stream_rng(seed, 0x1d9c);
  SocketGraph g(n, dv, dc, rng);
  const std::size_t edges = g.num_edges();
  constexpr int kAttempts = 200;

  // Duplicate edges: move the second copy elsewhere.
  for (std::size_t e = 0; e < edges; ++e) {
    int tries = 0;
    while (g.multiplicity(g.check_of(e), g.var_of(e)) > 1) {
      if (++tries > 100 * kAttempts) throw std::runtime_error("could not remove duplicate edges");
      const std::size_t f = bounded(rng, edges);
      if (g.swap_keeps_simple(e, f)) g.swap_vars(e, f);
    }
  }

  // 4-cycles: accept swaps that strictly reduce the local count.
  for (int pass = 0; pass < 50; ++pass) {
    bool improved = false;
    bool any = false;
    for (std::size_t e = 0; e < edges; ++e) {
      const int c = g.check_of(e);
      if (g.cycles_at(c, -1) == 0) continue;
      any = true;
      for (int t = 0; t < kAttempts; ++t) {
        const std::size_t f = bounded(rng, edges);
        if (!g.swap_keeps_simple(e, f)) continue;
        const int d = g.check_of(f);
        const long long before = g.local_cost(c, d);
        g.swap_vars(e, f);
        if (g.local_cost(c, d) < before) {
          improved = true;
          break;
        }
        g.swap_vars(e, f);
      }
    }
    if (!any || !improved) break;
  }
  return LdpcCode(static_cast<std::size_t>(n), g.rows());
}

LdpcEncoder::LdpcEncoder(const LdpcCode& code) : n_(code.n()), words_((code.n() + 63) / 64) {
  std::vector<std::uint64_t> h(code.m() * words_, 0);
  for (std::size_t c = 0; c < code.m(); ++c) {
    for (int v : code.checks()[c]) h[c * words_ + v / 64] ^= std::uint64_t{1} << (v % 64);
  }
  std::size_t rank = 0;
  std::vector<bool> is_pivot(n_, false);
  for (std::size_t col = 0; col < n_ && rank < code.m(); ++col) {
    const std::size_t w = col / 64;
    const std::uint64_t bit = std::uint64_t{1} << (col % 64);
    std::size_t r = rank;
    while (r < code.m() && !(h[r * words_ + w] & bit)) ++r;
    if (r == code.m()) continue;
    if (r != rank) {
      std::swap_ranges(h.begin() + r * words_, h.begin() + (r + 1) * words_, h.begin() + rank * words_);
    }
    for (std::size_t o = 0; o < code.m(); ++o) {
      if (o != rank && (h[o * words_ + w] & bit)) {
        for (std::size_t k = 0; k < words_; ++k) h[o * words_ + k] ^= h[rank * words_ + k];
      }
    }
    pivot_cols_.push_back(static_cast<int>(col));
    is_pivot[col] = true;
    ++rank;
  }
  rows_.assign(h.begin(), h.begin() + rank * words_);
  for (std::size_t col = 0; col < n_; ++col) {
    if (!is_pivot[col]) free_cols_.push_back(static_cast<int>(col));
  }
}

std::vector<std::uint8_t> LdpcEncoder::encode(std::span<const std::uint8_t> info) const {
  if (info.size() != k()) throw std::invalid_argument("message length does not match the code dimension");
  std::vector<std::uint8_t> word(n_, 0);
  std::vector<std::uint64_t> free_bits(words_, 0);
  for (std::size_t i = 0; i < info.size(); ++i) {
    const int col = free_cols_[i];
    word[col] = info[i] & 1U;
    if (word[col]) free_bits[col / 64] |= std::uint64_t{1} << (col % 64);
  }
  for (std::size_t r = 0; r < rank(); ++r) {
    int parity = 0;
    for (std::size_t k = 0; k < words_; ++k) parity ^= std::popcount(rows_[r * words_ + k] & free_bits[k]) & 1;
    word[pivot_cols_[r]] = static_cast<std::uint8_t>(parity);
  }
  return word;
}

}  // namespace ibq

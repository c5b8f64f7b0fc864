#pragma once

// Quantizer design by the Information Bottleneck family: iterative IB,
// agglomerative IB, KL-means (modified Lloyd), and the optimal dynamic
// programme for binary relevance variables.

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "ibq/info.hpp"

namespace ibq {

/// A designed quantizer together with its induced statistics.
struct IbDesign {
  Quantizer quantizer;
  /// Trade-off multiplier; +infinity for the algorithms that ignore it.
  double beta = std::numeric_limits<double>::infinity();
  Pmf cluster_prior;                  // p(z)
  ConditionalDist cluster_posteriors; // p(x|z), |Z| rows; dead clusters carry p(x)
  double compression_rate = 0.0;      // I(y;z)
  double relevant_info = 0.0;         // I(x;z)
  double info_loss = 0.0;             // I(x;y) - I(x;z)
  double objective = 0.0;             // [I(y;z) - beta I(x;z)] / (beta + 1)

  // Run diagnostics.
  int sweeps = 0;
  bool converged = true;
  double fixed_point_residual = 0.0;  // iterative IB only
  std::vector<double> objective_trace;
  int occupied_clusters = 0;
};

/// [I(y;z) - beta I(x;z)] / (beta + 1); the beta -> infinity limit -I(x;z)
/// is returned for infinite beta.
double ib_objective(const JointXY& joint, const Quantizer& q, double beta);

/// Fills every derived field of an IbDesign from a joint and a quantizer.
IbDesign evaluate_design(const JointXY& joint, const Quantizer& q, double beta);

struct IterativeIbOptions {
  int max_sweeps = 500;
  /// Stop once the objective decreases by less than this between sweeps...
  double tol = 1e-10;
  /// ...and no mapping entry moved by more than this.
  double mapping_tol = 1e-9;
  /// Continuation: when below 1, first converge at beta * anneal_start and
  /// multiply beta by anneal_factor until the target is reached. Each stage
  /// starts from the previous stage's mapping. max_sweeps applies per stage.
  double anneal_start = 1.0;
  double anneal_factor = 2.0;
};

/// Iterative IB from an explicit initial mapping (|Y| x n).
IbDesign iterative_ib(const JointXY& joint, int num_clusters, double beta, const Quantizer& init,
                      const IterativeIbOptions& options = {});

/// Iterative IB from a random stochastic mapping drawn from `seed`.
IbDesign iterative_ib(const JointXY& joint, int num_clusters, double beta, std::uint64_t seed,
                      const IterativeIbOptions& options = {});

/// Residual max |p(z|y) - update(p(z|y))| of the stationary-point equation.
double iterative_ib_residual(const JointXY& joint, const Quantizer& q, double beta);

/// Greedy pairwise merging from the identity partition down to n clusters,
/// always merging the pair with the smallest information-loss increase.
IbDesign agglomerative_ib(const JointXY& joint, int num_clusters);

struct KlMeansOptions {
  int max_sweeps = 500;
};

/// Modified Lloyd iteration with cost D(p(x|y) || p(x|z)) + lambda * l(z),
/// l(z) = -log2 p(z). lambda = 0 is plain KL-means.
IbDesign kl_means_ib(const JointXY& joint, int num_clusters, double lambda, std::uint64_t seed,
                     const KlMeansOptions& options = {});

/// Best deterministic quantizer among partitions that are contiguous in the
/// given symbol order (a permutation of 0..|Y|-1). Works for any |X|.
IbDesign dp_contiguous_quantizer(const JointXY& joint, int num_clusters,
                                 std::span<const std::size_t> order);

/// Globally optimal deterministic quantizer for binary x: contiguous DP in
/// descending-LLR order. Labels are ordered by descending LLR.
IbDesign dp_optimal_quantizer(const JointXY& joint, int num_clusters);

/// DynamicProgramming is dp_optimal_quantizer for binary x and the contiguous
/// DP in output-symbol order otherwise.
enum class IbAlgorithm { IterativeIb, AgglomerativeIb, KlMeans, DynamicProgramming };

IbAlgorithm parse_algorithm(const std::string& tag);
std::string algorithm_tag(IbAlgorithm alg);

struct CurvePoint {
  int n = 0;
  double info_loss = 0.0;
  double compression_rate = 0.0;
  double objective = 0.0;
  IbDesign design;
};

struct CurveOptions {
  double beta = 400.0;          // iterative IB
  double lambda = 0.0;          // KL-means
  int restarts = 100;
  std::uint64_t seed = 1;
  IterativeIbOptions it_ib{.anneal_start = 0.25};
  KlMeansOptions kl_means{};
};

/// Best-of-restarts design for one cluster count. Restart r uses the stream
/// derived from (seed, r); ties keep the lowest restart index.
IbDesign best_design(const JointXY& joint, IbAlgorithm alg, int num_clusters,
                     const CurveOptions& options);

/// Information loss / compression rate over several cluster counts.
std::vector<CurvePoint> ib_curve(const JointXY& joint, IbAlgorithm alg,
                                 std::span<const int> n_values, const CurveOptions& options);

/// CSV with header
/// "algorithm,beta,n,restarts,info_loss_bits,compression_rate_bits,objective".
void write_curve_csv(std::ostream& os, IbAlgorithm alg, const CurveOptions& options,
                     std::span<const CurvePoint> points);

}  // namespace ibq

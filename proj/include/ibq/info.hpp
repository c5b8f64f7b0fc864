#pragma once

// Finite-alphabet probability containers and information measures.
// All logarithms are base 2; every information quantity is in bits.

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace ibq {

/// Raised when an algorithm hits a numerical dead end (all-zero joint,
/// NaN propagation and the like). Argument errors use std::invalid_argument.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Entries below this are treated as exact zeros when testing absolute
/// continuity in kl_divergence.
inline constexpr double kZeroProbability = 1e-15;

/// Finite probability mass function over symbols 0..size()-1.
///
/// Construction normalizes inputs whose sum is within 1e-6 of one and
/// rejects anything further off, or any negative entry.
class Pmf {
 public:
  Pmf() = default;
  explicit Pmf(std::vector<double> probs);

  static Pmf uniform(std::size_t size);
  static Pmf point_mass(std::size_t size, std::size_t symbol);

  std::size_t size() const { return probs_.size(); }
  double operator[](std::size_t i) const { return probs_[i]; }
  std::span<const double> probs() const { return probs_; }

  friend bool operator==(const Pmf&, const Pmf&) = default;

 private:
  std::vector<double> probs_;
};

/// Row-major matrix of non-negative reals. Shared storage for the joint and
/// conditional distribution types below.
class ProbMatrix {
 public:
  ProbMatrix() = default;
  ProbMatrix(std::size_t rows, std::size_t cols, std::vector<double> data);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
  std::span<const double> row(std::size_t r) const {
    return {data_.data() + r * cols_, cols_};
  }
  std::span<const double> data() const { return data_; }

  friend bool operator==(const ProbMatrix&, const ProbMatrix&) = default;

 protected:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// Conditional distribution p(b|a): one row per conditioning symbol a, each
/// row a valid Pmf (same normalization rule as Pmf).
class ConditionalDist : public ProbMatrix {
 public:
  ConditionalDist() = default;
  ConditionalDist(std::size_t rows, std::size_t cols, std::vector<double> data);
  static ConditionalDist from_rows(const std::vector<std::vector<double>>& rows);
  static ConditionalDist identity(std::size_t size);

  Pmf row_pmf(std::size_t r) const { return Pmf({row(r).begin(), row(r).end()}); }
};

/// Joint distribution p(x,y); rows are source symbols x, columns observations y.
class JointXY : public ProbMatrix {
 public:
  JointXY() = default;
  JointXY(std::size_t num_x, std::size_t num_y, std::vector<double> data);

  /// p(x,y) = p(x) p(y|x).
  static JointXY from_channel(const Pmf& prior, const ConditionalDist& channel);

  std::size_t num_x() const { return rows_; }
  std::size_t num_y() const { return cols_; }
  Pmf x_marginal() const;
  Pmf y_marginal() const;
};

/// Quantizer p(z|y): |Y| rows, |Z| columns.
class Quantizer {
 public:
  Quantizer() = default;
  explicit Quantizer(ConditionalDist mapping);

  /// Deterministic partition: symbol y goes to cluster labels[y].
  static Quantizer from_labels(std::span<const int> labels, std::size_t num_clusters);
  static Quantizer identity(std::size_t size);

  const ConditionalDist& mapping() const { return mapping_; }
  std::size_t num_inputs() const { return mapping_.rows(); }
  std::size_t num_clusters() const { return mapping_.cols(); }
  bool deterministic() const { return deterministic_; }

  /// Cluster label of every input symbol; throws unless deterministic().
  std::vector<int> labels() const;

  friend bool operator==(const Quantizer&, const Quantizer&) = default;

 private:
  ConditionalDist mapping_;
  bool deterministic_ = false;
};

double entropy(const Pmf& p);

/// D(p||q) in bits; +infinity when p has mass where q has none.
double kl_divergence(const Pmf& p, const Pmf& q);

/// Unthresholded D(p||q) over raw spans; used inside the iterative algorithms
/// where very small but nonzero probabilities are meaningful.
double kl_bits(std::span<const double> p, std::span<const double> q);

double mutual_information(const JointXY& joint);

/// p(x,z) = sum_y p(x,y) p(z|y).
JointXY push_through_quantizer(const JointXY& joint, const Quantizer& q);

/// Posterior p(x|y) for every y, as a |Y| x |X| conditional. Columns with
/// zero marginal get the x-marginal as a placeholder.
ConditionalDist posteriors_x_given_y(const JointXY& joint);

/// Expected KL distortion E_{y,z}[ D(p(x|y) || p(x|z)) ], with p(x|z) the
/// cluster posterior induced by q. Equals I(X;Y) - I(X;Z).
double avg_kl_distortion(const JointXY& joint, const Quantizer& q);

/// I(Y;Z) for the joint p(y,z) = p(y) p(z|y).
double compression_rate(const Pmf& y_marginal, const Quantizer& q);

}  // namespace ibq

#include "ibq/info.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace ibq {

namespace {

constexpr double kSumTolerance = 1e-6;
constexpr double kNegativeDust = 1e-15;

void normalize_in_place(std::span<double> probs, const char* what) {
  if (probs.empty()) throw std::invalid_argument(std::string(what) + ": empty distribution");
  double sum = 0.0;
  for (double& p : probs) {
    if (!std::isfinite(p)) throw std::invalid_argument(std::string(what) + ": non-finite entry");
    if (p < 0.0) {
      if (p < -kNegativeDust) throw std::invalid_argument(std::string(what) + ": negative entry");
      p = 0.0;
    }
    sum += p;
  }
  if (std::abs(sum - 1.0) >= kSumTolerance) {
    throw std::invalid_argument(std::string(what) + ": entries sum to " + std::to_string(sum));
  }
  // Already normalized to rounding: keep the values bit for bit, so a
  // written and re-read distribution is unchanged.
  if (std::abs(sum - 1.0) < 1e-12) return;
  for (double& p : probs) p /= sum;
}

}  // namespace

Pmf::Pmf(std::vector<double> probs) : probs_(std::move(probs)) {
  normalize_in_place(probs_, "Pmf");
}

Pmf Pmf::uniform(std::size_t size) {
  if (size == 0) throw std::invalid_argument("Pmf::uniform: empty alphabet");
  return Pmf(std::vector<double>(size, 1.0 / static_cast<double>(size)));
}

Pmf Pmf::point_mass(std::size_t size, std::size_t symbol) {
  if (symbol >= size) throw std::invalid_argument("Pmf::point_mass: symbol out of range");
  std::vector<double> p(size, 0.0);
  p[symbol] = 1.0;
  return Pmf(std::move(p));
}

ProbMatrix::ProbMatrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (rows == 0 || cols == 0) throw std::invalid_argument("ProbMatrix: empty dimension");
  if (data_.size() != rows * cols) throw std::invalid_argument("ProbMatrix: data size mismatch");
}

ConditionalDist::ConditionalDist(std::size_t rows, std::size_t cols, std::vector<double> data)
    : ProbMatrix(rows, cols, std::move(data)) {
  for (std::size_t r = 0; r < rows_; ++r) {
    normalize_in_place({data_.data() + r * cols_, cols_}, "ConditionalDist row");
  }
}

ConditionalDist ConditionalDist::from_rows(const std::vector<std::vector<double>>& rows) {
  if (rows.empty()) throw std::invalid_argument("ConditionalDist: no rows");
  const std::size_t cols = rows.front().size();
  std::vector<double> data;
  data.reserve(rows.size() * cols);
  for (const auto& r : rows) {
    if (r.size() != cols) throw std::invalid_argument("ConditionalDist: ragged rows");
    data.insert(data.end(), r.begin(), r.end());
  }
  return ConditionalDist(rows.size(), cols, std::move(data));
}

ConditionalDist ConditionalDist::identity(std::size_t size) {
  std::vector<double> data(size * size, 0.0);
  for (std::size_t i = 0; i < size; ++i) data[i * size + i] = 1.0;
  return ConditionalDist(size, size, std::move(data));
}

JointXY::JointXY(std::size_t num_x, std::size_t num_y, std::vector<double> data)
    : ProbMatrix(num_x, num_y, std::move(data)) {
  normalize_in_place(data_, "JointXY");
}

JointXY JointXY::from_channel(const Pmf& prior, const ConditionalDist& channel) {
  if (prior.size() != channel.rows()) {
    throw std::invalid_argument("JointXY::from_channel: prior/channel size mismatch");
  }
  std::vector<double> data(channel.rows() * channel.cols());
  for (std::size_t x = 0; x < channel.rows(); ++x) {
    for (std::size_t y = 0; y < channel.cols(); ++y) {
      data[x * channel.cols() + y] = prior[x] * channel(x, y);
    }
  }
  return JointXY(channel.rows(), channel.cols(), std::move(data));
}

Pmf JointXY::x_marginal() const {
  std::vector<double> p(rows_, 0.0);
  for (std::size_t x = 0; x < rows_; ++x) {
    for (double v : row(x)) p[x] += v;
  }
  return Pmf(std::move(p));
}

Pmf JointXY::y_marginal() const {
  std::vector<double> p(cols_, 0.0);
  for (std::size_t x = 0; x < rows_; ++x) {
    for (std::size_t y = 0; y < cols_; ++y) p[y] += (*this)(x, y);
  }
  return Pmf(std::move(p));
}

Quantizer::Quantizer(ConditionalDist mapping) : mapping_(std::move(mapping)) {
  deterministic_ = true;
  for (std::size_t y = 0; y < mapping_.rows() && deterministic_; ++y) {
    int big = 0;
    for (double v : mapping_.row(y)) {
      if (v >= 1.0 - 1e-12) {
        ++big;
      } else if (v != 0.0) {
        big = -1;
        break;
      }
    }
    deterministic_ = big == 1;
  }
}

Quantizer Quantizer::from_labels(std::span<const int> labels, std::size_t num_clusters) {
  if (labels.empty() || num_clusters == 0) throw std::invalid_argument("Quantizer: empty");
  std::vector<double> data(labels.size() * num_clusters, 0.0);
  for (std::size_t y = 0; y < labels.size(); ++y) {
    if (labels[y] < 0 || static_cast<std::size_t>(labels[y]) >= num_clusters) {
      throw std::invalid_argument("Quantizer: label out of range");
    }
    data[y * num_clusters + static_cast<std::size_t>(labels[y])] = 1.0;
  }
  return Quantizer(ConditionalDist(labels.size(), num_clusters, std::move(data)));
}

Quantizer Quantizer::identity(std::size_t size) {
  return Quantizer(ConditionalDist::identity(size));
}

std::vector<int> Quantizer::labels() const {
  if (!deterministic_) throw std::logic_error("Quantizer::labels: quantizer is stochastic");
  std::vector<int> out(mapping_.rows());
  for (std::size_t y = 0; y < mapping_.rows(); ++y) {
    auto r = mapping_.row(y);
    std::size_t best = 0;
    for (std::size_t z = 1; z < r.size(); ++z) {
      if (r[z] > r[best]) best = z;
    }
    out[y] = static_cast<int>(best);
  }
  return out;
}

double entropy(const Pmf& p) {
  double h = 0.0;
  for (double v : p.probs()) {
    if (v > 0.0) h -= v * std::log2(v);
  }
  return h < 0.0 ? 0.0 : h;
}

double kl_divergence(const Pmf& p, const Pmf& q) {
  if (p.size() != q.size()) throw std::invalid_argument("kl_divergence: alphabet size mismatch");
  double d = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double pi = p[i];
    const double qi = q[i];
    if (pi <= 0.0) continue;
    if (qi < kZeroProbability) {
      if (pi >= kZeroProbability) return std::numeric_limits<double>::infinity();
      continue;
    }
    d += pi * std::log2(pi / qi);
  }
  return d < 0.0 ? 0.0 : d;
}

double kl_bits(std::span<const double> p, std::span<const double> q) {
  double d = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] <= 0.0) continue;
    if (q[i] <= 0.0) return std::numeric_limits<double>::infinity();
    d += p[i] * std::log2(p[i] / q[i]);
  }
  return d < 0.0 ? 0.0 : d;
}

double mutual_information(const JointXY& joint) {
  const Pmf px = joint.x_marginal();
  const Pmf py = joint.y_marginal();
  double mi = 0.0;
  for (std::size_t x = 0; x < joint.num_x(); ++x) {
    for (std::size_t y = 0; y < joint.num_y(); ++y) {
      const double pxy = joint(x, y);
      if (pxy > 0.0) mi += pxy * std::log2(pxy / (px[x] * py[y]));
    }
  }
  return mi < 0.0 ? 0.0 : mi;
}

JointXY push_through_quantizer(const JointXY& joint, const Quantizer& q) {
  if (q.num_inputs() != joint.num_y()) {
    throw std::invalid_argument("push_through_quantizer: quantizer input size != |Y|");
  }
  const std::size_t nz = q.num_clusters();
  std::vector<double> out(joint.num_x() * nz, 0.0);
  const auto& m = q.mapping();
  for (std::size_t x = 0; x < joint.num_x(); ++x) {
    for (std::size_t y = 0; y < joint.num_y(); ++y) {
      const double pxy = joint(x, y);
      if (pxy == 0.0) continue;
      for (std::size_t z = 0; z < nz; ++z) out[x * nz + z] += pxy * m(y, z);
    }
  }
  return JointXY(joint.num_x(), nz, std::move(out));
}

ConditionalDist posteriors_x_given_y(const JointXY& joint) {
  const Pmf px = joint.x_marginal();
  const std::size_t nx = joint.num_x();
  std::vector<double> data(joint.num_y() * nx);
  for (std::size_t y = 0; y < joint.num_y(); ++y) {
    double py = 0.0;
    for (std::size_t x = 0; x < nx; ++x) py += joint(x, y);
    for (std::size_t x = 0; x < nx; ++x) {
      data[y * nx + x] = py > 0.0 ? joint(x, y) / py : px[x];
    }
  }
  return ConditionalDist(joint.num_y(), nx, std::move(data));
}

double avg_kl_distortion(const JointXY& joint, const Quantizer& q) {
  const JointXY xz = push_through_quantizer(joint, q);
  const ConditionalDist post_y = posteriors_x_given_y(joint);
  const ConditionalDist post_z = posteriors_x_given_y(xz);
  const Pmf py = joint.y_marginal();
  const auto& m = q.mapping();
  double d = 0.0;
  for (std::size_t y = 0; y < joint.num_y(); ++y) {
    if (py[y] == 0.0) continue;
    for (std::size_t z = 0; z < q.num_clusters(); ++z) {
      const double w = py[y] * m(y, z);
      if (w > 0.0) d += w * kl_bits(post_y.row(y), post_z.row(z));
    }
  }
  return d;
}

double compression_rate(const Pmf& y_marginal, const Quantizer& q) {
  if (q.num_inputs() != y_marginal.size()) {
    throw std::invalid_argument("compression_rate: quantizer input size != |Y|");
  }
  const auto& m = q.mapping();
  std::vector<double> pz(q.num_clusters(), 0.0);
  for (std::size_t y = 0; y < m.rows(); ++y) {
    for (std::size_t z = 0; z < m.cols(); ++z) pz[z] += y_marginal[y] * m(y, z);
  }
  double rate = 0.0;
  for (std::size_t y = 0; y < m.rows(); ++y) {
    for (std::size_t z = 0; z < m.cols(); ++z) {
      const double w = y_marginal[y] * m(y, z);
      if (w > 0.0) rate += w * std::log2(m(y, z) / pz[z]);
    }
  }
  return rate < 0.0 ? 0.0 : rate;
}

}  // namespace ibq

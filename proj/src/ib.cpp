#include "ibq/ib.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

#include "ibq/parallel.hpp"
#include "ibq/rng.hpp"
#include "text_io.hpp"

namespace ibq {

namespace {

constexpr double kDeadCluster = 1e-12;
// Mapping entries below this are flushed to zero; keeps denormals out of the
// cluster statistics.
constexpr double kNegligibleWeight = 1e-200;

/// The joint restricted to observation symbols of positive probability.
struct ReducedJoint {
  std::size_t nx = 0;
  std::vector<std::size_t> kept;   // original y index of each reduced symbol
  std::vector<double> py;          // p(y), reduced
  std::vector<double> pxy;         // nx x m, row-major by x
  std::vector<double> post;        // m x nx, p(x|y)
  std::vector<double> px;

  std::size_t m() const { return kept.size(); }
  double joint(std::size_t x, std::size_t y) const { return pxy[x * m() + y]; }
  std::span<const double> posterior(std::size_t y) const { return {post.data() + y * nx, nx}; }
};

ReducedJoint reduce(const JointXY& joint) {
  ReducedJoint r;
  r.nx = joint.num_x();
  const Pmf py = joint.y_marginal();
  for (std::size_t y = 0; y < joint.num_y(); ++y) {
    if (py[y] > 0.0) {
      r.kept.push_back(y);
      r.py.push_back(py[y]);
    }
  }
  if (r.kept.empty()) throw NumericalError("joint distribution has no mass");
  const std::size_t m = r.kept.size();
  r.pxy.resize(r.nx * m);
  r.post.resize(m * r.nx);
  for (std::size_t x = 0; x < r.nx; ++x) {
    for (std::size_t j = 0; j < m; ++j) r.pxy[x * m + j] = joint(x, r.kept[j]);
  }
  for (std::size_t j = 0; j < m; ++j) {
    for (std::size_t x = 0; x < r.nx; ++x) r.post[j * r.nx + x] = r.pxy[x * m + j] / r.py[j];
  }
  const Pmf px = joint.x_marginal();
  r.px.assign(px.probs().begin(), px.probs().end());
  return r;
}

/// Expands a reduced deterministic assignment to every y; symbols of zero
/// probability join the cluster of their nearest kept neighbour by index.
std::vector<int> expand_labels(const ReducedJoint& r, std::size_t num_y,
                               const std::vector<int>& reduced_labels) {
  std::vector<int> labels(num_y, -1);
  for (std::size_t j = 0; j < r.m(); ++j) labels[r.kept[j]] = reduced_labels[j];
  for (std::size_t y = 0; y < num_y; ++y) {
    if (labels[y] >= 0) continue;
    const auto it = std::lower_bound(r.kept.begin(), r.kept.end(), y);
    std::size_t best;
    if (it == r.kept.end()) {
      best = r.kept.back();
    } else if (it == r.kept.begin()) {
      best = *it;
    } else {
      const std::size_t above = *it;
      const std::size_t below = *(it - 1);
      best = (y - below <= above - y) ? below : above;
    }
    labels[y] = labels[best];
  }
  return labels;
}


}  // namespace

double ib_objective(const JointXY& joint, const Quantizer& q, double beta) {
  if (beta < 0.0) throw std::invalid_argument("beta must be non-negative");
  const double rate = compression_rate(joint.y_marginal(), q);
  const double relevant = mutual_information(push_through_quantizer(joint, q));
  if (std::isinf(beta)) return -relevant;
  return (rate - beta * relevant) / (beta + 1.0);
}

IbDesign evaluate_design(const JointXY& joint, const Quantizer& q, double beta) {
  IbDesign d;
  const JointXY xz = push_through_quantizer(joint, q);
  d.quantizer = q;
  d.beta = beta;
  d.cluster_prior = xz.y_marginal();
  d.cluster_posteriors = posteriors_x_given_y(xz);
  d.relevant_info = mutual_information(xz);
  d.compression_rate = compression_rate(joint.y_marginal(), q);
  d.info_loss = mutual_information(joint) - d.relevant_info;
  d.objective = std::isinf(beta) ? -d.relevant_info
                                 : (d.compression_rate - beta * d.relevant_info) / (beta + 1.0);
  d.occupied_clusters = static_cast<int>(std::count_if(
      d.cluster_prior.probs().begin(), d.cluster_prior.probs().end(), [](double p) { return p > 0.0; }));
  return d;
}

// ---------------------------------------------------------------------------
// Iterative IB

namespace {

class IterativeIb {
 public:
  IterativeIb(const ReducedJoint& r, std::size_t n)
      : r_(r), n_(n), pz_(n), pxz_joint_(n * r.nx), post_z_(n * r.nx), log_post_z_(n * r.nx),
        neg_entropy_(r.m(), 0.0) {
    for (std::size_t z = 0; z < n_; ++z) {
      std::copy(r_.px.begin(), r_.px.end(), post_z_.begin() + static_cast<std::ptrdiff_t>(z * r_.nx));
    }
    for (std::size_t y = 0; y < r_.m(); ++y) {
      for (double p : r_.posterior(y)) {
        if (p > 0.0) neg_entropy_[y] += p * std::log(p);
      }
    }
  }

  void set_beta(double beta) { beta_ = beta; }

  /// p(z) and p(x|z) from the mapping (cluster statistics).
  void update_statistics(const std::vector<double>& mapping) {
    const std::size_t m = r_.m();
    std::fill(pz_.begin(), pz_.end(), 0.0);
    std::fill(pxz_joint_.begin(), pxz_joint_.end(), 0.0);
    for (std::size_t y = 0; y < m; ++y) {
      for (std::size_t z = 0; z < n_; ++z) {
        const double w = mapping[y * n_ + z];
        if (w == 0.0) continue;
        pz_[z] += r_.py[y] * w;
        for (std::size_t x = 0; x < r_.nx; ++x) pxz_joint_[z * r_.nx + x] += r_.joint(x, y) * w;
      }
    }
    for (std::size_t z = 0; z < n_; ++z) {
      if (pz_[z] >= kDeadCluster) {  // otherwise keep the last valid posterior
        for (std::size_t x = 0; x < r_.nx; ++x) {
          post_z_[z * r_.nx + x] = pxz_joint_[z * r_.nx + x] / pz_[z];
        }
      }
      for (std::size_t x = 0; x < r_.nx; ++x) log_post_z_[z * r_.nx + x] = std::log(post_z_[z * r_.nx + x]);
    }
  }

  /// D(p(x|y) || p(x|z)) in nats.
  double divergence(std::size_t y, std::size_t z) const {
    const auto post = r_.posterior(y);
    const double* lq = log_post_z_.data() + z * r_.nx;
    double cross = 0.0;
    for (std::size_t x = 0; x < r_.nx; ++x) {
      if (post[x] == 0.0) continue;
      if (std::isinf(lq[x])) return std::numeric_limits<double>::infinity();
      cross += post[x] * lq[x];
    }
    return std::max(0.0, neg_entropy_[y] - cross);
  }

  /// Stationary-point update p(z|y) = p(z) exp(-beta D(p(x|y)||p(x|z))) / psi(y).
  std::vector<double> updated_mapping() const {
    const std::size_t m = r_.m();
    std::vector<double> out(m * n_);
    std::vector<double> logits(n_);
    for (std::size_t y = 0; y < m; ++y) {
      double best = -std::numeric_limits<double>::infinity();
      for (std::size_t z = 0; z < n_; ++z) {
        const double d = pz_[z] > 0.0 ? divergence(y, z) : std::numeric_limits<double>::infinity();
        logits[z] = std::isinf(d) ? -std::numeric_limits<double>::infinity()
                                  : std::log(pz_[z]) - beta_ * d;
        best = std::max(best, logits[z]);
      }
      if (!std::isfinite(best)) throw NumericalError("iterative IB: every cluster is unreachable");
      double psi = 0.0;
      for (std::size_t z = 0; z < n_; ++z) {
        const double v = std::exp(logits[z] - best);
        out[y * n_ + z] = v;
        psi += v;
      }
      for (std::size_t z = 0; z < n_; ++z) {
        double& v = out[y * n_ + z];
        v /= psi;
        if (v < kNegligibleWeight) v = 0.0;
      }
    }
    return out;
  }

  double objective(const std::vector<double>& mapping) const {
    const std::size_t m = r_.m();
    double rate = 0.0;
    for (std::size_t y = 0; y < m; ++y) {
      for (std::size_t z = 0; z < n_; ++z) {
        const double w = mapping[y * n_ + z];
        if (w > 0.0 && pz_[z] > 0.0) rate += r_.py[y] * w * (std::log2(w) - std::log2(pz_[z]));
      }
    }
    double relevant = 0.0;
    for (std::size_t z = 0; z < n_; ++z) {
      for (std::size_t x = 0; x < r_.nx; ++x) {
        const double p = pxz_joint_[z * r_.nx + x];
        if (p > 0.0) relevant += p * (std::log2(p) - std::log2(r_.px[x]) - std::log2(pz_[z]));
      }
    }
    return (rate - beta_ * relevant) / (beta_ + 1.0);
  }

  const std::vector<double>& cluster_prior() const { return pz_; }

 private:
  const ReducedJoint& r_;
  std::size_t n_;
  double beta_ = 0.0;
  std::vector<double> pz_;
  std::vector<double> pxz_joint_;
  std::vector<double> post_z_;
  std::vector<double> log_post_z_;
  std::vector<double> neg_entropy_;  // sum_x p(x|y) ln p(x|y)
};

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double r = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) r = std::max(r, std::abs(a[i] - b[i]));
  return r;
}

struct StageResult {
  int sweeps = 0;
  bool converged = false;
  std::vector<double> trace;
};

StageResult run_stage(IterativeIb& it, std::vector<double>& mapping, const IterativeIbOptions& options) {
  StageResult res;
  it.update_statistics(mapping);
  double obj = it.objective(mapping);
  res.trace.push_back(obj);
  while (res.sweeps < options.max_sweeps) {
    std::vector<double> next = it.updated_mapping();
    const double step = max_abs_diff(next, mapping);
    it.update_statistics(next);
    const double next_obj = it.objective(next);
    if (!std::isfinite(next_obj)) throw NumericalError("iterative IB: objective is not finite");
    res.trace.push_back(next_obj);
    mapping = std::move(next);
    ++res.sweeps;
    const double decrease = obj - next_obj;
    obj = next_obj;
    if (decrease < options.tol && step < options.mapping_tol) {
      res.converged = true;
      break;
    }
  }
  return res;
}

}  // namespace

IbDesign iterative_ib(const JointXY& joint, int num_clusters, double beta, const Quantizer& init,
                      const IterativeIbOptions& options) {
  if (num_clusters < 1) throw std::invalid_argument("number of clusters must be at least 1");
  if (!(beta >= 0.0) || std::isinf(beta)) throw std::invalid_argument("beta must be finite and >= 0");
  if (init.num_inputs() != joint.num_y() || init.num_clusters() != static_cast<std::size_t>(num_clusters)) {
    throw std::invalid_argument("iterative IB: initial mapping has the wrong shape");
  }
  if (!(options.anneal_start > 0.0) || !(options.anneal_factor > 1.0)) {
    throw std::invalid_argument("iterative IB: invalid continuation schedule");
  }
  const ReducedJoint r = reduce(joint);
  const auto n = static_cast<std::size_t>(num_clusters);
  const std::size_t m = r.m();

  std::vector<double> mapping(m * n);
  for (std::size_t j = 0; j < m; ++j) {
    auto row = init.mapping().row(r.kept[j]);
    std::copy(row.begin(), row.end(), mapping.begin() + static_cast<std::ptrdiff_t>(j * n));
  }

  IterativeIb it(r, n);
  int sweeps = 0;
  for (double b = beta * options.anneal_start; b < beta; b *= options.anneal_factor) {
    it.set_beta(b);
    sweeps += run_stage(it, mapping, options).sweeps;
  }
  it.set_beta(beta);
  StageResult last = run_stage(it, mapping, options);
  sweeps += last.sweeps;
  const double residual = max_abs_diff(mapping, it.updated_mapping());

  // Zero-probability observations have no posterior; park them in the most
  // probable cluster.
  const auto& pz = it.cluster_prior();
  const auto top = static_cast<std::size_t>(std::max_element(pz.begin(), pz.end()) - pz.begin());
  std::vector<double> full(joint.num_y() * n, 0.0);
  for (std::size_t y = 0; y < joint.num_y(); ++y) full[y * n + top] = 1.0;
  for (std::size_t j = 0; j < m; ++j) {
    std::copy_n(mapping.begin() + static_cast<std::ptrdiff_t>(j * n), n,
                full.begin() + static_cast<std::ptrdiff_t>(r.kept[j] * n));
  }
  IbDesign d = evaluate_design(joint, Quantizer(ConditionalDist(joint.num_y(), n, std::move(full))), beta);
  d.sweeps = sweeps;
  d.converged = last.converged;
  d.fixed_point_residual = residual;
  d.objective_trace = std::move(last.trace);
  return d;
}

IbDesign iterative_ib(const JointXY& joint, int num_clusters, double beta, std::uint64_t seed,
                      const IterativeIbOptions& options) {
  if (num_clusters < 1) throw std::invalid_argument("number of clusters must be at least 1");
  const auto n = static_cast<std::size_t>(num_clusters);
  auto rng = stream_rng(seed, 0x1b);
  std::vector<double> init(joint.num_y() * n);
  for (std::size_t y = 0; y < joint.num_y(); ++y) {
    double sum = 0.0;
    for (std::size_t z = 0; z < n; ++z) {
      // (0, 1]: keeps every entry strictly positive
      init[y * n + z] = 1.0 - uniform01(rng);
      sum += init[y * n + z];
    }
    for (std::size_t z = 0; z < n; ++z) init[y * n + z] /= sum;
  }
  return iterative_ib(joint, num_clusters, beta,
                      Quantizer(ConditionalDist(joint.num_y(), n, std::move(init))), options);
}

double iterative_ib_residual(const JointXY& joint, const Quantizer& q, double beta) {
  const ReducedJoint r = reduce(joint);
  const std::size_t n = q.num_clusters();
  std::vector<double> mapping(r.m() * n);
  for (std::size_t j = 0; j < r.m(); ++j) {
    auto row = q.mapping().row(r.kept[j]);
    std::copy(row.begin(), row.end(), mapping.begin() + static_cast<std::ptrdiff_t>(j * n));
  }
  IterativeIb it(r, n);
  it.set_beta(beta);
  it.update_statistics(mapping);
  return max_abs_diff(mapping, it.updated_mapping());
}

// ---------------------------------------------------------------------------
// Agglomerative IB

IbDesign agglomerative_ib(const JointXY& joint, int num_clusters) {
  const std::size_t ny = joint.num_y();
  const std::size_t nx = joint.num_x();
  if (num_clusters < 1) throw std::invalid_argument("number of clusters must be at least 1");
  if (static_cast<std::size_t>(num_clusters) > ny) {
    throw std::invalid_argument("agglomerative IB: more clusters than observation symbols");
  }
  // Slot s starts as {y = s}; merges always keep the lower slot, so a slot's
  // index is the smallest member it holds.
  std::vector<std::vector<double>> mass(ny, std::vector<double>(nx));
  std::vector<double> weight(ny, 0.0);
  for (std::size_t y = 0; y < ny; ++y) {
    for (std::size_t x = 0; x < nx; ++x) {
      mass[y][x] = joint(x, y);
      weight[y] += joint(x, y);
    }
  }
  std::vector<int> owner(ny);
  std::iota(owner.begin(), owner.end(), 0);
  std::vector<bool> active(ny, true);

  auto merge_cost = [&](std::size_t i, std::size_t j) {
    const double w = weight[i] + weight[j];
    if (w <= 0.0) return 0.0;
    double c = 0.0;
    for (std::size_t x = 0; x < nx; ++x) {
      const double a = mass[i][x];
      const double b = mass[j][x];
      const double s = a + b;
      if (a > 0.0) c += a * std::log2(a * w / (weight[i] * s));
      if (b > 0.0) c += b * std::log2(b * w / (weight[j] * s));
    }
    return std::max(0.0, c);
  };

  std::vector<double> cost(ny * ny, 0.0);
  for (std::size_t i = 0; i < ny; ++i) {
    for (std::size_t j = i + 1; j < ny; ++j) cost[i * ny + j] = merge_cost(i, j);
  }

  std::size_t remaining = ny;
  while (remaining > static_cast<std::size_t>(num_clusters)) {
    std::size_t bi = ny, bj = ny;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < ny; ++i) {
      if (!active[i]) continue;
      for (std::size_t j = i + 1; j < ny; ++j) {
        if (active[j] && cost[i * ny + j] < best) {
          best = cost[i * ny + j];
          bi = i;
          bj = j;
        }
      }
    }
    for (std::size_t x = 0; x < nx; ++x) mass[bi][x] += mass[bj][x];
    weight[bi] += weight[bj];
    active[bj] = false;
    for (auto& o : owner) {
      if (o == static_cast<int>(bj)) o = static_cast<int>(bi);
    }
    --remaining;
    for (std::size_t k = 0; k < ny; ++k) {
      if (!active[k] || k == bi) continue;
      const auto [lo, hi] = std::minmax(k, bi);
      cost[lo * ny + hi] = merge_cost(lo, hi);
    }
  }

  std::vector<int> slot_label(ny, -1);
  int next = 0;
  for (std::size_t s = 0; s < ny; ++s) {
    if (active[s]) slot_label[s] = next++;
  }
  std::vector<int> labels(ny);
  for (std::size_t y = 0; y < ny; ++y) labels[y] = slot_label[static_cast<std::size_t>(owner[y])];
  return evaluate_design(joint, Quantizer::from_labels(labels, static_cast<std::size_t>(num_clusters)),
                         std::numeric_limits<double>::infinity());
}

// ---------------------------------------------------------------------------
// KL-means / modified Lloyd

IbDesign kl_means_ib(const JointXY& joint, int num_clusters, double lambda, std::uint64_t seed,
                     const KlMeansOptions& options) {
  if (num_clusters < 1) throw std::invalid_argument("number of clusters must be at least 1");
  if (!(lambda >= 0.0)) throw std::invalid_argument("lambda must be non-negative");
  const ReducedJoint r = reduce(joint);
  const std::size_t m = r.m();
  const std::size_t nx = r.nx;
  const auto n = static_cast<std::size_t>(num_clusters);

  std::vector<double> centroid(n * nx, 0.0);
  std::vector<double> pz(n, 0.0);
  std::vector<int> assign(m, 0);
  std::vector<double> cost(m, 0.0);

  auto distortion = [&](std::size_t y, std::size_t z) {
    return kl_bits(r.posterior(y), {centroid.data() + z * nx, nx});
  };

  // Initial representatives: posteriors of min(n, m) distinct random symbols.
  auto rng = stream_rng(seed, 0x4c);
  std::vector<std::size_t> pool(m);
  std::iota(pool.begin(), pool.end(), 0);
  const std::size_t seeded = std::min(n, m);
  for (std::size_t z = 0; z < seeded; ++z) {
    const std::size_t pick = z + static_cast<std::size_t>(rng() % (m - z));
    std::swap(pool[z], pool[pick]);
    auto post = r.posterior(pool[z]);
    std::copy(post.begin(), post.end(), centroid.begin() + static_cast<std::ptrdiff_t>(z * nx));
    pz[z] = 1.0;  // only marks the cluster as live for the first assignment
  }

  auto assign_all = [&](bool with_length) {
    bool changed = false;
    for (std::size_t y = 0; y < m; ++y) {
      std::size_t best_z = 0;
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t z = 0; z < n; ++z) {
        if (pz[z] <= 0.0) continue;
        double c = distortion(y, z);
        if (with_length && lambda > 0.0) c += lambda * -std::log2(pz[z]);
        if (c < best) {
          best = c;
          best_z = z;
        }
      }
      if (static_cast<int>(best_z) != assign[y]) changed = true;
      assign[y] = static_cast<int>(best_z);
      cost[y] = best;
    }
    return changed;
  };

  auto update_centroids = [&] {
    std::fill(pz.begin(), pz.end(), 0.0);
    std::fill(centroid.begin(), centroid.end(), 0.0);
    for (std::size_t y = 0; y < m; ++y) {
      const auto z = static_cast<std::size_t>(assign[y]);
      pz[z] += r.py[y];
      for (std::size_t x = 0; x < nx; ++x) centroid[z * nx + x] += r.joint(x, y);
    }
    for (std::size_t z = 0; z < n; ++z) {
      if (pz[z] <= 0.0) continue;
      for (std::size_t x = 0; x < nx; ++x) centroid[z * nx + x] /= pz[z];
    }
  };

  auto objective = [&] {
    double j = 0.0;
    for (std::size_t y = 0; y < m; ++y) {
      const auto z = static_cast<std::size_t>(assign[y]);
      j += r.py[y] * distortion(y, z);
      if (lambda > 0.0) j += r.py[y] * lambda * -std::log2(pz[z]);
    }
    return j;
  };

  // Pure-distortion repair: move the worst-served symbol into an empty
  // cluster. Only used at lambda = 0, where empty clusters are never optimal.
  auto reseed_empty = [&] {
    bool moved = false;
    std::vector<int> members(n, 0);
    for (int z : assign) ++members[static_cast<std::size_t>(z)];
    for (std::size_t z = 0; z < n; ++z) {
      if (members[z] > 0) continue;
      std::size_t worst = m;
      for (std::size_t y = 0; y < m; ++y) {
        if (members[static_cast<std::size_t>(assign[y])] < 2) continue;
        if (worst == m || cost[y] > cost[worst]) worst = y;
      }
      if (worst == m) break;
      --members[static_cast<std::size_t>(assign[worst])];
      assign[worst] = static_cast<int>(z);
      cost[worst] = 0.0;
      members[z] = 1;
      moved = true;
    }
    return moved;
  };

  assign_all(false);
  std::vector<double> trace;
  bool converged = false;
  int sweeps = 0;
  while (true) {
    update_centroids();
    trace.push_back(objective());
    if (sweeps >= options.max_sweeps) break;
    ++sweeps;
    bool changed = assign_all(true);
    if (lambda == 0.0 && reseed_empty()) changed = true;
    if (!changed) {
      converged = true;
      break;
    }
  }

  std::vector<int> labels = expand_labels(r, joint.num_y(), assign);
  IbDesign d = evaluate_design(joint, Quantizer::from_labels(labels, n),
                               std::numeric_limits<double>::infinity());
  d.sweeps = sweeps;
  d.converged = converged;
  d.objective_trace = std::move(trace);
  return d;
}

// ---------------------------------------------------------------------------
// Contiguous dynamic programme

IbDesign dp_contiguous_quantizer(const JointXY& joint, int num_clusters,
                                 std::span<const std::size_t> order) {
  if (num_clusters < 1) throw std::invalid_argument("number of clusters must be at least 1");
  const std::size_t ny = joint.num_y();
  const std::size_t nx = joint.num_x();
  if (order.size() != ny) throw std::invalid_argument("order must be a permutation of |Y|");
  {
    std::vector<bool> seen(ny, false);
    for (std::size_t y : order) {
      if (y >= ny || seen[y]) throw std::invalid_argument("order must be a permutation of |Y|");
      seen[y] = true;
    }
  }
  const ReducedJoint r = reduce(joint);
  std::vector<std::size_t> position_of(ny, ny);
  for (std::size_t j = 0; j < r.m(); ++j) position_of[r.kept[j]] = j;
  std::vector<std::size_t> seq;  // reduced indices in the requested order
  for (std::size_t y : order) {
    if (position_of[y] != ny) seq.push_back(position_of[y]);
  }
  const std::size_t m = seq.size();
  const std::size_t k = std::min<std::size_t>(static_cast<std::size_t>(num_clusters), m);

  // value[a][b]: contribution to I(x;z) of one cluster holding seq[a..b).
  std::vector<double> value((m + 1) * (m + 1), 0.0);
  std::vector<double> acc(nx);
  for (std::size_t a = 0; a < m; ++a) {
    std::fill(acc.begin(), acc.end(), 0.0);
    for (std::size_t b = a + 1; b <= m; ++b) {
      double w = 0.0;
      for (std::size_t x = 0; x < nx; ++x) {
        acc[x] += r.joint(x, seq[b - 1]);
        w += acc[x];
      }
      double v = 0.0;
      for (std::size_t x = 0; x < nx; ++x) {
        if (acc[x] > 0.0) v += acc[x] * std::log2(acc[x] / (r.px[x] * w));
      }
      value[a * (m + 1) + b] = v;
    }
  }

  const double neg_inf = -std::numeric_limits<double>::infinity();
  std::vector<double> best((k + 1) * (m + 1), neg_inf);
  std::vector<std::size_t> split((k + 1) * (m + 1), 0);
  for (std::size_t b = 1; b <= m; ++b) best[1 * (m + 1) + b] = value[b];
  for (std::size_t c = 2; c <= k; ++c) {
    for (std::size_t b = c; b <= m; ++b) {
      double top = neg_inf;
      std::size_t arg = c - 1;
      for (std::size_t a = c - 1; a < b; ++a) {
        const double v = best[(c - 1) * (m + 1) + a] + value[a * (m + 1) + b];
        if (v > top) {
          top = v;
          arg = a;
        }
      }
      best[c * (m + 1) + b] = top;
      split[c * (m + 1) + b] = arg;
    }
  }

  std::vector<int> reduced_labels(m, 0);
  std::size_t b = m;
  for (std::size_t c = k; c >= 1; --c) {
    const std::size_t a = c == 1 ? 0 : split[c * (m + 1) + b];
    for (std::size_t i = a; i < b; ++i) reduced_labels[seq[i]] = static_cast<int>(c - 1);
    b = a;
  }
  std::vector<int> labels = expand_labels(r, ny, reduced_labels);
  return evaluate_design(joint, Quantizer::from_labels(labels, static_cast<std::size_t>(num_clusters)),
                         std::numeric_limits<double>::infinity());
}

IbDesign dp_optimal_quantizer(const JointXY& joint, int num_clusters) {
  if (joint.num_x() != 2) {
    throw std::invalid_argument("dp_optimal_quantizer requires a binary relevance variable");
  }
  const std::size_t ny = joint.num_y();
  std::vector<double> llr(ny);
  for (std::size_t y = 0; y < ny; ++y) llr[y] = std::log(joint(0, y)) - std::log(joint(1, y));
  std::vector<std::size_t> order(ny);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const double la = std::isnan(llr[a]) ? 0.0 : llr[a];
    const double lb = std::isnan(llr[b]) ? 0.0 : llr[b];
    return la > lb;
  });
  return dp_contiguous_quantizer(joint, num_clusters, order);
}

// ---------------------------------------------------------------------------
// Curves

IbAlgorithm parse_algorithm(const std::string& tag) {
  if (tag == "it-ib") return IbAlgorithm::IterativeIb;
  if (tag == "agg-ib") return IbAlgorithm::AgglomerativeIb;
  if (tag == "kl-means") return IbAlgorithm::KlMeans;
  if (tag == "dp") return IbAlgorithm::DynamicProgramming;
  throw std::invalid_argument("unknown algorithm '" + tag + "' (it-ib, agg-ib, kl-means, dp)");
}

std::string algorithm_tag(IbAlgorithm alg) {
  switch (alg) {
    case IbAlgorithm::IterativeIb: return "it-ib";
    case IbAlgorithm::AgglomerativeIb: return "agg-ib";
    case IbAlgorithm::KlMeans: return "kl-means";
    case IbAlgorithm::DynamicProgramming: return "dp";
  }
  return "unknown";
}

namespace {

bool randomized(IbAlgorithm alg) {
  return alg == IbAlgorithm::IterativeIb || alg == IbAlgorithm::KlMeans;
}

}  // namespace

IbDesign best_design(const JointXY& joint, IbAlgorithm alg, int num_clusters,
                     const CurveOptions& options) {
  switch (alg) {
    case IbAlgorithm::AgglomerativeIb: return agglomerative_ib(joint, num_clusters);
    case IbAlgorithm::DynamicProgramming: {
      if (joint.num_x() == 2) return dp_optimal_quantizer(joint, num_clusters);
      // Non-binary x: best partition contiguous in the given output order
      // (amplitude order for discretized AWGN), not a global optimum.
      std::vector<std::size_t> order(joint.num_y());
      std::iota(order.begin(), order.end(), std::size_t{0});
      return dp_contiguous_quantizer(joint, num_clusters, order);
    }
    case IbAlgorithm::IterativeIb:
    case IbAlgorithm::KlMeans: break;
  }
  if (options.restarts < 1) throw std::invalid_argument("restarts must be at least 1");
  const auto count = static_cast<std::size_t>(options.restarts);
  std::vector<IbDesign> runs(count);
  parallel_for(count, [&](std::size_t i) {
    const std::uint64_t seed = splitmix64(options.seed ^ splitmix64(i + 1));
    runs[i] = alg == IbAlgorithm::IterativeIb
                  ? iterative_ib(joint, num_clusters, options.beta, seed, options.it_ib)
                  : kl_means_ib(joint, num_clusters, options.lambda, seed, options.kl_means);
  });
  std::size_t best = 0;
  for (std::size_t i = 1; i < count; ++i) {
    if (runs[i].info_loss < runs[best].info_loss) best = i;
  }
  return std::move(runs[best]);
}

std::vector<CurvePoint> ib_curve(const JointXY& joint, IbAlgorithm alg,
                                 std::span<const int> n_values, const CurveOptions& options) {
  if (n_values.empty()) throw std::invalid_argument("ib_curve: no cluster counts given");
  std::vector<CurvePoint> out;
  for (int n : n_values) {
    if (n < 1) throw std::invalid_argument("ib_curve: cluster counts must be >= 1");
    CurvePoint p;
    p.n = n;
    p.design = best_design(joint, alg, n, options);
    p.info_loss = p.design.info_loss;
    p.compression_rate = p.design.compression_rate;
    p.objective = (p.compression_rate - options.beta * p.design.relevant_info) / (options.beta + 1.0);
    out.push_back(std::move(p));
  }
  return out;
}

void write_curve_csv(std::ostream& os, IbAlgorithm alg, const CurveOptions& options,
                     std::span<const CurvePoint> points) {
  os << "algorithm,beta,n,restarts,info_loss_bits,compression_rate_bits,objective\n";
  const int restarts = randomized(alg) ? options.restarts : 1;
  for (const auto& p : points) {
    os << algorithm_tag(alg) << ',' << detail::format_double(options.beta) << ',' << p.n << ','
       << restarts << ',' << detail::format_double(p.info_loss) << ','
       << detail::format_double(p.compression_rate) << ',' << detail::format_double(p.objective)
       << '\n';
  }
}

}  // namespace ibq

#include "ibq/channel.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <string>

#include "text_io.hpp"

namespace ibq {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;

// Upper tail Q(t) and lower tail Phi(t), each accurate in its own tail.
double upper_tail(double t) { return 0.5 * std::erfc(t * kInvSqrt2); }
double lower_tail(double t) { return 0.5 * std::erfc(-t * kInvSqrt2); }

}  // namespace

std::vector<double> AwgnDiscretization::bin_edges() const {
  std::vector<double> edges(static_cast<std::size_t>(num_bins) + 1);
  const double width = 2.0 * clip_amplitude / num_bins;
  for (int k = 0; k <= num_bins; ++k) {
    // Build from whichever end is closer so that edge k and edge N-k are
    // exact negatives of each other.
    edges[k] = 2 * k <= num_bins ? -clip_amplitude + k * width
                                 : clip_amplitude - (num_bins - k) * width;
  }
  return edges;
}

double AwgnDiscretization::bin_center(int bin) const {
  const double width = 2.0 * clip_amplitude / num_bins;
  return -clip_amplitude + (bin + 0.5) * width;
}

double gaussian_interval_mass(double lo, double hi, double mean, double std) {
  if (!(hi > lo)) return 0.0;
  const double a = (lo - mean) / std;
  const double b = (hi - mean) / std;
  if (a >= 0.0) return std::max(0.0, upper_tail(a) - upper_tail(b));
  if (b <= 0.0) return std::max(0.0, lower_tail(b) - lower_tail(a));
  return std::max(0.0, 1.0 - upper_tail(b) - lower_tail(a));
}

double ebn0_to_noise_std(double ebn0_db, double code_rate) {
  if (!(code_rate > 0.0 && code_rate <= 1.0)) {
    throw std::invalid_argument("code rate must lie in (0, 1]");
  }
  return std::sqrt(1.0 / (2.0 * code_rate * std::pow(10.0, ebn0_db / 10.0)));
}

DmcSpec build_awgn(std::vector<double> inputs, Pmf prior, double noise_std, int num_bins,
                   double clip_amplitude) {
  if (!(noise_std > 0.0)) throw std::invalid_argument("noise_std must be positive");
  if (num_bins < 2) throw std::invalid_argument("num_bins must be at least 2");
  if (!(clip_amplitude > 0.0)) throw std::invalid_argument("clip amplitude must be positive");
  if (inputs.empty() || prior.size() != inputs.size()) {
    throw std::invalid_argument("prior must match the input alphabet");
  }
  AwgnDiscretization disc;
  disc.noise_std = noise_std;
  disc.clip_amplitude = clip_amplitude;
  disc.num_bins = num_bins;
  double max_abs = 0.0;
  for (double x : inputs) max_abs = std::max(max_abs, std::abs(x));
  disc.clip_multiplier = (clip_amplitude - max_abs) / noise_std;

  auto edges = disc.bin_edges();
  edges.front() = -std::numeric_limits<double>::infinity();
  edges.back() = std::numeric_limits<double>::infinity();

  const auto nb = static_cast<std::size_t>(num_bins);
  std::vector<double> data(inputs.size() * nb);
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    for (std::size_t k = 0; k < nb; ++k) {
      data[i * nb + k] = gaussian_interval_mass(edges[k], edges[k + 1], inputs[i], noise_std);
    }
  }
  DmcSpec dmc{std::move(inputs), ConditionalDist(prior.size(), nb, std::move(data)),
              std::move(prior), disc};
  return dmc;
}

DmcSpec build_ask_awgn(int levels, double noise_std, int num_bins, double clip_multiplier,
                       std::optional<Pmf> prior) {
  if (levels < 2 || levels % 2 != 0) throw std::invalid_argument("ASK order must be even and >= 2");
  if (!(noise_std > 0.0)) throw std::invalid_argument("noise_std must be positive");
  if (clip_multiplier < 0.0) throw std::invalid_argument("clip multiplier must be non-negative");
  std::vector<double> inputs;
  for (int k = 0; k < levels; ++k) inputs.push_back(-(levels - 1) + 2.0 * k);
  Pmf p = prior ? *prior : Pmf::uniform(inputs.size());
  const double clip = (levels - 1) + clip_multiplier * noise_std;
  DmcSpec dmc = build_awgn(std::move(inputs), std::move(p), noise_std, num_bins, clip);
  dmc.awgn->clip_multiplier = clip_multiplier;
  return dmc;
}

DmcSpec build_bpsk_awgn(double ebn0_db, double code_rate, int num_bins, double clip_multiplier) {
  const double sigma = ebn0_to_noise_std(ebn0_db, code_rate);
  if (clip_multiplier < 0.0) throw std::invalid_argument("clip multiplier must be non-negative");
  DmcSpec dmc = build_awgn({+1.0, -1.0}, Pmf::uniform(2), sigma, num_bins,
                           1.0 + clip_multiplier * sigma);
  dmc.awgn->clip_multiplier = clip_multiplier;
  return dmc;
}

DmcSpec build_bpsk_awgn_clipped(double noise_std, int num_bins, double clip_amplitude) {
  return build_awgn({+1.0, -1.0}, Pmf::uniform(2), noise_std, num_bins, clip_amplitude);
}

DmcSpec build_bsc(double eps) {
  if (!(eps >= 0.0 && eps <= 0.5)) throw std::invalid_argument("BSC crossover must lie in [0, 0.5]");
  return DmcSpec{{0.0, 1.0},
                 ConditionalDist(2, 2, {1.0 - eps, eps, eps, 1.0 - eps}),
                 Pmf::uniform(2),
                 std::nullopt};
}

void write_dmc(std::ostream& os, const DmcSpec& dmc) {
  os << "dmc " << dmc.num_inputs() << ' ' << dmc.num_outputs() << '\n';
  detail::write_row(os, dmc.input_prior.probs());
  for (std::size_t x = 0; x < dmc.num_inputs(); ++x) detail::write_row(os, dmc.transition.row(x));
}

DmcSpec read_dmc(std::istream& is) {
  detail::TokenReader in(is);
  in.expect("dmc");
  const auto nx = in.next_size();
  const auto ny = in.next_size();
  auto prior = in.next_doubles(nx);
  auto rows = in.next_doubles(nx * ny);
  DmcSpec dmc{{}, ConditionalDist(nx, ny, std::move(rows)), Pmf(std::move(prior)), std::nullopt};
  for (std::size_t x = 0; x < nx; ++x) dmc.input_alphabet.push_back(static_cast<double>(x));
  return dmc;
}

}  // namespace ibq

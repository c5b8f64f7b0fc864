#pragma once

// Discrete memoryless channels: exact small channels and uniformly
// discretized AWGN channels with ASK/BPSK inputs.

#include <iosfwd>
#include <optional>
#include <vector>

#include "ibq/info.hpp"

namespace ibq {

/// Uniform output discretization of an AWGN channel. Bins partition
/// [-clip_amplitude, +clip_amplitude]; the two outer bins also absorb the
/// Gaussian tails beyond the clip range (saturation).
struct AwgnDiscretization {
  double noise_std = 1.0;
  double clip_multiplier = 3.0;
  double clip_amplitude = 0.0;
  int num_bins = 0;

  /// num_bins + 1 edges from -clip_amplitude to +clip_amplitude.
  std::vector<double> bin_edges() const;
  double bin_center(int bin) const;
};

struct DmcSpec {
  std::vector<double> input_alphabet;
  ConditionalDist transition;  // p(y|x), rows follow input_alphabet
  Pmf input_prior;
  std::optional<AwgnDiscretization> awgn;

  std::size_t num_inputs() const { return transition.rows(); }
  std::size_t num_outputs() const { return transition.cols(); }
  JointXY joint() const { return JointXY::from_channel(input_prior, transition); }
};

/// Gaussian N(mean, std^2) probability of [lo, hi); infinite edges allowed.
double gaussian_interval_mass(double lo, double hi, double mean, double std);

/// sigma for unit-energy antipodal signalling: sigma^2 = 1 / (2 R 10^(EbN0/10)).
double ebn0_to_noise_std(double ebn0_db, double code_rate);

/// Discretized AWGN for arbitrary real inputs with an explicit clip amplitude.
DmcSpec build_awgn(std::vector<double> inputs, Pmf prior, double noise_std, int num_bins,
                   double clip_amplitude);

/// M-ASK inputs {-(M-1), ..., -1, +1, ..., M-1} in ascending order; clip range
/// is max|x| + clip_multiplier * noise_std. Uniform prior when none given.
DmcSpec build_ask_awgn(int levels, double noise_std, int num_bins, double clip_multiplier = 3.0,
                       std::optional<Pmf> prior = std::nullopt);

/// BPSK inputs {+1, -1} (bit 0 maps to +1), uniform prior.
DmcSpec build_bpsk_awgn(double ebn0_db, double code_rate, int num_bins,
                        double clip_multiplier = 3.0);

/// BPSK with a fixed bin geometry (used when the decoder was designed at a
/// different noise level than the one being simulated).
DmcSpec build_bpsk_awgn_clipped(double noise_std, int num_bins, double clip_amplitude);

DmcSpec build_bsc(double eps);

/// Plain-text serialization: "dmc <inputs> <outputs>", the prior row, then one
/// transition row per input. The file holds no input values, so a re-read
/// channel labels its inputs 0, 1, ... Lines starting with '#' are comments.
void write_dmc(std::ostream& os, const DmcSpec& dmc);
DmcSpec read_dmc(std::istream& is);

}  // namespace ibq

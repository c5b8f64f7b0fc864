#pragma once

// Lookup-table LDPC decoder designed by discrete density evolution, plus
// floating-point min-sum and belief-propagation reference decoders.

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "ibq/channel.hpp"
#include "ibq/ldpc.hpp"
#include "ibq/maxlut.hpp"

namespace ibq {

/// Per-iteration tables of a discrete message-passing decoder for a
/// (dv, dc)-regular ensemble. Iteration t uses check_chains[t] on the
/// variable-to-check messages, var_chains[t] on [channel, dv-1 check
/// messages] and decision_tables[t] for the hard decision.
struct LdpcEnsembleDesign {
  int message_bits = 4;
  int max_iter = 0;
  int dv = 0;
  int dc = 0;

  // Channel the tables were designed for.
  double design_ebn0_db = 0.0;  // NaN when designed from a bare DMC
  double code_rate = 0.5;
  double noise_std = 0.0;
  double clip_amplitude = 0.0;
  int num_bins = 0;

  std::vector<std::uint16_t> channel_lut;     // bin -> channel message
  MessageDist channel_message;                // p(channel message | x)
  std::vector<std::uint8_t> channel_decision; // channel message -> bit
  std::vector<LutChain> check_chains;
  std::vector<LutChain> var_chains;
  /// decision_tables[t][u * R + r]: bit decided from the variable-chain output
  /// u (channel + dv-1 check messages) and the last check message r.
  std::vector<std::vector<std::uint8_t>> decision_tables;
  std::vector<double> error_prob_trace;

  int levels() const { return 1 << message_bits; }
  /// Tables of iteration t; iterations past max_iter reuse the last ones.
  std::size_t table_index(int t) const {
    return static_cast<std::size_t>(t < max_iter ? t : max_iter - 1);
  }
};

/// Discrete density evolution under the all-zero / symmetric convention:
/// checks are BalancedTree cascades, variables LeftFold cascades with the
/// channel message first. The DMC must have a binary input, bit 0 first.
LdpcEnsembleDesign design_decoder(const DmcSpec& dmc, int dv, int dc, int message_bits, int max_iter);

/// Same, for BPSK over the discretized AWGN channel at the given Eb/N0.
LdpcEnsembleDesign design_decoder_awgn(double ebn0_db, double code_rate, int num_bins, int dv, int dc,
                                       int message_bits, int max_iter, double clip_multiplier = 3.0);

/// Smallest Eb/N0 (within tol_db) at which the designed decoder's error
/// trace ends below `target` after max_iter iterations, by bisection over
/// [lo_db, hi_db]. Throws NumericalError if hi_db does not converge.
double decoding_threshold(double code_rate, int num_bins, int dv, int dc, int message_bits, int max_iter,
                          double target = 1e-6, double clip_multiplier = 3.0, double lo_db = -1.0,
                          double hi_db = 6.0, double tol_db = 0.01);

/// Header "design <message_bits> <max_iter> <dv> <dc>", then the channel
/// table, the error trace and every iteration's LUT chains.
void write_design(std::ostream& os, const LdpcEnsembleDesign& d);
LdpcEnsembleDesign read_design(std::istream& is);

struct DecodeResult {
  std::vector<std::uint8_t> bits;
  int iterations_used = 0;
  bool converged = false;
};

/// Integer-only message passing through the designed tables.
class LutDecoder {
 public:
  LutDecoder(const LdpcCode& code, const LdpcEnsembleDesign& design);
  DecodeResult decode(std::span<const int> channel_bins, int max_iter) const;

 private:
  const LdpcCode& code_;
  const LdpcEnsembleDesign& design_;
};

/// Channel LLR log p(y|0)/p(y|1) of every output bin, clamped to +-25.
std::vector<double> channel_llrs(const DmcSpec& dmc);

enum class MinSumCorrection { Plain, TableCorrected };

class MinSumDecoder {
 public:
  MinSumDecoder(const LdpcCode& code, const DmcSpec& dmc, MinSumCorrection correction);
  DecodeResult decode(std::span<const int> channel_bins, int max_iter) const;

 private:
  const LdpcCode& code_;
  std::vector<double> llr_;
  MinSumCorrection correction_;
};

/// Log-domain sum-product.
class BpDecoder {
 public:
  BpDecoder(const LdpcCode& code, const DmcSpec& dmc);
  DecodeResult decode(std::span<const int> channel_bins, int max_iter) const;
  /// A-posteriori LLRs after exactly `iterations` iterations (no early stop).
  std::vector<double> posteriors(std::span<const int> channel_bins, int iterations) const;

 private:
  const LdpcCode& code_;
  std::vector<double> llr_;
};

DecodeResult decode_lut(const LdpcCode& code, const LdpcEnsembleDesign& design,
                        std::span<const int> channel_bins, int max_iter);
DecodeResult decode_min_sum(const LdpcCode& code, const DmcSpec& dmc, std::span<const int> channel_bins,
                            int max_iter, MinSumCorrection correction);
DecodeResult decode_bp(const LdpcCode& code, const DmcSpec& dmc, std::span<const int> channel_bins,
                       int max_iter);

/// log(1 + e^-x) sampled at x = 0, 1/8, ..., 63/8; zero beyond the table.
double jacobian_correction(double x);

}  // namespace ibq

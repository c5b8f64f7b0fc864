#pragma once

// Monte-Carlo bit/frame error rates over the discretized BPSK/AWGN channel.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ibq/decoder.hpp"
#include "ibq/ldpc.hpp"

namespace ibq {

enum class DecoderKind { Lut, MinSum, MinSumCorrected, Bp };

/// "lut", "minsum", "minsum-corrected", "bp".
DecoderKind parse_decoder(const std::string& tag);
std::string decoder_tag(DecoderKind kind);

struct BerPoint {
  double ebn0_db = 0.0;
  long long frames = 0;
  long long bit_errors = 0;
  long long frame_errors = 0;
  double avg_iterations = 0.0;
  std::size_t frame_length = 0;
  /// Frames that reported convergence but violate a parity check; always 0
  /// for a correct decoder.
  long long false_convergences = 0;
  /// Sum over frames of (bit errors in the frame)^2, for frame-level variance.
  long long bit_errors_sq = 0;

  double ber() const;
  double fer() const;
};

/// Normal-approximation confidence interval of the BER with the frame as the
/// independent trial (bit errors of one frame are strongly correlated).
/// z = 1.96 gives 95%. The lower end is clamped at 0.
struct BerInterval {
  double lower = 0.0;
  double upper = 0.0;
};
BerInterval ber_interval(const BerPoint& p, double z = 1.96);

struct BerOptions {
  DecoderKind decoder = DecoderKind::Lut;
  int max_iter = 50;
  long long max_frames = 10000;
  /// Stop a point once this many frame errors were seen (0: never).
  long long max_errors = 0;
  std::uint64_t seed = 1;
  /// Transmit random codewords instead of the all-zero word.
  bool random_codewords = false;
  int num_bins = 128;
  double clip_multiplier = 3.0;
  // LUT decoder tables. In order of precedence: fixed_design, a design at
  // design_ebn0_db, a fresh design at every simulated point
  // (design_per_point), and by default a single design at the decoding
  // threshold. Whenever one design serves all points, its bin geometry is
  // used to discretize the channel at every point.
  int message_bits = 4;
  int design_iters = 50;
  std::optional<LdpcEnsembleDesign> fixed_design;
  std::optional<double> design_ebn0_db;
  bool design_per_point = false;
  /// Frames decoded per parallel batch.
  int batch = 64;
};

/// The single design serving every point, if the options call for one.
std::optional<LdpcEnsembleDesign> shared_design(const LdpcCode& code, const BerOptions& options);

/// The channel simulated at one Eb/N0: the design's bin geometry when a
/// shared design is given, else the default clip range for that Eb/N0.
DmcSpec simulation_channel(const LdpcCode& code, double ebn0_db, const BerOptions& options,
                           const LdpcEnsembleDesign* shared);

/// Frame f of point i uses the generator stream (seed, i, f). Batches are
/// reduced in frame order, so results do not depend on the thread count.
std::vector<BerPoint> ber_sweep(const LdpcCode& code, std::span<const double> ebn0_list,
                                const BerOptions& options);

/// "decoder,ebn0_db,frames,bit_errors,frame_errors,ber,fer,avg_iterations".
void write_ber_csv(std::ostream& os, DecoderKind kind, std::span<const BerPoint> points);

}  // namespace ibq

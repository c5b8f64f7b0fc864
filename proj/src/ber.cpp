#include "ibq/ber.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <ostream>
#include <stdexcept>

#include "ibq/parallel.hpp"
#include "ibq/rng.hpp"
#include "text_io.hpp"

namespace ibq {

DecoderKind parse_decoder(const std::string& tag) {
  if (tag == "lut") return DecoderKind::Lut;
  if (tag == "minsum") return DecoderKind::MinSum;
  if (tag == "minsum-corrected") return DecoderKind::MinSumCorrected;
  if (tag == "bp") return DecoderKind::Bp;
  throw std::invalid_argument("unknown decoder '" + tag + "'");
}

std::string decoder_tag(DecoderKind kind) {
  switch (kind) {
    case DecoderKind::Lut: return "lut";
    case DecoderKind::MinSum: return "minsum";
    case DecoderKind::MinSumCorrected: return "minsum-corrected";
    case DecoderKind::Bp: return "bp";
  }
  return "?";
}

double BerPoint::ber() const {
  const double bits = static_cast<double>(frames) * static_cast<double>(frame_length);
  return bits > 0 ? static_cast<double>(bit_errors) / bits : 0.0;
}

double BerPoint::fer() const {
  return frames > 0 ? static_cast<double>(frame_errors) / static_cast<double>(frames) : 0.0;
}

BerInterval ber_interval(const BerPoint& p, double z) {
  if (p.frames == 0 || p.frame_length == 0) return {0.0, 1.0};
  const double frames = static_cast<double>(p.frames);
  const double len = static_cast<double>(p.frame_length);
  const double mean = static_cast<double>(p.bit_errors) / frames;
  const double var = std::max(0.0, static_cast<double>(p.bit_errors_sq) / frames - mean * mean);
  const double half = z * std::sqrt(var / frames) / len;
  return {std::max(0.0, p.ber() - half), p.ber() + half};
}

std::optional<LdpcEnsembleDesign> shared_design(const LdpcCode& code, const BerOptions& options) {
  if (options.fixed_design) return options.fixed_design;
  if (options.decoder != DecoderKind::Lut || options.design_per_point) return std::nullopt;
  const double rate = code.design_rate();
  const double ebn0 = options.design_ebn0_db
                          ? *options.design_ebn0_db
                          : decoding_threshold(rate, options.num_bins, code.var_degree(), code.check_degree(),
                                               options.message_bits, options.design_iters, 1e-6,
                                               options.clip_multiplier);
  return design_decoder_awgn(ebn0, rate, options.num_bins, code.var_degree(), code.check_degree(),
                             options.message_bits, options.design_iters, options.clip_multiplier);
}

DmcSpec simulation_channel(const LdpcCode& code, double ebn0_db, const BerOptions& options,
                           const LdpcEnsembleDesign* shared) {
  const double rate = code.design_rate();
  if (shared) {
    if (!(shared->clip_amplitude > 0.0)) throw std::invalid_argument("design carries no AWGN bin geometry");
    return build_bpsk_awgn_clipped(ebn0_to_noise_std(ebn0_db, rate), shared->num_bins, shared->clip_amplitude);
  }
  return build_bpsk_awgn(ebn0_db, rate, options.num_bins, options.clip_multiplier);
}

namespace {

struct FrameStat {
  long long bit_errors = 0;
  bool frame_error = false;
  int iterations = 0;
  bool false_convergence = false;
};

std::vector<double> row_cdf(const DmcSpec& dmc, std::size_t x) {
  std::vector<double> cdf(dmc.num_outputs());
  double acc = 0.0;
  for (std::size_t y = 0; y < cdf.size(); ++y) cdf[y] = acc += dmc.transition(x, y);
  return cdf;
}

int sample_bin(const std::vector<double>& cdf, double u) {
  const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
  return static_cast<int>(std::min<std::ptrdiff_t>(it - cdf.begin(), static_cast<std::ptrdiff_t>(cdf.size()) - 1));
}

}  // namespace

std::vector<BerPoint> ber_sweep(const LdpcCode& code, std::span<const double> ebn0_list,
                                const BerOptions& options) {
  if (options.max_frames < 0 || options.max_errors < 0) throw std::invalid_argument("frame limits must be >= 0");
  if (options.batch < 1) throw std::invalid_argument("batch size must be positive");
  std::vector<BerPoint> out;
  if (options.max_frames == 0) return out;
  const std::size_t n = code.n();
  std::optional<LdpcEncoder> encoder;
  if (options.random_codewords) encoder.emplace(code);
  const std::optional<LdpcEnsembleDesign> shared = shared_design(code, options);

  for (std::size_t i = 0; i < ebn0_list.size(); ++i) {
    const double ebn0 = ebn0_list[i];
    const DmcSpec dmc = simulation_channel(code, ebn0, options, shared ? &*shared : nullptr);
    const auto cdf0 = row_cdf(dmc, 0);
    const auto cdf1 = row_cdf(dmc, 1);

    std::optional<LdpcEnsembleDesign> design;
    std::function<DecodeResult(std::span<const int>)> decode;
    std::optional<LutDecoder> lut;
    std::optional<MinSumDecoder> ms;
    std::optional<BpDecoder> bp;
    switch (options.decoder) {
      case DecoderKind::Lut:
        if (shared) {
          design = *shared;
        } else {
          design = design_decoder(dmc, code.var_degree(), code.check_degree(), options.message_bits,
                                  options.design_iters);
          design->design_ebn0_db = ebn0;
          design->code_rate = code.design_rate();
        }
        lut.emplace(code, *design);
        decode = [&](std::span<const int> b) { return lut->decode(b, options.max_iter); };
        break;
      case DecoderKind::MinSum:
      case DecoderKind::MinSumCorrected:
        ms.emplace(code, dmc,
                   options.decoder == DecoderKind::MinSum ? MinSumCorrection::Plain : MinSumCorrection::TableCorrected);
        decode = [&](std::span<const int> b) { return ms->decode(b, options.max_iter); };
        break;
      case DecoderKind::Bp:
        bp.emplace(code, dmc);
        decode = [&](std::span<const int> b) { return bp->decode(b, options.max_iter); };
        break;
    }

    BerPoint point;
    point.ebn0_db = ebn0;
    point.frame_length = n;
    long long iterations = 0;
    long long next_frame = 0;
    bool done = false;
    while (!done && next_frame < options.max_frames) {
      const long long count = std::min<long long>(options.batch, options.max_frames - next_frame);
      std::vector<FrameStat> stats(static_cast<std::size_t>(count));
      parallel_for(stats.size(), [&](std::size_t k) {
        auto rng = stream_rng(options.seed, i, static_cast<std::uint64_t>(next_frame) + k);
        std::vector<std::uint8_t> word(n, 0);
        if (encoder) {
          std::vector<std::uint8_t> info(encoder->k());
          for (auto& b : info) b = static_cast<std::uint8_t>(rng() >> 63);
          word = encoder->encode(info);
        }
        std::vector<int> bins(n);
        for (std::size_t v = 0; v < n; ++v) bins[v] = sample_bin(word[v] ? cdf1 : cdf0, uniform01(rng));
        const DecodeResult r = decode(bins);
        FrameStat& s = stats[k];
        for (std::size_t v = 0; v < n; ++v) s.bit_errors += r.bits[v] != word[v];
        s.frame_error = s.bit_errors > 0;
        s.iterations = r.iterations_used;
        s.false_convergence = r.converged && !code.satisfies(r.bits);
      });
      for (const FrameStat& s : stats) {
        ++point.frames;
        point.bit_errors += s.bit_errors;
        point.bit_errors_sq += s.bit_errors * s.bit_errors;
        point.frame_errors += s.frame_error;
        point.false_convergences += s.false_convergence;
        iterations += s.iterations;
        if (options.max_errors > 0 && point.frame_errors >= options.max_errors) {
          done = true;
          break;
        }
      }
      next_frame += count;
    }
    point.avg_iterations = static_cast<double>(iterations) / static_cast<double>(point.frames);
    out.push_back(point);
  }
  return out;
}

void write_ber_csv(std::ostream& os, DecoderKind kind, std::span<const BerPoint> points) {
  using detail::format_double;
  os << "decoder,ebn0_db,frames,bit_errors,frame_errors,ber,fer,avg_iterations\n";
  for (const auto& p : points) {
    os << decoder_tag(kind) << ',' << format_double(p.ebn0_db) << ',' << p.frames << ',' << p.bit_errors << ','
       << p.frame_errors << ',' << format_double(p.ber()) << ',' << format_double(p.fer()) << ','
       << format_double(p.avg_iterations) << '\n';
  }
}

}  // namespace ibq

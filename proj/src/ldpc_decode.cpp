#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

#include "ibq/decoder.hpp"

namespace ibq {

namespace {

constexpr double kLlrClamp = 25.0;

void check_bins(std::span<const int> bins, std::size_t n, std::size_t num_bins) {
  if (bins.size() != n) throw std::invalid_argument("received word length does not match the code");
  for (int b : bins) {
    if (b < 0 || static_cast<std::size_t>(b) >= num_bins) throw std::invalid_argument("channel bin out of range");
  }
}

double clamp_llr(double v) { return std::clamp(v, -kLlrClamp, kLlrClamp); }

double sign_min(double a, double b) {
  const double m = std::min(std::abs(a), std::abs(b));
  return (a < 0) != (b < 0) ? -m : m;
}

double box_plus_exact(double a, double b) {
  return sign_min(a, b) + std::log1p(std::exp(-std::abs(a + b))) - std::log1p(std::exp(-std::abs(a - b)));
}

double box_plus_table(double a, double b) {
  return sign_min(a, b) + jacobian_correction(std::abs(a + b)) - jacobian_correction(std::abs(a - b));
}

enum class CheckRule { MinSum, Table, Exact };

/// Flooding schedule shared by the floating-point decoders. Returns the
/// a-posteriori LLRs of the last iteration run through `posterior`.
DecodeResult run_float(const LdpcCode& code, std::span<const double> bin_llr, std::span<const int> bins,
                       int max_iter, CheckRule rule, bool early_stop, std::vector<double>* posterior) {
  check_bins(bins, code.n(), bin_llr.size());
  if (max_iter < 0) throw std::invalid_argument("iteration count must be non-negative");
  const std::size_t n = code.n();
  std::vector<double> ch(n);
  DecodeResult res;
  res.bits.resize(n);
  for (std::size_t v = 0; v < n; ++v) {
    ch[v] = bin_llr[bins[v]];
    res.bits[v] = ch[v] < 0 ? 1 : 0;
  }
  if (posterior) *posterior = ch;
  if (early_stop && code.satisfies(res.bits)) {
    res.converged = true;
    return res;
  }
  std::vector<double> vc(code.num_edges());
  std::vector<double> cv(code.num_edges(), 0.0);
  for (std::size_t e = 0; e < vc.size(); ++e) vc[e] = ch[code.edge_var(e)];
  std::vector<double> fwd, bwd;

  for (int t = 1; t <= max_iter; ++t) {
    for (std::size_t c = 0; c < code.m(); ++c) {
      const int lo = code.check_offset(c);
      const int hi = code.check_offset(c + 1);
      const int deg = hi - lo;
      if (deg == 1) {
        cv[lo] = 0.0;
        continue;
      }
      if (rule == CheckRule::MinSum) {
        double min1 = kLlrClamp * 4, min2 = kLlrClamp * 4;
        int arg = lo;
        bool negative = false;
        for (int e = lo; e < hi; ++e) {
          const double a = std::abs(vc[e]);
          negative ^= vc[e] < 0;
          if (a < min1) {
            min2 = min1;
            min1 = a;
            arg = e;
          } else if (a < min2) {
            min2 = a;
          }
        }
        for (int e = lo; e < hi; ++e) {
          const double mag = e == arg ? min2 : min1;
          cv[e] = (negative != (vc[e] < 0)) ? -mag : mag;
        }
        continue;
      }
      auto op = rule == CheckRule::Exact ? box_plus_exact : box_plus_table;
      fwd.assign(static_cast<std::size_t>(deg), 0.0);
      bwd.assign(static_cast<std::size_t>(deg), 0.0);
      fwd[0] = vc[lo];
      for (int k = 1; k < deg; ++k) fwd[k] = op(fwd[k - 1], vc[lo + k]);
      bwd[deg - 1] = vc[hi - 1];
      for (int k = deg - 2; k >= 0; --k) bwd[k] = op(bwd[k + 1], vc[lo + k]);
      cv[lo] = bwd[1];
      cv[hi - 1] = fwd[deg - 2];
      for (int k = 1; k + 1 < deg; ++k) cv[lo + k] = op(fwd[k - 1], bwd[k + 1]);
    }
    for (std::size_t v = 0; v < n; ++v) {
      double total = ch[v];
      for (int e : code.var_edges()[v]) total += cv[e];
      for (int e : code.var_edges()[v]) vc[e] = clamp_llr(total - cv[e]);
      res.bits[v] = total < 0 ? 1 : 0;
      if (posterior) (*posterior)[v] = total;
    }
    res.iterations_used = t;
    if (early_stop && code.satisfies(res.bits)) {
      res.converged = true;
      return res;
    }
  }
  res.converged = code.satisfies(res.bits);
  return res;
}

}  // namespace

double jacobian_correction(double x) {
  static const std::array<double, 64> table = [] {
    std::array<double, 64> t{};
    for (std::size_t i = 0; i < t.size(); ++i) t[i] = std::log1p(std::exp(-0.125 * static_cast<double>(i)));
    return t;
  }();
  const double idx = std::floor(x * 8.0 + 0.5);
  if (!(idx < 64.0)) return 0.0;
  return table[static_cast<std::size_t>(std::max(idx, 0.0))];
}

std::vector<double> channel_llrs(const DmcSpec& dmc) {
  if (dmc.num_inputs() != 2) throw std::invalid_argument("LLRs need a binary-input channel");
  std::vector<double> out(dmc.num_outputs());
  for (std::size_t y = 0; y < out.size(); ++y) {
    const double p0 = dmc.transition(0, y);
    const double p1 = dmc.transition(1, y);
    if (p0 == 0.0 && p1 == 0.0) out[y] = 0.0;
    else if (p1 == 0.0) out[y] = kLlrClamp;
    else if (p0 == 0.0) out[y] = -kLlrClamp;
    else out[y] = clamp_llr(std::log(p0) - std::log(p1));
  }
  return out;
}

LutDecoder::LutDecoder(const LdpcCode& code, const LdpcEnsembleDesign& design) : code_(code), design_(design) {
  if (code.var_degree() != design.dv || code.check_degree() != design.dc) {
    throw std::invalid_argument("code degrees do not match the decoder design");
  }
}

DecodeResult LutDecoder::decode(std::span<const int> channel_bins, int max_iter) const {
  const LdpcCode& code = code_;
  const LdpcEnsembleDesign& d = design_;
  check_bins(channel_bins, code.n(), d.channel_lut.size());
  if (max_iter < 0) throw std::invalid_argument("iteration count must be non-negative");
  const std::size_t n = code.n();
  const int dv = d.dv;
  const int dc = d.dc;

  std::vector<int> ch(n);
  DecodeResult res;
  res.bits.resize(n);
  for (std::size_t v = 0; v < n; ++v) {
    ch[v] = d.channel_lut[channel_bins[v]];
    res.bits[v] = d.channel_decision[ch[v]];
  }
  if (code.satisfies(res.bits)) {
    res.converged = true;
    return res;
  }
  std::vector<int> vc(code.num_edges());
  std::vector<int> cv(code.num_edges(), 0);
  for (std::size_t e = 0; e < vc.size(); ++e) vc[e] = ch[code.edge_var(e)];
  std::array<int, 64> in{};

  for (int t = 0; t < max_iter; ++t) {
    const std::size_t idx = d.table_index(t);
    const LutChain& check = d.check_chains[idx];
    const LutChain& var = d.var_chains[idx];
    const auto& decision = d.decision_tables[idx];
    const std::size_t r_size = check.output.size();

    for (std::size_t c = 0; c < code.m(); ++c) {
      const int lo = code.check_offset(c);
      for (int k = 0; k < dc; ++k) {
        int j = 0;
        for (int o = 0; o < dc; ++o) {
          if (o != k) in[j++] = vc[lo + o];
        }
        cv[lo + k] = check.evaluate({in.data(), static_cast<std::size_t>(dc - 1)});
      }
    }
    for (std::size_t v = 0; v < n; ++v) {
      const auto& edges = code.var_edges()[v];
      in[0] = ch[v];
      for (int k = 0; k < dv; ++k) {
        int j = 1;
        for (int o = 0; o < dv; ++o) {
          if (o != k) in[j++] = cv[edges[o]];
        }
        vc[edges[k]] = var.evaluate({in.data(), static_cast<std::size_t>(dv)});
      }
      for (int o = 0; o + 1 < dv; ++o) in[1 + o] = cv[edges[o]];
      const int u = var.evaluate({in.data(), static_cast<std::size_t>(dv)});
      res.bits[v] = decision[static_cast<std::size_t>(u) * r_size + cv[edges[dv - 1]]];
    }
    res.iterations_used = t + 1;
    if (code.satisfies(res.bits)) {
      res.converged = true;
      return res;
    }
  }
  return res;
}

MinSumDecoder::MinSumDecoder(const LdpcCode& code, const DmcSpec& dmc, MinSumCorrection correction)
    : code_(code), llr_(channel_llrs(dmc)), correction_(correction) {}

DecodeResult MinSumDecoder::decode(std::span<const int> channel_bins, int max_iter) const {
  return run_float(code_, llr_, channel_bins, max_iter,
                   correction_ == MinSumCorrection::Plain ? CheckRule::MinSum : CheckRule::Table, true, nullptr);
}

BpDecoder::BpDecoder(const LdpcCode& code, const DmcSpec& dmc) : code_(code), llr_(channel_llrs(dmc)) {}

DecodeResult BpDecoder::decode(std::span<const int> channel_bins, int max_iter) const {
  return run_float(code_, llr_, channel_bins, max_iter, CheckRule::Exact, true, nullptr);
}

std::vector<double> BpDecoder::posteriors(std::span<const int> channel_bins, int iterations) const {
  std::vector<double> out;
  run_float(code_, llr_, channel_bins, iterations, CheckRule::Exact, false, &out);
  return out;
}

DecodeResult decode_lut(const LdpcCode& code, const LdpcEnsembleDesign& design, std::span<const int> channel_bins,
                        int max_iter) {
  return LutDecoder(code, design).decode(channel_bins, max_iter);
}

DecodeResult decode_min_sum(const LdpcCode& code, const DmcSpec& dmc, std::span<const int> channel_bins,
                            int max_iter, MinSumCorrection correction) {
  return MinSumDecoder(code, dmc, correction).decode(channel_bins, max_iter);
}

DecodeResult decode_bp(const LdpcCode& code, const DmcSpec& dmc, std::span<const int> channel_bins,
                       int max_iter) {
  return BpDecoder(code, dmc).decode(channel_bins, max_iter);
}

}  // namespace ibq

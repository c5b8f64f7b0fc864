#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "ibq/ber.hpp"
#include "ibq/channel.hpp"
#include "ibq/decoder.hpp"
#include "ibq/ldpc.hpp"
#include "ibq/rng.hpp"

using namespace ibq;

namespace {

const LdpcCode& code1000() {
  static const LdpcCode code = construct_regular_ldpc(1000, 3, 6, 7);
  return code;
}

const LdpcEnsembleDesign& design15() {
  static const LdpcEnsembleDesign d = design_decoder_awgn(1.5, 0.5, 128, 3, 6, 4, 50);
  return d;
}

int gf2_rank(const LdpcCode& code) {
  std::vector<std::vector<std::uint8_t>> h(code.m(), std::vector<std::uint8_t>(code.n(), 0));
  for (std::size_t c = 0; c < code.m(); ++c) {
    for (int v : code.checks()[c]) h[c][v] = 1;
  }
  int rank = 0;
  for (std::size_t col = 0; col < code.n() && rank < static_cast<int>(code.m()); ++col) {
    std::size_t r = rank;
    while (r < code.m() && !h[r][col]) ++r;
    if (r == code.m()) continue;
    std::swap(h[r], h[rank]);
    for (std::size_t o = 0; o < code.m(); ++o) {
      if (o != static_cast<std::size_t>(rank) && h[o][col]) {
        for (std::size_t k = 0; k < code.n(); ++k) h[o][k] ^= h[rank][k];
      }
    }
    ++rank;
  }
  return rank;
}

}  // namespace

TEST_CASE("small regular code degrees") {
  const LdpcCode c = construct_regular_ldpc(8, 3, 6, 1);
  CHECK(c.m() == 4);
  CHECK(c.var_degree() == 3);
  CHECK(c.check_degree() == 6);
  for (const auto& row : c.checks()) CHECK(row.size() == 6);
}

TEST_CASE("length-1000 code") {
  const LdpcCode& c = code1000();
  CHECK(c.m() == 500);
  CHECK(c.var_degree() == 3);
  CHECK(c.check_degree() == 6);
  CHECK(c.four_cycles() == 0);
  const int rank = gf2_rank(c);
  CHECK(rank <= 500);
  const LdpcEncoder enc(c);
  CHECK(static_cast<int>(enc.rank()) == rank);
  CHECK(enc.k() >= 500);
  CHECK(construct_regular_ldpc(1000, 3, 6, 7) == c);
  CHECK_FALSE(construct_regular_ldpc(1000, 3, 6, 8) == c);
}

TEST_CASE("code construction errors") {
  CHECK_THROWS_AS(construct_regular_ldpc(10, 3, 7, 1), std::invalid_argument);
  CHECK_THROWS_AS(construct_regular_ldpc(0, 3, 6, 1), std::invalid_argument);
  CHECK_THROWS_AS(LdpcCode(4, {{0, 0, 1}}), std::invalid_argument);
  CHECK_THROWS_AS(LdpcCode(4, {{0, 7}}), std::invalid_argument);
}

TEST_CASE("four-cycle counting") {
  const LdpcCode c(4, {{0, 1, 2}, {0, 1, 3}, {2, 3}});
  CHECK(c.four_cycles() == 1);  // checks 0 and 1 share variables 0 and 1
  CHECK(c.var_degree() == 2);
  CHECK(c.check_degree() == 0);
}

TEST_CASE("encoded words satisfy every check") {
  const LdpcCode& c = code1000();
  const LdpcEncoder enc(c);
  std::mt19937_64 rng(3);
  for (int t = 0; t < 20; ++t) {
    std::vector<std::uint8_t> info(enc.k());
    for (auto& b : info) b = rng() & 1U;
    const auto word = enc.encode(info);
    CHECK(c.satisfies(word));
  }
  std::vector<std::uint8_t> zero(c.n(), 0);
  CHECK(c.satisfies(zero));
  zero[5] = 1;
  CHECK_FALSE(c.satisfies(zero));
  CHECK_THROWS_AS(enc.encode(std::vector<std::uint8_t>(3)), std::invalid_argument);
}

TEST_CASE("BP on a cycle-free code is exact bitwise MAP") {
  const LdpcCode c(7, {{0, 1, 2}, {2, 3, 4}, {4, 5, 6}});
  const DmcSpec dmc = build_bpsk_awgn(0.0, 0.5, 16);
  const BpDecoder bp(c, dmc);
  std::mt19937_64 rng(7);
  for (int t = 0; t < 20; ++t) {
    std::vector<int> bins(7);
    for (auto& b : bins) b = static_cast<int>(rng() % 16);
    std::vector<double> p0(7, 0.0), p1(7, 0.0);
    for (int w = 0; w < 128; ++w) {
      std::vector<std::uint8_t> word(7);
      for (int v = 0; v < 7; ++v) word[v] = (w >> v) & 1;
      if (!c.satisfies(word)) continue;
      double lik = 1.0;
      for (int v = 0; v < 7; ++v) lik *= dmc.transition(word[v], bins[v]);
      for (int v = 0; v < 7; ++v) (word[v] ? p1 : p0)[v] += lik;
    }
    const auto llr = bp.posteriors(bins, 10);
    for (int v = 0; v < 7; ++v) CHECK(llr[v] == doctest::Approx(std::log(p0[v] / p1[v])).epsilon(1e-9));
  }
}

TEST_CASE("correction table") {
  CHECK(jacobian_correction(0.0) == doctest::Approx(std::log(2.0)));
  CHECK(jacobian_correction(0.125) == doctest::Approx(std::log1p(std::exp(-0.125))));
  CHECK(jacobian_correction(0.06) == doctest::Approx(std::log(2.0)));
  CHECK(jacobian_correction(0.07) == doctest::Approx(std::log1p(std::exp(-0.125))));
  CHECK(jacobian_correction(7.875) == doctest::Approx(std::log1p(std::exp(-7.875))));
  CHECK(jacobian_correction(8.0) == 0.0);
  CHECK(jacobian_correction(100.0) == 0.0);
}

TEST_CASE("channel LLRs are clamped") {
  const auto llr = channel_llrs(build_bpsk_awgn(10.0, 0.5, 64));
  CHECK(llr.front() == -25.0);
  CHECK(llr.back() == 25.0);
  CHECK_THROWS_AS(channel_llrs(build_ask_awgn(4, 1.0, 16)), std::invalid_argument);
}

TEST_CASE("density evolution traces") {
  const auto high = design_decoder_awgn(20.0, 0.5, 128, 3, 6, 4, 50);
  CHECK(std::min(high.error_prob_trace[0], high.error_prob_trace[1]) < 1e-9);

  const auto good = design_decoder_awgn(2.0, 0.5, 128, 3, 6, 4, 50);
  REQUIRE(good.error_prob_trace.size() == 50);
  CHECK(good.error_prob_trace.back() < 1e-6);
  for (std::size_t t = 1; t < 50; ++t) CHECK(good.error_prob_trace[t] <= good.error_prob_trace[t - 1] + 1e-9);
  for (double p : good.error_prob_trace) CHECK((p >= 0.0 && p <= 0.5));
  CHECK(good.error_prob_trace[0] == doctest::Approx(0.070710588268).epsilon(1e-8));
  CHECK(good.error_prob_trace[9] == doctest::Approx(0.000622846949368).epsilon(1e-6));

  const auto bad = design_decoder_awgn(0.2, 0.5, 128, 3, 6, 4, 50);
  CHECK(bad.error_prob_trace.back() > 1e-3);
  CHECK(bad.error_prob_trace.back() == doctest::Approx(0.123751990528).epsilon(1e-6));

  CHECK(good.levels() == 16);
  CHECK(good.channel_lut.size() == 128);
  for (const auto& chain : good.check_chains) CHECK(chain.output.size() == 16);
}

TEST_CASE("decoding threshold") {
  const double thr = decoding_threshold(0.5, 128, 3, 6, 4, 50);
  CHECK(std::abs(thr - 1.26953125) < 0.011);
  CHECK(design_decoder_awgn(thr, 0.5, 128, 3, 6, 4, 50).error_prob_trace.back() < 1e-6);
}

TEST_CASE("design file round trip") {
  const auto& d = design15();
  std::stringstream ss;
  write_design(ss, d);
  const std::string text = ss.str();
  CHECK(text.rfind("design 4 50 3 6\n", 0) == 0);
  const auto back = read_design(ss);
  std::stringstream again;
  write_design(again, back);
  CHECK(again.str() == text);
  CHECK(back.channel_lut == d.channel_lut);
  CHECK(back.decision_tables == d.decision_tables);
  std::istringstream truncated(text.substr(0, text.size() / 2));
  CHECK_THROWS(read_design(truncated));
}

TEST_CASE("noiseless frames decode immediately") {
  const LdpcCode& c = code1000();
  const DmcSpec dmc = build_bpsk_awgn(1.5, 0.5, 128);
  const std::vector<int> bins(c.n(), 127);
  for (const DecodeResult& r : {decode_lut(c, design15(), bins, 50), decode_bp(c, dmc, bins, 50),
                                decode_min_sum(c, dmc, bins, 50, MinSumCorrection::Plain),
                                decode_min_sum(c, dmc, bins, 50, MinSumCorrection::TableCorrected)}) {
    CHECK(r.converged);
    CHECK(r.iterations_used == 0);
    CHECK(std::count(r.bits.begin(), r.bits.end(), 1) == 0);
  }
}

TEST_CASE("a single flipped bin is corrected") {
  const LdpcCode& c = code1000();
  const DmcSpec dmc = build_bpsk_awgn(1.5, 0.5, 128);
  std::vector<int> bins(c.n(), 127);
  bins[417] = 0;
  for (const DecodeResult& r : {decode_lut(c, design15(), bins, 50), decode_bp(c, dmc, bins, 50),
                                decode_min_sum(c, dmc, bins, 50, MinSumCorrection::Plain)}) {
    CHECK(r.converged);
    CHECK(r.iterations_used >= 1);
    CHECK(std::count(r.bits.begin(), r.bits.end(), 1) == 0);
  }
}

TEST_CASE("decoders validate their inputs") {
  const LdpcCode& c = code1000();
  CHECK_THROWS_AS(decode_lut(c, design15(), std::vector<int>(10, 0), 5), std::invalid_argument);
  std::vector<int> bins(c.n(), 0);
  bins[3] = 128;
  CHECK_THROWS_AS(decode_lut(c, design15(), bins, 5), std::invalid_argument);
  CHECK_THROWS_AS(decode_bp(c, build_bpsk_awgn(1.5, 0.5, 128), bins, 5), std::invalid_argument);
  const LdpcCode other = construct_regular_ldpc(1000, 4, 8, 1);
  CHECK_THROWS_AS(LutDecoder(other, design15()), std::invalid_argument);
}

TEST_CASE("first-iteration error rate agrees with density evolution") {
  // No 4-cycles, so the first iteration sees independent messages.
  const LdpcCode& c = code1000();
  const auto& d = design15();
  const DmcSpec dmc = build_bpsk_awgn(1.5, 0.5, 128);
  std::vector<double> cdf(128);
  double acc = 0.0;
  for (int y = 0; y < 128; ++y) cdf[y] = acc += dmc.transition(0, y);
  const LutDecoder dec(c, d);
  long long errors = 0, bits = 0;
  for (int f = 0; f < 200; ++f) {
    auto rng = stream_rng(99, 0, static_cast<std::uint64_t>(f));
    std::vector<int> rx(c.n());
    for (auto& b : rx) {
      b = static_cast<int>(std::upper_bound(cdf.begin(), cdf.end(), uniform01(rng)) - cdf.begin());
      b = std::min(b, 127);
    }
    const auto r = dec.decode(rx, 1);
    errors += std::count(r.bits.begin(), r.bits.end(), 1);
    bits += static_cast<long long>(c.n());
  }
  const double p = d.error_prob_trace[0];
  const double sd = std::sqrt(p * (1 - p) / static_cast<double>(bits));
  const double rate = static_cast<double>(errors) / static_cast<double>(bits);
  MESSAGE("empirical " << rate << " vs density evolution " << p);
  CHECK(std::abs(rate - p) < 3.0 * sd);
}

TEST_CASE("converged frames satisfy the checks for random codewords") {
  const LdpcCode& c = code1000();
  BerOptions o;
  o.max_frames = 40;
  o.random_codewords = true;
  o.fixed_design = design15();
  const std::vector<double> snr{3.0};
  for (DecoderKind k : {DecoderKind::Lut, DecoderKind::MinSum, DecoderKind::MinSumCorrected, DecoderKind::Bp}) {
    o.decoder = k;
    const auto pts = ber_sweep(c, snr, o);
    CHECK(pts[0].false_convergences == 0);
    CHECK(pts[0].frames == 40);
  }
}

TEST_CASE("all-zero and random-codeword BER agree") {
  const LdpcCode& c = code1000();
  BerOptions o;
  o.max_frames = 400;
  o.fixed_design = design15();
  const std::vector<double> snr{2.0};
  const BerPoint zero = ber_sweep(c, snr, o)[0];
  o.random_codewords = true;
  const BerPoint random = ber_sweep(c, snr, o)[0];
  const auto a = ber_interval(zero), b = ber_interval(random);
  MESSAGE("all-zero " << zero.ber() << " random " << random.ber());
  CHECK(a.lower <= b.upper);
  CHECK(b.lower <= a.upper);
}

TEST_CASE("BER sweep bookkeeping") {
  const LdpcCode& c = code1000();
  BerOptions o;
  o.decoder = DecoderKind::MinSum;
  o.max_frames = 0;
  const std::vector<double> snr{2.0};
  CHECK(ber_sweep(c, snr, o).empty());

  o.max_frames = 30;
  const std::vector<double> high{8.0};
  const BerPoint clean = ber_sweep(c, high, o)[0];
  CHECK(clean.bit_errors == 0);
  CHECK(clean.frames == 30);

  o.max_frames = 500;
  o.max_errors = 3;
  const std::vector<double> low{1.0};
  const BerPoint stopped = ber_sweep(c, low, o)[0];
  CHECK(stopped.frame_errors == 3);
  CHECK(stopped.frames < 500);
  CHECK(stopped.bit_errors <= stopped.frames * 1000);

  // Batch size does not change the result.
  o.batch = 1;
  const BerPoint one = ber_sweep(c, low, o)[0];
  CHECK(one.frames == stopped.frames);
  CHECK(one.bit_errors == stopped.bit_errors);
  CHECK_THROWS_AS(parse_decoder("viterbi"), std::invalid_argument);
}

TEST_CASE("LUT decoder BER at 2 dB stays in its recorded range") {
  const LdpcCode& c = code1000();
  BerOptions o;
  o.max_frames = 300;
  o.seed = 5;
  o.fixed_design = design15();
  const std::vector<double> snr{2.0};
  const BerPoint p = ber_sweep(c, snr, o)[0];
  MESSAGE("LUT BER at 2 dB " << p.ber() << " frame errors " << p.frame_errors);
  CHECK(p.ber() > 0.0);
  CHECK(p.ber() < 1.0);
}

TEST_CASE("frame-level BER interval") {
  BerPoint p;
  p.frames = 4;
  p.frame_length = 10;
  p.bit_errors = 4;
  p.bit_errors_sq = 16;  // one frame with all four errors
  const auto ci = ber_interval(p);
  CHECK(p.ber() == doctest::Approx(0.1));
  // per-frame fractions {0.4, 0, 0, 0}: variance 0.03, se sqrt(0.03/4)
  CHECK(ci.upper == doctest::Approx(0.1 + 1.96 * std::sqrt(0.03 / 4)));
  CHECK(ci.lower == 0.0);
}

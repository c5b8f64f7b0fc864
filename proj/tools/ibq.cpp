// ibq: quantizer design, max-LUT construction, LDPC decoder design and BER
// simulation from the command line.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ibq/ber.hpp"
#include "ibq/channel.hpp"
#include "ibq/decoder.hpp"
#include "ibq/ib.hpp"
#include "ibq/info.hpp"
#include "ibq/ldpc.hpp"
#include "ibq/maxlut.hpp"

namespace {

using namespace ibq;

constexpr const char* kChannelHelp =
    "channel: bsc:EPS (binary symmetric), bpsk:EBN0 (BPSK/AWGN at Eb/N0 in dB, see --rate), "
    "askM (M-ASK over AWGN with noise std --sigma)";

struct ChannelArgs {
  std::string spec;
  double sigma = 1.0;
  int bins = 128;
  double clip = 3.0;
  double rate = 0.5;

  void add_to(CLI::App* app, bool required) {
    auto* opt = app->add_option("--channel", spec, kChannelHelp);
    if (required) opt->required();
    app->add_option("--sigma", sigma, "noise std for askM")->capture_default_str();
    app->add_option("--bins", bins, "output bins of AWGN channels")->capture_default_str()->check(CLI::Range(2, 1 << 20));
    app->add_option("--clip", clip, "clip range in noise std above the largest input")->capture_default_str();
    app->add_option("--rate", rate, "code rate used for the Eb/N0 conversion")->capture_default_str();
  }

  DmcSpec build() const {
    if (spec.rfind("bsc:", 0) == 0) return build_bsc(number(spec.substr(4)));
    if (spec.rfind("bpsk:", 0) == 0) return build_bpsk_awgn(number(spec.substr(5)), rate, bins, clip);
    if (spec.rfind("ask", 0) == 0 && spec.size() > 3) {
      const double m = number(spec.substr(3));
      if (m != std::floor(m) || m < 2 || m > 1024) throw std::invalid_argument("bad ASK order in '" + spec + "'");
      return build_ask_awgn(static_cast<int>(m), sigma, bins, clip);
    }
    throw std::invalid_argument("unknown channel '" + spec + "'");
  }

  static double number(const std::string& s) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(s, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != s.size()) throw std::invalid_argument("bad number '" + s + "' in channel");
    return v;
  }
};

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// "# ibq <args> seed=<seed>", the first line of every output.
std::string header_line(const std::vector<std::string>& args, const std::string& seed) {
  std::string line = "# ibq";
  for (const auto& a : args) line += ' ' + a;
  return line + " seed=" + seed + '\n';
}

/// Writes to the named file, or stdout for "" / "-".
class Output {
 public:
  explicit Output(const std::string& path) {
    if (path.empty() || path == "-") return;
    file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
    if (!*file_) throw std::runtime_error("cannot open '" + path + "' for writing");
  }
  std::ostream& stream() { return file_ ? *file_ : std::cout; }
  void finish() {
    stream().flush();
    if (!stream()) throw std::runtime_error("write failed");
  }

 private:
  std::unique_ptr<std::ofstream> file_;
};

MessageDist channel_message(const DmcSpec& dmc, int levels) {
  if (dmc.num_inputs() != 2) throw std::invalid_argument("channel must have a binary input");
  const JointXY joint = JointXY::from_channel(Pmf({0.5, 0.5}), dmc.transition);
  const auto labels = dp_optimal_quantizer(joint, levels).quantizer.labels();
  std::vector<std::vector<double>> rows(2, std::vector<double>(static_cast<std::size_t>(levels), 0.0));
  for (std::size_t x = 0; x < 2; ++x) {
    for (std::size_t y = 0; y < labels.size(); ++y) rows[x][labels[y]] += dmc.transition(x, y);
  }
  return MessageDist(ConditionalDist::from_rows(rows));
}

struct QuantizeArgs {
  ChannelArgs channel;
  std::string alg = "it-ib";
  std::vector<int> n{16};
  double beta = 400.0;
  double lambda = 0.0;
  int restarts = 100;
  std::uint64_t seed = 1;
  std::string out;
  std::string mapping;
};

void run_quantize(const QuantizeArgs& a, const std::string& header) {
  const DmcSpec dmc = a.channel.build();
  const IbAlgorithm alg = parse_algorithm(a.alg);
  CurveOptions opts;
  opts.beta = a.beta;
  opts.lambda = a.lambda;
  opts.restarts = a.restarts;
  opts.seed = a.seed;
  const auto points = ib_curve(dmc.joint(), alg, a.n, opts);
  Output out(a.out);
  out.stream() << header;
  write_curve_csv(out.stream(), alg, opts, points);
  out.finish();
  if (!a.mapping.empty()) {
    Output map(a.mapping);
    map.stream() << header;
    for (const auto& p : points) {
      const auto& m = p.design.quantizer.mapping();
      map.stream() << "mapping " << p.n << ' ' << m.rows() << ' ' << m.cols() << '\n';
      for (std::size_t y = 0; y < m.rows(); ++y) {
        for (std::size_t z = 0; z < m.cols(); ++z) map.stream() << (z ? " " : "") << format_double(m(y, z));
        map.stream() << '\n';
      }
    }
    map.finish();
  }
}

struct MaxLutArgs {
  ChannelArgs channel;
  std::string node = "check";
  int in_bits = 4;
  int out_bits = 4;
  std::string out;
};

void run_maxlut(const MaxLutArgs& a, const std::string& header) {
  const NodeFunction f = a.node == "check" ? NodeFunction::CheckXor : NodeFunction::VariableEqual;
  const MessageDist msg = channel_message(a.channel.build(), 1 << a.in_bits);
  const NodeLut lut = build_max_lut(f, msg, msg, 1 << a.out_bits);
  Output out(a.out);
  out.stream() << header << "# input_info " << format_double(lut.input_info) << " relevant_info "
               << format_double(lut.relevant_info) << '\n';
  write_lut(out.stream(), lut);
  out.finish();
}

struct DesignArgs {
  int n = 1000;
  int dv = 3;
  int dc = 6;
  int bits = 4;
  int iters = 50;
  std::optional<double> ebn0;
  int bins = 128;
  double clip = 3.0;
  std::string out;
  std::string trace;
};

void run_design(const DesignArgs& a, const std::string& header) {
  if (a.dv >= a.dc) throw std::invalid_argument("need dv < dc for a positive rate");
  if ((static_cast<long long>(a.n) * a.dv) % a.dc != 0) throw std::invalid_argument("n * dv must be divisible by dc");
  const double rate = 1.0 - static_cast<double>(a.dv) / a.dc;
  const double ebn0 = a.ebn0 ? *a.ebn0 : decoding_threshold(rate, a.bins, a.dv, a.dc, a.bits, a.iters, 1e-6, a.clip);
  const LdpcEnsembleDesign d = design_decoder_awgn(ebn0, rate, a.bins, a.dv, a.dc, a.bits, a.iters, a.clip);
  Output out(a.out);
  out.stream() << header;
  write_design(out.stream(), d);
  out.finish();
  if (!a.trace.empty()) {
    Output tr(a.trace);
    tr.stream() << header << "iteration,error_prob\n";
    for (std::size_t t = 0; t < d.error_prob_trace.size(); ++t) {
      tr.stream() << t + 1 << ',' << format_double(d.error_prob_trace[t]) << '\n';
    }
    tr.finish();
  }
}

struct SimulateArgs {
  std::string design;
  std::string decoder = "lut";
  std::vector<double> ebn0{2.0, 2.5};
  long long max_frames = 10000;
  long long max_errors = 0;
  int max_iter = 50;
  std::uint64_t seed = 1;
  int n = 1000;
  int dv = 3;
  int dc = 6;
  std::uint64_t code_seed = 7;
  bool random_codewords = false;
  int bits = 4;
  int bins = 128;
  double clip = 3.0;
  std::optional<double> design_ebn0;
  bool design_per_point = false;
  std::string out;
};

void run_simulate(const SimulateArgs& a, const std::string& header) {
  BerOptions opts;
  opts.decoder = parse_decoder(a.decoder);
  opts.max_iter = a.max_iter;
  opts.max_frames = a.max_frames;
  opts.max_errors = a.max_errors;
  opts.seed = a.seed;
  opts.random_codewords = a.random_codewords;
  opts.num_bins = a.bins;
  opts.clip_multiplier = a.clip;
  opts.message_bits = a.bits;
  opts.design_ebn0_db = a.design_ebn0;
  opts.design_per_point = a.design_per_point;
  int dv = a.dv, dc = a.dc;
  if (!a.design.empty()) {
    std::ifstream in(a.design, std::ios::binary);
    if (!in) throw std::invalid_argument("cannot open design '" + a.design + "'");
    opts.fixed_design = read_design(in);
    dv = opts.fixed_design->dv;
    dc = opts.fixed_design->dc;
  }
  const LdpcCode code = construct_regular_ldpc(a.n, dv, dc, a.code_seed);
  const auto points = ber_sweep(code, a.ebn0, opts);
  for (const auto& p : points) {
    if (p.false_convergences > 0) {
      throw NumericalError("decoder reported convergence on a word violating a parity check");
    }
  }
  Output out(a.out);
  out.stream() << header;
  write_ber_csv(out.stream(), opts.decoder, points);
  out.finish();
}

struct InfoArgs {
  ChannelArgs channel;
  std::string out;
};

void run_info(const InfoArgs& a, const std::string& header) {
  const DmcSpec dmc = a.channel.build();
  const JointXY joint = dmc.joint();
  Output out(a.out);
  out.stream() << header << "num_inputs,num_outputs,h_x_bits,h_y_bits,i_xy_bits\n"
               << dmc.num_inputs() << ',' << dmc.num_outputs() << ',' << format_double(entropy(joint.x_marginal()))
               << ',' << format_double(entropy(joint.y_marginal())) << ',' << format_double(mutual_information(joint))
               << '\n';
  out.finish();
}

int run(int argc, char** argv) {
  CLI::App app{"Information bottleneck quantizers and lookup-table LDPC decoding"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "ibq 1.0");

  QuantizeArgs qa;
  auto* quantize = app.add_subcommand("quantize", "design channel quantizers; writes a CSV of info loss per n");
  qa.channel.add_to(quantize, true);
  quantize->add_option("--alg", qa.alg, "it-ib, agg-ib, kl-means or dp")
      ->capture_default_str()
      ->check(CLI::IsMember({"it-ib", "agg-ib", "kl-means", "dp"}));
  quantize->add_option("--n", qa.n, "cluster counts, comma separated")
      ->delimiter(',')
      ->capture_default_str()
      ->check(CLI::Range(1, 1 << 16));
  quantize->add_option("--beta", qa.beta, "trade-off parameter of it-ib")->capture_default_str()->check(CLI::PositiveNumber);
  quantize->add_option("--lambda", qa.lambda, "rate weight of kl-means")->capture_default_str()->check(CLI::NonNegativeNumber);
  quantize->add_option("--restarts", qa.restarts, "random restarts of it-ib / kl-means")
      ->capture_default_str()
      ->check(CLI::Range(1, 1 << 24));
  quantize->add_option("--seed", qa.seed, "random seed")->capture_default_str();
  quantize->add_option("-o,--out", qa.out, "CSV output (default stdout)");
  quantize->add_option("--mapping", qa.mapping, "also write every p(z|y) mapping here");

  MaxLutArgs ma;
  auto* maxlut = app.add_subcommand("maxlut", "build one two-input node table from a quantized binary channel");
  ma.channel.add_to(maxlut, true);
  maxlut->add_option("--node", ma.node, "check or variable")->capture_default_str()->check(CLI::IsMember({"check", "variable"}));
  maxlut->add_option("--in-bits", ma.in_bits, "bits per input message")->capture_default_str()->check(CLI::Range(1, 12));
  maxlut->add_option("--out-bits", ma.out_bits, "bits of the output message")->capture_default_str()->check(CLI::Range(1, 16));
  maxlut->add_option("-o,--out", ma.out, "LUT output (default stdout)");

  auto* ldpc = app.add_subcommand("ldpc", "LDPC decoder design and simulation");
  ldpc->require_subcommand(1);

  DesignArgs da;
  auto* design = ldpc->add_subcommand("design", "design lookup-table decoder tables by density evolution");
  design->add_option("--n", da.n, "code length (checked for consistency only)")->capture_default_str()->check(CLI::PositiveNumber);
  design->add_option("--dv", da.dv, "variable degree")->capture_default_str()->check(CLI::Range(2, 32));
  design->add_option("--dc", da.dc, "check degree")->capture_default_str()->check(CLI::Range(2, 32));
  design->add_option("--bits", da.bits, "message bits")->capture_default_str()->check(CLI::Range(1, 12));
  design->add_option("--iters", da.iters, "designed iterations")->capture_default_str()->check(CLI::Range(1, 1000));
  design->add_option("--ebn0", da.ebn0, "design Eb/N0 in dB (default: the decoding threshold)");
  design->add_option("--bins", da.bins, "channel output bins")->capture_default_str()->check(CLI::Range(2, 1 << 16));
  design->add_option("--clip", da.clip, "clip range in noise std above the input amplitude")->capture_default_str();
  design->add_option("-o,--out", da.out, "design file (default stdout)");
  design->add_option("--trace", da.trace, "CSV of the error probability per iteration");

  SimulateArgs sa;
  auto* simulate = ldpc->add_subcommand("simulate", "Monte-Carlo BER over BPSK/AWGN");
  simulate->add_option("--design", sa.design, "design file for the lut decoder; fixes the channel bins");
  simulate->add_option("--decoder", sa.decoder, "lut, minsum, minsum-corrected or bp")
      ->capture_default_str()
      ->check(CLI::IsMember({"lut", "minsum", "minsum-corrected", "bp"}));
  simulate->add_option("--ebn0", sa.ebn0, "Eb/N0 points in dB, comma separated")->delimiter(',')->capture_default_str();
  simulate->add_option("--max-frames", sa.max_frames, "frames per point")->capture_default_str()->check(CLI::NonNegativeNumber);
  simulate->add_option("--max-errors", sa.max_errors, "stop a point after this many frame errors (0: never)")
      ->capture_default_str()
      ->check(CLI::NonNegativeNumber);
  simulate->add_option("--max-iter", sa.max_iter, "decoder iterations")->capture_default_str()->check(CLI::Range(0, 100000));
  simulate->add_option("--seed", sa.seed, "noise seed")->capture_default_str();
  simulate->add_option("--n", sa.n, "code length")->capture_default_str()->check(CLI::PositiveNumber);
  simulate->add_option("--dv", sa.dv, "variable degree (taken from --design when given)")->capture_default_str()->check(CLI::Range(2, 32));
  simulate->add_option("--dc", sa.dc, "check degree (taken from --design when given)")->capture_default_str()->check(CLI::Range(2, 32));
  simulate->add_option("--code-seed", sa.code_seed, "code construction seed")->capture_default_str();
  simulate->add_flag("--random-codewords", sa.random_codewords, "send random codewords instead of all-zero");
  simulate->add_option("--bits", sa.bits, "message bits when designing in place")->capture_default_str()->check(CLI::Range(1, 12));
  simulate->add_option("--bins", sa.bins, "channel output bins without a design file")->capture_default_str()->check(CLI::Range(2, 1 << 16));
  simulate->add_option("--clip", sa.clip, "clip range without a design file")->capture_default_str();
  auto* dsnr = simulate->add_option("--design-ebn0", sa.design_ebn0, "design Eb/N0 when designing in place (default: threshold)");
  simulate->add_flag("--design-per-point", sa.design_per_point, "redesign the tables at every Eb/N0")->excludes(dsnr);
  simulate->add_option("-o,--out", sa.out, "CSV output (default stdout)");

  InfoArgs ia;
  auto* info = app.add_subcommand("info", "entropies and mutual information of a channel (uniform input)");
  ia.channel.add_to(info, true);
  info->add_option("-o,--out", ia.out, "CSV output (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  const std::vector<std::string> args(argv + 1, argv + argc);
  if (*quantize) run_quantize(qa, header_line(args, std::to_string(qa.seed)));
  else if (*maxlut) run_maxlut(ma, header_line(args, "none"));
  else if (*design) run_design(da, header_line(args, "none"));
  else if (*simulate) run_simulate(sa, header_line(args, std::to_string(sa.seed) + " code_seed=" + std::to_string(sa.code_seed)));
  else if (*info) run_info(ia, header_line(args, "none"));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const std::invalid_argument& e) {
    std::cerr << "ibq: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "ibq: " << e.what() << '\n';
    return 1;
  }
}

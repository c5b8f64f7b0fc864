#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>

#include "ibq/decoder.hpp"
#include "ibq/ib.hpp"
#include "lut_io.hpp"
#include "text_io.hpp"

namespace ibq {

namespace {

/// MAP bit per outcome of a two-row conditional (ties decide 0) and the
/// resulting error probability under a uniform code bit.
double map_decisions(const ConditionalDist& cond, std::vector<std::uint8_t>& out) {
  out.resize(cond.cols());
  double err = 0.0;
  for (std::size_t o = 0; o < cond.cols(); ++o) {
    out[o] = cond(1, o) > cond(0, o) ? 1 : 0;
    err += 0.5 * std::min(cond(0, o), cond(1, o));
  }
  return err;
}

/// Mixes a message distribution with a small share of the uniform one before
/// it feeds the next tables. Without it, late iterations see label
/// probabilities that underflow to zero: outcomes impossible under both
/// symbols get labelled by index rather than by LLR, and tables tuned to
/// near-perfect messages make failing frames diverge badly.
MessageDist floored(const MessageDist& m) {
  constexpr double kFloor = 1e-5;
  const std::size_t size = m.size();
  std::vector<double> cond(2 * size);
  for (std::size_t x = 0; x < 2; ++x) {
    for (std::size_t v = 0; v < size; ++v) {
      cond[x * size + v] = (1.0 - kFloor) * m(x, v) + kFloor / static_cast<double>(size);
    }
  }
  return MessageDist(ConditionalDist(2, size, std::move(cond)));
}

}  // namespace

LdpcEnsembleDesign design_decoder(const DmcSpec& dmc, int dv, int dc, int message_bits, int max_iter) {
  if (dmc.num_inputs() != 2) throw std::invalid_argument("decoder design needs a binary-input channel");
  if (dv < 2 || dc < 2) throw std::invalid_argument("node degrees must be at least 2");
  if (message_bits < 1 || message_bits > 15) throw std::invalid_argument("message bits must be in [1, 15]");
  if (max_iter < 1) throw std::invalid_argument("at least one iteration is needed");

  LdpcEnsembleDesign d;
  d.message_bits = message_bits;
  d.max_iter = max_iter;
  d.dv = dv;
  d.dc = dc;
  d.design_ebn0_db = std::numeric_limits<double>::quiet_NaN();
  d.num_bins = static_cast<int>(dmc.num_outputs());
  if (dmc.awgn) {
    d.noise_std = dmc.awgn->noise_std;
    d.clip_amplitude = dmc.awgn->clip_amplitude;
  }
  const int levels = d.levels();

  // Channel quantizer: the optimal binary-input partition of the bins.
  const IbDesign ch = dp_optimal_quantizer(JointXY::from_channel(Pmf::uniform(2), dmc.transition), levels);
  const auto labels = ch.quantizer.labels();
  d.channel_lut.assign(labels.begin(), labels.end());
  std::vector<double> cond(2 * static_cast<std::size_t>(levels), 0.0);
  for (std::size_t y = 0; y < labels.size(); ++y) {
    for (std::size_t x = 0; x < 2; ++x) cond[x * levels + labels[y]] += dmc.transition(x, y);
  }
  d.channel_message = MessageDist(ConditionalDist(2, static_cast<std::size_t>(levels), std::move(cond)));
  map_decisions(d.channel_message.cond(), d.channel_decision);

  const MessageDist channel = floored(d.channel_message);
  MessageDist q = channel;
  for (int t = 0; t < max_iter; ++t) {
    const std::vector<MessageDist> check_in(static_cast<std::size_t>(dc - 1), q);
    LutChain check = cascade_node(NodeFunction::CheckXor, check_in, levels, Schedule::BalancedTree);
    const MessageDist r = floored(check.output);

    std::vector<MessageDist> var_in{channel};
    var_in.insert(var_in.end(), static_cast<std::size_t>(dv - 1), r);
    LutChain var = cascade_node(NodeFunction::VariableEqual, var_in, levels, Schedule::LeftFold);

    std::vector<std::uint8_t> decision;
    d.error_prob_trace.push_back(
        map_decisions(node_joint(NodeFunction::VariableEqual, var.output, r), decision));
    d.decision_tables.push_back(std::move(decision));
    q = floored(var.output);
    d.check_chains.push_back(std::move(check));
    d.var_chains.push_back(std::move(var));
  }
  return d;
}

LdpcEnsembleDesign design_decoder_awgn(double ebn0_db, double code_rate, int num_bins, int dv, int dc,
                                       int message_bits, int max_iter, double clip_multiplier) {
  LdpcEnsembleDesign d = design_decoder(build_bpsk_awgn(ebn0_db, code_rate, num_bins, clip_multiplier), dv,
                                        dc, message_bits, max_iter);
  d.design_ebn0_db = ebn0_db;
  d.code_rate = code_rate;
  return d;
}

double decoding_threshold(double code_rate, int num_bins, int dv, int dc, int message_bits, int max_iter,
                          double target, double clip_multiplier, double lo_db, double hi_db, double tol_db) {
  if (!(lo_db < hi_db) || !(tol_db > 0.0)) throw std::invalid_argument("bad threshold search interval");
  auto converges = [&](double ebn0) {
    const auto d = design_decoder_awgn(ebn0, code_rate, num_bins, dv, dc, message_bits, max_iter, clip_multiplier);
    return d.error_prob_trace.back() < target;
  };
  if (!converges(hi_db)) throw NumericalError("density evolution does not converge in the search interval");
  while (hi_db - lo_db > tol_db) {
    const double mid = 0.5 * (lo_db + hi_db);
    (converges(mid) ? hi_db : lo_db) = mid;
  }
  return hi_db;
}

namespace {

using detail::format_double;
using detail::TokenReader;
using detail::write_row;

void write_message(std::ostream& os, const MessageDist& m) {
  os << "message " << m.size() << '\n';
  write_row(os, m.cond().row(0));
  write_row(os, m.cond().row(1));
}

MessageDist read_message(TokenReader& in) {
  in.expect("message");
  const std::size_t size = in.next_size();
  if (size == 0) throw std::runtime_error("design: empty message alphabet");
  return MessageDist(ConditionalDist(2, size, in.next_doubles(2 * size)));
}

void write_chain(std::ostream& os, const std::string& kind, const LutChain& chain) {
  os << kind << ' ' << chain.num_inputs << ' ' << chain.stages.size() << ' ' << chain.output_slot << '\n';
  for (const auto& st : chain.stages) {
    os << "stage " << st.left << ' ' << st.right << '\n';
    detail::write_lut_body(os, st.lut);
  }
  write_message(os, chain.output);
}

/// Every chain input carries a message of `levels` labels.
LutChain read_chain(TokenReader& in, const std::string& kind, std::size_t levels) {
  in.expect(kind);
  LutChain chain;
  chain.num_inputs = in.next_size();
  const std::size_t stages = in.next_size();
  chain.output_slot = static_cast<int>(in.next_int());
  if (chain.num_inputs == 0 || chain.num_inputs + stages > 64) throw std::runtime_error("design: bad chain size");
  std::vector<std::size_t> slot_size(chain.num_inputs, levels);
  for (std::size_t s = 0; s < stages; ++s) {
    in.expect("stage");
    LutStage st;
    st.left = static_cast<int>(in.next_int());
    st.right = static_cast<int>(in.next_int());
    const int limit = static_cast<int>(chain.num_inputs + s);
    if (st.left < 0 || st.left >= limit || st.right < -1 || st.right >= limit) {
      throw std::runtime_error("design: stage refers to an unknown slot");
    }
    st.lut = detail::read_lut_body(in);
    auto check_width = [&](int slot, std::size_t width) {
      if (slot_size[slot] > width) throw std::runtime_error("design: stage width mismatch");
    };
    check_width(st.left, st.lut.in_left);
    if (st.right >= 0) check_width(st.right, st.lut.in_right);
    else if (st.lut.in_right != 1) throw std::runtime_error("design: constant input must have one label");
    slot_size.push_back(st.lut.out_size);
    chain.stages.push_back(std::move(st));
  }
  if (chain.output_slot < 0 || static_cast<std::size_t>(chain.output_slot) >= chain.num_inputs + stages) {
    throw std::runtime_error("design: bad output slot");
  }
  chain.output = read_message(in);
  if (chain.output.size() != slot_size[chain.output_slot]) throw std::runtime_error("design: output size mismatch");
  return chain;
}

}  // namespace

void write_design(std::ostream& os, const LdpcEnsembleDesign& d) {
  os << "design " << d.message_bits << ' ' << d.max_iter << ' ' << d.dv << ' ' << d.dc << '\n';
  os << "channel " << d.num_bins << ' ' << format_double(d.design_ebn0_db) << ' ' << format_double(d.code_rate)
     << ' ' << format_double(d.noise_std) << ' ' << format_double(d.clip_amplitude) << '\n';
  for (std::size_t y = 0; y < d.channel_lut.size(); ++y) os << (y ? " " : "") << d.channel_lut[y];
  os << '\n';
  write_message(os, d.channel_message);
  os << "trace " << d.error_prob_trace.size() << '\n';
  write_row(os, d.error_prob_trace);
  for (int t = 0; t < d.max_iter; ++t) {
    os << "iteration " << t << '\n';
    write_chain(os, "check", d.check_chains[t]);
    write_chain(os, "variable", d.var_chains[t]);
    const auto& table = d.decision_tables[t];
    const std::size_t r = d.check_chains[t].output.size();
    const std::size_t u = table.size() / r;
    os << "decision " << u << ' ' << r << '\n';
    for (std::size_t i = 0; i < u; ++i) {
      for (std::size_t j = 0; j < r; ++j) os << (j ? " " : "") << static_cast<int>(table[i * r + j]);
      os << '\n';
    }
  }
}

LdpcEnsembleDesign read_design(std::istream& is) {
  TokenReader in(is);
  in.expect("design");
  LdpcEnsembleDesign d;
  d.message_bits = static_cast<int>(in.next_int());
  d.max_iter = static_cast<int>(in.next_int());
  d.dv = static_cast<int>(in.next_int());
  d.dc = static_cast<int>(in.next_int());
  if (d.message_bits < 1 || d.message_bits > 15 || d.max_iter < 1 || d.dv < 2 || d.dc < 2 || d.dc + d.dv > 60) {
    throw std::runtime_error("design: bad header");
  }
  in.expect("channel");
  d.num_bins = static_cast<int>(in.next_int());
  if (d.num_bins < 2) throw std::runtime_error("design: bad bin count");
  d.design_ebn0_db = in.next_double();
  d.code_rate = in.next_double();
  d.noise_std = in.next_double();
  d.clip_amplitude = in.next_double();
  const auto levels = static_cast<std::size_t>(d.levels());
  d.channel_lut.resize(static_cast<std::size_t>(d.num_bins));
  for (auto& v : d.channel_lut) {
    const std::size_t label = in.next_size();
    if (label >= levels) throw std::runtime_error("design: channel label out of range");
    v = static_cast<std::uint16_t>(label);
  }
  d.channel_message = read_message(in);
  if (d.channel_message.size() != levels) throw std::runtime_error("design: channel message size mismatch");
  d.channel_decision.clear();
  for (std::size_t o = 0; o < levels; ++o) {
    d.channel_decision.push_back(d.channel_message(1, o) > d.channel_message(0, o) ? 1 : 0);
  }
  in.expect("trace");
  if (in.next_size() != static_cast<std::size_t>(d.max_iter)) throw std::runtime_error("design: trace length");
  d.error_prob_trace = in.next_doubles(static_cast<std::size_t>(d.max_iter));
  for (int t = 0; t < d.max_iter; ++t) {
    in.expect("iteration");
    if (in.next_int() != t) throw std::runtime_error("design: iterations out of order");
    d.check_chains.push_back(read_chain(in, "check", levels));
    d.var_chains.push_back(read_chain(in, "variable", levels));
    if (d.check_chains.back().num_inputs != static_cast<std::size_t>(d.dc - 1) ||
        d.var_chains.back().num_inputs != static_cast<std::size_t>(d.dv)) {
      throw std::runtime_error("design: chain arity does not match the degrees");
    }
    in.expect("decision");
    const std::size_t u = in.next_size();
    const std::size_t r = in.next_size();
    if (u != d.var_chains.back().output.size() || r != d.check_chains.back().output.size()) {
      throw std::runtime_error("design: decision table size mismatch");
    }
    std::vector<std::uint8_t> table(u * r);
    for (auto& b : table) {
      const auto v = in.next_size();
      if (v > 1) throw std::runtime_error("design: decision must be 0 or 1");
      b = static_cast<std::uint8_t>(v);
    }
    d.decision_tables.push_back(std::move(table));
  }
  return d;
}

}  // namespace ibq

#include "ibq/maxlut.hpp"

#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>

#include "ibq/ib.hpp"
#include "lut_io.hpp"
#include "text_io.hpp"

namespace ibq {

MessageDist::MessageDist(ConditionalDist cond) : cond_(std::move(cond)) {
  if (cond_.rows() != 2) throw std::invalid_argument("message distribution must have two rows");
  if (cond_.cols() == 0) throw std::invalid_argument("message alphabet is empty");
}

MessageDist MessageDist::binary_symmetric(double eps) {
  if (!(eps >= 0.0 && eps <= 1.0)) throw std::invalid_argument("crossover outside [0, 1]");
  return MessageDist(ConditionalDist(2, 2, {1.0 - eps, eps, eps, 1.0 - eps}));
}

MessageDist MessageDist::uninformative() { return MessageDist(ConditionalDist(2, 1, {1.0, 1.0})); }

JointXY MessageDist::joint() const { return JointXY::from_channel(Pmf::uniform(2), cond_); }

double MessageDist::information() const { return mutual_information(joint()); }

ConditionalDist node_joint(NodeFunction f, const MessageDist& a, const MessageDist& b) {
  const std::size_t nl = a.size();
  const std::size_t nz = b.size();
  std::vector<double> out(2 * nl * nz);
  for (std::size_t x3 = 0; x3 < 2; ++x3) {
    double* row = out.data() + x3 * nl * nz;
    for (std::size_t l = 0; l < nl; ++l) {
      for (std::size_t z = 0; z < nz; ++z) {
        double p;
        if (f == NodeFunction::VariableEqual) {
          p = a(x3, l) * b(x3, z);
        } else {
          // x1 = 0, x2 = x3 and x1 = 1, x2 = 1 - x3, each with probability 1/2
          p = 0.5 * (a(0, l) * b(x3, z) + a(1, l) * b(1 - x3, z));
        }
        row[l * nz + z] = p;
      }
    }
  }
  return ConditionalDist(2, nl * nz, std::move(out));
}

NodeLut build_max_lut(NodeFunction f, const MessageDist& a, const MessageDist& b, int out_size) {
  if (out_size < 1) throw std::invalid_argument("LUT output size must be at least 1");
  if (out_size > 65535) throw std::invalid_argument("LUT output size too large");
  const MessageDist joint_msg(node_joint(f, a, b));
  const JointXY joint = joint_msg.joint();
  const IbDesign d = dp_optimal_quantizer(joint, out_size);

  NodeLut lut;
  lut.in_left = a.size();
  lut.in_right = b.size();
  lut.out_size = static_cast<std::size_t>(out_size);
  const auto labels = d.quantizer.labels();
  lut.table.assign(labels.begin(), labels.end());

  std::vector<double> cond(2 * lut.out_size, 0.0);
  for (std::size_t o = 0; o < labels.size(); ++o) {
    for (std::size_t x = 0; x < 2; ++x) cond[x * lut.out_size + labels[o]] += joint_msg(x, o);
  }
  lut.out = MessageDist(ConditionalDist(2, lut.out_size, std::move(cond)));
  lut.relevant_info = d.relevant_info;
  lut.input_info = mutual_information(joint);
  return lut;
}

int LutChain::evaluate(std::span<const int> labels) const {
  if (labels.size() != num_inputs) throw std::invalid_argument("LUT chain: wrong number of inputs");
  if (stages.empty()) return labels[static_cast<std::size_t>(output_slot)];
  // Small fixed buffer: decoders call this in their inner loop.
  int slots[64];
  const std::size_t total = num_inputs + stages.size();
  if (total > 64) throw std::length_error("LUT chain too long");
  for (std::size_t i = 0; i < num_inputs; ++i) slots[i] = labels[i];
  for (std::size_t s = 0; s < stages.size(); ++s) {
    const LutStage& st = stages[s];
    slots[num_inputs + s] = st.lut(slots[st.left], st.right < 0 ? 0 : slots[st.right]);
  }
  return slots[output_slot];
}

LutChain cascade_node(NodeFunction f, std::span<const MessageDist> inputs, int out_size,
                      Schedule schedule) {
  if (inputs.empty()) throw std::invalid_argument("cascade_node: no inputs");
  if (out_size < 2) throw std::invalid_argument("cascade_node: output size must be at least 2");
  LutChain chain;
  chain.num_inputs = inputs.size();
  std::vector<MessageDist> slot_dist(inputs.begin(), inputs.end());

  auto add_stage = [&](int left, int right) {
    const MessageDist& b = right < 0 ? MessageDist::uninformative() : slot_dist[right];
    // a lone input is requantized by pairing it with a constant message
    const NodeFunction g = right < 0 ? NodeFunction::VariableEqual : f;
    LutStage st{build_max_lut(g, slot_dist[left], b, out_size), left, right};
    slot_dist.push_back(st.lut.out);
    chain.stages.push_back(std::move(st));
    return static_cast<int>(slot_dist.size()) - 1;
  };

  if (inputs.size() == 1) {
    chain.output_slot = inputs[0].size() <= static_cast<std::size_t>(out_size) ? 0 : add_stage(0, -1);
  } else if (schedule == Schedule::LeftFold) {
    int acc = 0;
    for (int i = 1; i < static_cast<int>(inputs.size()); ++i) acc = add_stage(acc, i);
    chain.output_slot = acc;
  } else {
    std::vector<int> level(inputs.size());
    for (std::size_t i = 0; i < level.size(); ++i) level[i] = static_cast<int>(i);
    while (level.size() > 1) {
      std::vector<int> next;
      for (std::size_t i = 0; i + 1 < level.size(); i += 2) next.push_back(add_stage(level[i], level[i + 1]));
      if (level.size() % 2) next.push_back(level.back());
      level = std::move(next);
    }
    chain.output_slot = level[0];
  }
  chain.output = slot_dist[static_cast<std::size_t>(chain.output_slot)];
  return chain;
}

namespace detail {

void write_lut_body(std::ostream& os, const NodeLut& lut) {
  os << "lut " << lut.in_left << ' ' << lut.in_right << ' ' << lut.out_size << '\n';
  for (std::size_t l = 0; l < lut.in_left; ++l) {
    for (std::size_t z = 0; z < lut.in_right; ++z) {
      if (z) os << ' ';
      os << lut.table[l * lut.in_right + z];
    }
    os << '\n';
  }
  write_row(os, lut.out.cond().row(0));
  write_row(os, lut.out.cond().row(1));
}

NodeLut read_lut_body(TokenReader& in) {
  in.expect("lut");
  NodeLut lut;
  lut.in_left = in.next_size();
  lut.in_right = in.next_size();
  lut.out_size = in.next_size();
  if (lut.in_left == 0 || lut.in_right == 0 || lut.out_size == 0 || lut.out_size > 65535) {
    throw std::runtime_error("lut: bad dimensions");
  }
  lut.table.resize(lut.in_left * lut.in_right);
  for (auto& v : lut.table) {
    const std::size_t label = in.next_size();
    if (label >= lut.out_size) throw std::runtime_error("lut: label out of range");
    v = static_cast<std::uint16_t>(label);
  }
  std::vector<double> cond = in.next_doubles(2 * lut.out_size);
  lut.out = MessageDist(ConditionalDist(2, lut.out_size, std::move(cond)));
  lut.relevant_info = lut.out.information();
  lut.input_info = lut.relevant_info;  // the input distributions are not stored
  return lut;
}

}  // namespace detail

void write_lut(std::ostream& os, const NodeLut& lut) { detail::write_lut_body(os, lut); }

NodeLut read_lut(std::istream& is) {
  detail::TokenReader in(is);
  return detail::read_lut_body(in);
}

}  // namespace ibq

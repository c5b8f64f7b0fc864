#pragma once

#include <ostream>

#include "ibq/maxlut.hpp"
#include "text_io.hpp"

namespace ibq::detail {

void write_lut_body(std::ostream& os, const NodeLut& lut);
NodeLut read_lut_body(TokenReader& in);

}  // namespace ibq::detail

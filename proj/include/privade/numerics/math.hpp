#pragma once

#include "privade/numerics/fixed.hpp"
#include "privade/numerics/tensor.hpp"

namespace privade::numerics {

// Natural log, table-driven (257-entry mantissa table, linear interpolation).
// DomainError for p <= 0.
FixedScalar fx_ln(FixedScalar p);

// e^x via 2^(x log2 e) with a 257-entry fraction table. Underflows to 0;
// Overflow when the result exceeds the Q16.16 range.
FixedScalar fx_exp(FixedScalar x);

// Max-shifted softmax over a 1-D tensor. Outputs are nonnegative and sum to
// exactly 1.0: the floor-division remainder is handed out one LSB at a time to
// the entries with the largest fractional parts (ties to the lowest index).
FixedTensor fx_softmax(const FixedTensor& logits);

}  // namespace privade::numerics

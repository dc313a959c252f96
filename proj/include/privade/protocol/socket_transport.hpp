#pragma once

#include "privade/protocol/engine.hpp"

namespace privade::protocol {

// Forks P1, P2 and the dealer as separate processes connected over TCP to a
// hub in the calling process. The hub stamps seq, records the transcript and
// relays frames; each party aborts with a timeout after config.timeout_ms of
// silence.
RunResult run_socket(const split::SplitModel& model, const selection::Dataset& data, const RunConfig& config,
                     Adversary adversary);

}  // namespace privade::protocol

#pragma once

#include <ostream>

#include "mbloch/config.hpp"
#include "mbloch/output.hpp"

namespace mbloch::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitIo = 2;

/// Columns dk, omega_plus, omega_minus, omega_a_uncoupled, omega_b_uncoupled.
Table cmd_spectrum(const RunConfig& cfg);
/// Raw lab-frame trajectory: t, xA, vA, xB, vB.
Table cmd_simulate(const RunConfig& cfg);
/// t, popA, popB, sx, sy, sz
Table cmd_rabi(const RunConfig& cfg);
/// T, popA, popB, sx, sy, sz (final state per waiting time)
Table cmd_ramsey(const RunConfig& cfg);
Table cmd_hahn(const RunConfig& cfg);
/// ratio, A, duration, max_discrepancy; meta carries the monotonicity verdict.
Table cmd_compare(const RunConfig& cfg);

/// Dispatches on the config's protocol.
Table run_protocol(const RunConfig& cfg);

/// Entry point behind the `mbloch` executable. Returns the process exit code:
/// 0 success, 1 validation failure, 2 I/O failure.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace mbloch::cli

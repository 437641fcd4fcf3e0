#pragma once

#include <iosfwd>

namespace smemsynth {

// Exit codes of the smemsynth driver.
inline constexpr int kExitOk = 0;
inline constexpr int kExitVerifyFailed = 1;
inline constexpr int kExitUsage = 2;

// Entry point of the smemsynth command: genlib, explore, synth, pa, sim,
// leafcell. Messages go to `out`, diagnostics to `err`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace smemsynth

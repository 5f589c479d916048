#pragma once

#include <iosfwd>
#include <span>
#include <string>

namespace hmer::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;

/// `args[0]` is the program name. Commands: ingest, build-graph, synth,
/// train, eval, infer, attention, confusion. Outputs go under --out.
int run(std::span<const std::string> args, std::ostream& out, std::ostream& err);

int run(int argc, const char* const* argv);

}  // namespace hmer::cli

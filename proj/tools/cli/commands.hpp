#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "config.hpp"
#include "output.hpp"

namespace rrg::cli {

struct Context {
  std::string command;
  Config config;
  std::uint64_t seed = 1;
  int threads = 1;
  Sink* sink = nullptr;
  Json summary = Json::object();  // copied into the manifest
};

// Returns the exit code: 0, or 4 when a verification suite fails.
using CommandFn = int (*)(Context&);

struct CommandInfo {
  const char* name;
  const char* help;
  CommandFn fn;
};

const std::vector<CommandInfo>& commands();

}  // namespace rrg::cli

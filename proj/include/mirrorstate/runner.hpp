#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "mirrorstate/params.hpp"

namespace mirrorstate {

// A fully resolved run request. Deterministic: the same manifest always
// produces byte-identical artifacts.
struct RunManifest {
  std::string config_path;
  std::string subcommand;
  std::map<std::string, std::string> options;  // normalized flag -> value

  std::string to_json() const;
};

struct Artifact {
  std::string name;     // suggested file name
  std::string content;  // CSV, SVG or plain text
};

struct RunOutput {
  std::vector<Artifact> artifacts;
  std::string manifest_json;
};

// Executes one subcommand. Throws std::exception subtypes on invalid input.
RunOutput run(const PhysicalParams& params, const RunManifest& manifest);

// helper: "a:b:n" -> n values from a to b inclusive (n >= 2), or {a} if n == 1
std::vector<double> parse_range(const std::string& spec);

// ordered parallel map over [0, n)
void parallel_for(int n, const std::function<void(int)>& fn);

}  // namespace mirrorstate

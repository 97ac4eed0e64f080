#pragma once

#include <string>
#include <utility>
#include <vector>

#include "symtop/rotor.hpp"

namespace symtop::cli {

/// SHA-256 of a byte string, lowercase hex.
std::string sha256_hex(const std::string& bytes);

/// Current UTC time as YYYY-MM-DDTHH:MM:SSZ.
std::string utc_timestamp();

/// Everything needed to reproduce a run. Serialized in the key-value format,
/// so the manifest is itself a valid --config and molecule file.
struct RunManifest {
  std::string tool_version;
  std::string command;       // e.g. "scan robustness"
  std::string command_line;  // as invoked
  std::string started_utc;
  std::string finished_utc;
  int exit_code = 0;
  std::vector<std::pair<std::string, std::string>> config;  // every option, defaults materialized
  RotorConstants constants;
  std::vector<std::pair<std::string, std::string>> outputs;  // file name -> sha256

  std::string str() const;
};

}  // namespace symtop::cli

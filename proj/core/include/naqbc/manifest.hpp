#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace naqbc {

struct TrialManifestEntry {
  std::string run_id;
  std::string status;
  long burden = -1;  // -1 = target not reached
  double seconds = 0.0;
};

// Everything needed to audit and reproduce a finished invocation: the exact
// config, the software version, all seeds, timing, per-trial outcomes, and
// a checksum of every emitted file.
struct RunManifest {
  std::string version;
  std::string command;      // run | sweep | crossval
  std::string config_json;  // canonical serialized config snapshot
  std::vector<std::uint64_t> seeds;
  std::string started_at;   // ISO 8601 UTC
  std::string finished_at;
  std::vector<TrialManifestEntry> trials;
  std::map<std::string, std::string> checksums;  // file name -> fnv1a64 hex
};

std::string current_utc_timestamp();

// 16 hex digits of the FNV-1a hash of the file's bytes.
std::string checksum_file(const std::string& path);

// Serialized via a temp file in the same directory plus rename, so readers
// never observe a half-written manifest.
void write_manifest(const std::string& path, const RunManifest& manifest);

RunManifest read_manifest(const std::string& path);

}  // namespace naqbc

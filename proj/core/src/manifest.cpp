#include "naqbc/manifest.hpp"

#include <cstdio>
#include <ctime>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "naqbc/errors.hpp"
#include "naqbc/hash.hpp"

namespace naqbc {

namespace {

using nlohmann::json;

}  // namespace

std::string current_utc_timestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm utc{};
  gmtime_r(&now, &utc);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &utc);
  return buf;
}

std::string checksum_file(const std::string& path) {
  std::ifstream file(path, std::ios::binary);
  if (!file) throw ConfigError("checksum: cannot open '" + path + "'");
  std::stringstream buffer;
  buffer << file.rdbuf();
  const std::string bytes = buffer.str();
  char out[17];
  std::snprintf(out, sizeof(out), "%016llx",
                static_cast<unsigned long long>(fnv1a64(bytes)));
  return out;
}

void write_manifest(const std::string& path, const RunManifest& manifest) {
  json trials = json::array();
  for (const TrialManifestEntry& t : manifest.trials)
    trials.push_back({{"run_id", t.run_id},
                      {"status", t.status},
                      {"burden", t.burden},
                      {"seconds", t.seconds}});
  json root;
  root["version"] = manifest.version;
  root["command"] = manifest.command;
  root["config"] = json::parse(manifest.config_json);
  root["seeds"] = manifest.seeds;
  root["started_at"] = manifest.started_at;
  root["finished_at"] = manifest.finished_at;
  root["trials"] = trials;
  root["checksums"] = manifest.checksums;

  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("manifest: cannot write '" + tmp + "'");
    out << root.dump(2) << "\n";
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0)
    throw ConfigError("manifest: cannot rename '" + tmp + "' to '" + path + "'");
}

RunManifest read_manifest(const std::string& path) {
  std::ifstream file(path);
  if (!file) throw ConfigError("manifest: cannot open '" + path + "'");
  json root;
  try {
    root = json::parse(file);
  } catch (const json::exception& e) {
    throw ConfigError("manifest: invalid JSON in '" + path + "': " + e.what());
  }

  RunManifest manifest;
  try {
    manifest.version = root.at("version").get<std::string>();
    manifest.command = root.at("command").get<std::string>();
    manifest.config_json = root.at("config").dump(2) + "\n";
    manifest.seeds = root.at("seeds").get<std::vector<std::uint64_t>>();
    manifest.started_at = root.at("started_at").get<std::string>();
    manifest.finished_at = root.at("finished_at").get<std::string>();
    for (const json& t : root.at("trials")) {
      TrialManifestEntry entry;
      entry.run_id = t.at("run_id").get<std::string>();
      entry.status = t.at("status").get<std::string>();
      entry.burden = t.at("burden").get<long>();
      entry.seconds = t.at("seconds").get<double>();
      manifest.trials.push_back(std::move(entry));
    }
    manifest.checksums =
        root.at("checksums").get<std::map<std::string, std::string>>();
  } catch (const json::exception& e) {
    throw ConfigError("manifest: missing or bad field in '" + path + "': " + e.what());
  }
  return manifest;
}

}  // namespace naqbc

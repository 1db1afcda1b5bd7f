#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iosfwd>
#include <string>

#include <json.hpp>

namespace rrg::cli {

using Json = nlohmann::ordered_json;

enum class Format { Ndjson, Csv };

// Records go to <out>/<command>.ndjson: one header line with the timestamp and version, then
// one deterministic record per line. Curves go to CSV files, or inline as "row" records when the
// format is ndjson.
class Sink {
 public:
  Sink(std::filesystem::path dir, std::string command, Format format);

  void record(const Json& j);
  // `write` fills a CSV stream whose first line is `columns`; for ndjson each row becomes a record.
  void curve(const std::string& name, const std::string& columns, const std::function<void(std::ostream&)>& write);
  std::filesystem::path path(const std::string& file) const { return dir_ / file; }
  std::size_t records() const { return count_; }

 private:
  std::filesystem::path dir_;
  std::string command_;
  Format format_;
  std::ofstream ndjson_;
  std::size_t count_ = 0;
};

struct Manifest {
  std::string command;
  std::uint64_t seed = 0;
  int threads = 1;
  std::string config_hash;
  double wall_seconds = 0.0;
  int exit_code = 0;
  Json extra = Json::object();
};

void write_manifest(const std::filesystem::path& dir, const Manifest& m);

std::string utc_timestamp();
const char* version();

}  // namespace rrg::cli

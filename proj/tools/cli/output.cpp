#include "output.hpp"

#include <chrono>
#include <ctime>
#include <sstream>

#include <boost/algorithm/string.hpp>

#include "rrg/errors.hpp"

namespace rrg::cli {

const char* version() { return RRG_VERSION; }

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

Sink::Sink(std::filesystem::path dir, std::string command, Format format)
    : dir_(std::move(dir)), command_(std::move(command)), format_(format) {
  std::filesystem::create_directories(dir_);
  ndjson_.open(dir_ / (command_ + ".ndjson"));
  if (!ndjson_) throw FormatError("cannot open " + (dir_ / (command_ + ".ndjson")).string());
  Json header;
  header["type"] = "header";
  header["command"] = command_;
  header["version"] = version();
  header["timestamp"] = utc_timestamp();
  ndjson_ << header.dump() << '\n';
}

void Sink::record(const Json& j) {
  ndjson_ << j.dump() << '\n';
  ndjson_.flush();
  ++count_;
}

void Sink::curve(const std::string& name, const std::string& columns,
                 const std::function<void(std::ostream&)>& write) {
  std::ostringstream buf;
  write(buf);
  if (format_ == Format::Csv) {
    std::ofstream out(dir_ / (name + ".csv"));
    if (!out) throw FormatError("cannot open " + (dir_ / (name + ".csv")).string());
    out << buf.str();
    return;
  }
  std::istringstream in(buf.str());
  std::string line;
  std::getline(in, line);
  if (line != columns) throw FormatError("unexpected CSV header for " + name + ": " + line);
  std::vector<std::string> keys;
  boost::split(keys, columns, boost::is_any_of(","));
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    boost::split(cells, line, boost::is_any_of(","));
    Json row;
    row["type"] = "row";
    row["curve"] = name;
    for (std::size_t k = 0; k < keys.size() && k < cells.size(); ++k) {
      try {
        std::size_t used = 0;
        const double v = std::stod(cells[k], &used);
        row[keys[k]] = used == cells[k].size() ? Json(v) : Json(cells[k]);
      } catch (const std::exception&) {
        row[keys[k]] = cells[k];
      }
    }
    record(row);
  }
}

void write_manifest(const std::filesystem::path& dir, const Manifest& m) {
  Json j;
  j["command"] = m.command;
  j["version"] = version();
  j["seed"] = m.seed;
  j["threads"] = m.threads;
  j["config_hash"] = m.config_hash;
  j["wall_seconds"] = m.wall_seconds;
  j["exit_code"] = m.exit_code;
  j["timestamp"] = utc_timestamp();
  for (const auto& [k, v] : m.extra.items()) j[k] = v;
  std::ofstream out(dir / "manifest.json");
  out << j.dump(2) << '\n';
}

}  // namespace rrg::cli

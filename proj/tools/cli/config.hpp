#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/property_tree/ptree.hpp>

namespace rrg::cli {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// INI file with one section per subcommand plus the shared [run], [field] and [grid] sections.
// Keys are addressed as "section.name"; unknown keys and unparsable values are rejected on load.
class Config {
 public:
  static Config from_file(const std::string& path);
  static Config from_string(const std::string& text);

  bool has(const std::string& key) const;
  double get_double(const std::string& key, double fallback) const;
  long get_int(const std::string& key, long fallback) const;
  std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const;
  std::string get_string(const std::string& key, const std::string& fallback) const;
  // Comma separated numbers.
  std::vector<double> get_list(const std::string& key, const std::vector<double>& fallback) const;

  void set(const std::string& key, const std::string& value);
  // Sorted "section.key=value" lines; the input of the config hash.
  std::string canonical() const;

 private:
  void validate() const;
  boost::property_tree::ptree tree_;
};

std::uint64_t fnv1a(const std::string& text);
std::string hex64(std::uint64_t v);

}  // namespace rrg::cli

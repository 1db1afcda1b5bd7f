#include "config.hpp"

#include <cstdio>
#include <map>
#include <sstream>

#include <boost/algorithm/string.hpp>
#include <boost/lexical_cast.hpp>
#include <boost/property_tree/ini_parser.hpp>

namespace rrg::cli {

namespace {

enum class Kind { Int, U64, Double, String, List };

const std::map<std::string, Kind>& schema() {
  static const std::map<std::string, Kind> keys = {
      {"run.seed", Kind::U64},
      {"run.threads", Kind::Int},
      {"run.samples", Kind::Int},
      {"run.metric", Kind::String},
      {"run.constant", Kind::Double},
      {"run.curvature", Kind::Double},
      {"field.amplitude", Kind::Double},
      {"field.support_radius", Kind::Double},
      {"grid.n", Kind::Int},
      {"grid.extent", Kind::Double},
      {"geodesic.x", Kind::Double},
      {"geodesic.y", Kind::Double},
      {"geodesic.angle", Kind::Double},
      {"geodesic.T", Kind::Double},
      {"geodesic.h", Kind::Double},
      {"geodesic.exit_radius", Kind::Double},
      {"distance.radii", Kind::List},
      {"distance.directions", Kind::Int},
      {"distance.stencil", Kind::Int},
      {"pov.t", Kind::Double},
      {"pov.step", Kind::Double},
      {"pov.functionals", Kind::String},
      {"pov.clip", Kind::Double},
      {"history.r", Kind::Double},
      {"history.t_max", Kind::Double},
      {"history.resolution", Kind::Double},
      {"history.h", Kind::Double},
      {"frontier.angle", Kind::Double},
      {"frontier.radii", Kind::List},
      {"frontier.theta", Kind::Double},
      {"frontier.h", Kind::Double},
      {"frontier.lens_spacing", Kind::Double},
      {"conjugate.T_max", Kind::Double},
      {"conjugate.h", Kind::Double},
      {"bump.h", Kind::Double},
      {"bump.theta", Kind::Double},
      {"bump.directions", Kind::Int},
      {"bump.pilots", Kind::Int},
      {"bump.epsilon_candidates", Kind::List},
      {"condition.n", Kind::Int},
      {"condition.spacing", Kind::Double},
      {"condition.trials", Kind::Int},
      {"condition.draws", Kind::Int},
      {"condition.h", Kind::Double},
      {"chi.radii", Kind::List},
      {"chi.directions", Kind::Int},
  };
  return keys;
}

template <typename T>
T parse(const std::string& key, const std::string& text) {
  try {
    return boost::lexical_cast<T>(boost::trim_copy(text));
  } catch (const boost::bad_lexical_cast&) {
    throw ConfigError("bad value for " + key + ": '" + text + "'");
  }
}

std::vector<double> parse_list(const std::string& key, const std::string& text) {
  std::vector<std::string> parts;
  boost::split(parts, text, boost::is_any_of(","));
  std::vector<double> out;
  for (const auto& p : parts) out.push_back(parse<double>(key, p));
  return out;
}

}  // namespace

Config Config::from_file(const std::string& path) {
  Config c;
  try {
    boost::property_tree::read_ini(path, c.tree_);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError(e.what());
  }
  c.validate();
  return c;
}

Config Config::from_string(const std::string& text) {
  Config c;
  std::istringstream in(text);
  try {
    boost::property_tree::read_ini(in, c.tree_);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError(e.what());
  }
  c.validate();
  return c;
}

void Config::validate() const {
  for (const auto& [section, body] : tree_) {
    if (body.empty()) throw ConfigError("key outside a section: " + section);
    for (const auto& [name, value] : body) {
      const std::string key = section + "." + name;
      const auto it = schema().find(key);
      if (it == schema().end()) throw ConfigError("unknown config key: " + key);
      const std::string text = value.get_value<std::string>();
      switch (it->second) {
        case Kind::Int: parse<long>(key, text); break;
        case Kind::U64: parse<std::uint64_t>(key, text); break;
        case Kind::Double: parse<double>(key, text); break;
        case Kind::List: parse_list(key, text); break;
        case Kind::String: break;
      }
    }
  }
}

bool Config::has(const std::string& key) const { return tree_.get_optional<std::string>(key).has_value(); }

double Config::get_double(const std::string& key, double fallback) const {
  const auto v = tree_.get_optional<std::string>(key);
  return v ? parse<double>(key, *v) : fallback;
}

long Config::get_int(const std::string& key, long fallback) const {
  const auto v = tree_.get_optional<std::string>(key);
  return v ? parse<long>(key, *v) : fallback;
}

std::uint64_t Config::get_u64(const std::string& key, std::uint64_t fallback) const {
  const auto v = tree_.get_optional<std::string>(key);
  return v ? parse<std::uint64_t>(key, *v) : fallback;
}

std::string Config::get_string(const std::string& key, const std::string& fallback) const {
  const auto v = tree_.get_optional<std::string>(key);
  return v ? boost::trim_copy(*v) : fallback;
}

std::vector<double> Config::get_list(const std::string& key, const std::vector<double>& fallback) const {
  const auto v = tree_.get_optional<std::string>(key);
  return v ? parse_list(key, *v) : fallback;
}

void Config::set(const std::string& key, const std::string& value) {
  if (schema().find(key) == schema().end()) throw ConfigError("unknown config key: " + key);
  tree_.put(key, value);
  validate();
}

std::string Config::canonical() const {
  std::map<std::string, std::string> flat;
  for (const auto& [section, body] : tree_)
    for (const auto& [name, value] : body) flat[section + "." + name] = boost::trim_copy(value.get_value<std::string>());
  std::string out;
  for (const auto& [k, v] : flat) out += k + "=" + v + "\n";
  return out;
}

std::uint64_t fnv1a(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

}  // namespace rrg::cli

#include "fdc/config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include "fdc/errors.hpp"

namespace fdc {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

double parse_double(const std::string& key, const std::string& value) {
  try {
    size_t used = 0;
    const double out = std::stod(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return out;
  } catch (const std::exception&) {
    throw ConfigError("config: key '" + key + "' expects a number, got '" +
                      value + "'");
  }
}

long long parse_int(const std::string& key, const std::string& value) {
  try {
    size_t used = 0;
    const long long out = std::stoll(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return out;
  } catch (const std::exception&) {
    throw ConfigError("config: key '" + key + "' expects an integer, got '" +
                      value + "'");
  }
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "yes" || value == "on")
    return true;
  if (value == "false" || value == "0" || value == "no" || value == "off")
    return false;
  throw ConfigError("config: key '" + key + "' expects a boolean, got '" +
                    value + "'");
}

void apply(ExperimentConfig& cfg, const std::string& key,
           const std::string& value) {
  if (key == "experiment") {
    cfg.experiment = value;
  } else if (key == "domain.dim") {
    cfg.dim = static_cast<int>(parse_int(key, value));
  } else if (key == "domain.topology") {
    if (value == "torus")
      cfg.topology = Topology::Torus;
    else if (value == "box")
      cfg.topology = Topology::Box;
    else
      throw ConfigError("config: domain.topology must be 'torus' or 'box'");
  } else if (key == "domain.nodes_per_axis") {
    cfg.nodes_per_axis = static_cast<int>(parse_int(key, value));
  } else if (key == "domain.length") {
    cfg.length = parse_double(key, value);
  } else if (key == "params.s") {
    cfg.s = parse_double(key, value);
  } else if (key == "params.p") {
    cfg.p = parse_double(key, value);
  } else if (key == "params.q") {
    cfg.q = parse_double(key, value);
  } else if (key == "params.N") {
    cfg.target_dim = static_cast<int>(parse_int(key, value));
  } else if (key == "params.trials") {
    cfg.trials = static_cast<int>(parse_int(key, value));
  } else if (key == "params.seed") {
    cfg.seed = static_cast<std::uint64_t>(parse_int(key, value));
  } else if (key == "params.tol") {
    cfg.tol = parse_double(key, value);
  } else if (key == "params.max_iters") {
    cfg.max_iters = static_cast<int>(parse_int(key, value));
  } else if (key == "params.lambda") {
    cfg.lambda = parse_double(key, value);
  } else if (key == "params.perturb") {
    cfg.perturb = parse_double(key, value);
  } else if (key == "params.amplitude") {
    cfg.amplitude = parse_double(key, value);
  } else if (key == "params.manufactured") {
    cfg.manufactured = parse_bool(key, value);
  } else if (key == "params.init") {
    if (value != "equator" && value != "band" && value != "random")
      throw ConfigError("config: params.init must be equator, band or random");
    cfg.init = value;
  } else if (key == "params.require_convergence") {
    cfg.require_convergence = parse_bool(key, value);
  } else if (key == "output.dir") {
    cfg.out_dir = value;
  } else if (key == "output.threads") {
    cfg.threads = static_cast<int>(parse_int(key, value));
  } else {
    throw ConfigError("config: unknown key '" + key + "'");
  }
}

}  // namespace

ExperimentConfig parse_config_text(const std::string& text) {
  ExperimentConfig cfg;
  std::istringstream in(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError("config: malformed section header at line " +
                          std::to_string(lineno));
      section = trim(line.substr(1, line.size() - 2));
      if (section != "domain" && section != "params" && section != "output")
        throw ConfigError("config: unknown section '" + section + "'");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config: expected 'key = value' at line " +
                        std::to_string(lineno));
    std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty())
      throw ConfigError("config: empty key or value at line " +
                        std::to_string(lineno));
    if (!section.empty()) key = section + "." + key;
    if (cfg.raw.count(key))
      throw ConfigError("config: duplicate key '" + key + "'");
    cfg.raw[key] = value;
    apply(cfg, key, value);
  }
  if (cfg.experiment.empty())
    throw ConfigError("config: missing top-level 'experiment' key");
  if (cfg.dim != 1 && cfg.dim != 2)
    throw ConfigError("config: domain.dim must be 1 or 2");
  if (cfg.nodes_per_axis < 4)
    throw ConfigError("config: domain.nodes_per_axis must be >= 4");
  if (cfg.length <= 0) throw ConfigError("config: domain.length must be > 0");
  if (cfg.trials < 1) throw ConfigError("config: params.trials must be >= 1");
  if (cfg.threads < 1) throw ConfigError("config: output.threads must be >= 1");
  if (cfg.target_dim < 2) throw ConfigError("config: params.N must be >= 2");
  return cfg;
}

ExperimentConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

DomainPtr ExperimentConfig::make_domain() const {
  return build_domain(dim, topology, nodes_per_axis, length);
}

}  // namespace fdc

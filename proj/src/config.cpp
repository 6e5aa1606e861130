#include "kinlab/config.hpp"

#include <charconv>
#include <cmath>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include <fmt/format.h>

namespace kinlab {

ConfigError::ConfigError(const std::string& what, int line, int column)
    : Error(line > 0 ? fmt::format("line {}, column {}: {}", line, column, what) : what),
      line_(line),
      column_(column) {}

namespace {

struct Location {
  int line = 0;
  int column = 0;
};

struct Entry {
  std::string key;  // section.key
  std::string value;
  Location key_at, value_at;
};

const std::set<std::string> kSections = {"lattice", "reservoir", "drive", "probes", "evolve", "mc", "output"};

std::string trim(const std::string& s, std::size_t* lead = nullptr) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) {
    if (lead) *lead = s.size();
    return "";
  }
  const auto e = s.find_last_not_of(" \t");
  if (lead) *lead = b;
  return s.substr(b, e - b + 1);
}

bool valid_identifier(const std::string& s) {
  if (s.empty()) return false;
  for (char c : s)
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.')) return false;
  return true;
}

std::vector<Entry> tokenize(const std::string& text) {
  std::vector<Entry> out;
  std::string section;
  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    if (!raw.empty() && raw.back() == '\r') raw.pop_back();
    std::string line = raw;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    std::size_t lead = 0;
    const std::string body = trim(line, &lead);
    if (body.empty() || body[0] == ';') continue;
    const int col = static_cast<int>(lead) + 1;
    if (body[0] == '[') {
      if (body.back() != ']') throw ConfigError("unterminated section header", line_no, col);
      section = trim(body.substr(1, body.size() - 2));
      if (!kSections.count(section)) throw ConfigError(fmt::format("unknown section '{}'", section), line_no, col + 1);
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("expected 'key = value'", line_no, col);
    const std::string key = trim(line.substr(0, eq));
    std::size_t vlead = 0;
    const std::string value = trim(line.substr(eq + 1), &vlead);
    if (!valid_identifier(key)) throw ConfigError(fmt::format("malformed key '{}'", key), line_no, col);
    if (value.empty()) throw ConfigError(fmt::format("missing value for '{}'", key), line_no, static_cast<int>(eq) + 2);
    Entry e;
    if (key.find('.') != std::string::npos) {
      if (!section.empty()) throw ConfigError("qualified key inside a section", line_no, col);
      e.key = key;
    } else {
      if (section.empty()) throw ConfigError(fmt::format("key '{}' outside any section", key), line_no, col);
      e.key = section + "." + key;
    }
    e.value = value;
    e.key_at = {line_no, col};
    e.value_at = {line_no, static_cast<int>(eq + 1 + vlead) + 1};
    out.push_back(std::move(e));
  }
  return out;
}

double parse_double(const std::string& s, Location at) {
  double v = 0.0;
  const char* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end || !std::isfinite(v))
    throw ConfigError(fmt::format("'{}' is not a finite number", s), at.line, at.column);
  return v;
}

long long parse_integer(const std::string& s, Location at) {
  long long v = 0;
  const char* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end) throw ConfigError(fmt::format("'{}' is not an integer", s), at.line, at.column);
  return v;
}

std::vector<double> parse_list(const std::string& s, Location at) {
  std::vector<double> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = s.find(',', start);
    const std::string item = trim(s.substr(start, comma == std::string::npos ? std::string::npos : comma - start));
    if (item.empty()) throw ConfigError("empty list element", at.line, at.column);
    out.push_back(parse_double(item, at));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

[[noreturn]] void out_of_range(const std::string& key, const std::string& why, Location at) {
  throw ConfigError(fmt::format("{}: {}", key, why), at.line, at.column);
}

using Setter = std::function<void(RunConfig&, const Entry&)>;

std::map<std::string, Setter> setters() {
  std::map<std::string, Setter> s;
  auto positive = [](const std::string& key, double v, Location at) {
    if (!(v > 0.0)) out_of_range(key, "must be positive", at);
    return v;
  };
  s["lattice.d_lat"] = [](RunConfig& c, const Entry& e) {
    const auto v = parse_integer(e.value, e.value_at);
    if (v < 1 || v > 3) out_of_range(e.key, "must be 1, 2 or 3", e.value_at);
    c.lattice.d_lat = static_cast<int>(v);
  };
  s["lattice.n_per_axis"] = [](RunConfig& c, const Entry& e) {
    const auto v = parse_integer(e.value, e.value_at);
    if (v < 2 || v % 2 != 0 || v > 1024) out_of_range(e.key, "must be even and in [2, 1024]", e.value_at);
    c.lattice.n_per_axis = static_cast<int>(v);
  };
  s["lattice.amplitudes"] = [positive](RunConfig& c, const Entry& e) {
    c.lattice.amplitudes = parse_list(e.value, e.value_at);
    for (double a : c.lattice.amplitudes) positive(e.key, a, e.value_at);
  };
  s["reservoir.beta"] = [positive](RunConfig& c, const Entry& e) {
    c.reservoir.beta = positive(e.key, parse_double(e.value, e.value_at), e.value_at);
  };
  s["reservoir.d_res"] = [](RunConfig& c, const Entry& e) {
    const auto v = parse_integer(e.value, e.value_at);
    if (v != 2 && v != 3) out_of_range(e.key, "must be 2 or 3", e.value_at);
    c.reservoir.d_res = static_cast<int>(v);
  };
  s["reservoir.profile"] = [](RunConfig& c, const Entry& e) {
    if (e.value != "gaussian") out_of_range(e.key, "only 'gaussian' is available", e.value_at);
    c.reservoir.form_factor.profile = e.value;
  };
  s["reservoir.amplitude"] = [positive](RunConfig& c, const Entry& e) {
    c.reservoir.form_factor.amplitude = positive(e.key, parse_double(e.value, e.value_at), e.value_at);
  };
  s["reservoir.width"] = [positive](RunConfig& c, const Entry& e) {
    c.reservoir.form_factor.width = positive(e.key, parse_double(e.value, e.value_at), e.value_at);
  };
  s["drive.chi"] = [](RunConfig& c, const Entry& e) { c.drive.chi = parse_list(e.value, e.value_at); };
  s["probes.kappa"] = [](RunConfig& c, const Entry& e) { c.probes.kappa = parse_list(e.value, e.value_at); };
  s["probes.lambda"] = [](RunConfig& c, const Entry& e) {
    auto v = parse_list(e.value, e.value_at);
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!(v[i] > 0.0)) out_of_range(e.key, "values must be positive", e.value_at);
      if (i > 0 && !(v[i] < v[i - 1])) out_of_range(e.key, "values must be strictly decreasing", e.value_at);
    }
    c.probes.lambdas = std::move(v);
  };
  s["probes.z"] = [](RunConfig& c, const Entry& e) {
    const auto v = parse_list(e.value, e.value_at);
    if (v.size() > 2) out_of_range(e.key, "expects 're' or 're, im'", e.value_at);
    if (v[0] < 0.0) out_of_range(e.key, "real part must be >= 0", e.value_at);
    c.probes.z = cplx(v[0], v.size() > 1 ? v[1] : 0.0);
  };
  s["probes.large_field"] = [](RunConfig& c, const Entry& e) {
    auto v = parse_list(e.value, e.value_at);
    for (double x : v)
      if (!(x > 0.0)) out_of_range(e.key, "values must be positive", e.value_at);
    c.probes.large_field = std::move(v);
  };
  s["evolve.t_end"] = [](RunConfig& c, const Entry& e) {
    const double v = parse_double(e.value, e.value_at);
    if (v < 0.0) out_of_range(e.key, "must be >= 0", e.value_at);
    c.evolve.t_end = v;
  };
  s["evolve.samples"] = [](RunConfig& c, const Entry& e) {
    const auto v = parse_integer(e.value, e.value_at);
    if (v < 2 || v > 100000) out_of_range(e.key, "must be in [2, 100000]", e.value_at);
    c.evolve.samples = static_cast<int>(v);
  };
  s["evolve.method"] = [](RunConfig& c, const Entry& e) {
    if (e.value != "eig" && e.value != "rk4" && e.value != "dyson")
      out_of_range(e.key, "must be eig, rk4 or dyson", e.value_at);
    c.evolve.method = e.value;
  };
  s["mc.n_traj"] = [](RunConfig& c, const Entry& e) {
    const auto v = parse_integer(e.value, e.value_at);
    if (v < 100 || v > 100000000) out_of_range(e.key, "must be in [100, 1e8]", e.value_at);
    c.mc.n_traj = static_cast<int>(v);
  };
  s["mc.horizon"] = [positive](RunConfig& c, const Entry& e) {
    c.mc.horizon = positive(e.key, parse_double(e.value, e.value_at), e.value_at);
  };
  s["mc.seed"] = [](RunConfig& c, const Entry& e) {
    std::uint64_t v = 0;
    const char* end = e.value.data() + e.value.size();
    auto [ptr, ec] = std::from_chars(e.value.data(), end, v);
    if (ec != std::errc() || ptr != end) out_of_range(e.key, "must be an unsigned 64-bit integer", e.value_at);
    c.mc.seed = v;
  };
  s["mc.burn_in"] = [](RunConfig& c, const Entry& e) {
    const double v = parse_double(e.value, e.value_at);
    if (v < 0.0 || v >= 1.0) out_of_range(e.key, "must lie in [0, 1)", e.value_at);
    c.mc.burn_in = v;
  };
  s["output.format"] = [](RunConfig& c, const Entry& e) {
    if (e.value != "csv" && e.value != "json") out_of_range(e.key, "must be csv or json", e.value_at);
    c.output.format = e.value;
  };
  s["output.path"] = [](RunConfig& c, const Entry& e) { c.output.path = e.value; };
  return s;
}

// Broadcasts a length-one list to d entries; anything else must match d.
void fit_dimension(std::vector<double>& v, int d, const std::string& key, const std::map<std::string, Location>& at) {
  if (static_cast<int>(v.size()) == d) return;
  if (v.size() == 1) {
    v.assign(d, v[0]);
    return;
  }
  const auto it = at.find(key);
  out_of_range(key, fmt::format("has {} entries, lattice has dimension {}", v.size(), d),
               it == at.end() ? Location{} : it->second);
}

}  // namespace

Vec RunConfig::chi() const { return Eigen::Map<const Vec>(drive.chi.data(), static_cast<Index>(drive.chi.size())); }
Vec RunConfig::kappa() const {
  return Eigen::Map<const Vec>(probes.kappa.data(), static_cast<Index>(probes.kappa.size()));
}

RunConfig parse_config(const std::string& text, const std::vector<std::string>& overrides) {
  std::vector<Entry> entries = tokenize(text);
  std::map<std::string, Location> first;
  for (const Entry& e : entries) {
    auto [it, fresh] = first.emplace(e.key, e.key_at);
    if (!fresh)
      throw ConfigError(fmt::format("duplicate key '{}' (first at line {}, column {}; again at line {}, column {})",
                                    e.key, it->second.line, it->second.column, e.key_at.line, e.key_at.column),
                        e.key_at.line, e.key_at.column);
  }
  std::set<std::string> overridden;
  for (const std::string& o : overrides) {
    const auto eq = o.find('=');
    if (eq == std::string::npos) throw ConfigError(fmt::format("override '{}' is not key=value", o));
    Entry e;
    e.key = trim(o.substr(0, eq));
    e.value = trim(o.substr(eq + 1));
    if (e.key.find('.') == std::string::npos || !valid_identifier(e.key))
      throw ConfigError(fmt::format("override key '{}' must be section.key", e.key));
    if (e.value.empty()) throw ConfigError(fmt::format("override '{}' has no value", e.key));
    if (!overridden.insert(e.key).second) throw ConfigError(fmt::format("override '{}' given twice", e.key));
    entries.push_back(std::move(e));
  }

  const auto table = setters();
  RunConfig cfg;
  std::map<std::string, Location> where;
  for (const Entry& e : entries) {
    const auto it = table.find(e.key);
    if (it == table.end()) throw ConfigError(fmt::format("unknown key '{}'", e.key), e.key_at.line, e.key_at.column);
    it->second(cfg, e);
    where[e.key] = e.key_at;
  }
  const int d = cfg.lattice.d_lat;
  fit_dimension(cfg.lattice.amplitudes, d, "lattice.amplitudes", where);
  fit_dimension(cfg.drive.chi, d, "drive.chi", where);
  fit_dimension(cfg.probes.kappa, d, "probes.kappa", where);
  long long size = 1;
  for (int a = 0; a < d; ++a) size *= cfg.lattice.n_per_axis;
  if (size > 4096) {
    const auto it = where.find("lattice.n_per_axis");
    out_of_range("lattice.n_per_axis", fmt::format("grid of {} points exceeds the dense limit 4096", size),
                 it == where.end() ? Location{} : it->second);
  }
  return cfg;
}

std::string canonical_config(const RunConfig& c) {
  auto list = [](const std::vector<double>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + fmt::format("{:.17g}", v[i]);
    return s;
  };
  std::string out;
  out += fmt::format("lattice.d_lat={}\n", c.lattice.d_lat);
  out += fmt::format("lattice.n_per_axis={}\n", c.lattice.n_per_axis);
  out += fmt::format("lattice.amplitudes={}\n", list(c.lattice.amplitudes));
  out += fmt::format("reservoir.beta={:.17g}\n", c.reservoir.beta);
  out += fmt::format("reservoir.d_res={}\n", c.reservoir.d_res);
  out += fmt::format("reservoir.profile={}\n", c.reservoir.form_factor.profile);
  out += fmt::format("reservoir.amplitude={:.17g}\n", c.reservoir.form_factor.amplitude);
  out += fmt::format("reservoir.width={:.17g}\n", c.reservoir.form_factor.width);
  out += fmt::format("drive.chi={}\n", list(c.drive.chi));
  out += fmt::format("probes.kappa={}\n", list(c.probes.kappa));
  out += fmt::format("probes.lambda={}\n", list(c.probes.lambdas));
  out += fmt::format("probes.z={:.17g},{:.17g}\n", c.probes.z.real(), c.probes.z.imag());
  out += fmt::format("probes.large_field={}\n", list(c.probes.large_field));
  out += fmt::format("evolve.t_end={:.17g}\n", c.evolve.t_end);
  out += fmt::format("evolve.samples={}\n", c.evolve.samples);
  out += fmt::format("evolve.method={}\n", c.evolve.method);
  out += fmt::format("mc.n_traj={}\n", c.mc.n_traj);
  out += fmt::format("mc.horizon={:.17g}\n", c.mc.horizon);
  out += fmt::format("mc.seed={}\n", c.mc.seed);
  out += fmt::format("mc.burn_in={:.17g}\n", c.mc.burn_in);
  // output settings do not change the numbers and stay out of the fingerprint
  return out;
}

std::string config_fingerprint(const RunConfig& config) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : canonical_config(config)) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return fmt::format("{:016x}", h);
}

}  // namespace kinlab

#include <algorithm>
#include <charconv>
#include <map>
#include <set>
#include <sstream>

#include "nls/error.hpp"
#include "nls/io.hpp"

namespace nls {

namespace {

using Section = std::map<std::string, std::string>;
using Document = std::map<std::string, Section>;

const std::string kTopLevel;  // keys before the first section header

const std::map<std::string, std::set<std::string>>& known_keys() {
  static const std::map<std::string, std::set<std::string>> keys{
      {kTopLevel, {"mode"}},
      {"params", {"epsilon", "p", "mass", "dims"}},
      {"grid", {"half_width", "points", "profile_points"}},
      {"potential", {"kind", "omega"}},
      {"bump.1", {"mass", "center", "velocity"}},
      {"bump.2", {"mass", "center", "velocity"}},
      {"flow", {"energy_tol", "step_tol", "k_init", "k_max", "max_steps", "renormalize"}},
      {"propagator", {"step_k", "t_final", "frame_stride", "newton_step"}},
      {"output", {"dir", "frames"}},
      {"sweep", {"epsilons"}},
  };
  return keys;
}

std::vector<std::string> required_sections(std::optional<Mode> mode) {
  if (!mode) return {"params", "grid", "potential", "bump.1", "propagator", "output"};
  switch (*mode) {
    case Mode::groundstate:
      return {"params", "grid", "output"};
    case Mode::evolve:
      return {"params", "grid", "potential", "bump.1", "propagator", "output"};
    case Mode::newton:
      return {"params", "potential", "bump.1", "propagator", "output"};
    case Mode::error_sweep:
      return {"params", "grid", "potential", "bump.1", "propagator", "output", "sweep"};
  }
  return {};
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

// Collects error messages; everything is reported at once.
struct Problems {
  std::vector<std::string> list;
  void add(std::string msg) { list.push_back(std::move(msg)); }
};

Document tokenize(std::string_view text, Problems& problems) {
  Document doc;
  doc[kTopLevel];
  std::string section = kTopLevel;
  std::istringstream in{std::string(text)};
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto hash = raw.find_first_of("#;");
    const std::string line = trim(std::string_view(raw).substr(0, hash));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        problems.add("line " + std::to_string(line_no) + ": malformed section header");
        continue;
      }
      section = trim(std::string_view(line).substr(1, line.size() - 2));
      if (!known_keys().contains(section)) {
        problems.add("line " + std::to_string(line_no) + ": unknown section [" + section + "]");
      }
      doc[section];
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      problems.add("line " + std::to_string(line_no) + ": expected key = value");
      continue;
    }
    const std::string key = trim(std::string_view(line).substr(0, eq));
    const std::string value = trim(std::string_view(line).substr(eq + 1));
    if (doc[section].contains(key)) {
      problems.add("line " + std::to_string(line_no) + ": duplicate key '" + key + "'");
    }
    doc[section][key] = value;
  }
  return doc;
}

std::string where(const std::string& section, const std::string& key) {
  return section.empty() ? key : section + "." + key;
}

class Reader {
 public:
  Reader(const Document& doc, Problems& problems) : doc_(doc), problems_(problems) {}

  bool has(const std::string& section, const std::string& key) const {
    auto it = doc_.find(section);
    return it != doc_.end() && it->second.contains(key);
  }

  std::optional<std::string> text(const std::string& section, const std::string& key,
                                  bool required) const {
    if (!has(section, key)) {
      if (required) problems_.add("missing required key '" + where(section, key) + "'");
      return std::nullopt;
    }
    return doc_.at(section).at(key);
  }

  double number(const std::string& section, const std::string& key, double fallback,
                bool required = false) const {
    const auto t = text(section, key, required);
    if (!t) return fallback;
    double v = 0.0;
    if (!parse_double(*t, v)) {
      problems_.add("'" + where(section, key) + "' is not a number: " + *t);
      return fallback;
    }
    return v;
  }

  std::vector<double> numbers(const std::string& section, const std::string& key,
                              bool required = false) const {
    const auto t = text(section, key, required);
    std::vector<double> out;
    if (!t) return out;
    std::istringstream in(*t);
    std::string item;
    while (std::getline(in, item, ',')) {
      double v = 0.0;
      if (!parse_double(trim(item), v)) {
        problems_.add("'" + where(section, key) + "' has a non-numeric entry: " + item);
        return {};
      }
      out.push_back(v);
    }
    return out;
  }

  bool boolean(const std::string& section, const std::string& key, bool fallback) const {
    const auto t = text(section, key, false);
    if (!t) return fallback;
    if (*t == "true" || *t == "1" || *t == "yes" || *t == "on") return true;
    if (*t == "false" || *t == "0" || *t == "no" || *t == "off") return false;
    problems_.add("'" + where(section, key) + "' must be true or false");
    return fallback;
  }

 private:
  static bool parse_double(const std::string& s, double& v) {
    if (s.empty()) return false;
    const char* first = s.data();
    if (*first == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, s.data() + s.size(), v);
    return ec == std::errc{} && ptr == s.data() + s.size();
  }

  const Document& doc_;
  Problems& problems_;
};

// Expands a scalar to every dimension or checks the list length.
template <class T>
std::optional<std::array<T, kMaxDims>> per_dim(const std::vector<double>& values, int dims,
                                              const std::string& name, Problems& problems) {
  std::array<T, kMaxDims> out{};
  if (values.size() == 1) {
    for (int d = 0; d < dims; ++d) out[d] = static_cast<T>(values[0]);
  } else if (values.size() == static_cast<std::size_t>(dims)) {
    for (int d = 0; d < dims; ++d) out[d] = static_cast<T>(values[d]);
  } else {
    problems.add("'" + name + "' needs 1 or " + std::to_string(dims) + " entries");
    return std::nullopt;
  }
  return out;
}

bool is_count(double v) { return v >= 0.0 && v == std::floor(v) && v < 1e15; }

}  // namespace

std::optional<Mode> mode_from_string(std::string_view name) {
  if (name == "groundstate") return Mode::groundstate;
  if (name == "evolve") return Mode::evolve;
  if (name == "newton") return Mode::newton;
  if (name == "error-sweep") return Mode::error_sweep;
  return std::nullopt;
}

std::string_view to_string(Mode mode) {
  switch (mode) {
    case Mode::groundstate:
      return "groundstate";
    case Mode::evolve:
      return "evolve";
    case Mode::newton:
      return "newton";
    case Mode::error_sweep:
      return "error-sweep";
  }
  return "unknown";
}

GridSpec RunConfig::profile_grid() const {
  return sub_grid(grid, std::span(profile_points.data(), static_cast<std::size_t>(grid.dims)));
}

Potential RunConfig::make_potential() const {
  if (potential.kind != "harmonic") {
    throw ConfigError("potential kind '" + potential.kind + "' is not available from a config file");
  }
  return Potential::harmonic(params.dims, potential.omega);
}

RunConfig parse_config(std::string_view text, std::optional<Mode> mode_override,
                       const std::vector<ConfigOverride>& overrides) {
  Problems problems;
  Document doc = tokenize(text, problems);

  for (const auto& [path, value] : overrides) {
    const auto dot = path.rfind('.');
    if (dot == std::string::npos) {
      if (path == "mode") {
        doc[kTopLevel]["mode"] = value;
      } else {
        problems.add("override '" + path + "' must have the form section.key");
      }
      continue;
    }
    const std::string section = path.substr(0, dot);
    if (!known_keys().contains(section)) {
      problems.add("override '" + path + "' names unknown section [" + section + "]");
      continue;
    }
    doc[section][path.substr(dot + 1)] = value;
  }

  for (const auto& [section, entries] : doc) {
    const auto known = known_keys().find(section);
    if (known == known_keys().end()) continue;
    for (const auto& [key, value] : entries) {
      if (!known->second.contains(key)) {
        problems.add("unknown key '" + key + "' in " +
                     (section.empty() ? std::string("top level") : "[" + section + "]"));
      }
    }
  }

  RunConfig cfg;
  std::optional<Mode> mode = mode_override;
  if (!mode) {
    if (doc[kTopLevel].contains("mode")) {
      mode = mode_from_string(doc[kTopLevel]["mode"]);
      if (!mode) problems.add("unknown mode '" + doc[kTopLevel]["mode"] + "'");
    } else {
      problems.add("missing required key 'mode'");
    }
  }
  std::vector<std::string> missing;
  for (const auto& s : required_sections(mode)) {
    if (!doc.contains(s)) missing.push_back("[" + s + "]");
  }
  if (!missing.empty()) {
    std::string joined;
    for (const auto& m : missing) joined += (joined.empty() ? "" : ", ") + m;
    problems.add("missing sections: " + joined);
  }
  if (!mode || !missing.empty()) {
    std::string msg;
    for (const auto& p : problems.list) msg += (msg.empty() ? "" : "; ") + p;
    throw ConfigError(msg);
  }
  cfg.mode = *mode;

  const Reader r(doc, problems);
  // [params]
  cfg.params.epsilon = r.number("params", "epsilon", 0.0, true);
  cfg.params.p = r.number("params", "p", 0.0, true);
  cfg.params.mass = r.number("params", "mass", 1.0);
  const double dims = r.number("params", "dims", 2.0);
  if (!is_count(dims) || dims < 1 || dims > kMaxDims) {
    problems.add("'params.dims' must be 1, 2 or 3");
  } else {
    cfg.params.dims = static_cast<int>(dims);
  }
  try {
    cfg.params.validate();
  } catch (const ConfigError& e) {
    problems.add(e.what());
  }
  const int n = cfg.params.dims;

  // [grid]
  if (doc.contains("grid")) {
    const auto widths = per_dim<double>(r.numbers("grid", "half_width", true), n, "grid.half_width", problems);
    const auto pts_raw = r.numbers("grid", "points", true);
    const bool counts_ok = std::all_of(pts_raw.begin(), pts_raw.end(), is_count);
    if (!counts_ok) problems.add("'grid.points' must be positive integers");
    const auto pts = per_dim<std::size_t>(pts_raw, n, "grid.points", problems);
    if (widths && pts && counts_ok) {
      try {
        cfg.grid = make_grid(n, std::span(widths->data(), n), std::span(pts->data(), n));
        cfg.profile_points = cfg.grid.points;
        if (r.has("grid", "profile_points")) {
          const auto pp = per_dim<std::size_t>(r.numbers("grid", "profile_points"), n,
                                               "grid.profile_points", problems);
          if (pp) {
            cfg.profile_points = *pp;
            for (int d = n; d < kMaxDims; ++d) cfg.profile_points[d] = 1;
            (void)cfg.profile_grid();
          }
        }
      } catch (const ConfigError& e) {
        problems.add(e.what());
      }
    }
  }

  // [potential]
  if (doc.contains("potential")) {
    cfg.potential.kind = r.text("potential", "kind", false).value_or("harmonic");
    if (cfg.potential.kind != "harmonic") {
      problems.add("potential.kind must be 'harmonic' (custom potentials need the library API)");
    }
    if (auto om = per_dim<double>(r.numbers("potential", "omega", true), n, "potential.omega", problems)) {
      cfg.potential.omega = *om;
      for (int d = 0; d < n; ++d) {
        if (!(cfg.potential.omega[d] > 0.0)) problems.add("potential.omega entries must be positive");
      }
    }
  }

  // [bump.1], [bump.2]
  for (const std::string name : {"bump.1", "bump.2"}) {
    if (!doc.contains(name)) continue;
    BumpSpec b;
    b.mass = r.number(name, "mass", cfg.params.mass);
    if (!(b.mass > 0.0)) problems.add(name + ".mass must be positive");
    const auto c = r.numbers(name, "center", true);
    if (c.size() == static_cast<std::size_t>(n)) {
      std::copy(c.begin(), c.end(), b.center.begin());
    } else if (!c.empty()) {
      problems.add(name + ".center needs " + std::to_string(n) + " entries");
    }
    if (r.has(name, "velocity")) {
      const auto v = r.numbers(name, "velocity");
      if (v.size() == static_cast<std::size_t>(n)) {
        std::copy(v.begin(), v.end(), b.velocity.begin());
      } else {
        problems.add(name + ".velocity needs " + std::to_string(n) + " entries");
      }
    }
    cfg.bumps.push_back(b);
  }
  if (doc.contains("bump.2") && !doc.contains("bump.1")) problems.add("[bump.2] requires [bump.1]");

  // [flow]
  cfg.flow.energy_tol = r.number("flow", "energy_tol", cfg.flow.energy_tol);
  cfg.flow.step_tol = r.number("flow", "step_tol", cfg.flow.step_tol);
  cfg.flow.k_init = r.number("flow", "k_init", cfg.flow.k_init);
  cfg.flow.k_max = r.number("flow", "k_max", cfg.flow.k_max);
  const double max_steps = r.number("flow", "max_steps", static_cast<double>(cfg.flow.max_steps));
  if (!is_count(max_steps)) {
    problems.add("flow.max_steps must be a positive integer");
  } else {
    cfg.flow.max_steps = static_cast<std::size_t>(max_steps);
  }
  cfg.flow.renormalize = r.boolean("flow", "renormalize", cfg.flow.renormalize);
  try {
    cfg.flow.validate();
  } catch (const ConfigError& e) {
    problems.add(e.what());
  }

  // [propagator]
  if (doc.contains("propagator")) {
    cfg.propagator.step_k = r.number("propagator", "step_k", cfg.propagator.step_k);
    cfg.propagator.t_final = r.number("propagator", "t_final", 0.0, true);
    const double stride = r.number("propagator", "frame_stride", 1.0);
    if (!is_count(stride) || stride < 1) {
      problems.add("propagator.frame_stride must be an integer >= 1");
    } else {
      cfg.propagator.frame_stride = static_cast<std::size_t>(stride);
    }
    cfg.newton_step = r.number("propagator", "newton_step", cfg.propagator.step_k);
    if (!(cfg.newton_step > 0.0)) problems.add("propagator.newton_step must be positive");
    try {
      cfg.propagator.validate();
    } catch (const ConfigError& e) {
      problems.add(e.what());
    }
  }

  // [output]
  if (auto dir = r.text("output", "dir", true)) cfg.output_dir = *dir;
  cfg.write_frames = r.boolean("output", "frames", cfg.mode == Mode::evolve);

  // [sweep]
  if (doc.contains("sweep")) {
    cfg.sweep_epsilons = r.numbers("sweep", "epsilons", true);
    for (double e : cfg.sweep_epsilons) {
      if (!(e > 0.0)) problems.add("sweep.epsilons entries must be positive");
    }
  }

  if (!problems.list.empty()) {
    std::string msg;
    for (const auto& p : problems.list) msg += (msg.empty() ? "" : "; ") + p;
    throw ConfigError(msg);
  }
  return cfg;
}

}  // namespace nls

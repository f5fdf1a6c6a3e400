#include "philab/config.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "philab/errors.hpp"
#include "philab/expression.hpp"

namespace philab {

namespace {

struct IdName {
  ExperimentId id;
  const char* name;
};

constexpr IdName kIds[] = {
    {ExperimentId::GammaEnergy, "gamma_energy"},
    {ExperimentId::LimitConvergence, "limit_convergence"},
    {ExperimentId::EpsSandwich, "eps_sandwich"},
    {ExperimentId::SubdomainExtremal, "subdomain_extremal"},
    {ExperimentId::InequalityFuzz, "inequality_fuzz"},
    {ExperimentId::PoincareJump, "poincare_jump"},
    {ExperimentId::StructureAudit, "structure_audit"},
};

const std::map<std::string, std::set<std::string>>& schema() {
  static const std::map<std::string, std::set<std::string>> s{
      {"experiment", {"id", "seed", "out"}},
      {"domain", {"dim", "nodes", "h", "lower", "upper", "subdomain"}},
      {"family", {"kind", "p", "outside_p"}},
      {"boundary", {"preset", "slope", "apex"}},
      {"sweep", {"p", "eps"}},
      {"fuzz", {"dims", "exponents", "samples", "gamma"}},
      {"poincare", {"h", "trials", "delta"}},
  };
  return s;
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos == std::string_view::npos ? pos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

double constant_value(const std::string& text) {
  const Expression e = Expression::parse(text);
  if (!e.is_constant()) throw ExpressionError("expected a constant", 1);
  const double v = e.value({0.0, 0.0});
  if (!std::isfinite(v)) throw ExpressionError("value is not finite", 1);
  return v;
}

long integer_value(const std::string& text) {
  long v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw ExpressionError("expected an integer", 1);
  }
  return v;
}

// "name(a, b, ...)" -> name and argument values.
std::pair<std::string, std::vector<double>> call_form(const std::string& text) {
  const auto open = text.find('(');
  if (open == std::string::npos) return {trim(text), {}};
  if (text.back() != ')') throw ExpressionError("expected ')' at the end", static_cast<int>(text.size()));
  std::vector<double> args;
  for (const std::string& a : split(std::string_view(text).substr(open + 1, text.size() - open - 2), ',')) {
    args.push_back(constant_value(a));
  }
  return {trim(text.substr(0, open)), args};
}

struct Entry {
  std::string value;
  int line = 0;
};

using Table = std::map<std::string, std::map<std::string, Entry>>;

Table tokenize(std::string_view text) {
  Table table;
  std::string section;
  int line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto end = text.find('\n', start);
    std::string_view raw = text.substr(start, end == std::string_view::npos ? end : end - start);
    start = end == std::string_view::npos ? text.size() + 1 : end + 1;
    ++line_no;
    const auto hash = raw.find('#');
    const std::string line = trim(raw.substr(0, hash));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError("malformed section header", line_no);
      section = trim(std::string_view(line).substr(1, line.size() - 2));
      if (!schema().count(section)) throw ConfigError("unknown section [" + section + "]", line_no);
      if (table.count(section)) throw ConfigError("duplicate section [" + section + "]", line_no);
      table[section];
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("expected 'key = value'", line_no);
    if (section.empty()) throw ConfigError("key outside of a section", line_no);
    const std::string key = trim(std::string_view(line).substr(0, eq));
    const std::string value = trim(std::string_view(line).substr(eq + 1));
    if (!schema().at(section).count(key)) {
      throw ConfigError("unknown key '" + key + "' in [" + section + "]", line_no);
    }
    if (value.empty()) throw ConfigError("empty value for '" + key + "'", line_no);
    auto& keys = table[section];
    if (keys.count(key)) throw ConfigError("duplicate key '" + key + "'", line_no);
    keys[key] = {value, line_no};
  }
  return table;
}

// Runs f on the entry when present, converting parse failures into line-tagged errors.
template <typename F>
void with(const Table& t, const std::string& section, const std::string& key, F&& f) {
  const auto s = t.find(section);
  if (s == t.end()) return;
  const auto k = s->second.find(key);
  if (k == s->second.end()) return;
  try {
    f(k->second.value);
  } catch (const ExpressionError& e) {
    throw ConfigError(fmt::format("{}.{}: {}", section, key, e.what()), k->second.line);
  } catch (const ConfigError& e) {
    throw ConfigError(fmt::format("{}.{}: {}", section, key, e.what()), k->second.line);
  }
}

BoundarySpec parse_preset(const std::string& text) {
  const auto [name, args] = call_form(text);
  BoundarySpec b;
  b.label = text;
  if (name == "scaled") {
    if (args.size() != 1) throw ConfigError("scaled(t) takes one argument");
    b.preset = BoundaryPreset::Scaled;
    b.factor = args[0];
    return b;
  }
  if (!args.empty()) throw ConfigError("preset '" + name + "' takes no arguments");
  if (name == "affine") {
    b.preset = BoundaryPreset::Affine;
  } else if (name == "aronsson") {
    b.preset = BoundaryPreset::Aronsson;
  } else if (name == "cone") {
    b.preset = BoundaryPreset::Cone;
  } else if (name == "zero") {
    b.preset = BoundaryPreset::Zero;
  } else {
    throw ConfigError("unknown preset '" + name + "'; expected affine, aronsson, cone, scaled(t) or zero");
  }
  return b;
}

bool strictly_ascending(const std::vector<double>& v) {
  return std::adjacent_find(v.begin(), v.end(), std::greater_equal<>()) == v.end();
}

bool needs_boundary(ExperimentId id) {
  return id == ExperimentId::GammaEnergy || id == ExperimentId::LimitConvergence ||
         id == ExperimentId::SubdomainExtremal;
}

}  // namespace

const char* to_string(ExperimentId id) {
  for (const auto& e : kIds) {
    if (e.id == id) return e.name;
  }
  return "?";
}

std::optional<ExperimentId> parse_experiment_id(std::string_view text) {
  for (const auto& e : kIds) {
    if (text == e.name) return e.id;
  }
  return std::nullopt;
}

std::vector<double> parse_real_list(std::string_view text) {
  std::vector<double> out;
  for (const std::string& item : split(text, ',')) {
    if (item.empty()) throw ExpressionError("empty list entry", 1);
    out.push_back(constant_value(item));
  }
  return out;
}

int nodes_for_spacing(double extent, double h) {
  if (!(h > 0.0) || !(extent > 0.0)) throw ConfigError("grid spacing must be positive");
  const double cells = extent / h;
  const double rounded = std::round(cells);
  if (rounded < 2.0 || std::fabs(cells - rounded) > 1e-9 * cells) {
    throw ConfigError(fmt::format("h = {} does not divide the box of width {} into at least 2 cells",
                                  h, extent));
  }
  return static_cast<int>(rounded) + 1;
}

ExperimentConfig parse_config(std::string_view text) {
  const Table t = tokenize(text);
  ExperimentConfig c;

  bool has_id = false;
  with(t, "experiment", "id", [&](const std::string& v) {
    const auto id = parse_experiment_id(v);
    if (!id) throw ConfigError("unknown experiment id '" + v + "'");
    c.id = *id;
    has_id = true;
  });
  if (!has_id) throw ConfigError("missing key 'id' in section [experiment]");
  with(t, "experiment", "seed", [&](const std::string& v) {
    const long s = integer_value(v);
    if (s < 0) throw ConfigError("seed must be nonnegative");
    c.seed = static_cast<std::uint64_t>(s);
  });
  c.out_dir = std::filesystem::path("philab_out") / to_string(c.id);
  with(t, "experiment", "out", [&](const std::string& v) { c.out_dir = v; });

  with(t, "domain", "dim", [&](const std::string& v) {
    const long d = integer_value(v);
    if (d != 1 && d != 2) throw ConfigError("dim must be 1 or 2");
    c.domain.dim = static_cast<int>(d);
  });
  c.domain.nodes = c.domain.dim == 1 ? 257 : 33;
  with(t, "domain", "lower", [&](const std::string& v) { c.domain.lower = constant_value(v); });
  with(t, "domain", "upper", [&](const std::string& v) { c.domain.upper = constant_value(v); });
  if (!(c.domain.upper > c.domain.lower)) throw ConfigError("domain needs upper > lower");
  bool has_nodes = false;
  with(t, "domain", "nodes", [&](const std::string& v) {
    const long n = integer_value(v);
    if (n < 3) throw ConfigError("nodes must be at least 3");
    c.domain.nodes = static_cast<int>(n);
    has_nodes = true;
  });
  with(t, "domain", "h", [&](const std::string& v) {
    if (has_nodes) throw ConfigError("give either nodes or h, not both");
    c.domain.nodes = nodes_for_spacing(c.domain.upper - c.domain.lower, constant_value(v));
  });
  with(t, "domain", "subdomain", [&](const std::string& v) {
    const auto [name, args] = call_form(v);
    if (name == "disc" && args.size() == 3) {
      c.domain.subdomain = Subdomain::disc({args[0], args[1]}, args[2]);
    } else if (name == "rect" && args.size() == 4) {
      c.domain.subdomain = Subdomain::rect({args[0], args[1]}, {args[2], args[3]});
    } else {
      throw ConfigError("expected disc(cx, cy, r) or rect(x0, y0, x1, y1)");
    }
  });

  with(t, "family", "kind", [&](const std::string& v) {
    if (v == "constant") {
      c.family.kind = FamilySpecKind::Constant;
    } else if (v == "variable") {
      c.family.kind = FamilySpecKind::Variable;
    } else if (v == "piecewise") {
      c.family.kind = FamilySpecKind::Piecewise;
    } else {
      throw ConfigError("unknown family kind '" + v + "'; expected constant, variable or piecewise");
    }
  });
  with(t, "family", "p", [&](const std::string& v) {
    const Expression e = Expression::parse(v);
    if (c.family.kind == FamilySpecKind::Constant) {
      throw ConfigError("constant families take p from the sweep");
    }
    if (c.family.kind == FamilySpecKind::Piecewise && !e.is_constant()) {
      throw ConfigError("piecewise families need a constant inside exponent");
    }
    c.family.exponent = v;
  });
  with(t, "family", "outside_p", [&](const std::string& v) {
    if (c.family.kind != FamilySpecKind::Piecewise) {
      throw ConfigError("outside_p applies to piecewise families only");
    }
    c.family.outside_p = constant_value(v);
  });

  bool has_preset = false;
  with(t, "boundary", "preset", [&](const std::string& v) {
    c.boundary = parse_preset(v);
    has_preset = true;
  });
  with(t, "boundary", "slope", [&](const std::string& v) {
    if (c.boundary.preset != BoundaryPreset::Affine) throw ConfigError("slope applies to affine only");
    c.boundary.factor = constant_value(v);
    c.boundary.label = fmt::format("affine(slope {})", v);
  });
  c.boundary.apex = {c.domain.lower, c.domain.lower};
  with(t, "boundary", "apex", [&](const std::string& v) {
    if (c.boundary.preset != BoundaryPreset::Cone) throw ConfigError("apex applies to cone only");
    const auto xs = parse_real_list(v);
    if (xs.size() != 2) throw ConfigError("apex needs two coordinates");
    c.boundary.apex = {xs[0], xs[1]};
  });
  if (!has_preset && needs_boundary(c.id)) {
    throw ConfigError("missing key 'preset' in section [boundary]");
  }

  with(t, "sweep", "p", [&](const std::string& v) { c.p_sweep = parse_real_list(v); });
  with(t, "sweep", "eps", [&](const std::string& v) { c.eps_list = parse_real_list(v); });

  with(t, "fuzz", "dims", [&](const std::string& v) {
    c.fuzz.dims.clear();
    for (double d : parse_real_list(v)) {
      if (d != 1.0 && d != 2.0 && d != 3.0) throw ConfigError("fuzz dims must be 1, 2 or 3");
      c.fuzz.dims.push_back(static_cast<int>(d));
    }
  });
  with(t, "fuzz", "exponents", [&](const std::string& v) { c.fuzz.exponents = parse_real_list(v); });
  with(t, "fuzz", "samples", [&](const std::string& v) {
    c.fuzz.samples = integer_value(v);
    if (c.fuzz.samples <= 0) throw ConfigError("samples must be positive");
  });
  with(t, "fuzz", "gamma", [&](const std::string& v) { c.fuzz.gamma = constant_value(v); });

  with(t, "poincare", "h", [&](const std::string& v) { c.poincare.h_list = parse_real_list(v); });
  with(t, "poincare", "trials", [&](const std::string& v) {
    const long n = integer_value(v);
    if (n <= 0) throw ConfigError("trials must be positive");
    c.poincare.trials = static_cast<int>(n);
  });
  with(t, "poincare", "delta", [&](const std::string& v) { c.poincare.delta = constant_value(v); });

  validate_config(c);
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot read config file " + path.string());
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str());
}

void validate_config(const ExperimentConfig& c) {
  if (c.p_sweep.empty()) throw ConfigError("p sweep is empty");
  if (!strictly_ascending(c.p_sweep)) throw ConfigError("p sweep must be strictly ascending");
  for (double p : c.p_sweep) {
    if (!(p > 1.0)) throw ConfigError("sweep exponents must exceed 1");
  }
  if (c.id == ExperimentId::EpsSandwich) {
    if (c.eps_list.empty()) throw ConfigError("eps list is empty");
    for (std::size_t i = 0; i < c.eps_list.size(); ++i) {
      if (!(c.eps_list[i] > 0.0)) throw ConfigError("eps values must be positive");
      if (i > 0 && !(c.eps_list[i] < c.eps_list[i - 1])) {
        throw ConfigError("eps list must be strictly decreasing");
      }
    }
  }
  if (c.id == ExperimentId::SubdomainExtremal && !c.domain.subdomain) {
    throw ConfigError("missing key 'subdomain' in section [domain]");
  }
  if (c.family.kind == FamilySpecKind::Piecewise && !c.domain.subdomain) {
    throw ConfigError("piecewise families need [domain] subdomain");
  }
  if (c.family.kind == FamilySpecKind::Variable && !c.family.exponent) {
    throw ConfigError("missing key 'p' in section [family]");
  }
  if (c.id == ExperimentId::PoincareJump) {
    if (c.family.kind != FamilySpecKind::Piecewise || !c.family.exponent) {
      throw ConfigError("poincare_jump needs a piecewise family with a fixed inside exponent");
    }
    if (c.poincare.h_list.size() < 2) throw ConfigError("poincare h list needs at least two entries");
    for (double h : c.poincare.h_list) nodes_for_spacing(c.domain.upper - c.domain.lower, h);
  }
  if (c.id == ExperimentId::InequalityFuzz && (c.fuzz.dims.empty() || c.fuzz.exponents.empty())) {
    throw ConfigError("fuzz dims and exponents must be nonempty");
  }
  if (c.domain.subdomain) {
    // Containment and convexity are checked by the grid.
    try {
      make_domain(c.domain);
    } catch (const DomainError& e) {
      throw ConfigError(std::string("subdomain: ") + e.what());
    }
  }
}

void apply_overrides(ExperimentConfig& c, const ConfigOverrides& o) {
  if (o.p_sweep) c.p_sweep = *o.p_sweep;
  if (o.h) c.domain.nodes = nodes_for_spacing(c.domain.upper - c.domain.lower, *o.h);
  if (o.seed) c.seed = *o.seed;
  if (o.out_dir) c.out_dir = *o.out_dir;
  validate_config(c);
}

GridDomain make_domain(const DomainSpec& spec) { return make_domain(spec, spec.nodes); }

GridDomain make_domain(const DomainSpec& spec, int nodes) {
  GridDomain d(spec.dim, nodes, spec.lower, spec.upper);
  if (spec.subdomain) d.set_subdomain(*spec.subdomain);
  return d;
}

PhiFamily make_family(const FamilySpec& spec, const DomainSpec& domain, double p) {
  switch (spec.kind) {
    case FamilySpecKind::Constant:
      return PhiFamily::constant_power(p);
    case FamilySpecKind::Variable: {
      const Expression e = Expression::parse(spec.exponent.value());
      ExponentField base = ExponentField::sampled(
          [e](const Point& x) { return e.value(x); }, [e](const Point& x) { return e.gradient(x); },
          domain.dim, domain.lower, domain.upper, e.text());
      if (!(base.min_value > 0.0)) {
        throw ConfigError("variable exponent base must be positive on the box");
      }
      const double n = p / base.min_value;
      return PhiFamily::variable_power(std::move(base), n);
    }
    case FamilySpecKind::Piecewise: {
      const double inside = spec.exponent ? constant_value(*spec.exponent) : p;
      const Subdomain sub = domain.subdomain.value();
      return PhiFamily::piecewise(PhiFamily::constant_power(inside),
                                  PhiFamily::constant_power(spec.outside_p),
                                  [sub](const Point& x) { return sub.contains(x); }, sub.describe());
    }
  }
  throw ConfigError("unknown family kind");
}

double aronsson(const Point& x) {
  auto spow = [](double v) { return std::copysign(std::pow(std::fabs(v), 4.0 / 3.0), v); };
  return spow(x[0]) - spow(x[1]);
}

std::function<double(const Point&)> boundary_function(const BoundarySpec& spec) {
  switch (spec.preset) {
    case BoundaryPreset::Affine:
    case BoundaryPreset::Scaled: {
      const double t = spec.factor;
      return [t](const Point& x) { return t * x[0]; };
    }
    case BoundaryPreset::Aronsson:
      return [](const Point& x) { return aronsson(x); };
    case BoundaryPreset::Cone: {
      const Point a = spec.apex;
      return [a](const Point& x) { return std::hypot(x[0] - a[0], x[1] - a[1]); };
    }
    case BoundaryPreset::Zero:
      return [](const Point&) { return 0.0; };
  }
  return [](const Point&) { return 0.0; };
}

ScalarField make_boundary(const BoundarySpec& spec, const GridDomain& domain) {
  return ScalarField::sample(domain, boundary_function(spec), FieldRole::BoundaryData);
}

}  // namespace philab

#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "philab/grid.hpp"
#include "philab/phi_family.hpp"

namespace philab {

enum class ExperimentId {
  GammaEnergy,
  LimitConvergence,
  EpsSandwich,
  SubdomainExtremal,
  InequalityFuzz,
  PoincareJump,
  StructureAudit,
};

const char* to_string(ExperimentId id);
std::optional<ExperimentId> parse_experiment_id(std::string_view text);

struct DomainSpec {
  int dim = 2;
  int nodes = 33;
  double lower = 0.0;
  double upper = 1.0;
  std::optional<Subdomain> subdomain;
};

enum class FamilySpecKind { Constant, Variable, Piecewise };

// The sweep value P selects the family member:
//   constant   p = P
//   variable   p(x) = n base(x) with n = P / min base, so p- = P
//   piecewise  p = inside exponent (P when unset) on the subdomain, outside_p elsewhere
struct FamilySpec {
  FamilySpecKind kind = FamilySpecKind::Constant;
  std::optional<std::string> exponent;
  double outside_p = 4.0;
};

enum class BoundaryPreset { Affine, Aronsson, Cone, Scaled, Zero };

struct BoundarySpec {
  BoundaryPreset preset = BoundaryPreset::Zero;
  // Slope of affine, factor t of scaled(t).
  double factor = 1.0;
  Point apex{0.0, 0.0};
  std::string label = "zero";
};

struct FuzzSpec {
  std::vector<int> dims{2, 3};
  std::vector<double> exponents{2.0, 4.0, 8.0};
  long samples = 100000;
  double gamma = 1.0;
};

struct PoincareSpec {
  std::vector<double> h_list{1.0 / 32.0, 1.0 / 64.0};
  int trials = 1000;
  double delta = 0.25;
};

struct ExperimentConfig {
  ExperimentId id = ExperimentId::GammaEnergy;
  std::uint64_t seed = 1;
  std::filesystem::path out_dir;
  DomainSpec domain;
  FamilySpec family;
  BoundarySpec boundary;
  std::vector<double> p_sweep{4.0, 8.0, 16.0, 32.0, 64.0};
  std::vector<double> eps_list{0.1, 0.05, 0.025};
  FuzzSpec fuzz;
  PoincareSpec poincare;
};

struct ConfigOverrides {
  std::optional<std::vector<double>> p_sweep;
  std::optional<double> h;
  std::optional<std::uint64_t> seed;
  std::optional<std::filesystem::path> out_dir;
};

// Line-oriented "key = value" under [section] headers; '#' starts a comment.
// Unknown sections or keys, duplicates and malformed values throw ConfigError
// carrying the line number.
ExperimentConfig parse_config(std::string_view text);
ExperimentConfig load_config(const std::filesystem::path& path);

// Throws ConfigError when an override is invalid (for example h not dividing the box).
void apply_overrides(ExperimentConfig& config, const ConfigOverrides& overrides);

// Checks cross-key requirements (subdomain presence, ascending sweep, ...).
void validate_config(const ExperimentConfig& config);

// Comma separated list of reals; each entry may be a constant expression such as 1/64.
std::vector<double> parse_real_list(std::string_view text);

int nodes_for_spacing(double extent, double h);

GridDomain make_domain(const DomainSpec& spec);
GridDomain make_domain(const DomainSpec& spec, int nodes);
PhiFamily make_family(const FamilySpec& spec, const DomainSpec& domain, double p);
std::function<double(const Point&)> boundary_function(const BoundarySpec& spec);
ScalarField make_boundary(const BoundarySpec& spec, const GridDomain& domain);

// Aronsson data x1^(4/3) - x2^(4/3) with the sign-preserving power. It agrees
// with the infinity-harmonic |x1|^(4/3) - |x2|^(4/3) only where x1 x2 > 0.
double aronsson(const Point& x);

}  // namespace philab

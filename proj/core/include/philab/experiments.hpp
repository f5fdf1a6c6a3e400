#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "philab/config.hpp"
#include "philab/csv.hpp"

namespace philab {

// Pinned acceptance tolerances.
inline constexpr double kEnergySlack = 1.1;            // E_p <= 1.1 |Omega| / p-
inline constexpr double kBlowupRatio = 10.0;           // E(last) / E(first) for Lip(g) > 1
inline constexpr double kLimitBoundZeroDrift = 0.05;   // final sup |u_p - u_limit|, Lambda = 0
inline constexpr double kLimitBoundDrift = 0.08;       // same with a drifted limit
inline constexpr double kInversionTolerance = 0.05;    // one relative inversion allowed
inline constexpr double kSubdomainGradientBound = 1.1; // max |grad u| on the subdomain
inline constexpr double kPoincareVariation = 0.2;      // relative spread of sup ratios over h
inline constexpr double kConjugateBoundSlack = 1e-6;
inline constexpr double kConjugateBruteTolerance = 1e-7;
inline constexpr double kLuxemburgTolerance = 1e-8;
inline constexpr double kResidualTolerance = 1e-6;
inline constexpr double kGapRatioMin = 1.0;
inline constexpr double kGapRatioMax = 4.0;

// One line of verdict.txt: "PASS|FAIL <id> <measured> <bound>".
struct Verdict {
  std::string id;
  bool pass = false;
  double measured = 0.0;
  double bound = 0.0;
  // Free text for console reports; not written to verdict.txt.
  std::string detail;
};

std::string format_verdict(const Verdict& v);

struct ExperimentResult {
  ExperimentId id = ExperimentId::GammaEnergy;
  std::vector<CsvTable> tables;
  std::vector<Verdict> verdicts;

  bool all_pass() const;
};

// Writes every table plus verdict.txt into dir.
void write_result(const ExperimentResult& result, const std::filesystem::path& dir);

ExperimentResult run_experiment(const ExperimentConfig& config);

ExperimentResult run_gamma_energy(const ExperimentConfig& config);
ExperimentResult run_limit_convergence(const ExperimentConfig& config);
ExperimentResult run_eps_sandwich(const ExperimentConfig& config);
ExperimentResult run_subdomain_extremal(const ExperimentConfig& config);
ExperimentResult run_inequality_fuzz(const ExperimentConfig& config);
ExperimentResult run_poincare_jump(const ExperimentConfig& config);
// Bundles the four family-level audits below.
ExperimentResult run_structure_audit(const ExperimentConfig& config);

// Families built by the lab (constant, variable and piecewise powers) followed
// by the custom sum-of-powers example when include_custom is set.
std::vector<PhiFamily> audit_families(bool include_custom);

struct AuditPart {
  CsvTable table;
  Verdict verdict;
};

// Criterion 1: structure checks on every audit family.
AuditPart audit_structure();
// Criterion 2: conjugate exponent bounds and brute-force conjugate values.
AuditPart audit_conjugate();
// Criterion 3: Luxemburg closed form and modular sandwich on random fields.
AuditPart audit_luxemburg(std::uint64_t seed, int fields = 1000);
// Criterion 5: Euler residual against central differences of the energy.
AuditPart audit_residual(std::uint64_t seed, int nodes = 20);

// Brute-force sup over a nested grid of t s - Phi(x, s); Phi convex makes the
// objective concave, so zooming on the best grid cell is exact.
double brute_force_conjugate(const PhiFamily& family, const Point& x, double t);

struct TrendReport {
  bool pass = true;
  int inversions = 0;
  double worst_inversion = 0.0;  // largest relative increase
};

// Decreasing sequence allowing up to allowed inversions of relative size
// <= tolerance. Increases below abs_floor are ignored.
TrendReport decreasing_trend(const std::vector<double>& v, int allowed, double tolerance,
                             double abs_floor);

bool strictly_increasing(const std::vector<double>& v);
bool strictly_decreasing(const std::vector<double>& v);

}  // namespace philab

#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "philab/config.hpp"
#include "philab/experiments.hpp"

namespace philab {

// A named run of the acceptance suite; text is the config it parses.
struct AcceptanceRun {
  std::string name;
  std::string text;
};

// The configs behind criteria 4 and 6-12, identical to the files under configs/.
const std::vector<AcceptanceRun>& acceptance_runs();

struct CriterionResult {
  int id = 0;
  Verdict verdict;
  double seconds = 0.0;
  // 0 when the criterion has no runtime budget.
  double budget_seconds = 0.0;

  bool pass() const { return verdict.pass && (budget_seconds == 0.0 || seconds <= budget_seconds); }
};

std::string format_criterion(const CriterionResult& r);

// Merges verdicts for the same criterion: all must pass; the reported numbers
// come from the worst one relative to its bound.
Verdict merge_verdicts(const std::vector<Verdict>& verdicts);

struct AcceptanceOptions {
  std::filesystem::path out_dir = "philab_verify";
  std::uint64_t seed = 1;
  // Repeat every run into out_dir/rerun and compare CSV bytes (criterion 13).
  bool determinism_rerun = true;
  // Called as soon as a criterion is decided.
  std::function<void(const CriterionResult&)> on_result;
};

// Criteria 1-13 in order. Writes each run's CSVs under out_dir/<run name> and
// the criterion lines to out_dir/verdict.txt.
std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& options);

// Relative paths of CSV files under a and b whose bytes differ or exist on one side only.
std::vector<std::string> differing_csv_files(const std::filesystem::path& a,
                                             const std::filesystem::path& b);

}  // namespace philab

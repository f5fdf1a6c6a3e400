#include "philab/acceptance.hpp"

#include <fmt/format.h>
#include <fmt/ranges.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iterator>
#include <map>
#include <set>

#include "philab/errors.hpp"

namespace philab {

namespace {

const char* const kStructureAudit = R"([experiment]
id = structure_audit
seed = 1
)";

const char* const kInequalityFuzz = R"([experiment]
id = inequality_fuzz
seed = 1

[fuzz]
dims = 2, 3
exponents = 2, 4, 8
samples = 100000
gamma = 1
)";

const char* const kGammaEnergy = R"([experiment]
id = gamma_energy
seed = 1

[domain]
dim = 2
nodes = 65

[family]
kind = constant

[boundary]
preset = affine
slope = 1

[sweep]
p = 4, 8, 16, 32, 64
)";

const char* const kGammaBlowup = R"([experiment]
id = gamma_energy
seed = 1

[domain]
dim = 2
nodes = 65

[family]
kind = constant

[boundary]
preset = scaled(2)

[sweep]
p = 4, 8, 16, 32, 64
)";

const char* const kLimitAronsson = R"([experiment]
id = limit_convergence
seed = 1

[domain]
dim = 2
nodes = 33
lower = -1
upper = 1

[family]
kind = constant

[boundary]
preset = aronsson

[sweep]
p = 4, 8, 16, 32, 64
)";

// The box starts at x1 = 1 so that the limit drift grad p / p stays smooth.
const char* const kLimitVariable = R"([experiment]
id = limit_convergence
seed = 1

[domain]
dim = 2
nodes = 33
lower = 1
upper = 2

[family]
kind = variable
p = 2 + x1

[boundary]
preset = aronsson

[sweep]
p = 4, 8, 16, 32, 64
)";

const char* const kEpsSandwich = R"([experiment]
id = eps_sandwich
seed = 1

[domain]
dim = 2
nodes = 65

[family]
kind = constant

[boundary]
preset = zero

[sweep]
p = 4, 8, 16, 32, 64
eps = 0.1, 0.05, 0.025
)";

const char* const kSubdomainExtremal = R"([experiment]
id = subdomain_extremal
seed = 1

[domain]
dim = 2
nodes = 65
subdomain = disc(0.5, 0.5, 0.3)

[family]
kind = piecewise
outside_p = 4

[boundary]
preset = scaled(2)

[sweep]
p = 8, 16, 32, 64
)";

const char* const kPoincareJump = R"([experiment]
id = poincare_jump
seed = 1

[domain]
dim = 2
subdomain = rect(0.25, 0.25, 0.75, 0.75)

[family]
kind = piecewise
p = 3
outside_p = 2.5

[poincare]
h = 1/32, 1/64
trials = 1000
delta = 0.25
)";

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

// Worst verdict relative to its bound; a zero bound counts any positive measurement as infinite.
double severity(const Verdict& v) {
  if (v.bound == 0.0) return v.measured > 0.0 ? HUGE_VAL : 0.0;
  return v.measured / v.bound;
}

std::string read_bytes(const std::filesystem::path& p) {
  std::ifstream f(p, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>());
}

std::set<std::string> csv_files(const std::filesystem::path& root) {
  std::set<std::string> out;
  if (!std::filesystem::exists(root)) return out;
  for (const auto& e : std::filesystem::recursive_directory_iterator(root)) {
    if (e.is_regular_file() && e.path().extension() == ".csv") {
      out.insert(std::filesystem::relative(e.path(), root).generic_string());
    }
  }
  return out;
}

struct Budget {
  int id;
  double seconds;
};

constexpr Budget kBudgets[] = {{1, 5},   {2, 10},  {3, 30},  {4, 60},  {5, 30},   {6, 300}, {7, 300},
                               {8, 600}, {9, 600}, {10, 600}, {11, 600}, {12, 300}, {13, 0}};

double budget_for(int id) {
  for (const Budget& b : kBudgets) {
    if (b.id == id) return b.seconds;
  }
  return 0.0;
}

}  // namespace

const std::vector<AcceptanceRun>& acceptance_runs() {
  static const std::vector<AcceptanceRun> runs{
      {"structure_audit", kStructureAudit},   {"inequality_fuzz", kInequalityFuzz},
      {"gamma_energy", kGammaEnergy},         {"gamma_blowup", kGammaBlowup},
      {"limit_aronsson", kLimitAronsson},     {"limit_variable", kLimitVariable},
      {"eps_sandwich", kEpsSandwich},         {"subdomain_extremal", kSubdomainExtremal},
      {"poincare_jump", kPoincareJump},
  };
  return runs;
}

std::string format_criterion(const CriterionResult& r) {
  Verdict v = r.verdict;
  v.pass = r.pass();
  std::string line = format_verdict(v);
  if (r.budget_seconds > 0.0) {
    line += fmt::format("  [{:.1f} s, budget {:.0f} s]", r.seconds, r.budget_seconds);
  } else {
    line += fmt::format("  [{:.1f} s]", r.seconds);
  }
  if (!r.verdict.pass || !v.detail.empty()) line += "  " + v.detail;
  if (r.verdict.pass && !v.pass) line += " (over budget)";
  return line;
}

Verdict merge_verdicts(const std::vector<Verdict>& verdicts) {
  if (verdicts.empty()) throw DomainError("no verdicts to merge");
  const Verdict* pick = nullptr;
  for (const Verdict& v : verdicts) {
    const bool worse_class = pick && pick->pass && !v.pass;
    const bool same_class = pick && pick->pass == v.pass;
    if (!pick || worse_class || (same_class && severity(v) > severity(*pick))) pick = &v;
  }
  Verdict out = *pick;
  out.pass = std::all_of(verdicts.begin(), verdicts.end(), [](const Verdict& v) { return v.pass; });
  std::string detail;
  for (const Verdict& v : verdicts) {
    if (!detail.empty()) detail += "; ";
    detail += fmt::format("{} {:.6g}/{:.6g}", v.pass ? "pass" : "FAIL", v.measured, v.bound);
  }
  out.detail = detail;
  return out;
}

std::vector<std::string> differing_csv_files(const std::filesystem::path& a,
                                             const std::filesystem::path& b) {
  const auto fa = csv_files(a);
  const auto fb = csv_files(b);
  std::set<std::string> all = fa;
  all.insert(fb.begin(), fb.end());
  std::vector<std::string> out;
  for (const std::string& rel : all) {
    if (!fa.count(rel) || !fb.count(rel) || read_bytes(a / rel) != read_bytes(b / rel)) {
      out.push_back(rel);
    }
  }
  return out;
}

std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& options) {
  std::map<int, std::vector<Verdict>> verdicts;
  std::map<int, double> seconds;
  std::vector<CriterionResult> results;

  auto config_for = [&](const AcceptanceRun& run, const std::filesystem::path& root) {
    ExperimentConfig c = parse_config(run.text);
    ConfigOverrides o;
    o.seed = options.seed;
    o.out_dir = root / run.name;
    apply_overrides(c, o);
    return c;
  };

  // One pass over every run; returns nothing, records verdicts and times when record is set.
  auto pass = [&](const std::filesystem::path& root, bool record) {
    for (const AcceptanceRun& run : acceptance_runs()) {
      const ExperimentConfig config = config_for(run, root);
      ExperimentResult result;
      result.id = config.id;
      if (config.id == ExperimentId::StructureAudit) {
        // Timed part by part, since each criterion has its own budget.
        const std::pair<int, std::function<AuditPart()>> parts[] = {
            {1, [] { return audit_structure(); }},
            {2, [] { return audit_conjugate(); }},
            {3, [&] { return audit_luxemburg(config.seed); }},
            {5, [&] { return audit_residual(config.seed); }},
        };
        for (const auto& [id, fn] : parts) {
          const auto t0 = Clock::now();
          AuditPart part = fn();
          if (record) seconds[id] += seconds_since(t0);
          result.tables.push_back(std::move(part.table));
          result.verdicts.push_back(std::move(part.verdict));
        }
      } else {
        const auto t0 = Clock::now();
        result = run_experiment(config);
        const double dt = seconds_since(t0);
        if (record) {
          std::set<int> ids;
          for (const Verdict& v : result.verdicts) ids.insert(std::stoi(v.id));
          for (int id : ids) seconds[id] += dt;
        }
      }
      write_result(result, config.out_dir);
      if (record) {
        for (const Verdict& v : result.verdicts) verdicts[std::stoi(v.id)].push_back(v);
      }
    }
  };

  pass(options.out_dir, true);
  for (int id = 1; id <= 12; ++id) {
    CriterionResult r;
    r.id = id;
    const auto it = verdicts.find(id);
    r.verdict = it == verdicts.end()
                    ? Verdict{std::to_string(id), false, HUGE_VAL, 0.0, "no run exercised this criterion"}
                    : merge_verdicts(it->second);
    r.seconds = seconds[id];
    r.budget_seconds = budget_for(id);
    results.push_back(r);
    if (options.on_result) options.on_result(r);
  }

  if (options.determinism_rerun) {
    const auto t0 = Clock::now();
    const auto rerun = options.out_dir / "rerun";
    pass(rerun, false);
    std::vector<std::string> diffs;
    std::size_t compared = 0;
    for (const AcceptanceRun& run : acceptance_runs()) {
      compared += csv_files(options.out_dir / run.name).size();
      for (const std::string& d : differing_csv_files(options.out_dir / run.name, rerun / run.name)) {
        diffs.push_back(run.name + "/" + d);
      }
    }
    CriterionResult r;
    r.id = 13;
    r.verdict = {"13", diffs.empty() && compared > 0, static_cast<double>(diffs.size()), 0.0,
                 diffs.empty() ? fmt::format("{} CSV files byte-identical", compared)
                               : "differing: " + fmt::format("{}", fmt::join(diffs, ", "))};
    r.seconds = seconds_since(t0);
    results.push_back(r);
    if (options.on_result) options.on_result(r);
  }

  std::ofstream f(options.out_dir / "verdict.txt", std::ios::binary | std::ios::trunc);
  for (const CriterionResult& r : results) {
    Verdict v = r.verdict;
    v.pass = r.pass();
    f << format_verdict(v) << '\n';
  }
  return results;
}

}  // namespace philab

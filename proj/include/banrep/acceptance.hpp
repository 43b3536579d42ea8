#pragma once

// Acceptance criteria as runnable checks. Each criterion reports its metrics
// against pinned limits and a runtime budget.

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace banrep::acceptance {

inline constexpr int kCriterionCount = 9;
inline constexpr std::uint64_t kDefaultSeed = 20240611;

enum class Bound { at_most, at_least };

struct Metric {
    std::string name;
    double value = 0.0;
    double limit = 0.0;
    Bound bound = Bound::at_most;

    bool ok() const { return bound == Bound::at_most ? value <= limit : value >= limit; }
};

struct CriterionResult {
    int id = 0;
    std::string title;
    std::vector<Metric> metrics;
    std::vector<std::string> failures;
    double runtime = 0.0;
    double runtime_limit = 0.0;

    /// All metric checks hold (runtime excluded).
    bool checks_passed() const;
    bool within_budget() const { return runtime < runtime_limit; }
    bool passed() const { return checks_passed() && within_budget(); }
};

/// Runs a CLI invocation (argv[0] included) and returns its exit code.
using CommandRunner = std::function<int(const std::vector<std::string>&)>;

struct Options {
    std::uint64_t seed = kDefaultSeed;
    /// Used by the determinism criterion; without it the criterion compares
    /// in-process documents only.
    CommandRunner cli;
    /// Scratch directory for determinism runs; empty = system temp.
    std::string scratch;
};

std::string criterion_title(int id);

/// Throws std::out_of_range for ids outside 1..kCriterionCount.
CriterionResult run_criterion(int id, const Options& options = {});

std::vector<CriterionResult> run_all(const Options& options = {});

/// "PASS  3  hilbert closed forms vs oracle  (1.23 s / 30 s)"
std::string summary_line(const CriterionResult& result);

/// JSON document with metrics and verdict, without timing, so that repeated
/// runs produce identical bytes.
std::string criterion_document(const CriterionResult& result);

}  // namespace banrep::acceptance

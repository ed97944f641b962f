#pragma once

#include "lhiem/person.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace lhiem {

// One failed record- or population-level rule.
struct Violation {
    std::string pid; // empty for population-level rules
    std::string rule;
};

// Checks every PersonRecord and Population invariant. Violations are data,
// not failures: callers decide what to do with them.
std::vector<Violation> validate_population(const Population& pop);

// Cross-dataset variable harmonization (race, insurance, health status).
// Rules are data: (dataset, variable, raw) -> harmonized, with an optional
// "*" raw value acting as a per-(dataset, variable) fallback.
class HarmonizationRules {
  public:
    static HarmonizationRules from_file(const std::string& path);

    void add(const std::string& dataset, const std::string& variable, const std::string& raw,
             const std::string& harmonized);

    // Throws DataError (UnknownRawValue) when the triple is unmapped.
    const std::string& harmonize(const std::string& dataset, const std::string& variable,
                                 const std::string& raw) const;

    std::size_t size() const { return exact_.size() + fallback_.size(); }

  private:
    std::map<std::string, std::string> exact_;    // "dataset\0variable\0raw"
    std::map<std::string, std::string> fallback_; // "dataset\0variable"
};

// Left-continuous inverse of the weighted empirical CDF over (value, tie_key)
// pairs: smallest value whose cumulative weight share reaches q. Entries need
// not be sorted.
struct WeightedEntry {
    double value = 0.0;
    double weight = 0.0;
    std::size_t tie_key = 0; // deterministic tie-break, usually the pid rank
};

double weighted_quantile(std::vector<WeightedEntry> entries, double q);

// Weighted mean spending overall and within the Table-2 percentile buckets.
struct SpendingSummary {
    double overall = 0.0;
    double bottom50 = 0.0;
    double top50 = 0.0;
    double top30 = 0.0;
    double top10 = 0.0;
    double top5 = 0.0;
    double top1 = 0.0;
};

// Buckets are defined by weighted quantile thresholds of med_spend over
// living persons; a record straddling a threshold contributes fractional
// weight to both sides so bucket masses are exact. Throws DataError on an
// empty (zero-weight) population.
SpendingSummary weighted_spending_summary(const Population& pop);

// Population snapshot: delimiter-separated text, one row per person, exact
// PersonRecord field names, currency in nominal dollars.
void save_population(const Population& pop, const std::string& path);
Population load_population_file(const std::string& path);

} // namespace lhiem

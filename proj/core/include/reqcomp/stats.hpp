// Small statistics helpers for multi-run aggregation.
#pragma once

#include <cstddef>
#include <optional>
#include <vector>

namespace reqcomp::metrics {

double mean(const std::vector<double>& values);

// Sample standard deviation (n-1 denominator). Needs >= 2 values.
double sample_stddev(const std::vector<double>& values);

// Student-t quantile, e.g. t_quantile(0.975, 9) for a two-sided 95% CI.
double t_quantile(double probability, double degrees_of_freedom);

struct RunAggregate {
    double mean = 0.0;
    std::size_t runs = 0;
    // 95% CI over run means; absent for a single run.
    std::optional<double> ci_lo;
    std::optional<double> ci_hi;

    bool operator==(const RunAggregate&) const = default;
};

RunAggregate aggregate_runs(const std::vector<double>& run_values);

}  // namespace reqcomp::metrics

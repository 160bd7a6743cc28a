#include "reqcomp/stats.hpp"

#include <cmath>

#include <boost/math/distributions/students_t.hpp>

#include "reqcomp/errors.hpp"

namespace reqcomp::metrics {

double mean(const std::vector<double>& values) {
    if (values.empty()) throw ValidationError("mean of an empty sample");
    double sum = 0.0;
    for (double v : values) sum += v;
    return sum / static_cast<double>(values.size());
}

double sample_stddev(const std::vector<double>& values) {
    if (values.size() < 2) throw ValidationError("sample stddev needs at least 2 values");
    double m = mean(values);
    double sq = 0.0;
    for (double v : values) sq += (v - m) * (v - m);
    return std::sqrt(sq / static_cast<double>(values.size() - 1));
}

double t_quantile(double probability, double degrees_of_freedom) {
    if (probability <= 0.0 || probability >= 1.0) {
        throw ValidationError("t quantile probability must be in (0, 1)");
    }
    if (degrees_of_freedom < 1.0) throw ValidationError("t quantile needs df >= 1");
    boost::math::students_t dist(degrees_of_freedom);
    return boost::math::quantile(dist, probability);
}

RunAggregate aggregate_runs(const std::vector<double>& run_values) {
    if (run_values.empty()) throw ValidationError("aggregate_runs needs at least 1 run");
    RunAggregate out;
    out.mean = mean(run_values);
    out.runs = run_values.size();
    if (out.runs >= 2) {
        double sd = sample_stddev(run_values);
        double half = t_quantile(0.975, static_cast<double>(out.runs - 1)) * sd /
                      std::sqrt(static_cast<double>(out.runs));
        out.ci_lo = out.mean - half;
        out.ci_hi = out.mean + half;
    }
    return out;
}

}  // namespace reqcomp::metrics

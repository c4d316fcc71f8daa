#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "xda/dataset.hpp"

namespace xda {

enum class CiStatistic { GSquared, ChiSquared };

struct CiResult {
    double statistic = 0.0;
    double p_value = 1.0;
    bool independent = true;
    long dof = 0;
    bool insufficient_data = false;
};

struct CiOptions {
    double alpha = 0.05;
    CiStatistic statistic = CiStatistic::GSquared;
    /// Minimum average count per observed cell before the test is trusted.
    double min_avg_cell = 5.0;
};

/// Conditional independence test of x and y given z on categorical columns.
CiResult ci_test(const Column& x, const Column& y, std::span<const Column* const> z,
                 const CiOptions& options = {});
CiResult ci_test(const Dataset& d, const std::string& x, const std::string& y,
                 const std::vector<std::string>& z, const CiOptions& options = {});
CiResult ci_test(const Dataset& d, const std::string& x, const std::string& y,
                 const std::vector<std::string>& z, double alpha);

/// Number of ci_test invocations since process start (or the last reset).
std::uint64_t ci_test_count();
void reset_ci_test_count();

}  // namespace xda

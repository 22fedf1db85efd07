#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "bicgsafe/solver_types.hpp"

namespace bicgsafe {

/// Shortest decimal text that parses back to exactly `v`.
std::string format_real(double v);

/// Header `iter,rel_res_recur,rel_res_true,replaced`, then one row per record.
/// rel_res_true is left empty where it was not computed.
void write_history_csv(std::ostream& out, const std::vector<IterationRecord<double>>& history);

struct ComparisonRow {
    int iter = 0;
    std::optional<double> rel_res_a;
    std::optional<double> rel_res_b;
    /// |log10(a / b)|; absent unless both residuals are positive.
    std::optional<double> log10_ratio;
};

/// Joins two histories on the iteration index, over the longer of the two.
std::vector<ComparisonRow> join_histories(const std::vector<IterationRecord<double>>& a,
                                          const std::vector<IterationRecord<double>>& b);

/// Header `iter,rel_res_a,rel_res_b,abs_log10_ratio`.
void write_comparison_csv(std::ostream& out, const std::vector<ComparisonRow>& rows);

}  // namespace bicgsafe

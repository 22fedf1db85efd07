#include "bicgsafe/history_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <ostream>

namespace bicgsafe {

std::string format_real(double v)
{
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

namespace {

std::string optional_field(const std::optional<double>& v)
{
    return v ? format_real(*v) : std::string();
}

}  // namespace

void write_history_csv(std::ostream& out, const std::vector<IterationRecord<double>>& history)
{
    out << "iter,rel_res_recur,rel_res_true,replaced\n";
    for (const auto& rec : history) {
        out << rec.iter << ',' << format_real(rec.rel_res_recur) << ','
            << optional_field(rec.rel_res_true) << ',' << (rec.replaced ? 1 : 0) << '\n';
    }
}

std::vector<ComparisonRow> join_histories(const std::vector<IterationRecord<double>>& a,
                                          const std::vector<IterationRecord<double>>& b)
{
    std::vector<ComparisonRow> rows(std::max(a.size(), b.size()));
    for (std::size_t k = 0; k < rows.size(); ++k) {
        auto& row = rows[k];
        row.iter = static_cast<int>(k);
        if (k < a.size()) row.rel_res_a = a[k].rel_res_recur;
        if (k < b.size()) row.rel_res_b = b[k].rel_res_recur;
        if (row.rel_res_a && row.rel_res_b && *row.rel_res_a > 0.0 && *row.rel_res_b > 0.0)
            row.log10_ratio = std::abs(std::log10(*row.rel_res_a / *row.rel_res_b));
    }
    return rows;
}

void write_comparison_csv(std::ostream& out, const std::vector<ComparisonRow>& rows)
{
    out << "iter,rel_res_a,rel_res_b,abs_log10_ratio\n";
    for (const auto& row : rows) {
        out << row.iter << ',' << optional_field(row.rel_res_a) << ','
            << optional_field(row.rel_res_b) << ',' << optional_field(row.log10_ratio) << '\n';
    }
}

}  // namespace bicgsafe

#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "bicgsafe/history_io.hpp"
#include "support.hpp"

using namespace bicgsafe;

TEST(HistoryIo, FormatRealRoundTrips)
{
    bicgsafe::testing::Gen gen(8);
    for (int k = 0; k < 2000; ++k) {
        const double v = gen.uniform() * std::pow(10.0, static_cast<double>(gen.index(-300, 300)));
        EXPECT_EQ(std::stod(format_real(v)), v);
    }
    EXPECT_EQ(format_real(1.0), "1");
    EXPECT_EQ(format_real(0.5), "0.5");
}

TEST(HistoryIo, WritesHistoryCsv)
{
    std::vector<IterationRecord<double>> h(3);
    h[0].iter = 0;
    h[0].rel_res_recur = 1.0;
    h[0].rel_res_true = 1.0;
    h[1].iter = 1;
    h[1].rel_res_recur = 0.25;
    h[2].iter = 2;
    h[2].rel_res_recur = 0.125;
    h[2].rel_res_true = 0.125;
    h[2].replaced = true;
    std::ostringstream out;
    write_history_csv(out, h);
    EXPECT_EQ(out.str(),
              "iter,rel_res_recur,rel_res_true,replaced\n"
              "0,1,1,0\n"
              "1,0.25,,0\n"
              "2,0.125,0.125,1\n");
}

TEST(HistoryIo, JoinsUnequalHistories)
{
    std::vector<IterationRecord<double>> a(3), b(2);
    for (int i = 0; i < 3; ++i) {
        a[static_cast<std::size_t>(i)].iter = i;
        a[static_cast<std::size_t>(i)].rel_res_recur = std::pow(10.0, -i);
    }
    for (int i = 0; i < 2; ++i) {
        b[static_cast<std::size_t>(i)].iter = i;
        b[static_cast<std::size_t>(i)].rel_res_recur = std::pow(10.0, -2 * i);
    }
    const auto rows = join_histories(a, b);
    ASSERT_EQ(rows.size(), 3u);
    EXPECT_DOUBLE_EQ(*rows[0].log10_ratio, 0.0);
    EXPECT_NEAR(*rows[1].log10_ratio, 1.0, 1e-12);
    EXPECT_FALSE(rows[2].rel_res_b);
    EXPECT_FALSE(rows[2].log10_ratio);

    std::ostringstream out;
    write_comparison_csv(out, rows);
    std::istringstream in(out.str());
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line, "iter,rel_res_a,rel_res_b,abs_log10_ratio");
    int count = 0;
    while (std::getline(in, line)) ++count;
    EXPECT_EQ(count, 3);
}

#include <gtest/gtest.h>

#include <cstring>

#include "bicgsafe/matrix_market.hpp"
#include "bicgsafe/poisson.hpp"
#include "bicgsafe/solvers.hpp"
#include "support.hpp"

using namespace bicgsafe;
using bicgsafe::testing::Gen;

namespace {

constexpr Method kAllMethods[] = {Method::BiCGStab, Method::GPBiCG, Method::SsBiCGSafe2,
                                  Method::PBiCGSafe, Method::PBiCGSafeRR};
constexpr Method kSafeFamily[] = {Method::GPBiCG, Method::SsBiCGSafe2, Method::PBiCGSafe,
                                  Method::PBiCGSafeRR};

SolveOutcome<double> run(Method m, const CsrMatrix<double>& A, const SolverConfig& cfg = {},
                         EngineOptions opts = {}, RrSchedule rr = {})
{
    const Vector<double> b = spmv(A, Vector<double>::Ones(A.cols()).eval());
    ReductionEngine engine(opts);
    return solve(m, A, b, Vector<double>::Zero(A.rows()).eval(), cfg, engine, rr);
}

double true_rel(const CsrMatrix<double>& A, const Vector<double>& b, const Vector<double>& x)
{
    return (b - spmv(A, x)).norm() / b.norm();
}

std::vector<double> residuals(const SolveOutcome<double>& out)
{
    std::vector<double> v;
    for (const auto& rec : out.history) v.push_back(rec.rel_res_recur);
    return v;
}

std::string name(Method m) { return std::string(to_string(m)); }

}  // namespace

TEST(Solvers, IdentityConvergesInOneIteration)
{
    Gen gen(1);
    const auto I = CsrMatrix<double>::identity(12);
    const auto b = gen.vector(12);
    for (auto m : kAllMethods) {
        ReductionEngine engine;
        const auto out = solve(m, I, b, Vector<double>::Zero(12).eval(), SolverConfig{}, engine);
        ASSERT_EQ(out.status, SolveStatus::Converged) << name(m) << ": " << out.detail;
        EXPECT_EQ(out.iterations, 1) << name(m);
        EXPECT_LE((out.x - b).norm(), 1e-15 * b.norm()) << name(m);
        ASSERT_TRUE(out.history.front().coefficients) << name(m);
        EXPECT_DOUBLE_EQ(out.history.front().coefficients->alpha, 1.0) << name(m);
        if (m != Method::BiCGStab && m != Method::GPBiCG) {
            EXPECT_DOUBLE_EQ(out.history.front().coefficients->zeta, 1.0) << name(m);
        }
    }
}

TEST(Solvers, ZeroRightHandSideConvergesImmediately)
{
    const auto A = gen_poisson<double>(2, 5);
    const Vector<double> b = Vector<double>::Zero(A.rows()).eval();
    for (auto m : kAllMethods) {
        ReductionEngine engine;
        const auto out = solve(m, A, b, Vector<double>::Zero(A.rows()).eval(), SolverConfig{}, engine);
        EXPECT_EQ(out.status, SolveStatus::Converged) << name(m);
        EXPECT_EQ(out.iterations, 0) << name(m);
    }
}

TEST(Solvers, ConvergedPoissonHasSmallTrueResidual)
{
    SolverConfig cfg;
    cfg.monitor_every = 0;
    for (int dim = 1; dim <= 3; ++dim) {
        const auto A = gen_poisson<double>(dim, dim == 1 ? 60 : (dim == 2 ? 30 : 12));
        const Vector<double> b = spmv(A, Vector<double>::Ones(A.cols()).eval());
        for (auto m : kAllMethods) {
            const auto out = run(m, A, cfg);
            ASSERT_EQ(out.status, SolveStatus::Converged) << name(m) << " " << dim << "d";
            EXPECT_LE(out.final_rel_res_recur, cfg.epsilon) << name(m);
            EXPECT_LE(true_rel(A, b, out.x), 10 * cfg.epsilon) << name(m) << " " << dim << "d";
            EXPECT_LE(out.final_rel_res_true, 10 * cfg.epsilon) << name(m);
        }
    }
}

TEST(Solvers, SmallPoissonUnderFiftyIterations)
{
    const auto A = gen_poisson<double>(2, 4);
    for (auto m : kAllMethods) {
        const auto out = run(m, A);
        EXPECT_EQ(out.status, SolveStatus::Converged) << name(m);
        EXPECT_LT(out.iterations, 50) << name(m);
    }
}

TEST(Solvers, NonsymmetricDominantSystems)
{
    Gen gen(44);
    for (int trial = 0; trial < 10; ++trial) {
        const auto A = gen.dominant(gen.index(20, 300), 5);
        const Vector<double> b = spmv(A, Vector<double>::Ones(A.cols()).eval());
        for (auto m : kAllMethods) {
            const auto out = run(m, A);
            ASSERT_EQ(out.status, SolveStatus::Converged) << name(m) << " trial " << trial;
            ASSERT_LE(true_rel(A, b, out.x), 1e-7) << name(m) << " trial " << trial;
        }
    }
}

TEST(Solvers, HistoryHasOneRowPerIterationPlusInitial)
{
    const auto A = gen_poisson<double>(2, 12);
    for (auto m : kAllMethods) {
        const auto out = run(m, A);
        ASSERT_EQ(out.history.size(), static_cast<std::size_t>(out.iterations) + 1) << name(m);
        for (std::size_t k = 0; k < out.history.size(); ++k) EXPECT_EQ(out.history[k].iter, static_cast<int>(k));
        EXPECT_DOUBLE_EQ(out.history.front().rel_res_recur, 1.0) << name(m);
        EXPECT_FALSE(out.history.back().coefficients) << name(m);
    }
}

TEST(Solvers, MaxItersReportsBestResidual)
{
    const auto A = gen_poisson<double>(2, 30);
    SolverConfig cfg;
    cfg.max_iters = 5;
    for (auto m : kAllMethods) {
        const auto out = run(m, A, cfg);
        EXPECT_EQ(out.status, SolveStatus::MaxIters) << name(m);
        EXPECT_EQ(out.iterations, 5);
        EXPECT_EQ(out.history.size(), 6u);
        double best = 1e300;
        for (const auto& rec : out.history) best = std::min(best, rec.rel_res_recur);
        EXPECT_EQ(out.best_rel_res_recur, best);
    }
}

TEST(Solvers, BreakdownIsReported)
{
    // A rotation: (r, A r) = 0, so the first alpha denominator vanishes.
    const auto A = CsrMatrix<double>::from_triplets(2, 2, {{0, 1, 1.0}, {1, 0, -1.0}});
    for (auto m : kAllMethods) {
        const auto out = run(m, A);
        EXPECT_EQ(out.status, SolveStatus::Breakdown) << name(m);
        EXPECT_EQ(out.failed_iter, 0) << name(m);
        EXPECT_FALSE(out.detail.empty()) << name(m);
    }
}

TEST(Solvers, NonFiniteIsReported)
{
    const auto A = gen_poisson<double>(1, 8);
    Vector<double> b = Vector<double>::Ones(8).eval();
    b[2] = std::numeric_limits<double>::quiet_NaN();
    for (auto m : kAllMethods) {
        ReductionEngine engine;
        const auto out = solve(m, A, b, Vector<double>::Zero(8).eval(), SolverConfig{}, engine);
        EXPECT_EQ(out.status, SolveStatus::NonFinite) << name(m);
    }
}

TEST(Solvers, RejectsBadInputs)
{
    const auto A = gen_poisson<double>(1, 4);
    const auto R = CsrMatrix<double>::from_triplets(2, 3, {{0, 0, 1.0}});
    SolverConfig bad;
    bad.epsilon = 0.0;
    EXPECT_THROW(solve_ssbicgsafe2(A, Vector<double>::Ones(3).eval(), Vector<double>::Zero(4).eval()), DimensionError);
    EXPECT_THROW(solve_ssbicgsafe2(A, Vector<double>::Ones(4).eval(), Vector<double>::Zero(5).eval()), DimensionError);
    EXPECT_THROW(solve_bicgstab(R, Vector<double>::Ones(2).eval(), Vector<double>::Zero(3).eval()), DimensionError);
    EXPECT_THROW(solve_gpbicg(A, Vector<double>::Ones(4).eval(), Vector<double>::Zero(4).eval(), bad), std::invalid_argument);
    RrSchedule zero_epoch;
    zero_epoch.epoch = 0;
    EXPECT_THROW(solve_pbicgsafe_rr(A, Vector<double>::Ones(4).eval(), Vector<double>::Zero(4).eval(), SolverConfig{}, zero_epoch),
                 std::invalid_argument);
}

TEST(Solvers, FirstIterationForcesBetaAndEtaToZero)
{
    const auto A = gen_poisson<double>(2, 10);
    for (auto m : kSafeFamily) {
        const auto out = run(m, A);
        ASSERT_TRUE(out.history.front().coefficients) << name(m);
        EXPECT_EQ(out.history.front().coefficients->beta, 0.0) << name(m);
        EXPECT_EQ(out.history.front().coefficients->eta, 0.0) << name(m);
        // Later iterations do use both.
        EXPECT_NE(out.history[3].coefficients->eta, 0.0) << name(m);
    }
}

TEST(Solvers, GpbicgWithBiCGStabCoefficientsReproducesBiCGStab)
{
    Gen gen(5);
    const std::vector<CsrMatrix<double>> systems = {gen_poisson<double>(2, 8), gen.dominant(60, 4)};
    for (const auto& A : systems) {
        const Vector<double> b = spmv(A, Vector<double>::Ones(A.cols()).eval());
        const Vector<double> x0 = Vector<double>::Zero(A.rows()).eval();
        for (int k = 1; k <= 10; ++k) {
            SolverConfig cfg;
            cfg.max_iters = k;
            cfg.epsilon = 1e-300;
            ReductionEngine e1, e2;
            const auto stab = solve_bicgstab(A, b, x0, cfg, e1);
            const auto gp = solve_gpbicg(A, b, x0, cfg, e2, BiCGStabCoefficients{});
            ASSERT_EQ(stab.iterations, gp.iterations);
            ASSERT_LE((stab.x - gp.x).norm(), 1e-8 * gp.x.norm()) << "iterate " << k;
            for (std::size_t i = 0; i < stab.history.size(); ++i)
                ASSERT_NEAR(stab.history[i].rel_res_recur, gp.history[i].rel_res_recur, 1e-10) << i;
        }
    }
}

TEST(Solvers, PipelinedMatchesSsBiCGSafe2EarlyHistory)
{
    const auto A = gen_poisson<double>(2, 30);
    const auto ss = residuals(run(Method::SsBiCGSafe2, A));
    const auto pp = residuals(run(Method::PBiCGSafe, A));
    ASSERT_GE(ss.size(), 21u);
    ASSERT_GE(pp.size(), 21u);
    for (std::size_t i = 0; i < 20; ++i) EXPECT_LE(bicgsafe::testing::rel_diff(ss[i], pp[i]), 1e-6) << i;
}

// Property: the auxiliary recurrences track their defining products.
TEST(SolversProperty, PipelinedRecurrencesTrackDefinitions)
{
    for (Index k : {20, 30, 50}) {
        const auto A = gen_poisson<double>(2, k);
        const double a1 = norm1(A);
        const Vector<double> b = spmv(A, Vector<double>::Ones(A.cols()).eval());
        double worst = 0.0;
        int checked = 0;
        auto observer = [&](const PipelinedState<double>& st) {
            if (st.iter >= 20) return;
            const auto gap = [&](const Vector<double>& rec, const Vector<double>& v) {
                const double scale = a1 * v.norm();
                return scale == 0.0 ? 0.0 : (rec - spmv(A, v)).norm() / scale;
            };
            worst = std::max({worst, gap(st.s, st.r), gap(st.q, st.o), gap(st.w, st.u), gap(st.l, st.t),
                              gap(st.g, st.y)});
            ++checked;
        };
        ReductionEngine engine;
        SolverConfig cfg;
        cfg.epsilon = 1e-12;
        solve_pbicgsafe(A, b, Vector<double>::Zero(A.rows()).eval(), cfg, engine, observer);
        EXPECT_EQ(checked, 20) << "k=" << k;
        EXPECT_LE(worst, 1e-8) << "k=" << k;
    }
}

TEST(Solvers, VacuousReplacementScheduleMatchesPipelined)
{
    const auto A = gen_poisson<double>(2, 25);
    SolverConfig cfg;
    cfg.max_iters = 200;
    RrSchedule never;
    never.epoch = 500;
    const auto p = run(Method::PBiCGSafe, A, cfg);
    const auto rr = run(Method::PBiCGSafeRR, A, cfg, {}, never);
    ASSERT_EQ(p.history.size(), rr.history.size());
    for (std::size_t i = 0; i < p.history.size(); ++i) {
        EXPECT_EQ(p.history[i].rel_res_recur, rr.history[i].rel_res_recur);
        EXPECT_FALSE(rr.history[i].replaced);
    }
    EXPECT_EQ(p.x, rr.x);

    RrSchedule cut;
    cut.epoch = 5;
    cut.cutoff = 5;
    const auto rr_cut = run(Method::PBiCGSafeRR, A, cfg, {}, cut);
    EXPECT_EQ(residuals(rr_cut), residuals(p));
}

TEST(Solvers, ReplacementResetsDriftExactly)
{
    const auto A = gen_poisson<double>(2, 30);
    RrSchedule rr;
    rr.epoch = 7;
    for (std::size_t workers : {1u, 3u}) {
        EngineOptions opts;
        opts.workers = workers;
        const auto out = run(Method::PBiCGSafeRR, A, SolverConfig{}, opts, rr);
        ASSERT_EQ(out.status, SolveStatus::Converged);
        int replaced = 0;
        for (const auto& rec : out.history) {
            const bool expect = rec.iter > 1 && (rec.iter - 1) % rr.epoch == 0;
            ASSERT_EQ(rec.replaced, expect) << rec.iter;
            if (rec.replaced) {
                ++replaced;
                ASSERT_TRUE(rec.rel_res_true);
                EXPECT_EQ(*rec.rel_res_true - rec.rel_res_recur, 0.0) << rec.iter;
            }
        }
        EXPECT_GE(replaced, 3);
        const auto& irregular = out.counters.irregular();
        EXPECT_EQ(irregular.size(), static_cast<std::size_t>(replaced));
    }
}

TEST(Solvers, DeterministicAcrossRunsAndModes)
{
    const auto A = gen_poisson<double>(2, 20);
    for (auto m : kAllMethods) {
        EngineOptions seq;
        seq.workers = 4;
        EngineOptions conc = seq;
        conc.mode = ExecutionMode::Concurrent;
        const auto a = run(m, A, {}, seq);
        const auto b = run(m, A, {}, seq);
        const auto c = run(m, A, {}, conc);
        EXPECT_EQ(residuals(a), residuals(b)) << name(m);
        EXPECT_EQ(residuals(a), residuals(c)) << name(m);
        EXPECT_EQ(a.x, c.x) << name(m);
        EXPECT_EQ(a.counters.per_iteration(), c.counters.per_iteration()) << name(m);
    }
}

TEST(Solvers, MonitoringDoesNotPerturbIterates)
{
    const auto A = gen_poisson<double>(2, 20);
    for (auto m : kAllMethods) {
        SolverConfig off;
        off.monitor_every = 0;
        SolverConfig every;
        every.monitor_every = 1;
        const auto a = run(m, A, off);
        const auto b = run(m, A, every);
        EXPECT_EQ(residuals(a), residuals(b)) << name(m);
        EXPECT_EQ(a.x, b.x) << name(m);
        for (const auto& rec : b.history) EXPECT_TRUE(rec.rel_res_true) << name(m);
        EXPECT_EQ(b.drift.size(), b.history.size());
    }
}

TEST(Solvers, Sherman3SsBiCGSafe2Converges)
{
    const auto path = bicgsafe::testing::suite_matrix("sherman3");
    if (!path) GTEST_SKIP() << "sherman3.mtx not in " << BICGSAFE_MATRIX_DIR;
    const auto [A, meta] = load_matrix_market(*path);
    const auto out = run(Method::SsBiCGSafe2, A);
    EXPECT_EQ(out.status, SolveStatus::Converged);
}

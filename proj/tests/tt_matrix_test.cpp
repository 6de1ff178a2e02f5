#include "test_support.hpp"

#include <ttnet/tt_matrix.hpp>

#include <gtest/gtest.h>

using namespace ttnet;
using ttnet::testing::kronecker;
using ttnet::testing::naive_matmul;
using ttnet::testing::random_tensor;

namespace {

// Entry of the TT-matrix by the explicit ordered product of core slices.
double tt_entry(const TTMatrix& tt, std::span<const std::size_t> i, std::span<const std::size_t> j) {
    std::vector<double> row{1.0};
    for (std::size_t k = 0; k < tt.order(); ++k) {
        const auto& c = tt.core(k);
        const std::size_t rl = c.dim(0), rr = c.dim(3);
        std::vector<double> next(rr, 0.0);
        for (std::size_t a = 0; a < rl; ++a)
            for (std::size_t b = 0; b < rr; ++b) {
                const std::vector<std::size_t> idx{a, i[k], j[k], b};
                next[b] += row[a] * c.at(idx);
            }
        row = std::move(next);
    }
    return row[0];
}

// Unravel a flat row-major index over the given modes.
std::vector<std::size_t> unravel(std::size_t flat, const std::vector<std::size_t>& modes) {
    std::vector<std::size_t> idx(modes.size());
    for (std::size_t k = modes.size(); k-- > 0;) {
        idx[k] = flat % modes[k];
        flat /= modes[k];
    }
    return idx;
}

DenseTensor brute_force_dense(const TTMatrix& tt) {
    DenseTensor w = DenseTensor::matrix(tt.input_dim(), tt.output_dim());
    for (std::size_t r = 0; r < w.rows(); ++r) {
        const auto i = unravel(r, tt.input_modes());
        for (std::size_t c = 0; c < w.cols(); ++c) w(r, c) = tt_entry(tt, i, unravel(c, tt.output_modes()));
    }
    return w;
}

TTMatrix random_tt(const ModeFactorization& f, std::mt19937_64& rng) {
    std::vector<DenseTensor> cores;
    for (std::size_t k = 0; k < f.order(); ++k) {
        cores.push_back(random_tensor({f.ranks[k], f.input_modes[k], f.output_modes[k], f.ranks[k + 1]}, rng));
    }
    return TTMatrix(std::move(cores));
}

} // namespace

TEST(ModeFactorization, Validation) {
    EXPECT_NO_THROW((ModeFactorization{{2, 3}, {4, 5}, {1, 2, 1}}.validate()));
    EXPECT_THROW((ModeFactorization{{2, 3}, {4}, {1, 2, 1}}.validate()), ValueError);
    EXPECT_THROW((ModeFactorization{{2, 3}, {4, 5}, {1, 2}}.validate()), ValueError);
    EXPECT_THROW((ModeFactorization{{2, 3}, {4, 5}, {2, 2, 1}}.validate()), ValueError);
    EXPECT_THROW((ModeFactorization{{2, 3}, {4, 5}, {1, 0, 1}}.validate()), ValueError);
    EXPECT_THROW((ModeFactorization{{}, {}, {1}}.validate()), ValueError);
}

TEST(TTMatrix, RejectsBadCoreChains) {
    EXPECT_THROW(TTMatrix({}), ValueError);
    EXPECT_THROW(TTMatrix({DenseTensor(Shape{1, 2, 2, 2})}), ShapeError);
    EXPECT_THROW(TTMatrix({DenseTensor(Shape{1, 2, 2, 2}), DenseTensor(Shape{3, 2, 2, 1})}), ShapeError);
    EXPECT_THROW(TTMatrix({DenseTensor(Shape{1, 2, 2})}), ShapeError);
}

TEST(TTSvd, KroneckerProductHasUnitRanks) {
    DenseTensor a = DenseTensor::matrix(2, 2, {1, 2, 3, 4});
    DenseTensor b = DenseTensor::matrix(2, 2, {0.5, -1, 2, 3});
    DenseTensor w = kronecker(a, b);
    TTMatrix tt = tt_svd_decompose(w, ModeFactorization::full_rank({2, 2}, {2, 2}));
    EXPECT_EQ(tt.ranks(), (std::vector<std::size_t>{1, 1, 1}));
    EXPECT_LT(relative_error(reconstruct(tt), w), 1e-12);
}

TEST(TTSvd, ThreeFactorKronecker) {
    std::mt19937_64 rng(11);
    DenseTensor a = random_tensor({2, 3}, rng), b = random_tensor({3, 2}, rng), c = random_tensor({2, 2}, rng);
    DenseTensor w = kronecker(kronecker(a, b), c);
    TTMatrix tt = tt_svd_decompose(w, ModeFactorization::full_rank({2, 3, 2}, {3, 2, 2}), 1e-12);
    EXPECT_EQ(tt.ranks(), (std::vector<std::size_t>{1, 1, 1, 1}));
    EXPECT_LT(relative_error(reconstruct(tt), w), 1e-12);
}

TEST(TTSvd, IdentityRoundTrip) {
    DenseTensor w = DenseTensor::identity(4);
    TTMatrix tt = tt_svd_decompose(w, ModeFactorization::full_rank({2, 2}, {2, 2}));
    EXPECT_LT(frobenius_distance(reconstruct(tt), w), 1e-10);
}

TEST(TTSvd, RandomMatrixRoundTrip) {
    std::mt19937_64 rng(12);
    DenseTensor w = random_tensor({16, 16}, rng);
    TTMatrix tt = tt_svd_decompose(w, ModeFactorization::full_rank({4, 4}, {4, 4}));
    EXPECT_LT(relative_error(reconstruct(tt), w), 1e-8);
    EXPECT_EQ(tt.ranks(), (std::vector<std::size_t>{1, 16, 1}));
}

TEST(TTSvd, RespectsRankCaps) {
    std::mt19937_64 rng(13);
    DenseTensor w = random_tensor({24, 30}, rng);
    ModeFactorization caps{{2, 3, 4}, {5, 3, 2}, {1, 3, 2, 1}};
    TTMatrix tt = tt_svd_decompose(w, caps);
    EXPECT_LE(tt.ranks()[1], 3u);
    EXPECT_LE(tt.ranks()[2], 2u);
    EXPECT_EQ(tt.input_modes(), caps.input_modes);
    EXPECT_EQ(tt.output_modes(), caps.output_modes);
}

TEST(TTSvd, ToleranceBoundsError) {
    std::mt19937_64 rng(14);
    DenseTensor w = random_tensor({27, 8}, rng);
    for (double tol : {0.05, 0.2, 0.5}) {
        TTMatrix tt = tt_svd_decompose(w, ModeFactorization::full_rank({3, 3, 3}, {2, 2, 2}), tol);
        EXPECT_LE(relative_error(reconstruct(tt), w), tol + 1e-12);
    }
}

TEST(TTSvd, Errors) {
    DenseTensor w = DenseTensor::identity(4);
    EXPECT_THROW(tt_svd_decompose(w, ModeFactorization::full_rank({2, 3}, {2, 2})), ShapeError);
    EXPECT_THROW(tt_svd_decompose(w, ModeFactorization{{2, 2}, {2, 2}, {1, 0, 1}}), ValueError);
}

// Rank monotonicity: raising any single bond cap never increases the reconstruction error.
TEST(TTSvd, RankMonotonicity) {
    std::mt19937_64 rng(15);
    for (int trial = 0; trial < 10; ++trial) {
        DenseTensor w = random_tensor({12, 18}, rng);
        const std::vector<std::size_t> in{2, 3, 2}, out{3, 2, 3};
        for (std::size_t bond = 1; bond <= 2; ++bond) {
            double previous = std::numeric_limits<double>::infinity();
            for (std::size_t cap = 1; cap <= 12; ++cap) {
                ModeFactorization f{in, out, {1, 4, 4, 1}};
                f.ranks[bond] = cap;
                const double err = frobenius_distance(reconstruct(tt_svd_decompose(w, f)), w);
                EXPECT_LE(err, previous * (1 + 1e-12) + 1e-12) << "bond " << bond << " cap " << cap;
                previous = err;
            }
        }
    }
}

TEST(Reconstruct, SingleCoreIsTheCore) {
    std::mt19937_64 rng(16);
    DenseTensor core = random_tensor({1, 3, 4, 1}, rng);
    TTMatrix tt({core});
    EXPECT_EQ(reconstruct(tt), reshape(core, {3, 4}));
}

TEST(Reconstruct, ZeroCoresGiveZeroMatrix) {
    TTMatrix tt({DenseTensor(Shape{1, 2, 3, 2}), DenseTensor(Shape{2, 3, 2, 1})});
    DenseTensor w = reconstruct(tt);
    EXPECT_EQ(w.shape(), (Shape{6, 6}));
    EXPECT_EQ(frobenius_norm(w), 0.0);
}

TEST(Reconstruct, MatchesExplicitSliceProducts) {
    std::mt19937_64 rng(17);
    TTMatrix tt = random_tt({{2, 3, 2}, {3, 1, 2}, {1, 2, 3, 1}}, rng);
    EXPECT_LT(frobenius_distance(reconstruct(tt), brute_force_dense(tt)), 1e-12);
}

TEST(TTMatvec, IdentityMap) {
    TTMatrix tt = tt_svd_decompose(DenseTensor::identity(4), ModeFactorization::full_rank({2, 2}, {2, 2}));
    std::mt19937_64 rng(18);
    DenseTensor x = random_tensor({2, 2}, rng);
    EXPECT_LT(frobenius_distance(tt_matvec(tt, x), x), 1e-12);
}

TEST(TTMatvec, KroneckerAgainstDenseProduct) {
    std::mt19937_64 rng(19);
    DenseTensor a = random_tensor({2, 2}, rng), b = random_tensor({2, 2}, rng);
    DenseTensor w = kronecker(a, b);
    TTMatrix tt = tt_svd_decompose(w, ModeFactorization::full_rank({2, 2}, {2, 2}));
    DenseTensor x = random_tensor({2, 2}, rng);
    DenseTensor expected = naive_matmul(reshape(x, {1, 4}), w);
    EXPECT_LT(frobenius_distance(reshape(tt_matvec(tt, x), {1, 4}), expected), 1e-12);
}

TEST(TTMatvec, RandomTTAgainstDenseOracle) {
    std::mt19937_64 rng(20);
    TTMatrix tt = random_tt({{3, 4}, {2, 5}, {1, 3, 1}}, rng);
    DenseTensor x = random_tensor({3, 4}, rng);
    DenseTensor y = tt_matvec(tt, x);
    EXPECT_EQ(y.shape(), (Shape{2, 5}));
    DenseTensor expected = naive_matmul(reshape(x, {1, 12}), brute_force_dense(tt));
    EXPECT_LT(relative_error(reshape(y, {1, 10}), expected), 1e-10);
    EXPECT_THROW(tt_matvec(tt, DenseTensor(Shape{4, 3})), ShapeError);
}

// Contraction equivalence over random geometries with prod modes <= 256, batched.
TEST(TTApply, RandomGeometriesMatchDense) {
    std::mt19937_64 rng(21);
    std::uniform_int_distribution<std::size_t> order_dist(1, 4), mode_dist(1, 4), rank_dist(1, 4), batch_dist(1, 5);
    for (int trial = 0; trial < 60; ++trial) {
        const std::size_t order = order_dist(rng);
        ModeFactorization f;
        f.ranks.push_back(1);
        for (std::size_t k = 0; k < order; ++k) {
            f.input_modes.push_back(mode_dist(rng));
            f.output_modes.push_back(mode_dist(rng));
            f.ranks.push_back(k + 1 == order ? 1 : rank_dist(rng));
        }
        if (f.input_dim() > 256 || f.output_dim() > 256) continue;
        TTMatrix tt = random_tt(f, rng);
        DenseTensor x = random_tensor({batch_dist(rng), f.input_dim()}, rng);
        DenseTensor expected = naive_matmul(x, brute_force_dense(tt));
        EXPECT_LT(relative_error(tt_apply(tt, x), expected), 1e-10);
    }
}

void expect_backward_matches_dense(const ModeFactorization& f, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    TTMatrix tt = random_tt(f, rng);
    DenseTensor x = random_tensor({3, f.input_dim()}, rng);
    DenseTensor dy = random_tensor({3, f.output_dim()}, rng);
    TTApplyCache cache;
    tt_apply(tt, x, &cache);
    TTApplyGradients g = tt_apply_backward(tt, cache, dy);
    // dX = dY W^T against the dense matrix
    DenseTensor w = brute_force_dense(tt);
    EXPECT_LT(frobenius_distance(g.input, naive_matmul(dy, transpose(w))), 1e-10);
    // d<dY, X W>/dcore via finite differences (the map is linear in each core, so central differences are exact)
    for (std::size_t k = 0; k < tt.order(); ++k) {
        ASSERT_EQ(g.cores[k].shape(), tt.core(k).shape());
        for (std::size_t e = 0; e < tt.core(k).size(); ++e) {
            TTMatrix plus = tt, minus = tt;
            plus.core_data(k)[e] += 0.5;
            minus.core_data(k)[e] -= 0.5;
            const DenseTensor yp = tt_apply(plus, x), ym = tt_apply(minus, x);
            double fd = 0.0;
            for (std::size_t i = 0; i < dy.size(); ++i) fd += dy[i] * (yp[i] - ym[i]);
            EXPECT_NEAR(g.cores[k][e], fd, 1e-10);
        }
    }
}

TEST(TTApplyBackward, GradientsMatchDenseChainRule) {
    const ModeFactorization f{{3, 2}, {2, 4}, {1, 3, 1}};
    EXPECT_FALSE(ttnet::detail::mirror_is_cheaper(TTMatrix(std::vector<DenseTensor>{DenseTensor(Shape{1, 3, 2, 3}), DenseTensor(Shape{3, 2, 4, 1})})));
    expect_backward_matches_dense(f, 22);
}

// Lopsided modes run the mirrored chain; values and gradients must not notice.
TEST(TTApplyBackward, MirroredSweepMatchesDense) {
    const ModeFactorization f{{5, 13}, {4, 2}, {1, 6, 1}};
    std::mt19937_64 rng(23);
    const TTMatrix tt = random_tt(f, rng);
    ASSERT_TRUE(ttnet::detail::mirror_is_cheaper(tt));
    const DenseTensor x = random_tensor({4, 65}, rng);
    EXPECT_LT(relative_error(tt_apply(tt, x), naive_matmul(x, brute_force_dense(tt))), 1e-12);
    expect_backward_matches_dense(f, 24);
    expect_backward_matches_dense({{3, 2, 7}, {2, 2, 1}, {1, 2, 3, 1}}, 25);
}

TEST(ParamCount, HiddenLayerShapes) {
    ModeFactorization f{{32, 64}, {32, 64}, {1, 4, 1}};
    EXPECT_EQ(tt_param_count(f), 20480u);
    EXPECT_EQ(dense_param_count(f), 4194304u);
    EXPECT_LT(tt_param_count(f), dense_param_count(f));
    TTMatrix tt = tt_random_init(f, 1);
    EXPECT_EQ(tt_param_count(tt), 20480u);
}

TEST(ParamCount, SmallCases) {
    ModeFactorization single{{2}, {3}, {1, 1}};
    EXPECT_EQ(tt_param_count(single), 6u);
    EXPECT_EQ(dense_param_count(single), 6u);
    EXPECT_EQ(dense_param_count(ModeFactorization::full_rank({4, 4}, {4, 4})), 256u);
    EXPECT_THROW(tt_param_count(ModeFactorization::full_rank({4, 4}, {4, 4})), ValueError);
}

TEST(RandomInit, Deterministic) {
    ModeFactorization f{{4, 4}, {4, 4}, {1, 2, 1}};
    EXPECT_EQ(tt_random_init(f, 7), tt_random_init(f, 7));
    EXPECT_FALSE(tt_random_init(f, 7) == tt_random_init(f, 8));
    EXPECT_THROW(tt_random_init(ModeFactorization::full_rank({4, 4}, {4, 4}), 1), ValueError);
}

TEST(RandomInit, HeScaledEntryVariance) {
    ModeFactorization f{{4, 4}, {4, 4}, {1, 2, 1}};
    double sum = 0.0, sum2 = 0.0;
    std::size_t n = 0;
    for (std::uint64_t seed = 0; seed < 1000; ++seed) {
        for (double v : reconstruct(tt_random_init(f, seed)).data()) {
            sum += v;
            sum2 += v * v;
            ++n;
        }
    }
    const double mean = sum / static_cast<double>(n);
    const double var = sum2 / static_cast<double>(n) - mean * mean;
    EXPECT_NEAR(var, 2.0 / 16.0, 0.3 * 2.0 / 16.0);
}

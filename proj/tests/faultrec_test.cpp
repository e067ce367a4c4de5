#include "faultid/faultrec.hpp"

#include <gtest/gtest.h>

#include <cmath>

#include "faultid/errors.hpp"
#include "test_util.hpp"

namespace faultid {
namespace {

using testing::channel_data;
using testing::ChannelData;
using testing::in_behavior;
using testing::random_matrix;
using testing::random_vector;

const RankPolicy kExact = RankPolicy::relative(1e-8);

Eigen::Index oracle_rank(const Matrix& A, const Matrix& F, const Matrix& C, const Matrix& G,
                         Eigen::Index s) {
  Matrix OT(s * C.rows(), A.rows() + s * F.cols());
  OT << extended_observability(A, C, s), block_toeplitz(A, F, C, G, s);
  return numerical_rank(OT, kExact).rank;
}

Trajectory no_fault(Eigen::Index nv, Eigen::Index T) {
  return Trajectory::zeros(Role::Fault, nv, T);
}

TEST(ResidualHankel, FaultFreeResidualIsStateTerm) {
  const testing::ExampleData d = testing::example_data(300, 3);
  const auto run = simulate(d.sys, d.fault, Vector::Zero(3), d.u, no_fault(1, 300));
  const Matrix R = residual_hankel(run.y, d.u, d.sys, 5);
  EXPECT_EQ(R.rows(), 10);
  EXPECT_EQ(R.cols(), 296);
  const Matrix OX = extended_observability(d.sys.A, d.sys.C, 5) * run.x.samples().leftCols(296);
  EXPECT_LE((R - OX).norm(), 1e-8 * block_hankel(run.y, 5, 296).norm());

  // No state excursion at all: nothing is left.
  const Trajectory zero_u = Trajectory::zeros(Role::Input, 1, 300);
  const Trajectory y0 = simulate(d.sys, d.fault, Vector::Zero(3), zero_u, no_fault(1, 300)).y;
  EXPECT_EQ(residual_hankel(y0, zero_u, d.sys, 5).norm(), 0.0);
  EXPECT_THROW(residual_hankel(Trajectory::zeros(Role::Output, 2, 3),
                               Trajectory::zeros(Role::Input, 1, 3), d.sys, 5),
               LengthError);
}

TEST(ResidualHankel, FaultFreeRankBoundedByOrder) {
  const testing::ExampleData d = testing::example_data(300, 4);
  const Trajectory y = simulate(d.sys, d.fault, d.x0, d.u, no_fault(1, 300)).y;
  EXPECT_LE(numerical_rank(residual_hankel(y, d.u, d.sys, 6), kExact).rank, 3);
}

TEST(ResidualHankel, ExampleRanksMatchStructure) {
  const testing::ExampleData d = testing::example_data();
  const Eigen::Index r5 = numerical_rank(residual_hankel(d.y, d.u, d.sys, 5), kExact).rank;
  const Eigen::Index r6 = numerical_rank(residual_hankel(d.y, d.u, d.sys, 6), kExact).rank;
  EXPECT_EQ(r5, oracle_rank(d.sys.A, d.fault.F, d.sys.C, d.fault.G, 5));
  EXPECT_EQ(r6, oracle_rank(d.sys.A, d.fault.F, d.sys.C, d.fault.G, 6));
  EXPECT_EQ(r6 - r5, 1);
}

TEST(EstimateFaultDim, Examples) {
  const testing::ExampleData d = testing::example_data();
  EXPECT_EQ(estimate_fault_dim(d.y, d.u, d.sys, 5, kExact).n_v, 1);

  const Trajectory clean = simulate(d.sys, d.fault, d.x0, d.u, no_fault(1, 1000)).y;
  EXPECT_EQ(estimate_fault_dim(clean, d.u, d.sys, 5, kExact).n_v, 0);

  const ChannelData c = channel_data(1, 2, 91);
  EXPECT_EQ(estimate_fault_dim(c.y, c.u, c.g.sys, 10, kExact).n_v, 2);
}

TEST(EstimateFaultDim, SharedThresholdAndNegativeDifference) {
  const testing::ExampleData d = testing::example_data();
  const FaultDimEstimate e = estimate_fault_dim(d.y, d.u, d.sys, 5, RankPolicy::gap());
  EXPECT_EQ(e.n_v, 1);
  EXPECT_EQ(e.rank_s.tolerance_used, e.threshold);
  EXPECT_EQ(e.rank_s_plus_1.tolerance_used, e.threshold);

  // A deeper "R_s" than R_{s+1} can only shrink the rank difference below zero.
  const Matrix R6 = residual_hankel(d.y, d.u, d.sys, 6);
  const Matrix R5 = residual_hankel(d.y, d.u, d.sys, 5);
  EXPECT_THROW(estimate_fault_dim(R6, R5, kExact), NumericalError);
}

TEST(EstimateFaultDim, RoundTripOverGeneratedChannels) {
  for (int i = 0; i < 12; ++i) {
    const Eigen::Index nv = 1 + i % 2, zc = i % 4;
    const ChannelData c = channel_data(zc, nv, derive_seed(900, static_cast<std::uint64_t>(i)));
    EXPECT_EQ(estimate_fault_dim(c.y, c.u, c.g.sys, 10, kExact).n_v, nv) << "channel " << i;
  }
}

TEST(VerifyRankFormula, Examples) {
  std::mt19937_64 rng(101);
  const Matrix A = 0.3 * random_matrix(rng, 4, 4), C = random_matrix(rng, 2, 4);
  EXPECT_TRUE(verify_rank_formula(A, Matrix::Zero(4, 2), C, random_matrix(rng, 2, 2), 5));

  const GeneratedSystem g = random_system({5, 1, 3, 2}, 2, 102);
  EXPECT_TRUE(verify_rank_formula(g.sys.A, g.fault.F, g.sys.C, g.fault.G, 6));

  // G = 0 with C F of full column rank: one infinite zero per channel.
  const Matrix F = random_matrix(rng, 4, 2);
  const Matrix C3 = random_matrix(rng, 3, 4);
  const ZeroReport z = transmission_zeros(A, F, C3, Matrix::Zero(3, 2));
  EXPECT_GE(z.infinite_zero_count, 2);
  EXPECT_TRUE(verify_rank_formula(A, F, C3, Matrix::Zero(3, 2), 5));

  Matrix twin(4, 2);
  twin << F.col(0), F.col(0);
  EXPECT_THROW(verify_rank_formula(A, twin, C3, Matrix::Zero(3, 2), 5), NumericalError);
}

TEST(RecoveryConstraints, Shape) {
  std::mt19937_64 rng(111);
  const Matrix Q = SubspaceBasis::range_of(random_matrix(rng, 12, 7)).basis();
  const Matrix M = recovery_constraints(Q, random_matrix(rng, 3, 3), random_matrix(rng, 3, 3), 4);
  EXPECT_EQ(M.cols(), 4 * 7 + 3);
}

TEST(RecoverFaultMatrices, ExampleExactModel) {
  const testing::ExampleData d = testing::example_data();
  const FaultRecovery fr = recover_from_data(d.y, d.u, d.sys, 5);
  EXPECT_EQ(fr.n_z, 2);
  EXPECT_EQ(fr.n_v_estimate, 1);
  EXPECT_TRUE((fr.stacked().transpose() * fr.stacked()).isIdentity(1e-10));

  Vector truth(5);
  truth << 0.938, 0.328, 0.115, 0, 0;
  truth.normalize();
  const FaultPair g = select_representative(fr, Representative::SparseG);
  EXPECT_LE((g.stacked().col(0) - truth).cwiseAbs().maxCoeff(), 1e-8);

  // The other printed direction: state part zero to the three printed decimals,
  // output part along (0.944, 0.33).
  const FaultPair f = select_representative(fr, Representative::SparseF);
  EXPECT_LE(f.F.cwiseAbs().maxCoeff(), 5e-4);
  Vector g_dir(2);
  g_dir << 0.944, 0.33;
  g_dir.normalize();
  const Vector g_hat = f.G.col(0).normalized();
  EXPECT_LE(std::min((g_hat - g_dir).cwiseAbs().maxCoeff(), (g_hat + g_dir).cwiseAbs().maxCoeff()),
            1e-3);
}

TEST(RecoverFaultMatrices, ZeroFreeChannelIsUnique) {
  for (std::uint64_t seed = 0; seed < 4; ++seed) {
    const ChannelData c = channel_data(0, 2, derive_seed(120, seed));
    const FaultRecovery fr = recover_from_data(c.y, c.u, c.g.sys, 10);
    EXPECT_EQ(fr.n_z, 2);
    EXPECT_EQ(fr.n_v_estimate, 2);
    EXPECT_TRUE(range_equal(fr.stacked(), c.g.fault.stacked(), 1e-8));
  }
}

TEST(RecoverFaultMatrices, TrueFaultInRangeAndEquivalent) {
  std::mt19937_64 rng(131);
  for (int i = 0; i < 8; ++i) {
    const ChannelData c = channel_data(i % 4, 1 + i % 2, derive_seed(130, static_cast<std::uint64_t>(i)));
    const FaultRecovery fr = recover_from_data(c.y, c.u, c.g.sys, 10);
    EXPECT_GE(fr.n_z, fr.n_v_estimate);
    EXPECT_LE(projection_residual(fr.stacked(), c.g.fault.stacked()), 1e-6) << "channel " << i;
    for (int k = 0; k < 10; ++k) {
      const Matrix P = random_matrix(rng, fr.n_z, c.g.fault.nv());
      const FaultPair mixed = FaultPair::from_stacked(fr.stacked() * P, 5);
      EXPECT_TRUE(behaviorally_equivalent(c.g.sys.A, c.g.sys.C, c.g.fault, mixed))
          << "channel " << i << ", mix " << k;
    }
  }
}

TEST(RecoverFaultMatrices, RealizationProperty) {
  // Data generated by any recovered representative recovers the same range.
  const ChannelData c = channel_data(2, 1, 141);
  const FaultRecovery fr = recover_from_data(c.y, c.u, c.g.sys, 10);
  const FaultPair rep = select_representative(fr, Representative::Leading);
  const Trajectory y2 = simulate(c.g.sys, rep, c.x0, c.u, c.v).y;
  const FaultRecovery again = recover_from_data(y2, c.u, c.g.sys, 10);
  EXPECT_TRUE(range_equal(again.stacked(), fr.stacked(), 1e-8));
}

TEST(RecoverFaultMatrices, EmptyNullspaceThrows) {
  const testing::ExampleData d = testing::example_data(200, 2);
  // An empty residual range forces O F^ = 0, hence F^ = 0 for observable (A, C).
  const Matrix R = Matrix::Zero(10, 100);
  EXPECT_THROW(recover_fault_matrices(R, d.sys, 5, kExact, kExact), NumericalError);
}

TEST(BehaviorallyEquivalent, Examples) {
  std::mt19937_64 rng(161);
  const GeneratedSystem g = random_system({5, 1, 3, 2}, 1, 161);
  const Matrix J = random_matrix(rng, 2, 2) + 2.0 * Matrix::Identity(2, 2);
  const FaultPair mixed = FaultPair::from_stacked(g.fault.stacked() * J, 5);
  EXPECT_TRUE(behaviorally_equivalent(g.sys.A, g.sys.C, g.fault, mixed));

  const FaultPair other{random_matrix(rng, 5, 2), random_matrix(rng, 3, 2)};
  EXPECT_FALSE(behaviorally_equivalent(g.sys.A, g.sys.C, g.fault, other));

  const testing::ExampleData d = testing::example_data();
  const FaultRecovery fr = recover_from_data(d.y, d.u, d.sys, 5);
  EXPECT_TRUE(behaviorally_equivalent(d.sys.A, d.sys.C,
                                      select_representative(fr, Representative::SparseG),
                                      select_representative(fr, Representative::SparseF)));
  EXPECT_THROW(behaviorally_equivalent(d.sys.A, d.sys.C, d.fault, g.fault), DimensionError);
}

TEST(SelectRepresentative, Policies) {
  EXPECT_EQ(parse_representative("sparse-F"), Representative::SparseF);
  EXPECT_EQ(to_string(Representative::Leading), "leading");
  EXPECT_THROW(parse_representative("dense"), std::invalid_argument);

  const ChannelData c = channel_data(0, 2, 171);
  const FaultRecovery fr = recover_from_data(c.y, c.u, c.g.sys, 10);
  ASSERT_EQ(fr.n_z, 2);
  // n_z = n_v: P is the identity up to normalization.
  const FaultPair lead = select_representative(fr, Representative::Leading);
  for (Eigen::Index j = 0; j < 2; ++j) {
    EXPECT_NEAR(std::abs(lead.stacked().col(j).dot(fr.stacked().col(j))), 1.0, 1e-12);
  }
  EXPECT_THROW(select_representative(fr, Representative::Leading, 3), NumericalError);

  const ChannelData c1 = channel_data(1, 1, 172);
  const FaultRecovery fr1 = recover_from_data(c1.y, c1.u, c1.g.sys, 10);
  ASSERT_GT(fr1.n_z, 1);
  EXPECT_THROW(select_representative(fr1, Representative::SparseF), NumericalError);
}

TEST(SelectRepresentative, ResultIsEquivalentToRandomMixes) {
  std::mt19937_64 rng(181);
  const testing::ExampleData d = testing::example_data();
  const FaultRecovery fr = recover_from_data(d.y, d.u, d.sys, 5);
  for (Representative p : {Representative::Leading, Representative::SparseG,
                           Representative::SparseF}) {
    const FaultPair rep = select_representative(fr, p);
    const FaultPair mix = FaultPair::from_stacked(fr.stacked() * random_vector(rng, fr.n_z), 3);
    EXPECT_TRUE(behaviorally_equivalent(d.sys.A, d.sys.C, rep, mix)) << to_string(p);
  }
}

TEST(ReconstructFault, ExampleRecoversSignal) {
  const testing::ExampleData d = testing::example_data();
  const FaultRecovery fr = recover_from_data(d.y, d.u, d.sys, 5);
  const FaultPair rep = select_representative(fr, Representative::SparseG);
  const FaultReconstruction rec = reconstruct_fault(d.y, d.u, d.sys, rep, Vector::Zero(3));
  EXPECT_LE(rec.replay_residual, 1e-8);
  // The final n_x samples do not reach the output and stay at their minimum-norm value.
  const Eigen::Index L = 1000 - 3;
  EXPECT_GE(std::abs(testing::pearson(rec.v.samples().row(0).head(L).transpose(),
                                      d.v.samples().row(0).head(L).transpose())),
            0.99);
  EXPECT_EQ(rec.x_full.length(), 1001);
  // x = xi + x~ reproduces the true state up to the scale of the representative.
  const Matrix x_true = simulate(d.sys, d.fault, d.x0, d.u, d.v).x.samples();
  EXPECT_LE((rec.x_full.samples().col(0) - x_true.col(0)).norm(), 1e-6);
}

TEST(ReconstructFault, ZeroResidual) {
  const testing::ExampleData d = testing::example_data(200, 1);
  const Trajectory y = simulate(d.sys, d.fault, Vector::Zero(3), d.u, no_fault(1, 200)).y;
  const FaultReconstruction rec = reconstruct_fault(y, d.u, d.sys, d.fault, Vector::Zero(3));
  EXPECT_LE(rec.xi0.norm(), 1e-10);
  EXPECT_LE(rec.v.samples().norm(), 1e-10);
  EXPECT_EQ(rec.replay_residual, 0.0);
}

TEST(ReconstructFault, ReplayConsistentWithInvariantZeros) {
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    const ChannelData c = channel_data(2, 1, derive_seed(190, seed), 400);
    const FaultRecovery fr = recover_from_data(c.y, c.u, c.g.sys, 10);
    const FaultPair rep = select_representative(fr, Representative::Leading);
    EXPECT_LE(reconstruct_fault(c.y, c.u, c.g.sys, rep, Vector::Zero(5)).replay_residual, 1e-8);
  }
}

TEST(RemixedCorrelation, UndoesMixing) {
  std::mt19937_64 rng(201);
  const Matrix v = random_matrix(rng, 2, 300);
  const Matrix mix = random_matrix(rng, 2, 2) + 2.0 * Matrix::Identity(2, 2);
  const auto c = remixed_correlation(Trajectory(Role::Fault, mix * v), Trajectory(Role::Fault, v));
  ASSERT_EQ(c.size(), 2u);
  for (double x : c) EXPECT_NEAR(x, 1.0, 1e-12);
}

TEST(BehavioralExtension, TwoSidedMembership) {
  std::mt19937_64 rng(211);
  for (int i = 0; i < 20; ++i) {
    const GeneratedSystem g =
        random_system({5, 1, 3, 1 + i % 2}, i % 4, derive_seed(210, static_cast<std::uint64_t>(i)));
    const Eigen::Index p = 3, L = 6 + i % 3;
    const Matrix& A = g.sys.A;
    const Matrix& F = g.fault.F;
    const Matrix& C = g.sys.C;
    const Matrix& G = g.fault.G;
    const Trajectory v(Role::Fault, random_matrix(rng, F.cols(), L + 1));
    const Trajectory zero_u = Trajectory::zeros(Role::Input, 1, L + 1);
    StateSpace channel{A, Matrix::Zero(5, 1), C, Matrix::Zero(3, 1)};
    Vector r = simulate(channel, g.fault, random_vector(rng, 5), zero_u, v).y.samples().reshaped();
    if (i % 2 == 1) r.tail(p) += random_vector(rng, p);  // engineered negative

    ASSERT_TRUE(in_behavior(A, F, C, G, r.head(L * p)));
    const bool longer = in_behavior(A, F, C, G, r);
    const bool shifted = in_behavior(A, F, C, G, r.tail(L * p));
    EXPECT_EQ(longer, i % 2 == 0) << "channel " << i;
    EXPECT_EQ(longer, shifted) << "channel " << i;
  }
}

}  // namespace
}  // namespace faultid

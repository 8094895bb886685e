#include <doctest.h>

#include "oracle_math.hpp"

#include "fnls/ldp.hpp"
#include "fnls/noise.hpp"
#include "fnls/random.hpp"

#include <cmath>
#include <numbers>

using namespace fnls;

namespace {

struct Small {
  GridSpec grid{1, 8, std::numbers::pi};
  CorrelationSpec spec;
  HurstKernel kernel;
  DiscreteLOperator op;
  explicit Small(double h, int modes = 4, int steps = 8)
      : spec(build_correlation(grid, 4.0, h, 0.2, modes)), kernel(h), op(spec, kernel, TimeGrid(1.0, steps)) {}
};

}  // namespace

TEST_CASE("alpha window") {
  CHECK_NOTHROW(check_alpha_window(0.7, 0.2));
  CHECK_NOTHROW(check_alpha_window(0.7, 0.99));
  CHECK_THROWS_AS(check_alpha_window(0.7, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(check_alpha_window(0.7, 1.0), std::invalid_argument);
  // H < 1/2: (1/2 - H, 1 - H)
  CHECK_NOTHROW(check_alpha_window(0.3, 0.45));
  CHECK_THROWS_AS(check_alpha_window(0.3, 0.2), std::invalid_argument);
  CHECK_THROWS_AS(check_alpha_window(0.3, 0.7), std::invalid_argument);
  CHECK_THROWS_AS(check_alpha_window(1.2, 0.2), std::invalid_argument);
}

TEST_CASE("correlation spectrum") {
  const GridSpec grid(1, 16, std::numbers::pi);
  // r must exceed 1 + 2(H + alpha) + d/2 = 3.3 here
  CHECK_THROWS_AS(build_correlation(grid, 3.0, 0.7, 0.2, 8), std::invalid_argument);
  const CorrelationSpec spec = build_correlation(grid, 4.0, 0.7, 0.2, 8);
  REQUIRE(spec.size() == 8);
  for (int m = 0; m < spec.size(); ++m) {
    CHECK(spec.eigenvalues[m] == doctest::Approx(std::pow(1.0 + spec.omega(m), -2.0)));
    if (m > 0) CHECK(spec.omega(m) >= spec.omega(m - 1));
  }
  CHECK(spec.hs_norm > 0.0);
  CHECK(spec.tail_ratio > 0.0);
  CHECK(spec.tail_ratio < 1.0);
  CHECK(zero_correlation(grid, 0.7, 4).is_zero());
}

TEST_CASE("L is causal and linear") {
  const Small s(0.7);
  const auto& op = s.op;
  Stream rng(3, {0});
  Eigen::MatrixXd cells = Eigen::MatrixXd::Zero(2 * op.modes(), op.steps());
  // a control supported on the last half of [0,1] leaves the first half untouched
  for (int i = 0; i < cells.rows(); ++i) {
    for (int k = op.steps() / 2; k < op.steps(); ++k) cells(i, k) = rng.normal();
  }
  const ConvolutionPath late = op.apply(op.control_from_cells(cells));
  for (int k = 0; k <= op.steps() / 2; ++k) {
    CHECK(late.coefficients.row(k).norm() < 1e-14);
  }
  CHECK(late.coefficients.row(op.steps()).norm() > 1e-3);

  Eigen::MatrixXd other(2 * op.modes(), op.steps());
  for (Eigen::Index i = 0; i < other.size(); ++i) other.data()[i] = rng.normal();
  const Control a = op.control_from_cells(cells);
  const Control b = op.control_from_cells(other);
  const Control sum = op.control_from_cells(2.0 * cells - 0.5 * other);
  const Eigen::MatrixXcd lhs = op.apply(sum).coefficients;
  const Eigen::MatrixXcd rhs = 2.0 * op.apply(a).coefficients - 0.5 * op.apply(b).coefficients;
  CHECK((lhs - rhs).norm() < 1e-12 * rhs.norm());
  CHECK(op.apply(op.zero_control()).coefficients.norm() == 0.0);
}

TEST_CASE("covariance factorization") {
  for (double h : {0.55, 0.7}) {
    const Small s(h);
    const Eigen::MatrixXd q = build_Q(s.spec, s.kernel, s.op.timegrid());
    CHECK(verify_factorization(q, s.op) < 1e-10);
    // symmetric, positive semidefinite
    CHECK((q - q.transpose()).norm() < 1e-14 * q.norm());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(q);
    CHECK(eig.eigenvalues().minCoeff() > -1e-12);
  }
  const Small s(0.5);
  CHECK(verify_factorization(build_Q(s.spec, s.kernel, s.op.timegrid()), s.op) < 1e-10);
}

TEST_CASE("sampled Z matches Q and is Gaussian") {
  const Small s(0.7);
  const int draws = 4000;
  Eigen::MatrixXd x(s.op.rows(), draws);
  for (int r = 0; r < draws; ++r) x.col(r) = s.op.flatten(s.op.sample(11, r));
  const Eigen::MatrixXd q = build_Q(s.spec, s.kernel, s.op.timegrid());
  const Eigen::MatrixXd c = x * x.transpose() / draws;
  double worst = 0.0;
  for (Eigen::Index i = 0; i < q.rows(); ++i) {
    for (Eigen::Index j = 0; j < q.cols(); ++j) {
      const double se = std::sqrt((q(i, i) * q(j, j) + q(i, j) * q(i, j)) / draws);
      worst = std::max(worst, std::abs(c(i, j) - q(i, j)) / se);
    }
  }
  CHECK(worst < 5.0);
  const int row = s.op.row_index(0, s.op.steps(), 0);
  std::vector<double> v(draws);
  for (int r = 0; r < draws; ++r) v[r] = x(row, r);
  CHECK(oracle::anderson_darling(v, 0.0, std::sqrt(q(row, row))) < oracle::kAndersonDarlingCritical);
  // a wrong variance must be caught
  CHECK(oracle::anderson_darling(v, 0.0, 2.0 * std::sqrt(q(row, row))) > oracle::kAndersonDarlingCritical);
}

TEST_CASE("samples are reproducible per replicate") {
  const Small s(0.7);
  const ConvolutionPath a = s.op.sample(5, 17);
  const ConvolutionPath b = s.op.sample(5, 17);
  const ConvolutionPath c = s.op.sample(5, 18);
  CHECK(a.coefficients == b.coefficients);
  CHECK(a.coefficients != c.coefficients);
  CHECK(a.coefficients.row(0).norm() == 0.0);
}

TEST_CASE("fbm_path and volterra draws share a law") {
  const Small s(0.7, 2, 16);
  const int draws = 3000;
  std::vector<double> va(draws);
  std::vector<double> vb(draws);
  for (int r = 0; r < draws; ++r) {
    va[r] = s.op.sample(21, r).coefficients(16, 1).imag();
    vb[r] = sample_convolution(s.spec, s.kernel, s.op.timegrid(), 22, ConvolutionMethod::fbm_path, r, 8)
                .coefficients(16, 1).imag();
  }
  CHECK(oracle::ks_statistic(va, vb) < oracle::ks_critical(draws, draws));
}

TEST_CASE("Gaussian rate") {
  const Small s(0.7);
  const auto& op = s.op;
  Stream rng(9, {0});
  Eigen::VectorXd y(op.rows());
  for (Eigen::Index i = 0; i < y.size(); ++i) y[i] = rng.normal();
  // h0 = L~^T y lies in the row space, so it is the minimal-norm control
  const Eigen::VectorXd z = op.whitened().transpose() * y;
  const Control h0 = op.control_from_whitened(z);
  const Eigen::VectorXd f = op.flatten(op.apply(h0));
  const RateResult rr = gaussian_rate(op, f);
  CHECK(rr.feasible);
  CHECK(rr.rate == doctest::Approx(0.5 * z.squaredNorm()).epsilon(1e-6));
  CHECK(rr.rate == doctest::Approx(h0.energy()).epsilon(1e-6));
  CHECK(gaussian_rate(op, Eigen::VectorXd::Zero(op.rows())).rate == doctest::Approx(0.0));
  // quadratic in the target
  CHECK(gaussian_rate(op, 3.0 * f).rate == doctest::Approx(9.0 * rr.rate).epsilon(1e-6));

  // terminal ball: delta^2 / (2 lambda_max)
  std::vector<int> rows;
  for (int m = 0; m < op.modes(); ++m) {
    for (int c = 0; c < 2; ++c) rows.push_back(op.row_index(m, op.steps(), c));
  }
  const Eigen::MatrixXd q = op.covariance();
  Eigen::MatrixXd t(rows.size(), rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < rows.size(); ++j) t(i, j) = q(rows[i], rows[j]);
  }
  const double lmax = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(t).eigenvalues().maxCoeff();
  CHECK(terminal_ball_rate(op, 0.6).rate == doctest::Approx(0.36 / (2.0 * lmax)).epsilon(1e-8));
}

TEST_CASE("Brownian case: Var Z_m(1) = phi_m^2") {
  const GridSpec grid(1, 8, std::numbers::pi);
  const CorrelationSpec spec = build_correlation(grid, 4.0, 0.5, 0.3, 3);
  const DiscreteLOperator op(spec, HurstKernel(0.5), TimeGrid(1.0, 8));
  const Eigen::MatrixXd q = op.covariance();
  for (int m = 0; m < spec.size(); ++m) {
    const double phi2 = spec.eigenvalues[m] * spec.eigenvalues[m];
    const int re = op.row_index(m, 8, 0);
    const int im = op.row_index(m, 8, 1);
    CHECK(q(re, re) + q(im, im) == doctest::Approx(2.0 * phi2).epsilon(1e-8));
  }
}

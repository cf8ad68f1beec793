#include "doctest.h"

#include "gwr/errors.hpp"
#include "gwr/rigidity.hpp"
#include "support/oracle.hpp"

#include <Eigen/QR>
#include <Eigen/SVD>

#include <cmath>
#include <random>

using namespace gwr;
using Pts = std::vector<std::vector<double>>;

namespace {

const Configuration kTri(2, Pts{{0.0, 2.0}, {-2.0, 0.0}, {2.0, 0.0}});
const Configuration kQuad(2, Pts{{0.0, 2.0}, {-1.0, 0.0}, {1.0, 0.0}, {2.3, 2.2}});

FrameworkSpec fig1b() {
  FrameworkSpec s;
  s.n = 3;
  s.edges = {{0, 1, 8.0}};
  s.angles = {{0, 1, 2, 0.0}, {2, 0, 1, 0.7}};
  return s;
}

FrameworkSpec fig5(char which) {
  FrameworkSpec s;
  s.n = 4;
  const std::vector<AngleConstraint> four{
      {1, 2, 0, 0.1}, {2, 0, 1, 0.2}, {0, 2, 3, 0.3}, {3, 0, 2, 0.4}};
  switch (which) {
    case 'a':
      s.n = 3;
      s.edges = {{0, 1, 5.0}};
      s.angles = {four[0], four[1]};
      break;
    case 'b':
      s.angles = four;
      break;
    case 'c':
      s.edges = {{0, 1, 5.0}};
      s.angles = {four[0], four[1], four[3]};
      break;
    default:
      s.edges = {{0, 1, 5.0}};
      s.angles = four;
  }
  return s;
}

FrameworkSpec fig7a() {
  FrameworkSpec s;
  s.n = 4;
  s.edges = {{0, 1, 1.0}, {1, 3, 1.0}, {2, 3, 1.0}};
  s.angles = {{0, 1, 2, 0.1}, {1, 2, 0, 0.1}, {2, 0, 1, 0.1}, {3, 2, 1, 0.1}};
  return s;
}

const Configuration kSquare(2, Pts{{0.15, 2.1}, {-2.0, 0.1}, {2.05, -0.05}, {-0.1, -1.9}});

int rank_qr(const Eigen::MatrixXd& m) {
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(m);
  qr.setThreshold(1e-10);
  return static_cast<int>(qr.rank());
}

}  // namespace

TEST_SUITE("rigidity") {
  TEST_CASE("weak rigidity function values") {
    FrameworkSpec s;
    s.n = 3;
    s.angles = {{0, 1, 2, 0.0}};
    Configuration eq(2, Pts{{0.0, 0.0}, {1.0, 0.0}, {0.5, std::sqrt(3.0) / 2.0}});
    CHECK(eval_fw(s, eq)[0] == doctest::Approx(0.5).epsilon(1e-14));

    Configuration line(2, Pts{{0.0, 0.0}, {1.0, 0.0}, {2.0, 0.0}});
    CHECK(eval_fw(s, line)[0] == doctest::Approx(1.0).epsilon(1e-14));

    Configuration right(2, Pts{{0.0, 2.0}, {-2.0, 0.0}, {2.0, 0.0}});
    CHECK(std::abs(eval_fw(s, right)[0]) < 1e-15);

    Configuration coincide(2, Pts{{0.0, 0.0}, {0.0, 0.0}, {2.0, 0.0}});
    CHECK_THROWS_AS(eval_fw(s, coincide), DegenerateConfiguration);
  }

  TEST_CASE("cosines match the law-of-cosines form") {
    std::mt19937_64 rng(101);
    for (int d : {2, 3}) {
      for (int k = 0; k < 50; ++k) {
        const auto rf = oracle::random_framework(d, rng);
        const Eigen::VectorXd a = eval_fw(rf.spec, rf.cfg);
        const Eigen::VectorXd b = oracle::fw(rf.spec, rf.cfg.vector());
        for (Eigen::Index r = 0; r < a.size(); ++r) {
          CHECK(std::abs(a[r] - b[r]) <= 1e-12 * std::max(1.0, std::abs(b[r])));
        }
      }
    }
  }

  TEST_CASE("single distance row") {
    FrameworkSpec s;
    s.n = 3;
    s.edges = {{0, 1, 1.0}};
    const Eigen::MatrixXd r = weak_rigidity_matrix(s, kTri);
    REQUIRE(r.rows() == 1);
    Eigen::RowVectorXd want(6);
    want << 4.0, 4.0, -4.0, -4.0, 0.0, 0.0;
    CHECK((r - want).cwiseAbs().maxCoeff() == 0.0);
  }

  TEST_CASE("analytic Jacobian matches a five-point stencil") {
    std::mt19937_64 rng(7);
    for (int d : {2, 3}) {
      double worst = 0.0;
      for (int k = 0; k < 100; ++k) {
        const auto rf = oracle::random_framework(d, rng);
        const Eigen::MatrixXd a = weak_rigidity_matrix(rf.spec, rf.cfg);
        const Eigen::MatrixXd b = oracle::fw_jacobian(rf.spec, rf.cfg.vector());
        worst = std::max(worst, (a - b).cwiseAbs().maxCoeff());
      }
      CHECK(worst <= 1e-6);
    }
  }

  TEST_CASE("library finite differences flag a corrupted angle row") {
    const FrameworkSpec s = fig1b();
    CHECK(jacobian_fd_error(s, kTri) <= 1e-6);
    const JacobianFn flipped = [](const FrameworkSpec& sp, const Configuration& c) {
      Eigen::MatrixXd r = weak_rigidity_matrix(sp, c);
      r.row(sp.num_distances()) *= -1.0;
      return r;
    };
    CHECK(jacobian_fd_error(s, kTri, flipped) > 1e-3);
  }

  TEST_CASE("triangle with one distance and two angles has rank 3") {
    CHECK(numerical_rank(weak_rigidity_matrix(fig1b(), kTri)).rank == 3);
  }

  TEST_CASE("trivial motion basis") {
    CHECK(trivial_motion_basis(kTri, false).cols() == 3);
    CHECK(trivial_motion_basis(kTri, true).cols() == 4);

    Configuration c3(3, Pts{{1.0, 0.2, -0.3}, {0.4, 2.0, 1.1}, {-1.2, 0.7, 0.5}, {0.3, -0.8, 2.2}});
    const Eigen::MatrixXd b = trivial_motion_basis(c3, true);
    CHECK(b.cols() == 7);
    for (const auto& j : rotation_generators(3)) {
      for (int i = 0; i < c3.size(); ++i) {
        const Eigen::VectorXd x = c3.point(i);
        CHECK(std::abs(x.dot(j * x)) < 1e-15);
      }
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(b);
    CHECK(svd.singularValues().minCoeff() > 1e-8);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd2(trivial_motion_basis(kQuad, true));
    CHECK(svd2.singularValues().minCoeff() > 1e-8);
  }

  TEST_CASE("numerical rank") {
    CHECK(numerical_rank(Eigen::MatrixXd::Zero(3, 5)).rank == 0);
    CHECK(numerical_rank(Eigen::MatrixXd::Identity(4, 4)).rank == 4);
    Eigen::MatrixXd m = Eigen::MatrixXd::Identity(3, 3);
    m(2, 2) = 1e-6;
    CHECK(numerical_rank(m).rank == 3);
    RankPolicy loose;
    loose.absolute_tol = 1e-3;
    CHECK(numerical_rank(m, loose).rank == 2);
    const auto r = numerical_rank(weak_rigidity_matrix(fig5('c'), kQuad));
    CHECK(r.rank <= 4);
    CHECK(r.singular_values[0] >= r.singular_values[r.singular_values.size() - 1]);
  }

  TEST_CASE("figure classifications") {
    const auto a = classify(fig5('a'), Configuration(2, Pts{{0.0, 2.0}, {-1.0, 0.0}, {1.0, 0.0}}));
    CHECK(a.is_giwr);
    CHECK(a.is_minimal);
    CHECK(a.threshold == 3);

    const auto b = classify(fig5('b'), kQuad);
    CHECK(b.is_giwr);
    CHECK(b.threshold == 4);
    CHECK(b.e_empty);

    const auto c = classify(fig5('c'), kQuad);
    CHECK_FALSE(c.is_giwr);
    CHECK_FALSE(c.is_minimal);
    CHECK(c.rank <= 4);

    const auto d = classify(fig5('d'), kQuad);
    CHECK(d.is_giwr);
    CHECK(d.is_minimal);

    const auto seven = classify(fig7a(), kSquare);
    CHECK(seven.is_giwr);
    CHECK_FALSE(seven.is_minimal);
    for (const auto& r : {a, b, c, d, seven}) {
      CHECK(r.trivial_basis_residual <= 1e-8 * r.sigma_max);
      CHECK_FALSE(r.span_deficient);
    }
  }

  TEST_CASE("span deficiency is reported separately") {
    Configuration line(2, Pts{{0.0, 0.0}, {1.0, 0.0}, {3.0, 0.0}});
    const auto r = classify(fig1b(), line);
    CHECK(r.span_rank == 1);
    CHECK(r.span_deficient);
  }

  TEST_CASE("distance rigidity implies GIWR") {
    FrameworkSpec k3;
    k3.n = 3;
    k3.edges = {{0, 1, 1.0}, {0, 2, 1.0}, {1, 2, 1.0}};
    auto r = check_distance_rigidity_implication(k3, kTri, {{0, 1, 2, 0.2}});
    CHECK(r.premise);
    CHECK(r.conclusion);
    CHECK(r.holds());

    FrameworkSpec five;
    five.n = 4;
    five.edges = {{0, 1, 1.0}, {0, 2, 1.0}, {1, 2, 1.0}, {0, 3, 1.0}, {2, 3, 1.0}};
    r = check_distance_rigidity_implication(five, kQuad, {{3, 0, 1, 0.2}});
    CHECK(r.premise);
    CHECK(r.holds());

    FrameworkSpec cycle;
    cycle.n = 4;
    cycle.edges = {{0, 1, 1.0}, {1, 2, 1.0}, {2, 3, 1.0}, {3, 0, 1.0}};
    r = check_distance_rigidity_implication(cycle, kQuad, {{0, 1, 3, 0.2}});
    CHECK_FALSE(r.premise);
    CHECK(r.holds());

    FrameworkSpec with_angle = k3;
    with_angle.angles = {{0, 1, 2, 0.1}};
    CHECK_THROWS_AS(check_distance_rigidity_implication(with_angle, kTri, {}), InvalidArgument);
  }

  TEST_CASE("regular points") {
    CHECK(is_regular_point(fig1b(), kTri, 100, 3));
    Configuration line(2, Pts{{0.0, 0.0}, {1.0, 0.0}, {3.0, 0.0}});
    CHECK_FALSE(is_regular_point(fig1b(), line, 100, 3));
    CHECK_THROWS_AS(is_regular_point(fig1b(), kTri, 0, 3), InvalidArgument);
  }

  TEST_CASE("constraint partition") {
    const auto m = partition_constraints(fig5('d'), kQuad);
    CHECK(m.minimal.size() == 5);
    CHECK(m.remainder.empty());

    const auto p = partition_constraints(fig7a(), kSquare);
    CHECK(p.minimal.size() == 5);
    CHECK(p.remainder.size() == 2);
    const auto sub = classify(fig7a().subset(p.minimal), kSquare);
    CHECK(sub.is_giwr);
    CHECK(sub.is_minimal);

    CHECK_THROWS_AS(partition_constraints(fig5('c'), kQuad), NotGIWR);
  }

  TEST_CASE("trivial motions are in the null space of random frameworks") {
    std::mt19937_64 rng(11);
    for (int d : {2, 3}) {
      for (int k = 0; k < 100; ++k) {
        const auto rf = oracle::random_framework(d, rng);
        const Eigen::MatrixXd r = weak_rigidity_matrix(rf.spec, rf.cfg);
        const Eigen::MatrixXd b = trivial_motion_basis(rf.cfg, !rf.spec.has_distances());
        const double smax = numerical_rank(r).singular_values[0];
        CHECK((r * b).colwise().norm().maxCoeff() <= 1e-10 * std::max(smax, 1.0));
        CHECK(numerical_rank(r).rank <= rank_threshold(rf.spec));
      }
    }
  }

  TEST_CASE("classification is invariant under rigid motions and, without distances, scaling") {
    std::mt19937_64 rng(13);
    for (int d : {2, 3}) {
      for (int k = 0; k < 30; ++k) {
        const auto rf = oracle::random_framework(d, rng);
        const int r0 = classify(rf.spec, rf.cfg).rank;
        const Eigen::MatrixXd q = oracle::random_rotation(d, rng);
        Eigen::VectorXd shift = Eigen::VectorXd::Random(d) * 5.0;
        Configuration moved = rf.cfg;
        for (int i = 0; i < rf.spec.n; ++i) moved.point(i) = q * rf.cfg.point(i) + shift;
        CHECK(classify(rf.spec, moved).rank == r0);
        if (!rf.spec.has_distances()) {
          Configuration scaled(d, 3.7 * rf.cfg.vector());
          CHECK(classify(rf.spec, scaled).rank == r0);
        }
      }
    }
  }

  TEST_CASE("minimality agrees with exhaustive leave-one-out") {
    std::mt19937_64 rng(17);
    int minimal_seen = 0;
    std::vector<std::pair<FrameworkSpec, Configuration>> cases{
        {fig5('a'), Configuration(2, Pts{{0.0, 2.0}, {-1.0, 0.0}, {1.0, 0.0}})},
        {fig5('b'), kQuad}, {fig5('c'), kQuad}, {fig5('d'), kQuad}, {fig7a(), kSquare}};
    for (int k = 0; k < 60; ++k) {
      const auto rf = oracle::random_framework(2 + k % 2, rng);
      cases.emplace_back(rf.spec, rf.cfg);
    }
    for (const auto& [spec, cfg] : cases) {
      const Eigen::MatrixXd j = oracle::fw_jacobian(spec, cfg.vector());
      const int threshold = spec.has_distances() ? spec.d * spec.n - spec.d * (spec.d + 1) / 2
                                                 : spec.d * spec.n - (spec.d * spec.d + spec.d + 2) / 2;
      const bool giwr = rank_qr(j) == threshold;
      bool every_removal_breaks = true;
      for (Eigen::Index drop = 0; drop < j.rows(); ++drop) {
        Eigen::MatrixXd sub(j.rows() - 1, j.cols());
        for (Eigen::Index r = 0, w = 0; r < j.rows(); ++r) {
          if (r != drop) sub.row(w++) = j.row(r);
        }
        if (rank_qr(sub) == threshold) every_removal_breaks = false;
      }
      const bool expect = giwr && every_removal_breaks;
      const auto rep = classify(spec, cfg);
      CHECK(rep.is_giwr == giwr);
      CHECK(rep.is_minimal == expect);
      minimal_seen += expect;
    }
    CHECK(minimal_seen >= 4);
  }
}

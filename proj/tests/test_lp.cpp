#include <doctest.h>

#include <random>
#include <sstream>

#include "ccnd/lp.hpp"

using namespace ccnd;

TEST_SUITE_BEGIN("lp");

TEST_CASE("two-variable maximization with known duals") {
  // max 3a + 5b s.t. a <= 4, 2b <= 12, 3a + 2b <= 18, written as min -3a - 5b.
  lp::LpModel m(2);
  m.set_objective(0, -3.0);
  m.set_objective(1, -5.0);
  m.add_row({{0, 1.0}}, lp::Sense::LessEqual, 4.0);
  m.add_row({{1, 2.0}}, lp::Sense::LessEqual, 12.0);
  m.add_row({{0, 3.0}, {1, 2.0}}, lp::Sense::LessEqual, 18.0);
  const auto sol = lp::solve(m);
  REQUIRE(sol.status == lp::Status::Optimal);
  CHECK(sol.objective == doctest::Approx(-36.0));
  CHECK(sol.primal[0] == doctest::Approx(2.0));
  CHECK(sol.primal[1] == doctest::Approx(6.0));
  CHECK(sol.dual[0] == doctest::Approx(0.0));
  CHECK(sol.dual[1] == doctest::Approx(-1.5));
  CHECK(sol.dual[2] == doctest::Approx(-1.0));
  CHECK(lp::verify_kkt(m, sol).ok());
}

TEST_CASE("equality and greater-equal rows with free-ish bounds") {
  // min x + 2y s.t. x + y = 3, x - y >= 1, x,y >= 0. Optimum (3, 0).
  lp::LpModel m(2);
  m.set_objective(0, 1.0);
  m.set_objective(1, 2.0);
  m.add_row({{0, 1.0}, {1, 1.0}}, lp::Sense::Equal, 3.0);
  m.add_row({{0, 1.0}, {1, -1.0}}, lp::Sense::GreaterEqual, 1.0);
  const auto sol = lp::solve(m);
  REQUIRE(sol.status == lp::Status::Optimal);
  CHECK(sol.objective == doctest::Approx(3.0));
  CHECK(sol.primal[0] == doctest::Approx(3.0));
  CHECK(sol.primal[1] == doctest::Approx(0.0));
  CHECK(lp::verify_kkt(m, sol).ok());
}

TEST_CASE("variable bounds alone decide the optimum") {
  lp::LpModel m(2);
  m.set_bounds(0, -5.0, 3.0);
  m.set_bounds(1, -2.0, 7.0);
  m.set_objective(0, 1.0);
  m.set_objective(1, -1.0);
  const auto sol = lp::solve(m);
  REQUIRE(sol.status == lp::Status::Optimal);
  CHECK(sol.objective == doctest::Approx(-12.0));
  CHECK(sol.primal[0] == doctest::Approx(-5.0));
  CHECK(sol.primal[1] == doctest::Approx(7.0));
}

TEST_CASE("infeasible rows are detected") {
  lp::LpModel m(1);
  m.add_row({{0, 1.0}}, lp::Sense::GreaterEqual, 2.0);
  m.add_row({{0, 1.0}}, lp::Sense::LessEqual, 1.0);
  CHECK(lp::solve(m).status == lp::Status::Infeasible);
}

TEST_CASE("unbounded direction is detected") {
  lp::LpModel m(1);
  m.set_objective(0, -1.0);
  CHECK(lp::solve(m).status == lp::Status::Unbounded);
}

TEST_CASE("free variable pinned by an equality") {
  lp::LpModel m(2);
  m.set_bounds(0, -lp::kInf, lp::kInf);
  m.set_objective(0, 1.0);
  m.add_row({{0, 1.0}, {1, 1.0}}, lp::Sense::Equal, -4.0);
  m.add_row({{1, 1.0}}, lp::Sense::LessEqual, 1.0);
  const auto sol = lp::solve(m);
  REQUIRE(sol.status == lp::Status::Optimal);
  CHECK(sol.objective == doctest::Approx(-5.0));
  CHECK(sol.primal[0] == doctest::Approx(-5.0));
  CHECK(sol.primal[1] == doctest::Approx(1.0));
}

TEST_CASE("degenerate model known to cycle under naive pricing terminates") {
  // Classic cycling example; the optimum is -0.05.
  lp::LpModel m(4);
  m.set_objective(0, -0.75);
  m.set_objective(1, 150.0);
  m.set_objective(2, -0.02);
  m.set_objective(3, 6.0);
  m.add_row({{0, 0.25}, {1, -60.0}, {2, -0.04}, {3, 9.0}},
            lp::Sense::LessEqual, 0.0);
  m.add_row({{0, 0.5}, {1, -90.0}, {2, -0.02}, {3, 3.0}},
            lp::Sense::LessEqual, 0.0);
  m.add_row({{2, 1.0}}, lp::Sense::LessEqual, 1.0);
  const auto sol = lp::solve(m);
  REQUIRE(sol.status == lp::Status::Optimal);
  CHECK(sol.objective == doctest::Approx(-0.05));
  CHECK(lp::verify_kkt(m, sol).ok());
}

TEST_CASE("model without rows") {
  lp::LpModel m(1);
  m.set_bounds(0, 1.0, 2.0);
  m.set_objective(0, 3.0);
  const auto sol = lp::solve(m);
  REQUIRE(sol.status == lp::Status::Optimal);
  CHECK(sol.objective == doctest::Approx(3.0));
}

static lp::LpModel routing_like_model() {
  // Small network-flow shaped LP with equality, capacity, and demand rows.
  lp::LpModel m(5);
  for (int j = 0; j < 5; ++j) m.set_objective(j, 1.0 + 0.1 * j);
  m.add_row({{0, 1.0}, {1, -1.0}, {2, 1.0}}, lp::Sense::Equal, 0.0);
  m.add_row({{2, 1.0}, {3, -1.0}}, lp::Sense::Equal, 0.0);
  m.add_row({{0, 1.0}}, lp::Sense::LessEqual, 4.0);
  m.add_row({{1, 1.0}}, lp::Sense::LessEqual, 3.0);
  m.add_row({{3, 1.0}, {4, 1.0}}, lp::Sense::GreaterEqual, 2.0);
  m.add_row({{4, 1.0}}, lp::Sense::LessEqual, 1.5);
  return m;
}

TEST_CASE("warm rhs resolve matches a cold solve across perturbations") {
  const lp::LpModel m = routing_like_model();
  const auto base = lp::solve(m);
  REQUIRE(base.status == lp::Status::Optimal);

  // Unchanged rhs: zero pivots, same objective.
  const auto same = lp::resolve_rhs(m, m.rhs_vector(), base.basis);
  CHECK(same.status == lp::Status::Optimal);
  CHECK(same.iterations == 0);
  CHECK(same.objective == doctest::Approx(base.objective));

  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> shift(-1.0, 3.0);
  int checked = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    lp::LpModel pert = m;
    Eigen::VectorXd rhs = m.rhs_vector();
    for (int r = 2; r < m.num_rows(); ++r) {  // keep balance rows at zero
      rhs[r] += shift(rng);
      pert.set_rhs(r, rhs[r]);
    }
    const auto cold = lp::solve(pert);
    const auto warm = lp::resolve_rhs(m, rhs, base.basis);
    REQUIRE(cold.status == warm.status);
    if (cold.status == lp::Status::Optimal) {
      CHECK(warm.objective ==
            doctest::Approx(cold.objective).epsilon(1e-9).scale(1.0));
      ++checked;
    }
  }
  CHECK(checked > 100);  // a healthy share of the perturbations stays feasible
}

TEST_CASE("warm basis from a smaller model seeds an extended one") {
  lp::LpModel m = routing_like_model();
  const auto base = lp::solve(m);
  REQUIRE(base.status == lp::Status::Optimal);
  m.add_row({{0, 1.0}, {3, 1.0}}, lp::Sense::LessEqual, 2.5);
  const auto warm = lp::solve(m, &base.basis);
  const auto cold = lp::solve(m);
  REQUIRE(warm.status == lp::Status::Optimal);
  CHECK(warm.objective == doctest::Approx(cold.objective));
}

TEST_CASE("rhs resolve validates shapes") {
  const lp::LpModel m = routing_like_model();
  const auto base = lp::solve(m);
  Eigen::VectorXd bad(m.num_rows() + 1);
  bad.setZero();
  CHECK_THROWS_AS(lp::resolve_rhs(m, bad, base.basis), std::invalid_argument);
  CHECK_THROWS_AS(lp::resolve_rhs(m, m.rhs_vector(), lp::Basis{}),
                  std::invalid_argument);
}

TEST_CASE("text dump mentions the shape") {
  std::ostringstream out;
  lp::write_lp_text(routing_like_model(), out);
  const std::string text = out.str();
  CHECK(text.find("min") != std::string::npos);
  CHECK_FALSE(text.empty());
}

TEST_SUITE_END();

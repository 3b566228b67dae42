#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <iosfwd>
#include <limits>
#include <utility>
#include <vector>

// Bounded-variable revised primal simplex over dense Eigen linear algebra.
// Minimization only; rows may be <=, =, or >=; variable bounds may be
// infinite. Solutions returned with status Optimal satisfy, by construction:
//   - primal residual <= 1e-7 per row and per bound,
//   - dual residual (reduced-cost sign) <= 1e-7,
//   - relative duality gap <= 1e-6.
namespace ccnd::lp {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Outcome tolerances promised on Optimal solutions and used by verify_kkt.
inline constexpr double kPrimalTol = 1e-7;
inline constexpr double kDualTol = 1e-7;
inline constexpr double kGapTol = 1e-6;

enum class Sense : std::uint8_t { LessEqual, Equal, GreaterEqual };
enum class Status : std::uint8_t { Optimal, Infeasible, Unbounded, IterationLimit };

const char* to_string(Status s);

struct Row {
  std::vector<std::pair<int, double>> coeffs;  // (variable id, value)
  Sense sense = Sense::LessEqual;
  double rhs = 0.0;
};

class LpModel {
 public:
  LpModel() = default;
  explicit LpModel(int num_vars)
      : objective_(Eigen::VectorXd::Zero(num_vars)),
        lower_(Eigen::VectorXd::Zero(num_vars)),
        upper_(Eigen::VectorXd::Constant(num_vars, kInf)) {}

  int num_vars() const { return static_cast<int>(objective_.size()); }
  int num_rows() const { return static_cast<int>(rows_.size()); }

  // Appends a variable with cost 0 and bounds [0, inf); returns its id.
  int add_var(double cost = 0.0, double lower = 0.0, double upper = kInf);

  void set_objective(int var, double cost) { objective_[var] = cost; }
  void set_bounds(int var, double lower, double upper);

  // Returns the new row's id. Coefficients must reference existing variables.
  int add_row(std::vector<std::pair<int, double>> coeffs, Sense sense, double rhs);
  void set_rhs(int row, double rhs) { rows_[row].rhs = rhs; }

  const Eigen::VectorXd& objective() const { return objective_; }
  const Eigen::VectorXd& lower() const { return lower_; }
  const Eigen::VectorXd& upper() const { return upper_; }
  const Row& row(int i) const { return rows_[i]; }
  const std::vector<Row>& rows() const { return rows_; }
  Eigen::VectorXd rhs_vector() const;

 private:
  Eigen::VectorXd objective_;
  Eigen::VectorXd lower_;
  Eigen::VectorXd upper_;
  std::vector<Row> rows_;
};

// Opaque warm-start token. Records the simplex status of every column of the
// computational form (structural variables followed by one logical per row).
// A basis from a model with fewer rows can seed a model extended with new
// rows; any other shape mismatch falls back to a cold start in solve() and is
// an error in resolve_rhs().
struct Basis {
  enum class VarStatus : std::uint8_t { Basic, AtLower, AtUpper, FreeNonbasic };
  std::vector<VarStatus> status;  // num_vars + num_rows entries
  std::vector<int> basic;         // column basic in each row position
  bool empty() const { return status.empty(); }
};

struct LpSolution {
  Status status = Status::IterationLimit;
  Eigen::VectorXd primal;  // structural variable values
  // One multiplier per row: >= 0 on GreaterEqual rows, <= 0 on LessEqual rows,
  // free on Equal rows.
  Eigen::VectorXd dual;
  double objective = 0.0;
  Basis basis;
  long iterations = 0;  // simplex pivots performed
};

// Solves min c'x subject to the model's rows and bounds. Deterministic:
// Dantzig pricing with lowest-index tie-breaking, switching to Bland's rule
// after 1000 consecutive degenerate pivots. The basis is refactorized every
// 100 pivots. Gives up with Status::IterationLimit after
// 10 * (num_rows + num_vars)^2 pivots.
LpSolution solve(const LpModel& model, const Basis* warm = nullptr);

// Re-solves after changing only right-hand sides, starting from `warm`.
// Throws std::invalid_argument if new_rhs or the basis shape does not match
// the model. With an unchanged rhs this returns the same solution in zero
// pivots.
LpSolution resolve_rhs(const LpModel& model, const Eigen::VectorXd& new_rhs,
                       const Basis& warm);

// Residual report for an Optimal solution; every field must come out within
// the advertised tolerances. Used by tests and by solve() itself.
struct KktReport {
  double primal_residual = 0.0;   // worst row/bound violation
  double dual_residual = 0.0;     // worst reduced-cost sign violation
  double duality_gap = 0.0;       // |primal obj - dual obj|, relative
  bool ok(double primal_tol = kPrimalTol, double dual_tol = kDualTol,
          double gap_tol = kGapTol) const {
    return primal_residual <= primal_tol && dual_residual <= dual_tol &&
           duality_gap <= gap_tol;
  }
};

KktReport verify_kkt(const LpModel& model, const LpSolution& sol);

// Plain-text dump (objective, rows, bounds) for debugging by eye.
void write_lp_text(const LpModel& model, std::ostream& out);

}  // namespace ccnd::lp

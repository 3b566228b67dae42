#include "ccnd/lp.hpp"

#include <Eigen/LU>
#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <ostream>
#include <stdexcept>

namespace ccnd::lp {

const char* to_string(Status s) {
  switch (s) {
    case Status::Optimal: return "optimal";
    case Status::Infeasible: return "infeasible";
    case Status::Unbounded: return "unbounded";
    case Status::IterationLimit: return "iteration_limit";
  }
  return "unknown";
}

int LpModel::add_var(double cost, double lower, double upper) {
  const int id = num_vars();
  auto grow = [](Eigen::VectorXd& v, double value) {
    v.conservativeResize(v.size() + 1);
    v[v.size() - 1] = value;
  };
  grow(objective_, cost);
  grow(lower_, lower);
  grow(upper_, upper);
  return id;
}

void LpModel::set_bounds(int var, double lower, double upper) {
  if (lower > upper)
    throw std::invalid_argument("variable lower bound above upper bound");
  lower_[var] = lower;
  upper_[var] = upper;
}

int LpModel::add_row(std::vector<std::pair<int, double>> coeffs, Sense sense,
                     double rhs) {
  for (const auto& [var, value] : coeffs) {
    if (var < 0 || var >= num_vars())
      throw std::invalid_argument("row references unknown variable");
    if (!std::isfinite(value))
      throw std::invalid_argument("row coefficient is not finite");
  }
  rows_.push_back(Row{std::move(coeffs), sense, rhs});
  return num_rows() - 1;
}

Eigen::VectorXd LpModel::rhs_vector() const {
  Eigen::VectorXd rhs(num_rows());
  for (int i = 0; i < num_rows(); ++i) rhs[i] = rows_[i].rhs;
  return rhs;
}

namespace {

using VarStatus = Basis::VarStatus;

// Internal tolerances, tighter than the advertised outcome tolerances so the
// promised residuals hold with headroom.
constexpr double kBoundTol = 1e-9;   // bound violation classification
constexpr double kPriceTol = 1e-9;   // reduced-cost significance
constexpr double kPivotSkip = 1e-9;  // smallest usable ratio-test pivot
constexpr double kEtaPivotFloor = 1e-7;  // below this, refactorize first
constexpr double kDegenStep = 1e-10;
constexpr long kBlandAfter = 1000;   // consecutive degenerate pivots
constexpr int kRefactorEvery = 100;  // pivots between refactorizations

double bound_tol(double bound) {
  return kBoundTol * (1.0 + std::abs(bound));
}

// Computational form: structural variables 0..n-1 followed by one logical
// variable per row. Row i holds  a_i'x + s_i = rhs_i  with s_i bounded by the
// row sense: [0, inf) for <=, [0, 0] for =, (-inf, 0] for >=.
class Simplex {
 public:
  explicit Simplex(const LpModel& model) : model_(model) {
    n_ = model.num_vars();
    m_ = model.num_rows();
    total_ = n_ + m_;

    cols_.resize(n_);
    for (int i = 0; i < m_; ++i)
      for (const auto& [var, value] : model.row(i).coeffs)
        if (value != 0.0) cols_[var].push_back({i, value});

    cost_ = Eigen::VectorXd::Zero(total_);
    cost_.head(n_) = model.objective();
    lower_.resize(total_);
    upper_.resize(total_);
    lower_.head(n_) = model.lower();
    upper_.head(n_) = model.upper();
    rhs_ = model.rhs_vector();
    for (int i = 0; i < m_; ++i) {
      switch (model.row(i).sense) {
        case Sense::LessEqual:
          lower_[n_ + i] = 0.0;
          upper_[n_ + i] = kInf;
          break;
        case Sense::Equal:
          lower_[n_ + i] = 0.0;
          upper_[n_ + i] = 0.0;
          break;
        case Sense::GreaterEqual:
          lower_[n_ + i] = -kInf;
          upper_[n_ + i] = 0.0;
          break;
      }
    }
  }

  LpSolution run(const Basis* warm) {
    init_basis(warm);
    if (!factorized_) factorize();
    compute_basic_values();
    fresh_point_ = true;

    const long limit =
        10L * static_cast<long>(m_ + n_) * static_cast<long>(m_ + n_);
    Status status = Status::IterationLimit;

    while (true) {
      if (pivots_ >= limit) {
        status = Status::IterationLimit;
        break;
      }
      const bool phase1 = has_infeasible_basic();
      const Eigen::VectorXd y = pricing_duals(phase1);
      const auto [entering, sig] = price(y, phase1);
      if (entering < 0) {
        // Claimed optimal (or proven infeasible); confirm on fresh numbers.
        if (!fresh_point_) {
          refresh();
          continue;
        }
        status = phase1 ? Status::Infeasible : Status::Optimal;
        break;
      }

      const Eigen::VectorXd d = ftran(column_dense(entering));
      const RatioResult rt = ratio_test(entering, sig, d);
      if (rt.kind == RatioResult::kNone) {
        if (!fresh_point_) {
          refresh();
          continue;
        }
        // In phase 1 total infeasibility is bounded below, so an unblocked
        // ray cannot be real; give up rather than loop.
        status = phase1 ? Status::IterationLimit : Status::Unbounded;
        break;
      }
      if (rt.kind == RatioResult::kStalePivot) {
        refresh();
        continue;
      }

      apply_pivot(entering, sig, d, rt);
      ++pivots_;
      fresh_point_ = false;
      if (rt.step <= kDegenStep) {
        if (++degen_streak_ >= kBlandAfter) bland_ = true;
      } else {
        degen_streak_ = 0;
        bland_ = false;
      }
      if (static_cast<int>(etas_.size()) >= kRefactorEvery) refresh();
    }

    return assemble(status);
  }

 private:
  struct Eta {
    int r;
    Eigen::VectorXd d;
  };

  struct RatioResult {
    enum Kind { kNone, kBasicLeaves, kBoundFlip, kStalePivot };
    Kind kind = kNone;
    double step = 0.0;
    int blocking = -1;          // basis position when kBasicLeaves
    bool hits_upper = false;    // which bound the leaving variable reaches
  };

  // --- basis construction -------------------------------------------------

  void init_basis(const Basis* warm) {
    if (warm && load_warm(*warm)) return;
    cold_start();
  }

  void cold_start() {
    vstat_.assign(total_, VarStatus::AtLower);
    for (int j = 0; j < n_; ++j) vstat_[j] = nonbasic_home(j);
    basic_.resize(m_);
    for (int i = 0; i < m_; ++i) {
      basic_[i] = n_ + i;
      vstat_[n_ + i] = VarStatus::Basic;
    }
  }

  VarStatus nonbasic_home(int j) const {
    const bool lo = std::isfinite(lower_[j]);
    const bool hi = std::isfinite(upper_[j]);
    if (lo && hi)
      return std::abs(lower_[j]) <= std::abs(upper_[j]) ? VarStatus::AtLower
                                                        : VarStatus::AtUpper;
    if (lo) return VarStatus::AtLower;
    if (hi) return VarStatus::AtUpper;
    return VarStatus::FreeNonbasic;
  }

  bool load_warm(const Basis& warm) {
    const int w_total = static_cast<int>(warm.status.size());
    const int w_rows = static_cast<int>(warm.basic.size());
    if (w_total != n_ + w_rows || w_rows > m_) return false;
    for (int b : warm.basic)
      if (b < 0 || b >= w_total || warm.status[b] != VarStatus::Basic)
        return false;
    int basic_count = 0;
    for (VarStatus s : warm.status)
      if (s == VarStatus::Basic) ++basic_count;
    if (basic_count != w_rows) return false;

    vstat_ = warm.status;
    basic_ = warm.basic;
    // Rows appended since the basis was taken: their logicals enter basic.
    for (int i = w_rows; i < m_; ++i) {
      vstat_.push_back(VarStatus::Basic);
      basic_.push_back(n_ + i);
    }
    // Re-home nonbasic variables whose recorded status no longer matches the
    // current bounds (bound changes between solves, e.g. branching fixings).
    for (int j = 0; j < total_; ++j) {
      if (vstat_[j] == VarStatus::Basic) continue;
      if (vstat_[j] == VarStatus::AtLower && !std::isfinite(lower_[j]))
        vstat_[j] = nonbasic_home(j);
      else if (vstat_[j] == VarStatus::AtUpper && !std::isfinite(upper_[j]))
        vstat_[j] = nonbasic_home(j);
      else if (vstat_[j] == VarStatus::FreeNonbasic &&
               (std::isfinite(lower_[j]) || std::isfinite(upper_[j])))
        vstat_[j] = nonbasic_home(j);
    }
    if (!try_factorize()) {
      cold_start();
      return true;
    }
    factorized_ = true;
    return true;
  }

  // --- factorization and solves -------------------------------------------

  void factorize() {
    if (!try_factorize())
      throw std::logic_error("simplex basis is singular");
    factorized_ = true;
  }

  // The basis is factorized in reduced form: logical columns are unit vectors,
  // so only the structural block restricted to the rows no basic logical
  // covers needs a dense LU. All snapshot vectors are frozen at factorization
  // time; later pivots are represented by the eta chain on top of them.
  bool try_factorize() {
    etas_.clear();
    struct_pos_.clear();
    logical_pos_.clear();
    covered_row_.clear();
    free_row_.clear();
    row_to_free_.assign(m_, -1);
    std::vector<char> covered(m_, 0);
    for (int i = 0; i < m_; ++i) {
      const int b = basic_[i];
      if (b >= n_) {
        logical_pos_.push_back(i);
        covered_row_.push_back(b - n_);
        covered[b - n_] = 1;
      } else {
        struct_pos_.push_back(i);
      }
    }
    for (int row = 0; row < m_; ++row) {
      if (!covered[row]) {
        row_to_free_[row] = static_cast<int>(free_row_.size());
        free_row_.push_back(row);
      }
    }
    const int k = static_cast<int>(struct_pos_.size());
    core_dim_ = k;
    if (m_ == 0 || k == 0) return true;
    Eigen::MatrixXd core = Eigen::MatrixXd::Zero(k, k);
    covered_block_.setZero(static_cast<int>(covered_row_.size()), k);
    std::vector<int> row_to_covered(m_, -1);
    for (int i = 0; i < static_cast<int>(covered_row_.size()); ++i)
      row_to_covered[covered_row_[i]] = i;
    for (int j = 0; j < k; ++j) {
      for (const auto& [row, value] : cols_[basic_[struct_pos_[j]]]) {
        const int fr = row_to_free_[row];
        if (fr >= 0) core(fr, j) = value;
        else covered_block_(row_to_covered[row], j) = value;
      }
    }
    core_lu_.compute(core);
    const Eigen::VectorXd diag = core_lu_.matrixLU().diagonal().cwiseAbs();
    const double scale = std::max(1.0, diag.maxCoeff());
    return diag.minCoeff() > 1e-13 * scale;
  }

  // Solve B0 x = r against the factorization snapshot.
  Eigen::VectorXd base_solve(const Eigen::VectorXd& r) const {
    Eigen::VectorXd x(m_);
    const int k = core_dim_;
    Eigen::VectorXd xs;
    if (k > 0) {
      Eigen::VectorXd rs(k);
      for (int t = 0; t < k; ++t) rs[t] = r[free_row_[t]];
      xs = core_lu_.solve(rs);
      for (int j = 0; j < k; ++j) x[struct_pos_[j]] = xs[j];
    }
    for (int i = 0; i < static_cast<int>(logical_pos_.size()); ++i) {
      double v = r[covered_row_[i]];
      if (k > 0) v -= covered_block_.row(i).dot(xs);
      x[logical_pos_[i]] = v;
    }
    return x;
  }

  // Solve B0^T y = c against the factorization snapshot.
  Eigen::VectorXd base_solve_transpose(const Eigen::VectorXd& c) const {
    Eigen::VectorXd y(m_);
    const int k = core_dim_;
    const int nl = static_cast<int>(logical_pos_.size());
    Eigen::VectorXd ycov(nl);
    for (int i = 0; i < nl; ++i) {
      y[covered_row_[i]] = c[logical_pos_[i]];
      ycov[i] = c[logical_pos_[i]];
    }
    if (k > 0) {
      Eigen::VectorXd rhs(k);
      for (int j = 0; j < k; ++j) rhs[j] = c[struct_pos_[j]];
      if (nl > 0) rhs -= covered_block_.transpose() * ycov;
      // core = P^{-1} L U, so core^T y = U^T L^T P y = rhs.
      const auto& LU = core_lu_.matrixLU();
      Eigen::VectorXd z =
          LU.template triangularView<Eigen::Upper>().transpose().solve(rhs);
      LU.template triangularView<Eigen::UnitLower>().transpose().solveInPlace(
          z);
      z = core_lu_.permutationP().inverse() * z;
      for (int t = 0; t < k; ++t) y[free_row_[t]] = z[t];
    }
    return y;
  }

  void refresh() {
    factorize();
    compute_basic_values();
    fresh_point_ = true;
  }

  Eigen::VectorXd ftran(Eigen::VectorXd v) const {
    if (m_ == 0) return v;
    Eigen::VectorXd x = base_solve(v);
    for (const Eta& e : etas_) {
      const double xr = x[e.r] / e.d[e.r];
      x -= xr * e.d;
      x[e.r] = xr;
    }
    return x;
  }

  Eigen::VectorXd btran(Eigen::VectorXd c) const {
    if (m_ == 0) return c;
    for (auto it = etas_.rbegin(); it != etas_.rend(); ++it) {
      const double cr = (c[it->r] - c.dot(it->d) + c[it->r] * it->d[it->r]) /
                        it->d[it->r];
      c[it->r] = cr;
    }
    return base_solve_transpose(c);
  }

  Eigen::VectorXd column_dense(int j) const {
    Eigen::VectorXd a = Eigen::VectorXd::Zero(m_);
    if (j >= n_) {
      a[j - n_] = 1.0;
    } else {
      for (const auto& [row, value] : cols_[j]) a[row] = value;
    }
    return a;
  }

  double nonbasic_value(int j) const {
    switch (vstat_[j]) {
      case VarStatus::AtLower: return lower_[j];
      case VarStatus::AtUpper: return upper_[j];
      default: return 0.0;
    }
  }

  void compute_basic_values() {
    Eigen::VectorXd r = rhs_;
    for (int j = 0; j < total_; ++j) {
      if (vstat_[j] == VarStatus::Basic) continue;
      const double v = nonbasic_value(j);
      if (v == 0.0) continue;
      if (j >= n_) {
        r[j - n_] -= v;
      } else {
        for (const auto& [row, value] : cols_[j]) r[row] -= value * v;
      }
    }
    xB_ = ftran(std::move(r));
  }

  // --- pricing --------------------------------------------------------------

  bool has_infeasible_basic() const {
    for (int i = 0; i < m_; ++i) {
      const int b = basic_[i];
      if (xB_[i] > upper_[b] + bound_tol(upper_[b]) ||
          xB_[i] < lower_[b] - bound_tol(lower_[b]))
        return true;
    }
    return false;
  }

  Eigen::VectorXd pricing_duals(bool phase1) const {
    Eigen::VectorXd cB(m_);
    for (int i = 0; i < m_; ++i) {
      const int b = basic_[i];
      if (phase1) {
        if (xB_[i] > upper_[b] + bound_tol(upper_[b]))
          cB[i] = 1.0;
        else if (xB_[i] < lower_[b] - bound_tol(lower_[b]))
          cB[i] = -1.0;
        else
          cB[i] = 0.0;
      } else {
        cB[i] = cost_[b];
      }
    }
    return btran(std::move(cB));
  }

  double reduced_cost(int j, const Eigen::VectorXd& y, bool phase1) const {
    double r = phase1 ? 0.0 : cost_[j];
    if (j >= n_) {
      r -= y[j - n_];
    } else {
      for (const auto& [row, value] : cols_[j]) r -= y[row] * value;
    }
    return r;
  }

  // Returns {entering column, direction} or {-1, 0}.
  std::pair<int, int> price(const Eigen::VectorXd& y, bool phase1) const {
    int best = -1;
    int best_dir = 0;
    double best_score = kPriceTol;
    for (int j = 0; j < total_; ++j) {
      const VarStatus st = vstat_[j];
      if (st == VarStatus::Basic) continue;
      if (upper_[j] - lower_[j] <= 0.0) continue;  // fixed, cannot move
      const double r = reduced_cost(j, y, phase1);
      int dir = 0;
      if (st == VarStatus::AtLower) {
        if (r < -kPriceTol) dir = 1;
      } else if (st == VarStatus::AtUpper) {
        if (r > kPriceTol) dir = -1;
      } else {  // free at zero
        if (r < -kPriceTol) dir = 1;
        else if (r > kPriceTol) dir = -1;
      }
      if (dir == 0) continue;
      if (bland_) return {j, dir};  // lowest index wins outright
      const double score = std::abs(r);
      if (score > best_score) {
        best = j;
        best_dir = dir;
        best_score = score;
      }
    }
    return {best, best_dir};
  }

  // --- ratio test -----------------------------------------------------------

  RatioResult ratio_test(int entering, int sig, const Eigen::VectorXd& d) const {
    RatioResult out;
    double best_t = kInf;
    double best_pivot = 0.0;
    int best_pos = -1;
    bool best_upper = false;

    for (int i = 0; i < m_; ++i) {
      const double di = d[i];
      if (std::abs(di) <= kPivotSkip) continue;
      const double delta = -sig * di;  // basic value change per unit step
      const int b = basic_[i];
      const double x = xB_[i];
      const double lo = lower_[b];
      const double hi = upper_[b];
      double t;
      bool hits_upper;
      if (x > hi + bound_tol(hi)) {
        if (delta >= 0.0) continue;  // moving further out is allowed
        t = (x - hi) / (-delta);
        hits_upper = true;
      } else if (x < lo - bound_tol(lo)) {
        if (delta <= 0.0) continue;
        t = (lo - x) / delta;
        hits_upper = false;
      } else if (delta > 0.0) {
        if (!std::isfinite(hi)) continue;
        t = (hi - x) / delta;
        hits_upper = true;
      } else {
        if (!std::isfinite(lo)) continue;
        t = (x - lo) / (-delta);
        hits_upper = false;
      }
      if (t < 0.0) t = 0.0;

      bool take = false;
      if (t < best_t - 1e-12) {
        take = true;
      } else if (t <= best_t + 1e-12 && best_pos >= 0) {
        // Tied steps: Bland's rule wants the lowest leaving index, otherwise
        // prefer the larger pivot element for stability.
        take = bland_ ? basic_[i] < basic_[best_pos]
                      : std::abs(di) > best_pivot ||
                            (std::abs(di) == best_pivot &&
                             basic_[i] < basic_[best_pos]);
      }
      if (take) {
        best_t = t;
        best_pos = i;
        best_pivot = std::abs(di);
        best_upper = hits_upper;
      }
    }

    // The entering variable may also stop at its own opposite bound.
    const double v0 = nonbasic_value(entering);
    const double own_limit =
        sig > 0 ? upper_[entering] - v0 : v0 - lower_[entering];
    if (std::isfinite(own_limit) && own_limit < best_t - 1e-12) {
      out.kind = RatioResult::kBoundFlip;
      out.step = std::max(0.0, own_limit);
      return out;
    }

    if (best_pos < 0) {
      if (std::isfinite(own_limit)) {
        out.kind = RatioResult::kBoundFlip;
        out.step = std::max(0.0, own_limit);
        return out;
      }
      out.kind = RatioResult::kNone;
      return out;
    }
    if (best_pivot < kEtaPivotFloor && !etas_.empty()) {
      out.kind = RatioResult::kStalePivot;
      return out;
    }
    out.kind = RatioResult::kBasicLeaves;
    out.step = best_t;
    out.blocking = best_pos;
    out.hits_upper = best_upper;
    return out;
  }

  void apply_pivot(int entering, int sig, const Eigen::VectorXd& d,
                   const RatioResult& rt) {
    const double t = rt.step;
    const double v0 = nonbasic_value(entering);
    xB_ -= (sig * t) * d;
    if (rt.kind == RatioResult::kBoundFlip) {
      vstat_[entering] = sig > 0 ? VarStatus::AtUpper : VarStatus::AtLower;
      return;
    }
    const int leaving = basic_[rt.blocking];
    vstat_[leaving] = rt.hits_upper ? VarStatus::AtUpper : VarStatus::AtLower;
    vstat_[entering] = VarStatus::Basic;
    basic_[rt.blocking] = entering;
    xB_[rt.blocking] = v0 + sig * t;
    etas_.push_back(Eta{rt.blocking, d});
  }

  // --- solution assembly -----------------------------------------------------

  LpSolution assemble(Status status) {
    LpSolution sol;
    sol.status = status;
    sol.iterations = pivots_;

    sol.primal.resize(n_);
    std::vector<int> pos(total_, -1);
    for (int i = 0; i < m_; ++i) pos[basic_[i]] = i;
    for (int j = 0; j < n_; ++j)
      sol.primal[j] = pos[j] >= 0 ? xB_[pos[j]] : nonbasic_value(j);
    sol.objective = model_.objective().dot(sol.primal);

    sol.basis.status = vstat_;
    sol.basis.basic = basic_;

    sol.dual = Eigen::VectorXd::Zero(m_);
    if (status == Status::Optimal && m_ > 0) {
      sol.dual = pricing_duals(/*phase1=*/false);
      // Clip dust to exact zero so row duals carry clean signs.
      for (int i = 0; i < m_; ++i)
        if (std::abs(sol.dual[i]) <= 1e-9) sol.dual[i] = 0.0;
      const KktReport kkt = verify_kkt(model_, sol);
      if (!kkt.ok())
        throw std::logic_error("simplex returned optimal with bad residuals");
    }
    return sol;
  }

  const LpModel& model_;
  int n_ = 0, m_ = 0, total_ = 0;
  std::vector<std::vector<std::pair<int, double>>> cols_;
  Eigen::VectorXd cost_, lower_, upper_, rhs_;

  std::vector<VarStatus> vstat_;
  std::vector<int> basic_;
  Eigen::VectorXd xB_;
  Eigen::PartialPivLU<Eigen::MatrixXd> core_lu_;
  Eigen::MatrixXd covered_block_;
  std::vector<int> struct_pos_;
  std::vector<int> logical_pos_;
  std::vector<int> covered_row_;
  std::vector<int> free_row_;
  std::vector<int> row_to_free_;
  int core_dim_ = 0;
  std::vector<Eta> etas_;
  bool factorized_ = false;
  bool fresh_point_ = false;

  long pivots_ = 0;
  long degen_streak_ = 0;
  bool bland_ = false;
};

}  // namespace

LpSolution solve(const LpModel& model, const Basis* warm) {
  Simplex simplex(model);
  return simplex.run(warm);
}

LpSolution resolve_rhs(const LpModel& model, const Eigen::VectorXd& new_rhs,
                       const Basis& warm) {
  if (new_rhs.size() != model.num_rows())
    throw std::invalid_argument("rhs length does not match row count");
  if (static_cast<int>(warm.status.size()) !=
          model.num_vars() + model.num_rows() ||
      static_cast<int>(warm.basic.size()) != model.num_rows())
    throw std::invalid_argument("warm basis shape does not match model");
  LpModel copy = model;
  for (int i = 0; i < copy.num_rows(); ++i) copy.set_rhs(i, new_rhs[i]);
  return solve(copy, &warm);
}

KktReport verify_kkt(const LpModel& model, const LpSolution& sol) {
  KktReport report;
  const int n = model.num_vars();
  const int m = model.num_rows();
  const Eigen::VectorXd& x = sol.primal;
  const Eigen::VectorXd& y = sol.dual;

  auto scaled = [](double viol, double scale) {
    return viol / (1.0 + std::abs(scale));
  };

  for (int i = 0; i < m; ++i) {
    const Row& row = model.row(i);
    double ax = 0.0;
    for (const auto& [var, value] : row.coeffs) ax += value * x[var];
    double viol = 0.0;
    switch (row.sense) {
      case Sense::LessEqual: viol = std::max(0.0, ax - row.rhs); break;
      case Sense::GreaterEqual: viol = std::max(0.0, row.rhs - ax); break;
      case Sense::Equal: viol = std::abs(ax - row.rhs); break;
    }
    report.primal_residual =
        std::max(report.primal_residual, scaled(viol, row.rhs));
    // Row dual sign.
    double sign_viol = 0.0;
    if (row.sense == Sense::LessEqual) sign_viol = std::max(0.0, y[i]);
    if (row.sense == Sense::GreaterEqual) sign_viol = std::max(0.0, -y[i]);
    report.dual_residual = std::max(report.dual_residual, sign_viol);
  }
  for (int j = 0; j < n; ++j) {
    const double lo = model.lower()[j];
    const double hi = model.upper()[j];
    double viol = std::max(std::isfinite(lo) ? lo - x[j] : 0.0,
                           std::isfinite(hi) ? x[j] - hi : 0.0);
    report.primal_residual = std::max(
        report.primal_residual,
        scaled(std::max(0.0, viol), std::max(std::abs(lo), std::abs(hi))));
  }

  // Reduced costs; statuses tell which sign condition applies.
  Eigen::VectorXd r = model.objective();
  for (int i = 0; i < m; ++i)
    for (const auto& [var, value] : model.row(i).coeffs) r[var] -= y[i] * value;

  double dual_obj = y.dot(model.rhs_vector());
  const bool have_basis =
      static_cast<int>(sol.basis.status.size()) == n + m;
  for (int j = 0; j < n; ++j) {
    const double rc = r[j];
    const double scale = 1.0 + std::abs(model.objective()[j]);
    VarStatus st = Basis::VarStatus::Basic;
    if (have_basis) {
      st = sol.basis.status[j];
    } else {
      // Classify by position when no basis came along.
      const double lo = model.lower()[j];
      const double hi = model.upper()[j];
      if (std::isfinite(lo) && x[j] <= lo + 1e-6 * (1.0 + std::abs(lo)))
        st = Basis::VarStatus::AtLower;
      else if (std::isfinite(hi) && x[j] >= hi - 1e-6 * (1.0 + std::abs(hi)))
        st = Basis::VarStatus::AtUpper;
    }
    double viol = 0.0;
    switch (st) {
      case Basis::VarStatus::Basic:
      case Basis::VarStatus::FreeNonbasic:
        viol = std::abs(rc);
        break;
      case Basis::VarStatus::AtLower:
        viol = std::max(0.0, -rc);
        dual_obj += rc * x[j];
        break;
      case Basis::VarStatus::AtUpper:
        viol = std::max(0.0, rc);
        dual_obj += rc * x[j];
        break;
    }
    if (model.upper()[j] - model.lower()[j] <= 0.0) viol = 0.0;  // fixed var
    report.dual_residual = std::max(report.dual_residual, viol / scale);
  }

  report.duality_gap =
      std::abs(sol.objective - dual_obj) / (1.0 + std::abs(sol.objective));
  return report;
}

void write_lp_text(const LpModel& model, std::ostream& out) {
  out << "min";
  bool first = true;
  for (int j = 0; j < model.num_vars(); ++j) {
    const double c = model.objective()[j];
    if (c == 0.0) continue;
    out << (first ? " " : " + ") << c << " x" << j;
    first = false;
  }
  if (first) out << " 0";
  out << "\ns.t.\n";
  for (int i = 0; i < model.num_rows(); ++i) {
    const Row& row = model.row(i);
    out << "r" << i << ":";
    if (row.coeffs.empty()) out << " 0";
    bool lead = true;
    for (const auto& [var, value] : row.coeffs) {
      out << (lead ? " " : " + ") << value << " x" << var;
      lead = false;
    }
    switch (row.sense) {
      case Sense::LessEqual: out << " <= "; break;
      case Sense::Equal: out << " = "; break;
      case Sense::GreaterEqual: out << " >= "; break;
    }
    out << row.rhs << "\n";
  }
  out << "bounds\n";
  for (int j = 0; j < model.num_vars(); ++j)
    out << model.lower()[j] << " <= x" << j << " <= " << model.upper()[j]
        << "\n";
}

}  // namespace ccnd::lp

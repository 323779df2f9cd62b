#include "metro/lp.hpp"

#include <Eigen/Sparse>

#include "metro/basis_lu.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ostream>

namespace metro {

int LpProblem::add_var(double l, double h, double cost) {
  lo.push_back(l);
  hi.push_back(h);
  objective.push_back(cost);
  return n_vars++;
}

void LpProblem::add_row(std::vector<std::pair<int, double>> coeffs, double l,
                        double h) {
  rows.push_back(Row{std::move(coeffs), l, h});
}

namespace {

constexpr double kPivTol = 1e-9;

// METRO_LP_STATS=1 prints a per-solve cost breakdown to stderr.
struct LpStats {
  bool on = std::getenv("METRO_LP_STATS") != nullptr;
  double ftran_lu = 0, ftran_eta = 0, btran_lu = 0, btran_eta = 0;
  double pricing = 0, refactor = 0, ratio = 0;
  long etas_applied = 0, eta_entries = 0, refactors = 0, pivots = 0,
       bound_flips = 0, lu_nnz = 0;
  using clk = std::chrono::steady_clock;
  static double now() {
    return std::chrono::duration<double>(clk::now().time_since_epoch()).count();
  }
  void report(long iterations, int m, int n_cols) const {
    if (!on) return;
    std::fprintf(stderr,
                 "lp stats: m=%d n_cols=%d iters=%ld pivots=%ld flips=%ld "
                 "refactors=%ld\n"
                 "  ftran lu %.1fs eta %.1fs | btran lu %.1fs eta %.1fs | "
                 "pricing %.1fs ratio %.1fs refactor %.1fs\n"
                 "  etas applied %ld avg entries %.0f | avg lu nnz %.0f\n",
                 m, n_cols, iterations, pivots, bound_flips, refactors,
                 ftran_lu, ftran_eta, btran_lu, btran_eta, pricing, ratio,
                 refactor, etas_applied,
                 etas_applied ? (double)eta_entries / etas_applied : 0.0,
                 refactors ? (double)lu_nnz / refactors : 0.0);
  }
};

enum class VarState : unsigned char { Basic, AtLower, AtUpper, AtValue };

// Transformed pivot column excluding the pivot row. Columns of B^-1 a are
// often near-dense here (long difference-constraint chains), so wide supports
// are kept as a full vector and applied with dot/axpy instead of index walks.
struct Eta {
  int pivot_row;
  double pivot_value;
  std::vector<std::pair<int, double>> sparse;
  Eigen::VectorXd dense;  // size 0 when the sparse form is used

  void ftran_apply(Eigen::VectorXd& v) const {
    double piv = v[pivot_row] / pivot_value;
    if (piv != 0.0) {
      if (dense.size() > 0)
        v.noalias() -= piv * dense;
      else
        for (auto [i, w] : sparse) v[i] -= w * piv;
    }
    v[pivot_row] = piv;
  }

  void btran_apply(Eigen::VectorXd& v) const {
    double acc = v[pivot_row];
    if (dense.size() > 0) {
      acc -= dense.dot(v);  // dense[pivot_row] is zero by construction
    } else {
      for (auto [i, w] : sparse) acc -= w * v[i];
    }
    v[pivot_row] = acc / pivot_value;
  }
};

class Simplex {
 public:
  Simplex(const LpProblem& p, const SimplexOptions& opts)
      : p_(p), opts_(opts) {}
  ~Simplex() { stats_.report(iterations_, m_, n_cols_); }

  LpSolution run();

 private:
  void setup();
  bool try_warm_start();
  void cold_start();
  void refactorize();
  void recompute_basic_values();
  void ftran(Eigen::VectorXd& v) const;
  void btran(Eigen::VectorXd& v) const;
  // Returns -1 at optimality, otherwise the unbounded entering column.
  int iterate(const std::vector<double>& cost);
  bool pivot_step(int enter, int dir, const std::vector<double>& cost);
  void purify();
  double infeasibility_sum() const;

  const LpProblem& p_;
  SimplexOptions opts_;

  int n_ = 0;       // structural
  int m_ = 0;       // rows after empty-row removal
  int n_cols_ = 0;  // structural + logical + artificial
  std::vector<int> row_map_;  // kept row -> original row index

  std::vector<std::vector<std::pair<int, double>>> cols_;
  std::vector<double> clo_, chi_, val_;
  std::vector<VarState> state_;
  std::vector<int> basic_col_;  // per row
  std::vector<int> row_of_;     // per column, -1 if nonbasic

  std::vector<double> phase1_cost_, phase2_cost_;
  int n_artificial_ = 0;

  BasisLu lu_;
  std::vector<Eta> etas_;
  int pivots_since_refactor_ = 0;
  Eigen::VectorXd y_buf_, w_buf_;
  mutable std::vector<int> nz_buf_;
  mutable LpStats stats_;

  long iterations_ = 0;
  long max_iterations_ = 0;
  int degenerate_streak_ = 0;
  bool bland_ = false;
};

void Simplex::setup() {
  n_ = p_.n_vars;
  for (int i = 0; i < (int)p_.rows.size(); ++i) {
    const auto& r = p_.rows[i];
    if (r.lo > r.hi) throw InputError("row lower bound exceeds upper bound");
    if (r.coeffs.empty()) {
      if (r.lo > 0 || r.hi < 0)
        throw InfeasibleError("empty row with window excluding zero");
      continue;
    }
    row_map_.push_back(i);
  }
  m_ = (int)row_map_.size();

  cols_.assign(n_, {});
  clo_ = p_.lo;
  chi_ = p_.hi;
  for (int k = 0; k < m_; ++k) {
    for (auto [j, a] : p_.rows[row_map_[k]].coeffs) {
      if (j < 0 || j >= n_) throw InputError("row references unknown variable");
      if (!std::isfinite(a)) throw InputError("non-finite row coefficient");
      if (a != 0.0) cols_[j].push_back({k, a});
    }
  }
  // Logical variables: one per row, column -e_k, bounds = the row window.
  for (int k = 0; k < m_; ++k) {
    cols_.push_back({{k, -1.0}});
    clo_.push_back(p_.rows[row_map_[k]].lo);
    chi_.push_back(p_.rows[row_map_[k]].hi);
  }
  n_cols_ = n_ + m_;
  val_.assign(n_cols_, 0.0);
  state_.assign(n_cols_, VarState::AtLower);
  row_of_.assign(n_cols_, -1);
  basic_col_.assign(m_, -1);

  for (int j = 0; j < n_; ++j)
    if (clo_[j] > chi_[j])
      throw InputError("variable lower bound exceeds upper bound");

  if (!(opts_.warm_start && try_warm_start())) cold_start();

  phase2_cost_.assign(n_cols_, 0.0);
  for (int j = 0; j < n_; ++j) phase2_cost_[j] = p_.objective[j];

  max_iterations_ = opts_.max_iterations > 0
                        ? opts_.max_iterations
                        : 50L * (n_cols_ + n_artificial_) + 10000;
  refactorize();
}

bool Simplex::try_warm_start() {
  const auto& x = *opts_.warm_start;
  if ((int)x.size() != n_) return false;
  for (int j = 0; j < n_; ++j)
    if (x[j] < clo_[j] - opts_.feas_tol || x[j] > chi_[j] + opts_.feas_tol)
      return false;
  std::vector<double> act(m_, 0.0);
  for (int j = 0; j < n_; ++j)
    for (auto [k, a] : cols_[j]) act[k] += a * x[j];
  for (int k = 0; k < m_; ++k)
    if (act[k] < clo_[n_ + k] - opts_.feas_tol ||
        act[k] > chi_[n_ + k] + opts_.feas_tol)
      return false;

  for (int j = 0; j < n_; ++j) {
    if (std::abs(x[j] - clo_[j]) <= 1e-9) {
      state_[j] = VarState::AtLower;
      val_[j] = clo_[j];
    } else if (std::abs(x[j] - chi_[j]) <= 1e-9) {
      state_[j] = VarState::AtUpper;
      val_[j] = chi_[j];
    } else {
      state_[j] = VarState::AtValue;
      val_[j] = x[j];
    }
  }
  for (int k = 0; k < m_; ++k) {
    int c = n_ + k;
    state_[c] = VarState::Basic;
    val_[c] = act[k];
    basic_col_[k] = c;
    row_of_[c] = k;
  }
  n_artificial_ = 0;
  phase1_cost_.clear();
  return true;
}

void Simplex::cold_start() {
  for (int j = 0; j < n_; ++j) {
    // Bound closest to zero; free variables start mid-range at zero.
    double l = clo_[j], h = chi_[j];
    if (std::isfinite(l) && (!std::isfinite(h) || std::abs(l) <= std::abs(h))) {
      val_[j] = l;
      state_[j] = VarState::AtLower;
    } else if (std::isfinite(h)) {
      val_[j] = h;
      state_[j] = VarState::AtUpper;
    } else {
      val_[j] = 0.0;
      state_[j] = VarState::AtValue;
    }
  }
  std::vector<double> act(m_, 0.0);
  for (int j = 0; j < n_; ++j)
    if (val_[j] != 0.0)
      for (auto [k, a] : cols_[j]) act[k] += a * val_[j];

  phase1_cost_.assign(n_cols_, 0.0);
  for (int k = 0; k < m_; ++k) {
    int lc = n_ + k;
    double rlo = clo_[lc], rhi = chi_[lc];
    double s = std::min(std::max(act[k], rlo), rhi);
    double resid = s - act[k];  // artificial value keeping the row balanced
    if (std::abs(resid) <= opts_.feas_tol) {
      state_[lc] = VarState::Basic;
      val_[lc] = act[k];
      basic_col_[k] = lc;
      row_of_[lc] = k;
    } else {
      state_[lc] = s == rlo ? VarState::AtLower : VarState::AtUpper;
      val_[lc] = s;
      int ac = (int)cols_.size();
      cols_.push_back({{k, +1.0}});
      if (resid > 0) {
        clo_.push_back(0.0);
        chi_.push_back(resid);
        phase1_cost_.push_back(+1.0);
      } else {
        clo_.push_back(resid);
        chi_.push_back(0.0);
        phase1_cost_.push_back(-1.0);
      }
      val_.push_back(resid);
      state_.push_back(VarState::Basic);
      row_of_.push_back(k);
      basic_col_[k] = ac;
      ++n_artificial_;
    }
  }
  n_cols_ = (int)cols_.size();
  phase1_cost_.resize(n_cols_, 0.0);
}

void Simplex::refactorize() {
  if (m_ == 0) {
    etas_.clear();
    pivots_since_refactor_ = 0;
    return;
  }
  double t0 = stats_.on ? LpStats::now() : 0;
  ++stats_.refactors;
  std::vector<Eigen::Triplet<double>> trips;
  for (int k = 0; k < m_; ++k)
    for (auto [r, a] : cols_[basic_col_[k]]) trips.push_back({r, k, a});
  Eigen::SparseMatrix<double> B(m_, m_);
  B.setFromTriplets(trips.begin(), trips.end());
  lu_.factorize(B);
  etas_.clear();
  pivots_since_refactor_ = 0;
  recompute_basic_values();
  if (stats_.on) {
    stats_.refactor += LpStats::now() - t0;
    stats_.lu_nnz += lu_.factor_nonzeros();
  }
}

void Simplex::recompute_basic_values() {
  if (m_ == 0) return;
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m_);
  for (int j = 0; j < n_cols_; ++j) {
    if (state_[j] == VarState::Basic || val_[j] == 0.0) continue;
    for (auto [k, a] : cols_[j]) rhs[k] -= a * val_[j];
  }
  lu_.solve(rhs);
  for (int k = 0; k < m_; ++k) val_[basic_col_[k]] = rhs[k];
}

void Simplex::ftran(Eigen::VectorXd& v) const {
  if (m_ == 0) return;
  double t0 = stats_.on ? LpStats::now() : 0;
  lu_.solve(v);
  double t1 = stats_.on ? LpStats::now() : 0;
  for (const auto& e : etas_) {
    e.ftran_apply(v);
    if (stats_.on) {
      ++stats_.etas_applied;
      stats_.eta_entries +=
          e.dense.size() > 0 ? e.dense.size() : (long)e.sparse.size();
    }
  }
  if (stats_.on) {
    stats_.ftran_lu += t1 - t0;
    stats_.ftran_eta += LpStats::now() - t1;
  }
}

void Simplex::btran(Eigen::VectorXd& v) const {
  if (m_ == 0) return;
  double t0 = stats_.on ? LpStats::now() : 0;
  if (!etas_.empty()) {
    // The eta sweep runs before the factor solve, on vectors that are still
    // sparse (pricing feeds the cost of the basic variables), and each eta
    // changes only its own pivot row. Tracking the nonzero set keeps the
    // dot products proportional to it instead of to m.
    nz_buf_.clear();
    for (int k = 0; k < m_; ++k)
      if (v[k] != 0.0) nz_buf_.push_back(k);
    if ((long)(nz_buf_.size() + etas_.size()) * 4 < (long)m_) {
      for (auto it = etas_.rbegin(); it != etas_.rend(); ++it) {
        int r = it->pivot_row;
        double acc = v[r];
        if (it->dense.size() > 0) {
          const double* w = it->dense.data();
          for (int p : nz_buf_) acc -= w[p] * v[p];
        } else {
          for (auto [i, w] : it->sparse) acc -= w * v[i];
        }
        acc /= it->pivot_value;
        if (v[r] == 0.0 && acc != 0.0) nz_buf_.push_back(r);
        v[r] = acc;
      }
    } else {
      for (auto it = etas_.rbegin(); it != etas_.rend(); ++it)
        it->btran_apply(v);
    }
  }
  double t1 = stats_.on ? LpStats::now() : 0;
  lu_.solve_transposed(v);
  if (stats_.on) {
    stats_.btran_eta += t1 - t0;
    stats_.btran_lu += LpStats::now() - t1;
  }
}

int Simplex::iterate(const std::vector<double>& cost) {
  while (true) {
    if (++iterations_ > max_iterations_)
      throw SolverError("simplex iteration limit exceeded");

    Eigen::VectorXd& y = y_buf_;
    y.resize(m_);
    for (int k = 0; k < m_; ++k) y[k] = cost[basic_col_[k]];
    btran(y);

    double t0 = stats_.on ? LpStats::now() : 0;
    int enter = -1, dir = 0;
    double best = opts_.opt_tol;
    for (int j = 0; j < n_cols_; ++j) {
      if (state_[j] == VarState::Basic) continue;
      if (clo_[j] == chi_[j]) continue;  // fixed
      double d = cost[j];
      for (auto [k, a] : cols_[j]) d -= y[k] * a;
      int cand_dir = 0;
      if (state_[j] == VarState::AtLower && d < -opts_.opt_tol)
        cand_dir = +1;
      else if (state_[j] == VarState::AtUpper && d > opts_.opt_tol)
        cand_dir = -1;
      else if (state_[j] == VarState::AtValue && std::abs(d) > opts_.opt_tol)
        cand_dir = d > 0 ? -1 : +1;
      if (cand_dir == 0) continue;
      if (bland_) {
        enter = j;
        dir = cand_dir;
        break;
      }
      if (std::abs(d) > best) {
        best = std::abs(d);
        enter = j;
        dir = cand_dir;
      }
    }
    if (stats_.on) stats_.pricing += LpStats::now() - t0;
    if (enter < 0) return -1;
    if (!pivot_step(enter, dir, cost)) return enter;  // unbounded
  }
}

bool Simplex::pivot_step(int enter, int dir, const std::vector<double>& cost) {
  (void)cost;
  Eigen::VectorXd& w = w_buf_;
  w.setZero(m_);
  for (auto [k, a] : cols_[enter]) w[k] = a;
  ftran(w);

  double t0 = stats_.on ? LpStats::now() : 0;
  std::vector<int> support;
  support.reserve(64);
  for (int k = 0; k < m_; ++k)
    if (std::abs(w[k]) > kPivTol) support.push_back(k);

  // Step length before the entering variable hits its own far bound.
  double t_best;
  if (dir > 0)
    t_best = std::isfinite(chi_[enter]) ? chi_[enter] - val_[enter] : kInf;
  else
    t_best = std::isfinite(clo_[enter]) ? val_[enter] - clo_[enter] : kInf;
  int leave_row = -1;
  bool leave_at_lower = false;

  for (int k : support) {
    int bc = basic_col_[k];
    double slope = dir * w[k];  // basic value moves by -slope * t
    double t;
    bool at_lower;
    if (slope > 0) {
      if (!std::isfinite(clo_[bc])) continue;
      t = (val_[bc] - clo_[bc]) / slope;
      at_lower = true;
    } else {
      if (!std::isfinite(chi_[bc])) continue;
      t = (chi_[bc] - val_[bc]) / (-slope);
      at_lower = false;
    }
    if (t < 0) t = 0;
    if (t < t_best - 1e-12 ||
        (t < t_best + 1e-12 && leave_row >= 0 && bc < basic_col_[leave_row])) {
      t_best = t;
      leave_row = k;
      leave_at_lower = at_lower;
    }
  }

  if (!std::isfinite(t_best)) return false;

  if (t_best <= 1e-9) {
    if (++degenerate_streak_ > 200) bland_ = true;
  } else {
    degenerate_streak_ = 0;
    bland_ = false;
  }

  for (int k : support) val_[basic_col_[k]] -= dir * t_best * w[k];
  val_[enter] += dir * t_best;
  if (stats_.on) stats_.ratio += LpStats::now() - t0;

  if (leave_row < 0) {
    // Bound flip: the entering variable reached its opposite bound.
    if (dir > 0) {
      val_[enter] = chi_[enter];
      state_[enter] = VarState::AtUpper;
    } else {
      val_[enter] = clo_[enter];
      state_[enter] = VarState::AtLower;
    }
    ++stats_.bound_flips;
    return true;
  }

  int leave_col = basic_col_[leave_row];
  val_[leave_col] = leave_at_lower ? clo_[leave_col] : chi_[leave_col];
  state_[leave_col] = leave_at_lower ? VarState::AtLower : VarState::AtUpper;
  row_of_[leave_col] = -1;
  basic_col_[leave_row] = enter;
  row_of_[enter] = leave_row;
  state_[enter] = VarState::Basic;

  Eta e;
  e.pivot_row = leave_row;
  e.pivot_value = w[leave_row];
  if ((int)support.size() > m_ / 8) {
    e.dense = w;
    e.dense[leave_row] = 0.0;
    for (int k = 0; k < m_; ++k)
      if (std::abs(e.dense[k]) <= kPivTol) e.dense[k] = 0.0;
  } else {
    for (int k : support)
      if (k != leave_row) e.sparse.push_back({k, w[k]});
  }
  etas_.push_back(std::move(e));
  ++stats_.pivots;

  if (++pivots_since_refactor_ >= opts_.refactor_interval) refactorize();
  return true;
}

void Simplex::purify() {
  // Drive interior-valued nonbasic variables to a bound or into the basis;
  // their reduced costs are zero at optimality, so the objective is kept.
  for (int j = 0; j < n_cols_; ++j) {
    while (state_[j] == VarState::AtValue) {
      int dir = std::isfinite(clo_[j]) ? -1 : +1;
      if (!pivot_step(j, dir, phase2_cost_)) {
        if (!pivot_step(j, -dir, phase2_cost_))
          throw SolverError("purification found an unbounded line");
      }
    }
  }
}

double Simplex::infeasibility_sum() const {
  double s = 0;
  for (int j = n_ + m_; j < n_cols_; ++j) s += std::abs(val_[j]);
  return s;
}

LpSolution Simplex::run() {
  setup();
  LpSolution sol;

  if (n_artificial_ > 0) {
    int unb = iterate(phase1_cost_);
    if (unb >= 0) throw SolverError("phase one reported unbounded");
    if (infeasibility_sum() > opts_.feas_tol * (1 + m_ * 1e-3)) {
      sol.status = LpStatus::Infeasible;
      for (int j = n_ + m_; j < n_cols_; ++j)
        if (std::abs(val_[j]) > opts_.feas_tol) {
          sol.certificate = row_map_[cols_[j].front().first];
          break;
        }
      sol.iterations = iterations_;
      return sol;
    }
    for (int j = n_ + m_; j < n_cols_; ++j) {
      clo_[j] = chi_[j] = 0.0;
      if (state_[j] != VarState::Basic) {
        state_[j] = VarState::AtLower;
        val_[j] = 0.0;
      }
    }
    refactorize();
  }

  int unb = iterate(phase2_cost_);
  if (unb >= 0) {
    sol.status = LpStatus::Unbounded;
    sol.certificate = unb < n_ ? unb : -1;
    sol.iterations = iterations_;
    return sol;
  }
  purify();
  refactorize();  // clean values before extraction

  sol.status = LpStatus::Optimal;
  sol.x.assign(n_, 0.0);
  double obj = 0;
  for (int j = 0; j < n_; ++j) {
    sol.x[j] = val_[j];
    obj += p_.objective[j] * val_[j];
  }
  sol.objective_value = obj;
  sol.is_vertex = true;
  sol.iterations = iterations_;

  // Final feasibility audit.
  for (int j = 0; j < n_; ++j)
    if (sol.x[j] < clo_[j] - 1e-6 || sol.x[j] > chi_[j] + 1e-6)
      throw SolverError("solution violates a variable bound");
  for (int k = 0; k < m_; ++k) {
    double act = 0;
    for (auto [j, a] : p_.rows[row_map_[k]].coeffs) act += a * sol.x[j];
    double tol = 1e-6 * (1 + std::abs(act));
    if (act < p_.rows[row_map_[k]].lo - tol ||
        act > p_.rows[row_map_[k]].hi + tol)
      throw SolverError("solution violates a row window");
  }
  return sol;
}

}  // namespace

LpSolution solve(const LpProblem& problem, const SimplexOptions& opts) {
  if ((int)problem.lo.size() != problem.n_vars ||
      (int)problem.hi.size() != problem.n_vars ||
      (int)problem.objective.size() != problem.n_vars)
    throw InputError("LpProblem arrays disagree with n_vars");
  Simplex s(problem, opts);
  return s.run();
}

std::pair<bool, double> check_integrality(const LpSolution& sol, double tol) {
  double worst = 0;
  for (double v : sol.x)
    worst = std::max(worst, std::abs(v - std::round(v)));
  return {worst <= tol, worst};
}

void dump(const LpProblem& p, std::ostream& os) {
  os << "lp " << p.n_vars << ' ' << p.rows.size() << "\n";
  os << "bounds\n";
  for (int j = 0; j < p.n_vars; ++j)
    os << j << ' ' << p.lo[j] << ' ' << p.hi[j] << '\n';
  os << "rows\n";
  for (const auto& r : p.rows) {
    os << r.lo << ' ' << r.hi;
    for (auto [j, a] : r.coeffs) os << ' ' << j << ':' << a;
    os << '\n';
  }
  os << "objective\n";
  for (int j = 0; j < p.n_vars; ++j)
    if (p.objective[j] != 0.0) os << j << ':' << p.objective[j] << ' ';
  os << '\n';
}

}  // namespace metro

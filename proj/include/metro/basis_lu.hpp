#ifndef METRO_BASIS_LU_HPP
#define METRO_BASIS_LU_HPP

#include <Eigen/Sparse>

#include <vector>

namespace metro {

// Sparse LU factorization tuned for simplex bases: left-looking
// Gilbert-Peierls elimination with partial pivoting and a COLAMD column
// preorder. The factors are kept as flat CSC arrays in pivot order, so the
// four triangular substitutions (plain and transposed) are tight loops with
// no supernodal bookkeeping - simplex bases here are near-triangular and the
// per-solve overhead dominates the arithmetic.
class BasisLu {
 public:
  // Factorizes the square matrix; throws SolverError when numerically
  // singular.
  void factorize(const Eigen::SparseMatrix<double>& B);

  // In-place B x = v and B^T x = v against the last factorization.
  void solve(Eigen::VectorXd& v) const;
  void solve_transposed(Eigen::VectorXd& v) const;

  long factor_nonzeros() const {
    return (long)(l_val_.size() + u_val_.size()) + m_;
  }

 private:
  int m_ = 0;
  // Unit lower factor, off-diagonal entries only, rows in pivot order.
  std::vector<int> l_ptr_, l_row_;
  std::vector<double> l_val_;
  // Upper factor without the diagonal; u_diag_ holds the pivots.
  std::vector<int> u_ptr_, u_row_;
  std::vector<double> u_val_;
  std::vector<double> u_diag_;
  std::vector<int> prow_;  // pivot position -> original row
  std::vector<int> pcol_;  // pivot position -> original column
  mutable std::vector<double> work_;
};

}  // namespace metro

#endif  // METRO_BASIS_LU_HPP

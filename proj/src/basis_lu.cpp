#include "metro/basis_lu.hpp"

#include <Eigen/OrderingMethods>

#include <cmath>
#include <cstdlib>

#include "metro/network.hpp"

namespace metro {

void BasisLu::factorize(const Eigen::SparseMatrix<double>& B) {
  if (B.rows() != B.cols()) throw SolverError("basis matrix is not square");
  m_ = (int)B.rows();
  l_ptr_.assign(1, 0);
  l_row_.clear();
  l_val_.clear();
  u_ptr_.assign(1, 0);
  u_row_.clear();
  u_val_.clear();
  u_diag_.assign(m_, 0.0);
  prow_.assign(m_, -1);
  pcol_.assign(m_, -1);
  if (m_ == 0) return;

  Eigen::COLAMDOrdering<int> colamd;
  Eigen::PermutationMatrix<Eigen::Dynamic, Eigen::Dynamic, int> perm;
  colamd(B, perm);
  // perm is meant as a right-multiplication B * perm; processing its columns
  // in order reproduces that fill-reducing sequence.
  std::vector<int> order(m_);
  for (int p = 0; p < m_; ++p) order[perm.indices()(p)] = p;

  std::vector<int> pinv(m_, -1);       // original row -> pivot position
  std::vector<double> x(m_, 0.0);      // dense accumulator
  std::vector<int> mark(m_, -1);       // DFS visit stamp per column
  std::vector<int> stack(m_), child(m_), topo(m_);

  const int* outer = B.outerIndexPtr();
  const int* inner = B.innerIndexPtr();
  const double* vals = B.valuePtr();

  for (int jj = 0; jj < m_; ++jj) {
    int c = order[jj];

    // Reachable set of the column pattern over the partial L, in topological
    // order (iterative depth-first search, CSparse style).
    int top = m_;
    for (int p = outer[c]; p < outer[c + 1]; ++p) {
      int root = inner[p];
      if (mark[root] == jj) continue;
      int depth = 0;
      stack[0] = root;
      child[0] = pinv[root] >= 0 ? l_ptr_[pinv[root]] : -1;
      mark[root] = jj;
      while (depth >= 0) {
        int node = stack[depth];
        int k = pinv[node];
        int end = k >= 0 ? l_ptr_[k + 1] : -1;
        bool descended = false;
        while (child[depth] < end) {
          int r = l_row_[child[depth]++];
          if (mark[r] != jj) {
            mark[r] = jj;
            ++depth;
            stack[depth] = r;
            child[depth] = pinv[r] >= 0 ? l_ptr_[pinv[r]] : -1;
            descended = true;
            break;
          }
        }
        if (!descended) {
          topo[--top] = node;
          --depth;
        }
      }
    }

    for (int p = outer[c]; p < outer[c + 1]; ++p) x[inner[p]] = vals[p];

    // Sparse triangular solve with the partial L.
    for (int t = top; t < m_; ++t) {
      int i = topo[t];
      int k = pinv[i];
      if (k < 0) continue;
      double xi = x[i];
      if (xi != 0.0)
        for (int p = l_ptr_[k]; p < l_ptr_[k + 1]; ++p)
          x[l_row_[p]] -= l_val_[p] * xi;
    }

    // Partial pivoting over the rows that are still unassigned.
    int piv_row = -1;
    double piv_abs = 0.0;
    for (int t = top; t < m_; ++t) {
      int i = topo[t];
      if (pinv[i] >= 0) continue;
      double a = std::abs(x[i]);
      if (a > piv_abs) {
        piv_abs = a;
        piv_row = i;
      }
    }
    if (piv_row < 0 || piv_abs == 0.0)
      throw SolverError("basis factorization failed");
    double piv = x[piv_row];

    for (int t = top; t < m_; ++t) {
      int i = topo[t];
      double xi = x[i];
      x[i] = 0.0;
      if (xi == 0.0) continue;
      int k = pinv[i];
      if (k >= 0) {
        u_row_.push_back(k);
        u_val_.push_back(xi);
      } else if (i != piv_row) {
        l_row_.push_back(i);
        l_val_.push_back(xi / piv);
      }
    }
    u_diag_[jj] = piv;
    u_ptr_.push_back((int)u_row_.size());
    l_ptr_.push_back((int)l_row_.size());
    pinv[piv_row] = jj;
    prow_[jj] = piv_row;
    pcol_[jj] = c;
  }

  // Remap the lower factor's row indices to pivot positions so that the
  // substitutions run entirely in permuted space.
  for (auto& r : l_row_) r = pinv[r];
  work_.assign(m_, 0.0);
}

void BasisLu::solve(Eigen::VectorXd& v) const {
  for (int k = 0; k < m_; ++k) work_[k] = v[prow_[k]];
  for (int k = 0; k < m_; ++k) {
    double t = work_[k];
    if (t != 0.0)
      for (int p = l_ptr_[k]; p < l_ptr_[k + 1]; ++p)
        work_[l_row_[p]] -= l_val_[p] * t;
  }
  for (int k = m_ - 1; k >= 0; --k) {
    double t = work_[k] / u_diag_[k];
    work_[k] = t;
    if (t != 0.0)
      for (int p = u_ptr_[k]; p < u_ptr_[k + 1]; ++p)
        work_[u_row_[p]] -= u_val_[p] * t;
  }
  for (int k = 0; k < m_; ++k) v[pcol_[k]] = work_[k];
}

void BasisLu::solve_transposed(Eigen::VectorXd& v) const {
  for (int k = 0; k < m_; ++k) work_[k] = v[pcol_[k]];
  for (int k = 0; k < m_; ++k) {
    double t = work_[k];
    for (int p = u_ptr_[k]; p < u_ptr_[k + 1]; ++p)
      t -= u_val_[p] * work_[u_row_[p]];
    work_[k] = t / u_diag_[k];
  }
  for (int k = m_ - 1; k >= 0; --k) {
    double t = work_[k];
    for (int p = l_ptr_[k]; p < l_ptr_[k + 1]; ++p)
      t -= l_val_[p] * work_[l_row_[p]];
    work_[k] = t;
  }
  for (int k = 0; k < m_; ++k) v[prow_[k]] = work_[k];
}

}  // namespace metro

#include "t2qc/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <vector>

#include "t2qc/errors.hpp"

namespace t2qc {

EigenSym jacobi_eigensym(const Eigen::MatrixXd& a) {
    const int p = int(a.rows());
    if (a.cols() != p) throw DataError("jacobi_eigensym: matrix not square");
    Eigen::MatrixXd m = 0.5 * (a + a.transpose());
    Eigen::MatrixXd v = Eigen::MatrixXd::Identity(p, p);
    const double scale = std::max(m.norm(), 1e-300);

    auto off_norm = [&]() {
        double s = 0.0;
        for (int i = 0; i < p; ++i)
            for (int j = i + 1; j < p; ++j) s += 2.0 * m(i, j) * m(i, j);
        return std::sqrt(s);
    };

    for (int sweep = 0; sweep < 100 && off_norm() > 1e-12 * scale; ++sweep) {
        for (int i = 0; i < p - 1; ++i) {
            for (int j = i + 1; j < p; ++j) {
                const double apq = m(i, j);
                if (std::fabs(apq) <= 1e-300) continue;
                const double theta = (m(j, j) - m(i, i)) / (2.0 * apq);
                const double t = (theta >= 0 ? 1.0 : -1.0) /
                                 (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (int k = 0; k < p; ++k) {  // A <- A J
                    const double aki = m(k, i), akj = m(k, j);
                    m(k, i) = c * aki - s * akj;
                    m(k, j) = s * aki + c * akj;
                }
                for (int k = 0; k < p; ++k) {  // A <- J' A
                    const double aik = m(i, k), ajk = m(j, k);
                    m(i, k) = c * aik - s * ajk;
                    m(j, k) = s * aik + c * ajk;
                }
                m(i, j) = m(j, i) = 0.0;
                for (int k = 0; k < p; ++k) {  // V <- V J
                    const double vki = v(k, i), vkj = v(k, j);
                    v(k, i) = c * vki - s * vkj;
                    v(k, j) = s * vki + c * vkj;
                }
            }
        }
    }
    if (off_norm() > 1e-10 * scale)
        throw NumericError("jacobi_eigensym: no convergence in 100 sweeps");

    EigenSym out;
    out.values.resize(p);
    out.vectors.resize(p, p);
    std::vector<int> order(p);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](int x, int y) { return m(x, x) > m(y, y); });
    for (int k = 0; k < p; ++k) {
        out.values[k] = m(order[k], order[k]);
        Eigen::VectorXd col = v.col(order[k]);
        int imax = 0;
        col.cwiseAbs().maxCoeff(&imax);
        if (col[imax] < 0) col = -col;
        out.vectors.col(k) = col;
    }
    return out;
}

SpdSolver::SpdSolver(const Eigen::MatrixXd& s, double cond_limit) {
    if (s.rows() != s.cols()) throw DataError("SpdSolver: matrix not square");
    EigenSym es = jacobi_eigensym(s);
    const double lmax = es.values[0];
    const double lmin = es.values[es.values.size() - 1];
    if (!(lmin > 0.0))
        throw NumericError("covariance not positive definite (min eigenvalue " +
                           std::to_string(lmin) + ")");
    cond_ = lmax / lmin;
    if (cond_ > cond_limit) {
        std::ostringstream os;
        os << "covariance ill-conditioned (condition estimate " << cond_ << ")";
        throw NumericError(os.str());
    }
    llt_.compute(s);
    if (llt_.info() != Eigen::Success)
        throw NumericError("Cholesky factorization failed");
}

double SpdSolver::quad_form(const Eigen::VectorXd& d) const {
    return llt_.matrixL().solve(d).squaredNorm();
}

Eigen::VectorXd SpdSolver::solve(const Eigen::VectorXd& b) const {
    return llt_.solve(b);
}

Eigen::MatrixXd submatrix(const Eigen::MatrixXd& m, SignSubset subset) {
    const auto idx = subset_indices(subset);
    Eigen::MatrixXd out(idx.size(), idx.size());
    for (std::size_t r = 0; r < idx.size(); ++r)
        for (std::size_t c = 0; c < idx.size(); ++c) out(r, c) = m(idx[r], idx[c]);
    return out;
}

Eigen::VectorXd subvector(const Eigen::VectorXd& v, SignSubset subset) {
    const auto idx = subset_indices(subset);
    Eigen::VectorXd out(idx.size());
    for (std::size_t r = 0; r < idx.size(); ++r) out[r] = v[idx[r]];
    return out;
}

double min_eigen_ratio(const Eigen::MatrixXd& sym) {
    EigenSym es = jacobi_eigensym(sym);
    const double lmax = std::fabs(es.values[0]);
    if (lmax == 0.0) return 0.0;
    return es.values[es.values.size() - 1] / lmax;
}

}  // namespace t2qc

#pragma once

#include <Eigen/Dense>

#include "t2qc/errors.hpp"
#include "t2qc/rng.hpp"

namespace t2qc {

/// Multivariate normal sampler: x = mu + L z with L the lower Cholesky
/// factor of sigma and z iid standard normals from the stream.
class MvnSampler {
  public:
    MvnSampler(Eigen::VectorXd mu, const Eigen::MatrixXd& sigma)
        : mu_(std::move(mu)) {
        Eigen::LLT<Eigen::MatrixXd> llt(sigma);
        if (llt.info() != Eigen::Success)
            throw NumericError("mvn sampler: covariance not positive definite");
        l_ = llt.matrixL();
    }

    Eigen::VectorXd draw(Philox2x64& rng) const {
        Eigen::VectorXd z(mu_.size());
        for (int i = 0; i < z.size(); ++i) z[i] = rng.normal();
        return mu_ + l_ * z;
    }

    const Eigen::VectorXd& mu() const { return mu_; }
    const Eigen::MatrixXd& chol_l() const { return l_; }

  private:
    Eigen::VectorXd mu_;
    Eigen::MatrixXd l_;
};

inline Eigen::VectorXd mvn_sample(const Eigen::VectorXd& mu,
                                  const Eigen::MatrixXd& sigma, Philox2x64& rng) {
    return MvnSampler(mu, sigma).draw(rng);
}

}  // namespace t2qc

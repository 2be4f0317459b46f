#pragma once

#include <vector>

#include "dacnn/error.hpp"

namespace dacnn {

// Constants of the removable distortion-conditioned head. sigma_rbf is the
// head's own deviation, distinct from the blur deviation q.
struct RbfConfig {
    double p_max = 0.6;
    double p_min = 0.3;
    double a = 0.0;
    double b = 4.0;
    double A = 6.0;
    double sigma_rbf = 0.7;
    int K = 10;

    void validate() const;
};

// Linear interpolation of the target confidence: p_max at q = a down to
// p_min at q = b. Strictly decreasing in q.
double target_estimate(double q, const RbfConfig& cfg);

// zeta = ln(p*(K-1)) - ln(1-p); the logit whose one-hot softmax confidence
// equals p.
double center_from_target(double p, int K);

// p = exp(zeta) / (exp(zeta) + K - 1); inverse of center_from_target.
double logit_confidence(double zeta, int K);

// Element-wise A*exp(-(z_k - zeta)^2 / (2*sigma_rbf^2)).
std::vector<double> rbf_transform(const std::vector<double>& z, double zeta,
                                  const RbfConfig& cfg);

// Gradient of rbf_transform w.r.t. z; zeta is a constant.
std::vector<double> rbf_backward(const std::vector<double>& z, double zeta,
                                 const RbfConfig& cfg,
                                 const std::vector<double>& upstream);

}  // namespace dacnn

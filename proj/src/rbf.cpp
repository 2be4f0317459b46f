#include "dacnn/rbf.hpp"

#include <cmath>
#include <string>

namespace dacnn {

void RbfConfig::validate() const {
    if (!(0.0 < p_min && p_min < p_max && p_max < 1.0))
        throw ConfigError("require 0 < p_min < p_max < 1");
    if (!(a < b)) throw ConfigError("require a < b");
    if (!(A > 0.0)) throw ConfigError("require peak A > 0");
    if (!(sigma_rbf > 0.0)) throw ConfigError("require sigma_rbf > 0");
    if (K < 2) throw ConfigError("require K >= 2");
}

double target_estimate(double q, const RbfConfig& cfg) {
    if (q < cfg.a || q > cfg.b)
        throw QOutOfRange("q = " + std::to_string(q) + " outside [" +
                          std::to_string(cfg.a) + ", " + std::to_string(cfg.b) + "]");
    return cfg.p_max - (cfg.p_max - cfg.p_min) * (q - cfg.a) / (cfg.b - cfg.a);
}

double center_from_target(double p, int K) {
    if (!(p > 0.0 && p < 1.0))
        throw POutOfRange("p = " + std::to_string(p) + " outside (0, 1)");
    return std::log(p * (K - 1)) - std::log1p(-p);
}

double logit_confidence(double zeta, int K) {
    const double e = std::exp(zeta);
    return e / (e + (K - 1));
}

std::vector<double> rbf_transform(const std::vector<double>& z, double zeta,
                                  const RbfConfig& cfg) {
    const double inv2s2 = 1.0 / (2.0 * cfg.sigma_rbf * cfg.sigma_rbf);
    std::vector<double> g(z.size());
    for (std::size_t k = 0; k < z.size(); ++k) {
        const double d = z[k] - zeta;
        g[k] = cfg.A * std::exp(-d * d * inv2s2);
    }
    return g;
}

std::vector<double> rbf_backward(const std::vector<double>& z, double zeta,
                                 const RbfConfig& cfg,
                                 const std::vector<double>& upstream) {
    const double invs2 = 1.0 / (cfg.sigma_rbf * cfg.sigma_rbf);
    const std::vector<double> g = rbf_transform(z, zeta, cfg);
    std::vector<double> out(z.size());
    for (std::size_t k = 0; k < z.size(); ++k)
        out[k] = upstream[k] * g[k] * (-(z[k] - zeta) * invs2);
    return out;
}

}  // namespace dacnn

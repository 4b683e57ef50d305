#ifndef FFB_PARAMS_HPP
#define FFB_PARAMS_HPP

#include <cmath>
#include <string>

#include "ffb/common.hpp"

namespace ffb {

// Critical scaling exponent beta = 2*sigma / (2 - gamma).
inline double scaling_exponent(double sigma, double gamma) {
    if (!(sigma > 0.0 && sigma < 1.0))
        throw param_error("scaling_exponent: sigma must lie in (0,1), got " + std::to_string(sigma));
    if (!(gamma > 0.0 && gamma < 1.0))
        throw param_error("scaling_exponent: gamma must lie in (0,1), got " + std::to_string(gamma));
    return 2.0 * sigma / (2.0 - gamma);
}

// Problem constants. sigma is the operator order, gamma the penalty exponent,
// n the dimension of the hyperplane Gamma = {y=0} carrying the penalty; the
// extension lives in n+1 variables (x, y). Immutable after construction.
class EnergyParams {
  public:
    EnergyParams(double sigma, double gamma, int n = 1)
        : sigma_(sigma), gamma_(gamma), n_(n) {
        if (!(sigma > 0.0 && sigma < 1.0))
            throw param_error("EnergyParams: sigma must lie strictly in (0,1)");
        if (!(gamma > 0.0 && gamma < 1.0))
            throw param_error("EnergyParams: gamma must lie strictly in (0,1); "
                              "the gamma=0 and gamma=1 limit problems are out of range");
        if (n < 1) throw param_error("EnergyParams: n must be >= 1");
        a_ = 1.0 - 2.0 * sigma;
        beta_ = scaling_exponent(sigma, gamma);
        beta2nd_ = 2.0 / (2.0 - gamma);
    }

    double sigma() const { return sigma_; }
    double gamma() const { return gamma_; }
    int n() const { return n_; }
    double a() const { return a_; }
    double beta() const { return beta_; }
    double beta2nd() const { return beta2nd_; }

    // Exponents governing how the two energy components scale under
    // u -> lambda^{-beta} u(lambda .): the Dirichlet part picks up
    // lambda^{2 - 2 beta - a - (n+1)} and the penalty lambda^{-beta gamma - n}
    // (n+1 is the dimension of the extended space, n that of Gamma). With
    // beta = 2 sigma / (2 - gamma) the two are equal.
    double dirichlet_scaling_exponent() const {
        return 2.0 - 2.0 * beta_ - a_ - (n_ + 1);
    }
    double penalty_scaling_exponent() const {
        return -beta_ * gamma_ - n_;
    }

  private:
    double sigma_;
    double gamma_;
    int n_;
    double a_;
    double beta_;
    double beta2nd_;
};

} // namespace ffb

#endif

#include "marketsim/rng.hpp"

#include <cmath>
#include <numbers>

namespace marketsim {

double Rng::normal(double sigma) {
    if (has_spare_) {
        has_spare_ = false;
        return spare_ * sigma;
    }
    // Box-Muller; consumes exactly two uniforms per pair of variates
    double u = uniform01();
    double v = uniform01();
    double r = std::sqrt(-2.0 * std::log(u));
    double theta = 2.0 * std::numbers::pi * v;
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta) * sigma;
}

double Rng::gumbel() { return -std::log(-std::log(uniform01())); }

}  // namespace marketsim

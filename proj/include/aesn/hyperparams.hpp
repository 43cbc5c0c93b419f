#pragma once

#include <stdexcept>

namespace aesn {

/**
 * Tunable quantities shared by every model kind. a_res is deliberately
 * absent: the reservoir scale is frozen at 0.1 and never searched.
 * n_eof = 0 means "choose by explained variance" (ESN-with-EOF only).
 */
struct HyperParams {
    double a_u = 0.1;
    double a_in = 0.1;
    double nu = 0.8;
    double tau = 1e-4;
    double alpha = 0.8;
    int n_h = 200;
    int K_embed = 20;
    int lags = 3;
    int n_eof = 0;

    void validate() const {
        if (!(a_u > 0.0)) throw std::invalid_argument("HyperParams: a_u must be > 0");
        if (!(a_in > 0.0)) throw std::invalid_argument("HyperParams: a_in must be > 0");
        if (!(nu > 0.0)) throw std::invalid_argument("HyperParams: nu must be > 0");
        if (tau < 0.0) throw std::invalid_argument("HyperParams: tau must be >= 0");
        if (!(alpha > 0.0) || alpha > 1.0)
            throw std::invalid_argument("HyperParams: alpha must be in (0, 1]");
        if (n_h < 1) throw std::invalid_argument("HyperParams: n_h must be >= 1");
        if (K_embed < 1) throw std::invalid_argument("HyperParams: K_embed must be >= 1");
        if (lags < 1) throw std::invalid_argument("HyperParams: lags must be >= 1");
        if (n_eof < 0) throw std::invalid_argument("HyperParams: n_eof must be >= 0");
    }
};

} // namespace aesn

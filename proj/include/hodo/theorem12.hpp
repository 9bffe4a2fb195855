#pragma once

#include "hodo/ck.hpp"
#include "hodo/hodograph.hpp"

namespace hodo {

struct Theorem12Options {
    int order = 8;
    double data_norm_target = 1e-2;  // rescale until the data coefficient sum is below this
    double smallness_max = 0.2;
    double R = 0.5;
    double r = 0.1;
    double C0 = -1;  // < 0: calibrate as twice the order-1 norm
    int shells_from = 2, shells_to = 6;
    int shell_samples = 96;
};

struct Theorem12Result {
    LegendreState legendre;            // Legendre series in original coordinates
    FieldClosure u;                    // reconstructed one-sided solution
    std::vector<double> first_order;   // d_n v(0) of the rescaled problem
    double scale = 1.0;                // dyadic rescaling used for smallness
    ConvergenceReport diagnostics;
    double C0_used = 0;
    std::vector<double> shell_radii;
    std::vector<double> shell_residual;
    double residual_slope = 0;         // log-log fit; +inf when residuals hit rounding
};

// Runs the order-by-order construction for given Cauchy data of the model
// system: rescale until small, expand, rescale back, reconstruct, and measure
// the original-system residual on dyadic shells.
Theorem12Result theorem12_from_data(const ModelConstants& cnst, const CauchyData<double>& data,
                                    const Theorem12Options& opt = {});

// Theorem-style entry: an analytic surface graph y_n = phi(y') with phi(0) = 0,
// grad phi(0) = 0, and unit boundary direction data V_plus with V_plus(0)
// rotated to e_1 by a built-in Householder reflection in the target space.
Theorem12Result theorem12_solve(const ModelConstants& cnst, const Series<double>& phi,
                                const std::vector<Series<double>>& Vplus,
                                const Theorem12Options& opt = {});

}  // namespace hodo

#pragma once

#include <string>
#include <vector>

#include "banditlab/common.hpp"

namespace banditlab::potential {

struct PotentialTrace {
    double alpha = 1.0;
    double lambda = 1.0;
    std::vector<double> terms;  // one per round, all positive
    double total = 0.0;
};

struct BoundReport {
    std::string bound_name;
    double bound_value = 0.0;
    double observed = 0.0;
    bool satisfied = false;
    double slack = 0.0;
};

struct MabRound {
    int arm = 0;
    bool realized = false;
};

struct LcbRound {
    std::vector<double> action;
    bool realized = false;
};

// Piecewise-constant continuous path segment: action held for `duration`
// with realization probability `p`.
struct PathSegment {
    std::vector<double> action;
    double p = 1.0;
    double duration = 1.0;
};

// V_alpha for MAB: sum over rounds of (N_{a_t}(t-1) + lambda)^{-alpha},
// with N recomputed causally from the history.
PotentialTrace potential_mab(const std::vector<MabRound>& history, double alpha, double lambda);

// Linear extension: term_t = a_t^T (W^C_{t-1})^{-alpha} a_t, matrix power via
// spectral decomposition (eigenvalues clamped below at lambda*(1-1e-9)).
PotentialTrace potential_lcb(const std::vector<LcbRound>& history, double alpha, double lambda);

// Tr(int_0^T W(t)^{-alpha} a(t)a(t)^T dt) with W(t) = lambda*I + int p a a^T.
// alpha = 1 uses the exact per-segment rank-one closed form; alpha != 1 uses
// adaptive quadrature with absolute tolerance 1e-8 per segment.
double continuous_trace_integral(const std::vector<PathSegment>& path, double alpha,
                                 double lambda);

// Upper bound on max_pi E[V_alpha] for censored MAB.
double finite_potential_bound(double d_eff, int d, double T, double lambda, double alpha,
                              double delta);

// Worst-case uncensored linear potential bound.
double worst_case_linear_bound(int d, double lambda, double T, double alpha);

BoundReport check_bound(double observed, double bound, const std::string& name = "");

}  // namespace banditlab::potential

#include "banditlab/potential.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include <Eigen/Dense>

namespace banditlab::potential {

namespace {

void require(bool cond, const std::string& msg) {
    if (!cond) throw std::invalid_argument(msg);
}

// Quadratic form y^T (Lambda + c y y^T)^{-alpha} y for diagonal Lambda.
// alpha = 2 has a Sherman-Morrison closed form; general alpha goes through a
// small symmetric eigensolve.
double rank_one_power_form(const Eigen::VectorXd& lam, const Eigen::VectorXd& y, double c,
                           double alpha, double floor) {
    if (alpha == 2.0) {
        double q1 = 0.0, q2 = 0.0;
        for (int i = 0; i < lam.size(); ++i) {
            double yi2 = y(i) * y(i);
            q1 += yi2 / lam(i);
            q2 += yi2 / (lam(i) * lam(i));
        }
        double den = 1.0 + c * q1;
        return q2 / (den * den);
    }
    Eigen::MatrixXd m = lam.asDiagonal();
    m.selfadjointView<Eigen::Lower>().rankUpdate(y, c);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(m);
    double out = 0.0;
    const auto& evals = eig.eigenvalues();
    Eigen::VectorXd w = eig.eigenvectors().transpose() * y;
    for (int i = 0; i < lam.size(); ++i) {
        double ev = std::max(evals(i), floor);
        out += w(i) * w(i) * std::pow(ev, -alpha);
    }
    return out;
}

double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double fa,
                        double fm, double fb, double whole, double tol, int depth) {
    double m = 0.5 * (a + b);
    double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    double flm = f(lm), frm = f(rm);
    double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol)
        return left + right + delta / 15.0;
    return adaptive_simpson(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           adaptive_simpson(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

double integrate_segment(const std::function<double(double)>& f, double length, double tol) {
    double fa = f(0.0), fm = f(0.5 * length), fb = f(length);
    double whole = length / 6.0 * (fa + 4.0 * fm + fb);
    return adaptive_simpson(f, 0.0, length, fa, fm, fb, whole, tol, 40);
}

}  // namespace

PotentialTrace potential_mab(const std::vector<MabRound>& history, double alpha, double lambda) {
    require(lambda > 0.0 && alpha > 0.0, "potential_mab: lambda and alpha must be positive");
    PotentialTrace trace{alpha, lambda, {}, 0.0};
    trace.terms.reserve(history.size());
    std::vector<long long> n;
    for (const auto& round : history) {
        require(round.arm >= 0, "potential_mab: negative arm index");
        if (round.arm >= static_cast<int>(n.size())) n.resize(static_cast<size_t>(round.arm) + 1, 0);
        double term = std::pow(static_cast<double>(n[static_cast<size_t>(round.arm)]) + lambda, -alpha);
        trace.terms.push_back(term);
        trace.total += term;
        if (round.realized) n[static_cast<size_t>(round.arm)] += 1;
    }
    return trace;
}

PotentialTrace potential_lcb(const std::vector<LcbRound>& history, double alpha, double lambda) {
    require(lambda > 0.0 && alpha > 0.0, "potential_lcb: lambda and alpha must be positive");
    require(!history.empty(), "potential_lcb: empty history");
    const int d = static_cast<int>(history.front().action.size());
    const double floor = lambda * (1.0 - 1e-9);
    Eigen::MatrixXd wc = Eigen::MatrixXd::Identity(d, d) * lambda;
    PotentialTrace trace{alpha, lambda, {}, 0.0};
    trace.terms.reserve(history.size());
    for (const auto& round : history) {
        require(static_cast<int>(round.action.size()) == d, "potential_lcb: dimension mismatch");
        Eigen::Map<const Eigen::VectorXd> a(round.action.data(), d);
        require(a.squaredNorm() <= 1.0 + 1e-9, "potential_lcb: action outside the unit ball");
        if ((wc - wc.transpose()).cwiseAbs().maxCoeff() > 1e-12)
            throw std::logic_error("potential_lcb: accumulated matrix lost symmetry");
        double term;
        if (alpha == 1.0) {
            term = a.dot(wc.ldlt().solve(a));
        } else {
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(wc);
            Eigen::VectorXd w = eig.eigenvectors().transpose() * a;
            term = 0.0;
            for (int i = 0; i < d; ++i)
                term += w(i) * w(i) * std::pow(std::max(eig.eigenvalues()(i), floor), -alpha);
        }
        trace.terms.push_back(term);
        trace.total += term;
        if (round.realized) {
            wc.selfadjointView<Eigen::Lower>().rankUpdate(a, 1.0);
            wc = wc.selfadjointView<Eigen::Lower>();
        }
    }
    return trace;
}

double continuous_trace_integral(const std::vector<PathSegment>& path, double alpha,
                                 double lambda) {
    require(lambda > 0.0 && alpha > 0.0,
            "continuous_trace_integral: lambda and alpha must be positive");
    require(!path.empty(), "continuous_trace_integral: zero-length path");
    const int d = static_cast<int>(path.front().action.size());
    const double floor = lambda * (1.0 - 1e-9);
    Eigen::MatrixXd w = Eigen::MatrixXd::Identity(d, d) * lambda;
    double total = 0.0;
    for (const auto& seg : path) {
        require(static_cast<int>(seg.action.size()) == d,
                "continuous_trace_integral: dimension mismatch");
        require(seg.duration > 0.0, "continuous_trace_integral: durations must be positive");
        require(seg.p > 0.0 && seg.p <= 1.0, "continuous_trace_integral: p must lie in (0,1]");
        Eigen::Map<const Eigen::VectorXd> a(seg.action.data(), d);
        if (alpha == 1.0) {
            double q = a.dot(w.ldlt().solve(a));
            total += std::log1p(seg.duration * seg.p * q) / seg.p;
        } else {
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(w);
            Eigen::VectorXd lam = eig.eigenvalues().cwiseMax(floor);
            Eigen::VectorXd y = eig.eigenvectors().transpose() * a;
            double p = seg.p;
            auto f = [&](double s) { return rank_one_power_form(lam, y, s * p, alpha, floor); };
            total += integrate_segment(f, seg.duration, 1e-8);
        }
        w.selfadjointView<Eigen::Lower>().rankUpdate(a, seg.duration * seg.p);
        w = w.selfadjointView<Eigen::Lower>();
    }
    return total;
}

double finite_potential_bound(double d_eff, int d, double T, double lambda, double alpha,
                              double delta) {
    require(delta > 0.0 && delta < 1.0, "finite_potential_bound: delta must lie in (0,1)");
    require(lambda > 0.0 && alpha > 0.0 && T >= 1.0 && d_eff > 0.0,
            "finite_potential_bound: invalid parameters");
    double shifted = lambda / (1.0 - delta);
    double main = d_eff / std::pow(1.0 - delta, alpha) *
                  (psi_alpha(T / d_eff + shifted, alpha) - psi_alpha(shifted, alpha));
    double mid = (24.0 * d_eff * std::log(T) + d) / std::pow(lambda, alpha);
    double tail = 4.0 * d_eff /
                  (std::pow(lambda, alpha) * delta * delta * std::pow(T, 12.0 * delta * delta));
    return main + mid + tail;
}

double worst_case_linear_bound(int d, double lambda, double T, double alpha) {
    require(d >= 1 && lambda > 0.0 && T >= 0.0 && alpha > 0.0,
            "worst_case_linear_bound: invalid parameters");
    double c = std::pow((lambda + 1.0) / lambda, alpha);
    if (alpha == 1.0) return (lambda + 1.0) / lambda * d * std::log1p(T / (lambda * d));
    if (alpha < 1.0)
        return c * std::pow(static_cast<double>(d), alpha) *
               std::pow(d * lambda + T, 1.0 - alpha) / (1.0 - alpha);
    return c * d * std::pow(lambda, 1.0 - alpha) / (alpha - 1.0);
}

BoundReport check_bound(double observed, double bound, const std::string& name) {
    BoundReport report;
    report.bound_name = name;
    report.bound_value = bound;
    report.observed = observed;
    report.slack = bound - observed;
    report.satisfied = observed <= bound + 1e-9;
    return report;
}

}  // namespace banditlab::potential

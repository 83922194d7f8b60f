#include "banditlab/policy.hpp"

#include <cmath>

#include <Eigen/Cholesky>

namespace banditlab::policy {

namespace {

void require(bool cond, const std::string& msg) {
    if (!cond) throw std::invalid_argument(msg);
}

}  // namespace

MabUcbState::MabUcbState(int d_, double lambda_, double sigma_, double horizon_,
                         double theta_inf_bound_)
    : tau(static_cast<size_t>(d_), 0),
      n(static_cast<size_t>(d_), 0),
      s(static_cast<size_t>(d_), 0.0),
      lambda(lambda_),
      sigma(sigma_),
      horizon(horizon_),
      theta_inf_bound(theta_inf_bound_) {
    validate();
}

void MabUcbState::validate() const {
    require(d() >= 1, "MabUcbState: at least one arm");
    require(lambda > 0.0, "MabUcbState: lambda must be positive");
    require(sigma >= 0.0, "MabUcbState: sigma must be nonnegative");
    require(horizon >= 2.0, "MabUcbState: horizon must be >= 2");
    if (per_arm_sigma)
        require(static_cast<int>(per_arm_sigma->size()) == d(),
                "MabUcbState: per_arm_sigma length mismatch");
}

double mab_index(const MabUcbState& state, int a) {
    require(a >= 0 && a < state.d(), "mab_index: arm out of range");
    double sig = state.per_arm_sigma ? (*state.per_arm_sigma)[static_cast<size_t>(a)]
                                     : state.sigma;
    double denom = state.lambda + static_cast<double>(state.n[static_cast<size_t>(a)]);
    double width = std::sqrt(6.0 * sig * sig * std::log(state.horizon) / denom);
    return state.theta_hat(a) + width + state.lambda * state.theta_inf_bound / denom;
}

int mab_select(const MabUcbState& state, const std::vector<int>& available) {
    require(!available.empty(), "mab_select: empty arm set");
    int best = -1;
    double best_index = -std::numeric_limits<double>::infinity();
    for (int a : available) {
        double idx = mab_index(state, a);
        if (idx > best_index || (idx == best_index && best >= 0 && a < best)) {
            best = a;
            best_index = idx;
        }
    }
    return best;
}

void mab_update(MabUcbState& state, int a, double reward, bool realized) {
    require(a >= 0 && a < state.d(), "mab_update: arm out of range");
    state.tau[static_cast<size_t>(a)] += 1;
    if (realized) {
        state.n[static_cast<size_t>(a)] += 1;
        state.s[static_cast<size_t>(a)] += reward;
    }
}

LcbUcbState::LcbUcbState(int d_, double lambda_, double sigma_, double delta_,
                         double theta_l2_bound_)
    : wc(Eigen::MatrixXd::Identity(d_, d_) * lambda_),
      b(Eigen::VectorXd::Zero(d_)),
      lambda(lambda_),
      sigma(sigma_),
      delta(delta_),
      theta_l2_bound(theta_l2_bound_) {
    validate();
}

void LcbUcbState::validate() const {
    require(d() >= 1, "LcbUcbState: dimension must be >= 1");
    require(lambda > 0.0, "LcbUcbState: lambda must be positive");
    require(sigma >= 0.0, "LcbUcbState: sigma must be nonnegative");
    require(delta > 0.0 && delta <= 1.0, "LcbUcbState: delta must lie in (0,1]");
}

Eigen::VectorXd LcbUcbState::theta_hat() const {
    return wc.ldlt().solve(b);
}

double lcb_beta(const LcbUcbState& state) {
    Eigen::LLT<Eigen::MatrixXd> llt(state.wc);
    if (llt.info() != Eigen::Success)
        throw std::runtime_error("lcb_beta: W^C is not positive-definite");
    // log det(W^C / lambda I) from the Cholesky factor.
    double logdet = 0.0;
    const auto& L = llt.matrixLLT();
    for (int i = 0; i < state.d(); ++i)
        logdet += 2.0 * std::log(L(i, i));
    double logratio = logdet - state.d() * std::log(state.lambda);
    if (logratio < 0.0) logratio = 0.0;  // guards rounding at W^C = lambda I
    double s2 = state.sigma * state.sigma;
    return std::sqrt(s2 * logratio + 2.0 * s2 * std::log(1.0 / state.delta)) +
           std::sqrt(state.lambda) * state.theta_l2_bound;
}

int lcb_select(const LcbUcbState& state, const std::vector<std::vector<double>>& action_set) {
    require(!action_set.empty(), "lcb_select: empty action set");
    const int d = state.d();
    Eigen::LDLT<Eigen::MatrixXd> ldlt(state.wc);
    Eigen::VectorXd theta = ldlt.solve(state.b);
    double beta = lcb_beta(state);
    int best = -1;
    double best_index = -std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < action_set.size(); ++i) {
        require(static_cast<int>(action_set[i].size()) == d, "lcb_select: action dimension mismatch");
        Eigen::Map<const Eigen::VectorXd> a(action_set[i].data(), d);
        double width2 = a.dot(ldlt.solve(a));
        if (width2 < 0.0) width2 = 0.0;
        double idx = a.dot(theta) + beta * std::sqrt(width2);
        if (idx > best_index) {  // ties broken by first occurrence
            best = static_cast<int>(i);
            best_index = idx;
        }
    }
    return best;
}

void lcb_update(LcbUcbState& state, const std::vector<double>& a, double reward, bool realized) {
    require(static_cast<int>(a.size()) == state.d(), "lcb_update: action dimension mismatch");
    double n2 = 0.0;
    for (double x : a) n2 += x * x;
    require(n2 <= 1.0 + 1e-9, "lcb_update: action outside the unit ball");
    if (!realized) return;
    Eigen::Map<const Eigen::VectorXd> av(a.data(), state.d());
    state.wc.selfadjointView<Eigen::Lower>().rankUpdate(av, 1.0);
    state.wc = state.wc.selfadjointView<Eigen::Lower>();
    state.b += reward * av;
}

}  // namespace banditlab::policy

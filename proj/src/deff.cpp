#include "banditlab/deff.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>

namespace banditlab::deff {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require(bool cond, const std::string& msg) {
    if (!cond) throw std::invalid_argument(msg);
}

double logdet2(int d, double first, double last) {
    return (d - 1) * std::log(first) + std::log(last);
}

// mu solving the first-order-equality between target i and base j from state
// diag(wa I_{d-1}, wb) while playing the base representative design.
// Returns +inf when the equality is never met at a nonnegative budget.
double reach_budget(const RegionGeometry& g, int i, int j, double wa, double wb) {
    const double ci = g.cos2[static_cast<size_t>(i)];
    const double cj = g.cos2[static_cast<size_t>(j)], sj = g.sin2[static_cast<size_t>(j)];
    const double rho = g.p[static_cast<size_t>(i)] / g.p[static_cast<size_t>(j)];
    const double dm1 = static_cast<double>(g.d - 1);
    double denom = ci - rho * cj;
    if (std::abs(denom) < 1e-300) return kInf;
    double ratio = 1.0 + (rho - 1.0) / denom;  // target value of wb/wa
    if (ratio < 0.0) return kInf;
    double a_coef = sj - ratio * cj / dm1;
    double b_coef = ratio * wa - wb;
    if (std::abs(a_coef) < 1e-300) return kInf;
    double mu = b_coef / a_coef;
    if (mu < -1e-12 * std::max(wa, wb)) return kInf;
    return std::max(mu, 0.0);
}

double r_star_geom(const RegionGeometry& g, int i, int j) {
    if (i == j) return 1.0;
    const double ci = g.cos2[static_cast<size_t>(i)], si = g.sin2[static_cast<size_t>(i)];
    const double cj = g.cos2[static_cast<size_t>(j)], sj = g.sin2[static_cast<size_t>(j)];
    if (sj == 0.0) {
        if (si == 0.0) throw std::domain_error("r_star: degenerate representative angles");
        return kInf;
    }
    double l = si / sj, u = ci / cj;
    return ((g.d - 1) * u + l) / g.d;
}

double r_dagger_geom(const RegionGeometry& g, int i, int j) {
    if (i == j) return 1.0;
    const double ci = g.cos2[static_cast<size_t>(i)], si = g.sin2[static_cast<size_t>(i)];
    const double cj = g.cos2[static_cast<size_t>(j)], sj = g.sin2[static_cast<size_t>(j)];
    double den = ci * sj + (g.d - 1) * si * cj;
    if (den <= 0.0) throw std::domain_error("r_dagger: degenerate representative angles");
    return g.d * si * ci / den;
}

// Bi-region effective dimension, written without dividing by the possibly
// vanishing representative sin^2 of the base.
double bi_region_d_eff(const RegionGeometry& g, int i, int j) {
    const double ci = g.cos2[static_cast<size_t>(i)], si = g.sin2[static_cast<size_t>(i)];
    const double cj = g.cos2[static_cast<size_t>(j)], sj = g.sin2[static_cast<size_t>(j)];
    const double rho = g.p[static_cast<size_t>(i)] / g.p[static_cast<size_t>(j)];
    double term1 = (g.d - 1) * (sj - si) / (rho * sj - si);
    double term2 = (ci - cj) / (ci - rho * cj);
    return (term1 + term2) / g.p[static_cast<size_t>(j)];
}

struct BiRegionScale {
    double scale = 0.0;  // W(t) = scale * (t + lambda_star) * W_pair
    double pair_first = 0.0;
    double pair_last = 0.0;
};

// Proportionality factor of the bi-region steady state, computed in the
// orientation with the smaller representative sin^2 first so that every
// intermediate quantity stays finite and positive.
BiRegionScale bi_region_scale(const RegionGeometry& g, int i, int j) {
    int a = i, b = j;
    if (g.sin2[static_cast<size_t>(a)] > g.sin2[static_cast<size_t>(b)]) std::swap(a, b);
    const double ca = g.cos2[static_cast<size_t>(a)], sa = g.sin2[static_cast<size_t>(a)];
    const double cb = g.cos2[static_cast<size_t>(b)], sb = g.sin2[static_cast<size_t>(b)];
    require(sb > 0.0, "bi_region_scale: degenerate pair");
    const double l = sa / sb, u = ca / cb;
    const double rho = g.p[static_cast<size_t>(a)] / g.p[static_cast<size_t>(b)];
    const double rs = ((g.d - 1) * u + l) / g.d;
    const double rd = g.d * l * u / (u + (g.d - 1) * l);
    require(rho > rd && rho < rs, "bi_region_scale: pair outside the stationarity window");
    double x = (g.d / (u + (g.d - 1) * l)) * (rs - rho) / (rho - rd);
    BiRegionScale out;
    out.scale = 1.0 / (rho + x) * (u - l) / (u + (g.d - 1) * l) / (rho - rd) *
                g.p[static_cast<size_t>(a)];
    out.pair_first = ca - rho * cb;        // cos^2(b) * (u - rho)
    out.pair_last = rho * sb - sa;         // sin^2(b) * (rho - l)
    return out;
}

}  // namespace

WaterFillingSolution water_filling(const std::vector<double>& p,
                                   const std::vector<double>& lambdas, double T, double alpha) {
    require(!p.empty(), "water_filling: empty arm list");
    require(p.size() == lambdas.size(), "water_filling: p and lambdas length mismatch");
    require(T > 0.0, "water_filling: T must be positive");
    require(alpha > 0.0 && alpha <= 1.0, "water_filling: alpha must lie in (0,1]");
    const size_t d = p.size();
    for (size_t a = 0; a < d; ++a) {
        require(p[a] > 0.0 && p[a] <= 1.0, "water_filling: probabilities must lie in (0,1]");
        require(lambdas[a] > 0.0, "water_filling: regularizers must be positive");
    }

    // Budget(C) = sum_{lambda_a <= C} (C - lambda_a)/p_a is piecewise linear
    // and increasing; solve on the active piece.
    std::vector<size_t> order(d);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](size_t x, size_t y) { return lambdas[x] < lambdas[y]; });
    double inv_p_sum = 0.0, weighted = 0.0, level = 0.0;
    for (size_t m = 0; m < d; ++m) {
        inv_p_sum += 1.0 / p[order[m]];
        weighted += lambdas[order[m]] / p[order[m]];
        double c = (T + weighted) / inv_p_sum;
        double upper = (m + 1 < d) ? lambdas[order[m + 1]] : kInf;
        if (c >= lambdas[order[m]] - 1e-15 && c <= upper) {
            level = c;
            break;
        }
    }

    WaterFillingSolution sol;
    sol.water_level = level;
    sol.tau_star.resize(d);
    sol.value = 0.0;
    for (size_t a = 0; a < d; ++a) {
        double tau = std::max(level - lambdas[a], 0.0) / p[a];
        sol.tau_star[a] = tau;
        sol.value += (psi_alpha(p[a] * tau + lambdas[a], alpha) - psi_alpha(lambdas[a], alpha)) / p[a];
    }
    return sol;
}

double d_eff_mab(const std::vector<double>& p,
                 const std::optional<std::vector<double>>& per_arm_sigma) {
    require(!p.empty(), "d_eff_mab: empty arm list");
    if (per_arm_sigma)
        require(per_arm_sigma->size() == p.size(), "d_eff_mab: sigma length mismatch");
    double out = 0.0;
    for (size_t a = 0; a < p.size(); ++a) {
        require(p[a] > 0.0 && p[a] <= 1.0, "d_eff_mab: probabilities must lie in (0,1]");
        double num = per_arm_sigma ? (*per_arm_sigma)[a] * (*per_arm_sigma)[a] : 1.0;
        out += num / p[a];
    }
    return out;
}

double gamma_alpha(const std::vector<double>& p, double alpha) {
    require(!p.empty(), "gamma_alpha: empty arm list");
    require(alpha > 0.0 && alpha <= 1.0, "gamma_alpha: alpha must lie in (0,1]");
    double deff = 0.0, decay_sum = 0.0;
    for (double pa : p) {
        require(pa > 0.0 && pa <= 1.0, "gamma_alpha: probabilities must lie in (0,1]");
        deff += 1.0 / pa;
        decay_sum += (1.0 - pa) / pa;
    }
    double total = 0.0;
    for (double pa : p) total += (decay_sum - (1.0 - pa) / pa) / pa;
    return alpha / (2.0 * std::pow(deff, 1.0 - alpha)) * total;
}

RegionGeometry region_geometry(const core::MtModel& model) {
    model.validate();
    RegionGeometry g;
    g.d = model.dim();
    g.k = model.k();
    const int nr = g.k + 1;
    g.sin2.resize(static_cast<size_t>(nr));
    g.cos2.resize(static_cast<size_t>(nr));
    g.sin2_max.resize(static_cast<size_t>(nr));
    g.p = model.probs;
    g.user_region.resize(static_cast<size_t>(nr));
    g.reflected = model.reflected;
    for (int j = 0; j < nr; ++j) {
        double lo = model.angles[static_cast<size_t>(j)];
        double hi = model.angles[static_cast<size_t>(j) + 1];
        double rep;
        if (lo >= 0.0)
            rep = lo;
        else if (hi <= 0.0)
            rep = hi;
        else
            rep = 0.0;
        double s = std::sin(rep);
        g.sin2[static_cast<size_t>(j)] = s * s;
        g.cos2[static_cast<size_t>(j)] = 1.0 - s * s;
        double slo = std::sin(lo), shi = std::sin(hi);
        g.sin2_max[static_cast<size_t>(j)] = std::max(slo * slo, shi * shi);
        g.user_region[static_cast<size_t>(j)] = g.reflected ? g.k - j : j;
    }
    g.oracle_only = model.angles[1] < 0.0 && g.k >= 1;
    return g;
}

double r_star(const core::MtModel& model, int i, int j) {
    RegionGeometry g = region_geometry(model);
    require(i >= 0 && j <= g.k && i <= j, "r_star: need valid regions with i <= j");
    return r_star_geom(g, i, j);
}

double r_dagger(const core::MtModel& model, int i, int j) {
    RegionGeometry g = region_geometry(model);
    require(i >= 0 && j <= g.k && i <= j, "r_dagger: need valid regions with i <= j");
    return r_dagger_geom(g, i, j);
}

double transient_budget(const core::MtModel& model, int i, int j, double lambda_a,
                        double lambda_b) {
    RegionGeometry g = region_geometry(model);
    require(i >= 0 && j <= g.k && i < j, "transient_budget: need valid regions with i < j");
    require(lambda_a > 0.0 && lambda_b > 0.0, "transient_budget: regularizers must be positive");
    double rho = g.p[static_cast<size_t>(i)] / g.p[static_cast<size_t>(j)];
    double rs = r_star_geom(g, i, j);
    if (!(rho < rs)) throw std::domain_error("transient_budget: region not reachable (ratio >= r*)");
    double mu;
    const double sj = g.sin2[static_cast<size_t>(j)], cj = g.cos2[static_cast<size_t>(j)];
    if (sj > 0.0 && cj > 0.0 && std::isfinite(rs)) {
        const double si = g.sin2[static_cast<size_t>(i)], ci = g.cos2[static_cast<size_t>(i)];
        double num = (sj * lambda_a + cj * lambda_b) * rho - (si * lambda_a + ci * lambda_b);
        mu = (g.d - 1) / (g.d * sj * cj) * num / (rs - rho);
    } else {
        mu = reach_budget(g, i, j, lambda_a, lambda_b);
    }
    if (!(mu >= 0.0) || !std::isfinite(mu))
        throw std::domain_error("transient_budget: region not reachable from this state");
    return mu;
}

TrajectoryReport compute_trajectory(const core::MtModel& model, double lambda, int d) {
    require(lambda > 0.0, "compute_trajectory: lambda must be positive");
    require(d >= 2, "compute_trajectory: d must be >= 2");
    require(d == model.dim(), "compute_trajectory: d must match the model dimension");
    TrajectoryReport rep;
    rep.d = d;
    rep.lambda = lambda;
    rep.geometry = region_geometry(model);
    const RegionGeometry& g = rep.geometry;
    const double dm1 = static_cast<double>(d - 1);

    int base = g.k;
    double wa = lambda, wb = lambda, t = 0.0;
    rep.region_sequence.push_back(base);
    rep.switch_times.push_back(0.0);
    rep.states.push_back({wa, wb});

    bool terminal_set = false;
    while (base > 0) {
        std::vector<std::pair<int, double>> budgets;  // (region, mu)
        double best = kInf;
        for (int i = 0; i < base; ++i) {
            double mu = reach_budget(g, i, base, wa, wb);
            if (std::isfinite(mu)) {
                budgets.emplace_back(i, mu);
                best = std::min(best, mu);
            }
        }
        if (budgets.empty()) {
            rep.terminal = TrajectoryReport::Terminal::SingleRegion;
            rep.terminal_region = base;
            rep.d_eff = d / g.p[static_cast<size_t>(base)];
            terminal_set = true;
            break;
        }
        // Simultaneous arrivals: budgets within 1e-9 relative of the minimum
        // tie-break to the most censored region.
        std::vector<int> ties;
        for (const auto& [i, mu] : budgets)
            if (mu <= best + 1e-9 * std::max(best, 1.0)) ties.push_back(i);
        std::sort(ties.begin(), ties.end(), std::greater<int>());

        const double sj = g.sin2[static_cast<size_t>(base)], cj = g.cos2[static_cast<size_t>(base)];
        double wa_prev = wa, wb_prev = wb;
        wa += best * cj / dm1;
        wb += best * sj;
        t += best / g.p[static_cast<size_t>(base)];
        rep.switch_times.push_back(t);
        rep.states.push_back({wa, wb});

        // Closed-form sign diagnostic for this leg (standard geometry only).
        {
            int i_star = ties.front();
            double rho = g.p[static_cast<size_t>(i_star)] / g.p[static_cast<size_t>(base)];
            double rs = r_star_geom(g, i_star, base);
            double pf = g.cos2[static_cast<size_t>(i_star)] - rho * cj;
            double pl = rho * sj - g.sin2[static_cast<size_t>(i_star)];
            if (sj > 0.0 && cj > 0.0 && std::isfinite(rs) && pf > 0.0 && pl > 0.0) {
                double denom = d * cj * sj * (rs - rho);
                double k_minus = (dm1 * sj * wa_prev - cj * wb_prev) / denom;
                double k_plus = (dm1 * sj * wa_prev + cj * wb_prev) / denom;
                auto matches = [&](double kf) {
                    return std::abs(kf * pf - wa) <= 1e-8 * std::abs(wa) &&
                           std::abs(kf * pl - wb) <= 1e-8 * std::abs(wb);
                };
                if (matches(k_minus))
                    rep.path_formula_sign.push_back("minus");
                else if (matches(k_plus))
                    rep.path_formula_sign.push_back("plus");
                else
                    rep.path_formula_sign.push_back("neither");
            } else {
                rep.path_formula_sign.push_back("not-evaluated");
            }
        }

        int next_base = -1;
        for (int i : ties) {
            double rho = g.p[static_cast<size_t>(i)] / g.p[static_cast<size_t>(base)];
            if (rho > r_dagger_geom(g, i, base)) {
                rep.terminal = TrajectoryReport::Terminal::BiRegion;
                rep.terminal_region = base;
                rep.terminal_pair_i = i;
                rep.d_eff = bi_region_d_eff(g, i, base);
                BiRegionScale sc = bi_region_scale(g, i, base);
                rep.scale = sc.scale;
                double l1 = wa / (sc.scale * sc.pair_first) - t;
                double l2 = wb / (sc.scale * sc.pair_last) - t;
                double ref = std::max({std::abs(l1), std::abs(l2), 1e-12});
                if (std::abs(l1 - l2) > 1e-8 * ref)
                    throw std::logic_error("compute_trajectory: bi-region scale entries disagree");
                rep.lambda_star = 0.5 * (l1 + l2);
                terminal_set = true;
                break;
            }
        }
        if (terminal_set) break;
        next_base = ties.front();
        base = next_base;
        rep.region_sequence.push_back(base);
    }
    if (!terminal_set) {
        rep.terminal = TrajectoryReport::Terminal::SingleRegion;
        rep.terminal_region = base;
        rep.d_eff = d / g.p[static_cast<size_t>(base)];
    }
    if (rep.terminal == TrajectoryReport::Terminal::SingleRegion) {
        int j = rep.terminal_region;
        double lo = g.sin2[static_cast<size_t>(j)], hi = g.sin2_max[static_cast<size_t>(j)];
        rep.terminal_sin2 = std::clamp(1.0 / d, lo, hi);
    }
    for (int r : rep.region_sequence)
        rep.user_region_sequence.push_back(g.user_region[static_cast<size_t>(r)]);
    return rep;
}

std::vector<double> switch_optimality_residuals(const TrajectoryReport& rep) {
    const RegionGeometry& g = rep.geometry;
    std::vector<double> out;
    for (size_t n = 1; n < rep.switch_times.size(); ++n) {
        int base = rep.region_sequence[n - 1];
        int arrived = n < rep.region_sequence.size()
                          ? rep.region_sequence[n]
                          : rep.terminal_pair_i;
        if (arrived < 0) continue;
        const DiagState& s = rep.states[n];
        auto marginal = [&](int r) {
            return (g.cos2[static_cast<size_t>(r)] / s.first +
                    g.sin2[static_cast<size_t>(r)] / s.last) /
                   g.p[static_cast<size_t>(r)];
        };
        double vi = marginal(arrived), vj = marginal(base);
        out.push_back(std::abs(vi - vj) / std::max({std::abs(vi), std::abs(vj), 1e-300}));
    }
    return out;
}

double optimization_value(const TrajectoryReport& rep, double T, bool* truncated) {
    require(T > 0.0, "optimization_value: T must be positive");
    if (truncated) *truncated = false;
    const RegionGeometry& g = rep.geometry;
    const double dm1 = static_cast<double>(rep.d - 1);
    double value = 0.0;
    // Transient legs: leg n plays region_sequence[n] over [t_n, t_{n+1}].
    for (size_t n = 0; n + 1 < rep.switch_times.size(); ++n) {
        int region = rep.region_sequence[n];
        double p = g.p[static_cast<size_t>(region)];
        double t0 = rep.switch_times[n], t1 = rep.switch_times[n + 1];
        const DiagState& s0 = rep.states[n];
        double ld0 = logdet2(rep.d, s0.first, s0.last);
        if (T < t1) {
            double mu = p * (T - t0);
            double fa = s0.first + mu * g.cos2[static_cast<size_t>(region)] / dm1;
            double fb = s0.last + mu * g.sin2[static_cast<size_t>(region)];
            value += (logdet2(rep.d, fa, fb) - ld0) / p;
            if (truncated) *truncated = true;
            return value;
        }
        const DiagState& s1 = rep.states[n + 1];
        value += (logdet2(rep.d, s1.first, s1.last) - ld0) / p;
    }
    double t_last = rep.switch_times.back();
    const DiagState& s_last = rep.states.back();
    if (rep.terminal == TrajectoryReport::Terminal::SingleRegion) {
        int j = rep.terminal_region;
        double p = g.p[static_cast<size_t>(j)];
        double mu = p * (T - t_last);
        double fa = s_last.first + mu * (1.0 - rep.terminal_sin2) / dm1;
        double fb = s_last.last + mu * rep.terminal_sin2;
        value += (logdet2(rep.d, fa, fb) - logdet2(rep.d, s_last.first, s_last.last)) / p;
    } else {
        value += rep.d_eff * std::log1p((T - t_last) / (t_last + rep.lambda_star));
    }
    return value;
}

double numeric_oracle(const core::MtModel& model, double lambda, int d, double T,
                      long long steps) {
    require(steps >= 100, "numeric_oracle: need at least 100 steps");
    require(lambda > 0.0 && T > 0.0, "numeric_oracle: lambda and T must be positive");
    require(d == model.dim(), "numeric_oracle: d must match the model dimension");
    RegionGeometry g = region_geometry(model);
    const double dm1 = static_cast<double>(d - 1);
    const int nr = g.k + 1;

    // Candidate designs: the per-region representatives plus a coarse simplex
    // grid of convex combinations. The one-region model uses its in-region
    // D-optimal design (sin^2 clamped at 1/d) since no region trade-off exists.
    struct Part {
        int region;
        double weight;
    };
    std::vector<std::vector<Part>> candidates;
    std::vector<double> cand_sin2(static_cast<size_t>(nr));
    for (int j = 0; j < nr; ++j) cand_sin2[static_cast<size_t>(j)] = g.sin2[static_cast<size_t>(j)];
    if (nr == 1) {
        cand_sin2[0] = std::clamp(1.0 / d, g.sin2[0], g.sin2_max[0]);
        candidates.push_back({{0, 1.0}});
    } else {
        const int grid = 6;
        std::vector<int> w(static_cast<size_t>(nr), 0);
        // enumerate integer weight vectors summing to `grid`
        std::function<void(int, int)> emit = [&](int idx, int left) {
            if (idx == nr - 1) {
                w[static_cast<size_t>(idx)] = left;
                std::vector<Part> cand;
                for (int j = nr - 1; j >= 0; --j)  // most censored applied first
                    if (w[static_cast<size_t>(j)] > 0)
                        cand.push_back({j, static_cast<double>(w[static_cast<size_t>(j)]) / grid});
                candidates.push_back(std::move(cand));
                return;
            }
            for (int v = 0; v <= left; ++v) {
                w[static_cast<size_t>(idx)] = v;
                emit(idx + 1, left - v);
            }
        };
        emit(0, grid);
    }

    double wa = lambda, wb = lambda;
    double value = 0.0;
    const double log_span = std::log1p(T);
    double t_prev = 0.0;
    for (long long n = 1; n <= steps; ++n) {
        double t_next = std::expm1(log_span * static_cast<double>(n) / static_cast<double>(steps));
        double dt = t_next - t_prev;
        t_prev = t_next;
        if (dt <= 0.0) continue;
        double best_gain = -kInf;
        double best_wa = wa, best_wb = wb;
        for (const auto& cand : candidates) {
            double ca = wa, cb = wb, gain = 0.0;
            for (const Part& part : cand) {
                double p = g.p[static_cast<size_t>(part.region)];
                double mu = p * part.weight * dt;
                double na = ca + mu * (1.0 - cand_sin2[static_cast<size_t>(part.region)]) / dm1;
                double nb = cb + mu * cand_sin2[static_cast<size_t>(part.region)];
                gain += (logdet2(d, na, nb) - logdet2(d, ca, cb)) / p;
                ca = na;
                cb = nb;
            }
            if (gain > best_gain) {
                best_gain = gain;
                best_wa = ca;
                best_wb = cb;
            }
        }
        value += best_gain;
        wa = best_wa;
        wb = best_wb;
    }
    return value;
}

std::pair<double, double> log_scaling_bounds(double p_min, double p_max, int d, double lambda,
                                             double T) {
    require(p_min > 0.0 && p_min <= p_max && p_max <= 1.0,
            "log_scaling_bounds: need 0 < p_min <= p_max <= 1");
    require(d >= 1 && lambda > 0.0 && T >= 0.0, "log_scaling_bounds: invalid parameters");
    double lower = d / p_max * std::log1p(p_min * T / (d * lambda));
    double upper = d / p_min * std::log1p(p_max * T / (d * lambda));
    return {lower, upper};
}

}  // namespace banditlab::deff

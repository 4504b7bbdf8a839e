#include "micsel/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "micsel/errors.hpp"

namespace micsel {

namespace {

double max_abs(std::span<const double> v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

bool all_finite(std::span<const double> v) {
    return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

double dot(std::span<const double> a, std::span<const double> b) {
    return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

// Minimizer of the cubic through (a, fa, da) and (b, fb, db); NaN if none.
double cubic_minimizer(double a, double fa, double da, double b, double fb, double db) {
    const double d1 = da + db - 3.0 * (fa - fb) / (a - b);
    const double disc = d1 * d1 - da * db;
    if (disc < 0.0) return std::numeric_limits<double>::quiet_NaN();
    const double d2 = std::copysign(std::sqrt(disc), b - a);
    const double denom = db - da + 2.0 * d2;
    if (denom == 0.0) return std::numeric_limits<double>::quiet_NaN();
    return b - (b - a) * (db + d2 - d1) / denom;
}

struct LinePoint {
    double alpha;
    double f;
    double d;  // directional derivative
};

}  // namespace

OptimResult adam_minimize(const ObjectiveFn& f, std::vector<double> x0, const AdamConfig& cfg) {
    const std::size_t n = x0.size();
    std::vector<double> g(n), g_new(n), m(n, 0.0), v(n, 0.0), x_new(n);
    OptimResult res;
    double fx = f(x0, g);
    res.evaluations = 1;
    if (!std::isfinite(fx) || !all_finite(g)) throw OptimizationError("objective is not finite at the initial point");

    res.x = x0;
    res.f = fx;
    std::vector<double> x = std::move(x0);
    double lr = cfg.lr;
    int halvings = 0;
    double b1t = 1.0, b2t = 1.0;
    int t = 0;
    while (t < cfg.max_iter) {
        const double b1n = b1t * cfg.beta1, b2n = b2t * cfg.beta2;
        double max_step = 0.0;
        std::vector<double> m_new(n), v_new(n);
        for (std::size_t j = 0; j < n; ++j) {
            m_new[j] = cfg.beta1 * m[j] + (1.0 - cfg.beta1) * g[j];
            v_new[j] = cfg.beta2 * v[j] + (1.0 - cfg.beta2) * g[j] * g[j];
            const double mhat = m_new[j] / (1.0 - b1n);
            const double vhat = v_new[j] / (1.0 - b2n);
            const double step = lr * mhat / (std::sqrt(vhat) + cfg.eps);
            x_new[j] = x[j] - step;
            max_step = std::max(max_step, std::abs(step));
        }
        const double f_new = f(x_new, g_new);
        ++res.evaluations;
        if (!std::isfinite(f_new) || !all_finite(g_new)) {
            if (++halvings > cfg.max_halvings) {
                res.message = "objective stayed non-finite after " + std::to_string(cfg.max_halvings) +
                              " learning-rate halvings";
                return res;
            }
            lr *= 0.5;
            continue;
        }
        ++t;
        b1t = b1n;
        b2t = b2n;
        m.swap(m_new);
        v.swap(v_new);
        x.swap(x_new);
        g.swap(g_new);
        if (f_new < res.f) {
            res.f = f_new;
            res.x = x;
        }
        res.iterations = t;
        res.trace.push_back(res.f);
        if (max_step < cfg.tol) {
            res.converged = true;
            res.message = "update below tolerance";
            return res;
        }
    }
    res.message = "iteration budget exhausted";
    return res;
}

OptimResult bfgs_minimize(const ObjectiveFn& f, std::vector<double> x0, const BfgsConfig& cfg) {
    const std::size_t n = x0.size();
    OptimResult res;
    std::vector<double> x = std::move(x0), g(n);
    double fx = f(x, g);
    res.evaluations = 1;
    if (!std::isfinite(fx) || !all_finite(g)) throw OptimizationError("objective is not finite at the initial point");

    // Inverse Hessian approximation, row-major.
    std::vector<double> H(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) H[i * n + i] = 1.0;
    bool scaled = false;

    std::vector<double> p(n), x_try(n), g_try(n), s(n), y(n), Hy(n);
    auto evaluate = [&](double alpha) -> LinePoint {
        for (std::size_t j = 0; j < n; ++j) x_try[j] = x[j] + alpha * p[j];
        const double ft = f(x_try, g_try);
        ++res.evaluations;
        if (!std::isfinite(ft) || !all_finite(g_try)) {
            return {alpha, std::numeric_limits<double>::infinity(), std::numeric_limits<double>::quiet_NaN()};
        }
        return {alpha, ft, dot(g_try, p)};
    };

    auto finish = [&](bool converged, std::string msg) {
        res.x = x;
        res.f = fx;
        res.converged = converged;
        res.message = std::move(msg);
        return res;
    };

    for (int iter = 0; iter < cfg.max_iter; ++iter) {
        if (max_abs(g) < cfg.grad_tol) return finish(true, "gradient below tolerance");

        for (std::size_t i = 0; i < n; ++i) {
            double acc = 0.0;
            for (std::size_t j = 0; j < n; ++j) acc -= H[i * n + j] * g[j];
            p[i] = acc;
        }
        double d0 = dot(g, p);
        if (!(d0 < 0.0)) {
            // Lost descent; restart from steepest descent.
            std::fill(H.begin(), H.end(), 0.0);
            for (std::size_t i = 0; i < n; ++i) {
                H[i * n + i] = 1.0;
                p[i] = -g[i];
            }
            scaled = false;
            d0 = dot(g, p);
        }

        const double alpha_max = cfg.max_step / std::max(max_abs(p), 1e-300);
        double alpha0 = std::min(1.0, alpha_max);
        if (!scaled) alpha0 = std::min(alpha0, 1.0 / std::max(max_abs(p), 1e-300));

        // Strong-Wolfe search: bracket, then zoom with safeguarded cubic steps.
        LinePoint prev{0.0, fx, d0};
        LinePoint lo{}, hi{};
        bool found = false, zoom = false;
        LinePoint accepted{};
        std::vector<double> g_acc(n), x_acc(n);
        double alpha = alpha0;
        int trials = 0;
        auto accept = [&](const LinePoint& pt) {
            accepted = pt;
            x_acc = x_try;
            g_acc = g_try;
            found = true;
        };
        while (trials < cfg.max_line_search && !found && !zoom) {
            const LinePoint cur = evaluate(alpha);
            ++trials;
            if (!std::isfinite(cur.f)) {
                // Infeasible: shrink towards the last good point.
                alpha = prev.alpha + 0.25 * (alpha - prev.alpha);
                continue;
            }
            if (cur.f > fx + cfg.c1 * cur.alpha * d0 || (trials > 1 && cur.f >= prev.f)) {
                lo = prev;
                hi = cur;
                zoom = true;
                break;
            }
            if (std::abs(cur.d) <= -cfg.c2 * d0) {
                accept(cur);
                break;
            }
            if (cur.d >= 0.0) {
                lo = cur;
                hi = prev;
                // keep x_try of lo available if zoom terminates on it
                zoom = true;
                break;
            }
            double next = cubic_minimizer(prev.alpha, prev.f, prev.d, cur.alpha, cur.f, cur.d);
            if (!std::isfinite(next) || next <= cur.alpha * 1.1) next = 2.0 * cur.alpha;
            next = std::min(next, 10.0 * cur.alpha);
            if (cur.alpha >= alpha_max) {
                // Cannot extend further; take the capped step.
                accept(cur);
                break;
            }
            next = std::min(next, alpha_max);
            prev = cur;
            alpha = next;
        }
        while (zoom && !found && trials < cfg.max_line_search) {
            double a = std::isfinite(hi.f) && std::isfinite(hi.d)
                           ? cubic_minimizer(lo.alpha, lo.f, lo.d, hi.alpha, hi.f, hi.d)
                           : std::numeric_limits<double>::quiet_NaN();
            const double left = std::min(lo.alpha, hi.alpha), right = std::max(lo.alpha, hi.alpha);
            const double margin = 0.1 * (right - left);
            if (!std::isfinite(a) || a < left + margin || a > right - margin) a = 0.5 * (lo.alpha + hi.alpha);
            const LinePoint cur = evaluate(a);
            ++trials;
            if (!std::isfinite(cur.f) || cur.f > fx + cfg.c1 * cur.alpha * d0 || cur.f >= lo.f) {
                hi = cur;
            } else {
                if (std::abs(cur.d) <= -cfg.c2 * d0) {
                    accept(cur);
                    break;
                }
                if (cur.d * (hi.alpha - lo.alpha) >= 0.0) hi = lo;
                lo = cur;
            }
            if (std::abs(hi.alpha - lo.alpha) < 1e-16 * std::max(1.0, std::abs(lo.alpha))) break;
        }
        if (!found) {
            // Fall back to the best sufficient-decrease point if we have one.
            if (zoom && lo.alpha > 0.0 && lo.f < fx) {
                const LinePoint cur = evaluate(lo.alpha);
                if (std::isfinite(cur.f) && cur.f < fx) {
                    accept(cur);
                }
            }
            if (!found) {
                return finish(max_abs(g) < cfg.grad_tol, "line search failed after " + std::to_string(trials) +
                                                             " trial steps");
            }
        }

        for (std::size_t j = 0; j < n; ++j) {
            s[j] = x_acc[j] - x[j];
            y[j] = g_acc[j] - g[j];
        }
        x = x_acc;
        g = g_acc;
        fx = accepted.f;
        res.iterations = iter + 1;
        res.trace.push_back(fx);

        const double sy = dot(s, y);
        if (sy > 1e-12 * std::sqrt(dot(s, s) * dot(y, y))) {
            if (!scaled) {
                const double gamma = sy / dot(y, y);
                for (std::size_t i = 0; i < n; ++i) {
                    for (std::size_t j = 0; j < n; ++j) H[i * n + j] = (i == j) ? gamma : 0.0;
                }
                scaled = true;
            }
            const double rho = 1.0 / sy;
            for (std::size_t i = 0; i < n; ++i) {
                double acc = 0.0;
                for (std::size_t j = 0; j < n; ++j) acc += H[i * n + j] * y[j];
                Hy[i] = acc;
            }
            const double yHy = dot(y, Hy);
            // H+ = H - rho (Hy s' + s y'H) + (rho^2 y'Hy + rho) s s'
            for (std::size_t i = 0; i < n; ++i) {
                for (std::size_t j = 0; j < n; ++j) {
                    H[i * n + j] += -rho * (Hy[i] * s[j] + s[i] * Hy[j]) + (rho * rho * yHy + rho) * s[i] * s[j];
                }
            }
        }
    }
    return finish(max_abs(g) < cfg.grad_tol, max_abs(g) < cfg.grad_tol ? "gradient below tolerance"
                                                                        : "iteration budget exhausted");
}

}  // namespace micsel

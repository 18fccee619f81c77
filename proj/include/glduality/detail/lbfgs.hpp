#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <deque>

namespace glduality::detail {

struct LbfgsResult {
    double value = 0.0;
    double gradient_norm = 0.0;  // sup norm
    int iterations = 0;
    bool converged = false;
};

// Limited-memory BFGS with Armijo backtracking. `fg(x, g)` returns f(x) and fills g.
template <typename FG>
LbfgsResult lbfgs(FG &&fg, Eigen::VectorXd &x, double gtol, int max_iter, int memory = 12) {
    using Eigen::VectorXd;
    LbfgsResult res;
    VectorXd g(x.size());
    double f = fg(x, g);
    std::deque<VectorXd> S, Y;
    std::deque<double> rho;
    for (int it = 0; it < max_iter; ++it) {
        res.gradient_norm = g.lpNorm<Eigen::Infinity>();
        if (res.gradient_norm <= gtol) {
            res.converged = true;
            break;
        }
        VectorXd q = g;
        std::vector<double> alpha(S.size());
        for (int i = static_cast<int>(S.size()) - 1; i >= 0; --i) {
            alpha[i] = rho[i] * S[i].dot(q);
            q -= alpha[i] * Y[i];
        }
        if (!S.empty()) q *= S.back().dot(Y.back()) / Y.back().squaredNorm();
        for (std::size_t i = 0; i < S.size(); ++i) {
            const double beta = rho[i] * Y[i].dot(q);
            q += (alpha[i] - beta) * S[i];
        }
        VectorXd dir = -q;
        double slope = g.dot(dir);
        if (slope >= 0.0) {
            dir = -g;
            slope = -g.squaredNorm();
            S.clear();
            Y.clear();
            rho.clear();
        }
        double t = 1.0;
        VectorXd xn, gn(x.size());
        double fn = 0.0;
        bool ok = false;
        for (int ls = 0; ls < 60; ++ls, t *= 0.5) {
            xn = x + t * dir;
            fn = fg(xn, gn);
            if (std::isfinite(fn) && fn <= f + 1e-4 * t * slope) {
                ok = true;
                break;
            }
        }
        res.iterations = it + 1;
        if (!ok) break;
        const VectorXd s = xn - x, y = gn - g;
        const double sy = s.dot(y);
        if (sy > 1e-12 * s.norm() * y.norm()) {
            S.push_back(s);
            Y.push_back(y);
            rho.push_back(1.0 / sy);
            if (static_cast<int>(S.size()) > memory) {
                S.pop_front();
                Y.pop_front();
                rho.pop_front();
            }
        }
        x = xn;
        f = fn;
        g = gn;
    }
    res.value = f;
    res.gradient_norm = g.lpNorm<Eigen::Infinity>();
    res.converged = res.converged || res.gradient_norm <= gtol;
    return res;
}

} // namespace glduality::detail

#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <vector>

namespace glduality {

template <typename Affine>
GmresResult fixed_point_gmres(Affine &&map, VectorXcd &x, double tol, int max_iter, int restart) {
    using Eigen::Index;
    const Index n = x.size();
    const VectorXcd c = map(VectorXcd::Zero(n));
    const double scale = std::max(c.norm(), 1e-300);
    auto apply = [&](const VectorXcd &v) -> VectorXcd { return v - map(v) + c; };

    GmresResult out;
    VectorXcd r = map(x) - x;
    out.relative_residual = r.norm() / scale;
    while (out.iterations < max_iter && out.relative_residual > tol) {
        const int m = std::min(restart, max_iter - out.iterations);
        std::vector<VectorXcd> V;
        V.reserve(m + 1);
        Eigen::MatrixXcd H = Eigen::MatrixXcd::Zero(m + 1, m);
        std::vector<std::complex<double>> cs(m), sn(m);
        VectorXcd g = VectorXcd::Zero(m + 1);
        const double beta = r.norm();
        V.push_back(r / beta);
        g[0] = beta;
        int k = 0;
        for (; k < m; ++k) {
            VectorXcd w = apply(V[k]);
            for (int j = 0; j <= k; ++j) {
                H(j, k) = V[j].dot(w);
                w -= H(j, k) * V[j];
            }
            const double wn = w.norm();
            H(k + 1, k) = wn;
            for (int j = 0; j < k; ++j) {
                const auto t = std::conj(cs[j]) * H(j, k) + std::conj(sn[j]) * H(j + 1, k);
                H(j + 1, k) = -sn[j] * H(j, k) + cs[j] * H(j + 1, k);
                H(j, k) = t;
            }
            const double den = std::hypot(std::abs(H(k, k)), std::abs(H(k + 1, k)));
            cs[k] = H(k, k) / den;
            sn[k] = H(k + 1, k) / den;
            H(k, k) = den;
            H(k + 1, k) = 0.0;
            g[k + 1] = -sn[k] * g[k];
            g[k] = std::conj(cs[k]) * g[k];
            ++out.iterations;
            if (std::abs(g[k + 1]) / scale <= tol || wn <= 1e-300 * beta) {
                ++k;
                break;
            }
            V.push_back(w / wn);
        }
        const VectorXcd y =
            H.topLeftCorner(k, k).triangularView<Eigen::Upper>().solve(g.head(k));
        for (int j = 0; j < k; ++j) x += y[j] * V[j];
        r = map(x) - x;
        out.relative_residual = r.norm() / scale;
    }
    return out;
}

} // namespace glduality

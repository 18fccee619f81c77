#pragma once

#include "glduality/fields.hpp"

#include <random>

namespace testsupport {

using namespace glduality;

inline VectorXd random_real(Eigen::Index n, std::mt19937_64 &rng, double scale = 1.0) {
    std::normal_distribution<double> normal(0.0, scale);
    VectorXd v(n);
    for (auto &x : v) x = normal(rng);
    return v;
}

inline VectorXcd random_complex(Eigen::Index n, std::mt19937_64 &rng, double scale = 1.0) {
    VectorXcd v(n);
    v.real() = random_real(n, rng, scale);
    v.imag() = random_real(n, rng, scale);
    return v;
}

inline RealVectorField random_vector_field(const BoxGrid &g, std::mt19937_64 &rng, double scale = 1.0) {
    RealVectorField f = RealVectorField::zeros(g);
    for (auto &c : f.values) c = random_real(g.size(), rng, scale);
    return f;
}

template <typename F>
RealVectorField sample(const BoxGrid &g, F &&fn) {
    RealVectorField out = RealVectorField::zeros(g);
    for (int p = 0; p < g.size(); ++p) {
        const auto v = fn(g.position(p));
        for (int c = 0; c < 3; ++c) out.values[c][p] = v[c];
    }
    return out;
}

} // namespace testsupport

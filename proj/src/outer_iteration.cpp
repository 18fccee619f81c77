#include "glduality/outer_iteration.hpp"

#include <chrono>
#include <cmath>
#include <random>
#include <stdexcept>

namespace glduality {

namespace {

double sup_diff(const RealVectorField &a, const RealVectorField &b) {
    double s = 0.0;
    for (int c = 0; c < 3; ++c) s = std::max(s, (a.values[c] - b.values[c]).lpNorm<Eigen::Infinity>());
    return s;
}

double sup(const RealVectorField &a) {
    double s = 0.0;
    for (const auto &c : a.values) s = std::max(s, c.lpNorm<Eigen::Infinity>());
    return s;
}

bool finite(const FieldPair &f) {
    return f.phi.values.allFinite() && f.A.values[0].allFinite() && f.A.values[1].allFinite() &&
           f.A.values[2].allFinite();
}

} // namespace

std::string to_string(Termination t) {
    switch (t) {
    case Termination::ToleranceMet: return "tolerance-met";
    case Termination::MaxIterations: return "max-iters";
    case Termination::Diverged: return "diverged";
    }
    return "unknown";
}

bool IterationReport::monotone_tail(int count) const {
    if (count < 1 || iterations() < count + 1) return false;
    for (int k = iterations() - count; k < iterations(); ++k)
        if (!(records[k].change() < records[k - 1].change())) return false;
    return true;
}

FieldPair default_start(const GLDomain &domain, const GLParams &params) {
    return {ComplexScalarField::constant(domain.omega(), std::sqrt(params.beta)), RealVectorField::zeros(domain.outer())};
}

FieldPair random_start(const GLDomain &domain, const GLParams &params, std::uint64_t seed, double amplitude) {
    FieldPair f = default_start(domain, params);
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    for (auto &v : f.phi.values) {
        const double re = normal(rng);
        const double im = normal(rng);
        v *= Complex(1.0 + amplitude * re, amplitude * im);
    }
    return f;
}

OuterResult run_outer(const GLDomain &domain, const FieldPair &start, const RealVectorField &B0,
                      const GLParams &params) {
    params.validate();
    require_valid(start.phi, "start phi");
    require_valid(start.A, "start A");
    require_valid(B0, "B0");
    const Magnetostatics magnet(domain, params);

    OuterResult out{start, {}};
    IterationReport &rep = out.report;
    rep.initial_energy = gl_energy(domain, start.phi, start.A, B0, params);
    const double ceiling = 10.0 * std::abs(rep.initial_energy) + 1e-10;

    for (int k = 1; k <= params.max_outer; ++k) {
        const auto t0 = std::chrono::steady_clock::now();
        IterationRecord rec;
        rec.iteration = k;
        FieldPair next;
        try {
            const MethodOfLines mol(domain, {out.fields.phi, out.fields.A}, params);
            MolStats ms;
            next.phi = mol.solve(&ms);
            rec.sweeps = ms.sweeps;
            rec.line_residual = ms.line_residual;
            if (params.damping < 1.0)
                next.phi.values = (1.0 - params.damping) * out.fields.phi.values + params.damping * next.phi.values;
            if (!next.phi.values.allFinite()) throw std::runtime_error("phi update is not finite");
            const VectorPotentialResult vp = magnet.solve(next.phi, out.fields.A, B0);
            next.A = vp.A;
            rec.div_A = vp.div_sup;
        } catch (const std::exception &e) {
            rep.reason = Termination::Diverged;
            rep.message = e.what();
            return out;
        }
        if (!finite(next)) {
            rep.reason = Termination::Diverged;
            rep.message = "non-finite iterate";
            return out;
        }
        rec.phi_change = (next.phi.values - out.fields.phi.values).cwiseAbs().maxCoeff();
        rec.A_change = sup_diff(next.A, out.fields.A);
        rec.energy = gl_energy(domain, next.phi, next.A, B0, params);
        rec.residual_phi = gl_residual_phi(domain, next.phi, next.A, params).values.cwiseAbs().maxCoeff();
        rec.residual_A = sup(gl_residual_A(domain, next.phi, next.A, B0, params));
        rec.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        rep.records.push_back(rec);
        out.fields = std::move(next);

        if (!std::isfinite(rec.energy) || rec.energy > ceiling) {
            rep.reason = Termination::Diverged;
            rep.message = "energy exceeded ten times its initial value";
            return out;
        }
        if (rec.change() <= params.outer_tol) {
            rep.reason = Termination::ToleranceMet;
            return out;
        }
    }
    rep.reason = Termination::MaxIterations;
    return out;
}

} // namespace glduality

#pragma once

#include "glduality/magnetostatics.hpp"
#include "glduality/mol_solver.hpp"

#include <string>
#include <vector>

namespace glduality {

enum class Termination { ToleranceMet, MaxIterations, Diverged };
std::string to_string(Termination t);

struct IterationRecord {
    int iteration = 0;
    double energy = 0.0;
    double phi_change = 0.0;    // sup |phi^{k+1} - phi^k|
    double A_change = 0.0;      // sup |A^{k+1} - A^k|
    double residual_phi = 0.0;  // sup of gl_residual_phi at the new pair
    double residual_A = 0.0;    // sup of gl_residual_A at the new pair
    double div_A = 0.0;
    double line_residual = 0.0;
    int sweeps = 0;
    double seconds = 0.0;

    double change() const { return std::max(phi_change, A_change); }
};

struct IterationReport {
    std::vector<IterationRecord> records;
    Termination reason = Termination::MaxIterations;
    double initial_energy = 0.0;
    std::string message;

    int iterations() const { return static_cast<int>(records.size()); }
    /// True when the joint change decreased strictly over the last `count` iterations.
    bool monotone_tail(int count) const;
};

struct FieldPair {
    ComplexScalarField phi;
    RealVectorField A;
};

/// phi = sqrt(beta), A = 0.
FieldPair default_start(const GLDomain &domain, const GLParams &params);
/// sqrt(beta) times (1 + amplitude * noise) with complex Gaussian noise from `seed`; A = 0.
FieldPair random_start(const GLDomain &domain, const GLParams &params, std::uint64_t seed, double amplitude = 0.05);

struct OuterResult {
    FieldPair fields;
    IterationReport report;
};

/**
 * Alternates the method-of-lines phi-update (linearised about the current
 * pair, damped by params.damping) and the magnetostatic A-update until the
 * joint sup change drops to params.outer_tol. Diverges when the energy
 * exceeds ten times its initial value or a field stops being finite.
 */
OuterResult run_outer(const GLDomain &domain, const FieldPair &start, const RealVectorField &B0,
                      const GLParams &params);

} // namespace glduality

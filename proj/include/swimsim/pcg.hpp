#pragma once

#include <algorithm>
#include <cmath>

namespace swimsim {

struct PcgResult {
    int iterations = 0;
    double relative_residual = 0.0;
    bool converged = false;
};

/// Preconditioned conjugate gradients for a symmetric positive (semi-)definite operator.
/// `Vector` needs copy, `*=` and `axpy(s, other)`; `dot` is the inner product the
/// operator is symmetric in. Starts from the incoming `x`. Residuals are measured
/// against max(|b|, reference_norm), which keeps a nearly vanishing right-hand side
/// from demanding accuracy below roundoff.
template <class Vector, class Apply, class Precondition, class Dot>
PcgResult pcg(Vector& x, const Vector& b, Apply&& apply, Precondition&& precondition, Dot&& dot, double rel_tol,
              int max_iterations, double reference_norm = 0.0) {
    PcgResult res;
    const double rhs_norm = std::sqrt(dot(b, b));
    if (rhs_norm == 0.0) {
        x *= 0.0;
        res.converged = true;
        return res;
    }
    const double b_norm = std::max(rhs_norm, reference_norm);
    Vector r = b;
    r.axpy(-1.0, apply(x));
    res.relative_residual = std::sqrt(dot(r, r)) / b_norm;
    if (res.relative_residual <= rel_tol) {
        res.converged = true;
        return res;
    }
    Vector z = precondition(r);
    Vector p = z;
    double rz = dot(r, z);
    while (res.iterations < max_iterations) {
        ++res.iterations;
        const Vector ap = apply(p);
        const double p_ap = dot(p, ap);
        if (!(p_ap > 0.0)) break;
        const double alpha = rz / p_ap;
        x.axpy(alpha, p);
        r.axpy(-alpha, ap);
        res.relative_residual = std::sqrt(dot(r, r)) / b_norm;
        if (res.relative_residual <= rel_tol) {
            res.converged = true;
            return res;
        }
        z = precondition(r);
        const double rz_next = dot(r, z);
        p *= rz_next / rz;
        p.axpy(1.0, z);
        rz = rz_next;
    }
    return res;
}

}  // namespace swimsim

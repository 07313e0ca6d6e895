#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "mar/grid.hpp"
#include "mar/grid_ops.hpp"
#include "mar/projector.hpp"

namespace mar {

/// Parameters of the weighted nonconvex model
///   min_u 1/(2 lambda) ||W (A u - Y)||^2 + ||grad u||_1 - alpha ||grad u||_{2,1}
///   s.t. 0 <= u <= c,
/// solved through its penalized saddle-point form (eta strength on the dual
/// p-block; eta = 0 recovers the unpenalized saddle problem).
struct ModelParams {
    double lambda = 1.0;
    double alpha = 0.75;
    double eta = 1e-4;
    double c = 1.0;
    SProjection s_projection = SProjection::Scaled;

    void validate() const {
        if (!(lambda > 0.0)) throw std::invalid_argument("model: lambda must be positive");
        if (alpha < 0.0 || alpha > 1.0) throw std::invalid_argument("model: alpha must be in [0,1]");
        if (eta < 0.0) throw std::invalid_argument("model: eta must be nonnegative");
        if (!(c > 0.0)) throw std::invalid_argument("model: box bound c must be positive");
    }
};

struct PrePdhgParams {
    ModelParams model;
    double gamma = 0.0;  // preconditioner level; 0 derives the default
    double tau = 0.01;
    double beta = 5.0;
    int max_iters = 3000;
    double tol = 9e-5;

    void validate() const {
        model.validate();
        if (gamma < 0.0 || !(tau > 0.0) || !(beta > 0.0)) throw std::invalid_argument("pre-pdhg: step sizes must be positive");
        if (max_iters < 1 || !(tol > 0.0)) throw std::invalid_argument("pre-pdhg: bad max_iters/tol");
    }
};

struct FsPdhgParams {
    ModelParams model;
    double rho = 0.003;
    double sigma1 = 0.003;
    double sigma2 = 300.0;
    double tau = 0.01;
    double beta = 50.0;
    int max_iters = 3000;
    double tol = 9e-5;

    void validate() const {
        model.validate();
        if (!(rho > 0.0) || !(sigma1 > 0.0) || !(sigma2 > 0.0) || !(tau > 0.0) || !(beta > 0.0))
            throw std::invalid_argument("fs-pdhg: step sizes must be positive");
        if (max_iters < 1 || !(tol > 0.0)) throw std::invalid_argument("fs-pdhg: bad max_iters/tol");
    }
};

/// Per-iteration diagnostics; written as CSV with the exact header
/// `iter,energy,rel_err,fidelity,wall_ms`.
struct ConvergenceRecord {
    std::vector<int> iter;
    std::vector<double> energy;
    std::vector<double> rel_err;
    std::vector<double> fidelity;
    std::vector<double> wall_ms;

    int iterations = 0;
    bool converged = false;
    double max_v_norm = 0.0;  // fs only: running bound on ||v^k||
    std::string init_mode = "zero";

    void append(int k, double e, double r, double f, double w) {
        iter.push_back(k);
        energy.push_back(e);
        rel_err.push_back(r);
        fidelity.push_back(f);
        wall_ms.push_back(w);
    }
    void write_csv(const std::string& path) const;
};

struct SolveResult {
    Image u;
    ConvergenceRecord record;
};

/// Raised by the divergence guard (sustained energy increase) and by NaN
/// detection; carries the trace up to the abort.
struct SolverDivergence : std::runtime_error {
    SolverDivergence(const std::string& msg, ConvergenceRecord rec)
        : std::runtime_error(msg), record(std::move(rec)) {}
    ConvergenceRecord record;
};

enum class ClauseStatus { Pass, Fail, Inapplicable };

struct Clause {
    std::string name;
    ClauseStatus status;
    double lhs = 0.0;
    double rhs = 0.0;
};

struct ConditionReport {
    std::vector<Clause> clauses;
    bool all_pass() const {
        for (const auto& c : clauses)
            if (c.status != ClauseStatus::Pass) return false;
        return true;
    }
};

/// Step-size conditions for the preconditioned scheme, evaluated with grad
/// bound K and the weighted operator norm estimate. Report only; the checks
/// are conservative and runs proceed regardless.
ConditionReport check_conditions_pre(const PrePdhgParams& pp, double K, double opnorm);

/// Step-size conditions for the fully split scheme. The middle clause needs
/// 1 - K alpha > 0 and is reported inapplicable otherwise.
ConditionReport check_conditions_fs(const FsPdhgParams& fp, double K, double w_max);

/// Smallest preconditioner level passing the sufficient positive-definiteness
/// check, with 5% headroom: 1.05 (opnorm/lambda + 2K^2/eta + K alpha).
double default_gamma(const ModelParams& m, double K, double opnorm);

// --- closed-form block updates (exposed for the subproblem oracles) ---

/// u-step of the preconditioned scheme: Proj(z/gamma; U) with
/// z = (1/lambda) A^T(W^2 Y) + div(p + alpha q) + M u,  M u = gamma u - (1/lambda) A^T(W^2 A u).
Image pre_update_u(const Image& u, const GradField& p, const GradField& q, const Sinogram& Y,
                   const Sinogram& W, const LinearOperator& op, const ModelParams& m, double gamma);

/// q^{k+1} = Proj(q - tau alpha grad(ubar); Q)
GradField update_q(const GradField& q, const Image& ubar, double tau, double alpha);

/// p^{k+1} = Proj((p + beta grad(ubar)) / (1 + eta beta); S)
GradField update_p(const GradField& p, const Image& ubar, double beta, double eta, SProjection mode);

/// Lambda^{k+1} = Lambda + rho (v - A u)
Sinogram update_lambda(const Sinogram& lam, const Sinogram& v, const Sinogram& sino_u, double rho);

/// u-step of the fully split scheme:
/// Proj(u + sigma1 div(p + alpha q) + sigma1 A^T Lambda; U)
Image fs_update_u(const Image& u, const GradField& p, const GradField& q, const Sinogram& lam,
                  const LinearOperator& op, double sigma1, double alpha, double c);

/// elementwise v^{k+1} = (v/sigma2 - Lambda + Y W^2/lambda) / (1/sigma2 + W^2/lambda)
Sinogram update_v(const Sinogram& v, const Sinogram& lam, const Sinogram& Y, const Sinogram& W,
                  double sigma2, double lambda);

// --- auxiliary energies (the runtime descent certificates) ---

/// L for the preconditioned scheme at (u, q, p) with anchor u_tilde.
/// Throws when the state is infeasible (outside U, Q, or S).
double energy_L_lambda(const Image& u, const GradField& q, const GradField& p, const Image& u_tilde,
                       const LinearOperator& op, const Sinogram& W, const Sinogram& Y,
                       const ModelParams& m, double gamma);

/// L for the fully split scheme at (Lambda, u, v, q, p) with anchors
/// (u_tilde, v_tilde).
double energy_L_sigma(const Sinogram& lam, const Image& u, const Sinogram& v, const GradField& q,
                      const GradField& p, const Image& u_tilde, const Sinogram& v_tilde,
                      const LinearOperator& op, const Sinogram& W, const Sinogram& Y,
                      const FsPdhgParams& fp);

// --- drivers ---

/// Preconditioned primal-dual iteration (diagonal-preconditioned u-step,
/// then extrapolation and the two dual steps). q0 = p0 = 0; u0 defaults to
/// zero, callers may pass a warm start (it is projected into U). Stops when
/// ||u^{k+1} - u^k|| / ||u^{k+1}|| <= tol (0/0 counts as converged) or at
/// max_iters.
SolveResult run_pre_pdhg(const LinearOperator& op, const Sinogram& Y, const Sinogram& W,
                         const PrePdhgParams& pp, const Image* u0 = nullptr);

/// Fully split primal-dual iteration with the sinogram-domain auxiliary
/// variable and multiplier (order: Lambda, u, extrapolation, v, then q and p).
/// All blocks start at zero unless a warm start is given.
SolveResult run_fs_pdhg(const LinearOperator& op, const Sinogram& Y, const Sinogram& W,
                        const FsPdhgParams& fp, const Image* u0 = nullptr);

// --- model presets ---

enum class WeightSource { Adaptive, Binary };

/// Named model variants: "proposed" (adaptive weight, alpha = 0.75),
/// "tv_mar" (binary complement weight, alpha = 0, eta = 0) and
/// "aitv_binary" (binary complement weight, alpha = 0.75).
struct Preset {
    std::string name;
    double alpha = 0.75;
    std::optional<double> eta;
    WeightSource weight = WeightSource::Adaptive;
};

Preset preset(const std::string& name);

}  // namespace mar

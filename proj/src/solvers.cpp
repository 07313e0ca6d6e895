#include "mar/solvers.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>

namespace mar {

void ConvergenceRecord::write_csv(const std::string& path) const {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("convergence csv: cannot open " + path);
    f << "iter,energy,rel_err,fidelity,wall_ms\n";
    char buf[160];
    for (size_t k = 0; k < iter.size(); ++k) {
        std::snprintf(buf, sizeof(buf), "%d,%.17g,%.17g,%.17g,%.17g\n", iter[k], energy[k], rel_err[k],
                      fidelity[k], wall_ms[k]);
        f << buf;
    }
}

namespace {

constexpr double kFeasTol = 1e-9;

void require_feasible(const Image& u, const GradField& q, const GradField& p, double c) {
    for (double x : u.v)
        if (!(x >= -kFeasTol && x <= c + kFeasTol))
            throw std::invalid_argument("energy: u outside the box [0,c]");
    for (size_t k = 0; k < q.px.v.size(); ++k)
        if (std::hypot(q.px.v[k], q.py.v[k]) > 1.0 + kFeasTol)
            throw std::invalid_argument("energy: q outside the unit-disk set Q");
    for (size_t k = 0; k < p.px.v.size(); ++k)
        if (std::abs(p.px.v[k]) > 1.0 + kFeasTol || std::abs(p.py.v[k]) > 1.0 + kFeasTol)
            throw std::invalid_argument("energy: p outside the box set S");
}

double weighted_sq(const Sinogram& W, const Sinogram& a) {
    double s = 0.0;
    for (size_t k = 0; k < a.v.size(); ++k) {
        const double wa = W.v[k] * a.v[k];
        s += wa * wa;
    }
    return s;
}

double fidelity_value(const Sinogram& sino_u, const Sinogram& Y, const Sinogram& W, double lambda) {
    double s = 0.0;
    for (size_t k = 0; k < sino_u.v.size(); ++k) {
        const double r = W.v[k] * (sino_u.v[k] - Y.v[k]);
        s += r * r;
    }
    return 0.5 / lambda * s;
}

double cross_term(const Image& u, const GradField& p, const GradField& q, double alpha) {
    GradField g = grad(u);
    double s = 0.0;
    for (size_t k = 0; k < g.px.v.size(); ++k) {
        s += g.px.v[k] * (p.px.v[k] + alpha * q.px.v[k]);
        s += g.py.v[k] * (p.py.v[k] + alpha * q.py.v[k]);
    }
    return s;
}

double sq_norm(const GradField& p) { return dot(p, p); }

// L for the preconditioned scheme from precomputed forward projections of u
// and of (u - u_tilde).
double energy_pre_core(const Image& u, const GradField& q, const GradField& p, const Image& u_tilde,
                       const Sinogram& sino_u, const Sinogram& sino_diff, const Sinogram& W,
                       const Sinogram& Y, const ModelParams& m, double gamma) {
    require_feasible(u, q, p, m.c);
    const double g_val = fidelity_value(sino_u, Y, W, m.lambda);
    const double pen = -0.5 * m.eta * sq_norm(p);
    const double cross = cross_term(u, p, q, m.alpha);
    Image d = u - u_tilde;
    const double m_term = 0.5 * (gamma * dot(d, d) - weighted_sq(W, sino_diff) / m.lambda);
    return g_val + pen + cross + m_term;
}

double energy_fs_core(const Sinogram& lam, const Image& u, const Sinogram& v, const GradField& q,
                      const GradField& p, const Image& u_tilde, const Sinogram& v_tilde,
                      const Sinogram& sino_u, const Sinogram& W, const Sinogram& Y,
                      const ModelParams& m, double sigma1, double sigma2) {
    require_feasible(u, q, p, m.c);
    const double f_val = fidelity_value(v, Y, W, m.lambda);
    const double pen = -0.5 * m.eta * sq_norm(p);
    const double cross = cross_term(u, p, q, m.alpha);
    double mult = 0.0;
    for (size_t k = 0; k < lam.v.size(); ++k) mult += lam.v[k] * (v.v[k] - sino_u.v[k]);
    Image du = u - u_tilde;
    Sinogram dv = v - v_tilde;
    return f_val + pen + cross + mult + 0.5 / sigma1 * dot(du, du) + 0.5 / sigma2 * dot(dv, dv);
}

struct DivergenceGuard {
    double prev = 0.0;
    bool has_prev = false;
    int streak = 0;

    // true when the energy rose by >1% for 10 consecutive iterations
    bool update(double e) {
        if (has_prev) {
            if (e - prev > 0.01 * std::max(std::abs(prev), 1e-12))
                ++streak;
            else
                streak = 0;
        }
        prev = e;
        has_prev = true;
        return streak >= 10;
    }
};

double relative_step(const Image& u_new, const Image& u_old) {
    double num = 0.0, den = 0.0;
    for (size_t k = 0; k < u_new.v.size(); ++k) {
        const double d = u_new.v[k] - u_old.v[k];
        num += d * d;
        den += u_new.v[k] * u_new.v[k];
    }
    if (num == 0.0) return 0.0;  // includes the 0/0 case: converged
    if (den == 0.0) return std::numeric_limits<double>::infinity();
    return std::sqrt(num / den);
}

}  // namespace

ConditionReport check_conditions_pre(const PrePdhgParams& pp, double K, double opnorm) {
    const ModelParams& m = pp.model;
    ConditionReport rep;
    {
        const double lhs = 2.0 - K * pp.tau * m.alpha;
        rep.clauses.push_back({"2 - K*tau*alpha > 0", lhs > 0.0 ? ClauseStatus::Pass : ClauseStatus::Fail, lhs, 0.0});
    }
    {
        // sufficient for M - (2K^2/eta + K alpha) I > 0 via the eigenvalue bound
        Clause c{"gamma - opnorm/lambda > 2K^2/eta + K*alpha", ClauseStatus::Fail, 0.0, 0.0};
        if (m.eta == 0.0) {
            c.lhs = pp.gamma - opnorm / m.lambda;
            c.rhs = std::numeric_limits<double>::infinity();
        } else {
            c.lhs = pp.gamma - opnorm / m.lambda;
            c.rhs = 2.0 * K * K / m.eta + K * m.alpha;
            if (c.lhs > c.rhs) c.status = ClauseStatus::Pass;
        }
        rep.clauses.push_back(c);
    }
    {
        const double lhs = pp.gamma * m.lambda;
        rep.clauses.push_back({"gamma*lambda > opnorm (M psd)",
                               lhs > opnorm ? ClauseStatus::Pass : ClauseStatus::Fail, lhs, opnorm});
    }
    return rep;
}

ConditionReport check_conditions_fs(const FsPdhgParams& fp, double K, double w_max) {
    const ModelParams& m = fp.model;
    ConditionReport rep;
    {
        const double lhs = 2.0 - K * fp.tau * m.alpha;
        rep.clauses.push_back({"2 - K*tau*alpha > 0", lhs > 0.0 ? ClauseStatus::Pass : ClauseStatus::Fail, lhs, 0.0});
    }
    {
        Clause c{"K*sigma1/(1-K*alpha) < eta/(2K)", ClauseStatus::Fail, 0.0, 0.0};
        const double denom = 1.0 - K * m.alpha;
        if (denom <= 0.0) {
            c.status = ClauseStatus::Inapplicable;  // clause undefined as written
            c.lhs = denom;
        } else {
            c.lhs = K * fp.sigma1 / denom;
            c.rhs = m.eta / (2.0 * K);
            if (c.lhs < c.rhs) c.status = ClauseStatus::Pass;
        }
        rep.clauses.push_back(c);
    }
    {
        const double w4 = w_max * w_max * w_max * w_max;
        const double lhs =
            1.0 / (2.0 * fp.sigma2) - 4.0 / fp.rho * (w4 / (m.lambda * m.lambda) + 1.0 / (fp.sigma2 * fp.sigma2));
        rep.clauses.push_back({"1/(2 sigma2) - (4/rho)(wmax^4/lambda^2 + 1/sigma2^2) > 0",
                               lhs > 0.0 ? ClauseStatus::Pass : ClauseStatus::Fail, lhs, 0.0});
    }
    return rep;
}

double default_gamma(const ModelParams& m, double K, double opnorm) {
    double g = opnorm / m.lambda + K * m.alpha;
    if (m.eta > 0.0) g += 2.0 * K * K / m.eta;
    return std::max(1.05 * g, 1.0);
}

Image pre_update_u(const Image& u, const GradField& p, const GradField& q, const Sinogram& Y,
                   const Sinogram& W, const LinearOperator& op, const ModelParams& m, double gamma) {
    Sinogram wwy = Y;
    for (size_t k = 0; k < wwy.v.size(); ++k) wwy.v[k] *= W.v[k] * W.v[k];
    Image atwy = (1.0 / m.lambda) * op.adjoint(wwy);

    Sinogram sino_u = op.forward(u);
    for (size_t k = 0; k < sino_u.v.size(); ++k) sino_u.v[k] *= W.v[k] * W.v[k];
    Image atwau = op.adjoint(sino_u);

    GradField pq = p;
    for (size_t k = 0; k < pq.px.v.size(); ++k) {
        pq.px.v[k] += m.alpha * q.px.v[k];
        pq.py.v[k] += m.alpha * q.py.v[k];
    }
    Image d = div(pq);

    Image z(u.rows, u.cols);
    for (size_t k = 0; k < z.v.size(); ++k)
        z.v[k] = (atwy.v[k] + d.v[k] + gamma * u.v[k] - atwau.v[k] / m.lambda) / gamma;
    return proj_box(z, m.c);
}

GradField update_q(const GradField& q, const Image& ubar, double tau, double alpha) {
    GradField g = grad(ubar);
    GradField z(q.px.rows, q.px.cols);
    for (size_t k = 0; k < z.px.v.size(); ++k) {
        z.px.v[k] = q.px.v[k] - tau * alpha * g.px.v[k];
        z.py.v[k] = q.py.v[k] - tau * alpha * g.py.v[k];
    }
    return proj_disk(z);
}

GradField update_p(const GradField& p, const Image& ubar, double beta, double eta, SProjection mode) {
    GradField g = grad(ubar);
    GradField z(p.px.rows, p.px.cols);
    const double shrink = 1.0 / (1.0 + eta * beta);
    for (size_t k = 0; k < z.px.v.size(); ++k) {
        z.px.v[k] = (p.px.v[k] + beta * g.px.v[k]) * shrink;
        z.py.v[k] = (p.py.v[k] + beta * g.py.v[k]) * shrink;
    }
    return proj_box_pair(z, mode);
}

Sinogram update_lambda(const Sinogram& lam, const Sinogram& v, const Sinogram& sino_u, double rho) {
    Sinogram r(lam.rows, lam.cols);
    for (size_t k = 0; k < r.v.size(); ++k) r.v[k] = lam.v[k] + rho * (v.v[k] - sino_u.v[k]);
    return r;
}

Image fs_update_u(const Image& u, const GradField& p, const GradField& q, const Sinogram& lam,
                  const LinearOperator& op, double sigma1, double alpha, double c) {
    Image atl = op.adjoint(lam);
    GradField pq = p;
    for (size_t k = 0; k < pq.px.v.size(); ++k) {
        pq.px.v[k] += alpha * q.px.v[k];
        pq.py.v[k] += alpha * q.py.v[k];
    }
    Image d = div(pq);
    Image z(u.rows, u.cols);
    for (size_t k = 0; k < z.v.size(); ++k) z.v[k] = u.v[k] + sigma1 * (d.v[k] + atl.v[k]);
    return proj_box(z, c);
}

Sinogram update_v(const Sinogram& v, const Sinogram& lam, const Sinogram& Y, const Sinogram& W,
                  double sigma2, double lambda) {
    Sinogram r(v.rows, v.cols);
    for (size_t k = 0; k < r.v.size(); ++k) {
        const double w2l = W.v[k] * W.v[k] / lambda;
        r.v[k] = (v.v[k] / sigma2 - lam.v[k] + Y.v[k] * w2l) / (1.0 / sigma2 + w2l);
    }
    return r;
}

double energy_L_lambda(const Image& u, const GradField& q, const GradField& p, const Image& u_tilde,
                       const LinearOperator& op, const Sinogram& W, const Sinogram& Y,
                       const ModelParams& m, double gamma) {
    Sinogram sino_u = op.forward(u);
    Sinogram sino_diff = sino_u - op.forward(u_tilde);
    return energy_pre_core(u, q, p, u_tilde, sino_u, sino_diff, W, Y, m, gamma);
}

double energy_L_sigma(const Sinogram& lam, const Image& u, const Sinogram& v, const GradField& q,
                      const GradField& p, const Image& u_tilde, const Sinogram& v_tilde,
                      const LinearOperator& op, const Sinogram& W, const Sinogram& Y,
                      const FsPdhgParams& fp) {
    Sinogram sino_u = op.forward(u);
    return energy_fs_core(lam, u, v, q, p, u_tilde, v_tilde, sino_u, W, Y, fp.model, fp.sigma1, fp.sigma2);
}

SolveResult run_pre_pdhg(const LinearOperator& op, const Sinogram& Y, const Sinogram& W,
                         const PrePdhgParams& pp_in, const Image* u0) {
    PrePdhgParams pp = pp_in;
    pp.validate();
    if (!Y.same_shape(W)) throw std::invalid_argument("run_pre_pdhg: Y/W shape mismatch");
    const ModelParams& m = pp.model;
    const int n = op.image_n();

    if (pp.gamma == 0.0)
        pp.gamma = default_gamma(m, std::sqrt(8.0), weighted_op_norm(op, &W, 50));
    const double gamma = pp.gamma;

    SolveResult res;
    res.u = u0 ? proj_box(*u0, m.c) : Image(n, n);
    res.record.init_mode = u0 ? "custom" : "zero";
    GradField q(n, n), p(n, n);

    // fixed data term and the running forward projection of the iterate
    Sinogram wwy = Y;
    for (size_t k = 0; k < wwy.v.size(); ++k) wwy.v[k] *= W.v[k] * W.v[k];
    const Image atwy = (1.0 / m.lambda) * op.adjoint(wwy);
    Sinogram sino_u = op.forward(res.u);

    DivergenceGuard guard;
    const auto t_start = std::chrono::steady_clock::now();

    for (int k = 1; k <= pp.max_iters; ++k) {
        // Step 1: preconditioned u-step (gradient of the weighted fidelity
        // applied through the cached forward projection)
        Sinogram ws = sino_u;
        for (size_t idx = 0; idx < ws.v.size(); ++idx) ws.v[idx] *= W.v[idx] * W.v[idx];
        Image atwau = op.adjoint(ws);
        GradField pq = p;
        for (size_t idx = 0; idx < pq.px.v.size(); ++idx) {
            pq.px.v[idx] += m.alpha * q.px.v[idx];
            pq.py.v[idx] += m.alpha * q.py.v[idx];
        }
        Image dv = div(pq);
        Image z(n, n);
        for (size_t idx = 0; idx < z.v.size(); ++idx)
            z.v[idx] = (atwy.v[idx] + dv.v[idx] + gamma * res.u.v[idx] - atwau.v[idx] / m.lambda) / gamma;
        Image u_new = proj_box(z, m.c);

        // Step 2: extrapolation
        Image ubar(n, n);
        for (size_t idx = 0; idx < ubar.v.size(); ++idx) ubar.v[idx] = 2.0 * u_new.v[idx] - res.u.v[idx];

        // Steps 3-4: dual blocks
        q = update_q(q, ubar, pp.tau, m.alpha);
        p = update_p(p, ubar, pp.beta, m.eta, m.s_projection);

        Sinogram sino_new = op.forward(u_new);
        const double rel = relative_step(u_new, res.u);
        const double energy =
            energy_pre_core(u_new, q, p, res.u, sino_new, sino_new - sino_u, W, Y, m, gamma);
        const double fid = fidelity_value(sino_new, Y, W, m.lambda);
        const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t_start).count();
        res.record.append(k, energy, rel, fid, ms);
        res.record.iterations = k;

        if (!std::isfinite(energy) || !u_new.all_finite())
            throw SolverDivergence("run_pre_pdhg: non-finite iterate at iteration " + std::to_string(k),
                                   res.record);
        if (guard.update(energy))
            throw SolverDivergence("run_pre_pdhg: energy increased >1% for 10 consecutive iterations (at iteration " +
                                       std::to_string(k) + ")",
                                   res.record);

        res.u = std::move(u_new);
        sino_u = std::move(sino_new);
        if (rel <= pp.tol) {
            res.record.converged = true;
            break;
        }
    }
    return res;
}

SolveResult run_fs_pdhg(const LinearOperator& op, const Sinogram& Y, const Sinogram& W,
                        const FsPdhgParams& fp_in, const Image* u0) {
    FsPdhgParams fp = fp_in;
    fp.validate();
    if (!Y.same_shape(W)) throw std::invalid_argument("run_fs_pdhg: Y/W shape mismatch");
    const ModelParams& m = fp.model;
    const int n = op.image_n();

    SolveResult res;
    res.u = u0 ? proj_box(*u0, m.c) : Image(n, n);
    res.record.init_mode = u0 ? "custom" : "zero";
    GradField q(n, n), p(n, n);
    Sinogram v(Y.rows, Y.cols), lam(Y.rows, Y.cols);
    Sinogram sino_u = op.forward(res.u);

    DivergenceGuard guard;
    const auto t_start = std::chrono::steady_clock::now();

    for (int k = 1; k <= fp.max_iters; ++k) {
        lam = update_lambda(lam, v, sino_u, fp.rho);
        Image u_new = fs_update_u(res.u, p, q, lam, op, fp.sigma1, m.alpha, m.c);

        Image ubar(n, n);
        for (size_t idx = 0; idx < ubar.v.size(); ++idx) ubar.v[idx] = 2.0 * u_new.v[idx] - res.u.v[idx];

        Sinogram v_new = update_v(v, lam, Y, W, fp.sigma2, m.lambda);
        q = update_q(q, ubar, fp.tau, m.alpha);
        p = update_p(p, ubar, fp.beta, m.eta, m.s_projection);

        Sinogram sino_new = op.forward(u_new);
        const double rel = relative_step(u_new, res.u);
        const double energy =
            energy_fs_core(lam, u_new, v_new, q, p, res.u, v, sino_new, W, Y, m, fp.sigma1, fp.sigma2);
        const double fid = fidelity_value(sino_new, Y, W, m.lambda);
        const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t_start).count();
        res.record.append(k, energy, rel, fid, ms);
        res.record.iterations = k;
        res.record.max_v_norm = std::max(res.record.max_v_norm, norm2(v_new));

        if (!std::isfinite(energy) || !u_new.all_finite())
            throw SolverDivergence("run_fs_pdhg: non-finite iterate at iteration " + std::to_string(k),
                                   res.record);
        if (guard.update(energy))
            throw SolverDivergence("run_fs_pdhg: energy increased >1% for 10 consecutive iterations (at iteration " +
                                       std::to_string(k) + ")",
                                   res.record);

        res.u = std::move(u_new);
        v = std::move(v_new);
        sino_u = std::move(sino_new);
        if (rel <= fp.tol) {
            res.record.converged = true;
            break;
        }
    }
    return res;
}

Preset preset(const std::string& name) {
    if (name == "proposed") return {"proposed", 0.75, std::nullopt, WeightSource::Adaptive};
    if (name == "tv_mar") return {"tv_mar", 0.0, 0.0, WeightSource::Binary};
    if (name == "aitv_binary") return {"aitv_binary", 0.75, std::nullopt, WeightSource::Binary};
    throw std::invalid_argument("preset: unknown name '" + name + "'");
}

}  // namespace mar

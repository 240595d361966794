#include "risolve/increment.hpp"

#include "risolve/errors.hpp"

#include <algorithm>
#include <cmath>

namespace risolve {

namespace {

int node_count(const IncrementData& data) {
    return static_cast<int>(data.lumped_weights->size());
}

// sup of |D^2 W0| over the Euclidean ball of radius r, by finite differences
// of the gradient when the density carries no analytic bound
double estimate_curvature(const EnergyDensity& energy, int m, double r) {
    if (energy.curvature_bound) return energy.curvature_bound(r);
    const double step = 1e-5;
    std::vector<double> v(m), gp(m), gm(m);
    double bound = 0.0;
    const int samples = 64;
    for (int s = 0; s < samples; ++s) {
        for (int i = 0; i < m; ++i)
            v[i] = r * std::sin(0.7 * (s + 1) + 1.3 * i) * std::cos(0.3 * s);
        for (int i = 0; i < m; ++i) {
            std::vector<double> vp(v), vm(v);
            vp[i] += step;
            vm[i] -= step;
            energy.gradient(vp, gp);
            energy.gradient(vm, gm);
            double row = 0.0;
            for (int j = 0; j < m; ++j) row += std::abs(gp[j] - gm[j]) / (2.0 * step);
            bound = std::max(bound, row);
        }
    }
    return 1.5 * bound;
}

struct Workspace {
    Vector grad, y, next, trial, gw;
    std::vector<double> block, out_block;
};

// gradient of the smooth part g(v) = v·Kv/2 + sum_i w_i W0(v_i) - b·v
void smooth_gradient(const IncrementData& data, const Vector& v, Vector& grad,
                     std::vector<double>& gblock) {
    const int m = data.m;
    const int n = node_count(data);
    if (data.stiffness)
        data.stiffness->multiply(v.data(), grad.data());
    else
        std::fill(grad.begin(), grad.end(), 0.0);
    gblock.resize(m);
    for (int i = 0; i < n; ++i) {
        const double w = (*data.lumped_weights)[i];
        data.energy->gradient(std::span<const double>(v.data() + i * m, m), gblock);
        for (int c = 0; c < m; ++c)
            grad[i * m + c] += w * gblock[c] - (*data.load)[i * m + c];
    }
}

// v_next = p + prox_{gamma w_i R1}( v - gamma*grad - p ) nodewise
void prox_step(const IncrementData& data, const Vector& v, const Vector& grad, double gamma,
               const Vector& p, Vector& out, std::vector<double>& block,
               std::vector<double>& out_block) {
    const int m = data.m;
    const int n = node_count(data);
    block.resize(m);
    out_block.resize(m);
    for (int i = 0; i < n; ++i) {
        const double w = (*data.lumped_weights)[i];
        for (int c = 0; c < m; ++c)
            block[c] = v[i * m + c] - gamma * grad[i * m + c] - p[i * m + c];
        data.dissipation->prox(block, gamma * w, out_block);
        for (int c = 0; c < m; ++c) out[i * m + c] = p[i * m + c] + out_block[c];
    }
}

double scaled_residual(const Vector& a, const Vector& b) {
    double r = 0.0, mag = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        r = std::max(r, std::abs(a[i] - b[i]));
        mag = std::max(mag, std::abs(b[i]));
    }
    return r / (1.0 + mag);
}

} // namespace

double increment_objective(const IncrementData& data, const Vector& v, const Vector& u_prev) {
    const int m = data.m;
    const int n = node_count(data);
    double obj = data.stiffness ? 0.5 * data.stiffness->quadratic(v) : 0.0;
    std::vector<double> diff(m);
    for (int i = 0; i < n; ++i) {
        const double w = (*data.lumped_weights)[i];
        const std::span<const double> vi(v.data() + i * m, m);
        for (int c = 0; c < m; ++c) diff[c] = vi[c] - u_prev[i * m + c];
        obj += w * (data.dissipation->evaluate(diff) + data.energy->value(vi));
        for (int c = 0; c < m; ++c) obj -= (*data.load)[i * m + c] * vi[c];
    }
    return obj;
}

StepResult minimize_increment_data(const IncrementData& data, const Vector& u_prev,
                                   const StepOptions& opts, const Vector* warm_start) {
    const int m = data.m;
    const int n = node_count(data);
    const int nd = n * m;
    const double w_max = *std::max_element(data.lumped_weights->begin(), data.lumped_weights->end());

    double lambda_k = data.stiffness_lambda_max;
    if (data.stiffness && lambda_k < 0.0) lambda_k = largest_eigenvalue(*data.stiffness);
    if (!data.stiffness) lambda_k = 0.0;

    auto box_radius = [&](const Vector& v) {
        return (norm_inf(v) + 1.0) * std::sqrt(static_cast<double>(m));
    };
    double radius = std::max(box_radius(u_prev), warm_start ? box_radius(*warm_start) : 0.0);
    double lipschitz = lambda_k + w_max * estimate_curvature(*data.energy, m, radius);
    double gamma = opts.safety_factor / std::max(lipschitz, 1e-30);

    StepResult res;
    res.certificate.objective_prev = increment_objective(data, u_prev, u_prev);

    Workspace ws;
    ws.grad.assign(nd, 0.0);
    ws.next.assign(nd, 0.0);
    ws.trial.assign(nd, 0.0);

    Vector v = warm_start ? *warm_start : u_prev;

    // stuck states: if one plain step from u_prev stays within tolerance, the
    // previous state is already a certified minimizer
    smooth_gradient(data, u_prev, ws.grad, ws.gw);
    prox_step(data, u_prev, ws.grad, gamma, u_prev, ws.next, ws.block, ws.out_block);
    if (scaled_residual(ws.next, u_prev) <= opts.tolerance) {
        res.minimizer = u_prev;
        res.certificate.iterations = 1;
        res.certificate.residual = scaled_residual(ws.next, u_prev);
        res.certificate.objective = res.certificate.objective_prev;
        res.certificate.el_violation = el_residual_data(data, res.minimizer, u_prev);
        return res;
    }

    double f_curr = increment_objective(data, v, u_prev);
    Vector v_old = v;
    double theta = 1.0;
    int rebounds = 0;

    for (int it = 1; it <= opts.max_iterations; ++it) {
        res.certificate.iterations = it;
        // momentum extrapolation
        if (opts.acceleration && theta > 1.0) {
            const double beta = (theta - 1.0) / (0.5 * (1.0 + std::sqrt(1.0 + 4.0 * theta * theta)));
            for (int i = 0; i < nd; ++i) ws.trial[i] = v[i] + beta * (v[i] - v_old[i]);
        } else {
            ws.trial = v;
        }
        smooth_gradient(data, ws.trial, ws.grad, ws.gw);
        prox_step(data, ws.trial, ws.grad, gamma, u_prev, ws.next, ws.block, ws.out_block);
        double f_next = increment_objective(data, ws.next, u_prev);

        if (f_next > f_curr) {
            // restart without momentum; a plain step with a valid Lipschitz
            // constant cannot increase the objective
            smooth_gradient(data, v, ws.grad, ws.gw);
            prox_step(data, v, ws.grad, gamma, u_prev, ws.next, ws.block, ws.out_block);
            f_next = increment_objective(data, ws.next, u_prev);
            theta = 1.0;
            if (f_next > f_curr + 1e-12 * (1.0 + std::abs(f_curr))) {
                const double needed = box_radius(ws.next);
                if (needed > radius && rebounds < 4) {
                    radius = needed + 1.0;
                    lipschitz = lambda_k + w_max * estimate_curvature(*data.energy, m, radius);
                    gamma = opts.safety_factor / std::max(lipschitz, 1e-30);
                    ++rebounds;
                    continue;
                }
                throw NonConvexTotal(
                    "objective increased along a plain descent step; negative curvature "
                    "exceeds the declared bound");
            }
        }

        // keep the step size valid if the iterate left the curvature box
        if (box_radius(ws.next) > radius) {
            radius = box_radius(ws.next) + 1.0;
            lipschitz = lambda_k + w_max * estimate_curvature(*data.energy, m, radius);
            gamma = opts.safety_factor / std::max(lipschitz, 1e-30);
        }

        const double proxy = scaled_residual(ws.next, v);
        v_old = v;
        v = ws.next;
        f_curr = f_next;
        theta = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * theta * theta));

        if (proxy <= opts.tolerance) {
            // certify with one plain step from the candidate
            smooth_gradient(data, v, ws.grad, ws.gw);
            prox_step(data, v, ws.grad, gamma, u_prev, ws.next, ws.block, ws.out_block);
            const double certified = scaled_residual(ws.next, v);
            const double f_cert = increment_objective(data, ws.next, u_prev);
            if (f_cert <= f_curr) {
                v_old = v;
                v = ws.next;
                f_curr = f_cert;
            }
            if (certified <= opts.tolerance) {
                res.certificate.residual = certified;
                break;
            }
        }
        if (it == opts.max_iterations)
            throw NoConvergence("minimize_increment: iteration cap reached", -1, proxy);
    }

    res.minimizer = v;
    res.certificate.objective = f_curr;
    res.certificate.objective_decreased =
        f_curr <= res.certificate.objective_prev + 1e-12 * (1.0 + std::abs(f_curr));
    res.certificate.el_violation = el_residual_data(data, res.minimizer, u_prev);
    return res;
}

double el_residual_data(const IncrementData& data, const Vector& u_k, const Vector& u_prev) {
    const int m = data.m;
    const int n = node_count(data);
    Vector grad(n * m);
    std::vector<double> gblock;
    smooth_gradient(data, u_k, grad, gblock);

    Vector delta(n * m);
    for (int i = 0; i < n * m; ++i) delta[i] = u_k[i] - u_prev[i];

    double s_r = 0.0; // sum_i w_i R1(delta_i)
    std::vector<double> block(m);
    for (int i = 0; i < n; ++i) {
        for (int c = 0; c < m; ++c) block[c] = delta[i * m + c];
        s_r += (*data.lumped_weights)[i] * data.dissipation->evaluate(block);
    }
    const double g_dot_delta = dot(grad, delta);

    // data scale: gradient entries live on the scale of L*(1+|u|)
    double lambda_k = data.stiffness_lambda_max;
    if (data.stiffness && lambda_k < 0.0) lambda_k = largest_eigenvalue(*data.stiffness);
    if (!data.stiffness) lambda_k = 0.0;
    const double w_max = *std::max_element(data.lumped_weights->begin(), data.lumped_weights->end());
    const double radius = (std::max(norm_inf(u_k), norm_inf(u_prev)) + 1.0) * std::sqrt(double(m));
    const double lipschitz = lambda_k + w_max * estimate_curvature(*data.energy, m, radius);
    const double scale =
        1.0 + lipschitz * (1.0 + std::max(norm_inf(u_k), norm_inf(u_prev))) + norm_inf(*data.load);

    // xi = 0 and xi = 2*delta bracket the inequality in the direction delta
    double worst = std::max(s_r + g_dot_delta, -(s_r + g_dot_delta));

    // basis probes xi = delta +- eps*e at a single node component, reported
    // per unit probe length
    const double eps = 1e-6 * (1.0 + norm_inf(delta));
    std::vector<double> pert(m);
    for (int i = 0; i < n; ++i) {
        const double w = (*data.lumped_weights)[i];
        for (int c = 0; c < m; ++c) block[c] = delta[i * m + c];
        const double r_base = data.dissipation->evaluate(block);
        for (int c = 0; c < m; ++c) {
            for (int sgn = -1; sgn <= 1; sgn += 2) {
                pert = block;
                pert[c] += sgn * eps;
                const double viol =
                    -sgn * eps * grad[i * m + c] + w * (r_base - data.dissipation->evaluate(pert));
                worst = std::max(worst, viol / eps);
            }
        }
    }
    return std::max(worst, 0.0) / scale;
}

namespace {

IncrementData assemble_step_data(const FemSpace& space, double t_k, const ProblemSpec& spec,
                                 SparseSymmetric& k_store, Vector& w_store, Vector& b_store) {
    k_store = assemble_stiffness(space, spec.tensor, t_k);
    w_store = lumped_mass(space);
    b_store = assemble_load(space, spec.force, t_k);
    IncrementData data;
    data.stiffness = &k_store;
    data.lumped_weights = &w_store;
    data.load = &b_store;
    data.dissipation = &spec.dissipation;
    data.energy = &spec.energy;
    data.m = space.m;
    return data;
}

} // namespace

StepResult minimize_increment(const FemSpace& space, const NodalField& u_prev, double t_k,
                              const ProblemSpec& spec, const StepOptions& opts) {
    SparseSymmetric k;
    Vector w, b;
    const IncrementData data = assemble_step_data(space, t_k, spec, k, w, b);
    StepResult res = minimize_increment_data(data, u_prev.coeffs, opts);
    return res;
}

double el_residual(const FemSpace& space, const NodalField& u_k, const NodalField& u_prev,
                   double t_k, const ProblemSpec& spec) {
    SparseSymmetric k;
    Vector w, b;
    const IncrementData data = assemble_step_data(space, t_k, spec, k, w, b);
    return el_residual_data(data, u_k.coeffs, u_prev.coeffs);
}

} // namespace risolve

#include "risolve/estimates.hpp"

#include "risolve/errors.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace risolve {

FemSpace build_space(const ProblemSpec& spec, int n) {
    return make_space(spec.d == 1 ? unit_interval(n) : unit_square(n), spec.m);
}

std::vector<double> coercivity_ratios(const Trajectory& traj, const ProblemSpec& spec) {
    const FemSpace& space = *traj.space;
    const double q = spec.energy.growth_exponent_q;
    const int qi = static_cast<int>(std::lround(q));
    std::vector<double> ratios;
    ratios.reserve(traj.fields.size());
    std::vector<double> fv(spec.m);
    for (std::size_t k = 0; k < traj.fields.size(); ++k) {
        const double grad2 = std::pow(h1_seminorm(space, traj.fields[k]), 2);
        double uq;
        if (qi == 2 || qi == 4 || qi == 6) {
            uq = std::pow(lp_norm(space, traj.fields[k], qi), q);
        } else {
            uq = std::pow(l2_norm(space, traj.fields[k]), 2.0); // fallback exponent
        }
        // ||f_k||_L2 of the nodal interpolant
        NodalField f_interp = interpolate(space, SpatialFunction{
            [&](std::span<const double> x, int comp) {
                spec.force.evaluate(traj.times[k], x, fv);
                return fv[comp];
            },
            nullptr});
        const double f2 = std::pow(l2_norm(space, f_interp), 2);
        ratios.push_back((uq + grad2) / (1.0 + f2));
    }
    return ratios;
}

TimeBoundResult time_derivative_bound(const Trajectory& traj, const ProblemSpec& spec,
                                      double poincare) {
    const FemSpace& space = *traj.space;
    const double mu = spec.energy.semimonotonicity_mu;
    const double kappa = spec.tensor.kappa;
    const double denom = kappa - mu * poincare * poincare;
    if (!(denom > 0.0)) throw AdmissibilityViolation("time_derivative_bound needs mu*C_P^2 < kappa");

    TimeBoundResult res;
    std::vector<double> fv(spec.m);
    double worst_bracket = 0.0;
    for (int k = 1; k <= traj.steps(); ++k) {
        const NodalField dq = traj.difference_quotient(k);
        res.max_grad_dq = std::max(res.max_grad_dq, h1_seminorm(space, dq));

        // bracket 1 + avg ||f'|| + ||f_{k-1}||, with the time average of ||f'||
        // taken by a midpoint sample of the analytic derivative when present
        double fdot_norm = 0.0;
        const double tmid = 0.5 * (traj.times[k - 1] + traj.times[k]);
        SpatialFunction fd{
            [&](std::span<const double> x, int comp) {
                if (spec.force.time_derivative) {
                    spec.force.time_derivative(tmid, x, fv);
                } else {
                    std::vector<double> fa(spec.m), fb(spec.m);
                    spec.force.evaluate(traj.times[k], x, fa);
                    spec.force.evaluate(traj.times[k - 1], x, fb);
                    for (int c = 0; c < spec.m; ++c) fv[c] = (fa[c] - fb[c]) / traj.tau;
                }
                return fv[comp];
            },
            nullptr};
        fdot_norm = l2_norm(space, interpolate(space, fd));
        SpatialFunction fprev{
            [&](std::span<const double> x, int comp) {
                spec.force.evaluate(traj.times[k - 1], x, fv);
                return fv[comp];
            },
            nullptr};
        const double fprev_norm = l2_norm(space, interpolate(space, fprev));
        worst_bracket = std::max(worst_bracket, 1.0 + fdot_norm + fprev_norm);
    }
    res.bound_bracket = worst_bracket / denom;
    return res;
}

SpaceEstimateResult space_estimate_ratios(const Trajectory& traj, const ProblemSpec& spec,
                                          int sampled_steps) {
    const FemSpace& space = *traj.space;
    const int n_steps = traj.steps();
    const int stride = std::max(1, n_steps / std::max(sampled_steps, 1));

    SparseSymmetric k_matrix = assemble_stiffness(space, spec.tensor, 0.0);
    const Vector weights = lumped_mass(space);
    const SparseSymmetric mass = assemble_mass(space);

    SpaceEstimateResult res;
    std::vector<double> fv(spec.m);
    double f_sup = 0.0;
    for (int k = 0; k <= n_steps; ++k) {
        SpatialFunction f_at{
            [&](std::span<const double> x, int comp) {
                spec.force.evaluate(traj.times[k], x, fv);
                return fv[comp];
            },
            nullptr};
        f_sup = std::max(f_sup, l2_norm(space, interpolate(space, f_at)));
    }
    for (int k = 0; k <= n_steps; k += stride) {
        if (!spec.tensor.time_independent)
            k_matrix = assemble_stiffness(space, spec.tensor, traj.times[k]);
        Vector xi = k_matrix.apply(traj.fields[k].coeffs);
        for (int i = 0; i < space.n_nodes; ++i)
            for (int c = 0; c < space.m; ++c) xi[i * space.m + c] /= -weights[i];
        const Vector mxi = apply_mass_blockwise(space, mass, xi);
        res.max_laplace_norm = std::max(res.max_laplace_norm, std::sqrt(std::max(dot(xi, mxi), 0.0)));
    }
    const double q = spec.energy.growth_exponent_q;
    res.ratio_half = res.max_laplace_norm / (1.0 + std::pow(f_sup, std::max(1.0, (q - 1.0) / 2.0)));
    res.ratio_full = res.max_laplace_norm / (1.0 + std::pow(f_sup, q - 1.0));
    return res;
}

namespace {

// gradient of log(||grad z||_{L^p} / ||L z||_{L^2}) for the ascent polish
struct SobolevWork {
    const FemSpace* space;
    const SparseSymmetric* stiffness;
    const SparseSymmetric* mass;
    Vector weights;
    int p;

    double numerator(const Vector& z) const {
        NodalField f{z, 0.0};
        return grad_lp_norm(*space, f, p);
    }
    Vector l_apply(const Vector& z) const {
        Vector xi = stiffness->apply(z);
        const int m = space->m;
        for (int i = 0; i < space->n_nodes; ++i)
            for (int c = 0; c < m; ++c) xi[i * m + c] /= -weights[i];
        return xi;
    }
    double denominator(const Vector& z) const {
        const Vector xi = l_apply(z);
        const Vector mxi = apply_mass_blockwise(*space, *mass, xi);
        return std::sqrt(std::max(dot(xi, mxi), 0.0));
    }
    double ratio(const Vector& z) const {
        const double den = denominator(z);
        return den > 0.0 ? numerator(z) / den : 0.0;
    }

    Vector numerator_gradient(const Vector& z) const {
        const auto& mesh = space->mesh;
        const int m = space->m;
        const int nv = mesh.vertices_per_cell();
        Vector g(z.size(), 0.0);
        std::array<std::array<double, 2>, 3> grads;
        const double np = numerator(z);
        if (np <= 0.0) return g;
        for (int c = 0; c < mesh.num_cells(); ++c) {
            const double vol = mesh.cell_volume(c);
            mesh.cell_gradients(c, grads);
            const auto& cell = mesh.cells[c];
            double frob2 = 0.0;
            std::array<std::array<double, 2>, 4> cg{}; // per component gradient
            for (int comp = 0; comp < m; ++comp)
                for (int i = 0; i < mesh.dim; ++i) {
                    double gi = 0.0;
                    for (int a = 0; a < nv; ++a) {
                        const int node = space->vertex_to_node[cell[a]];
                        if (node >= 0) gi += z[node * m + comp] * grads[a][i];
                    }
                    cg[comp][i] = gi;
                    frob2 += gi * gi;
                }
            const double factor = vol * std::pow(frob2, p / 2.0 - 1.0);
            for (int a = 0; a < nv; ++a) {
                const int node = space->vertex_to_node[cell[a]];
                if (node < 0) continue;
                for (int comp = 0; comp < m; ++comp) {
                    double s = 0.0;
                    for (int i = 0; i < mesh.dim; ++i) s += cg[comp][i] * grads[a][i];
                    g[node * m + comp] += factor * s; // d/dz of (1/p)*sum vol*frob^{p/2} scaled below
                }
            }
        }
        // d||.||_p/dz = ||.||_p^{1-p} * (the accumulated sum)
        const double scale = std::pow(np, 1 - p);
        for (auto& v : g) v *= scale;
        return g;
    }

    Vector denominator_gradient(const Vector& z) const {
        const Vector xi = l_apply(z);
        const Vector mxi = apply_mass_blockwise(*space, *mass, xi);
        const double den = std::sqrt(std::max(dot(xi, mxi), 1e-300));
        // d/dz sqrt(xi^T M xi) with xi = -W^{-1} K z
        Vector winv_mxi(mxi.size());
        const int m = space->m;
        for (int i = 0; i < space->n_nodes; ++i)
            for (int c = 0; c < m; ++c) winv_mxi[i * m + c] = mxi[i * m + c] / weights[i];
        Vector g = stiffness->apply(winv_mxi);
        for (auto& v : g) v /= -den; // chain through xi = -W^{-1}Kz
        return g;
    }
};

} // namespace

double discrete_sobolev_ratio(const FemSpace& space, const EllipticTensor& tensor, double t,
                              int trials, int p, std::uint64_t seed, int ascent_iterations) {
    if (trials < 1) throw Error("discrete_sobolev_ratio: trials must be >= 1");
    SobolevWork work;
    const SparseSymmetric k = assemble_stiffness(space, tensor, t);
    const SparseSymmetric mass = assemble_mass(space);
    work.space = &space;
    work.stiffness = &k;
    work.mass = &mass;
    work.weights = lumped_mass(space);
    work.p = p;

    const int nd = space.n_dofs();
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);

    auto normalize = [](Vector& z) {
        const double n2 = norm2(z);
        if (n2 > 0.0)
            for (auto& v : z) v /= n2;
    };

    std::vector<Vector> seeds;
    {
        // the lowest stiffness mode is a strong candidate maximizer
        FemSpace scalar = (space.m == 1) ? space : make_space(space.mesh, 1);
        EigResult eig = poincare_eigenpair(scalar);
        Vector z(nd, 0.0);
        for (int i = 0; i < space.n_nodes; ++i)
            for (int c = 0; c < space.m; ++c) z[i * space.m + c] = eig.vector[i];
        normalize(z);
        seeds.push_back(std::move(z));
    }

    double best = 0.0;
    Vector best_z;
    auto consider = [&](const Vector& z) {
        const double r = work.ratio(z);
        if (r > best) {
            best = r;
            best_z = z;
        }
    };
    for (auto& s : seeds) consider(s);
    Vector z(nd);
    for (int trial = 0; trial < trials; ++trial) {
        for (auto& v : z) v = gauss(rng);
        normalize(z);
        consider(z);
    }

    // projected-ascent polish of the best candidate; the ratio is
    // 0-homogeneous so iterates stay normalized
    Vector grad(nd);
    double step = 0.1;
    Vector cand = best_z;
    for (int it = 0; it < ascent_iterations; ++it) {
        const double num = work.numerator(cand);
        const double den = work.denominator(cand);
        if (num <= 0.0 || den <= 0.0) break;
        const Vector gn = work.numerator_gradient(cand);
        const Vector gd = work.denominator_gradient(cand);
        for (int i = 0; i < nd; ++i) grad[i] = gn[i] / num - gd[i] / den;
        Vector next = cand;
        axpy(step, grad, next);
        normalize(next);
        if (work.ratio(next) > work.ratio(cand)) {
            cand = next;
            step *= 1.3;
        } else {
            step *= 0.4;
            if (step < 1e-8) break;
        }
    }
    consider(cand);
    return best;
}

double holder_seminorm(const Trajectory& traj, double gamma, int samples) {
    if (samples < 2) throw Error("holder_seminorm: need at least 2 samples");
    const FemSpace& space = *traj.space;
    const int d = space.mesh.dim;
    const double T = traj.times.back();
    // golden-ratio lattice in 2(1+d) dimensions, deterministic
    const double alphas[6] = {0.6180339887498949, 0.7548776662466927, 0.5698402909980532,
                              0.8191725133961645, 0.6823278038280193, 0.4656476001496971};
    double sup = 0.0;
    double xa[2] = {0.0, 0.0}, xb[2] = {0.0, 0.0};
    for (int s = 1; s <= samples; ++s) {
        auto coord = [&](int j) { return std::fmod(alphas[j] * s, 1.0); };
        const double ta = T * coord(0);
        const double tb = T * coord(1);
        for (int i = 0; i < d; ++i) {
            xa[i] = coord(2 + i);
            xb[i] = coord(2 + d + i);
        }
        double dist = std::abs(ta - tb);
        double dx2 = 0.0;
        for (int i = 0; i < d; ++i) dx2 += (xa[i] - xb[i]) * (xa[i] - xb[i]);
        dist += std::sqrt(dx2);
        if (dist < 1e-12) continue;
        for (int comp = 0; comp < space.m; ++comp) {
            const double diff = std::abs(traj.evaluate(ta, xa, comp) - traj.evaluate(tb, xb, comp));
            sup = std::max(sup, diff / std::pow(dist, gamma));
        }
    }
    return sup;
}

double holder_seminorm_scalar(const std::function<double(double)>& fn, double T, double gamma,
                              int samples) {
    const double alpha = 0.6180339887498949;
    const double beta = 0.7548776662466927;
    double sup = 0.0;
    for (int s = 1; s <= samples; ++s) {
        const double ta = T * std::fmod(alpha * s, 1.0);
        const double tb = T * std::fmod(beta * s, 1.0);
        const double dist = std::abs(ta - tb);
        if (dist < 1e-12) continue;
        sup = std::max(sup, std::abs(fn(ta) - fn(tb)) / std::pow(dist, gamma));
    }
    return sup;
}

double uniqueness_probe(const ProblemSpec& spec, const FemSpace& space, int n_steps,
                        double perturbation, std::uint64_t seed, const RunOptions& opts) {
    // the probe must resolve distances below the reported divergence, so the
    // inner tolerance is tightened by the stiffness spectral ratio
    SparseSymmetric k = assemble_stiffness(space, spec.tensor, 0.0);
    const double lam_max = largest_eigenvalue(k);
    double spectral = 1.0;
    {
        FemSpace scalar = (space.m == 1) ? space : make_space(space.mesh, 1);
        const SparseSymmetric ks = assemble_stiffness(scalar, spec.tensor, 0.0);
        const SparseSymmetric mass = assemble_mass(scalar);
        EigResult low = smallest_generalized_eigenvalue(ks, mass, 1e-6, 100);
        if (low.value > 0.0 && lam_max > 0.0) {
            // pencil eigenvalue -> coefficient-matrix eigenvalue of K alone
            const double lam_min_coeff =
                low.value * mass.quadratic(low.vector) / dot(low.vector, low.vector);
            spectral = std::min(1.0, lam_min_coeff / lam_max);
        }
    }
    RunOptions tight = opts;
    tight.step.tolerance = opts.step.tolerance * std::max(spectral, 1e-6);

    auto run_perturbed = [&](std::uint64_t s) {
        std::mt19937_64 rng(s);
        std::normal_distribution<double> gauss(0.0, 1.0);
        const double tau = spec.T / n_steps;
        Trajectory traj;
        traj.space = std::make_shared<FemSpace>(space);
        traj.tau = tau;
        traj.times.resize(n_steps + 1);
        for (int i = 0; i <= n_steps; ++i) traj.times[i] = i * tau;
        const Vector weights = lumped_mass(space);
        NodalField u0 = elliptic_project_initial(space, initial_function(spec), spec.tensor);
        traj.fields.resize(n_steps + 1);
        traj.fields[0] = u0;
        IncrementData data;
        data.stiffness = &k;
        data.lumped_weights = &weights;
        data.dissipation = &spec.dissipation;
        data.energy = &spec.energy;
        data.m = space.m;
        data.stiffness_lambda_max = lam_max;
        Vector load;
        Vector warm(space.n_dofs());
        for (int step = 1; step <= n_steps; ++step) {
            load = assemble_load(space, spec.force, traj.times[step]);
            data.load = &load;
            for (int i = 0; i < space.n_dofs(); ++i)
                warm[i] = traj.fields[step - 1].coeffs[i] + perturbation * gauss(rng);
            StepResult r =
                minimize_increment_data(data, traj.fields[step - 1].coeffs, tight.step, &warm);
            traj.fields[step].coeffs = std::move(r.minimizer);
            traj.fields[step].time = traj.times[step];
        }
        return traj;
    };

    const Trajectory a = run_perturbed(seed);
    const Trajectory b = run_perturbed(seed + 1);
    double divergence = 0.0;
    NodalField diff;
    for (int step = 0; step <= n_steps; ++step) {
        diff.coeffs.resize(space.n_dofs());
        for (int i = 0; i < space.n_dofs(); ++i)
            diff.coeffs[i] = a.fields[step].coeffs[i] - b.fields[step].coeffs[i];
        const double l2 = l2_norm(space, diff);
        const double h1 = h1_seminorm(space, diff);
        divergence = std::max(divergence, std::sqrt(l2 * l2 + h1 * h1));
    }
    return divergence;
}

// family verifiers

EstimateReport verify_coercivity(const ProblemSpec& spec, const std::vector<FamilyLevel>& levels,
                                 const RunOptions& opts) {
    EstimateReport rep;
    rep.suite = "coercivity";
    std::vector<double> maxima;
    for (std::size_t l = 0; l < levels.size(); ++l) {
        const FemSpace space = build_space(spec, levels[l].n);
        const Trajectory traj = run(spec, space, levels[l].steps, opts);
        const auto ratios = coercivity_ratios(traj, spec);
        const double mx = *std::max_element(ratios.begin(), ratios.end());
        maxima.push_back(mx);
        rep.rows.push_back({static_cast<int>(l), space.mesh.h, traj.tau, mx, 0.0, true});
    }
    const double coarsest = maxima.front();
    for (std::size_t l = 0; l < maxima.size(); ++l) {
        rep.rows[l].bound_or_trend = 1.2 * std::max(coarsest, 1e-300);
        rep.rows[l].pass = coarsest == 0.0 ? maxima[l] == 0.0 : maxima[l] <= 1.2 * coarsest;
        rep.pass = rep.pass && rep.rows[l].pass;
    }
    return rep;
}

EstimateReport verify_time_bound(const ProblemSpec& spec, const std::vector<FamilyLevel>& levels,
                                 const RunOptions& opts) {
    EstimateReport rep;
    rep.suite = "time";
    std::vector<double> measured;
    for (std::size_t l = 0; l < levels.size(); ++l) {
        const FemSpace space = build_space(spec, levels[l].n);
        const double cp = poincare_constant(space);
        const Trajectory traj = run(spec, space, levels[l].steps, opts);
        const TimeBoundResult r = time_derivative_bound(traj, spec, cp);
        measured.push_back(r.max_grad_dq);
        rep.rows.push_back(
            {static_cast<int>(l), space.mesh.h, traj.tau, r.max_grad_dq, r.bound_bracket, true});
    }
    const auto [lo, hi] = std::minmax_element(measured.begin(), measured.end());
    const bool uniform = (*lo == 0.0) ? (*hi == 0.0) : (*hi / *lo <= 2.0);
    for (auto& row : rep.rows) row.pass = uniform;
    rep.pass = uniform;
    return rep;
}

EstimateReport verify_sobolev(int dim, const std::vector<int>& ns, int trials,
                              std::uint64_t seed) {
    EstimateReport rep;
    rep.suite = "sobolev";
    const EllipticTensor tensor = identity_tensor(dim, 1);
    double prev = 0.0;
    for (std::size_t l = 0; l < ns.size(); ++l) {
        const FemSpace space = make_space(dim == 1 ? unit_interval(ns[l]) : unit_square(ns[l]), 1);
        const double r = discrete_sobolev_ratio(space, tensor, 0.0, trials, 6, seed);
        const bool ok = (l == 0) || (r <= 1.10 * prev);
        rep.rows.push_back({static_cast<int>(l), space.mesh.h, 0.0, r, 1.10 * (l ? prev : r), ok});
        rep.pass = rep.pass && ok;
        prev = r;
    }
    return rep;
}

EstimateReport verify_holder(const ProblemSpec& spec, const std::vector<FamilyLevel>& levels,
                             double gamma, int samples, const RunOptions& opts) {
    EstimateReport rep;
    rep.suite = "holder";
    std::vector<double> measured;
    for (std::size_t l = 0; l < levels.size(); ++l) {
        const FemSpace space = build_space(spec, levels[l].n);
        const Trajectory traj = run(spec, space, levels[l].steps, opts);
        const double sn = holder_seminorm(traj, gamma, samples);
        measured.push_back(sn);
        rep.rows.push_back({static_cast<int>(l), space.mesh.h, traj.tau, sn, 0.0, true});
    }
    const auto [lo, hi] = std::minmax_element(measured.begin(), measured.end());
    const bool stable = (*hi == 0.0) || (*hi <= 1.25 * std::max(*lo, 1e-300));
    for (auto& row : rep.rows) {
        row.bound_or_trend = 1.25 * *lo;
        row.pass = stable;
    }
    rep.pass = stable;
    return rep;
}

EstimateReport verify_uniqueness(const ProblemSpec& spec, const std::vector<FamilyLevel>& levels,
                                 double perturbation, const RunOptions& opts) {
    EstimateReport rep;
    rep.suite = "uniqueness";
    for (std::size_t l = 0; l < levels.size(); ++l) {
        const FemSpace space = build_space(spec, levels[l].n);
        const double div =
            uniqueness_probe(spec, space, levels[l].steps, perturbation, 97531, opts);
        const double bound = 100.0 * opts.step.tolerance;
        const bool ok = div <= bound;
        rep.rows.push_back({static_cast<int>(l), space.mesh.h,
                            spec.T / levels[l].steps, div, bound, ok});
        rep.pass = rep.pass && ok;
    }
    return rep;
}

} // namespace risolve

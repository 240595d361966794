#include "risolve/model.hpp"

#include "risolve/errors.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

namespace risolve {

namespace {

double block_norm(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

void require_finite(double v, const char* where) {
    if (!std::isfinite(v)) throw NonFiniteEvaluation(std::string(where) + " evaluated to NaN/inf");
}

} // namespace

DissipationPotential builtin_abs_dissipation(double scale) {
    if (!(scale > 0.0)) throw Error("builtin_abs_dissipation: scale must be > 0");
    DissipationPotential r;
    r.name = "abs(" + std::to_string(scale) + ")";
    r.lipschitz_bound = scale;
    r.lower_bound_coeff = scale;
    r.evaluate = [scale](std::span<const double> w) { return scale * block_norm(w); };
    r.prox = [scale](std::span<const double> x, double lambda, std::span<double> out) {
        const double nx = block_norm(x);
        const double shrink = (nx > 0.0) ? std::max(1.0 - lambda * scale / nx, 0.0) : 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) out[i] = shrink * x[i];
    };
    return r;
}

EnergyDensity builtin_double_well(double gamma) {
    if (!(gamma > 0.0)) throw Error("builtin_double_well: gamma must be > 0");
    EnergyDensity w;
    w.name = "double_well(" + std::to_string(gamma) + ")";
    w.growth_exponent_q = 4.0;
    w.growth_constant_C = std::max(2.0 / gamma, 8.0 * gamma) + 1.0;
    w.semimonotonicity_mu = 4.0 * gamma;
    w.value = [gamma](std::span<const double> v) {
        const double s = block_norm(v);
        const double t = s * s - 1.0;
        return gamma * t * t;
    };
    w.gradient = [gamma](std::span<const double> v, std::span<double> g) {
        double s2 = 0.0;
        for (double x : v) s2 += x * x;
        const double c = 4.0 * gamma * (s2 - 1.0);
        for (std::size_t i = 0; i < v.size(); ++i) g[i] = c * v[i];
    };
    w.hessian = [gamma](std::span<const double> v, std::span<double> hh) {
        const std::size_t m = v.size();
        double s2 = 0.0;
        for (double x : v) s2 += x * x;
        for (std::size_t a = 0; a < m; ++a)
            for (std::size_t b = 0; b < m; ++b)
                hh[a * m + b] = 4.0 * gamma * ((a == b ? s2 - 1.0 : 0.0) + 2.0 * v[a] * v[b]);
    };
    w.curvature_bound = [gamma](double r) {
        // eigenvalues of D^2 are 4*gamma*(3|v|^2-1) and 4*gamma*(|v|^2-1)
        const double r2 = r * r; // worst case |v|_2^2 <= m*r^2 handled by caller scaling
        return 4.0 * gamma * std::max(1.0, 3.0 * r2 + 1.0);
    };
    return w;
}

EnergyDensity builtin_quadratic(double scale) {
    if (!(scale > 0.0)) throw Error("builtin_quadratic: scale must be > 0");
    EnergyDensity w;
    w.name = "quadratic(" + std::to_string(scale) + ")";
    w.growth_exponent_q = 2.0;
    w.growth_constant_C = std::max(scale, 1.0 / scale) + 1.0;
    w.semimonotonicity_mu = 0.0;
    w.value = [scale](std::span<const double> v) {
        double s2 = 0.0;
        for (double x : v) s2 += x * x;
        return 0.5 * scale * s2;
    };
    w.gradient = [scale](std::span<const double> v, std::span<double> g) {
        for (std::size_t i = 0; i < v.size(); ++i) g[i] = scale * v[i];
    };
    w.hessian = [scale](std::span<const double> v, std::span<double> hh) {
        const std::size_t m = v.size();
        for (std::size_t a = 0; a < m; ++a)
            for (std::size_t b = 0; b < m; ++b) hh[a * m + b] = (a == b) ? scale : 0.0;
    };
    w.curvature_bound = [scale](double) { return scale; };
    return w;
}

EnergyDensity builtin_power(double q) {
    if (!(q >= 2.0)) throw Error("builtin_power: q must be >= 2");
    EnergyDensity w;
    w.name = "power(" + std::to_string(q) + ")";
    w.growth_exponent_q = q;
    w.growth_constant_C = q + 1.0;
    w.semimonotonicity_mu = 0.0;
    w.value = [q](std::span<const double> v) { return std::pow(block_norm(v), q); };
    w.gradient = [q](std::span<const double> v, std::span<double> g) {
        const double s = block_norm(v);
        const double c = (s > 0.0) ? q * std::pow(s, q - 2.0) : 0.0;
        for (std::size_t i = 0; i < v.size(); ++i) g[i] = c * v[i];
    };
    w.curvature_bound = [q](double r) { return q * (q - 1.0) * std::pow(std::max(r, 1.0), q - 2.0); };
    return w;
}

EllipticTensor identity_tensor(int d, int m, double kappa) {
    EllipticTensor a;
    a.d = d;
    a.m = m;
    a.kappa = kappa;
    a.lipschitz = 0.0;
    a.time_independent = true;
    a.name = "identity(" + std::to_string(kappa) + ")";
    const int md = m * d;
    a.evaluate = [kappa, md](double, std::span<const double>, std::span<double> out) {
        for (int r = 0; r < md; ++r)
            for (int c = 0; c < md; ++c) out[r * md + c] = (r == c) ? kappa : 0.0;
    };
    return a;
}

EllipticTensor isotropic_affine_tensor(int d, int m, double a0, double at, double ax) {
    EllipticTensor a;
    a.d = d;
    a.m = m;
    a.lipschitz = std::abs(at) + std::abs(ax);
    a.time_independent = (at == 0.0);
    a.name = "isotropic_affine";
    // domain and horizon are [0,1]^d x [0,T]; the caller keeps the factor positive
    a.kappa = a0 - std::max(0.0, -at) - std::max(0.0, -ax);
    const int md = m * d;
    a.evaluate = [a0, at, ax, md](double t, std::span<const double> x, std::span<double> out) {
        const double c = a0 + at * t + ax * x[0];
        for (int r = 0; r < md; ++r)
            for (int cc = 0; cc < md; ++cc) out[r * md + cc] = (r == cc) ? c : 0.0;
    };
    return a;
}

ForceField zero_force(int d, int m) {
    ForceField f;
    f.d = d;
    f.m = m;
    f.name = "zero";
    f.evaluate = [](double, std::span<const double>, std::span<double> out) {
        for (auto& v : out) v = 0.0;
    };
    f.time_derivative = f.evaluate;
    return f;
}

ForceField linear_time_force(int d, int m, double coeff) {
    ForceField f;
    f.d = d;
    f.m = m;
    f.name = "linear_t(" + std::to_string(coeff) + ")";
    f.evaluate = [coeff](double t, std::span<const double>, std::span<double> out) {
        for (auto& v : out) v = coeff * t;
    };
    f.time_derivative = [coeff](double, std::span<const double>, std::span<double> out) {
        for (auto& v : out) v = coeff;
    };
    return f;
}

ForceField rough_power_force(int d, int m, double coeff, double exponent) {
    if (!(exponent > 0.0 && exponent < 1.0))
        throw Error("rough_power_force: exponent must lie in (0,1)");
    ForceField f;
    f.d = d;
    f.m = m;
    // f' ~ t^(exponent-1) lies in L^a exactly for a < 1/(1-exponent)
    f.time_exponent_a = 1.0 / (1.0 - exponent) - 1e-9;
    f.name = "rough_power";
    auto profile = [d](std::span<const double> x) {
        double p = 1.0;
        for (int i = 0; i < d; ++i) p *= std::sin(std::numbers::pi * x[i]);
        return p;
    };
    f.evaluate = [coeff, exponent, profile](double t, std::span<const double> x, std::span<double> out) {
        const double v = coeff * std::pow(std::max(t, 0.0), exponent) * profile(x);
        for (auto& o : out) o = v;
    };
    f.time_derivative = [coeff, exponent, profile](double t, std::span<const double> x, std::span<double> out) {
        const double v = (t > 0.0) ? coeff * exponent * std::pow(t, exponent - 1.0) * profile(x) : 0.0;
        for (auto& o : out) o = v;
    };
    return f;
}

std::function<void(std::span<const double>, std::span<double>)> zero_initial(int) {
    return [](std::span<const double>, std::span<double> out) {
        for (auto& v : out) v = 0.0;
    };
}

std::function<void(std::span<const double>, std::span<double>)> constant_initial(std::vector<double> value) {
    return [value = std::move(value)](std::span<const double>, std::span<double> out) {
        for (std::size_t i = 0; i < out.size(); ++i) out[i] = value[i % value.size()];
    };
}

namespace {

struct Sampler {
    std::mt19937_64 rng;
    std::uniform_real_distribution<double> unit{-1.0, 1.0};
    explicit Sampler(std::uint64_t seed) : rng(seed) {}
    void box(double radius, std::span<double> out) {
        for (auto& v : out) v = radius * unit(rng);
    }
    double positive() { return 0.5 * (unit(rng) + 1.0); }
};

} // namespace

AdmissibilityReport check_admissibility(const ProblemSpec& spec, double poincare_constant,
                                        const SampleOptions& opts) {
    AdmissibilityReport rep;
    const int m = spec.m;
    const int d = spec.d;
    Sampler smp(opts.seed);
    std::vector<double> v(m), w(m), g(m), gw(m), sum(m), pv(m), pw(m);

    auto push = [&rep](std::string name, bool pass, double margin, std::string detail = "") {
        rep.checks.push_back({std::move(name), pass, margin, std::move(detail)});
    };

    // R1: 1-homogeneity, subadditivity, nonnegativity, prox nonexpansiveness
    {
        double worst_hom = 0.0, worst_sub = 0.0, worst_neg = 0.0, worst_prox = 0.0;
        for (int s = 0; s < opts.density_samples; ++s) {
            smp.box(opts.box_radius, v);
            smp.box(opts.box_radius, w);
            const double alpha = 4.0 * smp.positive();
            const double rv = spec.dissipation.evaluate(v);
            const double rw = spec.dissipation.evaluate(w);
            require_finite(rv, "R1");
            std::vector<double> av(m);
            for (int i = 0; i < m; ++i) {
                av[i] = alpha * v[i];
                sum[i] = v[i] + w[i];
            }
            const double rav = spec.dissipation.evaluate(av);
            const double rsum = spec.dissipation.evaluate(sum);
            const double scale = 1.0 + std::abs(rv) + std::abs(rw);
            worst_hom = std::max(worst_hom, std::abs(rav - alpha * rv) / scale);
            worst_sub = std::max(worst_sub, (rsum - rv - rw) / scale);
            worst_neg = std::max(worst_neg, -rv);
            const double lambda = 0.1 + 2.0 * smp.positive();
            spec.dissipation.prox(v, lambda, pv);
            spec.dissipation.prox(w, lambda, pw);
            double dp = 0.0, dx = 0.0;
            for (int i = 0; i < m; ++i) {
                dp += (pv[i] - pw[i]) * (pv[i] - pw[i]);
                dx += (v[i] - w[i]) * (v[i] - w[i]);
            }
            worst_prox = std::max(worst_prox, std::sqrt(dp) - std::sqrt(dx));
        }
        std::vector<double> zero(m, 0.0);
        const double r0 = spec.dissipation.evaluate(zero);
        push("R1 positive 1-homogeneity", worst_hom <= 1e-12, 1e-12 - worst_hom);
        push("R1 subadditivity", worst_sub <= 1e-12, 1e-12 - worst_sub);
        push("R1(0)=0, R1>=0", r0 == 0.0 && worst_neg <= 0.0, -std::max(std::abs(r0), worst_neg));
        push("prox firmly nonexpansive", worst_prox <= 1e-12, -worst_prox);
    }

    // W0: growth sandwich, gradient growth, semi-monotonicity, FD consistency
    {
        const double q = spec.energy.growth_exponent_q;
        const double C = spec.energy.growth_constant_C;
        double worst_lo = 0.0, worst_hi = 0.0, worst_dw = 0.0;
        for (int s = 0; s < opts.density_samples; ++s) {
            smp.box(opts.box_radius, v);
            const double nv = block_norm(v);
            const double wv = spec.energy.value(v);
            require_finite(wv, "W0");
            spec.energy.gradient(v, g);
            for (double gi : g) require_finite(gi, "DW0");
            // decoupled coercivity form of the q-growth sandwich; the coupled
            // one-constant variant cannot hold near the wells of a double-well
            const double lo = std::pow(nv, q) / C - C;
            const double hi = C * (std::pow(nv, q) + 1.0);
            worst_lo = std::max(worst_lo, lo - wv);
            worst_hi = std::max(worst_hi, wv - hi);
            worst_dw = std::max(worst_dw, block_norm(g) - C * (1.0 + std::pow(nv, q - 1.0)));
        }
        push("W0 growth sandwich", worst_lo <= 1e-9 && worst_hi <= 1e-9,
             -std::max(worst_lo, worst_hi));
        push("DW0 growth", worst_dw <= 1e-9, -worst_dw);

        double worst_mon = 0.0;
        const double mu = spec.energy.semimonotonicity_mu;
        for (int s = 0; s < opts.monotonicity_pairs; ++s) {
            smp.box(opts.box_radius, v);
            smp.box(opts.box_radius, w);
            spec.energy.gradient(v, g);
            spec.energy.gradient(w, gw);
            double lhs = 0.0, dist2 = 0.0;
            for (int i = 0; i < m; ++i) {
                lhs += (g[i] - gw[i]) * (v[i] - w[i]);
                dist2 += (v[i] - w[i]) * (v[i] - w[i]);
            }
            worst_mon = std::max(worst_mon, -lhs - mu * dist2);
        }
        push("W0 semi-monotonicity (declared mu)", worst_mon <= 1e-9 * (1.0 + mu), -worst_mon,
             "mu=" + std::to_string(mu));

        double worst_fd = 0.0;
        const double step = 1e-5;
        std::vector<double> vp(m), vm(m);
        for (int s = 0; s < 200; ++s) {
            smp.box(opts.box_radius, v);
            spec.energy.gradient(v, g);
            for (int i = 0; i < m; ++i) {
                vp.assign(v.begin(), v.end());
                vm.assign(v.begin(), v.end());
                vp[i] += step;
                vm[i] -= step;
                const double fd = (spec.energy.value(vp) - spec.energy.value(vm)) / (2.0 * step);
                worst_fd = std::max(worst_fd, std::abs(fd - g[i]) / (1.0 + std::abs(g[i])));
            }
        }
        push("DW0 matches finite differences", worst_fd <= 1e-6, 1e-6 - worst_fd);
    }

    // tensor: symmetry and ellipticity at sampled (t,x,xi)
    {
        const int md = m * d;
        std::vector<double> a(md * md), xi(md), x(d);
        double worst_sym = 0.0, worst_ell = 0.0;
        for (int s = 0; s < 200; ++s) {
            const double t = spec.T * smp.positive();
            for (int i = 0; i < d; ++i) x[i] = smp.positive();
            spec.tensor.evaluate(t, x, a);
            for (double av : a) require_finite(av, "A");
            for (int r = 0; r < md; ++r)
                for (int c = 0; c < md; ++c)
                    worst_sym = std::max(worst_sym, std::abs(a[r * md + c] - a[c * md + r]));
            smp.box(1.0, xi);
            double xin = 0.0, quad = 0.0;
            for (int r = 0; r < md; ++r) {
                xin += xi[r] * xi[r];
                for (int c = 0; c < md; ++c) quad += xi[r] * a[r * md + c] * xi[c];
            }
            worst_ell = std::max(worst_ell, spec.tensor.kappa * xin - quad);
        }
        push("A symmetry", worst_sym <= 1e-12, -worst_sym);
        push("A ellipticity (declared kappa)", worst_ell <= 1e-9, -worst_ell,
             "kappa=" + std::to_string(spec.tensor.kappa));
    }

    // force: finite values; optional f' consistency on the smooth range
    {
        std::vector<double> fv(m), fdot(m), fv2(m), x(d);
        double worst = 0.0;
        const double delta = 1e-5;
        for (int s = 0; s < 100; ++s) {
            const double t = spec.T * (0.1 + 0.85 * smp.positive());
            for (int i = 0; i < d; ++i) x[i] = smp.positive();
            spec.force.evaluate(t, x, fv);
            for (double fi : fv) require_finite(fi, "f");
            if (spec.force.time_derivative) {
                spec.force.time_derivative(t, x, fdot);
                spec.force.evaluate(t + delta, x, fv2);
                for (int i = 0; i < m; ++i) {
                    const double fd = (fv2[i] - fv[i]) / delta;
                    worst = std::max(worst, std::abs(fd - fdot[i]) / (1.0 + std::abs(fdot[i])));
                }
            }
        }
        if (spec.force.time_derivative)
            push("f' matches finite differences", worst <= 1e-4, 1e-4 - worst);
    }

    // mild convexity gate
    {
        const double mu = spec.energy.semimonotonicity_mu;
        const double kappa = spec.tensor.kappa;
        rep.mu_cp_margin = kappa - mu * poincare_constant * poincare_constant;
        rep.gate_ok = rep.mu_cp_margin > 0.0;
        std::ostringstream os;
        os << "mu*C_P^2=" << mu * poincare_constant * poincare_constant << " vs kappa=" << kappa;
        push("mild convexity mu*C_P^2 < kappa", rep.gate_ok, rep.mu_cp_margin, os.str());
    }

    rep.all_pass = true;
    for (const auto& c : rep.checks) rep.all_pass = rep.all_pass && c.pass;
    return rep;
}

} // namespace risolve

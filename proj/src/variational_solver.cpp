#include "fraclap/variational_solver.hpp"

#include "fraclap/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

namespace fraclap {

namespace {

double coordinate_sum(const NodePoint& p, std::size_t N) {
    if (p.x.size() != N) {
        throw InvalidArgument("nonlinearity built for dimension " + std::to_string(N) + " evaluated on a " +
                              std::to_string(p.x.size()) + "-d node");
    }
    double s = 0.0;
    for (double xi : p.x) s += xi;
    return s;
}

std::string describe_node(const Domain& domain, std::size_t q) {
    std::ostringstream os;
    os << "node " << q << " at (";
    const auto x = domain.node(q);
    for (std::size_t i = 0; i < x.size(); ++i) os << (i ? ", " : "") << x[i];
    os << ")";
    return os.str();
}

double sup_abs(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

double sup(const std::vector<double>& v) {
    double m = -std::numeric_limits<double>::infinity();
    for (double x : v) m = std::max(m, x);
    return m;
}

} // namespace

Nonlinearity builtin_example_nonlinearity(double A, double b, std::size_t N) {
    if (!std::isfinite(A) || !std::isfinite(b)) throw InvalidArgument("builtin nonlinearity needs finite A and b");
    if (N == 0) throw InvalidArgument("dimension must be positive");
    Nonlinearity nl;
    nl.name = "builtin_example";
    nl.F = [A, b, N](const NodePoint& p, double u) {
        return 0.5 * A * std::cos(coordinate_sum(p, N)) * u * u + b * std::sin(u);
    };
    nl.dF = [A, b, N](const NodePoint& p, double u) {
        return A * std::cos(coordinate_sum(p, N)) * u + b * std::cos(u);
    };
    const double b_inf = std::abs(b);
    nl.growth = {std::abs(A) / 2.0, b_inf, std::abs(A), b_inf, std::abs(A), b_inf, 0.0};
    return nl;
}

Nonlinearity builtin_example_nonlinearity(double A, std::vector<double> b_samples, std::size_t N) {
    if (!std::isfinite(A)) throw InvalidArgument("builtin nonlinearity needs finite A");
    if (N == 0) throw InvalidArgument("dimension must be positive");
    for (double v : b_samples) {
        if (!std::isfinite(v)) throw InvalidArgument("b(x) samples must be finite (b is essentially bounded)");
    }
    const double b_inf = sup_abs(b_samples);
    auto b = std::make_shared<const std::vector<double>>(std::move(b_samples));
    auto b_at = [b](const NodePoint& p) {
        if (p.index >= b->size()) throw InvalidArgument("b(x) has no sample for node " + std::to_string(p.index));
        return (*b)[p.index];
    };
    Nonlinearity nl;
    nl.name = "builtin_example";
    nl.F = [A, N, b_at](const NodePoint& p, double u) {
        return 0.5 * A * std::cos(coordinate_sum(p, N)) * u * u + b_at(p) * std::sin(u);
    };
    nl.dF = [A, N, b_at](const NodePoint& p, double u) {
        return A * std::cos(coordinate_sum(p, N)) * u + b_at(p) * std::cos(u);
    };
    nl.growth = {std::abs(A) / 2.0, b_inf, std::abs(A), b_inf, std::abs(A), b_inf, 0.0};
    return nl;
}

Nonlinearity polynomial_nonlinearity(std::vector<std::vector<double>> coefficients,
                                     std::optional<GrowthConstants> growth) {
    if (coefficients.empty()) throw InvalidArgument("polynomial nonlinearity needs at least one coefficient");
    const std::size_t nodes = coefficients.front().size();
    for (const auto& c : coefficients) {
        if (c.size() != nodes) throw InvalidArgument("all coefficient fields must have the same number of samples");
        for (double v : c) {
            if (!std::isfinite(v)) throw InvalidArgument("polynomial coefficients must be finite");
        }
    }
    auto coeffs = std::make_shared<const std::vector<std::vector<double>>>(std::move(coefficients));
    auto check = [coeffs](const NodePoint& p) {
        if (p.index >= (*coeffs)[0].size()) {
            throw InvalidArgument("polynomial coefficients have no sample for node " + std::to_string(p.index));
        }
    };

    Nonlinearity nl;
    nl.name = "polynomial";
    nl.F = [coeffs, check](const NodePoint& p, double u) {
        check(p);
        double s = 0.0;
        for (std::size_t k = coeffs->size(); k-- > 0;) s = s * u + (*coeffs)[k][p.index];
        return s;
    };
    nl.dF = [coeffs, check](const NodePoint& p, double u) {
        check(p);
        double s = 0.0;
        for (std::size_t k = coeffs->size(); k-- > 1;) s = s * u + static_cast<double>(k) * (*coeffs)[k][p.index];
        return s;
    };

    if (growth) {
        nl.growth = *growth;
    } else {
        const auto& c = *coeffs;
        const double c0 = sup_abs(c[0]);
        const double c1 = c.size() > 1 ? sup_abs(c[1]) : 0.0;
        const double c2 = c.size() > 2 ? sup_abs(c[2]) : 0.0;
        GrowthConstants g;
        // |c1 u| <= (|c1|/2)(u^2 + 1)
        g.a = c2 + 0.5 * c1;
        g.b = c0 + 0.5 * c1;
        g.c = 2.0 * c2;
        g.d = c1;
        g.A = c.size() > 2 ? 2.0 * std::max(0.0, sup(c[2])) : 0.0;
        g.B = c1;
        g.C = std::max(0.0, sup(c[0]));
        if (c.size() > 3) {
            const double inf = std::numeric_limits<double>::infinity();
            g = {inf, inf, inf, inf, inf, inf, inf};
        }
        nl.growth = g;
    }
    return nl;
}

Nonlinearity linear_nonlinearity(std::vector<double> g_samples) {
    const std::size_t n = g_samples.size();
    Nonlinearity nl = polynomial_nonlinearity({std::vector<double>(n, 0.0), std::move(g_samples)});
    nl.name = "linear";
    return nl;
}

double energy(const SpectralFunction& u, const Nonlinearity& nl, const FractionalPolynomial& w) {
    const auto& lambda = u.basis().eigenvalues();
    double quadratic = 0.0;
    for (std::size_t j = 0; j < u.size(); ++j) {
        const double wu = w(lambda[j]) * u.coeffs()[static_cast<Eigen::Index>(j)];
        quadratic += wu * wu;
    }
    const Domain& domain = u.basis().domain();
    const auto weights = domain.weights();
    const std::vector<double> v = synthesize(u);
    double potential = 0.0;
    for (std::size_t q = 0; q < v.size(); ++q) {
        const double f = nl.F(NodePoint{q, domain.node(q)}, v[q]);
        if (!std::isfinite(f)) throw NonFiniteValue("F is not finite at " + describe_node(domain, q));
        potential += weights[q] * f;
    }
    return 0.5 * quadratic - potential;
}

Eigen::VectorXd gradient(const SpectralFunction& u, const Nonlinearity& nl, const FractionalPolynomial& w) {
    const Domain& domain = u.basis().domain();
    const auto weights = domain.weights();
    const std::vector<double> v = synthesize(u);
    Eigen::VectorXd weighted(static_cast<Eigen::Index>(v.size()));
    for (std::size_t q = 0; q < v.size(); ++q) {
        const double df = nl.dF(NodePoint{q, domain.node(q)}, v[q]);
        if (!std::isfinite(df)) throw NonFiniteValue("D_uF is not finite at " + describe_node(domain, q));
        weighted[static_cast<Eigen::Index>(q)] = weights[q] * df;
    }
    Eigen::VectorXd g = -(u.basis().values().transpose() * weighted);
    const auto& lambda = u.basis().eigenvalues();
    for (Eigen::Index j = 0; j < g.size(); ++j) {
        const double wl = w(lambda[static_cast<std::size_t>(j)]);
        g[j] += wl * wl * u.coeffs()[j];
    }
    return g;
}

CoercivityCheck check_coercivity(const Nonlinearity& nl, const FractionalPolynomial& w, const SpectralBasis& basis) {
    CoercivityCheck c;
    const auto& leading = w.leading();
    c.m = m_beta(basis, leading.beta);
    c.threshold = leading.alpha * leading.alpha / c.m;
    c.margin = c.threshold - nl.growth.A;
    c.ok = nl.growth.A < c.threshold;
    return c;
}

std::vector<std::string> check_growth(const Nonlinearity& nl, const Domain& domain, double U, std::size_t samples) {
    if (samples < 2) throw InvalidArgument("growth scan needs at least 2 samples");
    const auto& g = nl.growth;
    double worst[3] = {0.0, 0.0, 0.0};
    std::size_t worst_node[3] = {0, 0, 0};
    double worst_u[3] = {0.0, 0.0, 0.0};
    for (std::size_t q = 0; q < domain.node_count(); ++q) {
        const NodePoint p{q, domain.node(q)};
        for (std::size_t s = 0; s < samples; ++s) {
            const double u = -U + 2.0 * U * static_cast<double>(s) / static_cast<double>(samples - 1);
            const double f = nl.F(p, u);
            const double df = nl.dF(p, u);
            const double excess[3] = {
                std::abs(f) - (g.a * u * u + g.b),
                std::abs(df) - (g.c * std::abs(u) + g.d),
                f - (0.5 * g.A * u * u + g.B * std::abs(u) + g.C),
            };
            for (int k = 0; k < 3; ++k) {
                if (excess[k] > worst[k]) {
                    worst[k] = excess[k];
                    worst_node[k] = q;
                    worst_u[k] = u;
                }
            }
        }
    }
    static constexpr const char* bound_names[3] = {
        "|F(x,u)| <= a u^2 + b",
        "|D_uF(x,u)| <= c |u| + d",
        "F(x,u) <= (A/2) u^2 + B |u| + C",
    };
    std::vector<std::string> warnings;
    for (int k = 0; k < 3; ++k) {
        if (worst[k] > 1e-12 * (1.0 + U * U)) {
            std::ostringstream os;
            os << "growth bound " << bound_names[k] << " violated by " << worst[k] << " at "
               << describe_node(domain, worst_node[k]) << ", u = " << worst_u[k];
            warnings.push_back(os.str());
        }
    }
    return warnings;
}

double derivative_consistency(const Nonlinearity& nl, const Domain& domain, double U, std::size_t samples, double h) {
    if (samples < 2) throw InvalidArgument("derivative scan needs at least 2 samples");
    double worst = 0.0;
    for (std::size_t q = 0; q < domain.node_count(); ++q) {
        const NodePoint p{q, domain.node(q)};
        for (std::size_t s = 0; s < samples; ++s) {
            const double u = -U + 2.0 * U * static_cast<double>(s) / static_cast<double>(samples - 1);
            const double fd = (nl.F(p, u + h) - nl.F(p, u - h)) / (2.0 * h);
            worst = std::max(worst, std::abs(fd - nl.dF(p, u)));
        }
    }
    return worst;
}

MinimizeReport minimize(const Nonlinearity& nl, const FractionalPolynomial& w, const BasisPtr& basis,
                        const MinimizeOptions& options) {
    if (!basis) throw InvalidArgument("minimize: null basis");
    const std::size_t J = basis->size();
    const auto coercivity = check_coercivity(nl, w, *basis);

    MinimizeReport report(SpectralFunction{basis});
    report.coercivity_margin = coercivity.margin;
    if (!coercivity.ok) {
        std::ostringstream os;
        os << "coercivity condition A < alpha_k^2 / M_beta_k fails: A = " << nl.growth.A
           << ", threshold = " << coercivity.threshold;
        if (!options.allow_noncoercive) throw InvalidArgument(os.str());
        report.warnings.push_back(os.str() + " (proceeding)");
    }
    if (!(options.backtrack > 0.0 && options.backtrack < 1.0)) throw InvalidArgument("backtrack factor must be in (0,1)");

    SpectralFunction u(basis);
    if (options.u0) {
        if (static_cast<std::size_t>(options.u0->size()) != J) throw InvalidArgument("u0 has the wrong length");
        u.coeffs() = *options.u0;
    }

    const auto& lambda = basis->eigenvalues();
    Eigen::VectorXd precond = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(J));
    if (options.precondition) {
        for (std::size_t j = 0; j < J; ++j) {
            const double wl = w(lambda[j]);
            precond[static_cast<Eigen::Index>(j)] = 1.0 / (wl * wl + 1.0);
        }
    }
    const double w_top = w(lambda.back());
    const double initial_step = options.precondition ? 1.0 : 1.0 / (w_top * w_top + 1.0);

    double f = energy(u, nl, w);
    Eigen::VectorXd g = gradient(u, nl, w);
    report.status = "max-iterations";
    if (options.record_log) {
        report.energy_log.push_back(f);
        report.gradient_log.push_back(g.norm());
    }

    std::size_t it = 0;
    for (;;) {
        const double gtol = options.gtol.value_or(1e-8 * (1.0 + std::abs(f)));
        if (g.norm() <= gtol) {
            report.converged = true;
            report.status = "converged";
            break;
        }
        if (it >= options.max_iters) break;

        const Eigen::VectorXd direction = -(precond.array() * g.array()).matrix();
        const double slope = g.dot(direction);
        const double noise = 1e-10 * (1.0 + std::abs(f));

        double t = initial_step;
        bool accepted = false;
        SpectralFunction trial(basis);
        double f_trial = f;
        Eigen::VectorXd g_trial;
        while (t >= 1e-20) {
            trial.coeffs() = u.coeffs() + t * direction;
            f_trial = energy(trial, nl, w);
            if (f_trial <= f + options.armijo_c1 * t * slope) {
                g_trial = gradient(trial, nl, w);
                accepted = true;
                break;
            }
            if (std::abs(f_trial - f) <= noise) {
                // Energy change is below rounding; test sufficient decrease
                // through the directional derivative instead.
                g_trial = gradient(trial, nl, w);
                if (g_trial.dot(direction) <= (2.0 * options.armijo_c1 - 1.0) * slope) {
                    accepted = true;
                    break;
                }
            }
            t *= options.backtrack;
        }
        if (!accepted) {
            report.status = "line-search-failure";
            break;
        }
        u = trial;
        f = f_trial;
        g = std::move(g_trial);
        ++it;
        if (options.record_log) {
            report.energy_log.push_back(f);
            report.gradient_log.push_back(g.norm());
        }
    }

    report.solution = u;
    report.energy = f;
    report.gradient_norm = g.norm();
    report.euler_lagrange_residual = g.cwiseAbs().maxCoeff();
    report.iterations = it;
    return report;
}

Eigen::VectorXd random_coefficients(std::size_t J, std::uint64_t seed, double scale) {
    std::mt19937_64 rng(seed);
    auto uniform = [&rng] { return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53; };
    Eigen::VectorXd c(static_cast<Eigen::Index>(J));
    for (Eigen::Index j = 0; j < c.size(); j += 2) {
        const double r = std::sqrt(-2.0 * std::log(uniform()));
        const double phi = 2.0 * std::numbers::pi * uniform();
        c[j] = scale * r * std::cos(phi);
        if (j + 1 < c.size()) c[j + 1] = scale * r * std::sin(phi);
    }
    return c;
}

std::vector<MinimizeReport> multi_start(const Nonlinearity& nl, const FractionalPolynomial& w, const BasisPtr& basis,
                                        const MinimizeOptions& options, std::size_t count, std::uint64_t seed) {
    std::vector<MinimizeReport> runs;
    runs.reserve(count);
    for (std::size_t r = 0; r < count; ++r) {
        MinimizeOptions o = options;
        if (r > 0) o.u0 = random_coefficients(basis->size(), seed + r);
        runs.push_back(minimize(nl, w, basis, o));
    }
    return runs;
}

} // namespace fraclap

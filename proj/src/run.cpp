#include "fraclap/cli_io.hpp"

#include "fraclap/error.hpp"
#include "fraclap/linear_solver.hpp"
#include "fraclap/verify.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace fraclap {

using nlohmann::json;

// ---------------------------------------------------------------------------
// CSV

std::string eigen_csv(const SpectralBasis& basis) {
    std::string out = "j,lambda,mode_index,residual\n";
    for (std::size_t j = 0; j < basis.size(); ++j) {
        out += std::to_string(j + 1);
        out += ',';
        out += format_double(basis.eigenvalue(j));
        out += ',';
        if (j < basis.modes().size()) {
            for (std::size_t i = 0; i < basis.modes()[j].size(); ++i) {
                if (i) out += ';';
                out += std::to_string(basis.modes()[j][i]);
            }
        }
        out += ',';
        if (j < basis.residuals().size()) out += format_double(basis.residuals()[j]);
        out += '\n';
    }
    return out;
}

std::string samples_csv(const Domain& domain, std::span<const double> values, const std::string& value_header) {
    if (values.size() != domain.node_count()) throw InvalidArgument("samples_csv: sample count mismatch");
    std::string out;
    for (std::size_t i = 0; i < domain.dimension(); ++i) out += "x" + std::to_string(i + 1) + ",";
    out += value_header + "\n";
    for (std::size_t q = 0; q < values.size(); ++q) {
        for (double x : domain.node(q)) {
            out += format_double(x);
            out += ',';
        }
        out += format_double(values[q]);
        out += '\n';
    }
    return out;
}

std::vector<std::vector<double>> read_samples_csv(const std::filesystem::path& path, const Domain& domain) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    std::string line;
    if (!std::getline(in, line)) throw IoError(path.string() + ": empty file");
    const std::size_t columns = static_cast<std::size_t>(std::count(line.begin(), line.end(), ',')) + 1;
    const std::size_t dim = domain.dimension();
    if (columns <= dim) {
        throw IoError(path.string() + ": expected " + std::to_string(dim) + " coordinate columns and at least one value column");
    }
    std::vector<std::vector<double>> values(columns - dim);
    std::size_t q = 0;
    while (std::getline(in, line)) {
        if (line.empty() || line == "\r") continue;
        if (q >= domain.node_count()) throw IoError(path.string() + ": more rows than quadrature nodes");
        std::stringstream ss(line);
        std::string cell;
        std::vector<double> row;
        while (std::getline(ss, cell, ',')) {
            try {
                row.push_back(std::stod(cell));
            } catch (const std::exception&) {
                throw IoError(path.string() + ": row " + std::to_string(q + 2) + " has a non-numeric cell '" + cell + "'");
            }
        }
        if (row.size() != columns) {
            throw IoError(path.string() + ": row " + std::to_string(q + 2) + " has " + std::to_string(row.size()) +
                          " cells, expected " + std::to_string(columns));
        }
        const auto x = domain.node(q);
        for (std::size_t i = 0; i < dim; ++i) {
            if (std::abs(row[i] - x[i]) > 1e-9 * (1.0 + std::abs(x[i]))) {
                throw IoError(path.string() + ": row " + std::to_string(q + 2) +
                              " coordinates do not match quadrature node " + std::to_string(q));
            }
        }
        for (std::size_t k = dim; k < columns; ++k) values[k - dim].push_back(row[k]);
        ++q;
    }
    if (q != domain.node_count()) {
        throw IoError(path.string() + ": " + std::to_string(q) + " rows for " + std::to_string(domain.node_count()) +
                      " quadrature nodes");
    }
    return values;
}

// ---------------------------------------------------------------------------
// builders

Domain build_domain(const DomainSpec& spec) {
    if (spec.kind == DomainKind::box) return make_box(spec.lengths, spec.nodes_per_axis);
    return make_polygon2d(spec.vertices, spec.h);
}

FractionalPolynomial build_polynomial(const std::vector<PolyTerm>& terms) { return FractionalPolynomial(terms); }

BasisPtr build_basis(const RunConfig& config) {
    auto domain = std::make_shared<const Domain>(build_domain(config.domain));
    if (config.basis.source == BasisSource::analytic) return analytic_box_basis(std::move(domain), config.basis.J);
    return discrete_basis(std::move(domain), config.basis.J);
}

namespace {

std::filesystem::path resolve(const RunContext& ctx, const std::string& p) {
    const std::filesystem::path path(p);
    return path.is_absolute() ? path : ctx.base_dir / path;
}

Nonlinearity build_nonlinearity(const NonlinearitySpec& spec, const Domain& domain, const RunContext& ctx) {
    if (spec.kind == "builtin_example") {
        if (spec.b_csv) {
            auto cols = read_samples_csv(resolve(ctx, *spec.b_csv), domain);
            return builtin_example_nonlinearity(spec.A, std::move(cols.front()), domain.dimension());
        }
        return builtin_example_nonlinearity(spec.A, spec.b, domain.dimension());
    }
    return polynomial_nonlinearity(read_samples_csv(resolve(ctx, spec.coefficients_csv), domain), spec.growth);
}

json basis_summary(const SpectralBasis& basis) {
    json j;
    j["source"] = to_string(basis.source());
    j["J"] = basis.size();
    j["eigenvalues"] = basis.eigenvalues();
    j["warnings"] = basis.warnings();
    if (basis.has_samples()) {
        const Eigen::MatrixXd g = basis.gram();
        j["orthonormality_error"] =
            (g - Eigen::MatrixXd::Identity(g.rows(), g.cols())).cwiseAbs().maxCoeff();
    }
    return j;
}

std::vector<double> to_vector(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

json report_json(const MinimizeReport& r) {
    json j;
    j["energy"] = r.energy;
    j["gradient_norm"] = r.gradient_norm;
    j["euler_lagrange_residual"] = r.euler_lagrange_residual;
    j["iterations"] = r.iterations;
    j["coercivity_margin"] = r.coercivity_margin;
    j["converged"] = r.converged;
    j["status"] = r.status;
    j["warnings"] = r.warnings;
    return j;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

void finish_manifest(ResultBundle& bundle, const RunConfig& config, ProblemKind kind) {
    json files = json::object();
    for (const auto& [name, contents] : bundle.files) {
        files[name] = {{"bytes", contents.size()}, {"fnv1a64", fnv1a64_hex(contents)}};
    }
    json m;
    m["artifact"] = artifact_name;
    m["version"] = artifact_version;
    m["problem"] = to_string(kind);
    m["seed"] = config.seed;
    m["config_hash"] = fnv1a64_hex(serialize_config(config));
    m["files"] = files;
    bundle.files["manifest.json"] = dump(m);
}

void run_eig(ResultBundle& bundle, const RunConfig& config) {
    const auto basis = build_basis(config);
    bundle.files["eigen.csv"] = eigen_csv(*basis);
    bundle.report["basis"] = basis_summary(*basis);
    bundle.messages.push_back("lambda_1 = " + format_double(basis->eigenvalue(0)));
    for (const auto& w : basis->warnings()) bundle.messages.push_back("warning: " + w);
}

void run_linear(ResultBundle& bundle, const RunConfig& config, const RunContext& ctx) {
    const auto basis = build_basis(config);
    const auto w = build_polynomial(config.w);
    const auto& spec = config.problem->g;
    SpectralFunction g(basis);
    if (spec.coefficients) {
        const auto& c = *spec.coefficients;
        if (c.size() > basis->size()) {
            throw ConfigError("/problem/g/coefficients", "more coefficients than basis functions (J = " +
                                                             std::to_string(basis->size()) + ")");
        }
        for (std::size_t j = 0; j < c.size(); ++j) g.coeffs()[static_cast<Eigen::Index>(j)] = c[j];
    } else {
        const auto cols = read_samples_csv(resolve(ctx, *spec.samples_csv), basis->domain());
        g = project(basis, cols.front());
    }
    const auto r = solve_linear(g, w);
    json j;
    j["strong_residual"] = r.strong_residual;
    j["weak_residual_max"] = r.weak_residual_max;
    j["solution_norm"] = r.solution_norm;
    j["inverse_bound"] = r.inverse_bound;
    j["inverse_bound_holds"] = r.inverse_bound_holds;
    j["equivalent"] = r.equivalent;
    j["coefficients"] = to_vector(r.solution.coeffs());
    bundle.report["solution"] = j;
    bundle.report["basis"] = basis_summary(*basis);
    bundle.files["eigen.csv"] = eigen_csv(*basis);
    bundle.files["solution.csv"] = samples_csv(basis->domain(), synthesize(r.solution), "u");
    bundle.messages.push_back("strong residual " + format_double(r.strong_residual) + ", weak residual " +
                              format_double(r.weak_residual_max));
}

void run_nonlinear(ResultBundle& bundle, const RunConfig& config, const RunContext& ctx) {
    const auto basis = build_basis(config);
    const auto w = build_polynomial(config.w);
    const auto& spec = *config.problem;
    const Domain& domain = basis->domain();
    const Nonlinearity nl = build_nonlinearity(spec.nonlinearity, domain, ctx);

    const auto coercivity = check_coercivity(nl, w, *basis);
    json cj;
    cj["ok"] = coercivity.ok;
    cj["threshold"] = coercivity.threshold;
    cj["margin"] = coercivity.margin;
    cj["M_beta_k"] = coercivity.m;
    bundle.report["coercivity"] = cj;
    const auto growth_warnings = check_growth(nl, domain, spec.optimizer.growth_scan_U);
    bundle.report["growth_warnings"] = growth_warnings;
    bundle.report["derivative_consistency"] = derivative_consistency(nl, domain, spec.optimizer.growth_scan_U);

    MinimizeOptions opts;
    opts.gtol = spec.optimizer.gtol;
    opts.max_iters = spec.optimizer.max_iters;
    opts.precondition = spec.optimizer.precondition;
    opts.allow_noncoercive = spec.optimizer.allow_noncoercive;
    const auto runs = multi_start(nl, w, basis, opts, spec.optimizer.multi_start, config.seed);
    const auto& best = runs.front();

    json rj = report_json(best);
    rj["coefficients"] = to_vector(best.solution.coeffs());
    // Critical point <=> weak solution of the linear problem with g = P D_uF(., u).
    {
        const auto u_samples = synthesize(best.solution);
        std::vector<double> df(u_samples.size());
        for (std::size_t q = 0; q < df.size(); ++q) df[q] = nl.dF(NodePoint{q, domain.node(q)}, u_samples[q]);
        const SpectralFunction g = project(basis, df);
        rj["weak_form_equivalent"] = equivalence_check(best.solution, g, w);
    }
    bundle.report["solution"] = rj;

    json starts = json::array();
    double lo = best.energy, hi = best.energy;
    for (const auto& r : runs) {
        starts.push_back(report_json(r));
        lo = std::min(lo, r.energy);
        hi = std::max(hi, r.energy);
    }
    bundle.report["multi_start"] = starts;
    bundle.report["energy_spread"] = hi - lo;
    bundle.report["basis"] = basis_summary(*basis);

    std::string log = "iteration,energy,gradient_norm\n";
    for (std::size_t i = 0; i < best.energy_log.size(); ++i) {
        log += std::to_string(i) + "," + format_double(best.energy_log[i]) + "," + format_double(best.gradient_log[i]) + "\n";
    }
    bundle.files["convergence.csv"] = log;
    bundle.files["eigen.csv"] = eigen_csv(*basis);
    bundle.files["solution.csv"] = samples_csv(domain, synthesize(best.solution), "u");

    for (const auto& msg : growth_warnings) bundle.messages.push_back("warning: " + msg);
    bundle.messages.push_back("energy " + format_double(best.energy) + ", Euler-Lagrange residual " +
                              format_double(best.euler_lagrange_residual) + ", " + std::to_string(best.iterations) +
                              " iterations, status " + best.status);
    bool all_converged = true;
    for (const auto& r : runs) all_converged = all_converged && r.converged;
    if (!all_converged) {
        bundle.exit_code = 2;
        bundle.report["error"] = {{"kind", "non-convergence"},
                                  {"message", "minimization stopped with status " + best.status}};
    }
}

void run_verify(ResultBundle& bundle, const RunConfig& config, const RunContext& ctx) {
    const auto basis = build_basis(config);
    const auto w = build_polynomial(config.w);
    const NonlinearitySpec spec = config.problem ? config.problem->nonlinearity : NonlinearitySpec{};
    const Nonlinearity nl = build_nonlinearity(spec, basis->domain(), ctx);
    const auto checks = run_invariant_suite(basis, w, nl, config.seed);
    json table = json::array();
    bool all = true;
    for (const auto& c : checks) {
        table.push_back({{"module", c.module},
                         {"check", c.name},
                         {"passed", c.passed},
                         {"value", c.value},
                         {"tolerance", c.tolerance},
                         {"detail", c.detail}});
        all = all && c.passed;
    }
    bundle.report["checks"] = table;
    bundle.report["all_passed"] = all;
    bundle.files["verify.txt"] = format_check_table(checks);
    bundle.messages.push_back(format_check_table(checks));
    if (!all) bundle.exit_code = 2;
}

void run_convergence(ResultBundle& bundle, const RunConfig& config) {
    const Domain domain = build_domain(config.domain);
    const auto report = eigen_convergence_report(domain, config.basis.J, config.problem->spacings);
    std::string csv = "h,j,lambda,error\n";
    for (const auto& r : report.rows) {
        csv += format_double(r.h) + "," + std::to_string(r.j) + "," + format_double(r.lambda) + "," +
               format_double(r.error) + "\n";
    }
    bundle.files["convergence.csv"] = csv;
    bundle.report["observed_order"] = report.observed_order;
    bundle.report["richardson_limit"] = report.richardson_limit;
    bundle.report["spacings"] = report.spacings;
    bundle.messages.push_back("observed order (lambda_1): " + format_double(report.observed_order.front()));
}

} // namespace

ResultBundle run(const RunConfig& config, ProblemKind kind, const RunContext& context) {
    RunConfig effective = config;
    if (effective.problem) {
        if (effective.problem->kind != kind) {
            throw ConfigError("/problem/kind", std::string("config describes a '") + to_string(effective.problem->kind) +
                                                   "' problem but '" + to_string(kind) + "' was requested");
        }
    } else {
        if (kind == ProblemKind::linear) throw ConfigError("/problem", "solve-linear needs a problem with 'g'");
        if (kind == ProblemKind::convergence) throw ConfigError("/problem", "convergence needs a problem with 'h'");
        ProblemSpec p;
        p.kind = kind;
        effective.problem = p;
    }

    ResultBundle bundle;
    bundle.report["problem"] = to_string(kind);
    bundle.report["config"] = config_to_json(effective);
    switch (kind) {
    case ProblemKind::eig: run_eig(bundle, effective); break;
    case ProblemKind::linear: run_linear(bundle, effective, context); break;
    case ProblemKind::nonlinear: run_nonlinear(bundle, effective, context); break;
    case ProblemKind::verify: run_verify(bundle, effective, context); break;
    case ProblemKind::convergence: run_convergence(bundle, effective); break;
    }
    bundle.files["report.json"] = dump(bundle.report);
    finish_manifest(bundle, effective, kind);
    return bundle;
}

void write_file_atomic(const std::filesystem::path& path, const std::string& contents) {
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot write " + tmp.string());
        out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
        out.flush();
        if (!out) throw IoError("write failed for " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw IoError("cannot rename " + tmp.string() + " to " + path.string() + ": " + ec.message());
}

void write_bundle(const ResultBundle& bundle, const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());
    // A stale manifest would describe a partial bundle while files are replaced.
    std::filesystem::remove(dir / "manifest.json", ec);
    for (const auto& [name, contents] : bundle.files) {
        if (name != "manifest.json") write_file_atomic(dir / name, contents);
    }
    const auto manifest = bundle.files.find("manifest.json");
    if (manifest != bundle.files.end()) write_file_atomic(dir / "manifest.json", manifest->second);
}

} // namespace fraclap

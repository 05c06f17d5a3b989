// fraclap: spectral Galerkin solver for fractional bipolynomial Dirichlet problems.
//
//   fraclap eig             --config run.json [--out DIR] [--seed N] [--quiet]
//   fraclap solve-linear    ...
//   fraclap solve-nonlinear ...
//   fraclap verify          ...
//   fraclap convergence     ...
//
// The output directory is taken from --out, else $FRACLAP_OUT, else the
// config's "output" field.

#include "fraclap/cli_io.hpp"
#include "fraclap/error.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

namespace {

using nlohmann::json;

int report_error(const std::string& kind, const std::string& message, const std::string& pointer = {}) {
    json e{{"kind", kind}, {"message", message}};
    if (!pointer.empty()) e["pointer"] = pointer;
    std::cerr << json{{"error", e}}.dump() << "\n";
    return 1;
}

std::string read_text(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw fraclap::IoError("cannot read config " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Spectral Galerkin solver for fractional bipolynomial Dirichlet-Laplace problems"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    std::optional<std::uint64_t> seed;
    bool quiet = false;

    const std::pair<const char*, const char*> commands[] = {
        {"eig", "Compute the truncated Dirichlet-Laplacian eigenbasis"},
        {"solve-linear", "Solve w^2(A) u = g"},
        {"solve-nonlinear", "Minimize the energy functional for w^2(A) u = D_uF(x,u)"},
        {"verify", "Run the invariant suite and print a pass/fail table"},
        {"convergence", "Grid-refinement study of the discrete eigenvalues"},
    };
    for (const auto& [name, help] : commands) {
        auto* sub = app.add_subcommand(name, help);
        sub->add_option("--config", config_path, "Run configuration (JSON)")->required()->check(CLI::ExistingFile);
        sub->add_option("--out", out_dir, "Output directory");
        sub->add_option("--seed", seed, "Seed for multi-start and randomized checks");
        sub->add_flag("--quiet", quiet, "Suppress the summary on stdout");
    }

    CLI11_PARSE(app, argc, argv);
    const std::string command = app.get_subcommands().front()->get_name();

    try {
        fraclap::RunConfig config = fraclap::parse_config(read_text(config_path));
        if (seed) config.seed = *seed;
        std::filesystem::path out = config.output;
        if (const char* env = std::getenv("FRACLAP_OUT"); env != nullptr && *env != '\0') out = env;
        if (!out_dir.empty()) out = out_dir;

        fraclap::RunContext context;
        context.base_dir = std::filesystem::absolute(config_path).parent_path();
        const auto kind = *fraclap::problem_kind_from_string(command);
        const auto bundle = fraclap::run(config, kind, context);
        fraclap::write_bundle(bundle, out);

        if (!quiet) {
            for (const auto& m : bundle.messages) std::cout << m << (m.ends_with('\n') ? "" : "\n");
            std::cout << "wrote " << bundle.files.size() << " files to " << out.string() << "\n";
        }
        if (bundle.exit_code != 0) {
            if (bundle.report.contains("error")) {
                std::cerr << json{{"error", bundle.report["error"]}}.dump() << "\n";
            } else {
                std::cerr << json{{"error", {{"kind", "verification"}, {"message", "one or more checks failed"}}}}.dump()
                          << "\n";
            }
        }
        return bundle.exit_code;
    } catch (const fraclap::ConfigError& e) {
        return report_error(e.kind(), e.what(), e.pointer());
    } catch (const fraclap::Error& e) {
        return report_error(e.kind(), e.what());
    } catch (const std::exception& e) {
        return report_error("internal", e.what());
    }
}

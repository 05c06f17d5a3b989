#pragma once

#include "fraclap/domain.hpp"
#include "fraclap/eigenbasis.hpp"
#include "fraclap/spectral_calculus.hpp"
#include "fraclap/variational_solver.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace fraclap {

inline constexpr const char* artifact_name = "fraclap";
inline constexpr const char* artifact_version = "0.1.0";

enum class ProblemKind { eig, linear, nonlinear, verify, convergence };

const char* to_string(ProblemKind kind);
/// Maps a CLI subcommand or config kind ("eig", "solve-linear"/"linear", ...).
std::optional<ProblemKind> problem_kind_from_string(std::string_view name);

struct DomainSpec {
    DomainKind kind = DomainKind::box;
    std::vector<double> lengths;              // box
    std::size_t nodes_per_axis = default_nodes_per_axis;
    std::vector<Point2> vertices;             // polygon2d
    double h = 0.0;
};

struct BasisSpec {
    BasisSource source = BasisSource::analytic;
    std::size_t J = 16;
};

struct LoadSpec {
    std::optional<std::vector<double>> coefficients;
    std::optional<std::string> samples_csv;
};

struct NonlinearitySpec {
    std::string kind = "builtin_example";     // builtin_example | polynomial
    double A = 0.5;                           // builtin
    double b = 0.1;                           // builtin, constant b
    std::optional<std::string> b_csv;         // builtin, b(x) samples
    std::string coefficients_csv;             // polynomial
    std::optional<GrowthConstants> growth;
};

struct OptimizerSpec {
    std::optional<double> gtol;
    std::size_t max_iters = 10000;
    std::size_t multi_start = 1;
    bool precondition = true;
    bool allow_noncoercive = false;
    double growth_scan_U = 10.0;
};

struct ProblemSpec {
    ProblemKind kind = ProblemKind::eig;
    LoadSpec g;                               // linear
    NonlinearitySpec nonlinearity;            // nonlinear
    OptimizerSpec optimizer;                  // nonlinear
    std::vector<double> spacings;             // convergence
};

struct RunConfig {
    DomainSpec domain;
    BasisSpec basis;
    std::vector<PolyTerm> w{{1.0, 0.5}};
    std::optional<ProblemSpec> problem;
    std::string output = "out";
    std::uint64_t seed = 0;
};

/// Parse and validate a JSON run configuration. Unknown keys are rejected;
/// errors carry a JSON pointer to the offending value.
RunConfig parse_config(const std::string& text);

/// Normalized JSON form with every default filled in.
nlohmann::json config_to_json(const RunConfig& config);
std::string serialize_config(const RunConfig& config);

/// Shortest decimal string that round-trips to the same binary64.
std::string format_double(double value);

/// 64-bit FNV-1a, hex encoded.
std::string fnv1a64_hex(std::string_view bytes);

/// In-memory result bundle: file name -> contents. `manifest.json` is always
/// present and lists the other files with their hashes.
struct ResultBundle {
    std::map<std::string, std::string> files;
    nlohmann::json report;
    int exit_code = 0;
    std::vector<std::string> messages;    ///< human-readable summary lines
};

struct RunContext {
    std::filesystem::path base_dir = ".";  ///< relative CSV paths resolve against this
};

Domain build_domain(const DomainSpec& spec);
FractionalPolynomial build_polynomial(const std::vector<PolyTerm>& terms);
BasisPtr build_basis(const RunConfig& config);

/// Run `kind` for `config`. When the config names a problem its kind must
/// match. Numeric outputs depend only on (config, seed).
ResultBundle run(const RunConfig& config, ProblemKind kind, const RunContext& context = {});

/// Write every file of the bundle into `dir` (temp file + rename per file,
/// manifest last).
void write_bundle(const ResultBundle& bundle, const std::filesystem::path& dir);

/// Write `contents` to `path` atomically.
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);

// CSV helpers

std::string eigen_csv(const SpectralBasis& basis);
std::string samples_csv(const Domain& domain, std::span<const double> values, const std::string& value_header);

/// Reads a node-sample CSV (header; columns x_1..x_N then one or more value
/// columns). Coordinates must match the domain nodes in order.
std::vector<std::vector<double>> read_samples_csv(const std::filesystem::path& path, const Domain& domain);

} // namespace fraclap

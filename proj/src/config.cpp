#include "fraclap/cli_io.hpp"

#include "fraclap/error.hpp"

#include <charconv>
#include <cmath>
#include <set>

namespace fraclap {

using nlohmann::json;

const char* to_string(ProblemKind kind) {
    switch (kind) {
    case ProblemKind::eig: return "eig";
    case ProblemKind::linear: return "linear";
    case ProblemKind::nonlinear: return "nonlinear";
    case ProblemKind::verify: return "verify";
    case ProblemKind::convergence: return "convergence";
    }
    return "unknown";
}

std::optional<ProblemKind> problem_kind_from_string(std::string_view name) {
    if (name == "eig") return ProblemKind::eig;
    if (name == "linear" || name == "solve-linear") return ProblemKind::linear;
    if (name == "nonlinear" || name == "solve-nonlinear") return ProblemKind::nonlinear;
    if (name == "verify") return ProblemKind::verify;
    if (name == "convergence") return ProblemKind::convergence;
    return std::nullopt;
}

std::string format_double(double value) {
    if (std::isnan(value)) return "nan";
    if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
    char buf[32];
    const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value);
    return {buf, end};
}

std::string fnv1a64_hex(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    static constexpr char digits[] = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[static_cast<std::size_t>(i)] = digits[h & 0xf];
        h >>= 4;
    }
    return out;
}

namespace {

std::string child(const std::string& pointer, std::string_view key) {
    std::string token;
    for (char c : key) {
        if (c == '~') {
            token += "~0";
        } else if (c == '/') {
            token += "~1";
        } else {
            token += c;
        }
    }
    return pointer + "/" + token;
}

std::string child(const std::string& pointer, std::size_t index) { return pointer + "/" + std::to_string(index); }

void require_object(const json& j, const std::string& ptr) {
    if (!j.is_object()) throw ConfigError(ptr, "expected an object");
}

void reject_unknown(const json& j, const std::string& ptr, std::initializer_list<std::string_view> allowed) {
    for (const auto& [key, value] : j.items()) {
        bool known = false;
        for (auto a : allowed) known = known || key == a;
        if (!known) throw ConfigError(child(ptr, key), "unknown key '" + key + "'");
    }
}

double get_number(const json& j, const std::string& ptr) {
    if (!j.is_number()) throw ConfigError(ptr, "expected a number");
    const double v = j.get<double>();
    if (!std::isfinite(v)) throw ConfigError(ptr, "expected a finite number");
    return v;
}

std::uint64_t get_unsigned(const json& j, const std::string& ptr) {
    if (!j.is_number_integer() || (j.is_number_integer() && !j.is_number_unsigned() && j.get<std::int64_t>() < 0)) {
        throw ConfigError(ptr, "expected a nonnegative integer");
    }
    return j.get<std::uint64_t>();
}

bool get_bool(const json& j, const std::string& ptr) {
    if (!j.is_boolean()) throw ConfigError(ptr, "expected true or false");
    return j.get<bool>();
}

std::string get_string(const json& j, const std::string& ptr) {
    if (!j.is_string()) throw ConfigError(ptr, "expected a string");
    return j.get<std::string>();
}

std::vector<double> get_number_list(const json& j, const std::string& ptr) {
    if (!j.is_array()) throw ConfigError(ptr, "expected an array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < j.size(); ++i) out.push_back(get_number(j[i], child(ptr, i)));
    return out;
}

DomainSpec parse_domain(const json& j, const std::string& ptr) {
    require_object(j, ptr);
    if (!j.contains("kind")) throw ConfigError(child(ptr, "kind"), "missing domain kind");
    const std::string kind = get_string(j["kind"], child(ptr, "kind"));
    DomainSpec d;
    if (kind == "box") {
        reject_unknown(j, ptr, {"kind", "lengths", "nodes_per_axis"});
        d.kind = DomainKind::box;
        if (!j.contains("lengths")) throw ConfigError(child(ptr, "lengths"), "box needs 'lengths'");
        d.lengths = get_number_list(j["lengths"], child(ptr, "lengths"));
        if (d.lengths.empty()) throw ConfigError(child(ptr, "lengths"), "box needs at least one length");
        for (std::size_t i = 0; i < d.lengths.size(); ++i) {
            if (!(d.lengths[i] > 0.0)) throw ConfigError(child(child(ptr, "lengths"), i), "length must be positive");
        }
        if (j.contains("nodes_per_axis")) {
            d.nodes_per_axis = get_unsigned(j["nodes_per_axis"], child(ptr, "nodes_per_axis"));
            if (d.nodes_per_axis == 0) throw ConfigError(child(ptr, "nodes_per_axis"), "must be positive");
        }
    } else if (kind == "polygon2d") {
        reject_unknown(j, ptr, {"kind", "vertices", "h"});
        d.kind = DomainKind::polygon2d;
        const std::string vptr = child(ptr, "vertices");
        if (!j.contains("vertices") || !j["vertices"].is_array()) throw ConfigError(vptr, "polygon needs a vertex array");
        for (std::size_t i = 0; i < j["vertices"].size(); ++i) {
            const auto p = get_number_list(j["vertices"][i], child(vptr, i));
            if (p.size() != 2) throw ConfigError(child(vptr, i), "vertex must be [x, y]");
            d.vertices.push_back({p[0], p[1]});
        }
        if (d.vertices.size() < 3) throw ConfigError(vptr, "polygon needs at least 3 vertices");
        if (!j.contains("h")) throw ConfigError(child(ptr, "h"), "polygon needs grid spacing 'h'");
        d.h = get_number(j["h"], child(ptr, "h"));
        if (!(d.h > 0.0)) throw ConfigError(child(ptr, "h"), "h must be positive");
    } else {
        throw ConfigError(child(ptr, "kind"), "domain kind must be 'box' or 'polygon2d'");
    }
    return d;
}

std::vector<PolyTerm> parse_w(const json& j, const std::string& ptr) {
    if (!j.is_array() || j.empty()) throw ConfigError(ptr, "w must be a nonempty list of [alpha, beta] terms");
    std::vector<PolyTerm> terms;
    for (std::size_t i = 0; i < j.size(); ++i) {
        const auto t = get_number_list(j[i], child(ptr, i));
        if (t.size() != 2) throw ConfigError(child(ptr, i), "term must be [alpha, beta]");
        if (!(t[0] > 0.0)) throw ConfigError(child(child(ptr, i), 0), "alpha must be positive");
        if (!(t[1] >= 0.0)) throw ConfigError(child(child(ptr, i), 1), "beta must be nonnegative");
        if (i > 0 && !(t[1] > terms.back().beta)) {
            throw ConfigError(child(child(ptr, i), 1),
                              "exponents must be strictly increasing: 0 <= beta_0 < beta_1 < ... < beta_k");
        }
        terms.push_back({t[0], t[1]});
    }
    return terms;
}

GrowthConstants parse_growth(const json& j, const std::string& ptr) {
    require_object(j, ptr);
    reject_unknown(j, ptr, {"a", "b", "c", "d", "A", "B", "C"});
    GrowthConstants g;
    auto read = [&](const char* key, double& slot) {
        if (!j.contains(key)) throw ConfigError(child(ptr, key), std::string("missing growth constant '") + key + "'");
        slot = get_number(j[key], child(ptr, key));
    };
    read("a", g.a);
    read("b", g.b);
    read("c", g.c);
    read("d", g.d);
    read("A", g.A);
    read("B", g.B);
    read("C", g.C);
    return g;
}

NonlinearitySpec parse_nonlinearity(const json& j, const std::string& ptr) {
    require_object(j, ptr);
    NonlinearitySpec s;
    if (j.contains("kind")) s.kind = get_string(j["kind"], child(ptr, "kind"));
    if (s.kind == "builtin_example") {
        reject_unknown(j, ptr, {"kind", "A", "b"});
        if (j.contains("A")) s.A = get_number(j["A"], child(ptr, "A"));
        if (j.contains("b")) {
            const auto& b = j["b"];
            if (b.is_object()) {
                reject_unknown(b, child(ptr, "b"), {"samples_csv"});
                if (!b.contains("samples_csv")) throw ConfigError(child(ptr, "b"), "expected a number or {samples_csv}");
                s.b_csv = get_string(b["samples_csv"], child(child(ptr, "b"), "samples_csv"));
            } else {
                s.b = get_number(b, child(ptr, "b"));
            }
        }
    } else if (s.kind == "polynomial") {
        reject_unknown(j, ptr, {"kind", "coefficients_csv", "growth"});
        if (!j.contains("coefficients_csv")) {
            throw ConfigError(child(ptr, "coefficients_csv"), "polynomial nonlinearity needs 'coefficients_csv'");
        }
        s.coefficients_csv = get_string(j["coefficients_csv"], child(ptr, "coefficients_csv"));
        if (j.contains("growth")) s.growth = parse_growth(j["growth"], child(ptr, "growth"));
    } else {
        throw ConfigError(child(ptr, "kind"), "nonlinearity kind must be 'builtin_example' or 'polynomial'");
    }
    return s;
}

OptimizerSpec parse_optimizer(const json& j, const std::string& ptr) {
    require_object(j, ptr);
    reject_unknown(j, ptr, {"gtol", "max_iters", "multi_start", "precondition", "allow_noncoercive", "growth_scan_U"});
    OptimizerSpec o;
    if (j.contains("gtol")) {
        o.gtol = get_number(j["gtol"], child(ptr, "gtol"));
        if (!(*o.gtol > 0.0)) throw ConfigError(child(ptr, "gtol"), "gtol must be positive");
    }
    if (j.contains("max_iters")) o.max_iters = get_unsigned(j["max_iters"], child(ptr, "max_iters"));
    if (j.contains("multi_start")) {
        o.multi_start = get_unsigned(j["multi_start"], child(ptr, "multi_start"));
        if (o.multi_start == 0) throw ConfigError(child(ptr, "multi_start"), "multi_start must be at least 1");
    }
    if (j.contains("precondition")) o.precondition = get_bool(j["precondition"], child(ptr, "precondition"));
    if (j.contains("allow_noncoercive")) {
        o.allow_noncoercive = get_bool(j["allow_noncoercive"], child(ptr, "allow_noncoercive"));
    }
    if (j.contains("growth_scan_U")) {
        o.growth_scan_U = get_number(j["growth_scan_U"], child(ptr, "growth_scan_U"));
        if (!(o.growth_scan_U > 0.0)) throw ConfigError(child(ptr, "growth_scan_U"), "must be positive");
    }
    return o;
}

ProblemSpec parse_problem(const json& j, const std::string& ptr) {
    require_object(j, ptr);
    if (!j.contains("kind")) throw ConfigError(child(ptr, "kind"), "missing problem kind");
    const std::string kind_name = get_string(j["kind"], child(ptr, "kind"));
    const auto kind = problem_kind_from_string(kind_name);
    if (!kind) {
        throw ConfigError(child(ptr, "kind"), "problem kind must be one of eig, linear, nonlinear, verify, convergence");
    }
    ProblemSpec p;
    p.kind = *kind;
    switch (p.kind) {
    case ProblemKind::eig:
        reject_unknown(j, ptr, {"kind"});
        break;
    case ProblemKind::linear: {
        reject_unknown(j, ptr, {"kind", "g"});
        const std::string gptr = child(ptr, "g");
        if (!j.contains("g")) throw ConfigError(gptr, "linear problem needs a right-hand side 'g'");
        const auto& g = j["g"];
        require_object(g, gptr);
        reject_unknown(g, gptr, {"coefficients", "samples_csv"});
        if (g.contains("coefficients") == g.contains("samples_csv")) {
            throw ConfigError(gptr, "give exactly one of 'coefficients' or 'samples_csv'");
        }
        if (g.contains("coefficients")) p.g.coefficients = get_number_list(g["coefficients"], child(gptr, "coefficients"));
        if (g.contains("samples_csv")) p.g.samples_csv = get_string(g["samples_csv"], child(gptr, "samples_csv"));
        break;
    }
    case ProblemKind::nonlinear:
        reject_unknown(j, ptr, {"kind", "nonlinearity", "optimizer"});
        if (j.contains("nonlinearity")) p.nonlinearity = parse_nonlinearity(j["nonlinearity"], child(ptr, "nonlinearity"));
        if (j.contains("optimizer")) p.optimizer = parse_optimizer(j["optimizer"], child(ptr, "optimizer"));
        break;
    case ProblemKind::verify:
        reject_unknown(j, ptr, {"kind", "nonlinearity"});
        if (j.contains("nonlinearity")) p.nonlinearity = parse_nonlinearity(j["nonlinearity"], child(ptr, "nonlinearity"));
        break;
    case ProblemKind::convergence:
        reject_unknown(j, ptr, {"kind", "h"});
        if (!j.contains("h")) throw ConfigError(child(ptr, "h"), "convergence study needs a list of spacings 'h'");
        p.spacings = get_number_list(j["h"], child(ptr, "h"));
        if (p.spacings.size() < 3) throw ConfigError(child(ptr, "h"), "need at least 3 spacings");
        for (std::size_t i = 1; i < p.spacings.size(); ++i) {
            if (!(p.spacings[i] < p.spacings[i - 1])) {
                throw ConfigError(child(child(ptr, "h"), i), "spacings must be strictly decreasing");
            }
        }
        break;
    }
    return p;
}

json growth_to_json(const GrowthConstants& g) {
    return {{"a", g.a}, {"b", g.b}, {"c", g.c}, {"d", g.d}, {"A", g.A}, {"B", g.B}, {"C", g.C}};
}

json nonlinearity_to_json(const NonlinearitySpec& s) {
    json j;
    j["kind"] = s.kind;
    if (s.kind == "builtin_example") {
        j["A"] = s.A;
        if (s.b_csv) {
            j["b"] = {{"samples_csv", *s.b_csv}};
        } else {
            j["b"] = s.b;
        }
    } else {
        j["coefficients_csv"] = s.coefficients_csv;
        if (s.growth) j["growth"] = growth_to_json(*s.growth);
    }
    return j;
}

} // namespace

RunConfig parse_config(const std::string& text) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError("", std::string("invalid JSON: ") + e.what());
    }
    require_object(root, "");
    reject_unknown(root, "", {"domain", "basis", "w", "problem", "output", "seed"});

    RunConfig c;
    if (!root.contains("domain")) throw ConfigError("/domain", "missing domain");
    c.domain = parse_domain(root["domain"], "/domain");
    c.basis.source = c.domain.kind == DomainKind::box ? BasisSource::analytic : BasisSource::discrete;

    if (root.contains("basis")) {
        const auto& b = root["basis"];
        require_object(b, "/basis");
        reject_unknown(b, "/basis", {"source", "J"});
        if (b.contains("source")) {
            const std::string s = get_string(b["source"], "/basis/source");
            if (s == "analytic") {
                c.basis.source = BasisSource::analytic;
            } else if (s == "discrete") {
                c.basis.source = BasisSource::discrete;
            } else {
                throw ConfigError("/basis/source", "basis source must be 'analytic' or 'discrete'");
            }
        }
        if (b.contains("J")) c.basis.J = get_unsigned(b["J"], "/basis/J");
    }
    if (c.basis.J < 1) throw ConfigError("/basis/J", "J must be at least 1");
    if (c.basis.source == BasisSource::analytic && c.domain.kind != DomainKind::box) {
        throw ConfigError("/basis/source", "analytic spectra exist for boxes only");
    }

    if (root.contains("w")) c.w = parse_w(root["w"], "/w");
    if (root.contains("problem")) c.problem = parse_problem(root["problem"], "/problem");
    if (root.contains("output")) c.output = get_string(root["output"], "/output");
    if (root.contains("seed")) c.seed = get_unsigned(root["seed"], "/seed");
    return c;
}

json config_to_json(const RunConfig& c) {
    json j;
    json d;
    if (c.domain.kind == DomainKind::box) {
        d["kind"] = "box";
        d["lengths"] = c.domain.lengths;
        d["nodes_per_axis"] = c.domain.nodes_per_axis;
    } else {
        d["kind"] = "polygon2d";
        json v = json::array();
        for (const auto& p : c.domain.vertices) v.push_back({p[0], p[1]});
        d["vertices"] = v;
        d["h"] = c.domain.h;
    }
    j["domain"] = d;
    j["basis"] = {{"source", to_string(c.basis.source)}, {"J", c.basis.J}};
    json w = json::array();
    for (const auto& t : c.w) w.push_back({t.alpha, t.beta});
    j["w"] = w;
    if (c.problem) {
        const auto& p = *c.problem;
        json pj;
        pj["kind"] = to_string(p.kind);
        switch (p.kind) {
        case ProblemKind::eig: break;
        case ProblemKind::linear:
            if (p.g.coefficients) pj["g"]["coefficients"] = *p.g.coefficients;
            if (p.g.samples_csv) pj["g"]["samples_csv"] = *p.g.samples_csv;
            break;
        case ProblemKind::nonlinear: {
            pj["nonlinearity"] = nonlinearity_to_json(p.nonlinearity);
            json o;
            if (p.optimizer.gtol) o["gtol"] = *p.optimizer.gtol;
            o["max_iters"] = p.optimizer.max_iters;
            o["multi_start"] = p.optimizer.multi_start;
            o["precondition"] = p.optimizer.precondition;
            o["allow_noncoercive"] = p.optimizer.allow_noncoercive;
            o["growth_scan_U"] = p.optimizer.growth_scan_U;
            pj["optimizer"] = o;
            break;
        }
        case ProblemKind::verify: pj["nonlinearity"] = nonlinearity_to_json(p.nonlinearity); break;
        case ProblemKind::convergence: pj["h"] = p.spacings; break;
        }
        j["problem"] = pj;
    }
    j["output"] = c.output;
    j["seed"] = c.seed;
    return j;
}

std::string serialize_config(const RunConfig& config) { return config_to_json(config).dump(2) + "\n"; }

} // namespace fraclap

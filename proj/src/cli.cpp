#include "hhcert/cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include "hhcert/bounds.hpp"
#include "hhcert/quad.hpp"

namespace hhcert::cli {

namespace {

double get_real(const nlohmann::json& j, const std::string& key) {
    const auto& v = j.at(key);
    if (!v.is_number()) throw ConfigError("config key `" + key + "` must be a number");
    return v.get<double>();
}

std::size_t get_count(const nlohmann::json& j, const std::string& key) {
    const auto& v = j.at(key);
    if (!v.is_number_integer() || v.get<long long>() < 0)
        throw ConfigError("grid key `" + key + "` must be a non-negative integer");
    return v.get<std::size_t>();
}

Expr parse_config_expr(const nlohmann::json& j, const std::string& key) {
    const auto& v = j.at(key);
    if (!v.is_string()) throw ConfigError("config key `" + key + "` must be an expression string");
    try {
        return parse(v.get<std::string>());
    } catch (const ParseError& e) {
        throw ConfigError("config key `" + key + "`: " + e.what());
    }
}

}  // namespace

ProblemSpec spec_from_json(const nlohmann::json& j, const std::string& default_id) {
    static const char* kKeys[] = {"f", "a", "b", "phi", "c", "c_f", "c_deriv", "q", "quad_tol", "grid", "id"};
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    for (const auto& [key, _] : j.items()) {
        bool known = false;
        for (const char* k : kKeys) known = known || key == k;
        if (!known) throw ConfigError("unknown config key `" + key + "`");
    }
    for (const char* req : {"f", "a", "b"})
        if (!j.contains(req)) throw ConfigError(std::string("missing config key `") + req + "`");

    ProblemSpec s;
    s.id = default_id;
    if (j.contains("id")) {
        if (!j["id"].is_string()) throw ConfigError("config key `id` must be a string");
        s.id = j["id"].get<std::string>();
    }
    s.f = parse_config_expr(j, "f");
    s.interval = {get_real(j, "a"), get_real(j, "b")};
    if (j.contains("phi")) {
        if (j["phi"].is_string() && j["phi"].get<std::string>() == "identity") s.phi = PhiMap::identity();
        else s.phi = PhiMap(parse_config_expr(j, "phi"));
    }
    if (j.contains("c")) s.c = get_real(j, "c");
    if (j.contains("c_deriv")) s.c = get_real(j, "c_deriv");
    if (j.contains("c_f")) s.c_f = get_real(j, "c_f");
    if (j.contains("q")) s.q = get_real(j, "q");
    if (j.contains("quad_tol")) s.quad_tol = get_real(j, "quad_tol");
    if (j.contains("grid")) {
        const auto& g = j["grid"];
        if (!g.is_object()) throw ConfigError("config key `grid` must be an object");
        for (const auto& [key, _] : g.items())
            if (key != "n_x" && key != "n_y" && key != "n_t")
                throw ConfigError("unknown grid key `" + key + "`");
        if (g.contains("n_x")) s.grid.n_x = get_count(g, "n_x");
        if (g.contains("n_y")) s.grid.n_y = get_count(g, "n_y");
        if (g.contains("n_t")) s.grid.n_t = get_count(g, "n_t");
    }
    return s;
}

ProblemSpec load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config not found: " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("config is not valid JSON: " + std::string(e.what()));
    }
    return spec_from_json(j, path.stem().string());
}

namespace {

NamedCertificate certify_target(const std::string& name, const TargetFn& g, const ProblemSpec& spec,
                                double modulus, std::ostream* diag) {
    NamedCertificate nc;
    nc.target = name;
    nc.modulus = modulus;
    try {
        nc.result = certify_strong_phi_convexity(g, spec.phi, spec.interval, modulus, spec.grid);
        nc.status = nc.result->passed ? CertStatus::Passed : CertStatus::Failed;
    } catch (const std::exception& e) {
        nc.status = CertStatus::Failed;
        if (diag) *diag << spec.id << ": certificate " << name << " could not be evaluated: " << e.what() << "\n";
    }
    return nc;
}

}  // namespace

BoundReport run_check(const ProblemSpec& spec, bool certify, std::ostream* diag) {
    require_validated(spec);

    std::vector<NamedCertificate> certs;
    CertificateSet set;
    if (certify) {
        certs.push_back(certify_target("f", target_f(spec.f), spec, spec.modulus_f(), diag));
        const TargetFn g = target_fprime_q(spec.f, spec.q);
        certs.push_back(certify_target("fprime_q", g, spec, spec.modulus_deriv(), diag));
        if (spec.modulus_deriv() > 0.0) {
            certs.push_back(certify_target("fprime_q_c0", g, spec, 0.0, diag));
        } else {
            NamedCertificate c0 = certs.back();
            c0.target = "fprime_q_c0";
            certs.push_back(std::move(c0));
        }
        set.f = certs[0].status;
        set.fprime_q = certs[1].status;
        set.fprime_q_c0 = certs[2].status;
    } else {
        for (const char* t : {"f", "fprime_q", "fprime_q_c0"}) {
            NamedCertificate nc;
            nc.target = t;
            nc.modulus = std::string(t) == "f" ? spec.modulus_f()
                         : std::string(t) == "fprime_q" ? spec.modulus_deriv()
                                                        : 0.0;
            certs.push_back(std::move(nc));
        }
    }

    std::optional<GapResult> gap;
    std::string gap_error;
    try {
        gap = verify_lemma_identity(spec);
    } catch (const std::exception& e) {
        gap_error = e.what();
        if (diag) *diag << spec.id << ": " << e.what() << "\n";
    }

    const auto bounds = evaluate_all(spec, set);
    return build_report(spec, certs, gap, bounds, gap_error);
}

void print_holder_variants(const ProblemSpec& spec, std::ostream& os) {
    os << spec.id << ": diagnostics (Hoelder bound, phi(t) = t specialisation)\n";
    if (!spec.phi.is_identity() || !spec.holder_p()) {
        os << "  not applicable (needs phi = identity and q > 1)\n";
        return;
    }
    try {
        const BoundInputs in = compute_inputs(spec);
        const double a = spec.interval.a, b = spec.interval.b;
        const double implemented = classical::holder(a, b, in.d_a, in.d_b, in.q, in.c);
        const double printed = classical::holder_printed_variant(a, b, in.d_a, in.d_b, in.q, in.c);
        const double gap = std::fabs(hh_gap(spec));
        os << "  implemented form, prefactor (b-a)/2: " << format_real(implemented) << "\n"
           << "  printed identity-map form, prefactor (b-a)/4: " << format_real(printed) << "\n"
           << "  |gap|: " << format_real(gap) << "\n"
           << "  printed form " << (gap <= printed + kMarginTol ? "holds" : "is exceeded") << " here\n";
    } catch (const std::exception& e) {
        os << "  could not evaluate: " << e.what() << "\n";
    }
}

// ---------------------------------------------------------------------------
// Corpus

namespace {

struct CorpusBase {
    const char* name;
    const char* f;
    double a, b;
    const char* phi;  // nullptr = identity
};

constexpr CorpusBase kBases[] = {
    {"x2-unit", "x^2", 0.0, 1.0, nullptr},
    {"x2-affine", "x^2", 0.0, 2.0, "0.5*x + 0.5"},
    {"exp-unit", "exp(x)", 0.0, 1.0, nullptr},
    {"exp-affine", "exp(x)", -1.0, 1.0, "0.75*x"},
    {"x4-shifted", "x^4", 0.5, 1.5, nullptr},
    {"expx2-affine", "exp(x) + x^2", 0.0, 1.0, "0.5*x + 0.25"},
    {"abscube-unit", "abs(x)^3", -1.0, 1.0, nullptr},
    {"xabsx-affine", "x*abs(x) + x^2", -1.0, 1.0, "0.5*x + 0.25"},
};

struct Fraction {
    const char* tag;
    double value;
};

constexpr Fraction kFractions[] = {{"c0", 0.0}, {"chalf", 0.5}, {"cstar", 1.0}};
constexpr double kCorpusQ[] = {1.0, 2.0, 3.0};

}  // namespace

std::vector<ProblemSpec> builtin_corpus() {
    std::vector<ProblemSpec> out;
    for (const auto& base : kBases) {
        ProblemSpec proto;
        proto.f = parse(base.f);
        proto.interval = {base.a, base.b};
        if (base.phi) proto.phi = PhiMap(parse(base.phi));
        const double cstar_f = estimate_max_modulus(target_f(proto.f), proto.phi, proto.interval, proto.grid);
        for (double q : kCorpusQ) {
            const double cstar_d =
                estimate_max_modulus(target_fprime_q(proto.f, q), proto.phi, proto.interval, proto.grid);
            for (const auto& frac : kFractions) {
                ProblemSpec s = proto;
                s.q = q;
                s.c = frac.value * cstar_d;
                s.c_f = frac.value * cstar_f;
                s.id = std::string(base.name) + "-q" + std::to_string(static_cast<int>(q)) + "-" + frac.tag;
                out.push_back(validate(std::move(s)));
            }
        }
    }
    std::sort(out.begin(), out.end(), [](const auto& l, const auto& r) { return l.id < r.id; });
    return out;
}

// ---------------------------------------------------------------------------
// Command line

namespace {

std::optional<Format> parse_format(const std::string& s) {
    if (s == "csv") return Format::Csv;
    if (s == "json") return Format::Json;
    return std::nullopt;
}

/// Writes to `out_path` when set, else to `out`. False if the file can't be written.
bool emit(const std::string& text, const std::string& out_path, std::ostream& out) {
    if (out_path.empty()) {
        out << text;
        return true;
    }
    std::ofstream f(out_path, std::ios::binary | std::ios::trunc);
    if (!f) return false;
    f << text;
    f.flush();
    return static_cast<bool>(f);
}

struct Flags {
    std::string config;
    std::optional<double> tol;
    std::string format = "csv";
    std::string out_path;
    bool diagnostics = false;
    std::string target = "f";
};

ProblemSpec load_validated(const Flags& fl) {
    ProblemSpec s = load_config(fl.config);
    if (fl.tol) s.quad_tol = *fl.tol;
    return validate(std::move(s));
}

int cmd_check(const Flags& fl, bool certify, std::ostream& out, std::ostream& err) {
    const auto fmt = parse_format(fl.format);
    if (!fmt) {
        err << "unknown format `" << fl.format << "` (expected csv or json)\n";
        return kUsage;
    }
    ProblemSpec spec;
    try {
        spec = load_validated(fl);
    } catch (const std::exception& e) {
        err << e.what() << "\n";
        return kUsage;
    }
    const BoundReport report = run_check(spec, certify, &err);
    if (fl.diagnostics) print_holder_variants(spec, err);
    if (!emit(serialize(report, *fmt), fl.out_path, out)) {
        err << "cannot write output file: " << fl.out_path << "\n";
        return kUsage;
    }
    for (const auto& row : report.rows)
        if (row.status == RowStatus::Violated || row.status == RowStatus::Error)
            err << report.spec_id << ": " << row.theorem_id << " " << to_string(row.status) << ": "
                << row.notes << "\n";
    return report_ok(report) ? kOk : kViolation;
}

int cmd_modulus(const Flags& fl, std::ostream& out, std::ostream& err) {
    if (fl.target != "f" && fl.target != "fprime_q") {
        err << "unknown target `" << fl.target << "` (expected f or fprime_q)\n";
        return kUsage;
    }
    ProblemSpec spec;
    try {
        spec = load_validated(fl);
    } catch (const std::exception& e) {
        err << e.what() << "\n";
        return kUsage;
    }
    try {
        const TargetFn g = fl.target == "f" ? target_f(spec.f) : target_fprime_q(spec.f, spec.q);
        const double cstar = estimate_max_modulus(g, spec.phi, spec.interval, spec.grid);
        char buf[64];
        std::snprintf(buf, sizeof buf, "%#.6g", cstar);
        out << buf << "\n";
        return kOk;
    } catch (const std::exception& e) {
        err << e.what() << "\n";
        return kViolation;
    }
}

int cmd_lemma(const Flags& fl, std::ostream& out, std::ostream& err) {
    const auto fmt = parse_format(fl.format);
    if (!fmt) {
        err << "unknown format `" << fl.format << "` (expected csv or json)\n";
        return kUsage;
    }
    ProblemSpec spec;
    try {
        spec = load_validated(fl);
    } catch (const std::exception& e) {
        err << e.what() << "\n";
        return kUsage;
    }
    GapResult r;
    int code = kOk;
    try {
        r = verify_lemma_identity(spec);
    } catch (const IdentityViolation& e) {
        err << e.what() << "\n";
        r = e.result();
        code = kViolation;
    } catch (const std::exception& e) {
        err << e.what() << "\n";
        return kViolation;
    }
    std::string text;
    if (*fmt == Format::Json) {
        nlohmann::json j{{"spec_id", spec.id}, {"lhs_gap", r.lhs_gap}, {"rhs_identity", r.rhs_identity},
                         {"residual", r.residual}};
        text = j.dump(2) + "\n";
    } else {
        text = "lhs_gap " + format_real(r.lhs_gap) + "\nrhs_identity " + format_real(r.rhs_identity) +
               "\nresidual " + format_real(r.residual) + "\n";
    }
    if (!emit(text, fl.out_path, out)) {
        err << "cannot write output file: " << fl.out_path << "\n";
        return kUsage;
    }
    return code;
}

int cmd_corpus(const Flags& fl, std::ostream& out, std::ostream& err) {
    const auto fmt = parse_format(fl.format);
    if (!fmt) {
        err << "unknown format `" << fl.format << "` (expected csv or json)\n";
        return kUsage;
    }
    if (!fl.out_path.empty()) {
        std::ofstream probe(fl.out_path, std::ios::binary | std::ios::trunc);
        if (!probe) {
            err << "cannot write output file: " << fl.out_path << "\n";
            return kUsage;
        }
    }
    std::vector<BoundReport> reports;
    bool ok = true;
    for (ProblemSpec spec : builtin_corpus()) {
        if (fl.tol) spec.quad_tol = *fl.tol;
        reports.push_back(run_check(spec, true, &err));
        if (fl.diagnostics) print_holder_variants(spec, err);
        if (!report_ok(reports.back())) {
            ok = false;
            for (const auto& row : reports.back().rows)
                if (row.status == RowStatus::Violated || row.status == RowStatus::Error)
                    err << spec.id << ": " << row.theorem_id << " " << to_string(row.status) << ": "
                        << row.notes << "\n";
        }
    }
    if (!emit(serialize(reports, *fmt), fl.out_path, out)) {
        err << "cannot write output file: " << fl.out_path << "\n";
        return kUsage;
    }
    return ok ? kOk : kViolation;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Certify strong phi-convexity and check Hermite-Hadamard type bounds", "hhcert"};
    app.require_subcommand(1);

    Flags fl;
    auto add_common = [&fl](CLI::App* sub, bool with_config) {
        if (with_config) sub->add_option("config", fl.config, "JSON problem config")->required();
        sub->add_option("--tol", fl.tol, "Quadrature tolerance (overrides quad_tol)");
        sub->add_option("--format", fl.format, "Output format: csv or json");
        sub->add_option("--out", fl.out_path, "Write output to this file instead of stdout");
        sub->add_flag("--diagnostics", fl.diagnostics, "Print extra diagnostics to stderr");
    };

    auto* check = app.add_subcommand("check", "Certify, verify the integral identity and evaluate every bound");
    add_common(check, true);
    auto* bounds = app.add_subcommand("bounds", "Like check, without convexity certificates");
    add_common(bounds, true);
    auto* modulus = app.add_subcommand("modulus", "Estimate the largest modulus c* on the grid");
    add_common(modulus, true);
    modulus->add_option("--target", fl.target, "f or fprime_q (|f'|^q)");
    auto* lemma = app.add_subcommand("lemma", "Evaluate both sides of the integral identity");
    add_common(lemma, true);
    auto* corpus = app.add_subcommand("corpus", "Run check over the built-in corpus");
    add_common(corpus, false);

    std::vector<std::string> rev(args.rbegin(), args.rend());
    try {
        app.parse(rev);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << e.what() << "\n";
        return kUsage;
    }

    try {
        if (check->parsed()) return cmd_check(fl, true, out, err);
        if (bounds->parsed()) return cmd_check(fl, false, out, err);
        if (modulus->parsed()) return cmd_modulus(fl, out, err);
        if (lemma->parsed()) return cmd_lemma(fl, out, err);
        if (corpus->parsed()) return cmd_corpus(fl, out, err);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kViolation;
    }
    return kUsage;
}

}  // namespace hhcert::cli

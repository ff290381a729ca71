#include "kcex/scenario.hpp"

#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "kcex/construct.hpp"
#include "kcex/errors.hpp"
#include "kcex/oracle1d.hpp"
#include "kcex/report.hpp"
#include "kcex/verify.hpp"
#include "kcex/version.hpp"

namespace kcex {

namespace {

using nlohmann::json;

double need_number(const json& j, const char* key)
{
    if (!j.contains(key) || !j[key].is_number()) {
        throw ConfigError(std::string("missing or non-numeric field '") + key + "'");
    }
    return j[key].get<double>();
}

std::string need_string(const json& j, const char* key)
{
    if (!j.contains(key) || !j[key].is_string()) {
        throw ConfigError(std::string("missing or non-string field '") + key + "'");
    }
    return j[key].get<std::string>();
}

Tabulated load_tabulated_csv(const std::string& path)
{
    std::ifstream is(path);
    if (!is) {
        throw ConfigError("cannot open tabulated CSV '" + path + "'");
    }
    Tabulated tab;
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream ls(line);
        double t = 0.0, m = 0.0;
        if (!(ls >> t >> m)) {
            if (tab.t.empty()) continue;  // header line
            throw ConfigError("malformed row in tabulated CSV '" + path + "'");
        }
        tab.t.push_back(t);
        tab.m.push_back(m);
    }
    if (tab.t.size() < 2) {
        throw ConfigError("tabulated CSV '" + path + "' needs at least 2 rows");
    }
    return tab;
}

DomainSpec parse_domain(const json& j)
{
    const std::string kind = need_string(j, "kind");
    DomainSpec spec;
    if (kind == "interval") {
        spec.shape = Interval{need_number(j, "a"), need_number(j, "b")};
    } else if (kind == "rectangle") {
        spec.shape = Rectangle{need_number(j, "ax"), need_number(j, "bx"),
                               need_number(j, "ay"), need_number(j, "by")};
    } else if (kind == "disk") {
        spec.shape = Disk{{need_number(j, "cx"), need_number(j, "cy")},
                          need_number(j, "radius")};
    } else if (kind == "convex_polygon") {
        if (!j.contains("vertices") || !j["vertices"].is_array()) {
            throw ConfigError("convex_polygon needs a 'vertices' array");
        }
        ConvexPolygon poly;
        for (const auto& v : j["vertices"]) {
            if (!v.is_array() || v.size() != 2) {
                throw ConfigError("polygon vertices must be [x, y] pairs");
            }
            poly.vertices.push_back({v[0].get<double>(), v[1].get<double>()});
        }
        spec.shape = std::move(poly);
    } else {
        throw ConfigError("unknown domain kind '" + kind + "'");
    }
    try {
        return make_domain(spec);
    } catch (const InvalidGeometry& e) {
        throw ConfigError(std::string("invalid domain: ") + e.what());
    }
}

MFunctionSpec parse_m(const json& j)
{
    const std::string kind = need_string(j, "kind");
    MFunctionSpec spec;
    if (kind == "affine") {
        spec.kind = Affine{need_number(j, "a"), need_number(j, "b")};
    } else if (kind == "power") {
        spec.kind = Power{need_number(j, "a"), need_number(j, "b"), need_number(j, "p")};
    } else if (kind == "rational_decay") {
        spec.kind = RationalDecay{need_number(j, "a")};
    } else if (kind == "tabulated") {
        if (j.contains("csv")) {
            spec.kind = load_tabulated_csv(need_string(j, "csv"));
        } else {
            if (!j.contains("t") || !j.contains("values")) {
                throw ConfigError("tabulated M needs 't' and 'values' arrays (or 'csv')");
            }
            Tabulated tab;
            tab.t = j["t"].get<std::vector<double>>();
            tab.m = j["values"].get<std::vector<double>>();
            spec.kind = std::move(tab);
        }
    } else {
        throw ConfigError("unknown M kind '" + kind + "'");
    }
    try {
        return make_m_function(spec);
    } catch (const PreconditionViolated& e) {
        throw ConfigError(std::string("invalid M: ") + e.what());
    }
}

ScenarioMode parse_mode(const std::string& s)
{
    if (s == "SSM") return ScenarioMode::Ssm;
    if (s == "STRONG_CP") return ScenarioMode::StrongCp;
    if (s == "WEAK_CP") return ScenarioMode::WeakCp;
    if (s == "CLASSIFY") return ScenarioMode::Classify;
    if (s == "NECESSITY") return ScenarioMode::Necessity;
    throw ConfigError("unknown mode '" + s + "'");
}

void dump_domain(Report doc, const DomainSpec& spec)
{
    std::visit(
        [&](const auto& s) {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, Interval>) {
                doc.put("kind", "interval").put("a", s.a).put("b", s.b);
            } else if constexpr (std::is_same_v<T, Rectangle>) {
                doc.put("kind", "rectangle")
                    .put("ax", s.ax)
                    .put("bx", s.bx)
                    .put("ay", s.ay)
                    .put("by", s.by);
            } else if constexpr (std::is_same_v<T, Disk>) {
                doc.put("kind", "disk")
                    .put("cx", s.center.x)
                    .put("cy", s.center.y)
                    .put("radius", s.radius);
            } else {
                doc.put("kind", "convex_polygon");
                // vertices flattened as [x0, y0, x1, y1, ...] pairs
                std::vector<double> flat;
                for (const auto& v : s.vertices) {
                    flat.push_back(v.x);
                    flat.push_back(v.y);
                }
                doc.put_array("vertices_xy", flat);
            }
        },
        spec.shape);
}

void dump_m(Report doc, const MFunctionSpec& spec)
{
    std::visit(
        [&](const auto& m) {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, Affine>) {
                doc.put("kind", "affine").put("a", m.a).put("b", m.b);
            } else if constexpr (std::is_same_v<T, Power>) {
                doc.put("kind", "power").put("a", m.a).put("b", m.b).put("p", m.p);
            } else if constexpr (std::is_same_v<T, RationalDecay>) {
                doc.put("kind", "rational_decay").put("a", m.a);
            } else {
                doc.put("kind", "tabulated");
                doc.put_array("t", m.t);
                doc.put_array("values", m.m);
            }
        },
        spec.kind);
}

std::string plot_csv(const Mesh& mesh, const std::vector<std::pair<std::string, const Field*>>& cols)
{
    std::string out = mesh.dim == 1 ? "x" : "x,y";
    for (const auto& [name, field] : cols) {
        out += ',';
        out += name;
    }
    out += '\n';
    for (int i = 0; i < mesh.node_count(); ++i) {
        out += format_g17(mesh.nodes[static_cast<std::size_t>(i)].x);
        if (mesh.dim == 2) {
            out += ',';
            out += format_g17(mesh.nodes[static_cast<std::size_t>(i)].y);
        }
        for (const auto& [name, field] : cols) {
            out += ',';
            out += format_g17(field->values[i]);
        }
        out += '\n';
    }
    return out;
}

Report certificate_report(const Certificate& cert)
{
    Report doc;
    doc.put("tool", kToolName).put("version", kVersion);
    doc.put("mode", to_string(cert.mode));
    doc.put("verdict", to_string(cert.verdict));
    doc.put("failing_check", cert.failing_check);
    doc.put("tau", cert.params.tau);
    doc.put("theta", cert.params.theta);
    doc.put("alpha", cert.params.alpha);
    doc.put("A", cert.params.A);
    doc.put("epsilon", cert.params.epsilon);
    doc.put("t1", cert.params.t1);
    doc.put("t2", cert.params.t2);

    Report margins = doc.child("margins");
    margins.put("sub_strict", cert.margins.sub_strict);
    margins.put("super_strict", cert.margins.super_strict);
    margins.put("ordering_min_gap", cert.margins.ordering_min_gap);
    margins.put("touch_gap_at_p_tilde", cert.margins.touch_gap_at_p_tilde);
    margins.put("weak_supersolution_min", cert.margins.weak_supersolution_min);
    margins.put("weak_cp_violation", cert.weak_cp_violation);

    Report sol = doc.child("solution_set");
    sol.put_array("roots", cert.solution_set.roots);
    sol.put_array("residuals", cert.solution_set.residuals);
    sol.put("s_lo", cert.solution_set.s_lo);
    sol.put("s_hi", cert.solution_set.s_hi);
    sol.put("n_scan", cert.solution_set.n_scan);
    sol.put("degenerate_plateau", cert.solution_set.degenerate_plateau);
    sol.put("forced_s", cert.forced_s);
    sol.put("forced_s_residual", cert.forced_s_residual);
    sol.put("admissible_root_found", cert.admissible_root_found);

    Report prov = doc.child("provenance");
    prov.put("lambda1", cert.params.lambda1);
    prov.put("lambda_tau", cert.params.lambda_tau);
    prov.put("c_tau", cert.params.c_tau);
    prov.put("norm_phi1_sq", cert.params.norm_phi1_sq);
    prov.put("norm_u_sq", cert.params.norm_u_sq);
    prov.put("mesh_h", cert.mesh_h);
    prov.put("inner_nodes", cert.inner_nodes);
    prov.put("outer_nodes", cert.outer_nodes);
    prov.put("p_tilde_index", cert.p_tilde_index);
    prov.put("p_tilde_x", cert.p_tilde.x);
    prov.put("p_tilde_y", cert.p_tilde.y);

    Report tol = prov.child("tolerances");
    tol.put("strict_margin", cert.tolerances.strict_margin);
    tol.put("ordering", cert.tolerances.ordering);
    tol.put("touch_rel", cert.tolerances.touch_rel);
    tol.put("weak_violation", cert.tolerances.weak_violation);
    tol.put("forced_root_rel", cert.tolerances.forced_root_rel);
    tol.put("sandwich_rel", cert.tolerances.sandwich_rel);
    tol.put("weak_supersolution", cert.tolerances.weak_supersolution);
    tol.put("norm_rel", 1e-6);
    tol.put("eigen_residual_rel", 1e-9);
    return doc;
}

} // namespace

const char* to_string(ScenarioMode mode)
{
    switch (mode) {
        case ScenarioMode::Ssm: return "SSM";
        case ScenarioMode::StrongCp: return "STRONG_CP";
        case ScenarioMode::WeakCp: return "WEAK_CP";
        case ScenarioMode::Classify: return "CLASSIFY";
        case ScenarioMode::Necessity: return "NECESSITY";
    }
    return "SSM";
}

ScenarioConfig parse_config_text(const std::string& text)
{
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) {
        throw ConfigError("config root must be a JSON object");
    }
    ScenarioConfig cfg;
    if (!j.contains("domain")) throw ConfigError("config needs a 'domain' object");
    cfg.domain = parse_domain(j["domain"]);
    if (!j.contains("M")) throw ConfigError("config needs an 'M' object");
    cfg.M = parse_m(j["M"]);
    cfg.mode = parse_mode(need_string(j, "mode"));
    auto opt_number = [&](const char* key) -> std::optional<double> {
        if (!j.contains(key)) return std::nullopt;
        if (!j[key].is_number()) throw ConfigError(std::string("field '") + key + "' must be numeric");
        return j[key].get<double>();
    };
    cfg.t1 = opt_number("t1");
    cfg.t2 = opt_number("t2");
    cfg.tau = opt_number("tau");
    cfg.h = opt_number("h");
    if (auto tm = opt_number("t_max")) cfg.t_max = *tm;
    if (j.contains("n_grid")) cfg.n_grid = j["n_grid"].get<int>();
    if (j.contains("output_path")) cfg.output_path = need_string(j, "output_path");

    if (cfg.t1 && cfg.t2 && !(*cfg.t1 > 0.0 && *cfg.t1 < *cfg.t2)) {
        throw ConfigError("t1, t2 must satisfy 0 < t1 < t2");
    }
    if ((cfg.t1.has_value()) != (cfg.t2.has_value())) {
        throw ConfigError("t1 and t2 must be given together");
    }
    if (cfg.h && !(*cfg.h > 0.0)) throw ConfigError("h must be positive");
    if (cfg.tau && !(*cfg.tau > 0.0)) throw ConfigError("tau must be positive");
    if (!(cfg.t_max > 0.0)) throw ConfigError("t_max must be positive");
    if (cfg.n_grid < 3) throw ConfigError("n_grid must be at least 3");
    return cfg;
}

ScenarioConfig parse_config_file(const std::string& path)
{
    std::ifstream is(path);
    if (!is) {
        throw ConfigError("cannot open config '" + path + "'");
    }
    std::ostringstream buf;
    buf << is.rdbuf();
    return parse_config_text(buf.str());
}

std::string dump_config(const ScenarioConfig& config)
{
    Report doc;
    dump_domain(doc.child("domain"), config.domain);
    dump_m(doc.child("M"), config.M);
    doc.put("mode", to_string(config.mode));
    if (config.t1) doc.put("t1", *config.t1);
    if (config.t2) doc.put("t2", *config.t2);
    if (config.tau) doc.put("tau", *config.tau);
    if (config.h) doc.put("h", *config.h);
    doc.put("t_max", config.t_max);
    doc.put("n_grid", config.n_grid);
    doc.put("output_path", config.output_path);
    return doc.to_json();
}

namespace {

int run_classify(const ScenarioConfig& cfg, std::ostream& diag)
{
    const MClassification cls = classify(cfg.M, cfg.t_max, cfg.n_grid);
    Report doc;
    doc.put("tool", kToolName).put("version", kVersion);
    doc.put("mode", "CLASSIFY");
    doc.put("nonincreasing", cls.nonincreasing);
    doc.put("product_increasing", cls.product_increasing);
    doc.put("verdict", to_string(cls.verdict));
    Report grid = doc.child("grid");
    grid.put("t_max", cls.t_max);
    grid.put("n_grid", cls.n_grid);
    grid.put("scale", "geometric");
    write_text_file(cfg.output_path, doc.to_json());
    diag << "classification: " << to_string(cls.verdict) << " -> " << cfg.output_path << "\n";
    return 0;
}

int run_necessity(const ScenarioConfig& cfg, std::ostream& diag)
{
    if (!cfg.t1 || !cfg.t2) {
        throw ConfigError("NECESSITY mode needs explicit t1 and t2");
    }
    const double h = cfg.h.value_or(default_mesh_h(cfg.domain));
    const Mesh mesh = build_mesh(cfg.domain, h);
    const OperatorPair ops = assemble(mesh);
    const EigenPair phi1 = principal_eigenpair(ops, mesh);
    const ReversedPairReport rep =
        demonstrate_product_necessity(cfg.M, *cfg.t1, *cfg.t2, phi1, ops);

    Report doc;
    doc.put("tool", kToolName).put("version", kVersion);
    doc.put("mode", "NECESSITY");
    doc.put("verdict", rep.degenerate ? "DEGENERATE" : "DEMONSTRATED");
    doc.put("t1", *cfg.t1);
    doc.put("t2", *cfg.t2);
    doc.put("product_t1", rep.product_t1);
    doc.put("product_t2", rep.product_t2);
    doc.put("rhs_margin", rep.rhs_margin);
    doc.put("ordering_margin", rep.ordering_margin);
    doc.put("lambda1", phi1.lambda);
    Report prov = doc.child("provenance");
    prov.put("mesh_h", h);
    prov.put("nodes", mesh.node_count());
    write_text_file(cfg.output_path, doc.to_json());
    write_text_file(cfg.output_path + ".plot.csv",
                    plot_csv(mesh, {{"w", &rep.lower}, {"ell", &rep.upper}, {"phi1", &phi1.phi}}));
    diag << "necessity: reversed pair demonstrated -> " << cfg.output_path << "\n";
    return 0;
}

int run_certification(const ScenarioConfig& cfg, Mode mode, std::ostream& diag)
{
    IncreasingPair pair;
    if (cfg.t1 && cfg.t2) {
        pair.t1 = *cfg.t1;
        pair.t2 = *cfg.t2;
        pair.M1 = eval_M(cfg.M, pair.t1);
        pair.M2 = eval_M(cfg.M, pair.t2);
        if (!(pair.M1 < pair.M2)) {
            throw EmptyInterval(
                "M(t1) >= M(t2): no Theta interval exists, the construction is impossible "
                "(CP is not contradicted by this pair)");
        }
    } else {
        const auto found = find_increasing_pair(cfg.M, cfg.t_max, cfg.n_grid);
        if (!found) {
            throw EmptyInterval(
                "M is nonincreasing on the scan grid: no increasing pair, the construction "
                "is impossible");
        }
        pair = *found;
    }

    const double h = cfg.h.value_or(default_mesh_h(cfg.domain));
    const Counterexample cex =
        build_counterexample(cfg.domain, cfg.M, pair, mode, h, cfg.tau);
    const Certificate cert = certify(cex, cfg.M);

    write_text_file(cfg.output_path, certificate_report(cert).to_json());
    write_text_file(cfg.output_path + ".plot.csv",
                    plot_csv(cex.mesh, {{"lower", &cex.lower},
                                        {"upper", &cex.upper},
                                        {"phi1", &cex.eigen_inner.phi},
                                        {"phi_tau", &cex.phi_tau_restricted}}));
    diag << "certificate: " << to_string(cert.verdict);
    if (!cert.failing_check.empty()) {
        diag << " (" << cert.failing_check << ")";
    }
    diag << " -> " << cfg.output_path << "\n";
    return cert.verdict == Verdict::CertifiedFailure ? 0 : 1;
}

} // namespace

int run_scenario(const ScenarioConfig& config, std::ostream& diag)
{
    try {
        switch (config.mode) {
            case ScenarioMode::Classify:
                return run_classify(config, diag);
            case ScenarioMode::Necessity:
                return run_necessity(config, diag);
            case ScenarioMode::Ssm:
                return run_certification(config, Mode::Ssm, diag);
            case ScenarioMode::StrongCp:
                return run_certification(config, Mode::StrongCp, diag);
            case ScenarioMode::WeakCp:
                return run_certification(config, Mode::WeakCp, diag);
        }
        return 2;
    } catch (const ConfigError& e) {
        diag << "config error: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        diag << "pipeline error [" << e.name() << "]: " << e.what() << "\n";
        return 3;
    }
}

} // namespace kcex

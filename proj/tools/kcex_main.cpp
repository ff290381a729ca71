#include <cmath>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "kcex/errors.hpp"
#include "kcex/oracle1d.hpp"
#include "kcex/report.hpp"
#include "kcex/scenario.hpp"
#include "kcex/version.hpp"

namespace {

int emit_oracle(const std::vector<std::string>& kv, const std::string& out_path)
{
    double tau = 0.5, eps = 0.5, alpha = 1.0;
    for (const auto& item : kv) {
        const auto pos = item.find('=');
        if (pos == std::string::npos) {
            std::cerr << "config error: --oracle expects key=value tokens\n";
            return 2;
        }
        const std::string key = item.substr(0, pos);
        const double value = std::stod(item.substr(pos + 1));
        if (key == "tau") {
            tau = value;
        } else if (key == "eps" || key == "epsilon") {
            eps = value;
        } else if (key == "alpha") {
            alpha = value;
        } else {
            std::cerr << "config error: unknown oracle key '" << key << "'\n";
            return 2;
        }
    }
    const kcex::Oracle1DReport rep = kcex::oracle_report(tau, eps, alpha);
    kcex::Report doc;
    doc.put("tool", kcex::kToolName).put("version", kcex::kVersion);
    doc.put("mode", "ORACLE_1D");
    doc.put("tau", rep.tau);
    doc.put("epsilon", rep.epsilon);
    doc.put("alpha", rep.alpha);
    doc.put("L", rep.L);
    doc.put("lambda1", rep.lambda1);
    doc.put("lambda_tau", rep.lambda_tau);
    doc.put("c_tau", rep.c_tau);
    doc.put("p_tilde", rep.p_tilde);
    doc.put("norm_phi1_sq", rep.norm_phi1_sq);
    doc.put("kink_x", rep.kink_x);
    doc.put("norm_u_sq", rep.norm_u_sq);
    const std::string text = doc.to_json();
    if (out_path.empty()) {
        std::cout << text;
    } else {
        kcex::write_text_file(out_path, text);
    }
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"kcex: builds and certifies counterexamples to the comparison principle "
                 "and the sub/supersolution method for -M(||u||_H^2) Lap u"};
    app.set_version_flag("--version", std::string(kcex::kVersion));
    app.set_help_flag("--help", "print this help message and exit");  // frees --h
    app.fallthrough();

    std::string out_override;
    double h_override = 0.0;
    bool dump = false;
    std::vector<std::string> oracle_kv;
    app.add_option("--out", out_override, "report output path override");
    app.add_option("--h", h_override, "mesh size override");
    app.add_flag("--dump-config", dump, "print the normalized config and exit");
    app.add_option("--oracle", oracle_kv,
                   "print the 1D closed-form oracle report (tau=.. eps=.. alpha=..)")
        ->expected(1, 3);

    std::string run_config, classify_config;
    auto* run_cmd = app.add_subcommand("run", "run the scenario in a config file");
    run_cmd->add_option("config", run_config, "path to the JSON config")
        ->required()
        ->check(CLI::ExistingFile);
    auto* classify_cmd =
        app.add_subcommand("classify", "classify the config's M against the CP conditions");
    classify_cmd->add_option("config", classify_config, "path to the JSON config")
        ->required()
        ->check(CLI::ExistingFile);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (!oracle_kv.empty()) {
            return emit_oracle(oracle_kv, out_override);
        }
        if (!run_cmd->parsed() && !classify_cmd->parsed()) {
            std::cerr << app.help();
            return 2;
        }
        kcex::ScenarioConfig cfg = kcex::parse_config_file(
            run_cmd->parsed() ? run_config : classify_config);
        if (classify_cmd->parsed()) {
            cfg.mode = kcex::ScenarioMode::Classify;
        }
        if (h_override > 0.0) {
            cfg.h = h_override;
        }
        if (!out_override.empty()) {
            cfg.output_path = out_override;
        }
        if (dump) {
            std::cout << kcex::dump_config(cfg);
            return 0;
        }
        return kcex::run_scenario(cfg, std::cerr);
    } catch (const kcex::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const kcex::Error& e) {
        std::cerr << "error [" << e.name() << "]: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}

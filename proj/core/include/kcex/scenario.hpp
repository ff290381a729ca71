#pragma once

#include <iosfwd>
#include <optional>
#include <string>

#include "kcex/geometry.hpp"
#include "kcex/mcatalog.hpp"

namespace kcex {

enum class ScenarioMode { Ssm, StrongCp, WeakCp, Classify, Necessity };

const char* to_string(ScenarioMode mode);

struct ScenarioConfig {
    DomainSpec domain;
    MFunctionSpec M;
    ScenarioMode mode = ScenarioMode::Ssm;
    std::optional<double> t1;
    std::optional<double> t2;
    std::optional<double> tau;  // explicit tau, skips the automatic search
    std::optional<double> h;
    double t_max = 10.0;  // classifier / pair-search scan range
    int n_grid = 512;
    std::string output_path = "kcex_report.json";
};

/// Parses and validates a JSON configuration document.
ScenarioConfig parse_config_text(const std::string& text);
ScenarioConfig parse_config_file(const std::string& path);

/// Deterministic re-serialization; parse(dump(c)) reproduces c exactly.
std::string dump_config(const ScenarioConfig& config);

/// Runs the configured scenario, writing the report document to
/// `output_path` and nodal plot data to `output_path + ".plot.csv"` for the
/// modes that produce fields. Returns the process exit code:
///   0  verdict CERTIFIED_FAILURE (or classification/demonstration complete)
///   1  counterexample built but NOT_CERTIFIED
///   2  configuration error
///   3  pipeline error (NoAdmissibleTau, EmptyInterval, ...)
int run_scenario(const ScenarioConfig& config, std::ostream& diag);

} // namespace kcex

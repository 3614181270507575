#pragma once

// JSON scenario files and result records used by the command-line tool.

#include <array>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>

#include <json.hpp>

#include "shadowcorr/mapping.hpp"
#include "shadowcorr/montecarlo.hpp"

namespace shadowcorr {

/// Malformed scenario input; field() names the offending JSON path or flag.
class ScenarioError : public std::invalid_argument {
  public:
    ScenarioError(std::string field, const std::string& message);
    const std::string& field() const noexcept { return field_; }

  private:
    std::string field_;
};

struct BetaLink {
    double beta;
};
struct EpsilonLink {
    double epsilon;
};

/// One link, given as a normalized margin, a failure probability or a budget.
using LinkSpec = std::variant<BetaLink, EpsilonLink, LinkBudget>;

struct ScenarioFile {
    std::array<std::optional<LinkSpec>, 2> links;
    std::optional<double> rho_h;
    std::optional<SimConfig> sim;
};

LinkReliability resolve(const LinkSpec& link);

/// Strict parse: unknown fields, mixed link forms and wrong types are errors.
ScenarioFile parse_scenario(const nlohmann::json& doc);
ScenarioFile load_scenario(const std::string& path);
nlohmann::json to_json(const ScenarioFile& scenario);
nlohmann::json to_json(const LinkSpec& link);

struct ResultRecord {
    ScenarioFile scenario;
    double beta1 = 0.0;
    double beta2 = 0.0;
    double eps1 = 0.0;
    double eps2 = 0.0;
    double joint_failure = 0.0;
    double rho = 0.0;
    double rho_h = 0.0;
    std::optional<double> rho_target;
    std::optional<double> mc_estimate;
    std::optional<double> mc_std_error;
    std::optional<double> mc_z;
    std::optional<double> mc_rho;
    std::optional<double> mc_rho_std_error;
    std::optional<double> mc_rho_z;
};

nlohmann::json to_json(const ResultRecord& record);
ResultRecord parse_result(const nlohmann::json& doc);

}  // namespace shadowcorr

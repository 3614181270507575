#include "shadowcorr/scenario.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <set>

#include "shadowcorr/errors.hpp"

namespace shadowcorr {

using nlohmann::json;

namespace {

void reject_unknown(const json& obj, const std::set<std::string>& allowed, const std::string& path) {
    for (const auto& [key, value] : obj.items()) {
        if (!allowed.contains(key)) throw ScenarioError(path + "." + key, "unknown field");
    }
}

double number_at(const json& obj, const std::string& key, const std::string& path) {
    if (!obj.contains(key)) throw ScenarioError(path + "." + key, "missing field");
    const json& v = obj.at(key);
    if (!v.is_number()) throw ScenarioError(path + "." + key, "expected a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) throw ScenarioError(path + "." + key, "must be finite");
    return x;
}

std::uint64_t count_at(const json& obj, const std::string& key, const std::string& path) {
    const json& v = obj.at(key);
    if (v.is_number_unsigned()) return v.get<std::uint64_t>();
    // Accept integral floating literals such as 1e6.
    if (v.is_number_float()) {
        const double x = v.get<double>();
        if (x >= 0.0 && x < 1.8e19 && std::floor(x) == x) return static_cast<std::uint64_t>(x);
    }
    throw ScenarioError(path + "." + key, "expected a non-negative integer");
}

LinkSpec parse_link(const json& obj, const std::string& path) {
    if (!obj.is_object()) throw ScenarioError(path, "expected an object");
    static const std::set<std::string> budget_keys = {"p_t_dbm", "p_l_db", "p_th_dbm", "sigma_db"};
    reject_unknown(obj, {"beta", "epsilon", "p_t_dbm", "p_l_db", "p_th_dbm", "sigma_db"}, path);

    int forms = 0;
    forms += obj.contains("beta");
    forms += obj.contains("epsilon");
    bool any_budget = false;
    for (const auto& key : budget_keys) any_budget = any_budget || obj.contains(key);
    forms += any_budget;
    if (forms == 0) throw ScenarioError(path, "link needs beta, epsilon or a link budget");
    if (forms > 1) {
        throw ScenarioError(path, "link mixes beta, epsilon and budget forms; give exactly one");
    }

    if (obj.contains("beta")) return BetaLink{number_at(obj, "beta", path)};
    if (obj.contains("epsilon")) {
        const double eps = number_at(obj, "epsilon", path);
        if (!(eps >= 0.0 && eps <= 1.0)) {
            throw ScenarioError(path + ".epsilon", "must lie in [0, 1]");
        }
        if (eps == 0.0 || eps == 1.0) {
            throw DegenerateInputError(path + ".epsilon: a link that never or always fails "
                                       "has no event correlation");
        }
        return EpsilonLink{eps};
    }
    for (const auto& key : budget_keys) {
        if (!obj.contains(key)) throw ScenarioError(path + "." + key, "missing link budget field");
    }
    LinkBudget budget{number_at(obj, "p_t_dbm", path), number_at(obj, "p_l_db", path),
                      number_at(obj, "p_th_dbm", path), number_at(obj, "sigma_db", path)};
    if (budget.sigma_db <= 0.0) throw ScenarioError(path + ".sigma_db", "must be positive");
    return budget;
}

SimConfig parse_sim(const json& obj, const std::string& path) {
    if (!obj.is_object()) throw ScenarioError(path, "expected an object");
    reject_unknown(obj, {"n_samples", "seed", "method", "batch_count"}, path);
    SimConfig config;
    if (obj.contains("n_samples")) config.n_samples = count_at(obj, "n_samples", path);
    if (obj.contains("seed")) config.seed = count_at(obj, "seed", path);
    if (obj.contains("batch_count")) config.batch_count = count_at(obj, "batch_count", path);
    if (obj.contains("method")) {
        if (!obj.at("method").is_string()) throw ScenarioError(path + ".method", "expected a string");
        try {
            config.method = parse_sim_method(obj.at("method").get<std::string>());
        } catch (const ConfigError& e) {
            throw ScenarioError(path + ".method", e.what());
        }
    }
    return config;
}

json optional_number(const std::optional<double>& value) {
    if (!value) return nullptr;
    if (!std::isfinite(*value)) return nullptr;
    return *value;
}

}  // namespace

ScenarioError::ScenarioError(std::string field, const std::string& message)
    : std::invalid_argument(field + ": " + message), field_(std::move(field)) {}

LinkReliability resolve(const LinkSpec& link) {
    return std::visit(
        [](const auto& form) -> LinkReliability {
            using T = std::decay_t<decltype(form)>;
            if constexpr (std::is_same_v<T, BetaLink>) {
                return link_reliability(form.beta);
            } else if constexpr (std::is_same_v<T, EpsilonLink>) {
                return link_from_epsilon(form.epsilon);
            } else {
                return link_reliability(normalized_margin(form));
            }
        },
        link);
}

ScenarioFile parse_scenario(const json& doc) {
    if (!doc.is_object()) throw ScenarioError("$", "scenario must be a JSON object");
    reject_unknown(doc, {"links", "rho_h", "sim"}, "$");
    ScenarioFile out;
    if (doc.contains("links")) {
        const json& links = doc.at("links");
        if (!links.is_array() || links.size() != 2) {
            throw ScenarioError("$.links", "expected an array of exactly 2 links");
        }
        for (std::size_t i = 0; i < 2; ++i) {
            out.links[i] = parse_link(links[i], "$.links[" + std::to_string(i) + "]");
        }
    }
    if (doc.contains("rho_h")) {
        const double r = number_at(doc, "rho_h", "$");
        if (r < -1.0 || r > 1.0) throw ScenarioError("$.rho_h", "must lie within [-1, 1]");
        out.rho_h = r;
    }
    if (doc.contains("sim")) out.sim = parse_sim(doc.at("sim"), "$.sim");
    return out;
}

ScenarioFile load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ScenarioError("--scenario", "cannot open '" + path + "'");
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ScenarioError("--scenario", std::string("invalid JSON: ") + e.what());
    }
    return parse_scenario(doc);
}

json to_json(const LinkSpec& link) {
    return std::visit(
        [](const auto& form) -> json {
            using T = std::decay_t<decltype(form)>;
            if constexpr (std::is_same_v<T, BetaLink>) {
                return {{"beta", form.beta}};
            } else if constexpr (std::is_same_v<T, EpsilonLink>) {
                return {{"epsilon", form.epsilon}};
            } else {
                return {{"p_t_dbm", form.p_t_dbm},
                        {"p_l_db", form.p_l_db},
                        {"p_th_dbm", form.p_th_dbm},
                        {"sigma_db", form.sigma_db}};
            }
        },
        link);
}

json to_json(const ScenarioFile& scenario) {
    json out = json::object();
    if (scenario.links[0] && scenario.links[1]) {
        out["links"] = json::array({to_json(*scenario.links[0]), to_json(*scenario.links[1])});
    }
    if (scenario.rho_h) out["rho_h"] = *scenario.rho_h;
    if (scenario.sim) {
        out["sim"] = {{"n_samples", scenario.sim->n_samples},
                      {"seed", scenario.sim->seed},
                      {"method", std::string(to_string(scenario.sim->method))},
                      {"batch_count", scenario.sim->batch_count}};
    }
    return out;
}

json to_json(const ResultRecord& r) {
    json out = {{"scenario", to_json(r.scenario)},
                {"beta1", r.beta1},
                {"beta2", r.beta2},
                {"eps1", r.eps1},
                {"eps2", r.eps2},
                {"joint_failure", r.joint_failure},
                {"rho", r.rho},
                {"rho_h", r.rho_h}};
    const std::pair<const char*, const std::optional<double>*> extras[] = {
        {"rho_target", &r.rho_target},       {"mc_estimate", &r.mc_estimate},
        {"mc_std_error", &r.mc_std_error},   {"mc_z", &r.mc_z},
        {"mc_rho", &r.mc_rho},               {"mc_rho_std_error", &r.mc_rho_std_error},
        {"mc_rho_z", &r.mc_rho_z}};
    for (const auto& [key, value] : extras) {
        if (value->has_value()) out[key] = optional_number(*value);
    }
    return out;
}

ResultRecord parse_result(const json& doc) {
    if (!doc.is_object()) throw ScenarioError("$", "result must be a JSON object");
    reject_unknown(doc,
                   {"scenario", "beta1", "beta2", "eps1", "eps2", "joint_failure", "rho", "rho_h",
                    "rho_target", "mc_estimate", "mc_std_error", "mc_z", "mc_rho",
                    "mc_rho_std_error", "mc_rho_z"},
                   "$");
    ResultRecord r;
    r.scenario = parse_scenario(doc.at("scenario"));
    r.beta1 = number_at(doc, "beta1", "$");
    r.beta2 = number_at(doc, "beta2", "$");
    r.eps1 = number_at(doc, "eps1", "$");
    r.eps2 = number_at(doc, "eps2", "$");
    r.joint_failure = number_at(doc, "joint_failure", "$");
    r.rho = number_at(doc, "rho", "$");
    r.rho_h = number_at(doc, "rho_h", "$");
    const auto optional_at = [&](const char* key, std::optional<double>& slot) {
        if (!doc.contains(key)) return;
        if (doc.at(key).is_null()) {
            slot = std::numeric_limits<double>::quiet_NaN();
        } else {
            slot = number_at(doc, key, "$");
        }
    };
    optional_at("rho_target", r.rho_target);
    optional_at("mc_estimate", r.mc_estimate);
    optional_at("mc_std_error", r.mc_std_error);
    optional_at("mc_z", r.mc_z);
    optional_at("mc_rho", r.mc_rho);
    optional_at("mc_rho_std_error", r.mc_rho_std_error);
    optional_at("mc_rho_z", r.mc_rho_z);
    return r;
}

}  // namespace shadowcorr

#include "shadowcorr/cli.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "shadowcorr/errors.hpp"
#include "shadowcorr/gaussian.hpp"
#include "shadowcorr/mapping.hpp"
#include "shadowcorr/montecarlo.hpp"
#include "shadowcorr/scenario.hpp"

namespace shadowcorr::cli {

using nlohmann::json;

namespace {

enum class Format { table, csv, json };

struct Options {
    std::string scenario_path;
    double eps[2] = {0.0, 0.0};
    double beta[2] = {0.0, 0.0};
    double rho_h = 0.0;
    double rho = 0.0;
    std::string grid;
    Format format = Format::table;
    int precision = 6;
    std::uint64_t samples = 0;
    std::uint64_t seed = 0;
    std::string method;
    std::uint64_t batches = 0;
    std::map<const CLI::App*, Format> default_format;
    /// The subcommand that was invoked; used to ask which flags were given.
    const CLI::App* active = nullptr;

    bool given(const std::string& flag) const {
        const CLI::Option* opt = active->get_option_no_throw(flag);
        return opt != nullptr && opt->count() > 0;
    }
};

void add_link_options(CLI::App& cmd, Options& o) {
    cmd.add_option("--scenario", o.scenario_path, "JSON scenario file")->check(CLI::ExistingFile);
    cmd.add_option("--eps1", o.eps[0], "failure probability of link 1");
    cmd.add_option("--eps2", o.eps[1], "failure probability of link 2");
    cmd.add_option("--beta1", o.beta[0], "normalized margin of link 1");
    cmd.add_option("--beta2", o.beta[1], "normalized margin of link 2");
}

void add_format_options(CLI::App& cmd, Options& o, Format fallback) {
    o.default_format[&cmd] = fallback;
    const std::map<std::string, Format> formats = {
        {"table", Format::table}, {"csv", Format::csv}, {"json", Format::json}};
    cmd.add_option("--format", o.format, "output format: table, csv or json")
        ->transform(CLI::CheckedTransformer(formats, CLI::ignore_case))
        ->option_text("table|csv|json");
    cmd.add_option("--precision", o.precision, "significant digits for table/csv output")
        ->check(CLI::Range(1, 17));
}

void add_sim_options(CLI::App& cmd, Options& o) {
    cmd.add_option("--samples", o.samples, "Monte Carlo sample count");
    cmd.add_option("--seed", o.seed, "64-bit seed");
    cmd.add_option("--method", o.method, "plain or importance");
    cmd.add_option("--batches", o.batches, "batch count for stream splitting");
}

// File first, then command-line flags on top.
ScenarioFile assemble_scenario(const Options& o) {
    ScenarioFile s;
    if (!o.scenario_path.empty()) s = load_scenario(o.scenario_path);
    for (int i = 0; i < 2; ++i) {
        const std::string n = std::to_string(i + 1);
        const bool has_eps = o.given("--eps" + n);
        const bool has_beta = o.given("--beta" + n);
        if (has_eps && has_beta) {
            throw ScenarioError("--eps" + n + "/--beta" + n, "give only one form for link " + n);
        }
        if (has_eps) {
            if (!(o.eps[i] >= 0.0 && o.eps[i] <= 1.0)) {
                throw ScenarioError("--eps" + n, "must lie in [0, 1]");
            }
            if (o.eps[i] == 0.0 || o.eps[i] == 1.0) {
                throw DegenerateInputError("link " + n +
                                           " never or always fails; event correlation is undefined");
            }
            s.links[i] = EpsilonLink{o.eps[i]};
        }
        if (has_beta) {
            if (!std::isfinite(o.beta[i])) throw ScenarioError("--beta" + n, "must be finite");
            s.links[i] = BetaLink{o.beta[i]};
        }
        if (!s.links[i]) {
            throw ScenarioError("links[" + std::to_string(i) + "]",
                                "missing; pass --eps" + n + ", --beta" + n + " or --scenario");
        }
    }
    if (o.given("--rho-h")) {
        if (!(o.rho_h >= -1.0 && o.rho_h <= 1.0)) {
            throw ScenarioError("--rho-h", "must lie within [-1, 1]");
        }
        s.rho_h = o.rho_h;
    }
    return s;
}

double require_rho_h(const ScenarioFile& s) {
    if (!s.rho_h) throw ScenarioError("rho_h", "missing; pass --rho-h or set rho_h in the scenario");
    return *s.rho_h;
}

std::string fmt(double x, int precision) {
    std::ostringstream os;
    os << std::setprecision(precision) << x;
    return os.str();
}

struct Columns {
    std::vector<std::string> names;
    std::vector<std::vector<double>> rows;
};

void emit(const Columns& table, Format format, int precision, std::ostream& out) {
    if (format == Format::json) {
        json arr = json::array();
        for (const auto& row : table.rows) {
            json obj = json::object();
            for (std::size_t c = 0; c < table.names.size(); ++c) obj[table.names[c]] = row[c];
            arr.push_back(obj);
        }
        out << arr.dump(2) << '\n';
        return;
    }
    if (format == Format::csv) {
        for (std::size_t c = 0; c < table.names.size(); ++c) out << (c ? "," : "") << table.names[c];
        out << '\n';
        for (const auto& row : table.rows) {
            for (std::size_t c = 0; c < row.size(); ++c) out << (c ? "," : "") << fmt(row[c], precision);
            out << '\n';
        }
        return;
    }
    std::vector<std::size_t> width(table.names.size());
    for (std::size_t c = 0; c < table.names.size(); ++c) {
        width[c] = table.names[c].size();
        for (const auto& row : table.rows) width[c] = std::max(width[c], fmt(row[c], precision).size());
    }
    for (std::size_t c = 0; c < table.names.size(); ++c) {
        out << (c ? "  " : "") << std::setw(static_cast<int>(width[c])) << table.names[c];
    }
    out << '\n';
    for (const auto& row : table.rows) {
        for (std::size_t c = 0; c < row.size(); ++c) {
            out << (c ? "  " : "") << std::setw(static_cast<int>(width[c])) << fmt(row[c], precision);
        }
        out << '\n';
    }
}

void emit_record(const ResultRecord& r, Format format, int precision, std::ostream& out) {
    if (format == Format::json) {
        out << to_json(r).dump(2) << '\n';
        return;
    }
    json flat = to_json(r);
    flat.erase("scenario");
    std::vector<std::pair<std::string, std::string>> fields;
    for (const auto& [key, value] : flat.items()) {
        fields.emplace_back(key, value.is_null() ? "nan" : fmt(value.get<double>(), precision));
    }
    if (format == Format::csv) {
        for (std::size_t i = 0; i < fields.size(); ++i) out << (i ? "," : "") << fields[i].first;
        out << '\n';
        for (std::size_t i = 0; i < fields.size(); ++i) out << (i ? "," : "") << fields[i].second;
        out << '\n';
        return;
    }
    std::size_t width = 0;
    for (const auto& f : fields) width = std::max(width, f.first.size());
    for (const auto& [key, value] : fields) {
        out << std::left << std::setw(static_cast<int>(width)) << key << "  " << value << '\n';
    }
    out << std::right;
}

ResultRecord analytic_record(const ScenarioFile& s, double rho_h) {
    const LinkReliability l1 = resolve(*s.links[0]);
    const LinkReliability l2 = resolve(*s.links[1]);
    const DualLinkScenario scenario{l1, l2, ShadowingCorrelation(rho_h)};
    const CorrelationResult c = event_correlation(scenario);
    ResultRecord r;
    r.scenario = s;
    r.beta1 = l1.beta;
    r.beta2 = l2.beta;
    r.eps1 = l1.epsilon;
    r.eps2 = l2.epsilon;
    r.joint_failure = c.joint_failure;
    r.rho = c.rho;
    r.rho_h = rho_h;
    return r;
}

Columns sweep_columns(const LinkReliability& l1, const LinkReliability& l2,
                      const std::vector<double>& grid) {
    Columns table{{"rho_h", "eps1", "eps2", "joint_failure", "rho"}, {}};
    for (double rho_h : grid) {
        const CorrelationResult c = event_correlation({l1, l2, ShadowingCorrelation(rho_h)});
        table.rows.push_back({rho_h, l1.epsilon, l2.epsilon, c.joint_failure, c.rho});
    }
    return table;
}

double z_score(double estimate, double reference, double std_error) {
    const double diff = estimate - reference;
    if (std_error > 0.0) return diff / std_error;
    if (diff == 0.0) return 0.0;
    return std::copysign(std::numeric_limits<double>::infinity(), diff);
}

int cmd_map(const Options& o, std::ostream& out) {
    const ScenarioFile s = assemble_scenario(o);
    emit_record(analytic_record(s, require_rho_h(s)), o.format, o.precision, out);
    return kOk;
}

int cmd_invert(const Options& o, std::ostream& out) {
    ScenarioFile s = assemble_scenario(o);
    const LinkReliability l1 = resolve(*s.links[0]);
    const LinkReliability l2 = resolve(*s.links[1]);
    const double rho_h = invert_correlation(o.rho, l1, l2).value();
    s.rho_h.reset();
    ResultRecord r = analytic_record(s, rho_h);
    r.rho_target = o.rho;
    emit_record(r, o.format, o.precision, out);
    return kOk;
}

int cmd_table(const Options& o, std::ostream& out) {
    const LinkReliability link = link_from_epsilon(kTableEpsilon);
    const std::vector<double> grid(std::begin(kTableRhoH), std::end(kTableRhoH));
    const Columns table = sweep_columns(link, link, grid);
    if (o.format != Format::table) {
        emit(table, o.format, o.precision, out);
        return kOk;
    }
    // Two-row layout: shadowing correlations on top, event correlations below.
    std::vector<std::string> top{"rho_h"};
    std::vector<std::string> bottom{"rho"};
    for (const auto& row : table.rows) {
        top.push_back(fmt(row[0], o.precision));
        bottom.push_back(fmt(row[4], o.precision));
    }
    for (std::size_t c = 0; c < top.size(); ++c) {
        const std::size_t w = std::max(top[c].size(), bottom[c].size());
        // Labels are left-aligned, numbers right-aligned.
        const auto pad = [&](std::string& cell) {
            if (c == 0) {
                cell.append(w - cell.size(), ' ');
            } else {
                cell.insert(0, w - cell.size(), ' ');
            }
        };
        pad(top[c]);
        pad(bottom[c]);
    }
    out << "eps = " << fmt(kTableEpsilon, o.precision) << '\n';
    for (const auto* line : {&top, &bottom}) {
        for (std::size_t c = 0; c < line->size(); ++c) out << (c ? "  " : "") << (*line)[c];
        out << '\n';
    }
    return kOk;
}

int cmd_sweep(const Options& o, std::ostream& out) {
    const ScenarioFile s = assemble_scenario(o);
    const std::vector<double> grid = parse_grid(o.grid);
    emit(sweep_columns(resolve(*s.links[0]), resolve(*s.links[1]), grid), o.format, o.precision, out);
    return kOk;
}

int cmd_simulate(const Options& o, std::ostream& out) {
    ScenarioFile s = assemble_scenario(o);
    SimConfig config = s.sim.value_or(SimConfig{});
    if (o.given("--samples")) config.n_samples = o.samples;
    if (o.given("--seed")) config.seed = o.seed;
    if (o.given("--batches")) config.batch_count = o.batches;
    if (o.given("--method")) {
        try {
            config.method = parse_sim_method(o.method);
        } catch (const ConfigError& e) {
            throw ScenarioError("--method", e.what());
        }
    }
    try {
        validate(config);
    } catch (const ConfigError& e) {
        throw ScenarioError("sim", e.what());
    }
    s.sim = config;

    ResultRecord r = analytic_record(s, require_rho_h(s));
    const ShadowingCorrelation rho_h(r.rho_h);
    const McEstimate joint = estimate_joint_failure(r.beta1, r.beta2, rho_h, config);
    r.mc_estimate = joint.estimate;
    r.mc_std_error = joint.std_error;
    r.mc_z = z_score(joint.estimate, r.joint_failure, joint.std_error);
    if (config.method == SimMethod::plain) {
        const McEstimate corr = estimate_event_correlation(r.beta1, r.beta2, rho_h, config);
        r.mc_rho = corr.estimate;
        r.mc_rho_std_error = corr.std_error;
        r.mc_rho_z = z_score(corr.estimate, r.rho, corr.std_error);
    }
    emit_record(r, o.format, o.precision, out);
    return kOk;
}

}  // namespace

std::vector<double> parse_grid(const std::string& text) {
    const auto parse_number = [](const std::string& token) {
        std::size_t used = 0;
        double value = 0.0;
        try {
            value = std::stod(token, &used);
        } catch (const std::exception&) {
            throw ScenarioError("--grid", "cannot parse '" + token + "' as a number");
        }
        if (used != token.size() || !std::isfinite(value)) {
            throw ScenarioError("--grid", "cannot parse '" + token + "' as a number");
        }
        return value;
    };
    const auto split = [](const std::string& s, char sep) {
        std::vector<std::string> parts;
        std::string part;
        std::istringstream is(s);
        while (std::getline(is, part, sep)) parts.push_back(part);
        if (!s.empty() && s.back() == sep) parts.emplace_back();
        return parts;
    };

    if (text.empty()) throw ScenarioError("--grid", "grid is empty");
    std::vector<double> grid;
    if (text.find(':') != std::string::npos) {
        const auto parts = split(text, ':');
        if (parts.size() != 3) throw ScenarioError("--grid", "expected start:stop:step");
        const double start = parse_number(parts[0]);
        const double stop = parse_number(parts[1]);
        const double step = parse_number(parts[2]);
        if (step == 0.0 || (stop - start) * step < 0.0) {
            throw ScenarioError("--grid", "step must be non-zero and point from start to stop");
        }
        const auto count = static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9)) + 1;
        if (count > 10'000'000) throw ScenarioError("--grid", "too many grid points");
        for (std::size_t i = 0; i < count; ++i) {
            double x = start + static_cast<double>(i) * step;
            if (std::abs(x) > 1.0 && std::abs(x) - 1.0 < 1e-12) x = std::copysign(1.0, x);
            grid.push_back(x);
        }
    } else {
        for (const auto& token : split(text, ',')) grid.push_back(parse_number(token));
    }
    if (grid.empty()) throw ScenarioError("--grid", "grid is empty");
    for (double x : grid) {
        if (x < -1.0 || x > 1.0) throw ScenarioError("--grid", "grid points must lie within [-1, 1]");
    }
    return grid;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Shadowing-correlation to failure-event-correlation mapping for dual links",
                 "shadowcorr"};
    app.require_subcommand(1);
    Options o;

    auto* map = app.add_subcommand("map", "event correlation and joint failure for a scenario");
    add_link_options(*map, o);
    map->add_option("--rho-h", o.rho_h, "shadowing cross-correlation");
    add_format_options(*map, o, Format::table);

    auto* invert = app.add_subcommand("invert", "shadowing correlation giving a target event correlation");
    add_link_options(*invert, o);
    invert->add_option("--rho", o.rho, "target event correlation")->required();
    add_format_options(*invert, o, Format::table);

    auto* table = app.add_subcommand("table", "event correlation table for eps = 1e-4");
    add_format_options(*table, o, Format::table);

    auto* sweep = app.add_subcommand("sweep", "CSV of event correlation over a rho_h grid");
    add_link_options(*sweep, o);
    sweep->add_option("--grid", o.grid, "start:stop:step or comma list")->required();
    add_format_options(*sweep, o, Format::csv);

    auto* simulate = app.add_subcommand("simulate", "Monte Carlo check of the analytic values");
    add_link_options(*simulate, o);
    simulate->add_option("--rho-h", o.rho_h, "shadowing cross-correlation");
    add_format_options(*simulate, o, Format::table);
    add_sim_options(*simulate, o);

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kBadInput;
    }

    for (const CLI::App* cmd : {map, invert, table, sweep, simulate}) {
        if (cmd->parsed()) o.active = cmd;
    }
    if (o.active != nullptr && !o.given("--format")) o.format = o.default_format.at(o.active);
    try {
        if (map->parsed()) return cmd_map(o, out);
        if (invert->parsed()) return cmd_invert(o, out);
        if (table->parsed()) return cmd_table(o, out);
        if (sweep->parsed()) return cmd_sweep(o, out);
        return cmd_simulate(o, out);
    } catch (const ScenarioError& e) {
        err << "error: " << e.what() << '\n';
        return kBadInput;
    } catch (const UnattainableCorrelationError& e) {
        err << "error: " << e.what() << '\n';
        return kUnattainable;
    } catch (const DegenerateInputError& e) {
        err << "error: " << e.what() << '\n';
        return kDegenerate;
    } catch (const InsufficientEventsError& e) {
        err << "error: " << e.what() << '\n';
        return kInsufficientEvents;
    } catch (const DomainError& e) {
        err << "error: " << e.what() << '\n';
        return kBadInput;
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << '\n';
        return kBadInput;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << '\n';
        return kInternalError;
    }
}

}  // namespace shadowcorr::cli

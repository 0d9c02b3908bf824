#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <sstream>

#include "rocket/csv.hpp"
#include "rocket/harness.hpp"
#include "rocket/sparse_regression.hpp"

namespace rocket {

std::string to_string(Estimator e) {
    switch (e) {
        case Estimator::Rocket: return "rocket";
        case Estimator::Pearson: return "pearson";
        case Estimator::Npn: return "npn";
        case Estimator::PseudoScore: return "pseudo_score";
    }
    return "?";
}

Estimator estimator_from_string(const std::string& name) {
    if (name == "rocket") return Estimator::Rocket;
    if (name == "pearson") return Estimator::Pearson;
    if (name == "npn") return Estimator::Npn;
    if (name == "pseudo_score") return Estimator::PseudoScore;
    throw ConfigError("unknown estimator '" + name + "'");
}

LassoConfig ExperimentConfig::lasso_config(Index p) const {
    LassoConfig cfg;
    cfg.lambda = lambda ? *lambda : default_lambda(n, p);
    return cfg;
}

namespace {

std::string trim(const std::string& s) {
    const auto from = s.find_first_not_of(" \t\r");
    if (from == std::string::npos) return "";
    const auto to = s.find_last_not_of(" \t\r");
    return s.substr(from, to - from + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> parts;
    std::string part;
    std::istringstream is(s);
    while (std::getline(is, part, sep)) {
        part = trim(part);
        if (!part.empty()) parts.push_back(part);
    }
    return parts;
}

double parse_double(const std::string& key, const std::string& value) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(value, &pos);
        if (pos != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw ConfigError(key + ": cannot parse '" + value + "' as a number");
    }
}

long parse_long(const std::string& key, const std::string& value) {
    try {
        std::size_t pos = 0;
        const long v = std::stol(value, &pos);
        if (pos != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw ConfigError(key + ": cannot parse '" + value + "' as an integer");
    }
}

using Section = std::map<std::string, std::string>;
using Sections = std::map<std::string, Section>;

Sections parse_sections(const std::string& text) {
    Sections sections;
    std::string current = "run";
    std::istringstream is(text);
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') throw ConfigError("line " + std::to_string(lineno) + ": unterminated section header");
            current = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
        sections[current][trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    return sections;
}

// "a-b" with 1-based node ids, or "(r,c)-(r,c)" grid coordinates.
EdgeTarget parse_edge(const std::string& token, const GraphSpec& graph) {
    auto parse_endpoint = [&](const std::string& part) -> Index {
        if (!part.empty() && part.front() == '(') {
            if (part.back() != ')') throw ConfigError("edge endpoint '" + part + "': missing ')'");
            const auto inner = split(part.substr(1, part.size() - 2), ',');
            if (inner.size() != 2) throw ConfigError("edge endpoint '" + part + "': expected (row,col)");
            if (graph.kind != GraphSpec::Kind::Grid && graph.kind != GraphSpec::Kind::GridRect)
                throw ConfigError("grid coordinates only apply to grid graphs");
            const long r = parse_long("edge row", inner[0]);
            const long c = parse_long("edge col", inner[1]);
            return graph.grid_node(r, c);
        }
        const long v = parse_long("edge node", part);
        if (v < 1) throw ConfigError("edge nodes are 1-based");
        return static_cast<Index>(v - 1);
    };

    // split on the '-' separating endpoints (the one outside parentheses)
    int depth = 0;
    for (std::size_t i = 0; i < token.size(); ++i) {
        if (token[i] == '(') ++depth;
        if (token[i] == ')') --depth;
        if (token[i] == '-' && depth == 0 && i > 0) {
            return EdgeTarget{parse_endpoint(trim(token.substr(0, i))),
                              parse_endpoint(trim(token.substr(i + 1)))};
        }
    }
    throw ConfigError("edge '" + token + "': expected a-b or (r,c)-(r,c)");
}

std::string edge_to_string(const EdgeTarget& e) {
    return std::to_string(e.a + 1) + "-" + std::to_string(e.b + 1);
}

} // namespace

ExperimentConfig parse_config_text(const std::string& text) {
    const Sections sections = parse_sections(text);
    ExperimentConfig cfg;

    if (auto it = sections.find("scenario"); it != sections.end()) {
        const Section& s = it->second;
        auto get = [&](const char* key) -> const std::string* {
            auto kit = s.find(key);
            return kit == s.end() ? nullptr : &kit->second;
        };
        const std::string graph = get("graph") ? *get("graph") : "grid";
        const double weight = get("weight") ? parse_double("weight", *get("weight")) : 0.24;
        if (graph == "grid") {
            cfg.scenario.graph = GraphSpec::grid(get("side") ? parse_long("side", *get("side")) : 10, weight);
        } else if (graph == "grid_rect") {
            if (!get("rows") || !get("cols")) throw ConfigError("grid_rect needs rows and cols");
            cfg.scenario.graph = GraphSpec::grid_rect(parse_long("rows", *get("rows")),
                                                      parse_long("cols", *get("cols")), weight);
        } else if (graph == "chain") {
            cfg.scenario.graph = GraphSpec::chain(get("p") ? parse_long("p", *get("p")) : 100, weight);
        } else if (graph == "pair") {
            cfg.scenario.graph = GraphSpec::pair(get("p") ? parse_long("p", *get("p")) : 100, weight);
        } else {
            throw ConfigError("unknown graph kind '" + graph + "'");
        }

        const std::string radius = get("radius") ? *get("radius") : "chi";
        const double dof = get("radius_dof") ? parse_double("radius_dof", *get("radius_dof")) : 5.0;
        if (radius == "chi") {
            cfg.scenario.radius = RadiusLaw::chi();
        } else if (radius == "abs_t") {
            cfg.scenario.radius = RadiusLaw::abs_t(dof);
        } else if (radius == "mvt") {
            cfg.scenario.radius = RadiusLaw::mvt(dof);
        } else {
            throw ConfigError("unknown radius kind '" + radius + "'");
        }

        if (get("marginals")) {
            const std::string m = *get("marginals");
            if (m == "five") {
                cfg.scenario.marginals = true;
            } else if (m != "none") {
                throw ConfigError("marginals must be 'none' or 'five'");
            }
        }

        if (get("contamination") && *get("contamination") != "none") {
            ContaminationSpec spec;
            const std::string mech = *get("contamination");
            if (mech == "random_row") {
                spec.mechanism = ContaminationSpec::Mechanism::RandomRow;
            } else if (mech == "deterministic_row") {
                spec.mechanism = ContaminationSpec::Mechanism::DeterministicRow;
            } else if (mech == "element") {
                spec.mechanism = ContaminationSpec::Mechanism::Element;
            } else {
                throw ConfigError("unknown contamination mechanism '" + mech + "'");
            }
            if (!get("contamination_rate")) throw ConfigError("contamination requires contamination_rate");
            spec.rate = parse_double("contamination_rate", *get("contamination_rate"));
            cfg.scenario.contamination = spec;
        }
    }

    if (auto it = sections.find("run"); it != sections.end()) {
        for (const auto& [key, value] : it->second) {
            if (key == "n") {
                cfg.n = parse_long(key, value);
            } else if (key == "replications") {
                cfg.replications = static_cast<int>(parse_long(key, value));
            } else if (key == "alpha") {
                cfg.alpha = parse_double(key, value);
            } else if (key == "lambda") {
                if (value != "default") cfg.lambda = parse_double(key, value);
            } else if (key == "seed") {
                cfg.seed = static_cast<std::uint64_t>(parse_long(key, value));
            } else if (key == "threads") {
                cfg.threads = static_cast<std::size_t>(parse_long(key, value));
            } else if (key == "estimators") {
                cfg.estimators.clear();
                for (const auto& name : split(value, ','))
                    cfg.estimators.push_back(estimator_from_string(name));
            } else if (key == "edges") {
                cfg.edges.clear();
                for (const auto& token : split(value, ';'))
                    cfg.edges.push_back(parse_edge(token, cfg.scenario.graph));
            } else {
                throw ConfigError("unknown key '" + key + "' in [run]");
            }
        }
    }

    if (auto it = sections.find("power"); it != sections.end()) {
        for (const auto& [key, value] : it->second) {
            if (key == "rho") {
                cfg.power_rhos.clear();
                for (const auto& token : split(value, ','))
                    cfg.power_rhos.push_back(parse_double("rho", token));
            } else {
                throw ConfigError("unknown key '" + key + "' in [power]");
            }
        }
    }

    if (auto it = sections.find("subsample"); it != sections.end()) {
        for (const auto& [key, value] : it->second) {
            if (key == "count") {
                cfg.subsample_count = static_cast<int>(parse_long(key, value));
            } else if (key == "size") {
                cfg.subsample_size = parse_long(key, value);
            } else {
                throw ConfigError("unknown key '" + key + "' in [subsample]");
            }
        }
    }

    if (auto it = sections.find("graph"); it != sections.end()) {
        for (const auto& [key, value] : it->second) {
            if (key == "threshold") {
                cfg.graph_threshold = parse_double(key, value);
            } else {
                throw ConfigError("unknown key '" + key + "' in [graph]");
            }
        }
    }

    if (cfg.replications < 1) throw ConfigError("replications must be >= 1");
    if (!(cfg.alpha > 0.0 && cfg.alpha < 1.0)) throw ConfigError("alpha must lie in (0, 1)");
    const Index p = cfg.scenario.graph.dim();
    for (const auto& e : cfg.edges) {
        if (e.a < 0 || e.b < 0 || e.a >= p || e.b >= p || e.a == e.b)
            throw ConfigError("edge " + edge_to_string(e) + " out of range for p = " + std::to_string(p));
    }
    if (cfg.estimators.empty()) throw ConfigError("at least one estimator required");
    return cfg;
}

ExperimentConfig parse_config_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open config file " + path);
    std::ostringstream buf;
    buf << is.rdbuf();
    return parse_config_text(buf.str());
}

std::string serialize_config(const ExperimentConfig& cfg) {
    // shortest round-trip decimals, so the echo both re-parses to the same
    // run and stays readable
    auto num = [](double v) { return csv::format_double(v); };
    std::ostringstream os;
    os << "[scenario]\n";
    const GraphSpec& g = cfg.scenario.graph;
    switch (g.kind) {
        case GraphSpec::Kind::Grid:
            os << "graph = grid\nside = " << g.side << "\n";
            break;
        case GraphSpec::Kind::GridRect:
            os << "graph = grid_rect\nrows = " << g.rows << "\ncols = " << g.cols << "\n";
            break;
        case GraphSpec::Kind::Chain:
            os << "graph = chain\np = " << g.p << "\n";
            break;
        case GraphSpec::Kind::Pair:
            os << "graph = pair\np = " << g.p << "\n";
            break;
    }
    os << "weight = " << num(g.weight) << "\n";
    switch (cfg.scenario.radius.kind) {
        case RadiusLaw::Kind::Chi:
            os << "radius = chi\n";
            break;
        case RadiusLaw::Kind::AbsT:
            os << "radius = abs_t\nradius_dof = " << num(cfg.scenario.radius.dof) << "\n";
            break;
        case RadiusLaw::Kind::Mvt:
            os << "radius = mvt\nradius_dof = " << num(cfg.scenario.radius.dof) << "\n";
            break;
    }
    os << "marginals = " << (cfg.scenario.marginals ? "five" : "none") << "\n";
    if (cfg.scenario.contamination) {
        const auto& c = *cfg.scenario.contamination;
        const char* mech = "random_row";
        if (c.mechanism == ContaminationSpec::Mechanism::DeterministicRow) mech = "deterministic_row";
        if (c.mechanism == ContaminationSpec::Mechanism::Element) mech = "element";
        os << "contamination = " << mech << "\ncontamination_rate = " << num(c.rate) << "\n";
    } else {
        os << "contamination = none\n";
    }

    os << "\n[run]\n";
    os << "n = " << cfg.n << "\n";
    os << "replications = " << cfg.replications << "\n";
    os << "alpha = " << num(cfg.alpha) << "\n";
    if (cfg.lambda) {
        os << "lambda = " << num(*cfg.lambda) << "\n";
    } else {
        os << "lambda = default\n";
    }
    os << "seed = " << cfg.seed << "\n";
    os << "threads = " << cfg.threads << "\n";
    os << "estimators = ";
    for (std::size_t i = 0; i < cfg.estimators.size(); ++i) {
        if (i > 0) os << ",";
        os << to_string(cfg.estimators[i]);
    }
    os << "\n";
    if (!cfg.edges.empty()) {
        os << "edges = ";
        for (std::size_t i = 0; i < cfg.edges.size(); ++i) {
            if (i > 0) os << "; ";
            os << edge_to_string(cfg.edges[i]);
        }
        os << "\n";
    }

    if (!cfg.power_rhos.empty()) {
        os << "\n[power]\nrho = ";
        for (std::size_t i = 0; i < cfg.power_rhos.size(); ++i) {
            if (i > 0) os << ",";
            os << num(cfg.power_rhos[i]);
        }
        os << "\n";
    }
    os << "\n[subsample]\ncount = " << cfg.subsample_count << "\nsize = " << cfg.subsample_size
       << "\n";
    os << "\n[graph]\nthreshold = " << num(cfg.graph_threshold) << "\n";
    return os.str();
}

} // namespace rocket

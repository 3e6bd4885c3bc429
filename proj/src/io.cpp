#include "powerseek/io.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

namespace powerseek {

namespace {

const Json& require(const Json& doc, const char* key, const std::string& where) {
    if (!doc.is_object() || !doc.contains(key)) throw ParseError(where + ": missing field \"" + key + "\"");
    return doc.at(key);
}

std::string require_string(const Json& doc, const char* key, const std::string& where) {
    const Json& v = require(doc, key, where);
    if (!v.is_string()) throw ParseError(where + ": field \"" + key + "\" must be a string");
    return v.get<std::string>();
}

Rational rational_field(const Json& v, const std::string& where) {
    std::string text;
    if (v.is_string()) {
        text = v.get<std::string>();
    } else if (v.is_number_integer() || v.is_number_unsigned()) {
        text = v.dump();
    } else if (v.is_number_float()) {
        text = v.dump();
    } else {
        throw ParseError(where + ": expected a number or a \"p/q\" string");
    }
    try {
        return parse_rational(text);
    } catch (const InvalidArgument& e) {
        throw ParseError(where + ": " + e.what());
    }
}

std::string quoted(const std::string& s) { return "\"" + s + "\""; }

}  // namespace

ShutdownScenario<Rational> scenario_from_json(const Json& doc) {
    if (!doc.is_object()) throw ParseError("scenario: top level must be an object");
    const Json& states = require(doc, "states", "scenario");
    if (!states.is_array() || states.empty()) throw ParseError("states: expected a nonempty array of names");
    const int d = static_cast<int>(states.size());

    std::map<std::string, int> index;
    TabularMdp<Rational> mdp(d);
    for (int s = 0; s < d; ++s) {
        if (!states[s].is_string()) throw ParseError("states[" + std::to_string(s) + "]: expected a string");
        const auto name = states[s].get<std::string>();
        if (!index.emplace(name, s).second) throw ParseError("states: duplicate name " + quoted(name));
        mdp.set_state_name(s, name);
    }
    auto state_ref = [&](const Json& v, const std::string& where) {
        if (!v.is_string()) throw ParseError(where + ": expected a state name");
        const auto it = index.find(v.get<std::string>());
        if (it == index.end()) throw ParseError(where + ": unknown state " + quoted(v.get<std::string>()));
        return it->second;
    };

    std::vector<bool> terminal(d, false);
    if (doc.contains("terminal")) {
        const Json& list = doc.at("terminal");
        if (!list.is_array()) throw ParseError("terminal: expected an array of state names");
        for (std::size_t i = 0; i < list.size(); ++i) terminal[state_ref(list[i], "terminal[" + std::to_string(i) + "]")] = true;
    }

    const Json& actions = require(doc, "actions", "scenario");
    if (!actions.is_array() || static_cast<int>(actions.size()) != d) {
        throw ParseError("actions: expected one list of action names per state");
    }
    std::vector<std::vector<std::string>> action_names(d);
    for (int s = 0; s < d; ++s) {
        const std::string where = "actions[" + mdp.state_name(s) + "]";
        if (!actions[s].is_array()) throw ParseError(where + ": expected an array of names");
        for (const auto& a : actions[s]) {
            if (!a.is_string()) throw ParseError(where + ": action names must be strings");
            const auto name = a.get<std::string>();
            if (std::find(action_names[s].begin(), action_names[s].end(), name) != action_names[s].end()) {
                throw ParseError(where + ": duplicate action " + quoted(name));
            }
            action_names[s].push_back(name);
        }
        if (terminal[s]) {
            if (!(action_names[s].empty() || (action_names[s].size() == 1 && action_names[s][0] == "stay"))) {
                throw ParseError(where + ": a terminal state may only list \"stay\"");
            }
        } else if (action_names[s].empty()) {
            throw ParseError(where + ": non-terminal state without actions");
        }
    }

    std::vector<std::vector<std::vector<Outcome<Rational>>>> rows(d);
    for (int s = 0; s < d; ++s) rows[s].resize(action_names[s].size());
    const Json& transitions = require(doc, "transitions", "scenario");
    if (!transitions.is_array()) throw ParseError("transitions: expected an array");
    for (std::size_t i = 0; i < transitions.size(); ++i) {
        const Json& t = transitions[i];
        const std::string where = "transitions[" + std::to_string(i) + "]";
        const int s = state_ref(require(t, "state", where), where + ".state");
        const std::string action = require_string(t, "action", where);
        const int next = state_ref(require(t, "next", where), where + ".next");
        const std::string triple = "transition (" + mdp.state_name(s) + ", " + action + ", " + mdp.state_name(next) + ")";
        if (terminal[s]) {
            if (action == "stay" && next == s) continue;
            throw ParseError(triple + ": terminal states only loop to themselves");
        }
        const auto& names = action_names[s];
        const auto it = std::find(names.begin(), names.end(), action);
        if (it == names.end()) throw ParseError(triple + ": action " + quoted(action) + " is not declared");
        const Rational p = rational_field(require(t, "prob", where), triple);
        if (p < 0 || p > 1) throw ParseError(triple + ": probability " + to_string(p) + " is not in [0, 1]");
        rows[s][static_cast<std::size_t>(it - names.begin())].push_back({next, p});
    }
    for (int s = 0; s < d; ++s) {
        if (terminal[s]) continue;
        for (std::size_t a = 0; a < rows[s].size(); ++a) {
            const std::string where = "action (" + mdp.state_name(s) + ", " + action_names[s][a] + ")";
            if (rows[s][a].empty()) throw ParseError(where + ": no transitions");
            Rational total(0);
            for (const auto& o : rows[s][a]) total += o.prob;
            if (total != 1) throw ParseError(where + ": probabilities sum to " + to_string(total) + ", not 1");
            mdp.add_action(s, rows[s][a], action_names[s][a]);
        }
    }
    for (int s = 0; s < d; ++s) {
        if (terminal[s]) mdp.set_terminal(s);
    }
    try {
        mdp.validate();
    } catch (const InvalidArgument& e) {
        throw ParseError(std::string("mdp: ") + e.what());
    }

    ShutdownScenario<Rational> scenario;
    scenario.name = doc.contains("name") && doc.at("name").is_string() ? doc.at("name").get<std::string>() : "scenario";

    const Json& reward = require(doc, "reward", "scenario");
    if (!reward.is_array() || static_cast<int>(reward.size()) != d) {
        throw ParseError("reward: expected one value per state");
    }
    scenario.reward = Vector<Rational>(d);
    for (int s = 0; s < d; ++s) scenario.reward(s) = rational_field(reward[s], "reward[" + mdp.state_name(s) + "]");

    std::vector<TrainingPair> pairs;
    if (doc.contains("training")) {
        const Json& training = doc.at("training");
        if (!training.is_array()) throw ParseError("training: expected an array");
        for (std::size_t i = 0; i < training.size(); ++i) {
            const std::string where = "training[" + std::to_string(i) + "]";
            const int s = state_ref(require(training[i], "state", where), where + ".state");
            const std::string action = require_string(training[i], "action", where);
            const auto a = mdp.find_action(s, action);
            if (!a) throw ParseError(where + ": state " + quoted(mdp.state_name(s)) + " has no action " + quoted(action));
            pairs.push_back({s, *a});
        }
    }
    try {
        scenario.training = TrainingRecord(std::move(pairs));
    } catch (const InvalidArgument& e) {
        throw ParseError(std::string("training: ") + e.what());
    }

    const Json& shutdown = require(doc, "shutdown", "scenario");
    scenario.s_new = state_ref(require(shutdown, "s_new", "shutdown"), "shutdown.s_new");
    scenario.s_term = state_ref(require(shutdown, "s_term", "shutdown"), "shutdown.s_term");
    const std::string action = require_string(shutdown, "action", "shutdown");
    const auto a = mdp.find_action(scenario.s_new, action);
    if (!a) throw ParseError("shutdown.action: s_new has no action " + quoted(action));
    scenario.shutdown_action = *a;
    scenario.mdp = std::move(mdp);
    return scenario;
}

Json scenario_to_json(const ShutdownScenario<Rational>& scenario) {
    const auto& mdp = scenario.mdp;
    Json doc = Json::object();
    doc["name"] = scenario.name;
    Json states = Json::array(), actions = Json::array(), transitions = Json::array(), terminal = Json::array();
    for (int s = 0; s < mdp.state_count(); ++s) {
        states.push_back(mdp.state_name(s));
        Json names = Json::array();
        if (mdp.is_terminal(s)) {
            terminal.push_back(mdp.state_name(s));
            actions.push_back(names);
            continue;
        }
        for (int a = 0; a < mdp.action_count(s); ++a) {
            names.push_back(mdp.action_name(s, a));
            for (const auto& o : mdp.outcomes(s, a)) {
                transitions.push_back({{"state", mdp.state_name(s)},
                                       {"action", mdp.action_name(s, a)},
                                       {"next", mdp.state_name(o.next)},
                                       {"prob", to_string(o.prob)}});
            }
        }
        actions.push_back(names);
    }
    doc["states"] = states;
    doc["actions"] = actions;
    doc["transitions"] = transitions;
    doc["terminal"] = terminal;
    doc["reward"] = vector_to_json(scenario.reward);
    Json training = Json::array();
    for (const auto& p : scenario.training.pairs()) {
        training.push_back({{"state", mdp.state_name(p.state)}, {"action", mdp.action_name(p.state, p.action)}});
    }
    doc["training"] = training;
    doc["shutdown"] = {{"s_new", mdp.state_name(scenario.s_new)},
                       {"s_term", mdp.state_name(scenario.s_term)},
                       {"action", mdp.action_name(scenario.s_new, scenario.shutdown_action)}};
    return doc;
}

Vector<Rational> theta_from_json(const Json& doc, int state_count) {
    const Json* list = &doc;
    if (doc.is_object()) list = &require(doc, "theta", "theta file");
    if (!list->is_array() || static_cast<int>(list->size()) != state_count) {
        throw ParseError("theta: expected " + std::to_string(state_count) + " values");
    }
    Vector<Rational> theta(state_count);
    for (int s = 0; s < state_count; ++s) theta(s) = rational_field((*list)[s], "theta[" + std::to_string(s) + "]");
    return theta;
}

Json theta_to_json(const Vector<Rational>& theta) { return {{"theta", vector_to_json(theta)}}; }

Json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path.string());
    try {
        return Json::parse(in);
    } catch (const Json::parse_error& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << text;
}

template <typename Scalar>
Json vector_to_json(const Vector<Scalar>& v) {
    Json out = Json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(to_string(v(i)));
    return out;
}

std::string format_fraction(double value) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10g", value);
    return buf;
}

template <typename Scalar>
std::string goals_csv(const TabularMdp<Scalar>& mdp, const std::vector<Vector<Scalar>>& goals) {
    std::ostringstream out;
    for (int s = 0; s < mdp.state_count(); ++s) out << (s ? "," : "") << mdp.state_name(s);
    out << "\n";
    for (const auto& g : goals) {
        for (Eigen::Index i = 0; i < g.size(); ++i) out << (i ? "," : "") << to_string(g(i));
        out << "\n";
    }
    return out.str();
}

template <typename Scalar>
std::string orbit_csv(const TabularMdp<Scalar>& mdp, const OrbitReport<Scalar>& orbit) {
    std::ostringstream out;
    for (int s = 0; s < mdp.state_count(); ++s) out << mdp.state_name(s) << ",";
    out << "label\n";
    for (std::size_t k = 0; k < orbit.size(); ++k) {
        const auto& v = orbit.elements[k];
        for (Eigen::Index i = 0; i < v.size(); ++i) out << to_string(v(i)) << ",";
        out << (orbit.labeled() ? std::string(to_string(orbit.labels[k])) : std::string()) << "\n";
    }
    return out.str();
}

template <typename Scalar>
std::string sweep_csv(const std::vector<ShutdownStats<Scalar>>& rows) {
    std::ostringstream out;
    out << "gamma,n,guaranteed_fraction,empirical_A1_fraction,orbit_pass_rate\n";
    for (const auto& r : rows) {
        if constexpr (std::is_same_v<Scalar, double>) {
            out << format_fraction(r.gamma);
        } else {
            out << to_string(r.gamma);
        }
        out << "," << r.n << "," << format_fraction(r.guaranteed_fraction) << ","
            << format_fraction(r.empirical_a1_fraction) << "," << format_fraction(r.orbit_pass_rate) << "\n";
    }
    return out.str();
}

template <typename Scalar>
std::string sweep_svg(const std::vector<ShutdownStats<Scalar>>& rows) {
    constexpr double width = 480, height = 320, margin = 48;
    double lo = 0, hi = 1;
    if (!rows.empty()) {
        lo = to_double(rows.front().gamma);
        hi = to_double(rows.back().gamma);
        if (hi <= lo) hi = lo + 1;
    }
    auto x = [&](double g) { return margin + (g - lo) / (hi - lo) * (width - 2 * margin); };
    auto y = [&](double f) { return height - margin - f * (height - 2 * margin); };
    auto polyline = [&](auto field, const char* colour) {
        std::ostringstream p;
        p << "<polyline fill=\"none\" stroke=\"" << colour << "\" stroke-width=\"2\" points=\"";
        for (std::size_t i = 0; i < rows.size(); ++i) {
            p << (i ? " " : "") << format_fraction(x(to_double(rows[i].gamma))) << ","
              << format_fraction(y(field(rows[i])));
        }
        p << "\"/>\n";
        return p.str();
    };
    std::ostringstream out;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height << "\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<line x1=\"" << margin << "\" y1=\"" << y(0) << "\" x2=\"" << width - margin << "\" y2=\"" << y(0)
        << "\" stroke=\"black\"/>\n";
    out << "<line x1=\"" << margin << "\" y1=\"" << y(0) << "\" x2=\"" << margin << "\" y2=\"" << y(1)
        << "\" stroke=\"black\"/>\n";
    out << "<text x=\"" << width / 2 << "\" y=\"" << height - 12 << "\" text-anchor=\"middle\">gamma</text>\n";
    out << "<text x=\"" << margin - 8 << "\" y=\"" << y(1) << "\" text-anchor=\"end\">1</text>\n";
    out << "<text x=\"" << margin - 8 << "\" y=\"" << y(0) << "\" text-anchor=\"end\">0</text>\n";
    out << polyline([](const auto& r) { return r.guaranteed_fraction; }, "#1f77b4");
    out << polyline([](const auto& r) { return r.empirical_a1_fraction; }, "#d62728");
    out << "<text x=\"" << width - margin << "\" y=\"" << margin - 20
        << "\" text-anchor=\"end\" fill=\"#1f77b4\">n/(n+1)</text>\n";
    out << "<text x=\"" << width - margin << "\" y=\"" << margin - 4
        << "\" text-anchor=\"end\" fill=\"#d62728\">empirical A1</text>\n";
    out << "</svg>\n";
    return out.str();
}

#define POWERSEEK_INSTANTIATE(S)                                                                       \
    template Json vector_to_json<S>(const Vector<S>&);                                                 \
    template std::string goals_csv<S>(const TabularMdp<S>&, const std::vector<Vector<S>>&);            \
    template std::string orbit_csv<S>(const TabularMdp<S>&, const OrbitReport<S>&);                    \
    template std::string sweep_csv<S>(const std::vector<ShutdownStats<S>>&);                           \
    template std::string sweep_svg<S>(const std::vector<ShutdownStats<S>>&);

POWERSEEK_INSTANTIATE(double)
POWERSEEK_INSTANTIATE(Rational)

#undef POWERSEEK_INSTANTIATE

}  // namespace powerseek

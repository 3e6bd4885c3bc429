#pragma once

#include "powerseek/shutdown.hpp"

#include <json.hpp>

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

namespace powerseek {

/// Malformed input file.  The message names the offending field.
class ParseError : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

using Json = nlohmann::json;

/// Scenario document:
///   states      [name, ...]
///   actions     [[action name, ...] per state]  (terminal states: [] or ["stay"])
///   transitions [{state, action, next, prob}]   prob as "p/q", integer or decimal
///   terminal    [state name, ...]
///   reward      [value per state]
///   training    [{state, action}]
///   shutdown    {s_new, s_term, action}
/// Structural MDP errors are reported as ParseError too.
ShutdownScenario<Rational> scenario_from_json(const Json& doc);
Json scenario_to_json(const ShutdownScenario<Rational>& scenario);

/// {"theta": [value per state]}, or a bare array.
Vector<Rational> theta_from_json(const Json& doc, int state_count);
Json theta_to_json(const Vector<Rational>& theta);

Json read_json_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

/// Exact rationals as "p/q" strings, doubles in round-trip form.
template <typename Scalar>
Json vector_to_json(const Vector<Scalar>& v);

/// Short decimal for summary fractions (ten significant digits).
std::string format_fraction(double value);

template <typename Scalar>
std::string goals_csv(const TabularMdp<Scalar>& mdp, const std::vector<Vector<Scalar>>& goals);

template <typename Scalar>
std::string orbit_csv(const TabularMdp<Scalar>& mdp, const OrbitReport<Scalar>& orbit);

template <typename Scalar>
std::string sweep_csv(const std::vector<ShutdownStats<Scalar>>& rows);

/// Line chart of guaranteed and empirical A1 fractions against gamma.
template <typename Scalar>
std::string sweep_svg(const std::vector<ShutdownStats<Scalar>>& rows);

}  // namespace powerseek

#include "powerseek/cli.hpp"

#include "powerseek/io.hpp"
#include "powerseek/random.hpp"
#include "powerseek/scenarios.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <map>
#include <sstream>

namespace powerseek {

namespace {

struct CommonOptions {
    std::uint64_t seed = 0;
    std::string mode = "exact";
    std::string goal_mode = "q-optimal";
    std::string out_dir;
};

struct Session {
    std::ostream& out;
    std::ostream& err;
    CommonOptions common;
    std::map<std::string, std::string> files;  // written in name order at the end

    void emit(const std::string& name, std::string text) { files[name] = std::move(text); }

    std::string directory() const {
        if (!common.out_dir.empty()) return common.out_dir;
        if (const char* env = std::getenv("POWERSEEK_OUT_DIR")) return env;
        return {};
    }

    void flush() {
        const std::string dir = directory();
        if (dir.empty() || files.empty()) return;
        for (const auto& [name, text] : files) {
            const auto path = std::filesystem::path(dir) / name;
            write_text_file(path, text);
            out << "wrote " << path.string() << "\n";
        }
    }
};

void add_common(CLI::App* cmd, CommonOptions& o) {
    cmd->add_option("--seed", o.seed, "master seed");
    cmd->add_option("--mode", o.mode, "numeric mode")->check(CLI::IsMember({"exact", "float"}));
    cmd->add_option("--goal-mode", o.goal_mode, "training-compatibility test")
        ->check(CLI::IsMember({"myopic", "q-optimal"}));
    cmd->add_option("--out-dir", o.out_dir, "output directory (default: $POWERSEEK_OUT_DIR)");
}

Rational parse_gamma(const std::string& text) {
    Rational g;
    try {
        g = parse_rational(text);
    } catch (const InvalidArgument& e) {
        throw ParseError(std::string("gamma: ") + e.what());
    }
    if (g < 0 || g >= 1) throw ParseError("gamma " + text + " is outside [0, 1)");
    return g;
}

std::vector<Rational> gamma_list(const std::vector<std::string>& list, const std::string& range) {
    std::vector<Rational> out;
    for (const auto& g : list) out.push_back(parse_gamma(g));
    if (!range.empty()) {
        std::vector<std::string> parts;
        std::stringstream ss(range);
        for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
        if (parts.size() != 3) throw ParseError("--gamma-range expects lo:hi:step");
        const Rational lo = parse_gamma(parts[0]);
        const Rational hi = parse_gamma(parts[1]);
        Rational step;
        try {
            step = parse_rational(parts[2]);
        } catch (const InvalidArgument& e) {
            throw ParseError(std::string("--gamma-range step: ") + e.what());
        }
        if (step <= 0) throw ParseError("--gamma-range step must be positive");
        for (Rational g = lo; g <= hi; g += step) out.push_back(g);
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

ShutdownScenario<Rational> load_scenario(const std::string& path) { return scenario_from_json(read_json_file(path)); }

std::string names(const TabularMdp<Rational>& mdp, const std::vector<int>& states) {
    std::string out = "{";
    for (std::size_t i = 0; i < states.size(); ++i) out += (i ? ", " : "") + mdp.state_name(states[i]);
    return out + "}";
}

Json names_json(const TabularMdp<Rational>& mdp, const std::vector<int>& states) {
    Json out = Json::array();
    for (int s : states) out.push_back(mdp.state_name(s));
    return out;
}

void print_report(std::ostream& out, const ValidationReport& report) {
    for (const auto& c : report.checks) {
        const char* status = c.passed ? "ok" : (c.warning_only ? "warning" : "FAILED");
        out << "  " << c.name << ": " << status;
        if (!c.passed) out << " (" << c.detail << ")";
        out << "\n";
    }
}

Json report_json(const ValidationReport& report) {
    Json checks = Json::array();
    for (const auto& c : report.checks) {
        checks.push_back({{"name", c.name}, {"passed", c.passed}, {"warning_only", c.warning_only}, {"detail", c.detail}});
    }
    return checks;
}

// --- analyze ----------------------------------------------------------------

struct AnalyzeArgs {
    std::string scenario;
    std::vector<std::string> gammas;
};

template <typename Scalar>
int analyze(Session& io, const ShutdownScenario<Rational>& exact, const std::vector<Rational>& gammas) {
    const auto scenario = exact.template cast<Scalar>();
    const auto& mdp = exact.mdp;
    const ValidationReport report = validate_scenario(scenario);
    io.out << "scenario " << exact.name << " (" << mdp.state_count() << " states, " << ScalarTraits<Scalar>::mode_name
           << " mode)\n";
    print_report(io.out, report);
    Json doc;
    doc["scenario"] = exact.name;
    doc["mode"] = ScalarTraits<Scalar>::mode_name;
    doc["checks"] = report_json(report);
    if (!report.ok()) {
        io.emit("analysis.json", doc.dump(2) + "\n");
        for (const auto& f : report.failures()) io.err << "assumption violated: " << f << "\n";
        return kExitAssumptionViolation;
    }

    const RecurrenceReport recurrence = recurrent_states(scenario.mdp);
    io.out << "recurrent states: " << names(mdp, recurrence.recurrent) << "\n";
    io.out << "reachable recurrent states: " << names(mdp, report.recurrent_reachable) << "\n";
    doc["recurrent"] = names_json(mdp, recurrence.recurrent);
    doc["recurrent_reachable"] = names_json(mdp, report.recurrent_reachable);

    io.out << "gamma* table:\n";
    Json table = Json::array();
    for (const auto& row : gamma_thresholds(scenario)) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.6f", row.gamma_star);
        io.out << "  " << mdp.state_name(row.state) << "  " << buf << "\n";
        table.push_back({{"state", mdp.state_name(row.state)}, {"gamma_star", format_fraction(row.gamma_star)}});
    }
    doc["gamma_star"] = table;

    Json per_gamma = Json::array();
    for (const Rational& g : gammas) {
        const auto qualifying = qualifying_recurrent_states(scenario, from_rational<Scalar>(g));
        io.out << "gamma " << to_string(g) << ": qualifying " << names(mdp, qualifying) << ", n = " << qualifying.size()
               << "\n";
        per_gamma.push_back({{"gamma", to_string(g)}, {"qualifying", names_json(mdp, qualifying)}});
        if (qualifying.empty()) io.out << "  vacuous bound at this gamma: no guarantee\n";
    }
    doc["per_gamma"] = per_gamma;
    io.emit("analysis.json", doc.dump(2) + "\n");
    return kExitOk;
}

// --- orbit ------------------------------------------------------------------

struct OrbitArgs {
    std::string scenario;
    std::string theta;
    std::string gamma = "9/10";
    std::size_t sampled = 0;
};

template <typename Scalar>
Json counterexample_json(const Counterexample<Scalar>& c) {
    return {{"condition", c.condition},
            {"phi", c.phi},
            {"other_phi", c.other_phi},
            {"theta", vector_to_json(c.theta)},
            {"other_theta", vector_to_json(c.other_theta)},
            {"image", vector_to_json(c.image)}};
}

template <typename Scalar>
int orbit(Session& io, const ShutdownScenario<Rational>& exact, const Vector<Rational>& theta_exact,
          const OrbitArgs& args) {
    const auto scenario = exact.template cast<Scalar>();
    const Rational gamma_exact = parse_gamma(args.gamma);
    const Scalar gamma = from_rational<Scalar>(gamma_exact);
    const int d = exact.mdp.state_count();
    if (d > kOrbitDimensionCap && args.sampled == 0) {
        io.err << "error: " << d << " states exceed the enumeration cap of " << kOrbitDimensionCap
               << "; rerun with --sampled N to estimate the orbit from N random permutations\n";
        return kExitConfigError;
    }
    const ValidationReport report = validate_scenario(scenario);
    if (!report.ok()) {
        print_report(io.out, report);
        for (const auto& f : report.failures()) io.err << "assumption violated: " << f << "\n";
        return kExitAssumptionViolation;
    }
    Vector<Scalar> theta(theta_exact.size());
    for (Eigen::Index i = 0; i < theta.size(); ++i) theta(i) = from_rational<Scalar>(theta_exact(i));
    check_reward(scenario.mdp, theta);

    const GoalSetMode mode = parse_goal_set_mode(io.common.goal_mode);
    const Evaluator<Scalar> evaluate = goal_set_evaluator(scenario, mode, gamma);
    if (!evaluate(theta).member) io.out << "note: theta is not training-compatible; its orbit may still be nonempty\n";
    const OrbitReport<Scalar> report_orbit = labeled_orbit<Scalar>(theta, evaluate, args.sampled, io.common.seed);
    const SwapFamily family = retargeting_swaps(scenario, gamma);
    const std::size_t n = family.n();
    const bool majority = verify_majority(report_orbit, n);

    io.out << "orbit size " << report_orbit.size() << (report_orbit.approximate ? " (sampled, approximate)" : "")
           << ": A1 " << report_orbit.a1_preferred << ", A0 " << report_orbit.a0_preferred << ", ties "
           << report_orbit.ties << "\n";
    io.out << "n = " << n << " (swap partners " << names(exact.mdp, family.partners) << ")\n";

    Json doc;
    doc["scenario"] = exact.name;
    doc["mode"] = ScalarTraits<Scalar>::mode_name;
    doc["goal_mode"] = std::string(to_string(mode));
    doc["gamma"] = to_string(gamma_exact);
    doc["theta"] = vector_to_json(theta);
    doc["orbit_size"] = report_orbit.size();
    doc["permutations_examined"] = report_orbit.permutations_examined;
    doc["approximate"] = report_orbit.approximate;
    doc["a1_preferred"] = report_orbit.a1_preferred;
    doc["a0_preferred"] = report_orbit.a0_preferred;
    doc["ties"] = report_orbit.ties;
    doc["n"] = n;
    doc["swap_partners"] = names_json(exact.mdp, family.partners);
    doc["majority_holds"] = majority;

    int code = kExitOk;
    if (n == 0) {
        io.out << "status: vacuous bound (n = 0, guaranteed fraction 0); no guarantee\n";
        doc["status"] = "vacuous bound";
    } else {
        const auto cert = certify_retargetable<Scalar>(report_orbit, family.swaps, evaluate);
        doc["certified"] = cert.certified();
        if (cert.counterexample) doc["certificate_failure"] = counterexample_json(*cert.counterexample);
        io.out << "retargetability certificate: " << (cert.certified() ? "passed" : "failed") << "\n";
        if (majority) {
            io.out << "status: verified (" << report_orbit.a1_preferred << " >= " << n << " * "
                   << report_orbit.a0_preferred << ")\n";
            doc["status"] = "verified";
        } else {
            io.err << "COUNTEREXAMPLE: majority inequality fails: " << report_orbit.a1_preferred << " < " << n << " * "
                   << report_orbit.a0_preferred << (cert.certified() ? " on a certified orbit" : "") << "\n";
            doc["status"] = "counterexample";
            code = kExitCounterexample;
        }
    }
    io.emit("orbit.csv", orbit_csv(scenario.mdp, report_orbit));
    io.emit("orbit.json", doc.dump(2) + "\n");
    return code;
}

// --- sweep --------------------------------------------------------------------

struct SweepArgs {
    std::string scenario;
    std::vector<std::string> gammas;
    std::string range;
    std::size_t samples = 20;
    std::size_t sampled = 5040;
    std::string r_max = "1";
    bool svg = false;
    bool certify = true;
};

template <typename Scalar>
int sweep(Session& io, const ShutdownScenario<Rational>& exact, const std::vector<Rational>& gammas,
          const SweepArgs& args) {
    const auto scenario = exact.template cast<Scalar>();
    const ValidationReport report = validate_scenario(scenario);
    if (!report.ok()) {
        print_report(io.out, report);
        for (const auto& f : report.failures()) io.err << "assumption violated: " << f << "\n";
        return kExitAssumptionViolation;
    }
    const GoalSetMode mode = parse_goal_set_mode(io.common.goal_mode);
    const Scalar r_max = from_rational<Scalar>(parse_rational(args.r_max));

    std::vector<ShutdownStats<Scalar>> rows;
    Json json_rows = Json::array();
    std::size_t counterexamples = 0;
    for (const Rational& g : gammas) {
        const Scalar gamma = from_rational<Scalar>(g);
        const auto sample =
            sample_goal_set(scenario.mdp, scenario.training, r_max, args.samples, io.common.seed, mode, gamma);
        StatsOptions options;
        options.mode = mode;
        options.sampled_draws = args.sampled;
        options.seed = io.common.seed;
        options.certify = args.certify;
        auto stats = avoid_shutdown_stats(scenario, sample.goals, gamma, options);
        std::size_t failures = 0;
        for (const auto& goal : stats.goals) {
            if (goal.certified.value_or(false) && !goal.majority && !goal.approximate) ++failures;
        }
        counterexamples += failures;
        io.out << "gamma " << to_string(g) << ": n = " << stats.n << ", guaranteed "
               << format_fraction(stats.guaranteed_fraction) << ", empirical A1 "
               << format_fraction(stats.empirical_a1_fraction) << ", orbit pass rate "
               << format_fraction(stats.orbit_pass_rate) << (stats.vacuous ? " (vacuous bound)" : "")
               << (stats.approximate ? " (approximate)" : "") << "\n";
        json_rows.push_back({{"gamma", to_string(g)},
                             {"n", stats.n},
                             {"swap_partners", names_json(exact.mdp, retargeting_swaps(scenario, gamma).partners)},
                             {"goals", stats.goals.size()},
                             {"sampling_attempts", sample.attempts},
                             {"guaranteed_fraction", format_fraction(stats.guaranteed_fraction)},
                             {"empirical_A1_fraction", format_fraction(stats.empirical_a1_fraction)},
                             {"orbit_pass_rate", format_fraction(stats.orbit_pass_rate)},
                             {"certified_fraction", format_fraction(stats.certified_fraction)},
                             {"approximate", stats.approximate},
                             {"vacuous", stats.vacuous},
                             {"counterexamples", failures}});
        rows.push_back(std::move(stats));
    }
    io.emit("sweep.csv", sweep_csv(rows));
    Json doc;
    doc["scenario"] = exact.name;
    doc["mode"] = ScalarTraits<Scalar>::mode_name;
    doc["goal_mode"] = std::string(to_string(mode));
    doc["seed"] = io.common.seed;
    doc["samples"] = args.samples;
    doc["rows"] = json_rows;
    io.emit("sweep.json", doc.dump(2) + "\n");
    if (args.svg) io.emit("sweep.svg", sweep_svg(rows));
    if (counterexamples > 0) {
        io.err << "COUNTEREXAMPLE: " << counterexamples << " certified orbit(s) violate the majority inequality\n";
        return kExitCounterexample;
    }
    return kExitOk;
}

// --- sample-goals -------------------------------------------------------------

struct SampleArgs {
    std::string scenario;
    std::string gamma = "9/10";
    std::size_t samples = 100;
    std::size_t attempts = kDefaultAttemptCap;
    std::string r_max = "1";
};

template <typename Scalar>
int sample_goals(Session& io, const ShutdownScenario<Rational>& exact, const SampleArgs& args) {
    const auto scenario = exact.template cast<Scalar>();
    const Rational gamma_exact = parse_gamma(args.gamma);
    const GoalSetMode mode = parse_goal_set_mode(io.common.goal_mode);
    const auto sample = sample_goal_set(scenario.mdp, scenario.training, from_rational<Scalar>(parse_rational(args.r_max)),
                                        args.samples, io.common.seed, mode, from_rational<Scalar>(gamma_exact),
                                        args.attempts);
    io.out << "accepted " << sample.goals.size() << " of " << sample.attempts << " draws (acceptance rate "
           << format_fraction(sample.acceptance_rate()) << ")\n";
    Json doc;
    doc["scenario"] = exact.name;
    doc["mode"] = ScalarTraits<Scalar>::mode_name;
    doc["goal_mode"] = std::string(to_string(mode));
    doc["gamma"] = to_string(gamma_exact);
    doc["seed"] = io.common.seed;
    doc["attempts"] = sample.attempts;
    doc["accepted"] = sample.goals.size();
    doc["acceptance_rate"] = format_fraction(sample.acceptance_rate());
    io.emit("goals.csv", goals_csv(scenario.mdp, sample.goals));
    io.emit("goals.json", doc.dump(2) + "\n");
    return kExitOk;
}

// --- verify -------------------------------------------------------------------

struct VerifyArgs {
    std::string scenario;
    std::string gamma = "9/10";
    std::size_t samples = 5;
    std::size_t corpus = 0;
    int d = 6;
};

struct VerifyTally {
    std::size_t checks = 0;
    std::vector<std::string> counterexamples;
    std::vector<std::string> notes;

    void check(bool ok, const std::string& what) {
        ++checks;
        if (!ok) counterexamples.push_back(what);
    }
};

Rational tenths(int k) {
    Rational r(k, 10);
    r.canonicalize();
    return r;
}

template <typename Scalar>
void verify_one(const ShutdownScenario<Rational>& exact, const Rational& gamma_exact, std::size_t samples,
                std::uint64_t seed, GoalSetMode mode, VerifyTally& tally) {
    const auto scenario = exact.template cast<Scalar>();
    const auto& mdp = scenario.mdp;
    const Scalar gamma = from_rational<Scalar>(gamma_exact);
    const std::string tag = exact.name + ": ";
    const ValidationReport report = validate_scenario(scenario, std::optional<Scalar>(gamma));
    const bool closure = std::all_of(report.checks.begin(), report.checks.end(),
                                     [](const ScenarioCheck& c) { return c.name != "swap_closure" || c.passed; });

    const Scalar one(1);
    for (int s : report.recurrent_reachable) {
        const Policy policy = reach_and_revisit(mdp, scenario.s_new, s);
        const Scalar reach = reach_probabilities(mdp, policy, s)(scenario.s_new);
        const Scalar revisit = return_probability(mdp, policy, s);
        const bool sure = ScalarTraits<Scalar>::exact ? (reach == one && revisit == one)
                                                      : (to_double(reach) > 1 - 1e-9 && to_double(revisit) > 1 - 1e-9);
        tally.check(sure, tag + "reach-and-revisit policy for " + mdp.state_name(s) + " is not almost sure");
        Scalar previous(0);
        for (int k = 1; k <= 9; ++k) {
            const Scalar g = from_rational<Scalar>(tenths(k));
            const Scalar v = visit_count(mdp, policy, scenario.s_new, s, g);
            tally.check(!(v < previous), tag + "visit count of " + mdp.state_name(s) + " decreases in gamma");
            previous = v;
        }
    }
    std::vector<int> previous_set;
    for (int k = 1; k <= 9; ++k) {
        const auto set = qualifying_recurrent_states(scenario, from_rational<Scalar>(tenths(k)));
        tally.check(std::includes(set.begin(), set.end(), previous_set.begin(), previous_set.end()),
                    tag + "qualifying set shrinks as gamma grows");
        previous_set = set;
    }
    if (report.qualifying.empty()) {
        tally.notes.push_back(tag + "no qualifying recurrent state at this gamma; theorem checks skipped");
        return;
    }

    const auto sample = sample_goal_set(mdp, scenario.training, one, samples, seed, mode, gamma);
    for (const auto& theta : sample.goals) {
        for (int s : report.qualifying) {
            const auto record = verify_prop_rec(scenario, theta, s, gamma);
            tally.check(!record.violation(), tag + "swap argument fails for " + mdp.state_name(s));
        }
    }
    StatsOptions options;
    options.mode = mode;
    options.seed = seed;
    const auto stats = avoid_shutdown_stats(scenario, sample.goals, gamma, options);
    for (const auto& goal : stats.goals) {
        if (goal.approximate) continue;
        if (closure) tally.check(goal.certified.value_or(false), tag + "retargetability certificate fails");
        if (goal.certified.value_or(false)) {
            tally.check(goal.majority, tag + "certified orbit violates the majority inequality");
        }
    }
    if (!closure) tally.notes.push_back(tag + "swap partners reachable from training; certificate not required");
}

template <typename Scalar>
int verify(Session& io, const VerifyArgs& args) {
    const Rational gamma = parse_gamma(args.gamma);
    const GoalSetMode mode = parse_goal_set_mode(io.common.goal_mode);
    std::vector<ShutdownScenario<Rational>> corpus;
    if (!args.scenario.empty()) corpus.push_back(load_scenario(args.scenario));
    for (std::size_t k = 0; k < args.corpus; ++k) {
        RandomSpec spec;
        spec.seed = derive_seed(io.common.seed, k);
        spec.d = args.d;
        corpus.push_back(make_random(spec).scenario);
    }
    if (corpus.empty()) throw ParseError("verify: give a scenario file or --corpus N");

    VerifyTally tally;
    for (std::size_t k = 0; k < corpus.size(); ++k) {
        const ValidationReport base = validate_scenario(corpus[k].template cast<Scalar>());
        if (!base.ok()) {
            print_report(io.out, base);
            for (const auto& f : base.failures()) io.err << "assumption violated: " << f << "\n";
            return kExitAssumptionViolation;
        }
        verify_one<Scalar>(corpus[k], gamma, args.samples, derive_seed(io.common.seed, 1000 + k), mode, tally);
    }
    io.out << "scenarios " << corpus.size() << ", checks " << tally.checks << ", counterexamples "
           << tally.counterexamples.size() << "\n";
    for (const auto& n : tally.notes) io.out << "note: " << n << "\n";
    Json doc;
    doc["mode"] = ScalarTraits<Scalar>::mode_name;
    doc["gamma"] = to_string(gamma);
    doc["seed"] = io.common.seed;
    doc["scenarios"] = corpus.size();
    doc["checks"] = tally.checks;
    doc["counterexamples"] = tally.counterexamples;
    doc["notes"] = tally.notes;
    io.emit("verify.json", doc.dump(2) + "\n");
    if (!tally.counterexamples.empty()) {
        for (const auto& c : tally.counterexamples) io.err << "COUNTEREXAMPLE: " << c << "\n";
        return kExitCounterexample;
    }
    io.out << "status: verified\n";
    return kExitOk;
}

// --- generate -----------------------------------------------------------------

struct GenerateArgs {
    int m = 2, L = 3;
    int length = 5, coin = 2;
    RandomSpec random;
    std::string output;
};

int write_scenario(Session& io, const ShutdownScenario<Rational>& scenario, const std::string& output) {
    const std::string text = scenario_to_json(scenario).dump(2) + "\n";
    if (output.empty()) {
        io.out << text;
    } else {
        write_text_file(output, text);
    }
    return kExitOk;
}

template <typename Fn>
int dispatch(const CommonOptions& common, Fn&& fn) {
    return common.mode == "float" ? fn(double{}) : fn(Rational{});
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Retargetability and shutdown-avoidance analysis for tabular MDPs", "powerseek"};
    app.require_subcommand(1);
    Session io{out, err, {}, {}};

    AnalyzeArgs analyze_args;
    auto* analyze_cmd = app.add_subcommand("analyze", "validate a scenario and tabulate recurrence and gamma*");
    analyze_cmd->add_option("scenario", analyze_args.scenario, "scenario JSON")->required();
    analyze_cmd->add_option("--gamma,--gammas", analyze_args.gammas, "discounts to evaluate")->delimiter(',');
    add_common(analyze_cmd, io.common);

    OrbitArgs orbit_args;
    auto* orbit_cmd = app.add_subcommand("orbit", "count orbit preferences for one reward vector");
    orbit_cmd->add_option("scenario", orbit_args.scenario, "scenario JSON")->required();
    orbit_cmd->add_option("theta", orbit_args.theta, "theta JSON")->required();
    orbit_cmd->add_option("--gamma", orbit_args.gamma, "discount");
    orbit_cmd->add_option("--sampled", orbit_args.sampled, "estimate from this many random permutations");
    add_common(orbit_cmd, io.common);

    SweepArgs sweep_args;
    auto* sweep_cmd = app.add_subcommand("sweep", "guaranteed and empirical avoid-shutdown fractions across gamma");
    sweep_cmd->add_option("scenario", sweep_args.scenario, "scenario JSON")->required();
    sweep_cmd->add_option("--gamma,--gammas", sweep_args.gammas, "discount list")->delimiter(',');
    sweep_cmd->add_option("--gamma-range", sweep_args.range, "lo:hi:step");
    sweep_cmd->add_option("--samples", sweep_args.samples, "goals sampled per gamma")->check(CLI::PositiveNumber);
    sweep_cmd->add_option("--sampled", sweep_args.sampled, "permutation draws above the enumeration cap");
    sweep_cmd->add_option("--r-max", sweep_args.r_max, "upper end of the reward box");
    sweep_cmd->add_flag("--svg", sweep_args.svg, "also write sweep.svg");
    sweep_cmd->add_flag("!--no-certify", sweep_args.certify, "skip retargetability certificates");
    add_common(sweep_cmd, io.common);

    SampleArgs sample_args;
    auto* sample_cmd = app.add_subcommand("sample-goals", "rejection-sample the training-compatible goal set");
    sample_cmd->add_option("scenario", sample_args.scenario, "scenario JSON")->required();
    sample_cmd->add_option("--gamma", sample_args.gamma, "discount");
    sample_cmd->add_option("--samples", sample_args.samples, "goals to accept")->check(CLI::PositiveNumber);
    sample_cmd->add_option("--attempts", sample_args.attempts, "attempt cap");
    sample_cmd->add_option("--r-max", sample_args.r_max, "upper end of the reward box");
    add_common(sample_cmd, io.common);

    VerifyArgs verify_args;
    auto* verify_cmd = app.add_subcommand("verify", "run every theorem check on a scenario or a random corpus");
    verify_cmd->add_option("scenario", verify_args.scenario, "scenario JSON");
    verify_cmd->add_option("--gamma", verify_args.gamma, "discount");
    verify_cmd->add_option("--samples", verify_args.samples, "goals sampled per scenario");
    verify_cmd->add_option("--corpus", verify_args.corpus, "also check this many generated scenarios");
    verify_cmd->add_option("--d", verify_args.d, "state count of generated scenarios");
    add_common(verify_cmd, io.common);

    GenerateArgs gen;
    auto* generate_cmd = app.add_subcommand("generate", "write a generated scenario as JSON");
    generate_cmd->require_subcommand(1);
    auto* lasso_cmd = generate_cmd->add_subcommand("lasso", "path of length m into an L-cycle");
    lasso_cmd->add_option("--m", gen.m)->check(CLI::PositiveNumber);
    lasso_cmd->add_option("--L", gen.L)->check(CLI::PositiveNumber);
    auto* coin_cmd = generate_cmd->add_subcommand("coinrun", "coin chain with the test coin moved inward");
    coin_cmd->add_option("--length", gen.length);
    coin_cmd->add_option("--coin", gen.coin, "test coin cell");
    auto* random_cmd = generate_cmd->add_subcommand("random", "seeded random shutdown scenario");
    random_cmd->add_option("--seed", gen.random.seed);
    random_cmd->add_option("--d", gen.random.d);
    random_cmd->add_option("--actions", gen.random.actions);
    random_cmd->add_option("--branching", gen.random.branching);
    random_cmd->add_option("--terminals", gen.random.terminal_count);
    for (auto* cmd : {lasso_cmd, coin_cmd, random_cmd}) {
        cmd->add_option("-o,--output", gen.output, "output file (default: stdout)");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitConfigError;
    }

    int code = kExitOk;
    try {
        if (*analyze_cmd) {
            const auto scenario = load_scenario(analyze_args.scenario);
            const auto gammas = gamma_list(analyze_args.gammas, {});
            code = dispatch(io.common, [&](auto tag) { return analyze<decltype(tag)>(io, scenario, gammas); });
        } else if (*orbit_cmd) {
            const auto scenario = load_scenario(orbit_args.scenario);
            const auto theta = theta_from_json(read_json_file(orbit_args.theta), scenario.mdp.state_count());
            code = dispatch(io.common, [&](auto tag) { return orbit<decltype(tag)>(io, scenario, theta, orbit_args); });
        } else if (*sweep_cmd) {
            const auto scenario = load_scenario(sweep_args.scenario);
            const auto gammas = gamma_list(sweep_args.gammas, sweep_args.range);
            if (gammas.empty()) throw ParseError("sweep: empty gamma list (use --gammas or --gamma-range)");
            code = dispatch(io.common, [&](auto tag) { return sweep<decltype(tag)>(io, scenario, gammas, sweep_args); });
        } else if (*sample_cmd) {
            const auto scenario = load_scenario(sample_args.scenario);
            code = dispatch(io.common, [&](auto tag) { return sample_goals<decltype(tag)>(io, scenario, sample_args); });
        } else if (*verify_cmd) {
            code = dispatch(io.common, [&](auto tag) { return verify<decltype(tag)>(io, verify_args); });
        } else if (*generate_cmd) {
            if (*lasso_cmd) {
                code = write_scenario(io, make_lasso({gen.m, gen.L, std::nullopt}), gen.output);
            } else if (*coin_cmd) {
                code = write_scenario(io, make_coinrun_chain({gen.length, gen.length - 1}, {gen.length, gen.coin}).scenario,
                                      gen.output);
            } else {
                code = write_scenario(io, make_random(gen.random).scenario, gen.output);
            }
        }
        io.flush();
    } catch (const ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kExitConfigError;
    } catch (const InvalidArgument& e) {
        err << "error: " << e.what() << "\n";
        return kExitConfigError;
    } catch (const SamplingError& e) {
        err << "error: " << e.what() << "\n";
        return kExitConfigError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitConfigError;
    }
    return code;
}

}  // namespace powerseek

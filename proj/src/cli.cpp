#include "eplan/cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "eplan/dot.hpp"
#include "eplan/epddl.hpp"
#include "eplan/errors.hpp"
#include "eplan/update.hpp"

namespace eplan::cli {

namespace {

enum class LogLevel { Error = 0, Info = 1, Debug = 2 };

LogLevel log_level() {
    const char* env = std::getenv("EPLAN_LOG");
    if (env == nullptr) return LogLevel::Error;
    std::string v = to_lower(env);
    if (v == "debug") return LogLevel::Debug;
    if (v == "info") return LogLevel::Info;
    return LogLevel::Error;
}

void log_info(const std::string& msg) {
    if (log_level() >= LogLevel::Info) std::cerr << "[info] " << msg << "\n";
}

void log_debug(const std::string& msg) {
    if (log_level() >= LogLevel::Debug) std::cerr << "[debug] " << msg << "\n";
}

std::vector<std::string> split_plan(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    std::string word;
    while (in >> word) out.push_back(word);
    return out;
}

epddl::PlanningTask load_task(const std::string& domain_path, const std::string& problem_path,
                              Transition transition) {
    epddl::DomainDecl domain = epddl::parse_domain_file(domain_path);
    if (transition == Transition::Standard && !domain.update_models.empty())
        throw EplanError("domain '" + domain.name +
                         "' declares custom update models; rerun with --transition custom");
    epddl::ProblemDecl problem = epddl::parse_problem_file(problem_path, domain);
    epddl::PlanningTask task = epddl::ground(domain, problem);
    log_info("ground actions: " + std::to_string(task.actions.size()));
    return task;
}

// The states visited while replaying a plan prefix: initial state first,
// stopping early at the first inexecutable step.
std::vector<PointedKripke> replay_states(epddl::PlanningTask& task,
                                         const std::vector<std::string>& plan) {
    std::vector<PointedKripke> states;
    states.push_back(bisim_contract(epddl::build_initial_state(task)));
    for (const std::string& name : plan) {
        std::string key = to_lower(name);
        auto it = std::find_if(task.actions.begin(), task.actions.end(),
                               [&](const epddl::GroundAction& ga) { return ga.name == key; });
        if (it == task.actions.end()) break;
        const PointedKripke& state = states.back();
        UpdateModel model = it->is_classical()
                                ? compile_action(std::get<ActionSpec>(it->op), state, task.store)
                                : std::get<UpdateModel>(it->op);
        if (!entails(state, task.store, model.pre[model.designated])) break;
        states.push_back(apply_update(state, model, task.store));
    }
    return states;
}

void write_dot_files(const std::string& dir, const std::vector<PointedKripke>& states,
                     const Vocabulary& vocab) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    for (std::size_t depth = 0; depth < states.size(); ++depth) {
        Digest d = canonical_digest(states[depth]);
        fs::path file = fs::path(dir) / ("depth_" + std::to_string(depth) + "_" + d.hex(6) + ".dot");
        std::ofstream out(file);
        if (!out) throw EplanError("cannot write '" + file.string() + "'");
        out << emit_dot(states[depth], vocab);
        log_debug("wrote " + file.string());
    }
}

void print_stats(const SearchStats& stats, bool found, std::size_t plan_length) {
    std::cout << "plan_found=" << (found ? "true" : "false") << "\n";
    if (found) std::cout << "plan_length=" << plan_length << "\n";
    std::cout << "expanded=" << stats.expanded << "\n";
    std::cout << "generated=" << stats.generated << "\n";
    std::cout << "duplicates=" << stats.duplicates << "\n";
    std::cout << "max_depth_reached=" << stats.max_depth_reached << "\n";
    std::cout << "wall_seconds=" << std::fixed << std::setprecision(3) << stats.wall_seconds
              << "\n";
    std::cout.unsetf(std::ios::fixed);
}

struct CommonArgs {
    std::string domain_path;
    std::string problem_path;
    PlannerConfig config;
};

int run_solve(const CommonArgs& args) {
    if (args.config.max_nodes == 0) throw EplanError("--max-nodes must be positive");
    epddl::PlanningTask task =
        load_task(args.domain_path, args.problem_path, args.config.transition);

    SearchConfig sc;
    sc.strategy = args.config.strategy;
    sc.representation = args.config.representation;
    sc.max_depth = args.config.max_depth;
    sc.max_nodes = args.config.max_nodes;
    sc.hbfs_prefer_deeper = args.config.hbfs_prefer_deeper;

    SearchResult result = search(task, sc);
    if (result.plan) {
        if (result.plan->actions.empty()) {
            std::cout << "<empty>\n";
        } else {
            for (const std::string& action : result.plan->actions) std::cout << action << "\n";
        }
        print_stats(result.stats, true, result.plan->actions.size());
        if (!args.config.dot_dir.empty())
            write_dot_files(args.config.dot_dir, replay_states(task, result.plan->actions),
                            task.vocab);
        return 0;
    }
    log_info(result.termination == Termination::BudgetExceeded
                 ? "search budget exhausted before a plan was found"
                 : "search space exhausted without reaching the goal");
    print_stats(result.stats, false, 0);
    if (!args.config.dot_dir.empty())
        write_dot_files(args.config.dot_dir, replay_states(task, {}), task.vocab);
    return 1;
}

int run_validate(const CommonArgs& args, const std::string& plan_text) {
    epddl::PlanningTask task =
        load_task(args.domain_path, args.problem_path, args.config.transition);
    std::vector<std::string> plan = split_plan(plan_text);
    ValidationResult result = validate_plan(task, plan);
    for (const std::string& line : result.trace()) std::cout << line << "\n";
    if (!args.config.dot_dir.empty())
        write_dot_files(args.config.dot_dir, replay_states(task, plan), task.vocab);
    if (result.valid) {
        std::cout << "plan valid\n";
        return 0;
    }
    std::cout << "plan invalid: " << result.message << "\n";
    return 1;
}

int run_inspect(const CommonArgs& args) {
    epddl::PlanningTask task =
        load_task(args.domain_path, args.problem_path, args.config.transition);
    std::vector<std::string> diagnostics;
    PointedKripke state = epddl::build_initial_state(task, &diagnostics);
    for (const std::string& d : diagnostics) log_info(d);
    std::cout << dump(state, task.vocab);
    FrameClass fc = classify_frame(*state.structure);
    const char* label = fc.label() == FrameClass::Label::S5     ? "S5"
                        : fc.label() == FrameClass::Label::KD45 ? "KD45"
                                                                : "K";
    std::cout << "frame " << label << "\n";
    if (!args.config.dot_dir.empty())
        write_dot_files(args.config.dot_dir, {state}, task.vocab);
    return 0;
}

}  // namespace

int run(const std::vector<std::string>& args) {
    CLI::App app{"eplan: a multi-agent epistemic planner"};
    app.require_subcommand(1);

    CommonArgs common;
    std::string plan_text;

    std::map<std::string, Representation> reprs{{"kripke", Representation::Kripke},
                                                {"possibility", Representation::Possibility}};
    std::map<std::string, Transition> transitions{{"standard", Transition::Standard},
                                                  {"custom", Transition::Custom}};
    std::map<std::string, Strategy> strategies{{"bfs", Strategy::Bfs}, {"hbfs", Strategy::Hbfs}};

    auto add_common = [&](CLI::App* cmd, bool solver_flags) {
        cmd->add_option("--domain", common.domain_path, "domain file")->required();
        cmd->add_option("--problem", common.problem_path, "problem file")->required();
        cmd->add_option("--transition", common.config.transition, "transition function")
            ->transform(CLI::CheckedTransformer(transitions, CLI::ignore_case))
            ->option_text("standard|custom");
        cmd->add_option("--dot", common.config.dot_dir,
                        "directory for one DOT file per depth level");
        if (solver_flags) {
            cmd->add_option("--representation", common.config.representation,
                            "e-state representation")
                ->transform(CLI::CheckedTransformer(reprs, CLI::ignore_case))
                ->option_text("kripke|possibility");
            cmd->add_option("--strategy", common.config.strategy, "search strategy")
                ->transform(CLI::CheckedTransformer(strategies, CLI::ignore_case))
                ->option_text("bfs|hbfs");
            cmd->add_option("--max-depth", common.config.max_depth, "plan length bound");
            cmd->add_option("--max-nodes", common.config.max_nodes, "generated-node budget");
            cmd->add_option("--seed", common.config.seed, "seed for test generators");
            cmd->add_flag("--hbfs-deep-ties", common.config.hbfs_prefer_deeper,
                          "break hbfs ties toward deeper nodes");
        }
    };

    CLI::App* solve = app.add_subcommand("solve", "search for a plan");
    add_common(solve, true);
    CLI::App* validate = app.add_subcommand("validate", "re-execute a plan");
    add_common(validate, false);
    validate->add_option("--plan", plan_text, "whitespace-separated action names")->required();
    CLI::App* inspect = app.add_subcommand("inspect", "print the initial e-state");
    add_common(inspect, false);

    std::vector<const char*> argv;
    argv.push_back("eplan");
    for (const std::string& a : args) argv.push_back(a.c_str());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (solve->parsed()) return run_solve(common);
        if (validate->parsed()) return run_validate(common, plan_text);
        return run_inspect(common);
    } catch (const EplanError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}

}  // namespace eplan::cli

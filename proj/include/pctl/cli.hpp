// Command-line front-end. Exit codes are a scripting contract:
//   0 success / property holds / membership established
//   1 property fails / not a member
//   2 verdict unknown
//   3 input or usage error
//   4 budget exceeded

#pragma once

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "pctl/counterexample.hpp"
#include "pctl/errors.hpp"
#include "pctl/markov.hpp"
#include "pctl/modelcheck.hpp"
#include "pctl/parser.hpp"
#include "pctl/simulation.hpp"
#include "pctl/taxonomy.hpp"
#include "pctl/trees.hpp"

namespace pctl::cli {

namespace exit_code {
inline constexpr int kSuccess = 0;
inline constexpr int kFails = 1;
inline constexpr int kUnknown = 2;
inline constexpr int kInputError = 3;
inline constexpr int kBudgetExceeded = 4;
} // namespace exit_code

namespace detail {

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::invalid_argument("cannot open file: " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

inline std::string spanned(const ParseError& e) {
    std::ostringstream out;
    out << e.what() << " (at " << e.span().start << ".." << e.span().end << ")";
    return out.str();
}

struct FormulaSource {
    std::string inline_text;
    std::string file_path;

    StateFormula resolve() const {
        if (!inline_text.empty() && !file_path.empty())
            throw std::invalid_argument("give the formula inline or via --file, not both");
        if (!inline_text.empty()) return parse_formula(inline_text);
        if (!file_path.empty()) {
            auto formulas = parse_formula_file(read_file(file_path));
            if (formulas.size() != 1)
                throw std::invalid_argument("--file must contain exactly one formula");
            return formulas.front();
        }
        throw std::invalid_argument("missing formula (inline or --file)");
    }
};

inline nlohmann::json verdict_json_or_string(const FragmentVerdict& v) { return verdict_to_json(v); }

} // namespace detail

inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"PCTL safety/liveness toolkit for finite Markov chains"};
    app.require_subcommand(1);
    app.fallthrough(); // global flags may appear after the subcommand

    std::uint64_t seed = 1;
    std::size_t budget = 0; // 0: per-command default
    std::string format = "text";
    app.add_option("--seed", seed, "seed for all randomized internals");
    app.add_option("--budget", budget,
                   "generic budget: CNF nodes (decompose), enumerated chains (oracle), "
                   "search depth (counterexample)");
    app.add_option("--format", format, "output format")
        ->check(CLI::IsMember({"text", "structured"}));

    // parse
    std::string parse_path;
    auto* cmd_parse = app.add_subcommand("parse", "parse a formula file and echo normal forms");
    cmd_parse->add_option("file", parse_path, "formula file, one per line")->required();

    // classify
    detail::FormulaSource classify_src;
    auto* cmd_classify = app.add_subcommand("classify", "fragment membership report");
    cmd_classify->add_option("formula", classify_src.inline_text, "formula text");
    cmd_classify->add_option("--file", classify_src.file_path, "read the formula from a file");

    // decompose
    detail::FormulaSource decompose_src;
    auto* cmd_decompose =
        app.add_subcommand("decompose", "split a flat formula into safe and live parts");
    cmd_decompose->add_option("formula", decompose_src.inline_text, "formula text");
    cmd_decompose->add_option("--file", decompose_src.file_path, "read the formula from a file");

    // check
    detail::FormulaSource check_src;
    std::string check_mc;
    auto* cmd_check = app.add_subcommand("check", "model-check a formula on a chain");
    cmd_check->add_option("--mc", check_mc, "Markov chain file")->required();
    cmd_check->add_option("formula", check_src.inline_text, "formula text");
    cmd_check->add_option("--file", check_src.file_path, "read the formula from a file");

    // ctl
    std::string ctl_mc, ctl_query;
    auto* cmd_ctl = app.add_subcommand("ctl", "qualitative CTL query on the underlying digraph");
    cmd_ctl->add_option("--mc", ctl_mc, "Markov chain file")->required();
    cmd_ctl->add_option("query", ctl_query, "EF/AF/EG/AG p or E p U q")->required();

    // simulate
    std::string simulate_mc, simulate_pair;
    auto* cmd_simulate = app.add_subcommand("simulate", "strong simulation relation");
    cmd_simulate->add_option("--mc", simulate_mc, "Markov chain file")->required();
    cmd_simulate->add_option("--pair", simulate_pair, "single pair query, written s,t");

    // counterexample
    detail::FormulaSource ce_src;
    std::string ce_mc;
    auto* cmd_ce =
        app.add_subcommand("counterexample", "finite counterexample for a violated safe formula");
    cmd_ce->add_option("--mc", ce_mc, "Markov chain file")->required();
    cmd_ce->add_option("formula", ce_src.inline_text, "formula text");
    cmd_ce->add_option("--file", ce_src.file_path, "read the formula from a file");

    // oracle
    std::string oracle_tree, oracle_formula;
    int oracle_max_states = 3;
    auto* cmd_oracle =
        app.add_subcommand("oracle", "search for a continuation making a formula true");
    cmd_oracle->add_option("--tree", oracle_tree, "finite-depth tree file")->required();
    cmd_oracle->add_option("--formula", oracle_formula, "formula text")->required();
    cmd_oracle->add_option("--max-states", oracle_max_states, "continuation state bound");

    // gen
    int gen_states = 4, gen_degree = 3;
    std::string gen_ap = "a b", gen_grid = "1 2 3";
    auto* cmd_gen = app.add_subcommand("gen", "emit a seeded random chain");
    cmd_gen->add_option("--states", gen_states, "state count");
    cmd_gen->add_option("--degree", gen_degree, "maximum out-degree");
    cmd_gen->add_option("--ap", gen_ap, "space-separated proposition names");
    cmd_gen->add_option("--grid", gen_grid, "space-separated unnormalized weights");

    std::vector<const char*> argv;
    argv.push_back("pctl");
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return exit_code::kSuccess;
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << "\n";
        return exit_code::kInputError;
    }
    bool structured = format == "structured";

    try {
        if (cmd_parse->parsed()) {
            auto formulas = parse_formula_file(detail::read_file(parse_path));
            if (structured) {
                nlohmann::json j = nlohmann::json::array();
                for (const auto& phi : formulas) j.push_back(print_formula(to_pnf(phi)));
                out << nlohmann::json{{"formulas", j}}.dump(2) << "\n";
            } else {
                for (const auto& phi : formulas) out << print_formula(to_pnf(phi)) << "\n";
            }
            return exit_code::kSuccess;
        }

        if (cmd_classify->parsed()) {
            BoundedSearchParams params;
            params.seed = seed;
            ClassificationReport report = classify(classify_src.resolve(), params);
            out << (structured ? report_to_json(report).dump(2) + "\n" : report_to_text(report));
            bool any_in = report.safe || report.ssafe || report.live_lt.in() ||
                          report.live_gt_syntactic.in() || report.live_gt_guarded.in() ||
                          report.alive.in();
            if (any_in) return exit_code::kSuccess;
            bool any_unknown = report.live_lt.verdict == Verdict::Unknown ||
                               report.live_gt_syntactic.verdict == Verdict::Unknown ||
                               report.live_gt_guarded.verdict == Verdict::Unknown ||
                               report.alive.verdict == Verdict::Unknown;
            return any_unknown ? exit_code::kUnknown : exit_code::kFails;
        }

        if (cmd_decompose->parsed()) {
            std::size_t cnf_budget = budget ? budget : kDefaultCnfNodeBudget;
            DecompositionResult d = decompose_flat(decompose_src.resolve(), cnf_budget);
            if (structured) {
                nlohmann::json j;
                j["safe"] = print_formula(d.safe_part);
                j["live"] = print_formula(d.live_part);
                j["conjuncts"] = nlohmann::json::array();
                for (const auto& t : d.trace)
                    j["conjuncts"].push_back({{"conjunct", print_formula(t.conjunct)},
                                              {"safe", print_formula(t.safe_part)},
                                              {"live", print_formula(t.live_part)}});
                out << j.dump(2) << "\n";
            } else {
                out << "safe: " << print_formula(d.safe_part) << "\n";
                out << "live: " << print_formula(d.live_part) << "\n";
                for (const auto& t : d.trace)
                    out << "conjunct: " << print_formula(t.conjunct) << "\n  safe: "
                        << print_formula(t.safe_part) << "\n  live: " << print_formula(t.live_part)
                        << "\n";
            }
            return exit_code::kSuccess;
        }

        if (cmd_check->parsed()) {
            MarkovChain mc = load_mc(detail::read_file(check_mc));
            StateFormula phi = check_src.resolve();
            bool holds = check(mc, phi);
            std::optional<Rational> probability;
            if (phi.kind() == StateFormula::Kind::Prob)
                probability = path_probabilities(mc, phi.path())[mc.init];
            if (structured) {
                nlohmann::json j;
                j["holds"] = holds;
                if (probability) j["probability"] = probability->to_string();
                out << j.dump(2) << "\n";
            } else {
                out << (holds ? "true" : "false");
                if (probability) out << " (prob = " << probability->to_string() << ")";
                out << "\n";
            }
            return holds ? exit_code::kSuccess : exit_code::kFails;
        }

        if (cmd_ctl->parsed()) {
            MarkovChain mc = load_mc(detail::read_file(ctl_mc));
            CtlFormula query = parse_ctl_query(ctl_query);
            std::set<int> sat = ctl_check(mc, query);
            bool holds = sat.count(mc.init) > 0;
            if (structured) {
                nlohmann::json j;
                j["satisfying_states"] = sat;
                j["holds_at_init"] = holds;
                out << j.dump(2) << "\n";
            } else {
                out << (holds ? "true" : "false") << " (states:";
                for (int s : sat) out << " " << s;
                out << ")\n";
            }
            return holds ? exit_code::kSuccess : exit_code::kFails;
        }

        if (cmd_simulate->parsed()) {
            MarkovChain mc = load_mc(detail::read_file(simulate_mc));
            SimulationRelation relation = strong_simulation(mc);
            if (!simulate_pair.empty()) {
                auto comma = simulate_pair.find(',');
                if (comma == std::string::npos)
                    throw std::invalid_argument("--pair expects s,t");
                int s = std::stoi(simulate_pair.substr(0, comma));
                int t = std::stoi(simulate_pair.substr(comma + 1));
                if (s < 0 || s >= mc.state_count() || t < 0 || t >= mc.state_count())
                    throw std::invalid_argument("--pair states out of range");
                bool related = relation.count({s, t}) > 0;
                if (structured) {
                    out << nlohmann::json{{"pair", {s, t}}, {"related", related}}.dump(2) << "\n";
                } else {
                    out << (related ? "related" : "not related") << "\n";
                }
                return related ? exit_code::kSuccess : exit_code::kFails;
            }
            if (structured) {
                nlohmann::json pairs = nlohmann::json::array();
                for (const auto& [s, t] : relation) pairs.push_back({s, t});
                out << nlohmann::json{{"pairs", pairs}}.dump(2) << "\n";
            } else {
                out << render_relation(relation);
            }
            return exit_code::kSuccess;
        }

        if (cmd_ce->parsed()) {
            MarkovChain mc = load_mc(detail::read_file(ce_mc));
            int depth = budget ? static_cast<int>(budget) : kDefaultCounterexampleDepth;
            auto ce = find_counterexample(mc, ce_src.resolve(), depth);
            if (!ce) {
                if (structured)
                    out << nlohmann::json{{"holds", true}}.dump(2) << "\n";
                else
                    out << "holds; no counterexample\n";
                return exit_code::kSuccess;
            }
            if (structured) {
                nlohmann::json j;
                j["holds"] = false;
                j["formula"] = print_formula(ce->formula);
                j["mass"] = ce->mass.to_string();
                j["paths"] = ce->paths;
                out << j.dump(2) << "\n";
            } else {
                out << render_counterexample(*ce);
            }
            return exit_code::kFails;
        }

        if (cmd_oracle->parsed()) {
            ProbTree tree = load_tree(detail::read_file(oracle_tree));
            StateFormula phi = parse_formula(oracle_formula);
            ExtensionFamily family;
            family.max_states = oracle_max_states;
            if (budget) family.enumeration_budget = budget;
            auto witness = extension_oracle(tree, phi, family);
            if (witness) {
                if (structured) {
                    out << nlohmann::json{{"witness", save_mc(witness->continuation)},
                                          {"tested", witness->tested}}
                               .dump(2)
                        << "\n";
                } else {
                    out << "witness found after " << witness->tested << " candidates\n"
                        << save_mc(witness->continuation);
                }
                return exit_code::kSuccess;
            }
            if (structured)
                out << nlohmann::json{{"witness", nullptr}}.dump(2) << "\n";
            else
                out << "no witness in family (bounded refutation, not a proof)\n";
            return exit_code::kFails;
        }

        if (cmd_gen->parsed()) {
            GenParams params;
            params.seed = seed;
            params.state_count = gen_states;
            params.max_out_degree = gen_degree;
            params.ap = pctl::detail::split_ws(gen_ap);
            params.grid.clear();
            for (const auto& w : pctl::detail::split_ws(gen_grid)) {
                auto r = Rational::parse(w);
                if (!r) throw std::invalid_argument("malformed grid weight: " + w);
                params.grid.push_back(*r);
            }
            std::string text = save_mc(random_mc(params));
            if (structured)
                out << nlohmann::json{{"mc", text}}.dump(2) << "\n";
            else
                out << text;
            return exit_code::kSuccess;
        }
    } catch (const SizeLimitError& e) {
        err << "budget exceeded: " << e.what() << " (count " << e.count() << ")\n";
        return exit_code::kBudgetExceeded;
    } catch (const DepthBudgetError& e) {
        err << "budget exceeded: " << e.what() << "\n";
        return exit_code::kBudgetExceeded;
    } catch (const ParseError& e) {
        err << "input error: " << detail::spanned(e) << "\n";
        return exit_code::kInputError;
    } catch (const UnsupportedShapeError& e) {
        err << "input error: " << e.what() << "\n";
        return exit_code::kInputError;
    } catch (const std::invalid_argument& e) {
        err << "input error: " << e.what() << "\n";
        return exit_code::kInputError;
    } catch (const std::domain_error& e) {
        err << "input error: " << e.what() << "\n";
        return exit_code::kInputError;
    }
    err << "usage error: no subcommand\n";
    return exit_code::kInputError;
}

} // namespace pctl::cli

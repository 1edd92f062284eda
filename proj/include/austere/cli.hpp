#pragma once

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "austere/analysis.hpp"
#include "austere/engine.hpp"
#include "austere/ground.hpp"
#include "austere/ht.hpp"
#include "austere/parse.hpp"
#include "austere/print.hpp"
#include "austere/transform.hpp"

namespace austere::cli {

using nlohmann::json;

struct CommonOpts {
    std::vector<std::string> inputs;
    std::vector<std::string> const_defs;
    bool json_output = false;
    int max_atoms = kDefaultHtBound;
    int max_choices = 24;
    int models = 0;  // 0 = all
    unsigned seed = 0;
    std::string emit_map;
};

namespace detail {

inline bool color_enabled() {
    const char* env = std::getenv("AUSTERE_COLOR");
    if (!env) return false;
    std::string v = env;
    return v == "1" || v == "true" || v == "yes";
}

inline const char* severity_name(Diagnostic::Severity s) {
    switch (s) {
        case Diagnostic::Severity::Error: return "error";
        case Diagnostic::Severity::Warning: return "warning";
        case Diagnostic::Severity::Note: return "note";
    }
    return "?";
}

inline std::string render_diagnostic(const Diagnostic& d) {
    std::string sev = severity_name(d.severity);
    if (color_enabled()) {
        const char* code = d.severity == Diagnostic::Severity::Error     ? "\033[31m"
                           : d.severity == Diagnostic::Severity::Warning ? "\033[33m"
                                                                         : "\033[36m";
        sev = std::string(code) + sev + "\033[0m";
    }
    return sev + ": rule@" + std::to_string(d.line) + ": " + d.message;
}

inline std::string read_inputs(const std::vector<std::string>& paths) {
    std::string text;
    for (const auto& path : paths) {
        if (path == "-") {
            std::ostringstream ss;
            ss << std::cin.rdbuf();
            text += ss.str();
        } else {
            std::ifstream in(path);
            if (!in) throw std::runtime_error("cannot open '" + path + "'");
            std::ostringstream ss;
            ss << in.rdbuf();
            text += ss.str();
        }
        if (!text.empty() && text.back() != '\n') text += '\n';
    }
    return text;
}

inline std::map<std::string, long long> parse_const_defs(const std::vector<std::string>& defs) {
    std::map<std::string, long long> out;
    for (const auto& d : defs) {
        auto eq = d.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error("--const expects name=int, got '" + d + "'");
        out[d.substr(0, eq)] = std::stoll(d.substr(eq + 1));
    }
    return out;
}

inline Program load_program(const CommonOpts& opts) {
    return parse_program(read_inputs(opts.inputs), parse_const_defs(opts.const_defs));
}

/// Rewrites every bounded choice head before grounding.
inline Program eliminate_aggregate_heads(const Program& p) {
    Program out = p;
    std::vector<Rule> rules;
    for (const auto& r : out.rules) {
        if (const auto* c = std::get_if<ChoiceHead>(&r.head); c && c->bounded()) {
            for (auto& nr : eliminate_aggregate_head(r)) rules.push_back(std::move(nr));
        } else {
            rules.push_back(r);
        }
    }
    out.rules = std::move(rules);
    return out;
}

inline std::vector<std::string> shown_atoms(const GroundProgram& g,
                                            const std::vector<std::string>& model) {
    if (g.shows.empty()) return model;
    std::vector<std::string> out;
    for (const auto& name : model) {
        int id = g.table.find(name);
        const Atom& a = g.table.atoms[id];
        for (const auto& s : g.shows)
            if (s.predicate == a.predicate && s.arity == a.arity()) {
                out.push_back(name);
                break;
            }
    }
    return out;
}

inline int print_models(std::ostream& os, const GroundProgram& g, const SolveResult& res,
                        int limit, bool optimizing) {
    int n = 0;
    for (const auto& m : res.models) {
        ++n;
        os << "Answer: " << n << "\n";
        std::vector<std::string> shown = shown_atoms(g, m);
        for (std::size_t i = 0; i < shown.size(); ++i) os << (i ? " " : "") << shown[i];
        os << "\n";
        if (limit > 0 && n >= limit) break;
    }
    if (!res.satisfiable()) {
        os << "UNSATISFIABLE\n";
        return 20;
    }
    if (optimizing && res.cost) {
        os << "OPTIMUM FOUND cost " << *res.cost << "\n";
        return 30;
    }
    os << "SATISFIABLE\n";
    return 10;
}

inline json models_json(const GroundProgram& g, const SolveResult& res) {
    json out;
    out["satisfiable"] = res.satisfiable();
    out["models"] = json::array();
    for (const auto& m : res.models) out["models"].push_back(shown_atoms(g, m));
    if (res.cost) out["cost"] = *res.cost;
    return out;
}

inline json strata_json(const Stratification& s) {
    json arr = json::array();
    for (const auto& st : s.strata) {
        json stratum;
        stratum["kind"] = to_string(st.kind);
        stratum["lines"] = st.lines;
        stratum["rules"] = st.rules;
        if (!st.predicates.empty()) stratum["predicates"] = st.predicates;
        arr.push_back(std::move(stratum));
    }
    return arr;
}

inline json diagnostics_json(const std::vector<Diagnostic>& diags) {
    json arr = json::array();
    for (const auto& d : diags)
        arr.push_back({{"severity", severity_name(d.severity)},
                       {"line", d.line},
                       {"message", d.message}});
    return arr;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Subcommands

inline int cmd_check(const CommonOpts& opts, std::ostream& out) {
    Program p = detail::load_program(opts);
    EasyDecomposition d = classify_easy(p);
    CheckResult austere_check = check_austere(p);
    CheckResult strat_neg = check_stratified_negation(p);

    std::string cls = d.easy() ? "easy" : "not-easy";

    std::optional<UniqueExtensionReport> unique;
    std::string unique_note;
    if (d.easy()) {
        try {
            GroundProgram g = ground(detail::eliminate_aggregate_heads(p));
            unique = check_unique_extension(g, 32, opts.seed, 12, opts.max_atoms);
        } catch (const std::exception& e) {
            unique_note = e.what();
        }
    }

    if (opts.json_output) {
        json j;
        j["class"] = cls;
        j["strata"] = detail::strata_json(d.strat);
        j["stratification"] = render_stratification(d.strat);
        j["violations"] = detail::diagnostics_json(d.violations);
        j["austere"] = austere_check.ok;
        j["stratified_negation"] = strat_neg.ok;
        if (unique) {
            json u;
            u["checked"] = unique->checked;
            u["exhaustive"] = unique->exhaustive;
            u["failures"] = json::array();
            for (const auto& f : unique->failures) {
                json fj;
                fj["chosen"] = f.chosen;
                fj["total_wfm"] = f.total_wfm;
                fj["unknown"] = f.unknown;
                if (f.oracle_count) fj["stable_models"] = *f.oracle_count;
                u["failures"].push_back(std::move(fj));
            }
            j["unique_extension"] = std::move(u);
        } else {
            j["unique_extension"] = nullptr;
        }
        out << j.dump(2) << "\n";
        return 0;
    }

    out << "class: " << cls << "\n";
    out << "strata: " << render_stratification(d.strat) << "\n";
    out << "austere: " << (austere_check.ok ? "yes" : "no") << "\n";
    out << "stratified-negation: " << (strat_neg.ok ? "yes" : "no") << "\n";
    for (const auto& diag : d.violations) out << detail::render_diagnostic(diag) << "\n";
    if (unique) {
        out << "unique-extension: " << (unique->ok() ? "ok" : "FAILED") << " ("
            << unique->checked << " subsets" << (unique->exhaustive ? ", exhaustive" : "")
            << ")\n";
        for (const auto& f : unique->failures) {
            out << "  non-deterministic extension for C' = {";
            for (std::size_t i = 0; i < f.chosen.size(); ++i)
                out << (i ? "," : "") << f.chosen[i];
            out << "}";
            if (!f.total_wfm) out << " (well-founded model not total)";
            if (f.oracle_count) out << " (stable models: " << *f.oracle_count << ")";
            out << "\n";
        }
    } else if (!unique_note.empty()) {
        out << "unique-extension: skipped (" << unique_note << ")\n";
    }
    return 0;
}

inline int cmd_stratify(const CommonOpts& opts, std::ostream& out) {
    Program p = detail::load_program(opts);
    Stratification s = stratify(p);
    if (opts.json_output) {
        json j;
        j["strata"] = detail::strata_json(s);
        j["stratification"] = render_stratification(s);
        j["diagnostics"] = detail::diagnostics_json(s.diagnostics);
        out << j.dump(2) << "\n";
        return 0;
    }
    out << "strata: " << render_stratification(s) << "\n";
    for (const auto& st : s.strata) {
        out << "  " << to_string(st.kind);
        if (st.kind == Stratum::Kind::Defines) out << " (level " << st.level << ")";
        out << ":";
        for (int i : st.rules) {
            out << " ";
            print_rule(out, p.rules[i]);
        }
        out << "\n";
    }
    for (const auto& diag : s.diagnostics) out << detail::render_diagnostic(diag) << "\n";
    return 0;
}

inline int cmd_translate(const CommonOpts& opts, std::ostream& out) {
    Program p = detail::load_program(opts);
    Program prepared = detail::eliminate_aggregate_heads(p);
    GroundProgram g = ground(prepared);
    Program source = ground_to_program(g);
    ProgramTranslation tau = translate_program(source);
    print_program(out, tau.program);
    for (const auto& m : p.minimizes) {
        print_minimize(out, m);
        out << "\n";
    }
    if (!opts.emit_map.empty()) {
        std::ostringstream map_text;
        for (const auto& [name, original] : tau.aux)
            map_text << name << "\t" << "not " << to_text(original) << "\n";
        if (opts.emit_map == "-") {
            out << map_text.str();
        } else {
            std::ofstream f(opts.emit_map);
            if (!f) throw std::runtime_error("cannot write '" + opts.emit_map + "'");
            f << map_text.str();
        }
    }
    return 0;
}

inline int cmd_solve(const CommonOpts& opts, std::ostream& out) {
    Program p = detail::load_program(opts);
    GroundProgram g = ground(detail::eliminate_aggregate_heads(p));
    EngineOptions eopts;
    eopts.max_choices = opts.max_choices;
    bool optimizing = !g.minimize.empty();
    SolveResult res = optimizing ? optimize(g, eopts) : stable_models(g, eopts);
    if (opts.json_output) {
        out << detail::models_json(g, res).dump(2) << "\n";
        return res.satisfiable() ? (optimizing ? 30 : 10) : 20;
    }
    return detail::print_models(out, g, res, opts.models, optimizing);
}

inline int cmd_oracle(const CommonOpts& opts, std::ostream& out) {
    Program p = detail::load_program(opts);
    GroundProgram g = ground(detail::eliminate_aggregate_heads(p));
    Program source = ground_to_program(g);
    ModelSet ms = equilibrium_models(source, opts.max_atoms);
    SolveResult res;
    for (const auto& m : ms.to_sets()) res.models.emplace_back(m.begin(), m.end());
    res.canonicalize();
    bool optimizing = !g.minimize.empty();
    if (optimizing && res.satisfiable()) {
        long long best = 0;
        bool first = true;
        std::vector<std::vector<std::string>> keep;
        for (const auto& m : res.models) {
            long long c = model_cost(g, m);
            if (first || c < best) {
                best = c;
                keep.clear();
                first = false;
            }
            if (c == best) keep.push_back(m);
        }
        res.models = std::move(keep);
        res.cost = best;
    }
    if (opts.json_output) {
        out << detail::models_json(g, res).dump(2) << "\n";
        return res.satisfiable() ? (optimizing ? 30 : 10) : 20;
    }
    return detail::print_models(out, g, res, opts.models, optimizing);
}

inline int cmd_debug(const CommonOpts& opts, std::ostream& out) {
    Program p = detail::load_program(opts);
    EngineOptions eopts;
    eopts.max_choices = opts.max_choices;
    DebugResult res = debug_solve(p, eopts);
    if (opts.json_output) {
        json j;
        j["satisfiable"] = res.result.satisfiable();
        if (res.result.cost) j["cost"] = *res.result.cost;
        j["models"] = json::array();
        for (std::size_t i = 0; i < res.result.models.size(); ++i) {
            json mj;
            mj["atoms"] = res.result.models[i];
            mj["violations"] = json::array();
            for (const auto& v : res.violations[i])
                mj["violations"].push_back({{"atom", v.ic_atom},
                                            {"line", v.source_line},
                                            {"constraint", v.constraint}});
            j["models"].push_back(std::move(mj));
        }
        out << j.dump(2) << "\n";
        return res.result.satisfiable() ? 30 : 20;
    }
    int n = 0;
    for (std::size_t i = 0; i < res.result.models.size(); ++i) {
        ++n;
        out << "Answer: " << n << "\n";
        const auto& m = res.result.models[i];
        for (std::size_t j = 0; j < m.size(); ++j) out << (j ? " " : "") << m[j];
        out << "\n";
        if (!res.violations[i].empty()) {
            out << "Violated constraints:\n";
            for (const auto& v : res.violations[i])
                out << "  " << v.ic_atom << "  (line " << v.source_line << ": " << v.constraint
                    << ")\n";
        }
        if (opts.models > 0 && n >= opts.models) break;
    }
    if (!res.result.satisfiable()) {
        out << "UNSATISFIABLE\n";
        return 20;
    }
    out << "OPTIMUM FOUND cost " << (res.result.cost ? *res.result.cost : 0) << "\n";
    return 30;
}

// ---------------------------------------------------------------------------

inline int run(const std::vector<std::string>& args, std::ostream& out = std::cout,
               std::ostream& err = std::cerr) {
    CLI::App app{"austere: analyze, transform and solve logic programs "
                 "in the guess-define-check style"};
    app.require_subcommand(1);

    CommonOpts opts;
    auto add_common = [&](CLI::App* cmd, bool with_solver_flags) {
        cmd->add_option("inputs", opts.inputs, "input files ('-' for stdin)")->required();
        cmd->add_option("--const", opts.const_defs, "override a program constant (name=int)");
        cmd->add_flag("--json", opts.json_output, "machine-readable output");
        cmd->add_option("--max-atoms", opts.max_atoms, "oracle vocabulary bound");
        cmd->add_option("--seed", opts.seed, "seed for sampled checks");
        if (with_solver_flags) {
            cmd->add_option("--models", opts.models, "number of models to print (0 = all)");
            cmd->add_option("--max-choices", opts.max_choices,
                            "cap on choice atoms for enumeration (0 = unlimited)");
        }
    };

    CLI::App* check = app.add_subcommand("check", "classify a program (austere/easy)");
    add_common(check, false);
    CLI::App* stratify_cmd = app.add_subcommand("stratify", "print the canonical stratification");
    add_common(stratify_cmd, false);
    CLI::App* translate = app.add_subcommand("translate", "normal -> austere translation");
    add_common(translate, false);
    translate->add_option("--emit-map", opts.emit_map,
                          "write aux-atom definitions (tab separated; '-' for stdout)");
    CLI::App* solve = app.add_subcommand("solve", "compute stable models");
    add_common(solve, true);
    CLI::App* oracle = app.add_subcommand("oracle", "brute-force equilibrium-model oracle");
    add_common(oracle, true);
    CLI::App* debug = app.add_subcommand("debug", "minimize integrity-constraint violations");
    add_common(debug, true);

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            out << app.help();
            return 0;
        }
        err << "usage error: " << e.what() << "\n";
        return 2;
    }

    try {
        if (app.got_subcommand(check)) return cmd_check(opts, out);
        if (app.got_subcommand(stratify_cmd)) return cmd_stratify(opts, out);
        if (app.got_subcommand(translate)) return cmd_translate(opts, out);
        if (app.got_subcommand(solve)) return cmd_solve(opts, out);
        if (app.got_subcommand(oracle)) return cmd_oracle(opts, out);
        if (app.got_subcommand(debug)) return cmd_debug(opts, out);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
    err << "usage error: no subcommand\n";
    return 2;
}

}  // namespace austere::cli

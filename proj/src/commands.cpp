#include "flowrefine/commands.hpp"

#include <fstream>
#include <iostream>
#include <sstream>

#include <json.hpp>

namespace flowrefine {

using nlohmann::ordered_json;

namespace {

struct UsageError {
    std::string message;
    bool formatted = false;
};

std::string read_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw UsageError{"cannot read '" + path + "'"};
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

ordered_json tuple_json(const NamedStreamTuple& t)
{
    ordered_json streams = ordered_json::object();
    for (const auto& [ch, x] : t.bindings()) {
        ordered_json ivs = ordered_json::array();
        for (const auto& iv : x.intervals())
            ivs.push_back(iv);
        streams[ch.str()] = std::move(ivs);
    }
    return streams;
}

ordered_json cx_json(const std::optional<Counterexample>& cx)
{
    if (!cx)
        return nullptr;
    ordered_json tuples = ordered_json::array();
    for (const auto& [label, t] : cx->tuples)
        tuples.push_back({{"label", label}, {"horizon", t.horizon()}, {"streams", tuple_json(t)}});
    return {{"description", cx->description}, {"tuples", std::move(tuples)}};
}

ordered_json report_value(const PremiseReport& r)
{
    ordered_json verdicts = ordered_json::array();
    for (const auto& v : r.verdicts)
        verdicts.push_back({{"id", v.id},
                            {"statement", v.statement},
                            {"holds", v.holds},
                            {"detail", v.detail},
                            {"witness", cx_json(v.witness)}});
    return {{"subject", r.subject}, {"ok", r.ok()}, {"verdicts", std::move(verdicts)}};
}

ordered_json inclusion_value(const std::optional<InclusionResult>& r)
{
    if (!r)
        return nullptr;
    return {{"holds", r->holds}, {"nodes", r->nodes}, {"counterexample", cx_json(r->counterexample)}};
}

void print_diagnostics(std::ostream& err, const std::string& path, const ParseError& e)
{
    for (const auto& d : e.diagnostics())
        err << path << ":" << d.line << ":" << d.column << ": error: " << d.message << "\n";
}

/// Runs a command body, mapping parse and usage problems to exit code 2.
template <class F>
int guarded(std::ostream& err, const std::string& path, F&& body)
{
    try {
        return body();
    } catch (const UsageError& e) {
        err << (e.formatted ? "" : "error: ") << e.message << "\n";
    } catch (const ParseError& e) {
        print_diagnostics(err, path, e);
    } catch (const BoundsError& e) {
        err << "error: " << e.what() << "\n";
    } catch (const InterfaceError& e) {
        err << "error: " << e.what() << "\n";
    } catch (const DomainError& e) {
        err << "error: " << e.what() << "\n";
    }
    return exit_usage;
}

ArchitectureDocument load_architecture(const std::string& path)
{
    auto text = read_file(path);
    try {
        return parse_architecture(text);
    } catch (const ParseError& e) {
        std::ostringstream msg;
        print_diagnostics(msg, path, e);
        auto s = msg.str();
        s.pop_back();
        throw UsageError{s, true};
    }
}

void print_report(std::ostream& out, const PremiseReport& r, bool json, const std::string& command)
{
    if (json)
        out << ordered_json{{"command", command}, {"ok", r.ok()}, {"report", report_value(r)}}.dump(2) << "\n";
    else
        out << to_string(r) << "\n";
}

std::string transcript_line(std::size_t index, std::size_t total, const StepOutcome& s)
{
    std::string line = "[" + std::to_string(index + 1) + "/" + std::to_string(total) + "] stage " +
                       std::to_string(s.step.stage) + ": " + s.step.summary() + " ... ";
    if (!s.report.ok())
        return line + "premise failed";
    if (s.refinement && !s.refinement->holds)
        return line + "refinement check failed";
    if (s.equality && !s.equality->holds)
        return line + "equality check failed";
    if (s.refinement || s.equality)
        return line + "ok (verified)";
    return line + "ok";
}

void print_replay(std::ostream& out, const ReplayResult& r, std::size_t total)
{
    for (std::size_t i = 0; i < r.steps.size(); ++i) {
        const auto& s = r.steps[i];
        out << transcript_line(i, total, s) << "\n";
        if (!s.report.ok())
            out << to_string(s.report) << "\n";
        if (s.refinement && !s.refinement->holds && s.refinement->counterexample)
            out << "  refinement counterexample: " << to_string(*s.refinement->counterexample) << "\n";
        if (s.equality && !s.equality->holds && s.equality->counterexample)
            out << "  equality counterexample: " << to_string(*s.equality->counterexample) << "\n";
    }
    if (r.failed_step)
        out << "failed at step " << (*r.failed_step + 1) << " (stage " << r.steps[*r.failed_step].step.stage
            << ")\n";
}

ordered_json replay_value(const ReplayResult& r)
{
    ordered_json steps = ordered_json::array();
    for (std::size_t i = 0; i < r.steps.size(); ++i) {
        const auto& s = r.steps[i];
        steps.push_back({{"index", i + 1},
                         {"stage", s.step.stage},
                         {"step", s.step.summary()},
                         {"applied", s.report.ok()},
                         {"report", report_value(s.report)},
                         {"refinement", inclusion_value(s.refinement)},
                         {"equality", inclusion_value(s.equality)}});
    }
    return {{"ok", r.ok()},
            {"failed_step", r.failed_step ? ordered_json(*r.failed_step + 1) : ordered_json(nullptr)},
            {"steps", std::move(steps)}};
}

/// Bounds of `a` with alphabets of `b` added where `a` lacks them.
EnumerationBounds merged_bounds(const ArchitectureDocument& a, const ArchitectureDocument& b,
                                const BoundsOverride& o)
{
    auto bounds = bounds_of(a, o);
    for (const auto& [ch, msgs] : b.alphabets)
        if (!bounds.declares(ch))
            bounds = bounds.with_alphabet(ch, msgs);
    return bounds;
}

} // namespace

std::string report_json(const PremiseReport& report)
{
    return report_value(report).dump(2);
}

std::string inclusion_json(const InclusionResult& r)
{
    return inclusion_value(r).dump(2);
}

std::string render_runs(const std::vector<NamedStreamTuple>& runs)
{
    std::string s = "runs: " + std::to_string(runs.size()) + "\n";
    for (std::size_t i = 0; i < runs.size(); ++i) {
        s += "run " + std::to_string(i + 1) + "\n";
        for (const auto& [ch, x] : runs[i].bindings()) {
            s += "  " + ch.str() + " =";
            for (const auto& iv : x.intervals())
                s += " " + to_string(iv);
            s += "\n";
        }
    }
    return s;
}

int cmd_validate(const std::string& arch_path, const CommandOptions& opt, std::ostream& out, std::ostream& err)
{
    return guarded(err, arch_path, [&] {
        auto doc = load_architecture(arch_path);
        auto s = build_system(doc, opt.bounds);
        auto report = validate_system(s);
        if (report.verdicts.empty())
            report.pass("consistent", "conditions (1)-(5) hold");
        print_report(out, report, opt.json, "validate");
        return report.ok() ? exit_ok : exit_failure;
    });
}

int cmd_simulate(const std::string& arch_path, const std::string& env_path, const CommandOptions& opt,
                 std::ostream& out, std::ostream& err)
{
    return guarded(err, arch_path, [&] {
        auto doc = load_architecture(arch_path);
        auto s = build_system(doc, opt.bounds);
        auto consistency = validate_system(s);
        if (!consistency.ok()) {
            print_report(out, consistency, opt.json, "simulate");
            return exit_failure;
        }
        auto env_text = read_file(env_path);
        NamedStreamTuple env;
        try {
            env = parse_environment(env_text, s.in(), s.bounds().horizon());
        } catch (const ParseError& e) {
            print_diagnostics(err, env_path, e);
            return exit_usage;
        }
        s.bounds().check_tuple(env, s.bounds().horizon());
        auto runs = system_runs(s, env);
        if (opt.json) {
            ordered_json list = ordered_json::array();
            for (const auto& r : runs)
                list.push_back(tuple_json(r));
            out << ordered_json{{"command", "simulate"},
                                {"horizon", s.bounds().horizon()},
                                {"runs", std::move(list)}}
                       .dump(2)
                << "\n";
        } else {
            out << render_runs(runs);
        }
        return exit_ok;
    });
}

int cmd_check(const std::string& original_path, const std::string& refined_path, const CommandOptions& opt,
              std::ostream& out, std::ostream& err)
{
    return guarded(err, original_path, [&] {
        auto a = load_architecture(original_path);
        auto b = load_architecture(refined_path);
        auto sa = build_system(a, opt.bounds);
        auto sb = build_system(b, opt.bounds);
        InclusionResult r;
        try {
            r = check_system_refinement(sa, sb, merged_bounds(a, b, opt.bounds));
        } catch (const ConsistencyError& e) {
            print_report(out, e.report(), opt.json, "check-refine");
            return exit_failure;
        }
        if (opt.json) {
            out << ordered_json{{"command", "check-refine"}, {"result", inclusion_value(r)}}.dump(2) << "\n";
        } else if (r.holds) {
            out << "refinement holds: " << refined_path << " refines " << original_path << " (" << r.nodes
                << " nodes)\n";
        } else {
            out << "refinement fails: " << refined_path << " does not refine " << original_path << "\n";
            if (r.counterexample)
                out << "  " << to_string(*r.counterexample) << "\n";
        }
        return r.holds ? exit_ok : exit_failure;
    });
}

int cmd_apply(const std::string& arch_path, const std::string& script_path, const CommandOptions& opt,
              std::ostream& out, std::ostream& err)
{
    return guarded(err, arch_path, [&] {
        auto arch = load_architecture(arch_path);
        ScriptDocument script;
        std::vector<RefinementStep> steps;
        try {
            script = parse_script(read_file(script_path));
            resolve_script(script, arch);
            steps = build_steps(script, arch, opt.bounds);
        } catch (const ParseError& e) {
            print_diagnostics(err, script_path, e);
            return exit_usage;
        }
        auto start = build_system(arch, opt.bounds);
        auto r = replay(start, steps, ReplayOptions{opt.verify});
        auto refined = render_architecture(document_of(r.final_system));
        if (opt.json) {
            auto v = replay_value(r);
            if (!opt.output && r.ok())
                v["architecture"] = refined;
            out << ordered_json{{"command", "apply-script"}, {"replay", std::move(v)}}.dump(2) << "\n";
        } else {
            print_replay(out, r, steps.size());
        }
        if (!r.ok())
            return exit_failure;
        if (opt.output) {
            std::ofstream f(*opt.output, std::ios::binary);
            if (!f)
                throw UsageError{"cannot write '" + *opt.output + "'"};
            f << refined;
        } else if (!opt.json) {
            out << refined;
        }
        return exit_ok;
    });
}

int cmd_case_study(const CommandOptions& opt, std::ostream& out, std::ostream& err)
{
    return guarded(err, "case-study", [&] {
        CaseStudyProfile p;
        p.horizon = opt.bounds.horizon.value_or(p.horizon);
        p.burst = opt.bounds.burst.value_or(p.burst);
        p.mutant_decoder = opt.mutant;
        auto steps = case_study_script(p);
        auto result = run_case_study(p, opt.verify);
        bool ok = result.ok();
        if (opt.json) {
            out << ordered_json{{"command", "case-study"},
                                {"horizon", p.horizon},
                                {"burst", p.burst},
                                {"mutant", p.mutant_decoder},
                                {"ok", ok},
                                {"replay", replay_value(result.replay)},
                                {"final_check", inclusion_value(result.final_check)}}
                       .dump(2)
                << "\n";
        } else {
            print_replay(out, result.replay, steps.size());
            if (result.final_check) {
                out << "final system refines the original: " << (result.final_check->holds ? "yes" : "no") << "\n";
                if (!result.final_check->holds && result.final_check->counterexample)
                    out << "  " << to_string(*result.final_check->counterexample) << "\n";
            }
        }
        return ok ? exit_ok : exit_failure;
    });
}

} // namespace flowrefine

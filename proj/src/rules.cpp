#include "flowrefine/rules.hpp"

#include <algorithm>
#include <array>
#include <set>

namespace flowrefine {

namespace {

constexpr std::array<std::pair<Rule, std::string_view>, 11> kRuleNames{{
    {Rule::refine_behavior, "refine-behavior"},
    {Rule::refine_with_invariant, "refine-with-invariant"},
    {Rule::add_output, "add-output"},
    {Rule::remove_output, "remove-output"},
    {Rule::add_input, "add-input"},
    {Rule::remove_input, "remove-input"},
    {Rule::add_component, "add-component"},
    {Rule::remove_component, "remove-component"},
    {Rule::expand, "expand"},
    {Rule::fold, "fold"},
    {Rule::rename, "rename"},
}};

std::string failures_text(const PremiseReport& r)
{
    std::string out;
    for (const auto& v : r.verdicts)
        if (!v.holds)
            out += (out.empty() ? "" : "; ") + v.id + ": " + v.detail;
    return out;
}

/// Opens a report with the consistency premise every rule shares.
PremiseReport open_report(const System& s, std::string subject)
{
    PremiseReport report;
    report.subject = std::move(subject);
    auto v = validate_system(s);
    if (v.ok())
        report.pass("consistent", "S satisfies conditions (1)-(5)");
    else
        report.fail("consistent", "S satisfies conditions (1)-(5)", failures_text(v));
    return report;
}

const Component* require_component(PremiseReport& report, const System& s, const std::string& name)
{
    const auto* c = s.find(name);
    if (c)
        report.pass("component-exists", "c ∈ C", name);
    else
        report.fail("component-exists", "c ∈ C", "no component named '" + name + "'");
    return c;
}

RuleResult rejected(const System& s, PremiseReport report)
{
    return RuleResult{s, std::move(report)};
}

void check_interface(PremiseReport& report, const Component& c, const IntervalTransducer& m)
{
    if (m.inputs() == c.in && m.outputs() == c.out)
        report.pass("same-interface", "β : in.c -> out.c");
    else
        report.fail("same-interface", "β : in.c -> out.c",
                    "replacement has " + to_string(m.inputs()) + " -> " + to_string(m.outputs()) + ", component has " +
                        to_string(c.in) + " -> " + to_string(c.out));
}

void check_well_formed(PremiseReport& report, const IntervalTransducer& m, const EnumerationBounds& bounds)
{
    auto v = validate_transducer(m, bounds);
    if (v.ok())
        report.pass("well-formed", "β has nonempty, in-bounds choice sets");
    else
        report.fail("well-formed", "β has nonempty, in-bounds choice sets", failures_text(v));
}

void check_alphabets(PremiseReport& report, const ChannelSet& channels, const EnumerationBounds& bounds)
{
    std::vector<ChannelId> missing;
    for (const auto& c : channels)
        if (!bounds.declares(c))
            missing.push_back(c);
    if (missing.empty())
        report.pass("alphabet-declared", "every affected channel has a declared alphabet");
    else
        report.fail("alphabet-declared", "every affected channel has a declared alphabet",
                    "no alphabet for " + to_string(ChannelSet(missing)));
}

std::string set_detail(const ChannelSet& bad)
{
    return "offending channels " + to_string(bad);
}

} // namespace

std::string rule_name(Rule r)
{
    for (const auto& [rule, name] : kRuleNames)
        if (rule == r)
            return std::string(name);
    return "?";
}

std::optional<Rule> parse_rule_name(std::string_view name)
{
    for (const auto& [rule, n] : kRuleNames)
        if (n == name)
            return rule;
    return std::nullopt;
}

bool is_architectural(Rule r)
{
    return r != Rule::refine_behavior && r != Rule::refine_with_invariant;
}

// ---------------------------------------------------------------------------
// Behavioral refinement

RuleResult refine_component_behavior(const System& s, const std::string& name, const IntervalTransducer& m)
{
    auto report = open_report(s, "refine-behavior " + name);
    const auto* c = require_component(report, s, name);
    if (!report.ok())
        return rejected(s, std::move(report));
    check_interface(report, *c, m);
    if (!report.ok())
        return rejected(s, std::move(report));
    check_well_formed(report, m, s.bounds());

    auto inc = refines_behavior(m, c->behav, s.bounds());
    const std::string stmt = "∀i: β(i) ⊆ behav.c(i)";
    if (inc.holds)
        report.pass("behavioral-inclusion", stmt);
    else
        report.fail("behavioral-inclusion", stmt, "the new behavior has an output the old one does not allow",
                    inc.counterexample);
    if (!report.ok())
        return rejected(s, std::move(report));
    return {with_component(s, name, make_component(name, c->in, c->out, m)), std::move(report)};
}

RuleResult refine_with_invariant(const System& s, const std::string& name, const IntervalTransducer& m,
                                 const InvariantPtr& psi)
{
    auto report = open_report(s, "refine-with-invariant " + name);
    const auto* c = require_component(report, s, name);
    if (!report.ok())
        return rejected(s, std::move(report));
    check_interface(report, *c, m);
    const auto domain = s.run_channels();
    if (psi->reads().is_subset_of(domain))
        report.pass("invariant-domain", "Ψ : (I ∪ out.C) -> B");
    else
        report.fail("invariant-domain", "Ψ : (I ∪ out.C) -> B",
                    set_detail(minus(psi->reads(), domain)) + " are not system channels");
    if (!report.ok())
        return rejected(s, std::move(report));
    check_well_formed(report, m, s.bounds());

    auto valid = check_invariant_valid(s, *psi);
    const std::string stmt1 = "∀l: (∀c ∈ C: l|out.c ∈ behav.c(l|in.c)) ⇒ Ψ(l)";
    if (valid.holds)
        report.pass("invariant-valid", stmt1, "every run satisfies " + psi->describe());
    else
        report.fail("invariant-valid", stmt1, "a run violates " + psi->describe(), valid.counterexample);

    auto env = check_environment_unrestricted(s, *psi);
    const std::string stmt_env = "Ψ does not restrict the inputs on I";
    if (env.holds)
        report.pass("invariant-environment", stmt_env);
    else
        report.fail("invariant-environment", stmt_env, "an environment input admits no satisfying extension",
                    env.counterexample);

    auto guard = invariant_guard(psi, c->in, s.bounds());
    auto inc = check_inclusion(m, c->behav, s.bounds(), guard.get());
    const std::string stmt2 = "∀l: Ψ(l) ⇒ β(l|in.c) ⊆ behav.c(l|in.c)";
    if (inc.holds)
        report.pass("inclusion-under-invariant", stmt2);
    else
        report.fail("inclusion-under-invariant", stmt2,
                    "for an input consistent with the invariant the new behavior has an output the old one does not "
                    "allow",
                    inc.counterexample);

    if (!report.ok())
        return rejected(s, std::move(report));
    return {with_component(s, name, make_component(name, c->in, c->out, m)), std::move(report)};
}

// ---------------------------------------------------------------------------
// Channels

RuleResult add_output_channel(const System& s, const std::string& name, const ChannelId& p)
{
    auto report = open_report(s, "add-output " + name + " " + p.str());
    const auto* c = require_component(report, s, name);
    if (!report.ok())
        return rejected(s, std::move(report));
    const auto used = unite(s.in(), s.out_c());
    if (!used.contains(p))
        report.pass("fresh-channel", "p ∈ ℂ \\ (I ∪ out.C)");
    else
        report.fail("fresh-channel", "p ∈ ℂ \\ (I ∪ out.C)",
                    "'" + p.str() + "' is already a system input or component output");
    check_alphabets(report, ChannelSet{p}, s.bounds());
    if (!report.ok())
        return rejected(s, std::move(report));
    auto m = with_free_output(c->behav, p, s.bounds());
    return {with_component(s, name, make_component(name, c->in, with(c->out, p), m)), std::move(report)};
}

RuleResult remove_output_channel(const System& s, const std::string& name, const ChannelId& p)
{
    auto report = open_report(s, "remove-output " + name + " " + p.str());
    const auto* c = require_component(report, s, name);
    if (!report.ok())
        return rejected(s, std::move(report));
    if (c->out.contains(p))
        report.pass("is-output", "p ∈ out.c");
    else
        report.fail("is-output", "p ∈ out.c", "'" + p.str() + "' is not an output of " + name);
    if (!s.out().contains(p) && !s.in_c().contains(p))
        report.pass("unused-channel", "p ∉ O ∪ in.C");
    else
        report.fail("unused-channel", "p ∉ O ∪ in.C",
                    "'" + p.str() + "' is a system output or read by a component");
    if (!report.ok())
        return rejected(s, std::move(report));
    auto out = without(c->out, p);
    auto m = adapt(c->behav, c->in, out);
    return {with_component(s, name, make_component(name, c->in, out, m)), std::move(report)};
}

RuleResult add_input_channel(const System& s, const std::string& name, const ChannelId& p)
{
    auto report = open_report(s, "add-input " + name + " " + p.str());
    const auto* c = require_component(report, s, name);
    if (!report.ok())
        return rejected(s, std::move(report));
    if (!c->in.contains(p))
        report.pass("new-input", "p ∉ in.c");
    else
        report.fail("new-input", "p ∉ in.c", "'" + p.str() + "' is already an input of " + name);
    if (unite(s.in(), s.out_c()).contains(p))
        report.pass("connected-channel", "p ∈ I ∪ out.C");
    else
        report.fail("connected-channel", "p ∈ I ∪ out.C",
                    "'" + p.str() + "' is neither a system input nor a component output");
    if (!report.ok())
        return rejected(s, std::move(report));
    auto in = with(c->in, p);
    auto m = adapt(c->behav, in, c->out);
    return {with_component(s, name, make_component(name, in, c->out, m)), std::move(report)};
}

RuleResult remove_input_channel(const System& s, const std::string& name, const ChannelId& p)
{
    auto report = open_report(s, "remove-input " + name + " " + p.str());
    const auto* c = require_component(report, s, name);
    if (!report.ok())
        return rejected(s, std::move(report));
    if (c->in.contains(p))
        report.pass("is-input", "p ∈ in.c");
    else
        report.fail("is-input", "p ∈ in.c", "'" + p.str() + "' is not an input of " + name);
    if (!report.ok())
        return rejected(s, std::move(report));

    auto reduced = without_input(c->behav, p);
    auto pinned = adapt(reduced, c->in, c->out);
    auto eq = equal_behavior(c->behav, pinned, s.bounds());
    const std::string stmt = "∀i, i': i|in.c\\{p} = i'|in.c\\{p} ⇒ behav.c(i) = behav.c(i')";
    if (eq.holds) {
        report.pass("independent-of-p", stmt);
    } else {
        auto cx = *eq.counterexample;
        const auto& x = cx.at("input");
        auto bindings = x.bindings();
        bindings.at(p) = TimedStream::silent(x.horizon());
        Counterexample w;
        w.description = "the output below is possible for exactly one of the two inputs, which differ only on " +
                        p.str();
        w.tuples.emplace_back("input", x);
        w.tuples.emplace_back("input'", NamedStreamTuple(x.horizon(), bindings));
        w.tuples.emplace_back("output", cx.at("output"));
        report.fail("independent-of-p", stmt, "the behavior depends on '" + p.str() + "'", std::move(w));
        return rejected(s, std::move(report));
    }
    auto in = without(c->in, p);
    return {with_component(s, name, make_component(name, in, c->out, reduced)), std::move(report)};
}

// ---------------------------------------------------------------------------
// Components

RuleResult add_component(const System& s, const std::string& name)
{
    auto report = open_report(s, "add-component " + name);
    if (!is_valid_token(name))
        report.fail("fresh-name", "∀c ∈ C: name.c ≠ n", "'" + name + "' is not a valid name");
    else if (s.find(name))
        report.fail("fresh-name", "∀c ∈ C: name.c ≠ n", "'" + name + "' is already used");
    else
        report.pass("fresh-name", "∀c ∈ C: name.c ≠ n");
    if (!report.ok())
        return rejected(s, std::move(report));
    auto comps = s.components();
    comps.push_back(make_component(name, {}, {}, silent({}, {})));
    return {s.with_components(std::move(comps)), std::move(report)};
}

RuleResult remove_component(const System& s, const std::string& name)
{
    auto report = open_report(s, "remove-component " + name);
    const auto* c = require_component(report, s, name);
    if (!report.ok())
        return rejected(s, std::move(report));
    if (c->out.empty())
        report.pass("no-outputs", "out.c = ∅");
    else
        report.fail("no-outputs", "out.c = ∅", name + " controls " + to_string(c->out));
    if (!report.ok())
        return rejected(s, std::move(report));
    auto comps = s.components();
    comps.erase(std::find_if(comps.begin(), comps.end(), [&](const Component& k) { return k.name == name; }));
    return {s.with_components(std::move(comps)), std::move(report)};
}

// ---------------------------------------------------------------------------
// Hierarchy

RuleResult expand_component(const System& s, const std::string& name, const System& t)
{
    auto report = open_report(s, "expand " + name);
    const auto* c = require_component(report, s, name);
    if (!report.ok())
        return rejected(s, std::move(report));

    auto tv = validate_system(t);
    if (tv.ok())
        report.pass("subsystem-consistent", "T satisfies conditions (1)-(5)");
    else
        report.fail("subsystem-consistent", "T satisfies conditions (1)-(5)", failures_text(tv));

    std::vector<std::string> clashes;
    for (const auto& k : t.components())
        if (s.find(k.name))
            clashes.push_back(k.name);
    if (clashes.empty())
        report.pass("disjoint-names", "names of C_T and C_S are disjoint");
    else {
        std::string d;
        for (const auto& n : clashes)
            d += (d.empty() ? "" : ", ") + n;
        report.fail("disjoint-names", "names of C_T and C_S are disjoint", "already used in S: " + d);
    }

    if (c->in == t.in() && c->out == t.out())
        report.pass("same-interface", "c = (n, I_T, O_T, ·)");
    else
        report.fail("same-interface", "c = (n, I_T, O_T, ·)",
                    "component has " + to_string(c->in) + " -> " + to_string(c->out) + ", subsystem has " +
                        to_string(t.in()) + " -> " + to_string(t.out()));

    const auto t_out = t.out_c();
    auto shared = intersect(t_out, s.out_c());
    if (shared == c->out)
        report.pass("outputs-disjoint", "out.C_T ∩ out.C_S = out.c");
    else
        report.fail("outputs-disjoint", "out.C_T ∩ out.C_S = out.c",
                    "out.C_T ∩ out.C_S is " + to_string(shared) + ", out.c is " + to_string(c->out));
    auto into_inputs = intersect(t_out, s.in());
    if (into_inputs.empty())
        report.pass("inputs-disjoint", "out.C_T ∩ I_S = ∅");
    else
        report.fail("inputs-disjoint", "out.C_T ∩ I_S = ∅", set_detail(into_inputs));

    check_alphabets(report, unite(t.in(), t_out), s.bounds());
    if (!report.ok())
        return rejected(s, std::move(report));

    auto eq = equal_behavior(c->behav, black_box(t.with_bounds(s.bounds())), s.bounds());
    if (eq.holds)
        report.pass("behavior-match", "behav.c = ⟦T⟧");
    else
        report.fail("behavior-match", "behav.c = ⟦T⟧", "the component and the subsystem behave differently",
                    eq.counterexample);
    if (!report.ok())
        return rejected(s, std::move(report));

    std::vector<Component> comps;
    for (const auto& k : s.components()) {
        if (k.name == name)
            comps.insert(comps.end(), t.components().begin(), t.components().end());
        else
            comps.push_back(k);
    }
    return {s.with_components(std::move(comps)), std::move(report)};
}

RuleResult fold_subsystem(const System& s, const std::vector<std::string>& members, const ChannelSet& in_t,
                          const ChannelSet& out_t, const std::string& name)
{
    std::string list;
    for (const auto& m : members)
        list += (list.empty() ? "" : ", ") + m;
    auto report = open_report(s, "fold " + name + " {" + list + "}");

    std::set<std::string> wanted(members.begin(), members.end());
    std::vector<std::string> missing;
    for (const auto& m : wanted)
        if (!s.find(m))
            missing.push_back(m);
    if (!wanted.empty() && missing.empty())
        report.pass("members-exist", "C_T ⊆ C");
    else
        report.fail("members-exist", "C_T ⊆ C",
                    wanted.empty() ? "C_T is empty" : "no component named '" + missing.front() + "'");
    if (!report.ok())
        return rejected(s, std::move(report));

    std::vector<Component> inside;
    std::vector<Component> outside;
    for (const auto& k : s.components())
        (wanted.contains(k.name) ? inside : outside).push_back(k);
    ChannelSet in_ct, out_ct, in_rest;
    for (const auto& k : inside) {
        in_ct = unite(in_ct, k.in);
        out_ct = unite(out_ct, k.out);
    }
    for (const auto& k : outside)
        in_rest = unite(in_rest, k.in);

    auto need_in = minus(in_ct, out_ct);
    if (need_in.is_subset_of(in_t))
        report.pass("inputs-cover", "in.C_T \\ out.C_T ⊆ I_T");
    else
        report.fail("inputs-cover", "in.C_T \\ out.C_T ⊆ I_T", set_detail(minus(need_in, in_t)) + " missing from I_T");
    auto allowed_in = minus(unite(s.in(), s.out_c()), out_t);
    if (in_t.is_subset_of(allowed_in))
        report.pass("inputs-available", "I_T ⊆ (I ∪ out.C) \\ O_T");
    else
        report.fail("inputs-available", "I_T ⊆ (I ∪ out.C) \\ O_T", set_detail(minus(in_t, allowed_in)));
    auto need_out = intersect(out_ct, unite(s.out(), in_rest));
    if (need_out.is_subset_of(out_t))
        report.pass("outputs-cover", "out.C_T ∩ (O ∪ in.(C \\ C_T)) ⊆ O_T");
    else
        report.fail("outputs-cover", "out.C_T ∩ (O ∪ in.(C \\ C_T)) ⊆ O_T",
                    set_detail(minus(need_out, out_t)) + " are used outside but missing from O_T");
    if (out_t.is_subset_of(out_ct))
        report.pass("outputs-within", "O_T ⊆ out.C_T");
    else
        report.fail("outputs-within", "O_T ⊆ out.C_T", set_detail(minus(out_t, out_ct)) + " not controlled in C_T");
    bool clash = std::any_of(outside.begin(), outside.end(), [&](const Component& k) { return k.name == name; });
    if (is_valid_token(name) && !clash)
        report.pass("fresh-name", "∀c ∈ C \\ C_T: name.c ≠ n");
    else
        report.fail("fresh-name", "∀c ∈ C \\ C_T: name.c ≠ n", "'" + name + "' is not available");
    if (!report.ok())
        return rejected(s, std::move(report));

    System t(in_t, out_t, inside, s.bounds());
    auto tv = validate_system(t);
    if (tv.ok())
        report.pass("subsystem-consistent", "T satisfies conditions (1)-(5)");
    else
        report.fail("subsystem-consistent", "T satisfies conditions (1)-(5)", failures_text(tv));
    if (!report.ok())
        return rejected(s, std::move(report));

    auto folded = as_component(t, name);
    std::vector<Component> comps;
    bool placed = false;
    for (const auto& k : s.components()) {
        if (!wanted.contains(k.name))
            comps.push_back(k);
        else if (!placed) {
            comps.push_back(folded);
            placed = true;
        }
    }
    return {s.with_components(std::move(comps)), std::move(report)};
}

RuleResult rename_channel(const System& s, const ChannelId& from, const ChannelId& to)
{
    auto report = open_report(s, "rename " + from.str() + " " + to.str());
    const auto used = unite(unite(s.in(), s.out()), unite(s.in_c(), s.out_c()));
    if (unite(s.in_c(), s.out_c()).contains(from))
        report.pass("channel-in-use", "old ∈ in.C ∪ out.C");
    else
        report.fail("channel-in-use", "old ∈ in.C ∪ out.C", "'" + from.str() + "' is not used by any component");
    if (!s.in().contains(from) && !s.out().contains(from))
        report.pass("internal-channel", "old ∉ I ∪ O");
    else
        report.fail("internal-channel", "old ∉ I ∪ O", "'" + from.str() + "' is on the system interface");
    if (!used.contains(to))
        report.pass("fresh-channel", "new unused in S");
    else
        report.fail("fresh-channel", "new unused in S", "'" + to.str() + "' is already used");
    check_alphabets(report, ChannelSet{from}, s.bounds());
    if (!report.ok())
        return rejected(s, std::move(report));

    auto swap = [&](const ChannelSet& set) { return set.contains(from) ? with(without(set, from), to) : set; };
    std::vector<Component> comps;
    for (const auto& k : s.components()) {
        if (k.in.contains(from) || k.out.contains(from))
            comps.push_back(make_component(k.name, swap(k.in), swap(k.out), rename(k.behav, from, to)));
        else
            comps.push_back(k);
    }
    auto bounds = s.bounds().with_alphabet(to, s.bounds().alphabet(from));
    return {System(s.in(), s.out(), std::move(comps), bounds), std::move(report)};
}

// ---------------------------------------------------------------------------
// Semantic checks

InclusionResult check_system_refinement(const System& original, const System& refined, const EnumerationBounds& bounds)
{
    if (original.in() != refined.in() || original.out() != refined.out())
        throw InterfaceError("system interfaces differ: " + to_string(original.in()) + " -> " +
                             to_string(original.out()) + " vs " + to_string(refined.in()) + " -> " +
                             to_string(refined.out()));
    return check_inclusion(black_box(refined), black_box(original), bounds);
}

InclusionResult check_system_equality(const System& a, const System& b, const EnumerationBounds& bounds)
{
    if (a.in() != b.in() || a.out() != b.out())
        throw InterfaceError("system interfaces differ");
    return equal_behavior(black_box(a), black_box(b), bounds);
}

// ---------------------------------------------------------------------------
// Steps and replay

std::string RefinementStep::summary() const
{
    std::string s = rule_name(rule);
    switch (rule) {
    case Rule::refine_behavior:
    case Rule::refine_with_invariant:
        s += " " + component;
        if (machine)
            s += " " + machine->describe();
        if (invariant)
            s += " invariant " + invariant->describe();
        break;
    case Rule::add_output:
    case Rule::remove_output:
    case Rule::add_input:
    case Rule::remove_input:
        s += " " + component + " " + (channel ? channel->str() : "?");
        break;
    case Rule::add_component:
    case Rule::remove_component:
    case Rule::expand:
        s += " " + component;
        break;
    case Rule::fold: {
        std::string list;
        for (const auto& m : members)
            list += (list.empty() ? "" : ", ") + m;
        s += " " + component + " {" + list + "} in " + to_string(in) + " out " + to_string(out);
        break;
    }
    case Rule::rename:
        s += " " + (channel ? channel->str() : "?") + " " + (new_channel ? new_channel->str() : "?");
        break;
    }
    return s;
}

RuleResult apply_step(const System& s, const RefinementStep& step)
{
    auto missing = [&](const std::string& what) {
        PremiseReport r;
        r.subject = step.summary();
        r.fail("parameters", "the step names every parameter its rule needs", "missing " + what);
        return RuleResult{s, std::move(r)};
    };
    switch (step.rule) {
    case Rule::refine_behavior:
        if (!step.machine)
            return missing("machine");
        return refine_component_behavior(s, step.component, *step.machine);
    case Rule::refine_with_invariant:
        if (!step.machine)
            return missing("machine");
        return refine_with_invariant(s, step.component, *step.machine,
                                     step.invariant ? step.invariant : true_invariant());
    case Rule::add_output:
        if (!step.channel)
            return missing("channel");
        return add_output_channel(s, step.component, *step.channel);
    case Rule::remove_output:
        if (!step.channel)
            return missing("channel");
        return remove_output_channel(s, step.component, *step.channel);
    case Rule::add_input:
        if (!step.channel)
            return missing("channel");
        return add_input_channel(s, step.component, *step.channel);
    case Rule::remove_input:
        if (!step.channel)
            return missing("channel");
        return remove_input_channel(s, step.component, *step.channel);
    case Rule::add_component:
        return add_component(s, step.component);
    case Rule::remove_component:
        return remove_component(s, step.component);
    case Rule::expand:
        if (!step.subsystem)
            return missing("subsystem");
        return expand_component(s, step.component, *step.subsystem);
    case Rule::fold:
        return fold_subsystem(s, step.members, step.in, step.out, step.component);
    case Rule::rename:
        if (!step.channel || !step.new_channel)
            return missing("channel names");
        return rename_channel(s, *step.channel, *step.new_channel);
    }
    return missing("rule");
}

ReplayResult replay(const System& start, const std::vector<RefinementStep>& steps, ReplayOptions options)
{
    ReplayResult result{start, {}, std::nullopt};
    for (std::size_t i = 0; i < steps.size(); ++i) {
        const auto& step = steps[i];
        auto applied = apply_step(result.final_system, step);
        StepOutcome outcome{step, applied.report, std::nullopt, std::nullopt};
        bool ok = applied.applied();
        if (ok && options.verify) {
            const auto& bounds = result.final_system.bounds();
            outcome.refinement = check_system_refinement(result.final_system, applied.system, bounds);
            ok = outcome.refinement->holds;
            if (ok && is_architectural(step.rule)) {
                outcome.equality = check_system_equality(result.final_system, applied.system, bounds);
                ok = outcome.equality->holds;
            }
        }
        result.steps.push_back(std::move(outcome));
        if (!ok) {
            result.failed_step = i;
            return result;
        }
        result.final_system = std::move(applied.system);
    }
    return result;
}

} // namespace flowrefine

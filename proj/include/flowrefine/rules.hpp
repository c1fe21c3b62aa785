#pragma once

// Premise-checked refinement rules S ~> S', scripts of rule applications,
// and the bounded refinement check on systems.

#include <optional>
#include <string>
#include <vector>

#include "flowrefine/invariant.hpp"

namespace flowrefine {

enum class Rule {
    refine_behavior,
    refine_with_invariant,
    add_output,
    remove_output,
    add_input,
    remove_input,
    add_component,
    remove_component,
    expand,
    fold,
    rename,
};

/// Script keyword of a rule, e.g. "add-output".
std::string rule_name(Rule r);
std::optional<Rule> parse_rule_name(std::string_view name);
/// Rules that must leave the black box unchanged.
bool is_architectural(Rule r);

struct RuleResult {
    System system;
    PremiseReport report;

    bool applied() const noexcept { return report.ok(); }
};

RuleResult refine_component_behavior(const System& s, const std::string& name, const IntervalTransducer& m);
RuleResult refine_with_invariant(const System& s, const std::string& name, const IntervalTransducer& m,
                                 const InvariantPtr& psi);
RuleResult add_output_channel(const System& s, const std::string& name, const ChannelId& p);
RuleResult remove_output_channel(const System& s, const std::string& name, const ChannelId& p);
RuleResult add_input_channel(const System& s, const std::string& name, const ChannelId& p);
RuleResult remove_input_channel(const System& s, const std::string& name, const ChannelId& p);
RuleResult add_component(const System& s, const std::string& name);
RuleResult remove_component(const System& s, const std::string& name);
/// Replaces component `name` by the components of `t`.
RuleResult expand_component(const System& s, const std::string& name, const System& t);
/// Replaces `members` by one component `name` with interface (in_t, out_t).
RuleResult fold_subsystem(const System& s, const std::vector<std::string>& members, const ChannelSet& in_t,
                          const ChannelSet& out_t, const std::string& name);
/// Renames an internal channel everywhere.
RuleResult rename_channel(const System& s, const ChannelId& from, const ChannelId& to);

/// Bounded ⟦refined⟧ ⊆ ⟦original⟧. Throws InterfaceError on differing
/// system interfaces and ConsistencyError on inconsistent systems.
InclusionResult check_system_refinement(const System& original, const System& refined, const EnumerationBounds& bounds);
/// Bounded ⟦a⟧ = ⟦b⟧.
InclusionResult check_system_equality(const System& a, const System& b, const EnumerationBounds& bounds);

/// One rule application with its parameters. Which fields are used depends
/// on the rule.
struct RefinementStep {
    Rule rule = Rule::add_component;
    /// Grouping label; several applications may share one.
    int stage = 0;
    std::string component;               // target, new name for add/fold
    std::optional<ChannelId> channel;    // p, or old name for rename
    std::optional<ChannelId> new_channel;
    std::optional<IntervalTransducer> machine;
    InvariantPtr invariant;
    std::vector<std::string> members;    // fold
    ChannelSet in;                       // fold
    ChannelSet out;                      // fold
    std::optional<System> subsystem;     // expand

    /// One-line summary, e.g. "add-output ENC D".
    std::string summary() const;
};

RuleResult apply_step(const System& s, const RefinementStep& step);

struct StepOutcome {
    RefinementStep step;
    PremiseReport report;
    /// Set when replay verifies the step semantically.
    std::optional<InclusionResult> refinement;
    std::optional<InclusionResult> equality;
};

struct ReplayOptions {
    /// Re-check every accepted step with check_system_refinement, and with
    /// bounded equality for architectural rules.
    bool verify = false;
};

struct ReplayResult {
    System final_system;
    std::vector<StepOutcome> steps;
    /// Index of the first step whose premises or verification failed.
    std::optional<std::size_t> failed_step;

    bool ok() const noexcept { return !failed_step; }
};

ReplayResult replay(const System& start, const std::vector<RefinementStep>& steps, ReplayOptions options = {});

} // namespace flowrefine

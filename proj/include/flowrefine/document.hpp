#pragma once

// Text formats: architecture documents, refinement scripts and environment
// inputs. The grammar is described in README.md.

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "flowrefine/rules.hpp"

namespace flowrefine {

/// Behavior or invariant expression: an atom, a call, or a set of atoms.
struct Expr {
    enum class Kind { atom, call, set };

    Kind kind = Kind::atom;
    std::string text;           // atom text or callee name
    std::vector<Expr> args;     // call arguments or set members
    std::size_t line = 0;
    std::size_t column = 0;

    /// Structural equality; positions are ignored.
    friend bool operator==(const Expr& a, const Expr& b)
    {
        return a.kind == b.kind && a.text == b.text && a.args == b.args;
    }
};

std::string to_string(const Expr& e);
/// Throws ParseError.
Expr parse_expression(std::string_view text);

struct ComponentDecl {
    std::string name;
    ChannelSet in;
    ChannelSet out;
    Expr behavior;
    std::size_t line = 0;

    friend bool operator==(const ComponentDecl& a, const ComponentDecl& b)
    {
        return a.name == b.name && a.in == b.in && a.out == b.out && a.behavior == b.behavior;
    }
};

struct ArchitectureDocument {
    std::size_t horizon = 4;
    std::size_t burst = 1;
    std::map<ChannelId, std::vector<Message>> alphabets;
    std::vector<TableSpec> machines;
    std::vector<ComponentDecl> components;
    ChannelSet system_in;
    ChannelSet system_out;

    friend bool operator==(const ArchitectureDocument&, const ArchitectureDocument&) = default;
};

/// Parses and resolves every reference; throws ParseError listing all
/// problems found.
ArchitectureDocument parse_architecture(std::string_view text);
std::string render_architecture(const ArchitectureDocument& doc);

/// Horizon/burst overrides from the command line.
struct BoundsOverride {
    std::optional<std::size_t> horizon;
    std::optional<std::size_t> burst;
};

EnumerationBounds bounds_of(const ArchitectureDocument& doc, const BoundsOverride& override = {});

/// Names and bounds visible to expressions.
struct BuildContext {
    EnumerationBounds bounds;
    std::map<std::string, TableSpec> machines;
};

BuildContext context_of(const ArchitectureDocument& doc, const BoundsOverride& override = {});
/// Throws Error subclasses on unknown names or bad arguments.
IntervalTransducer build_machine(const Expr& e, const BuildContext& ctx);
InvariantPtr build_invariant(const Expr& e, const BuildContext& ctx);

System build_system(const ArchitectureDocument& doc, const BoundsOverride& override = {});
/// Document that builds `s` again. Table machines are included, other
/// machines are written as expressions.
ArchitectureDocument document_of(const System& s);

struct ScriptStep {
    int stage = 0;
    Rule rule = Rule::add_component;
    std::string component;
    std::optional<ChannelId> channel;
    std::optional<ChannelId> new_channel;
    std::optional<Expr> machine;
    std::optional<Expr> invariant;
    std::vector<std::string> members;
    ChannelSet in;
    ChannelSet out;
    /// expand: the subsystem's components and interface.
    std::vector<ComponentDecl> sub_components;
    ChannelSet sub_in;
    ChannelSet sub_out;
    std::size_t line = 0;

    friend bool operator==(const ScriptStep& a, const ScriptStep& b)
    {
        return a.stage == b.stage && a.rule == b.rule && a.component == b.component && a.channel == b.channel &&
               a.new_channel == b.new_channel && a.machine == b.machine && a.invariant == b.invariant &&
               a.members == b.members && a.in == b.in && a.out == b.out && a.sub_components == b.sub_components &&
               a.sub_in == b.sub_in && a.sub_out == b.sub_out;
    }
};

struct ScriptDocument {
    std::vector<TableSpec> machines;
    std::vector<ScriptStep> steps;

    /// Distinct stage numbers in order of appearance.
    std::vector<int> stages() const;

    friend bool operator==(const ScriptDocument&, const ScriptDocument&) = default;
};

/// Syntax only; throws ParseError.
ScriptDocument parse_script(std::string_view text);
std::string render_script(const ScriptDocument& doc);
/// Checks that every component a step names exists at that point when the
/// script runs on `arch`; throws ParseError listing unresolved names.
void resolve_script(const ScriptDocument& script, const ArchitectureDocument& arch);
/// Builds executable steps against the architecture's names and bounds.
std::vector<RefinementStep> build_steps(const ScriptDocument& script, const ArchitectureDocument& arch,
                                        const BoundsOverride& override = {});
/// Script form of executable steps.
ScriptDocument script_of(const std::vector<RefinementStep>& steps);

/// `stream CH <..> <..>` lines; channels of `in` not mentioned are silent,
/// streams are padded with empty intervals or cut to `horizon`. Throws
/// ParseError on syntax errors or channels outside `in`.
NamedStreamTuple parse_environment(std::string_view text, const ChannelSet& in, std::size_t horizon);
std::string render_environment(const NamedStreamTuple& env);

} // namespace flowrefine

#pragma once

// Invariants over system runs, given as monitor automata that read a fixed
// set of channels one step at a time.

#include <memory>
#include <optional>
#include <string>

#include "flowrefine/system.hpp"

namespace flowrefine {

class Invariant {
public:
    virtual ~Invariant() = default;

    /// Channels the predicate looks at.
    virtual ChannelSet reads() const = 0;
    virtual std::string initial() const = 0;
    /// Next monitor state after one step (slice aligned with reads()), or
    /// nullopt if no tuple with this prefix satisfies the predicate.
    virtual std::optional<std::string> step(const std::string& state, const Slice& letter) const = 0;
    /// Whether a tuple ending in `state` at the horizon satisfies the predicate.
    virtual bool accepts(const std::string&) const { return true; }
    /// Expression in the architecture format.
    virtual std::string describe() const = 0;
};

using InvariantPtr = std::shared_ptr<const Invariant>;

/// Ψ(l) = True.
InvariantPtr true_invariant();
/// Channel `c` never carries a message.
InvariantPtr silent_invariant(const ChannelId& c);

/// Evaluates Ψ on a complete tuple binding at least reads().
bool holds(const Invariant& psi, const NamedStreamTuple& l);

struct InvariantCheck {
    bool holds = true;
    std::optional<Counterexample> counterexample;
};

/// Ψ holds on every run of `s` for every in-bounds environment input.
InvariantCheck check_invariant_valid(const System& s, const Invariant& psi);

/// Every in-bounds environment input extends to some tuple over
/// in.S ∪ out.C that satisfies Ψ.
InvariantCheck check_environment_unrestricted(const System& s, const Invariant& psi);

/// Admits an input prefix over `inputs` iff it is the restriction of some
/// in-bounds tuple, over `inputs` and the channels Ψ reads, that satisfies Ψ.
std::unique_ptr<StepGuard> invariant_guard(InvariantPtr psi, const ChannelSet& inputs, const EnumerationBounds& bounds);

} // namespace flowrefine

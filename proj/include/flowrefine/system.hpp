#pragma once

// Components, systems, consistency and black-box semantics.

#include <string>
#include <vector>

#include "flowrefine/behaviors.hpp"

namespace flowrefine {

struct Component {
    std::string name;
    ChannelSet in;
    ChannelSet out;
    IntervalTransducer behav;
};

/// Throws DomainError on a bad name and InterfaceError if the machine's
/// interface differs from (in, out).
Component make_component(std::string name, ChannelSet in, ChannelSet out, IntervalTransducer behav);
/// Interface taken from the machine.
Component make_component(std::string name, IntervalTransducer behav);

class System {
public:
    System(ChannelSet in, ChannelSet out, std::vector<Component> components, EnumerationBounds bounds);

    const ChannelSet& in() const noexcept { return in_; }
    const ChannelSet& out() const noexcept { return out_; }
    const std::vector<Component>& components() const noexcept { return components_; }
    const EnumerationBounds& bounds() const noexcept { return bounds_; }

    /// Union of the component input (output) interfaces.
    ChannelSet in_c() const;
    ChannelSet out_c() const;
    /// in.S ∪ out.C, the domain of system runs.
    ChannelSet run_channels() const;

    /// nullptr if absent.
    const Component* find(const std::string& name) const noexcept;
    /// Throws LookupError if absent.
    const Component& component(const std::string& name) const;
    /// Component controlling channel `c`, or nullptr.
    const Component* writer(const ChannelId& c) const noexcept;

    System with_components(std::vector<Component> components) const;
    System with_bounds(EnumerationBounds bounds) const;

private:
    ChannelSet in_;
    ChannelSet out_;
    std::vector<Component> components_;
    EnumerationBounds bounds_;
};

/// Structural replacement of the component named `name`; no premise checks.
/// Throws LookupError if absent.
System with_component(const System& s, const std::string& name, Component replacement);

/// Lists each violated consistency condition ("condition-1" .. "condition-5")
/// with the offending components and channels. Empty iff consistent.
PremiseReport validate_system(const System& s);

class ConsistencyError : public Error {
public:
    explicit ConsistencyError(PremiseReport report);
    const PremiseReport& report() const noexcept { return report_; }

private:
    PremiseReport report_;
};

/// adapt(compose(behaviors), in.S, out.S). Throws ConsistencyError.
IntervalTransducer black_box(const System& s);

/// adapt(compose(behaviors), in.S, out.C): every run channel visible.
IntervalTransducer run_machine(const System& s);

/// Every witness tuple l over in.S ∪ out.C with l restricted to in.S = env,
/// in canonical order.
std::vector<NamedStreamTuple> system_runs(const System& s, const NamedStreamTuple& env);

/// (name, in.S, out.S, black_box(S)).
Component as_component(const System& s, const std::string& name);

} // namespace flowrefine

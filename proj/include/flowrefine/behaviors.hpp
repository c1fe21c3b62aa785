#pragma once

// Bounded semantics of interval transducers: output sets, well-formedness,
// and refinement as bounded language inclusion.

#include <cstdint>
#include <map>
#include <optional>
#include <set>

#include "flowrefine/report.hpp"
#include "flowrefine/transducer.hpp"

namespace flowrefine {

using OutputSet = std::set<NamedStreamTuple>;
/// Input tuple -> set of output tuples, over every in-bounds input.
using BoundedBehavior = std::map<NamedStreamTuple, OutputSet>;

/// Slices of `t` step by step, aligned with `channels`.
std::vector<Slice> to_slices(const NamedStreamTuple& t, const ChannelSet& channels);
NamedStreamTuple to_tuple(const std::vector<Slice>& steps, const ChannelSet& channels);

/// All outputs producible by runs of `m` on `x`. `x` must be in bounds,
/// bind exactly the inputs of `m` and have the bounds' horizon.
OutputSet behavior_of(const IntervalTransducer& m, const NamedStreamTuple& x, const EnumerationBounds& bounds);

/// Membership test o ∈ behavior_of(m, x), without enumerating the set.
bool produces(const IntervalTransducer& m, const NamedStreamTuple& x, const NamedStreamTuple& o);

BoundedBehavior bounded_behavior(const IntervalTransducer& m, const EnumerationBounds& bounds);

/// Nonempty choice sets, burst and alphabet conformance on every state
/// reachable within the horizon.
PremiseReport validate_transducer(const IntervalTransducer& m, const EnumerationBounds& bounds);

/// Restricts which input prefixes an inclusion check considers. States are
/// opaque ids; step returns nullopt when the extended prefix cannot be
/// completed to an admissible input.
class StepGuard {
public:
    virtual ~StepGuard() = default;
    virtual std::uint32_t initial() const = 0;
    /// `input` is aligned with the checked machines' inputs.
    virtual std::optional<std::uint32_t> step(std::uint32_t state, std::size_t depth, const Slice& input) const = 0;
};

struct InclusionResult {
    bool holds = true;
    std::optional<Counterexample> counterexample;
    /// Search nodes explored.
    std::size_t nodes = 0;
};

/// Checks behavior_of(impl, x) ⊆ behavior_of(spec, x) for every in-bounds
/// x admitted by `guard`. The counterexample is the least failing (x, o)
/// when runs are compared step by step, input slice before output slice.
InclusionResult check_inclusion(const IntervalTransducer& impl, const IntervalTransducer& spec,
                                const EnumerationBounds& bounds, const StepGuard* guard = nullptr);

/// Bounded behavioral refinement: `m2` refines `m1`. Throws InterfaceError
/// unless both have the same interface.
InclusionResult refines_behavior(const IntervalTransducer& m2, const IntervalTransducer& m1,
                                 const EnumerationBounds& bounds);

/// Mutual refinement.
InclusionResult equal_behavior(const IntervalTransducer& a, const IntervalTransducer& b,
                               const EnumerationBounds& bounds);

} // namespace flowrefine

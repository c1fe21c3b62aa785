#pragma once

// Nondeterministic interval transducers.
//
// A transducer realizes a behavior I⃗ → P(O⃗) as an emit-then-advance machine:
// in every time step the current state offers a nonempty set of output
// slices; one is chosen and emitted, then the machine consumes the input slice
// of the same step and moves to one of a nonempty set of successor states.
// Output at step i therefore depends only on input strictly before i, which
// makes every transducer time guarded by construction.
//
// Slices are per-step assignments of intervals to a sorted channel set.
// Intervals are interned process-wide so that slices are cheap to hash and
// compare for equality; canonical ordering always compares interval values.

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "flowrefine/streams.hpp"

namespace flowrefine {

using StateId = std::uint32_t;
using IntervalId = std::uint32_t;

/// Per-step assignment of (interned) intervals to a sorted channel set.
using Slice = std::vector<IntervalId>;

IntervalId intern(const Interval& interval);
const Interval& interval_of(IntervalId id);
inline IntervalId empty_interval() { return 0; }

/// Canonical value order on intervals and slices.
bool interval_less(IntervalId a, IntervalId b);
bool slice_less(const Slice& a, const Slice& b);

struct SliceHash {
    std::size_t operator()(const Slice& s) const noexcept;
};

struct StateSetHash {
    std::size_t operator()(const std::vector<StateId>& s) const noexcept;
};

std::string to_string(const Slice& slice, const ChannelSet& channels);

/// Every in-bounds slice over `channels`, in canonical order.
std::vector<Slice> all_slices(const ChannelSet& channels, const EnumerationBounds& bounds);

class TransducerImpl {
public:
    TransducerImpl(ChannelSet inputs, ChannelSet outputs)
        : inputs_(std::move(inputs)), outputs_(std::move(outputs))
    {
    }
    virtual ~TransducerImpl() = default;

    const ChannelSet& inputs() const noexcept { return inputs_; }
    const ChannelSet& outputs() const noexcept { return outputs_; }

    virtual StateId initial() const = 0;
    /// Output choices of `s`, sorted canonically and duplicate free.
    virtual const std::vector<Slice>& emit(StateId s) const = 0;
    /// Successors after emitting choice `choice` of `s` and reading `input`
    /// (aligned with inputs()). Sorted, duplicate free.
    virtual const std::vector<StateId>& advance(StateId s, std::size_t choice, const Slice& input) const = 0;
    /// Expression that reconstructs this machine in the architecture format.
    virtual std::string describe() const = 0;
    virtual std::string state_label(StateId s) const { return std::to_string(s); }

private:
    ChannelSet inputs_;
    ChannelSet outputs_;
};

/// Immutable, shareable handle to a transducer.
class IntervalTransducer {
public:
    explicit IntervalTransducer(std::shared_ptr<const TransducerImpl> impl);

    const ChannelSet& inputs() const noexcept { return impl_->inputs(); }
    const ChannelSet& outputs() const noexcept { return impl_->outputs(); }
    StateId initial() const { return impl_->initial(); }
    const std::vector<Slice>& emit(StateId s) const { return impl_->emit(s); }
    const std::vector<StateId>& advance(StateId s, std::size_t choice, const Slice& input) const
    {
        return impl_->advance(s, choice, input);
    }
    std::string describe() const { return impl_->describe(); }
    std::string state_label(StateId s) const { return impl_->state_label(s); }

    /// Index of `out` in emit(s), or npos.
    std::size_t find_choice(StateId s, const Slice& out) const;

    const TransducerImpl& impl() const noexcept { return *impl_; }
    bool same_as(const IntervalTransducer& other) const noexcept { return impl_ == other.impl_; }

    static constexpr std::size_t npos = static_cast<std::size_t>(-1);

private:
    std::shared_ptr<const TransducerImpl> impl_;
};

/// Explicit state table, as written in architecture documents.
///
/// Advance rules are matched in order; the first rule whose state, emitted
/// pattern and read pattern match determines the successor set. A pattern
/// entry without a value is a wildcard.
struct TableSpec {
    struct Pattern {
        std::vector<std::pair<ChannelId, Interval>> fixed;
        friend bool operator==(const Pattern&, const Pattern&) = default;
    };
    struct Rule {
        std::string from;
        Pattern emitted;
        Pattern read;
        std::vector<std::string> targets;
        friend bool operator==(const Rule&, const Rule&) = default;
    };

    std::string name;
    ChannelSet inputs;
    ChannelSet outputs;
    std::vector<std::string> states;
    std::string initial;
    /// (state, full output assignment) in declaration order.
    std::vector<std::pair<std::string, std::map<ChannelId, Interval>>> emits;
    std::vector<Rule> rules;

    friend bool operator==(const TableSpec&, const TableSpec&) = default;
};

/// Throws DomainError on unknown states/channels or interface mismatches.
IntervalTransducer make_table(TableSpec spec);
/// The spec behind a table machine, or nullptr for other machines.
const TableSpec* table_spec(const IntervalTransducer& m);
/// Every table machine reachable through wrappers of `m`, first use first.
std::vector<TableSpec> tables_used(const IntervalTransducer& m);

/// Maximally nondeterministic machine: every in-bounds output slice, any time.
IntervalTransducer chaos(const ChannelSet& inputs, const ChannelSet& outputs, const EnumerationBounds& bounds);
/// Deterministic machine that never emits anything.
IntervalTransducer silent(const ChannelSet& inputs, const ChannelSet& outputs);
/// Emits at step i what it read on `from` at step i-1.
IntervalTransducer delay_copy(const ChannelId& from, const ChannelId& to);

/// Interface adaption: extra inputs ignored, outputs outside `outputs` hidden.
IntervalTransducer adapt(const IntervalTransducer& m, const ChannelSet& inputs, const ChannelSet& outputs);
/// Parallel composition with implicit feedback over shared channel names.
IntervalTransducer compose(const std::vector<IntervalTransducer>& parts);
/// `m` in parallel with an unconstrained output channel `p`.
IntervalTransducer with_free_output(const IntervalTransducer& m, const ChannelId& p, const EnumerationBounds& bounds);
/// `m` with input `p` removed; `m` sees an empty interval on `p` every step.
IntervalTransducer without_input(const IntervalTransducer& m, const ChannelId& p);
/// `m` with channel `from` renamed to `to` on both sides of its interface.
IntervalTransducer rename(const IntervalTransducer& m, const ChannelId& from, const ChannelId& to);

} // namespace flowrefine

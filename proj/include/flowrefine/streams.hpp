#pragma once

// Finite-horizon timed streams and named stream tuples.
//
// A timed stream is a sequence of intervals, each holding the finite message
// sequence transmitted in that time slot. Infinite histories are represented
// by their prefix up to a horizon; every semantic statement in the library is
// "up to the horizon".

#include <compare>
#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "flowrefine/errors.hpp"

namespace flowrefine {

using Message = std::string;
using Interval = std::vector<Message>;

/// True if `token` may be used as a channel, component or message name.
bool is_valid_token(std::string_view token) noexcept;

class ChannelId {
public:
    explicit ChannelId(std::string name);
    ChannelId(const char* name) : ChannelId(std::string(name)) {}

    const std::string& str() const noexcept { return name_; }

    friend bool operator==(const ChannelId&, const ChannelId&) = default;
    friend std::strong_ordering operator<=>(const ChannelId& a, const ChannelId& b) {
        return a.name_ <=> b.name_;
    }

private:
    std::string name_;
};

/// Sorted, duplicate-free set of channel identifiers.
class ChannelSet {
public:
    ChannelSet() = default;
    ChannelSet(std::initializer_list<ChannelId> ids);
    explicit ChannelSet(std::vector<ChannelId> ids);

    bool contains(const ChannelId& c) const noexcept;
    /// Position of `c` in sorted order; throws LookupError if absent.
    std::size_t index_of(const ChannelId& c) const;
    std::size_t size() const noexcept { return ids_.size(); }
    bool empty() const noexcept { return ids_.empty(); }
    const ChannelId& operator[](std::size_t i) const { return ids_[i]; }
    auto begin() const noexcept { return ids_.begin(); }
    auto end() const noexcept { return ids_.end(); }
    const std::vector<ChannelId>& ids() const noexcept { return ids_; }

    bool is_subset_of(const ChannelSet& other) const;
    bool intersects(const ChannelSet& other) const;

    friend bool operator==(const ChannelSet&, const ChannelSet&) = default;
    friend bool operator<(const ChannelSet& a, const ChannelSet& b) { return a.ids_ < b.ids_; }

private:
    std::vector<ChannelId> ids_;
};

ChannelSet unite(const ChannelSet& a, const ChannelSet& b);
ChannelSet intersect(const ChannelSet& a, const ChannelSet& b);
ChannelSet minus(const ChannelSet& a, const ChannelSet& b);
ChannelSet with(const ChannelSet& a, const ChannelId& c);
ChannelSet without(const ChannelSet& a, const ChannelId& c);
std::string to_string(const ChannelSet& set);

class TimedStream {
public:
    TimedStream() = default;
    explicit TimedStream(std::vector<Interval> intervals) : intervals_(std::move(intervals)) {}
    /// A stream of `horizon` empty intervals.
    static TimedStream silent(std::size_t horizon);

    std::size_t horizon() const noexcept { return intervals_.size(); }
    const Interval& operator[](std::size_t i) const { return intervals_[i]; }
    const std::vector<Interval>& intervals() const noexcept { return intervals_; }

    friend bool operator==(const TimedStream&, const TimedStream&) = default;
    friend bool operator<(const TimedStream& a, const TimedStream& b) {
        return a.intervals_ < b.intervals_;
    }

private:
    std::vector<Interval> intervals_;
};

/// First `i` intervals of `x`. Throws RangeError unless 0 <= i <= horizon(x).
TimedStream prefix(const TimedStream& x, std::size_t i);

/// Concatenation of all intervals, ignoring interval boundaries.
std::vector<Message> flatten(const TimedStream& x);

/// Splits a nonempty message sequence into its first element and the rest.
std::pair<Message, std::vector<Message>> head_rest(std::span<const Message> s);

/// Assignment of timed streams of one common horizon to a set of channels.
class NamedStreamTuple {
public:
    explicit NamedStreamTuple(std::size_t horizon = 0) : horizon_(horizon) {}
    /// Throws BoundsError if the streams disagree on their horizon or
    /// disagree with `horizon`.
    NamedStreamTuple(std::size_t horizon, std::map<ChannelId, TimedStream> bindings);

    std::size_t horizon() const noexcept { return horizon_; }
    ChannelSet domain() const;
    bool contains(const ChannelId& c) const noexcept { return bindings_.contains(c); }
    /// Throws LookupError if `c` is not bound.
    const TimedStream& at(const ChannelId& c) const;
    const std::map<ChannelId, TimedStream>& bindings() const noexcept { return bindings_; }

    friend bool operator==(const NamedStreamTuple&, const NamedStreamTuple&) = default;
    friend bool operator<(const NamedStreamTuple& a, const NamedStreamTuple& b) {
        if (a.horizon_ != b.horizon_)
            return a.horizon_ < b.horizon_;
        return a.bindings_ < b.bindings_;
    }

private:
    std::size_t horizon_;
    std::map<ChannelId, TimedStream> bindings_;
};

/// Restriction to `channels`; throws DomainError unless channels ⊆ domain(t).
NamedStreamTuple restrict(const NamedStreamTuple& t, const ChannelSet& channels);

/// Union of two tuples over disjoint domains and equal horizons (MergeError otherwise).
NamedStreamTuple merge(const NamedStreamTuple& a, const NamedStreamTuple& b);

/// Prefix of every stream in the tuple.
NamedStreamTuple prefix(const NamedStreamTuple& t, std::size_t i);

std::string to_string(const Interval& interval);
std::string to_string(const TimedStream& x);
std::string to_string(const NamedStreamTuple& t);

/// Horizon, per-interval burst bound and per-channel alphabets governing
/// every bounded check.
class EnumerationBounds {
public:
    EnumerationBounds(std::size_t horizon, std::size_t burst,
                      std::map<ChannelId, std::vector<Message>> alphabets = {});

    std::size_t horizon() const noexcept { return horizon_; }
    std::size_t burst() const noexcept { return burst_; }
    const std::map<ChannelId, std::vector<Message>>& alphabets() const noexcept { return alphabets_; }

    bool declares(const ChannelId& c) const noexcept { return alphabets_.contains(c); }
    /// Sorted alphabet of `c`; throws BoundsError if undeclared.
    const std::vector<Message>& alphabet(const ChannelId& c) const;

    EnumerationBounds with_horizon(std::size_t horizon) const;
    EnumerationBounds with_burst(std::size_t burst) const;
    EnumerationBounds with_alphabet(const ChannelId& c, std::vector<Message> alphabet) const;

    /// Every in-bounds interval of `c`, in canonical (lexicographic) order.
    std::vector<Interval> intervals(const ChannelId& c) const;

    /// Throws BoundsError if `iv` breaks the burst bound or the alphabet of `c`.
    void check_interval(const ChannelId& c, const Interval& iv) const;
    void check_stream(const ChannelId& c, const TimedStream& x) const;
    /// Checks every binding and that the tuple's horizon equals `horizon`.
    void check_tuple(const NamedStreamTuple& t, std::size_t horizon) const;

    /// Every in-bounds tuple over `channels` at the given horizon (canonical order).
    /// Intended for oracles; the count grows exponentially.
    std::vector<NamedStreamTuple> all_tuples(const ChannelSet& channels, std::size_t horizon) const;

    friend bool operator==(const EnumerationBounds&, const EnumerationBounds&) = default;

private:
    std::size_t horizon_;
    std::size_t burst_;
    std::map<ChannelId, std::vector<Message>> alphabets_;
};

} // namespace flowrefine

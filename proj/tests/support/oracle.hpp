#pragma once

// Brute-force reference semantics used by the tests. Nothing here goes through
// compose, adapt or the inclusion search: a system's relation is computed by
// enumerating every assignment l of all run channels and keeping those where
// each component's machine can produce l's outputs from l's inputs.

#include <map>
#include <set>
#include <vector>

#include "flowrefine/system.hpp"

namespace oracle {

using namespace flowrefine;

using Relation = std::map<NamedStreamTuple, std::set<NamedStreamTuple>>;

/// Every interval over `alphabet` with at most `burst` messages.
std::vector<Interval> intervals(const std::vector<Message>& alphabet, std::size_t burst);

/// Every tuple over `channels` at `horizon`, by plain Cartesian product.
std::vector<NamedStreamTuple> tuples(const ChannelSet& channels, std::size_t horizon, const EnumerationBounds& bounds);

/// Number of tuples `tuples` would return.
double tuple_count(const ChannelSet& channels, std::size_t horizon, const EnumerationBounds& bounds);

/// Direct emit/advance simulation over state sets: can `m` emit `o` on `x`?
bool can_produce(const IntervalTransducer& m, const NamedStreamTuple& x, const NamedStreamTuple& o);

/// Every l over in.S ∪ out.C satisfying all components.
std::vector<NamedStreamTuple> witnesses(const System& s);
/// Witnesses whose restriction to in.S is `env`.
std::vector<NamedStreamTuple> runs(const System& s, const NamedStreamTuple& env);
/// x ↦ { l|out.S : l witness, l|in.S = x } for every in-bounds x over in.S.
Relation black_box(const System& s);
/// A machine's relation computed with `can_produce` over all (x, o).
Relation relation(const IntervalTransducer& m, const EnumerationBounds& bounds);

/// Relation converted from the library's bounded behavior map.
Relation from_bounded(const std::map<NamedStreamTuple, std::set<NamedStreamTuple>>& b);

} // namespace oracle

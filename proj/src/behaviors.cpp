#include "flowrefine/behaviors.hpp"

#include <algorithm>
#include <deque>
#include <unordered_set>

namespace flowrefine {

namespace {

using StateSet = std::vector<StateId>;

struct Choice {
    Slice out;
    StateSet from; // states of the set that can emit `out`
};

/// Emission choices of a state set, grouped by slice, canonical order.
std::vector<Choice> choices_of(const IntervalTransducer& m, const StateSet& states)
{
    std::vector<Choice> out;
    if (states.size() == 1) {
        for (const auto& o : m.emit(states[0]))
            out.push_back({o, states});
        return out;
    }
    std::vector<std::pair<const Slice*, StateId>> all;
    for (auto s : states)
        for (const auto& o : m.emit(s))
            all.emplace_back(&o, s);
    std::stable_sort(all.begin(), all.end(), [](const auto& a, const auto& b) { return slice_less(*a.first, *b.first); });
    for (const auto& [o, s] : all) {
        if (out.empty() || out.back().out != *o)
            out.push_back({*o, {}});
        out.back().from.push_back(s);
    }
    return out;
}

StateSet advance_set(const IntervalTransducer& m, const StateSet& from, const Slice& out, const Slice& in)
{
    StateSet next;
    for (auto s : from) {
        auto c = m.find_choice(s, out);
        if (c == IntervalTransducer::npos)
            continue;
        const auto& succ = m.advance(s, c, in);
        next.insert(next.end(), succ.begin(), succ.end());
    }
    std::sort(next.begin(), next.end());
    next.erase(std::unique(next.begin(), next.end()), next.end());
    return next;
}

/// States of `from` that can emit `out`.
StateSet able_to_emit(const IntervalTransducer& m, const StateSet& from, const Slice& out)
{
    StateSet r;
    for (auto s : from)
        if (m.find_choice(s, out) != IntervalTransducer::npos)
            r.push_back(s);
    return r;
}

void require_inputs(const IntervalTransducer& m, const NamedStreamTuple& x)
{
    if (x.domain() != m.inputs())
        throw InterfaceError("input tuple binds " + to_string(x.domain()) + " but the machine reads " +
                             to_string(m.inputs()));
}

std::size_t hash_mix(std::size_t h, std::size_t v)
{
    return h ^ (v + 0x9E3779B97F4A7C15ULL + (h << 6) + (h >> 2));
}

} // namespace

std::vector<Slice> to_slices(const NamedStreamTuple& t, const ChannelSet& channels)
{
    std::vector<Slice> steps(t.horizon());
    for (const auto& c : channels) {
        const auto& x = t.at(c);
        for (std::size_t i = 0; i < t.horizon(); ++i)
            steps[i].push_back(intern(x[i]));
    }
    return steps;
}

NamedStreamTuple to_tuple(const std::vector<Slice>& steps, const ChannelSet& channels)
{
    std::map<ChannelId, TimedStream> bindings;
    for (std::size_t j = 0; j < channels.size(); ++j) {
        std::vector<Interval> ivs;
        for (const auto& s : steps)
            ivs.push_back(interval_of(s.at(j)));
        bindings.emplace(channels[j], TimedStream(std::move(ivs)));
    }
    return NamedStreamTuple(steps.size(), std::move(bindings));
}

OutputSet behavior_of(const IntervalTransducer& m, const NamedStreamTuple& x, const EnumerationBounds& bounds)
{
    require_inputs(m, x);
    bounds.check_tuple(x, bounds.horizon());
    auto xs = to_slices(x, m.inputs());
    const std::size_t h = xs.size();

    OutputSet result;
    std::vector<Slice> path;
    auto walk = [&](auto&& self, const StateSet& states) -> void {
        if (path.size() == h) {
            result.insert(to_tuple(path, m.outputs()));
            return;
        }
        for (const auto& choice : choices_of(m, states)) {
            path.push_back(choice.out);
            if (path.size() == h) {
                self(self, states);
            } else {
                auto next = advance_set(m, choice.from, choice.out, xs[path.size() - 1]);
                if (!next.empty())
                    self(self, next);
            }
            path.pop_back();
        }
    };
    walk(walk, StateSet{m.initial()});
    return result;
}

bool produces(const IntervalTransducer& m, const NamedStreamTuple& x, const NamedStreamTuple& o)
{
    require_inputs(m, x);
    if (o.domain() != m.outputs() || o.horizon() != x.horizon())
        return false;
    auto xs = to_slices(x, m.inputs());
    auto os = to_slices(o, m.outputs());
    StateSet states{m.initial()};
    for (std::size_t i = 0; i < xs.size(); ++i) {
        auto able = able_to_emit(m, states, os[i]);
        if (able.empty())
            return false;
        if (i + 1 == xs.size())
            break;
        states = advance_set(m, able, os[i], xs[i]);
        if (states.empty())
            return false;
    }
    return true;
}

BoundedBehavior bounded_behavior(const IntervalTransducer& m, const EnumerationBounds& bounds)
{
    BoundedBehavior out;
    for (auto& x : bounds.all_tuples(m.inputs(), bounds.horizon())) {
        auto os = behavior_of(m, x, bounds);
        out.emplace(std::move(x), std::move(os));
    }
    return out;
}

PremiseReport validate_transducer(const IntervalTransducer& m, const EnumerationBounds& bounds)
{
    PremiseReport report;
    report.subject = "machine " + m.describe();

    std::vector<std::string> problems;
    auto note = [&](std::string p) {
        if (problems.size() < 20)
            problems.push_back(std::move(p));
    };

    bool empty_choice = false;
    bool empty_successor = false;
    bool burst = false;
    bool alphabet = false;

    std::vector<Slice> letters;
    try {
        letters = all_slices(m.inputs(), bounds);
    } catch (const BoundsError& e) {
        report.fail("input-alphabets", "every input channel has a declared alphabet", e.what());
        return report;
    }
    for (const auto& c : m.outputs())
        if (!bounds.declares(c)) {
            report.fail("output-alphabets", "every output channel has a declared alphabet",
                        "no alphabet for '" + c.str() + "'");
            return report;
        }

    // Breadth-first over states reachable before the horizon.
    std::unordered_set<StateId> seen{m.initial()};
    std::vector<StateId> frontier{m.initial()};
    for (std::size_t depth = 0; depth < bounds.horizon() && !frontier.empty(); ++depth) {
        std::vector<StateId> next;
        for (auto s : frontier) {
            const auto& choices = m.emit(s);
            if (choices.empty()) {
                empty_choice = true;
                note("empty choice set in state " + m.state_label(s));
            }
            for (std::size_t k = 0; k < choices.size(); ++k) {
                for (std::size_t j = 0; j < m.outputs().size(); ++j) {
                    const auto& iv = interval_of(choices[k][j]);
                    if (iv.size() > bounds.burst()) {
                        burst = true;
                        note("burst exceeded on " + m.outputs()[j].str() + " in state " + m.state_label(s));
                    }
                    const auto& alpha = bounds.alphabet(m.outputs()[j]);
                    for (const auto& msg : iv)
                        if (!std::binary_search(alpha.begin(), alpha.end(), msg)) {
                            alphabet = true;
                            note("message '" + msg + "' outside the alphabet of " + m.outputs()[j].str());
                        }
                }
                if (depth + 1 == bounds.horizon())
                    continue;
                for (const auto& x : letters) {
                    const auto& succ = m.advance(s, k, x);
                    if (succ.empty()) {
                        empty_successor = true;
                        note("empty successor set in state " + m.state_label(s) + " after emitting " +
                             to_string(choices[k], m.outputs()) + " and reading " + to_string(x, m.inputs()));
                    }
                    for (auto t : succ)
                        if (seen.insert(t).second)
                            next.push_back(t);
                }
            }
        }
        frontier = std::move(next);
    }

    auto detail = [&](const std::string& key) {
        std::string d;
        for (const auto& p : problems)
            if (p.find(key) != std::string::npos)
                d += (d.empty() ? "" : "; ") + p;
        return d;
    };
    if (empty_choice)
        report.fail("empty-choice-set", "every reachable state offers an output", detail("empty choice set"));
    else
        report.pass("empty-choice-set", "every reachable state offers an output");
    if (empty_successor)
        report.fail("empty-successor-set", "every emission and input has a successor", detail("empty successor"));
    else
        report.pass("empty-successor-set", "every emission and input has a successor");
    if (burst)
        report.fail("burst-exceeded", "emitted intervals respect the burst bound", detail("burst exceeded"));
    else
        report.pass("burst-exceeded", "emitted intervals respect the burst bound");
    if (alphabet)
        report.fail("alphabet", "emitted messages belong to their channel alphabets", detail("outside the alphabet"));
    else
        report.pass("alphabet", "emitted messages belong to their channel alphabets");
    report.pass("time-guarded", "output at step i depends on input before step i", "holds by construction");
    return report;
}

// ---------------------------------------------------------------------------
// Inclusion

namespace {

struct Node {
    std::uint32_t depth;
    std::uint32_t guard;
    StateSet impl;
    StateSet spec;
    friend bool operator==(const Node&, const Node&) = default;
};

struct NodeHash {
    std::size_t operator()(const Node& n) const noexcept
    {
        std::size_t h = hash_mix(n.depth, n.guard);
        h = hash_mix(h, StateSetHash{}(n.impl));
        return hash_mix(h, StateSetHash{}(n.spec));
    }
};

class InclusionSearch {
public:
    InclusionSearch(const IntervalTransducer& impl, const IntervalTransducer& spec, const EnumerationBounds& bounds,
                    const StepGuard* guard)
        : impl_(impl), spec_(spec), horizon_(bounds.horizon()), guard_(guard),
          letters_(all_slices(impl.inputs(), bounds))
    {
    }

    InclusionResult run()
    {
        InclusionResult r;
        if (horizon_ > 0) {
            std::uint32_t g = guard_ ? guard_->initial() : 0;
            r.holds = dfs(0, g, StateSet{impl_.initial()}, StateSet{spec_.initial()});
        }
        r.counterexample = std::move(cx_);
        r.nodes = ok_.size() + 1;
        return r;
    }

private:
    std::optional<std::uint32_t> guard_step(std::uint32_t g, std::size_t depth, const Slice& x) const
    {
        if (!guard_)
            return 0;
        return guard_->step(g, depth, x);
    }

    bool dfs(std::size_t depth, std::uint32_t g, const StateSet& a, const StateSet& b)
    {
        Node key{static_cast<std::uint32_t>(depth), g, a, b};
        if (ok_.contains(key))
            return true;
        const auto choices = choices_of(impl_, a);
        const bool last = depth + 1 == horizon_;

        for (const auto& x : letters_) {
            auto g2 = guard_step(g, depth, x);
            if (!g2)
                continue;
            for (const auto& choice : choices) {
                auto b_able = able_to_emit(spec_, b, choice.out);
                xs_.push_back(x);
                os_.push_back(choice.out);
                if (b_able.empty()) {
                    fail(depth, *g2, choice, x);
                    return false;
                }
                if (!last) {
                    auto a2 = advance_set(impl_, choice.from, choice.out, x);
                    if (!a2.empty()) {
                        auto b2 = advance_set(spec_, b_able, choice.out, x);
                        if (!dfs(depth + 1, *g2, a2, b2))
                            return false;
                    }
                }
                xs_.pop_back();
                os_.pop_back();
            }
            // Outputs at the last step do not depend on its input.
            if (last)
                break;
        }
        ok_.insert(std::move(key));
        return true;
    }

    void fail(std::size_t depth, std::uint32_t g, const Choice& choice, const Slice& x)
    {
        // Complete the failing prefix with the least continuation.
        auto states = advance_set(impl_, choice.from, choice.out, x);
        for (std::size_t d = depth + 1; d < horizon_; ++d) {
            std::optional<std::uint32_t> g2;
            const Slice* pick = &letters_.front();
            for (const auto& y : letters_)
                if ((g2 = guard_step(g, d, y))) {
                    pick = &y;
                    break;
                }
            if (g2)
                g = *g2;
            Slice out(impl_.outputs().size(), empty_interval());
            if (!states.empty()) {
                auto cs = choices_of(impl_, states);
                out = cs.front().out;
                states = advance_set(impl_, cs.front().from, out, *pick);
            }
            xs_.push_back(*pick);
            os_.push_back(out);
        }
        Counterexample c;
        c.description = "at step " + std::to_string(depth) + " the candidate may emit " +
                        to_string(choice.out, impl_.outputs()) + ", which the specification does not allow";
        c.tuples.emplace_back("input", to_tuple(xs_, impl_.inputs()));
        c.tuples.emplace_back("output", to_tuple(os_, impl_.outputs()));
        cx_ = std::move(c);
    }

    const IntervalTransducer& impl_;
    const IntervalTransducer& spec_;
    std::size_t horizon_;
    const StepGuard* guard_;
    std::vector<Slice> letters_;
    std::unordered_set<Node, NodeHash> ok_;
    std::vector<Slice> xs_;
    std::vector<Slice> os_;
    std::optional<Counterexample> cx_;
};

} // namespace

InclusionResult check_inclusion(const IntervalTransducer& impl, const IntervalTransducer& spec,
                                const EnumerationBounds& bounds, const StepGuard* guard)
{
    if (impl.inputs() != spec.inputs() || impl.outputs() != spec.outputs())
        throw InterfaceError("interfaces differ: " + to_string(impl.inputs()) + " -> " + to_string(impl.outputs()) +
                             " vs " + to_string(spec.inputs()) + " -> " + to_string(spec.outputs()));
    return InclusionSearch(impl, spec, bounds, guard).run();
}

InclusionResult refines_behavior(const IntervalTransducer& m2, const IntervalTransducer& m1,
                                 const EnumerationBounds& bounds)
{
    return check_inclusion(m2, m1, bounds);
}

InclusionResult equal_behavior(const IntervalTransducer& a, const IntervalTransducer& b,
                               const EnumerationBounds& bounds)
{
    auto r = check_inclusion(a, b, bounds);
    if (!r.holds)
        return r;
    auto back = check_inclusion(b, a, bounds);
    back.nodes += r.nodes;
    if (back.counterexample)
        back.counterexample->description = "(reverse direction) " + back.counterexample->description;
    return back;
}

} // namespace flowrefine

#include "flowrefine/system.hpp"

#include <algorithm>
#include <map>

namespace flowrefine {

Component make_component(std::string name, ChannelSet in, ChannelSet out, IntervalTransducer behav)
{
    if (!is_valid_token(name))
        throw DomainError("invalid component name '" + name + "'");
    if (behav.inputs() != in || behav.outputs() != out)
        throw InterfaceError("component " + name + " declares " + to_string(in) + " -> " + to_string(out) +
                             " but its machine has " + to_string(behav.inputs()) + " -> " +
                             to_string(behav.outputs()));
    return Component{std::move(name), std::move(in), std::move(out), std::move(behav)};
}

Component make_component(std::string name, IntervalTransducer behav)
{
    auto in = behav.inputs();
    auto out = behav.outputs();
    return make_component(std::move(name), std::move(in), std::move(out), std::move(behav));
}

System::System(ChannelSet in, ChannelSet out, std::vector<Component> components, EnumerationBounds bounds)
    : in_(std::move(in)), out_(std::move(out)), components_(std::move(components)), bounds_(std::move(bounds))
{
}

ChannelSet System::in_c() const
{
    ChannelSet r;
    for (const auto& c : components_)
        r = unite(r, c.in);
    return r;
}

ChannelSet System::out_c() const
{
    ChannelSet r;
    for (const auto& c : components_)
        r = unite(r, c.out);
    return r;
}

ChannelSet System::run_channels() const
{
    return unite(in_, out_c());
}

const Component* System::find(const std::string& name) const noexcept
{
    for (const auto& c : components_)
        if (c.name == name)
            return &c;
    return nullptr;
}

const Component& System::component(const std::string& name) const
{
    if (const auto* c = find(name))
        return *c;
    throw LookupError("no component named '" + name + "'");
}

const Component* System::writer(const ChannelId& ch) const noexcept
{
    for (const auto& c : components_)
        if (c.out.contains(ch))
            return &c;
    return nullptr;
}

System System::with_components(std::vector<Component> components) const
{
    return System(in_, out_, std::move(components), bounds_);
}

System System::with_bounds(EnumerationBounds bounds) const
{
    return System(in_, out_, components_, std::move(bounds));
}

System with_component(const System& s, const std::string& name, Component replacement)
{
    auto comps = s.components();
    auto it = std::find_if(comps.begin(), comps.end(), [&](const Component& c) { return c.name == name; });
    if (it == comps.end())
        throw LookupError("no component named '" + name + "'");
    *it = std::move(replacement);
    return s.with_components(std::move(comps));
}

PremiseReport validate_system(const System& s)
{
    PremiseReport report;
    report.subject = "system consistency";
    const auto& comps = s.components();

    auto list = [](const std::vector<std::string>& items) {
        std::string out;
        for (const auto& i : items)
            out += (out.empty() ? "" : "; ") + i;
        return out;
    };

    std::vector<std::string> v1;
    std::map<std::string, int> names;
    for (const auto& c : comps)
        if (++names[c.name] == 2)
            v1.push_back("name '" + c.name + "' is used by more than one component");
    if (!v1.empty())
        report.fail("condition-1", "name.c1 != name.c2", list(v1));

    std::vector<std::string> v2;
    for (std::size_t a = 0; a < comps.size(); ++a)
        for (std::size_t b = a + 1; b < comps.size(); ++b) {
            auto shared = intersect(comps[a].out, comps[b].out);
            if (!shared.empty())
                v2.push_back("channels " + to_string(shared) + " are controlled by both " + comps[a].name + " and " +
                             comps[b].name);
        }
    if (!v2.empty())
        report.fail("condition-2", "out.c1 ∩ out.c2 = ∅", list(v2));

    std::vector<std::string> v3;
    for (const auto& c : comps) {
        auto bad = intersect(s.in(), c.out);
        if (!bad.empty())
            v3.push_back("system inputs " + to_string(bad) + " are controlled by " + c.name);
    }
    if (!v3.empty())
        report.fail("condition-3", "in.S ∩ out.c = ∅", list(v3));

    std::vector<std::string> v4;
    auto available = unite(s.out_c(), s.in());
    for (const auto& c : comps) {
        auto bad = minus(c.in, available);
        if (!bad.empty())
            v4.push_back("inputs " + to_string(bad) + " of " + c.name +
                         " are neither system inputs nor component outputs");
    }
    if (!v4.empty())
        report.fail("condition-4", "in.c ⊆ out.C ∪ in.S", list(v4));

    auto missing = minus(s.out(), s.out_c());
    if (!missing.empty())
        report.fail("condition-5", "out.S ⊆ out.C",
                    "system outputs " + to_string(missing) + " are not controlled by any component");
    return report;
}

ConsistencyError::ConsistencyError(PremiseReport report)
    : Error("inconsistent system:\n" + to_string(report)), report_(std::move(report))
{
}

namespace {

IntervalTransducer composed(const System& s)
{
    auto report = validate_system(s);
    if (!report.ok())
        throw ConsistencyError(std::move(report));
    std::vector<IntervalTransducer> parts;
    for (const auto& c : s.components())
        parts.push_back(c.behav);
    return compose(parts);
}

} // namespace

IntervalTransducer black_box(const System& s)
{
    return adapt(composed(s), s.in(), s.out());
}

IntervalTransducer run_machine(const System& s)
{
    return adapt(composed(s), s.in(), s.out_c());
}

std::vector<NamedStreamTuple> system_runs(const System& s, const NamedStreamTuple& env)
{
    auto m = run_machine(s);
    auto outs = behavior_of(m, env, s.bounds());
    std::vector<NamedStreamTuple> runs;
    runs.reserve(outs.size());
    for (const auto& o : outs)
        runs.push_back(merge(env, o));
    std::sort(runs.begin(), runs.end());
    return runs;
}

Component as_component(const System& s, const std::string& name)
{
    return make_component(name, s.in(), s.out(), black_box(s));
}

} // namespace flowrefine

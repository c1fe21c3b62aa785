#include "flowrefine/report.hpp"

#include <algorithm>
#include <sstream>

namespace flowrefine {

const NamedStreamTuple& Counterexample::at(const std::string& label) const
{
    for (const auto& [name, t] : tuples)
        if (name == label)
            return t;
    throw LookupError("counterexample has no tuple '" + label + "'");
}

bool PremiseReport::ok() const noexcept
{
    return std::all_of(verdicts.begin(), verdicts.end(), [](const auto& v) { return v.holds; });
}

std::vector<PremiseVerdict> PremiseReport::failures() const
{
    std::vector<PremiseVerdict> out;
    std::copy_if(verdicts.begin(), verdicts.end(), std::back_inserter(out), [](const auto& v) { return !v.holds; });
    return out;
}

const PremiseVerdict* PremiseReport::first_failure() const noexcept
{
    for (const auto& v : verdicts)
        if (!v.holds)
            return &v;
    return nullptr;
}

bool PremiseReport::has_failure(const std::string& id) const noexcept
{
    return std::any_of(verdicts.begin(), verdicts.end(), [&](const auto& v) { return !v.holds && v.id == id; });
}

void PremiseReport::pass(std::string id, std::string statement, std::string detail)
{
    verdicts.push_back({std::move(id), std::move(statement), true, std::move(detail), std::nullopt});
}

void PremiseReport::fail(std::string id, std::string statement, std::string detail,
                         std::optional<Counterexample> witness)
{
    verdicts.push_back({std::move(id), std::move(statement), false, std::move(detail), std::move(witness)});
}

void PremiseReport::absorb(const PremiseReport& other)
{
    verdicts.insert(verdicts.end(), other.verdicts.begin(), other.verdicts.end());
}

std::string to_string(const Counterexample& cx)
{
    std::ostringstream out;
    out << cx.description;
    for (const auto& [label, t] : cx.tuples)
        out << "\n    " << label << ": " << to_string(t);
    return out.str();
}

std::string to_string(const PremiseReport& report)
{
    std::ostringstream out;
    out << report.subject << ": " << (report.ok() ? "ok" : "FAILED");
    for (const auto& v : report.verdicts) {
        out << "\n  [" << (v.holds ? "pass" : "FAIL") << "] " << v.id;
        if (!v.statement.empty())
            out << "  " << v.statement;
        if (!v.detail.empty())
            out << "\n    " << v.detail;
        if (v.witness)
            out << "\n    " << to_string(*v.witness);
    }
    return out.str();
}

} // namespace flowrefine

#pragma once

// Verdicts of checked premises, with replayable witnesses on failure.

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "flowrefine/streams.hpp"

namespace flowrefine {

/// Concrete evidence that a check failed: labelled tuples such as
/// ("input", x), ("output", o) or ("run", l).
struct Counterexample {
    std::string description;
    std::vector<std::pair<std::string, NamedStreamTuple>> tuples;

    /// Tuple with the given label; throws LookupError if missing.
    const NamedStreamTuple& at(const std::string& label) const;

    friend bool operator==(const Counterexample&, const Counterexample&) = default;
};

struct PremiseVerdict {
    std::string id;         // e.g. "condition-2", "fresh-channel"
    std::string statement;  // the premise, as a formula over the system
    bool holds = true;
    std::string detail;
    std::optional<Counterexample> witness;

    friend bool operator==(const PremiseVerdict&, const PremiseVerdict&) = default;
};

struct PremiseReport {
    std::string subject;
    std::vector<PremiseVerdict> verdicts;

    bool ok() const noexcept;
    /// Verdicts that failed.
    std::vector<PremiseVerdict> failures() const;
    /// First failing verdict, if any.
    const PremiseVerdict* first_failure() const noexcept;
    bool has_failure(const std::string& id) const noexcept;

    void pass(std::string id, std::string statement, std::string detail = {});
    void fail(std::string id, std::string statement, std::string detail, std::optional<Counterexample> witness = {});
    /// Appends all verdicts of `other`.
    void absorb(const PremiseReport& other);

    friend bool operator==(const PremiseReport&, const PremiseReport&) = default;
};

std::string to_string(const Counterexample& cx);
std::string to_string(const PremiseReport& report);

} // namespace flowrefine

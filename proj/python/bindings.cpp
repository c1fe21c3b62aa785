#include <sstream>

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "flowrefine/commands.hpp"

namespace py = pybind11;
using namespace flowrefine;

namespace {

CommandOptions options(std::optional<std::size_t> horizon, std::optional<std::size_t> burst)
{
    CommandOptions o;
    o.bounds.horizon = horizon;
    o.bounds.burst = burst;
    o.json = true;
    return o;
}

template <class F>
py::dict invoke(F&& f)
{
    std::ostringstream out, err;
    int code;
    {
        py::gil_scoped_release release;
        code = f(out, err);
    }
    if (code == exit_usage)
        throw py::value_error(err.str());
    py::dict d = py::module_::import("json").attr("loads")(out.str());
    d["exit"] = code;
    return d;
}

std::string diagnostics_text(const ParseError& e)
{
    std::string s;
    for (const auto& d : e.diagnostics())
        s += std::to_string(d.line) + ":" + std::to_string(d.column) + ": " + d.message + "\n";
    return s;
}

} // namespace

PYBIND11_MODULE(_flowrefine, m)
{
    m.doc() = "Bounded refinement checking for dataflow architectures";

    m.def(
        "validate",
        [](const std::string& arch, std::optional<std::size_t> horizon, std::optional<std::size_t> burst) {
            auto o = options(horizon, burst);
            return invoke([&](auto& out, auto& err) { return cmd_validate(arch, o, out, err); });
        },
        py::arg("arch"), py::kw_only(), py::arg("horizon") = py::none(), py::arg("burst") = py::none());

    m.def(
        "simulate",
        [](const std::string& arch, const std::string& env, std::optional<std::size_t> horizon,
           std::optional<std::size_t> burst) {
            auto o = options(horizon, burst);
            return invoke([&](auto& out, auto& err) { return cmd_simulate(arch, env, o, out, err); });
        },
        py::arg("arch"), py::arg("env"), py::kw_only(), py::arg("horizon") = py::none(),
        py::arg("burst") = py::none());

    m.def(
        "check_refinement",
        [](const std::string& original, const std::string& refined, std::optional<std::size_t> horizon,
           std::optional<std::size_t> burst) {
            auto o = options(horizon, burst);
            return invoke([&](auto& out, auto& err) { return cmd_check(original, refined, o, out, err); });
        },
        py::arg("original"), py::arg("refined"), py::kw_only(), py::arg("horizon") = py::none(),
        py::arg("burst") = py::none());

    m.def(
        "apply_script",
        [](const std::string& arch, const std::string& script, bool verify, std::optional<std::string> output,
           std::optional<std::size_t> horizon, std::optional<std::size_t> burst) {
            auto o = options(horizon, burst);
            o.verify = verify;
            o.output = output;
            return invoke([&](auto& out, auto& err) { return cmd_apply(arch, script, o, out, err); });
        },
        py::arg("arch"), py::arg("script"), py::kw_only(), py::arg("verify") = false, py::arg("output") = py::none(),
        py::arg("horizon") = py::none(), py::arg("burst") = py::none());

    m.def(
        "case_study",
        [](bool mutant, bool verify, std::optional<std::size_t> horizon) {
            auto o = options(horizon, std::nullopt);
            o.mutant = mutant;
            o.verify = verify;
            return invoke([&](auto& out, auto& err) { return cmd_case_study(o, out, err); });
        },
        py::kw_only(), py::arg("mutant") = false, py::arg("verify") = true, py::arg("horizon") = py::none());

    m.def(
        "canonical_architecture",
        [](const std::string& text) {
            try {
                return render_architecture(parse_architecture(text));
            } catch (const ParseError& e) {
                throw py::value_error(diagnostics_text(e));
            }
        },
        py::arg("text"));

    m.def(
        "delta", [](std::optional<int> old, int now) { return Codec{}.delta(old, now); }, py::arg("old"),
        py::arg("now"));
    m.def(
        "rho", [](std::optional<int> old, int diff) { return Codec{}.rho(old, diff); }, py::arg("old"),
        py::arg("diff"));

    py::register_exception<Error>(m, "Error", PyExc_ValueError);
}

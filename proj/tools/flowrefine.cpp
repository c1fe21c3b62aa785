// flowrefine: validate, simulate and refine data flow architectures.

#include <iostream>

#include <CLI11.hpp>

#include "flowrefine/commands.hpp"

using namespace flowrefine;

int main(int argc, char** argv)
{
    CLI::App app{"Bounded refinement checks for networks of stream-processing components"};
    app.require_subcommand(1);

    CommandOptions opt;
    std::size_t horizon = 0, burst = 0;
    std::string format = "text";
    std::string output;

    auto common = [&](CLI::App* sub) {
        sub->add_option("--horizon", horizon, "Override the horizon")->check(CLI::NonNegativeNumber);
        sub->add_option("--burst", burst, "Override the burst bound")->check(CLI::NonNegativeNumber);
        sub->add_option("--format", format, "Output format")->check(CLI::IsMember({"text", "json"}));
    };

    std::string arch, env, other, script;

    auto* validate = app.add_subcommand("validate", "Check consistency conditions (1)-(5)");
    validate->add_option("architecture", arch, "Architecture file")->required();
    common(validate);

    auto* simulate = app.add_subcommand("simulate", "List every run of a system for one environment input");
    simulate->add_option("architecture", arch, "Architecture file")->required();
    simulate->add_option("environment", env, "Environment file")->required();
    common(simulate);

    auto* check = app.add_subcommand("check-refine", "Check that REFINED refines ORIGINAL");
    check->add_option("original", arch, "Original architecture")->required();
    check->add_option("refined", other, "Refined architecture")->required();
    common(check);

    auto* apply = app.add_subcommand("apply-script", "Apply a refinement script");
    apply->add_option("architecture", arch, "Architecture file")->required();
    apply->add_option("script", script, "Script file")->required();
    apply->add_option("--output", output, "Write the refined architecture here");
    apply->add_flag("--verify", opt.verify, "Re-check every step by bounded enumeration");
    common(apply);

    auto* study = app.add_subcommand("case-study", "Run the built-in database case study");
    study->add_flag("--mutant", opt.mutant, "Use a decoder that forgets to decode");
    bool no_verify = false;
    study->add_flag("--no-verify", no_verify, "Skip the per-step semantic checks");
    common(study);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? exit_ok : exit_usage;
    }

    for (auto* sub : {validate, simulate, check, apply, study}) {
        if (!sub->parsed())
            continue;
        if (sub->count("--horizon"))
            opt.bounds.horizon = horizon;
        if (sub->count("--burst"))
            opt.bounds.burst = burst;
    }
    opt.json = format == "json";
    if (!output.empty())
        opt.output = output;

    if (validate->parsed())
        return cmd_validate(arch, opt, std::cout, std::cerr);
    if (simulate->parsed())
        return cmd_simulate(arch, env, opt, std::cout, std::cerr);
    if (check->parsed())
        return cmd_check(arch, other, opt, std::cout, std::cerr);
    if (apply->parsed())
        return cmd_apply(arch, script, opt, std::cout, std::cerr);
    opt.verify = !no_verify;
    return cmd_case_study(opt, std::cout, std::cerr);
}

#include "pssf/cli/commands.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <string>
#include <vector>

int main(int argc, char** argv) {
    CLI::App app{"synthetic knee radiograph cohort, radiomics, and grading pipeline"};
    app.require_subcommand(1);

    std::string config_path;
    std::string profile;
    std::string out_dir;
    std::uint64_t seed = 0;
    int jobs = 0;

    const std::vector<std::pair<std::string, std::string>> commands = {
        {"simulate", "generate the cohort manifest and render every radiograph"},
        {"extract", "localize joint ROIs and compute the radiomic feature matrix"},
        {"train", "fit and tune the grading models for every scenario"},
        {"evaluate", "score the trained models on every scenario's test sets"},
        {"stability", "re-render repeat images and compute feature ICCs"},
        {"pipeline", "run all stages in order with checkpoint markers"}};
    for (const auto& [name, help] : commands) {
        CLI::App* sub = app.add_subcommand(name, help);
        sub->add_option("--config", config_path, "run configuration JSON")->required();
        sub->add_option("--profile", profile, "resolution profile")
            ->check(CLI::IsMember({"desk", "full"}));
        sub->add_option("--seed", seed, "master seed override");
        sub->add_option("--jobs", jobs, "worker thread cap")->check(CLI::PositiveNumber);
        sub->add_option("--out", out_dir, "output directory");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;  // flag/usage problems are config errors
    }

    CLI::App* sub = app.get_subcommands().front();
    pssf::CliOverrides overrides;
    overrides.profile = profile;
    if (sub->count("--seed") > 0) overrides.seed = seed;
    overrides.out_dir = out_dir;
    overrides.jobs = jobs;

    pssf::RunConfig config;
    try {
        config = pssf::load_run_config(config_path, overrides);
    } catch (const pssf::Error& e) {
        std::cerr << "[pssf] " << e.what() << std::endl;
        return e.kind() == pssf::ErrorKind::Config ? 2 : 3;
    } catch (const std::exception& e) {
        std::cerr << "[pssf] " << e.what() << std::endl;
        return 2;
    }

    const std::string command = sub->get_name();
    try {
        pssf::run_command(command, config);
    } catch (const pssf::StageError& e) {
        pssf::write_error_report(config, e.stage(), e.kind(), e.what());
        std::cerr << "[pssf] stage " << e.stage() << " failed: " << e.what() << std::endl;
        return e.kind() == pssf::ErrorKind::Config ? 2 : 3;
    } catch (const pssf::Error& e) {
        pssf::write_error_report(config, command, e.kind(), e.what());
        std::cerr << "[pssf] " << e.what() << std::endl;
        return e.kind() == pssf::ErrorKind::Config ? 2 : 3;
    } catch (const std::exception& e) {
        pssf::write_error_report(config, command, pssf::ErrorKind::Runtime, e.what());
        std::cerr << "[pssf] " << e.what() << std::endl;
        return 3;
    }
    return 0;
}

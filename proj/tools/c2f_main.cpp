// Command-line driver for the clustered cell-free networking lab.

#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "c2f/harness.hpp"

namespace {

// Map failures onto the documented exit codes: 2 config, 3 numeric.
template <typename Fn>
int guarded(Fn&& fn) {
    try {
        return fn();
    } catch (const c2f::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const c2f::NumericError& e) {
        std::cerr << "numeric error: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"clustered cell-free networking: DDPG training, evaluation and baselines"};
    app.require_subcommand(1);

    std::string config_path;
    std::string checkpoint_path;
    std::string grid_path;
    bool resume = false;
    int jobs = 1;

    auto* train = app.add_subcommand("train", "train the DDPG agent");
    train->add_option("--config", config_path, "experiment config JSON")->required();
    train->add_flag("--resume", resume, "continue from <output_dir>/checkpoint.json");

    auto* eval = app.add_subcommand("eval", "evaluate a frozen policy");
    eval->add_option("--config", config_path, "experiment config JSON")->required();
    eval->add_option("--checkpoint", checkpoint_path, "checkpoint JSON")->required();

    auto* compare = app.add_subcommand("compare", "policy vs baselines on frozen tapes");
    compare->add_option("--config", config_path, "experiment config JSON")->required();
    compare->add_option("--checkpoint", checkpoint_path,
                        "checkpoint JSON (default: compare.checkpoint from the config)");

    auto* sweep = app.add_subcommand("sweep", "Cartesian hyperparameter sweep");
    sweep->add_option("--config", config_path, "experiment config JSON")->required();
    sweep->add_option("--grid", grid_path, "grid JSON: {\"key\": [values...]}")->required();
    sweep->add_option("--jobs", jobs, "parallel cells")->check(CLI::PositiveNumber);

    CLI11_PARSE(app, argc, argv);

    if (train->parsed())
        return guarded([&] { return c2f::harness::cmd_train(config_path, resume); });
    if (eval->parsed())
        return guarded([&] { return c2f::harness::cmd_eval(config_path, checkpoint_path); });
    if (compare->parsed())
        return guarded([&] { return c2f::harness::cmd_compare(config_path, checkpoint_path); });
    if (sweep->parsed())
        return guarded([&] { return c2f::harness::cmd_sweep(config_path, grid_path, jobs); });
    return 1;
}

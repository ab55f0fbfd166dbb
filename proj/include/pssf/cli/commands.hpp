#pragma once

#include "pssf/cli/config.hpp"

#include <string>

namespace pssf {

// Error annotated with the stage it came from, so the caller can write a
// machine-readable report and choose the exit code.
class StageError : public Error {
public:
    StageError(std::string stage, ErrorKind kind, const std::string& msg)
        : Error(kind, msg), stage_(std::move(stage)) {}

    const std::string& stage() const { return stage_; }

private:
    std::string stage_;
};

// Each command checkpoints through a marker file under <out>/markers/: the
// stage is skipped when the marker matches the current config hash and every
// recorded input and output file still hashes to its recorded value.
void cmd_simulate(const RunConfig& config);
void cmd_extract(const RunConfig& config);
void cmd_train(const RunConfig& config);
void cmd_evaluate(const RunConfig& config);
void cmd_stability(const RunConfig& config);
void cmd_pipeline(const RunConfig& config);

// Dispatch by subcommand name; throws StageError on failure.
void run_command(const std::string& command, const RunConfig& config);

// Best-effort error_report.json in the output directory.
void write_error_report(const RunConfig& config, const std::string& stage, ErrorKind kind,
                        const std::string& message);

}  // namespace pssf

#pragma once

#include "crrigid/problem.hpp"

#include <json.hpp>

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace crr {

// Command-line settings; unset values fall back to the input's options, then defaults.
struct RunOptions {
    std::optional<int> order;     // largest condition order
    std::optional<int> condOrder; // first condition order
    std::optional<int> window;
    std::optional<int> d;
    bool oracle = false;
    bool timing = false; // adds wall-clock seconds; reports are then no longer byte-stable
    std::map<std::string, std::string> set; // let-constant overrides
};

struct RunResult {
    int exitCode = 0; // 0 ok, 1 failed expectation, 2 input or engine error
    nlohmann::ordered_json report;
    std::string summary;
};

std::string corpusDirectory();
std::vector<std::string> corpusIds();
// An existing file path, or the id of a bundled entry.
std::string resolveInput(const std::string &fileOrId);

RunResult runCommand(const std::string &command, const std::string &input, const RunOptions &opt = {});
// Same, on an already parsed spec (`label` names it in the report).
RunResult runSpec(const std::string &command, const ProblemSpec &spec, const std::string &label,
                  const RunOptions &opt = {});

} // namespace crr

#pragma once

namespace zsm::cli {

// Full command-line entry point: parses argv, dispatches, prints the
// report, and returns the process exit code (0 verified / 1 falsified /
// 2 usage or resource error).
int run(int argc, char** argv);

}  // namespace zsm::cli

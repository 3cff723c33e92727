// Command-line front end. Subcommands:
//   run          --config <file> --seed <u64> --out <dir>
//                [--reps N] [--horizon K] [--baseline] [--rate-window LO:HI]
//   validate     --config <file>
//   example-sec6 --case 1|2 --out <dir>
// Exit codes: 0 success, 1 validation failure, 2 I/O, parse, or usage error.

#pragma once

#include <vector>
#include <string>

namespace eftqdi {

int cli_main(int argc, const char* const* argv);
int cli_main(const std::vector<std::string>& args);  // args without argv[0]

}  // namespace eftqdi

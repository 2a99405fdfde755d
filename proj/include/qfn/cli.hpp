// cli.hpp: the `qfn` command-line front end, usable in-process.

#pragma once

#include "qfn/matkit.hpp"
#include "qfn/transfer.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace qfn::cli {

enum class Command { Check, Reduce, Tf, Freqresp, Series, Star, Strat2Ito, Ito2Strat };
enum class OutputFormat { Table, Csv, Qnet };

enum ExitCode : int {
    kExitOk = 0,
    kExitValidation = 1,
    kExitParse = 2,
    kExitSingular = 3,
    kExitUsage = 4,
};

struct Grid {
    double start = 0.0;
    double stop = 0.0;
    std::size_t count = 1;

    std::vector<double> points() const;
};

struct RunConfig {
    Command command = Command::Check;
    std::vector<std::string> inputs;
    std::optional<std::string> output;  // stdout when empty
    std::optional<Grid> grid;
    std::optional<Complex> s;
    double sigma = kAxisOffset;
    double tol = kStructuralTol;
    std::optional<OutputFormat> format;  // per-command default when empty
    std::size_t internal = 1;            // inner channels for `star`
};

// "a:b:n"; std::nullopt when malformed or n < 1.
std::optional<Grid> parse_grid(const std::string& text);
// "RE,IM"
std::optional<Complex> parse_complex_pair(const std::string& text);

// Data goes to `out` (or the -o file), diagnostics to `err`.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

// Parses the argument vector into `config`. Returns std::nullopt when the
// command should run, otherwise the exit status to return immediately (help
// output or a usage error).
std::optional<int> parse_arguments(int argc, const char* const* argv, RunConfig& config,
                                   std::ostream& out, std::ostream& err);

int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace qfn::cli

#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace fracprop::cli {

// Invalid flag value or flag combination. Exit code 1.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Unreadable input or unwritable output. Exit code 3.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class Command { MlEval, BoundSweep, Propagate, SemigroupCheck };
enum class Mode { StateDump, TraceNorm, AlphaSweep, Certify, AdjointCheck };
enum class Format { Csv, Json };

std::string_view to_string(Command c);
std::string_view to_string(Mode m);
std::string_view to_string(Format f);

// Everything that determines the numbers in an output file. The output path
// is not part of it.
struct RunConfig {
    Command command = Command::MlEval;
    Mode mode = Mode::StateDump;
    std::vector<double> alpha;
    std::vector<double> t;
    std::vector<double> omega;
    std::vector<double> ts;
    std::size_t steps = 10;
    std::vector<double> alpha_sweep;
    double beta = 0.5;
    double h = 1e-3;
    double omega_max = 1e6;
    std::size_t n = 10000;
    bool compare = false;
    std::string matrix;
    std::string grid;
    std::string state = "basis:0";
    std::string path = "one";
    std::uint64_t seed = 1;
    double tol = 1e-10;
    Format format = Format::Csv;

    friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

struct Invocation {
    RunConfig config;
    std::string out;  // empty means stdout
};

// A non-empty help_text means --help or --version was given; print it and
// exit 0.
struct ParseResult {
    Invocation invocation;
    std::string help_text;
};

// Parses argv with CLI11 and validates the result. Throws ConfigError.
ParseResult parse_args(int argc, const char* const* argv);

// Checks every field against the preconditions of the selected command.
// Throws ConfigError naming the offending flag.
void validate(const RunConfig& config);

// key/value form used by output headers; config_from_entries inverts it.
std::vector<std::pair<std::string, std::string>> config_entries(const RunConfig& config);
RunConfig config_from_entries(const std::vector<std::pair<std::string, std::string>>& entries);

// Recovers the RunConfig from the '#' header of a CSV output.
RunConfig parse_header(std::string_view csv_text);

using Cell = std::variant<double, long long, std::string>;

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;
};

// Runs the configured experiment. Library errors (fracprop::Error) propagate
// unchanged; file inputs that cannot be read raise IoError.
Table run(const RunConfig& config);

std::string render(const RunConfig& config, const Table& table);

// Writes text to path through a temporary file in the same directory and a
// rename, or to out when path is empty.
void write_output(const std::string& path, const std::string& text, std::ostream& out);

// Full driver: parse, validate, run, render, write. Returns the exit code.
int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

// Helpers shared with the tests.
std::complex<double> parse_complex(std::string_view token);
std::vector<double> parse_list(std::string_view text, std::string_view flag);

}  // namespace fracprop::cli

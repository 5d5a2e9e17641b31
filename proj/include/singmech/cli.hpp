#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "singmech/analysis.hpp"
#include "singmech/model_file.hpp"

namespace singmech::cli {

/// Process exit codes, shared by every command.
enum ExitCode : int {
    kSuccess = 0,
    kRejected = 1,      // inconsistent, unsupported, non-constant rank, step failure, no oracle
    kVerifyFailed = 2,
    kInputError = 3,    // parse, validation, missing or malformed arguments
};

/// flag > model file > SINGMECH_SEED > 42
[[nodiscard]] std::uint64_t resolve_seed(std::optional<std::uint64_t> flag, std::optional<std::uint64_t> from_file);

/// Analysis configuration for a model file and an optional --seed.
[[nodiscard]] AnalysisConfig analysis_config(const ModelFile& file, std::optional<std::uint64_t> seed_flag);

/// "k=v" items; each item may itself hold several comma-separated pairs.
/// Throws PreconditionError.
[[nodiscard]] Binding parse_assignments(const std::vector<std::string>& items);

struct ResidualReport {
    std::string label;
    std::string expr;
    Binding witness;
    friend bool operator==(const ResidualReport&, const ResidualReport&) = default;
};

struct CountingReport {
    std::size_t n = 0;
    std::size_t n_mu = 0;
    std::size_t n_p = 0;
    std::size_t r_W = 0;
    bool times_momenta = false;
    bool times_rank = false;
    friend bool operator==(const CountingReport&, const CountingReport&) = default;
};

/// Everything `analyze` prints. Expressions are rendered in the input grammar.
struct AnalysisReport {
    std::string model;
    std::vector<std::string> coordinates;
    std::uint64_t seed = 0;
    std::vector<std::vector<std::string>> hessian;
    std::size_t r_W = 0;
    std::vector<std::size_t> permutation;
    std::vector<std::string> canonical;
    std::vector<std::string> noncanonical;
    std::string H0;
    std::vector<std::string> H_alpha;
    std::vector<std::vector<std::string>> F;
    std::vector<std::string> G;
    std::string verdict;
    std::size_t r_F = 0;
    std::vector<std::string> alpha1;
    std::vector<std::string> alpha2;
    std::vector<std::vector<std::string>> lambda;
    std::optional<ResidualReport> residual;
    /// Noncanonical velocities, gauge directions fixed to 0. Empty when inconsistent.
    std::map<std::string, std::string> velocities;
    std::vector<std::string> constraints;
    bool correspondence_brackets = false;
    bool correspondence_hamiltonian = false;
    bool correspondence_multipliers = false;
    CountingReport counting;

    friend bool operator==(const AnalysisReport&, const AnalysisReport&) = default;
};

[[nodiscard]] AnalysisReport make_report(const Analysis& analysis, std::uint64_t seed);
[[nodiscard]] std::string render(const AnalysisReport& report);
/// Throws ParseError.
[[nodiscard]] AnalysisReport parse_report(const std::string& json_text);

struct AnalyzeOptions {
    std::string model_path;
    std::optional<std::uint64_t> seed;
};

struct SimulateOptions {
    std::string model_path;
    double t0 = 0.0;
    double t1 = 1.0;
    double dt = 1e-3;
    std::vector<std::string> init;
    std::vector<std::string> observables;
    std::string method = "rk4";
    std::string out_path;
    std::optional<std::uint64_t> seed;
};

struct VerifyOptions {
    std::string model_path;
    std::optional<std::uint64_t> seed;
    int samples = 100;
    /// Identity checks.
    double tol = 1e-10;
    /// Bracket axioms on random observables.
    double axiom_tol = 1e-8;
    int observables = 20;
    /// Test hook: runs on the analysis before the checks.
    std::function<void(Analysis&)> tamper;
};

struct MultitimeOptions {
    std::string source_path;
    std::vector<std::string> paths;
    std::vector<std::string> init;
    int steps = 1000;
    std::optional<std::uint64_t> seed;
};

struct CompareOptions {
    std::string model_path;
    double t0 = 0.0;
    double t1 = 1.0;
    double dt = 1e-3;
    std::vector<std::string> init;
    std::string method = "rk4";
    double tol = 1e-6;
    std::optional<std::uint64_t> seed;
};

int cmd_analyze(const AnalyzeOptions& opt, std::ostream& out, std::ostream& err);
int cmd_simulate(const SimulateOptions& opt, std::ostream& out, std::ostream& err);
int cmd_verify(const VerifyOptions& opt, std::ostream& out, std::ostream& err);
int cmd_multitime(const MultitimeOptions& opt, std::ostream& out, std::ostream& err);
int cmd_compare(const CompareOptions& opt, std::ostream& out, std::ostream& err);

/// Parses argv and dispatches to a command.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace singmech::cli

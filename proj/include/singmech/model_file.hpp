#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "singmech/model.hpp"

namespace singmech {

/// One value of the key/value file format: a quoted string, a number, or a
/// list of quoted strings.
struct ConfigValue {
    enum class Type { string, number, list };
    Type type = Type::string;
    std::string text;
    double number = 0.0;
    std::vector<std::string> list;
    int line = 0;
};

/// Sections of `key = value` lines. Keys before the first `[section]` header
/// live in section "". `#` starts a comment outside strings; lists may span
/// lines.
using ConfigFile = std::map<std::string, std::map<std::string, ConfigValue>>;

/// Throws ParseError with a line number.
[[nodiscard]] ConfigFile parse_config(std::istream& in, const std::string& origin);

struct ModelFile {
    std::string name;
    std::vector<std::string> coordinates;
    std::string lagrangian;
    std::map<std::string, double> parameters;
    std::optional<std::uint64_t> seed;
    std::optional<int> samples;
    std::optional<double> threshold;

    /// Throws ValidationError or SyntaxError.
    [[nodiscard]] LagrangianModel model() const;
};

/// Throws ParseError when the file is unreadable or malformed.
[[nodiscard]] ModelFile load_model_file(const std::string& path);
[[nodiscard]] ModelFile read_model_file(std::istream& in, const std::string& origin);

/// load_model_file(path).model()
[[nodiscard]] LagrangianModel load_model(const std::string& path);

/// Directly specified multi-time Hamiltonians.
struct HamiltonianFile {
    std::string name;
    std::vector<std::string> canonical;
    std::vector<std::string> times;
    std::vector<std::string> hamiltonians;
};

[[nodiscard]] HamiltonianFile load_hamiltonian_file(const std::string& path);
[[nodiscard]] HamiltonianFile read_hamiltonian_file(std::istream& in, const std::string& origin);

/// True when the file has a `hamiltonians` key (rather than `lagrangian`).
[[nodiscard]] bool is_hamiltonian_file(const std::string& path);

}  // namespace singmech

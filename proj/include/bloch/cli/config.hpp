#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "bloch/errors.hpp"

namespace bloch::cli {

// Invalid configuration: unknown key, wrong type, failed precondition. Exit code 2.
struct ConfigError : DomainError {
    using DomainError::DomainError;
};

enum class ValueKind {
    number,
    integer,
    unsigned_integer,
    text,
    flag,
};

struct KeySpec {
    std::string name;
    ValueKind kind;
    nlohmann::json default_value;
    std::string help;
};

// Flat key/value configuration for one command. Values come from a JSON file and/or
// command-line flags (flags win). Only explicitly set keys are serialized, so
// serialize(parse(file)) is the canonical form of the file.
class RunConfig {
public:
    explicit RunConfig(std::vector<KeySpec> keys);

    const std::vector<KeySpec>& keys() const noexcept { return keys_; }

    void load_json(const nlohmann::json& object);
    void load_file(const std::filesystem::path& path);
    void set(const std::string& key, const nlohmann::json& value);
    // Parses command-line text according to the key's kind.
    void set_from_text(const std::string& key, const std::string& text);

    bool is_set(const std::string& key) const { return values_.contains(key); }

    double number(const std::string& key) const;
    std::int64_t integer(const std::string& key) const;
    std::uint64_t unsigned_integer(const std::string& key) const;
    std::string text(const std::string& key) const;
    bool flag(const std::string& key) const;

    nlohmann::json explicit_values() const;
    nlohmann::json effective_values() const;
    std::string serialize() const;

private:
    const KeySpec& spec(const std::string& key) const;
    const nlohmann::json& lookup(const std::string& key) const;

    std::vector<KeySpec> keys_;
    std::map<std::string, nlohmann::json> values_;
};

} // namespace bloch::cli

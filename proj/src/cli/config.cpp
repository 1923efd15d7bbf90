#include "bloch/cli/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>

namespace bloch::cli {

namespace {

bool matches(ValueKind kind, const nlohmann::json& v) {
    switch (kind) {
    case ValueKind::number:
        return v.is_number();
    case ValueKind::integer:
        return v.is_number_integer();
    case ValueKind::unsigned_integer:
        return v.is_number_unsigned();
    case ValueKind::text:
        return v.is_string();
    case ValueKind::flag:
        return v.is_boolean();
    }
    return false;
}

std::string_view kind_name(ValueKind kind) {
    switch (kind) {
    case ValueKind::number:
        return "a number";
    case ValueKind::integer:
        return "an integer";
    case ValueKind::unsigned_integer:
        return "a non-negative integer";
    case ValueKind::text:
        return "a string";
    case ValueKind::flag:
        return "a boolean";
    }
    return "?";
}

template <class T>
T parse_integral(const std::string& key, const std::string& text) {
    T value{};
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (ec != std::errc{} || ptr != end) {
        throw ConfigError("'" + key + "' expects an integer, got '" + text + "'");
    }
    return value;
}

} // namespace

RunConfig::RunConfig(std::vector<KeySpec> keys) : keys_(std::move(keys)) {}

const KeySpec& RunConfig::spec(const std::string& key) const {
    for (const auto& k : keys_) {
        if (k.name == key) {
            return k;
        }
    }
    throw ConfigError("unknown configuration key '" + key + "'");
}

void RunConfig::set(const std::string& key, const nlohmann::json& value) {
    const KeySpec& s = spec(key);
    if (!matches(s.kind, value)) {
        throw ConfigError("'" + key + "' must be " + std::string(kind_name(s.kind)));
    }
    if (s.kind == ValueKind::number && !std::isfinite(value.get<double>())) {
        throw ConfigError("'" + key + "' must be finite");
    }
    // Integers given for number keys stay integers so the canonical form matches the file.
    values_[key] = value;
}

void RunConfig::set_from_text(const std::string& key, const std::string& text) {
    switch (spec(key).kind) {
    case ValueKind::number: {
        double v = 0.0;
        const auto* end = text.data() + text.size();
        const auto [ptr, ec] = std::from_chars(text.data(), end, v);
        if (ec != std::errc{} || ptr != end) {
            throw ConfigError("'" + key + "' expects a number, got '" + text + "'");
        }
        set(key, v);
        break;
    }
    case ValueKind::integer:
        set(key, parse_integral<std::int64_t>(key, text));
        break;
    case ValueKind::unsigned_integer:
        set(key, parse_integral<std::uint64_t>(key, text));
        break;
    case ValueKind::text:
        set(key, text);
        break;
    case ValueKind::flag:
        if (text == "true" || text == "1") {
            set(key, true);
        } else if (text == "false" || text == "0") {
            set(key, false);
        } else {
            throw ConfigError("'" + key + "' expects true or false");
        }
        break;
    }
}

void RunConfig::load_json(const nlohmann::json& object) {
    if (!object.is_object()) {
        throw ConfigError("configuration must be a flat JSON object");
    }
    for (const auto& [key, value] : object.items()) {
        set(key, value);
    }
}

void RunConfig::load_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open config file " + path.string());
    }
    nlohmann::json parsed;
    try {
        parsed = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError("config file " + path.string() + ": " + e.what());
    }
    load_json(parsed);
}

const nlohmann::json& RunConfig::lookup(const std::string& key) const {
    const KeySpec& s = spec(key);
    const auto it = values_.find(key);
    return it != values_.end() ? it->second : s.default_value;
}

double RunConfig::number(const std::string& key) const { return lookup(key).get<double>(); }

std::int64_t RunConfig::integer(const std::string& key) const {
    return lookup(key).get<std::int64_t>();
}

std::uint64_t RunConfig::unsigned_integer(const std::string& key) const {
    return lookup(key).get<std::uint64_t>();
}

std::string RunConfig::text(const std::string& key) const { return lookup(key).get<std::string>(); }

bool RunConfig::flag(const std::string& key) const { return lookup(key).get<bool>(); }

nlohmann::json RunConfig::explicit_values() const {
    nlohmann::json out = nlohmann::json::object();
    for (const auto& [k, v] : values_) {
        out[k] = v;
    }
    return out;
}

nlohmann::json RunConfig::effective_values() const {
    nlohmann::json out = nlohmann::json::object();
    for (const auto& k : keys_) {
        out[k.name] = lookup(k.name);
    }
    return out;
}

std::string RunConfig::serialize() const { return explicit_values().dump(2) + "\n"; }

} // namespace bloch::cli

#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace kcex {

/// Formats a double with 17 significant digits ("%.17g"), the fixed float
/// format of every emitted document.
std::string format_g17(double v);

/// Ordered key-value document with deterministic JSON serialization: fields
/// serialize in insertion order, floats at 17 significant digits, so equal
/// documents produce byte-identical output.
class Report {
public:
    Report();

    Report& put(const std::string& key, double v);
    Report& put(const std::string& key, int v);
    Report& put(const std::string& key, std::int64_t v);
    Report& put(const std::string& key, bool v);
    Report& put(const std::string& key, const char* v);
    Report& put(const std::string& key, const std::string& v);
    Report& put_array(const std::string& key, std::span<const double> v);

    /// Appends a nested object and returns a view onto it.
    Report child(const std::string& key);

    std::string to_json() const;

private:
    struct Node;
    using Value = std::variant<double, std::int64_t, bool, std::string, std::vector<double>,
                               std::shared_ptr<Node>>;
    struct Node {
        std::vector<std::pair<std::string, Value>> fields;
    };

    explicit Report(std::shared_ptr<Node> node);

    static void write_node(const Node& node, std::string& out, int indent);
    static void write_value(const Value& value, std::string& out, int indent);

    std::shared_ptr<Node> node_;
};

/// Writes `text` to `path`, creating parent directories; filesystem errors
/// surface verbatim in the exception message.
void write_text_file(const std::string& path, const std::string& text);

} // namespace kcex

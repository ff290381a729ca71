#include "kcex/report.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "kcex/errors.hpp"

namespace kcex {

std::string format_g17(double v)
{
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

namespace {

std::string escape(const std::string& s)
{
    std::string out;
    out.reserve(s.size() + 2);
    for (char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            case '\r': out += "\\r"; break;
            default:
                if (static_cast<unsigned char>(c) < 0x20) {
                    char buf[8];
                    std::snprintf(buf, sizeof(buf), "\\u%04x", c);
                    out += buf;
                } else {
                    out += c;
                }
        }
    }
    return out;
}

void pad(std::string& out, int indent)
{
    out.append(static_cast<std::size_t>(indent) * 2, ' ');
}

} // namespace

Report::Report() : node_(std::make_shared<Node>()) {}

Report::Report(std::shared_ptr<Node> node) : node_(std::move(node)) {}

Report& Report::put(const std::string& key, double v)
{
    node_->fields.emplace_back(key, v);
    return *this;
}

Report& Report::put(const std::string& key, int v)
{
    node_->fields.emplace_back(key, static_cast<std::int64_t>(v));
    return *this;
}

Report& Report::put(const std::string& key, std::int64_t v)
{
    node_->fields.emplace_back(key, v);
    return *this;
}

Report& Report::put(const std::string& key, bool v)
{
    node_->fields.emplace_back(key, v);
    return *this;
}

Report& Report::put(const std::string& key, const char* v)
{
    node_->fields.emplace_back(key, std::string(v));
    return *this;
}

Report& Report::put(const std::string& key, const std::string& v)
{
    node_->fields.emplace_back(key, v);
    return *this;
}

Report& Report::put_array(const std::string& key, std::span<const double> v)
{
    node_->fields.emplace_back(key, std::vector<double>(v.begin(), v.end()));
    return *this;
}

Report Report::child(const std::string& key)
{
    auto node = std::make_shared<Node>();
    node_->fields.emplace_back(key, node);
    return Report(node);
}

void Report::write_value(const Value& value, std::string& out, int indent)
{
    if (const auto* d = std::get_if<double>(&value)) {
        out += format_g17(*d);
    } else if (const auto* i = std::get_if<std::int64_t>(&value)) {
        out += std::to_string(*i);
    } else if (const auto* b = std::get_if<bool>(&value)) {
        out += *b ? "true" : "false";
    } else if (const auto* s = std::get_if<std::string>(&value)) {
        out += '"';
        out += escape(*s);
        out += '"';
    } else if (const auto* arr = std::get_if<std::vector<double>>(&value)) {
        out += '[';
        for (std::size_t k = 0; k < arr->size(); ++k) {
            if (k) out += ", ";
            out += format_g17((*arr)[k]);
        }
        out += ']';
    } else {
        write_node(*std::get<std::shared_ptr<Node>>(value), out, indent);
    }
}

void Report::write_node(const Node& node, std::string& out, int indent)
{
    out += "{\n";
    for (std::size_t k = 0; k < node.fields.size(); ++k) {
        pad(out, indent + 1);
        out += '"';
        out += escape(node.fields[k].first);
        out += "\": ";
        write_value(node.fields[k].second, out, indent + 1);
        if (k + 1 < node.fields.size()) out += ',';
        out += '\n';
    }
    pad(out, indent);
    out += '}';
}

std::string Report::to_json() const
{
    std::string out;
    write_node(*node_, out, 0);
    out += '\n';
    return out;
}

void write_text_file(const std::string& path, const std::string& text)
{
    const std::filesystem::path p(path);
    std::error_code ec;
    if (p.has_parent_path()) {
        std::filesystem::create_directories(p.parent_path(), ec);
    }
    std::ofstream os(p, std::ios::binary);
    if (!os) {
        throw Error("IoError", "cannot open '" + path + "' for writing");
    }
    os << text;
    if (!os) {
        throw Error("IoError", "write failed for '" + path + "'");
    }
}

} // namespace kcex

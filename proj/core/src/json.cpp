#include <cstdio>
#include <string>

#include "ipg/engine.hpp"

namespace ipg {

namespace {

void append_json_string(std::string& out, const std::string& s) {
    out += '"';
    for (char ch : s) {
        switch (ch) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            case '\r': out += "\\r"; break;
            default:
                if (static_cast<unsigned char>(ch) < 0x20) {
                    char buf[8];
                    std::snprintf(buf, sizeof(buf), "\\u%04x", ch);
                    out += buf;
                } else {
                    out += ch;
                }
        }
    }
    out += '"';
}

void append_tree(std::string& out, const Tree& t) {
    switch (t.kind) {
        case Tree::Kind::Node: {
            out += "{\"kind\":\"node\",\"nt\":";
            append_json_string(out, t.nt);
            out += ",\"attrs\":{";
            bool first = true;
            for (const auto& [name, value] : t.env) {
                if (name == "EOI" || name == "start" || name == "end") continue;
                if (!first) out += ',';
                first = false;
                append_json_string(out, name);
                out += ':';
                out += std::to_string(value);
            }
            out += "},\"start\":";
            out += std::to_string(t.env.at("start"));
            out += ",\"end\":";
            out += std::to_string(t.env.at("end"));
            out += ",\"children\":[";
            for (std::size_t i = 0; i < t.children.size(); ++i) {
                if (i) out += ',';
                append_tree(out, *t.children[i]);
            }
            out += "]}";
            return;
        }
        case Tree::Kind::Array: {
            out += "{\"kind\":\"array\",\"elems\":[";
            for (std::size_t i = 0; i < t.children.size(); ++i) {
                if (i) out += ',';
                append_tree(out, *t.children[i]);
            }
            out += "]}";
            return;
        }
        case Tree::Kind::Leaf: {
            out += "{\"kind\":\"leaf\",\"bytes\":\"";
            static const char* hex = "0123456789abcdef";
            for (std::uint8_t b : t.bytes) {
                out += hex[b >> 4];
                out += hex[b & 0xF];
            }
            out += "\"}";
            return;
        }
    }
}

}  // namespace

std::string tree_to_json(const Tree& t) {
    std::string out;
    append_tree(out, t);
    return out;
}

std::string stats_to_json(const ParseStats& s) {
    std::string out = "{\"invocations\":";
    out += std::to_string(s.invocations);
    out += ",\"memoHits\":";
    out += std::to_string(s.memo_hits);
    out += ",\"maxDepth\":";
    out += std::to_string(s.max_depth_seen);
    out += "}";
    return out;
}

}  // namespace ipg

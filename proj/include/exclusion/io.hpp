#pragma once

#include <cmath>
#include <cstdio>
#include <memory>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "exclusion/graphs.hpp"

namespace excl {

inline constexpr std::string_view kToolName = "exclusion";
inline constexpr std::string_view kToolVersion = "0.1.0";

// 17 significant digits: enough to reproduce any double bit-exactly, and the
// same bytes on every run.
inline std::string format_double(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

// Minimal deterministic JSON document builder. Object keys keep insertion
// order; doubles are emitted with 17 significant digits; NaN becomes null
// (JSON has no NaN).
class JsonValue {
public:
    static JsonValue object() { return JsonValue(Kind::Object); }
    static JsonValue array() { return JsonValue(Kind::Array); }
    JsonValue() : kind_(Kind::Null) {}
    JsonValue(bool b) : kind_(Kind::Bool), bool_(b) {}
    JsonValue(double x) : kind_(Kind::Double), num_(x) {}
    JsonValue(int x) : kind_(Kind::Int), int_(x) {}
    JsonValue(long long x) : kind_(Kind::Int), int_(x) {}
    JsonValue(unsigned long long x) : kind_(Kind::Int), int_(static_cast<long long>(x)) {}
    JsonValue(std::uint64_t x, int) : kind_(Kind::Int), int_(static_cast<long long>(x)) {}
    JsonValue(const char* s) : kind_(Kind::String), str_(s) {}
    JsonValue(std::string s) : kind_(Kind::String), str_(std::move(s)) {}

    JsonValue& set(const std::string& key, JsonValue v) {
        members_.emplace_back(key, std::move(v));
        return *this;
    }
    JsonValue& push(JsonValue v) {
        members_.emplace_back(std::string(), std::move(v));
        return *this;
    }

    void write(std::ostream& os, int indent = 0) const {
        switch (kind_) {
            case Kind::Null: os << "null"; break;
            case Kind::Bool: os << (bool_ ? "true" : "false"); break;
            case Kind::Int: os << int_; break;
            case Kind::Double:
                if (std::isfinite(num_)) os << format_double(num_);
                else os << "null";
                break;
            case Kind::String: write_escaped(os, str_); break;
            case Kind::Array:
            case Kind::Object: {
                const char open = kind_ == Kind::Array ? '[' : '{';
                const char close = kind_ == Kind::Array ? ']' : '}';
                if (members_.empty()) {
                    os << open << close;
                    break;
                }
                os << open << "\n";
                for (std::size_t i = 0; i < members_.size(); ++i) {
                    pad(os, indent + 2);
                    if (kind_ == Kind::Object) {
                        write_escaped(os, members_[i].first);
                        os << ": ";
                    }
                    members_[i].second.write(os, indent + 2);
                    if (i + 1 < members_.size()) os << ",";
                    os << "\n";
                }
                pad(os, indent);
                os << close;
                break;
            }
        }
    }

    std::string dump() const {
        std::ostringstream os;
        write(os);
        os << "\n";
        return os.str();
    }

private:
    enum class Kind { Null, Bool, Int, Double, String, Array, Object };
    explicit JsonValue(Kind k) : kind_(k) {}

    static void pad(std::ostream& os, int n) {
        for (int i = 0; i < n; ++i) os.put(' ');
    }
    static void write_escaped(std::ostream& os, const std::string& s) {
        os << '"';
        for (char c : s) {
            switch (c) {
                case '"': os << "\\\""; break;
                case '\\': os << "\\\\"; break;
                case '\n': os << "\\n"; break;
                case '\r': os << "\\r"; break;
                case '\t': os << "\\t"; break;
                default:
                    if (static_cast<unsigned char>(c) < 0x20) {
                        char buf[8];
                        std::snprintf(buf, sizeof buf, "\\u%04x", c);
                        os << buf;
                    } else {
                        os << c;
                    }
            }
        }
        os << '"';
    }

    Kind kind_;
    bool bool_ = false;
    double num_ = 0.0;
    long long int_ = 0;
    std::string str_;
    std::vector<std::pair<std::string, JsonValue>> members_;
};

// Exact rationals travel as "num/den" plus a decimal approximation field.
inline JsonValue rational_json(const BigRat& q) {
    JsonValue v = JsonValue::object();
    v.set("rational", rational_string(q));
    v.set("decimal", to_double(q));
    return v;
}

// RFC-4180-style CSV: comma separated, header row, LF line endings, fields
// quoted only when they need it.
class CsvWriter {
public:
    explicit CsvWriter(std::ostream& os) : os_(os) {}

    void row(const std::vector<std::string>& fields) {
        for (std::size_t i = 0; i < fields.size(); ++i) {
            if (i) os_ << ',';
            write_field(fields[i]);
        }
        os_ << '\n';
    }

private:
    void write_field(const std::string& f) {
        if (f.find_first_of(",\"\n\r") == std::string::npos) {
            os_ << f;
            return;
        }
        os_ << '"';
        for (char c : f) {
            if (c == '"') os_ << '"';
            os_ << c;
        }
        os_ << '"';
    }
    std::ostream& os_;
};

}  // namespace excl

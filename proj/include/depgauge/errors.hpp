#pragma once

#include <stdexcept>
#include <string>

namespace depgauge {

// Parse failure for versions, specifiers, requirements, and markers.
// Carries the offending input and, when known, the byte offset.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& input, const std::string& reason)
        : std::runtime_error("parse error: " + reason + " in \"" + input + "\""),
          input_(input), reason_(reason), offset_(std::string::npos) {}

    ParseError(const std::string& input, const std::string& reason, std::size_t offset)
        : std::runtime_error("parse error: " + reason + " at byte " + std::to_string(offset) +
                             " in \"" + input + "\""),
          input_(input), reason_(reason), offset_(offset) {}

    const std::string& input() const { return input_; }
    const std::string& reason() const { return reason_; }
    std::size_t offset() const { return offset_; }

private:
    std::string input_;
    std::string reason_;
    std::size_t offset_;
};

class NetworkError : public std::runtime_error {
public:
    explicit NetworkError(const std::string& what) : std::runtime_error("network error: " + what) {}
};

class NotFoundError : public std::runtime_error {
public:
    explicit NotFoundError(const std::string& name)
        : std::runtime_error("not found: " + name), name_(name) {}
    const std::string& name() const { return name_; }

private:
    std::string name_;
};

class IndexFormatError : public std::runtime_error {
public:
    explicit IndexFormatError(const std::string& what)
        : std::runtime_error("index format error: " + what) {}
};

class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& what) : std::runtime_error("io error: " + what) {}
};

// Vulnerability file violates its schema (missing/badly typed field).
class SchemaError : public std::runtime_error {
public:
    SchemaError(const std::string& what, std::size_t record_index)
        : std::runtime_error("schema error in record " + std::to_string(record_index) + ": " + what),
          record_index_(record_index) {}
    std::size_t record_index() const { return record_index_; }

private:
    std::size_t record_index_;
};

class MissingInputError : public std::runtime_error {
public:
    explicit MissingInputError(const std::string& path)
        : std::runtime_error("missing input: " + path) {}
};

// Input artifact carries a schema tag this build does not understand.
class SchemaMismatchError : public std::runtime_error {
public:
    SchemaMismatchError(const std::string& expected, const std::string& found)
        : std::runtime_error("schema mismatch: expected " + expected + ", found " + found) {}
};

class PackageAbsentError : public std::runtime_error {
public:
    explicit PackageAbsentError(const std::string& name)
        : std::runtime_error("package absent from dataset: " + name) {}
};

}  // namespace depgauge

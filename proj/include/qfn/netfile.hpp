// netfile.hpp: the QNET text format.
//
//   component NAME { inputs = INT; modes = INT; S = m; C = m; Omega = m; }
//   network { use INST : NAME; connect A.out[i] -> B.in[j]; external A.in[i] as NAME; }
//
// Matrices are written [[a, b], [c, d]] with entries such as 1, 0.5-0.25i or
// 2i. "[]" stands for a matrix with no entries (e.g. C of a static
// component), its shape following from inputs and modes. Comments run from
// '#' to end of line.

#pragma once

#include "qfn/errors.hpp"
#include "qfn/network.hpp"

#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace qfn {

class ParseError : public Error {
public:
    ParseError(std::size_t line, std::size_t column, std::string message, std::string snippet);

    std::size_t line() const { return line_; }      // 1-based
    std::size_t column() const { return column_; }  // 1-based
    const std::string& message() const { return message_; }
    const std::string& snippet() const { return snippet_; }  // the offending source line

private:
    std::size_t line_;
    std::size_t column_;
    std::string message_;
    std::string snippet_;
};

struct ComponentDef {
    std::string name;
    LinearComponent component;

    bool operator==(const ComponentDef&) const = default;
};

struct InstanceDef {
    std::string name;
    std::string component;

    bool operator==(const InstanceDef&) const = default;
};

struct EdgeDef {
    std::string from_instance;
    std::size_t from_port = 0;
    std::string to_instance;
    std::size_t to_port = 0;

    bool operator==(const EdgeDef&) const = default;
};

struct ExternalDef {
    std::string instance;
    std::size_t port = 0;
    std::string name;

    bool operator==(const ExternalDef&) const = default;
};

struct NetDocument {
    std::vector<ComponentDef> components;
    std::vector<InstanceDef> instances;
    std::vector<EdgeDef> edges;
    std::vector<ExternalDef> externals;

    const ComponentDef* find_component(std::string_view name) const;

    bool operator==(const NetDocument&) const = default;
};

// Syntax and semantic checks (names, port ranges, fan-in/fan-out, shapes)
// both raise ParseError at the first offending token.
NetDocument parse(std::string_view source);

// Canonical text: fixed key order, one declaration per line, %.17g numbers,
// LF line endings. parse(serialize(doc)) == doc exactly.
std::string serialize(const NetDocument& doc);

// Concatenates the instances in declaration order (one implicit instance per
// component when the network declares none), with labels "<instance>.<port>".
// External inputs are the declared ones followed by the remaining free
// inputs in index order; each is paired with the same-index output when that
// output is free, the rest in index order.
PartitionedComponent build_partitioned(const NetDocument& doc);

// Document holding a single component named `name`.
NetDocument single_component_document(std::string name, const LinearComponent& comp);

// Flat "NAME = matrix;" lists, used for Stratonovich/Ito parameter triples.
using MatrixAssignments = std::vector<std::pair<std::string, ComplexMatrix>>;
MatrixAssignments parse_assignments(std::string_view source);
std::string serialize_assignments(const MatrixAssignments& assignments);

std::string format_complex(Complex z);
std::string format_matrix(const ComplexMatrix& m);

}  // namespace qfn

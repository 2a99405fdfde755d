#include "qfn/netfile.hpp"

#include <cctype>
#include <cstdlib>
#include <cmath>
#include <cstdio>
#include <map>
#include <optional>
#include <set>
#include <sstream>

namespace qfn {

ParseError::ParseError(std::size_t line, std::size_t column, std::string message,
                       std::string snippet)
    : Error("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + message),
      line_(line),
      column_(column),
      message_(std::move(message)),
      snippet_(std::move(snippet)) {}

const ComponentDef* NetDocument::find_component(std::string_view name) const {
    for (const auto& c : components) {
        if (c.name == name) return &c;
    }
    return nullptr;
}

namespace {

enum class TokenKind { Ident, Number, Punct, End };

struct Token {
    TokenKind kind = TokenKind::End;
    std::string text;
    std::size_t offset = 0;
    std::size_t line = 1;
    std::size_t column = 1;
    double value = 0.0;
    bool imaginary = false;
    bool integral = false;
};

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }
bool digit(char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; }

class Lexer {
public:
    explicit Lexer(std::string_view src) : src_(src) {}

    std::vector<Token> run() {
        std::vector<Token> out;
        for (;;) {
            skip_blank();
            Token t;
            t.offset = pos_;
            t.line = line_;
            t.column = pos_ - line_start_ + 1;
            if (pos_ >= src_.size()) {
                // report end of input just past the last token
                if (!out.empty()) {
                    const Token& last = out.back();
                    t.offset = last.offset;
                    t.line = last.line;
                    t.column = last.column + last.text.size();
                }
                t.kind = TokenKind::End;
                out.push_back(t);
                return out;
            }
            const char c = src_[pos_];
            if (ident_start(c)) {
                while (pos_ < src_.size() && ident_char(src_[pos_])) ++pos_;
                t.kind = TokenKind::Ident;
            } else if (digit(c) || (c == '.' && pos_ + 1 < src_.size() && digit(src_[pos_ + 1]))) {
                lex_number(t);
            } else if (c == '-' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '>') {
                pos_ += 2;
                t.kind = TokenKind::Punct;
            } else if (std::string_view("{}[];=:,.+-").find(c) != std::string_view::npos) {
                ++pos_;
                t.kind = TokenKind::Punct;
            } else {
                throw error_at(t, std::string("unexpected character '") + c + "'");
            }
            t.text = std::string(src_.substr(t.offset, pos_ - t.offset));
            out.push_back(std::move(t));
        }
    }

    ParseError error_at(const Token& t, std::string message) const {
        return ParseError(t.line, t.column, std::move(message), line_text(src_, t.offset));
    }

    static std::string line_text(std::string_view src, std::size_t offset) {
        const std::size_t begin = src.rfind('\n', offset == 0 ? 0 : offset - 1);
        const std::size_t from = (begin == std::string_view::npos || offset == 0) ? 0 : begin + 1;
        const std::size_t end = src.find('\n', from);
        return std::string(src.substr(from, end == std::string_view::npos ? end : end - from));
    }

private:
    void skip_blank() {
        while (pos_ < src_.size()) {
            const char c = src_[pos_];
            if (c == '\n') {
                ++pos_;
                ++line_;
                line_start_ = pos_;
            } else if (c == '#') {
                while (pos_ < src_.size() && src_[pos_] != '\n') ++pos_;
            } else if (std::isspace(static_cast<unsigned char>(c))) {
                ++pos_;
            } else {
                return;
            }
        }
    }

    void lex_number(Token& t) {
        const std::size_t begin = pos_;
        bool integral = true;
        while (pos_ < src_.size() && digit(src_[pos_])) ++pos_;
        if (pos_ < src_.size() && src_[pos_] == '.') {
            integral = false;
            ++pos_;
            while (pos_ < src_.size() && digit(src_[pos_])) ++pos_;
        }
        if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
            std::size_t look = pos_ + 1;
            if (look < src_.size() && (src_[look] == '+' || src_[look] == '-')) ++look;
            if (look < src_.size() && digit(src_[look])) {
                integral = false;
                pos_ = look;
                while (pos_ < src_.size() && digit(src_[pos_])) ++pos_;
            }
        }
        const std::string_view digits = src_.substr(begin, pos_ - begin);
        t.kind = TokenKind::Number;
        t.integral = integral;
        // strtod rather than from_chars: subnormal values must parse
        const std::string text(digits);
        char* end = nullptr;
        t.value = std::strtod(text.c_str(), &end);
        if (end != text.c_str() + text.size()) throw error_at(t, "malformed number '" + text + "'");
        if (!std::isfinite(t.value)) throw error_at(t, "number '" + text + "' out of range");
        if (pos_ < src_.size() && src_[pos_] == 'i' &&
            !(pos_ + 1 < src_.size() && ident_char(src_[pos_ + 1]))) {
            ++pos_;
            t.imaginary = true;
            t.integral = false;
        }
        if (pos_ < src_.size() && ident_char(src_[pos_])) {
            throw error_at(t, "malformed number");
        }
    }

    std::string_view src_;
    std::size_t pos_ = 0;
    std::size_t line_ = 1;
    std::size_t line_start_ = 0;
};

struct LocatedMatrix {
    ComplexMatrix value;
    Token at;
    bool empty_literal = false;
};

// Per-instance port bookkeeping for the semantic checks.
struct InstanceState {
    std::size_t n_ports = 0;
    std::set<std::size_t> fed_inputs;
    std::set<std::size_t> used_outputs;
    std::set<std::size_t> external_inputs;
};

class Parser {
public:
    explicit Parser(std::string_view src) : src_(src), lexer_(src), tokens_(lexer_.run()) {}

    NetDocument document() {
        NetDocument doc;
        bool seen_network = false;
        while (peek().kind != TokenKind::End) {
            const Token& t = peek();
            if (is_ident(t, "component")) {
                parse_component(doc);
            } else if (is_ident(t, "network")) {
                if (seen_network) throw error(t, "only one network block is allowed");
                seen_network = true;
                parse_network(doc);
            } else {
                throw error(t, "expected 'component' or 'network', found '" + t.text + "'");
            }
        }
        return doc;
    }

    MatrixAssignments assignments() {
        MatrixAssignments out;
        std::set<std::string> seen;
        while (peek().kind != TokenKind::End) {
            const Token name = expect_ident();
            if (!seen.insert(name.text).second) throw error(name, "duplicate assignment '" + name.text + "'");
            expect_punct("=");
            out.emplace_back(name.text, parse_matrix().value);
            expect_punct(";");
        }
        return out;
    }

private:
    static bool is_ident(const Token& t, std::string_view word) {
        return t.kind == TokenKind::Ident && t.text == word;
    }

    const Token& peek(std::size_t ahead = 0) const {
        return tokens_[std::min(pos_ + ahead, tokens_.size() - 1)];
    }
    const Token& advance() {
        const Token& t = peek();
        if (pos_ < tokens_.size() - 1) ++pos_;
        return t;
    }

    ParseError error(const Token& t, std::string message) const { return lexer_.error_at(t, std::move(message)); }

    static std::string describe(const Token& t) {
        return t.kind == TokenKind::End ? "end of input" : "'" + t.text + "'";
    }

    const Token& expect_punct(std::string_view p) {
        const Token& t = peek();
        if (t.kind != TokenKind::Punct || t.text != p) {
            throw error(t, "expected '" + std::string(p) + "', found " + describe(t));
        }
        return advance();
    }

    const Token& expect_keyword(std::string_view word) {
        const Token& t = peek();
        if (!is_ident(t, word)) throw error(t, "expected '" + std::string(word) + "', found " + describe(t));
        return advance();
    }

    const Token& expect_ident() {
        const Token& t = peek();
        if (t.kind != TokenKind::Ident) throw error(t, "expected a name, found " + describe(t));
        return advance();
    }

    std::pair<std::size_t, Token> expect_int() {
        const Token& t = peek();
        if (t.kind != TokenKind::Number || !t.integral) {
            throw error(t, "expected a non-negative integer, found " + describe(t));
        }
        if (t.value > 1e9) throw error(t, "integer " + t.text + " is too large");
        advance();
        return {static_cast<std::size_t>(t.value), t};
    }

    Complex parse_cnum() {
        double sign = 1.0;
        if (peek().kind == TokenKind::Punct && (peek().text == "-" || peek().text == "+")) {
            sign = advance().text == "-" ? -1.0 : 1.0;
        }
        const Token& first = peek();
        if (first.kind != TokenKind::Number) throw error(first, "expected a number, found " + describe(first));
        advance();
        if (first.imaginary) return {0.0, sign * first.value};
        const double re = sign * first.value;
        const Token& op = peek();
        if (op.kind == TokenKind::Punct && (op.text == "+" || op.text == "-") &&
            peek(1).kind == TokenKind::Number && peek(1).imaginary) {
            advance();
            const double im = advance().value;
            return {re, op.text == "-" ? -im : im};
        }
        return {re, 0.0};
    }

    LocatedMatrix parse_matrix() {
        LocatedMatrix out;
        out.at = expect_punct("[");
        if (peek().kind == TokenKind::Punct && peek().text == "]") {
            advance();
            out.empty_literal = true;
            out.value = ComplexMatrix(0, 0);
            return out;
        }
        std::vector<std::vector<Complex>> rows;
        for (;;) {
            const Token row_start = expect_punct("[");
            std::vector<Complex> row{parse_cnum()};
            while (peek().kind == TokenKind::Punct && peek().text == ",") {
                advance();
                row.push_back(parse_cnum());
            }
            expect_punct("]");
            if (!rows.empty() && row.size() != rows.front().size()) {
                throw error(row_start, "row has " + std::to_string(row.size()) + " entries, expected " +
                                           std::to_string(rows.front().size()));
            }
            rows.push_back(std::move(row));
            if (peek().kind == TokenKind::Punct && peek().text == ",") {
                advance();
                continue;
            }
            expect_punct("]");
            break;
        }
        out.value.resize(static_cast<Eigen::Index>(rows.size()),
                         static_cast<Eigen::Index>(rows.front().size()));
        for (std::size_t i = 0; i < rows.size(); ++i) {
            for (std::size_t j = 0; j < rows[i].size(); ++j) {
                out.value(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
            }
        }
        return out;
    }

    ComplexMatrix shaped(const LocatedMatrix& m, std::size_t rows, std::size_t cols,
                         const std::string& what) const {
        const auto r = static_cast<Eigen::Index>(rows);
        const auto c = static_cast<Eigen::Index>(cols);
        if (m.empty_literal && rows * cols == 0) return ComplexMatrix(r, c);
        if (m.value.rows() != r || m.value.cols() != c) {
            throw error(m.at, what + " must be " + std::to_string(rows) + "x" + std::to_string(cols) +
                                  ", got " + std::to_string(m.value.rows()) + "x" +
                                  std::to_string(m.value.cols()));
        }
        return m.value;
    }

    void parse_component(NetDocument& doc) {
        expect_keyword("component");
        const Token name = expect_ident();
        if (doc.find_component(name.text)) throw error(name, "duplicate component '" + name.text + "'");
        expect_punct("{");

        std::optional<std::size_t> inputs, modes;
        std::map<std::string, LocatedMatrix> matrices;
        while (!(peek().kind == TokenKind::Punct && peek().text == "}")) {
            const Token key = expect_ident();
            const bool is_count = key.text == "inputs" || key.text == "modes";
            const bool is_matrix = key.text == "S" || key.text == "C" || key.text == "Omega";
            if (!is_count && !is_matrix) throw error(key, "unknown component key '" + key.text + "'");
            const bool repeated = key.text == "inputs"  ? inputs.has_value()
                                  : key.text == "modes" ? modes.has_value()
                                                        : matrices.contains(key.text);
            if (repeated) throw error(key, "key '" + key.text + "' given twice");
            expect_punct("=");
            if (key.text == "inputs") {
                inputs = expect_int().first;
            } else if (key.text == "modes") {
                modes = expect_int().first;
            } else {
                matrices.emplace(key.text, parse_matrix());
            }
            expect_punct(";");
        }
        const Token close = expect_punct("}");
        for (const char* key : {"inputs", "modes", "S", "C", "Omega"}) {
            const bool present = std::string_view(key) == "inputs"  ? inputs.has_value()
                                 : std::string_view(key) == "modes" ? modes.has_value()
                                                                    : matrices.contains(key);
            if (!present) throw error(close, std::string("component is missing key '") + key + "'");
        }
        ComplexMatrix s = shaped(matrices.at("S"), *inputs, *inputs, "S");
        ComplexMatrix c = shaped(matrices.at("C"), *inputs, *modes, "C");
        ComplexMatrix omega = shaped(matrices.at("Omega"), *modes, *modes, "Omega");
        doc.components.push_back({name.text, LinearComponent(std::move(s), std::move(c), std::move(omega))});
    }

    struct PortRef {
        std::string instance;
        std::size_t port = 0;
        Token at;  // the index token
    };

    // NAME "." "out"|"in" "[" INT "]"
    PortRef port_ref(std::string_view direction) {
        const Token inst = expect_ident();
        const auto it = instances_.find(inst.text);
        if (it == instances_.end()) throw error(inst, "unknown instance '" + inst.text + "'");
        expect_punct(".");
        expect_keyword(direction);
        expect_punct("[");
        auto [index, at] = expect_int();
        if (index >= it->second.n_ports) {
            throw error(at, "port index " + std::to_string(index) + " out of range for '" + inst.text +
                                "' (" + std::to_string(it->second.n_ports) + " ports)");
        }
        expect_punct("]");
        return {inst.text, index, at};
    }

    void parse_network(NetDocument& doc) {
        expect_keyword("network");
        expect_punct("{");
        std::set<std::string> external_names;
        while (!(peek().kind == TokenKind::Punct && peek().text == "}")) {
            const Token& head = peek();
            if (is_ident(head, "use")) {
                advance();
                const Token inst = expect_ident();
                if (instances_.contains(inst.text)) throw error(inst, "duplicate instance '" + inst.text + "'");
                expect_punct(":");
                const Token comp = expect_ident();
                const ComponentDef* def = doc.find_component(comp.text);
                if (!def) throw error(comp, "unknown component '" + comp.text + "'");
                expect_punct(";");
                instances_[inst.text].n_ports = def->component.n_ports();
                doc.instances.push_back({inst.text, comp.text});
            } else if (is_ident(head, "connect")) {
                advance();
                const PortRef src = port_ref("out");
                expect_punct("->");
                const PortRef dst = port_ref("in");
                const std::string& from = src.instance;
                const std::string& to = dst.instance;
                const std::size_t out_port = src.port;
                const std::size_t in_port = dst.port;
                const Token* out_at = &src.at;
                const Token* in_at = &dst.at;
                expect_punct(";");
                if (!instances_[from].used_outputs.insert(out_port).second) {
                    throw error(*out_at, "output " + from + ".out[" + std::to_string(out_port) +
                                             "] already feeds a channel");
                }
                auto& target = instances_[to];
                if (target.external_inputs.contains(in_port)) {
                    throw error(*in_at, "input " + to + ".in[" + std::to_string(in_port) +
                                            "] is declared external");
                }
                if (!target.fed_inputs.insert(in_port).second) {
                    throw error(*in_at, "input " + to + ".in[" + std::to_string(in_port) +
                                            "] already has a feeding channel");
                }
                doc.edges.push_back({from, out_port, to, in_port});
            } else if (is_ident(head, "external")) {
                advance();
                const PortRef ref = port_ref("in");
                const std::string& inst = ref.instance;
                const std::size_t port = ref.port;
                const Token* in_at = &ref.at;
                expect_keyword("as");
                const Token name = expect_ident();
                expect_punct(";");
                auto& state = instances_[inst];
                if (state.fed_inputs.contains(port)) {
                    throw error(*in_at, "input " + inst + ".in[" + std::to_string(port) +
                                            "] is connected and cannot be external");
                }
                if (!state.external_inputs.insert(port).second) {
                    throw error(*in_at, "input " + inst + ".in[" + std::to_string(port) +
                                            "] is already external");
                }
                if (!external_names.insert(name.text).second) {
                    throw error(name, "duplicate external name '" + name.text + "'");
                }
                doc.externals.push_back({inst, port, name.text});
            } else {
                throw error(head, "expected 'use', 'connect', 'external' or '}', found " + describe(head));
            }
        }
        expect_punct("}");
    }

    std::string_view src_;
    Lexer lexer_;
    std::vector<Token> tokens_;
    std::size_t pos_ = 0;
    std::map<std::string, InstanceState> instances_;
};

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

NetDocument parse(std::string_view source) { return Parser(source).document(); }

MatrixAssignments parse_assignments(std::string_view source) { return Parser(source).assignments(); }

std::string format_complex(Complex z) {
    const double re = z.real();
    const double im = z.imag();
    if (im == 0.0 && !std::signbit(im)) return format_double(re);
    if (re == 0.0 && !std::signbit(re)) return format_double(im) + "i";
    const std::string mag = format_double(std::abs(im));
    return format_double(re) + (std::signbit(im) ? "-" : "+") + mag + "i";
}

std::string format_matrix(const ComplexMatrix& m) {
    if (m.size() == 0) return "[]";
    std::string out = "[";
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        out += i ? ", [" : "[";
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            if (j) out += ", ";
            out += format_complex(m(i, j));
        }
        out += "]";
    }
    return out + "]";
}

std::string serialize(const NetDocument& doc) {
    std::ostringstream out;
    for (const auto& def : doc.components) {
        const LinearComponent& c = def.component;
        out << "component " << def.name << " {\n"
            << "  inputs = " << c.n_ports() << ";\n"
            << "  modes = " << c.m_modes() << ";\n"
            << "  S = " << format_matrix(c.S()) << ";\n"
            << "  C = " << format_matrix(c.C()) << ";\n"
            << "  Omega = " << format_matrix(c.Omega()) << ";\n"
            << "}\n";
    }
    if (!doc.instances.empty() || !doc.edges.empty() || !doc.externals.empty()) {
        out << "network {\n";
        for (const auto& inst : doc.instances) out << "  use " << inst.name << " : " << inst.component << ";\n";
        for (const auto& e : doc.edges) {
            out << "  connect " << e.from_instance << ".out[" << e.from_port << "] -> " << e.to_instance
                << ".in[" << e.to_port << "];\n";
        }
        for (const auto& x : doc.externals) {
            out << "  external " << x.instance << ".in[" << x.port << "] as " << x.name << ";\n";
        }
        out << "}\n";
    }
    return out.str();
}

std::string serialize_assignments(const MatrixAssignments& assignments) {
    std::string out;
    for (const auto& [name, m] : assignments) out += name + " = " + format_matrix(m) + ";\n";
    return out;
}

NetDocument single_component_document(std::string name, const LinearComponent& comp) {
    NetDocument doc;
    doc.components.push_back({std::move(name), comp.with_labels({}, {})});
    return doc;
}

PartitionedComponent build_partitioned(const NetDocument& doc) {
    std::vector<InstanceDef> instances = doc.instances;
    if (instances.empty()) {
        for (const auto& c : doc.components) instances.push_back({c.name, c.name});
    }

    LinearComponent all;
    std::map<std::string, std::size_t> offset;
    for (const auto& inst : instances) {
        const ComponentDef* def = doc.find_component(inst.component);
        if (!def) throw BadPartition("instance '" + inst.name + "' uses unknown component '" + inst.component + "'");
        offset[inst.name] = all.n_ports();
        const LinearComponent part = def->component.with_labels({}, {}).prefixed(inst.name);
        all = concatenate(all, part);
    }
    const auto global = [&](const std::string& inst, std::size_t port) {
        const auto it = offset.find(inst);
        if (it == offset.end()) throw BadPartition("unknown instance '" + inst + "'");
        return it->second + port;
    };

    const std::size_t n = all.n_ports();
    std::vector<Channel> channels;
    std::vector<bool> input_used(n, false), output_used(n, false);
    for (const auto& e : doc.edges) {
        const Channel ch{global(e.from_instance, e.from_port), global(e.to_instance, e.to_port)};
        if (ch.from_output >= n || ch.to_input >= n) throw BadPartition("edge port out of range");
        output_used[ch.from_output] = true;
        input_used[ch.to_input] = true;
        channels.push_back(ch);
    }

    ExternalPorts ext;
    std::vector<std::optional<std::string>> names;
    for (const auto& x : doc.externals) {
        const std::size_t p = global(x.instance, x.port);
        if (p >= n || input_used[p]) throw BadPartition("external input is not free");
        input_used[p] = true;
        ext.inputs.push_back(p);
        names.emplace_back(x.name);
    }
    for (std::size_t p = 0; p < n; ++p) {
        if (!input_used[p]) {
            ext.inputs.push_back(p);
            names.emplace_back();
        }
    }

    constexpr std::size_t unpaired = static_cast<std::size_t>(-1);
    ext.outputs.assign(ext.inputs.size(), unpaired);
    for (std::size_t j = 0; j < ext.inputs.size(); ++j) {
        const std::size_t p = ext.inputs[j];
        if (!output_used[p]) {
            output_used[p] = true;
            ext.outputs[j] = p;
        }
    }
    std::size_t next = 0;
    for (auto& out : ext.outputs) {
        if (out != unpaired) continue;
        while (next < n && output_used[next]) ++next;
        if (next == n) throw BadPartition("more external inputs than free outputs");
        output_used[next] = true;
        out = next;
    }

    for (std::size_t j = 0; j < ext.inputs.size(); ++j) {
        if (names[j]) {
            ext.labels.push_back(*names[j]);
        } else {
            const std::string& in = all.port_labels()[ext.inputs[j]];
            const std::string& out = all.port_labels()[ext.outputs[j]];
            ext.labels.push_back(in == out ? in : in + "~" + out);
        }
    }
    return PartitionedComponent::from_channels(std::move(all), channels, std::move(ext));
}

}  // namespace qfn

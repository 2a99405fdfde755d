#include "qfn/cli.hpp"

#include "qfn/errors.hpp"
#include "qfn/netfile.hpp"
#include "qfn/network.hpp"
#include "qfn/stratcal.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

namespace qfn::cli {

namespace {

std::optional<double> parse_double(std::string_view text) {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(v)) return std::nullopt;
    return v;
}

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// Problems with the input files rather than with the model.
class InputError : public std::runtime_error {
public:
    InputError(int code, const std::string& message) : std::runtime_error(message), code_(code) {}
    int code() const { return code_; }

private:
    int code_;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError(kExitUsage, "cannot read '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

NetDocument load_document(const std::string& path) {
    const std::string text = read_file(path);
    try {
        return parse(text);
    } catch (const ParseError& e) {
        throw InputError(kExitParse, path + ":" + std::to_string(e.line()) + ":" +
                                         std::to_string(e.column()) + ": " + e.message() + "\n  " +
                                         e.snippet());
    }
}

// The component a file describes: its network reduced, or its components
// side by side when no channel is declared.
LinearComponent load_component(const std::string& path) {
    return feedback_reduce(build_partitioned(load_document(path)));
}

std::map<std::string, ComplexMatrix> load_triple(const std::string& path,
                                                 const std::array<const char*, 3>& keys) {
    const std::string text = read_file(path);
    MatrixAssignments parsed;
    try {
        parsed = parse_assignments(text);
    } catch (const ParseError& e) {
        throw InputError(kExitParse, path + ":" + std::to_string(e.line()) + ":" +
                                         std::to_string(e.column()) + ": " + e.message() + "\n  " +
                                         e.snippet());
    }
    std::map<std::string, ComplexMatrix> out(parsed.begin(), parsed.end());
    for (const char* key : keys) {
        if (!out.contains(key)) throw InputError(kExitParse, path + ": missing matrix '" + key + "'");
    }
    if (out.size() != keys.size()) throw InputError(kExitParse, path + ": unexpected extra matrices");

    // "[]" parses as 0x0; give empty matrices the shape implied by the others.
    const Eigen::Index n = out[keys[0]].rows();
    const Eigen::Index m = out[keys[2]].rows();
    const auto fit = [](ComplexMatrix& mat, Eigen::Index r, Eigen::Index c) {
        if (mat.size() == 0 && r * c == 0) mat.resize(r, c);
    };
    fit(out[keys[0]], n, n);
    fit(out[keys[1]], n, m);
    fit(out[keys[2]], m, m);
    return out;
}

void print_labeled(std::ostream& out, const std::string& title, const ComplexMatrix& m,
                   const std::vector<std::string>& rows, const std::vector<std::string>& cols) {
    out << title << " (" << m.rows() << "x" << m.cols() << ")\n";
    out << "\t";
    for (std::size_t j = 0; j < cols.size(); ++j) out << (j ? "\t" : "") << cols[j];
    out << "\n";
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        out << rows[static_cast<std::size_t>(i)];
        for (Eigen::Index j = 0; j < m.cols(); ++j) out << "\t" << format_complex(m(i, j));
        out << "\n";
    }
}

void print_matrix_csv(std::ostream& out, const std::string& name, const ComplexMatrix& m) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            out << name << "," << i << "," << j << "," << num(m(i, j).real()) << ","
                << num(m(i, j).imag()) << "\n";
        }
    }
}

ComplexMatrix abs_entries(const ComplexMatrix& m) { return m.cwiseAbs().cast<Complex>(); }

void emit_component(std::ostream& out, const std::string& name, const LinearComponent& comp,
                    OutputFormat format) {
    switch (format) {
        case OutputFormat::Qnet:
            out << serialize(single_component_document(name, comp));
            out << "# abs(C) = " << format_matrix(abs_entries(comp.C())) << "\n";
            break;
        case OutputFormat::Table:
            print_labeled(out, "S", comp.S(), comp.port_labels(), comp.port_labels());
            print_labeled(out, "C", comp.C(), comp.port_labels(), comp.mode_labels());
            print_labeled(out, "abs(C)", abs_entries(comp.C()), comp.port_labels(), comp.mode_labels());
            print_labeled(out, "Omega", comp.Omega(), comp.mode_labels(), comp.mode_labels());
            break;
        case OutputFormat::Csv:
            out << "matrix,row,col,re,im\n";
            print_matrix_csv(out, "S", comp.S());
            print_matrix_csv(out, "C", comp.C());
            print_matrix_csv(out, "Omega", comp.Omega());
            break;
    }
}

void report_issues(std::ostream& out, const std::string& subject, const ValidationReport& report) {
    if (report.ok()) {
        out << subject << ": ok\n";
        return;
    }
    for (const auto& issue : report.issues) {
        out << subject << ": " << issue.message << " (residual " << num(issue.residual) << ")\n";
    }
}

int run_check(const RunConfig& cfg, std::ostream& out) {
    const NetDocument doc = load_document(cfg.inputs.at(0));
    bool ok = true;
    for (const auto& def : doc.components) {
        const ValidationReport report = validate(def.component, cfg.tol);
        report_issues(out, "component " + def.name, report);
        ok = ok && report.ok();
    }
    if (!doc.instances.empty()) {
        const ValidationReport report = validate(feedback_reduce(build_partitioned(doc)), cfg.tol);
        report_issues(out, "network", report);
        ok = ok && report.ok();
    }
    return ok ? kExitOk : kExitValidation;
}

int run_tf(const RunConfig& cfg, std::ostream& out) {
    const LinearComponent comp = load_component(cfg.inputs.at(0));
    const TransferEvaluation tf = eval_transfer(comp, *cfg.s);
    const OutputFormat format = cfg.format.value_or(OutputFormat::Table);
    if (format == OutputFormat::Csv) {
        out << "matrix,row,col,re,im\n";
        print_matrix_csv(out, "Xi", tf.Xi);
        print_matrix_csv(out, "xi", tf.xi);
    } else {
        out << "s = " << format_complex(tf.s) << "\n";
        print_labeled(out, "Xi", tf.Xi, comp.port_labels(), comp.port_labels());
        print_labeled(out, "xi", tf.xi, comp.port_labels(), comp.mode_labels());
    }
    return kExitOk;
}

int run_freqresp(const RunConfig& cfg, std::ostream& out) {
    const LinearComponent comp = load_component(cfg.inputs.at(0));
    const std::vector<double> omegas = cfg.grid->points();
    const auto n = static_cast<Eigen::Index>(comp.n_ports());

    out << "omega";
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            // quoted, since the names contain commas
            out << ",\"re(Xi[" << i << "," << j << "])\",\"im(Xi[" << i << "," << j << "])\"";
        }
    }
    out << ",unitarity_residual\n";
    for (const auto& point : freq_response(comp, omegas, cfg.sigma)) {
        out << num(point.omega);
        if (!point.value) {
            for (Eigen::Index k = 0; k < 2 * n * n + 1; ++k) out << ",NA";
            out << "\n";
            continue;
        }
        const ComplexMatrix& xi = point.value->Xi;
        for (Eigen::Index i = 0; i < n; ++i) {
            for (Eigen::Index j = 0; j < n; ++j) out << "," << num(xi(i, j).real()) << "," << num(xi(i, j).imag());
        }
        out << "," << num(unitarity_residual(xi)) << "\n";
    }
    return kExitOk;
}

void emit_residuals(std::ostream& out, const ItoTableResiduals& r) {
    out << "# residual scattering = " << num(r.scattering) << "\n";
    out << "# residual coupling = " << num(r.coupling) << "\n";
    out << "# residual damping = " << num(r.damping) << "\n";
}

int run_strat2ito(const RunConfig& cfg, std::ostream& out) {
    auto m = load_triple(cfg.inputs.at(0), {"E", "F", "K"});
    const StratonovichModel sm{m["E"], m["F"], m["K"]};
    const LinearComponent comp = strat_to_ito(sm);
    out << serialize_assignments({{"S", comp.S()}, {"C", comp.C()}, {"Omega", comp.Omega()}});
    const ItoTableResiduals r = ito_table_residuals(sm, comp);
    emit_residuals(out, r);
    return r.max() <= cfg.tol ? kExitOk : kExitValidation;
}

int run_ito2strat(const RunConfig& cfg, std::ostream& out) {
    auto m = load_triple(cfg.inputs.at(0), {"S", "C", "Omega"});
    const LinearComponent comp(m["S"], m["C"], m["Omega"]);
    const StratonovichModel sm = ito_to_strat(comp);
    out << serialize_assignments({{"E", sm.E}, {"F", sm.F}, {"K", sm.K}});
    const ItoTableResiduals r = ito_table_residuals(sm, comp);
    emit_residuals(out, r);
    return r.max() <= cfg.tol ? kExitOk : kExitValidation;
}

int dispatch(const RunConfig& cfg, std::ostream& out) {
    const OutputFormat qnet = cfg.format.value_or(OutputFormat::Qnet);
    switch (cfg.command) {
        case Command::Check:
            return run_check(cfg, out);
        case Command::Reduce:
            emit_component(out, "reduced", load_component(cfg.inputs.at(0)), qnet);
            return kExitOk;
        case Command::Tf:
            return run_tf(cfg, out);
        case Command::Freqresp:
            return run_freqresp(cfg, out);
        case Command::Series:
            emit_component(out, "series",
                           series_product(load_component(cfg.inputs.at(0)), load_component(cfg.inputs.at(1))),
                           qnet);
            return kExitOk;
        case Command::Star: {
            const LinearComponent a = load_component(cfg.inputs.at(0));
            const LinearComponent b = load_component(cfg.inputs.at(1));
            const StarWiring wiring = StarWiring::split(a.n_ports(), b.n_ports(), cfg.internal);
            emit_component(out, "star", redheffer_star(a, b, wiring), qnet);
            return kExitOk;
        }
        case Command::Strat2Ito:
            return run_strat2ito(cfg, out);
        case Command::Ito2Strat:
            return run_ito2strat(cfg, out);
    }
    return kExitUsage;
}

std::size_t required_inputs(Command c) {
    return c == Command::Series || c == Command::Star ? 2 : 1;
}

}  // namespace

std::vector<double> Grid::points() const {
    std::vector<double> out;
    out.reserve(count);
    for (std::size_t k = 0; k < count; ++k) {
        out.push_back(count == 1 ? start
                                 : start + (stop - start) * static_cast<double>(k) /
                                               static_cast<double>(count - 1));
    }
    return out;
}

std::optional<Grid> parse_grid(const std::string& text) {
    const auto first = text.find(':');
    const auto second = first == std::string::npos ? first : text.find(':', first + 1);
    if (second == std::string::npos) return std::nullopt;
    const auto a = parse_double(std::string_view(text).substr(0, first));
    const auto b = parse_double(std::string_view(text).substr(first + 1, second - first - 1));
    const std::string_view count_text = std::string_view(text).substr(second + 1);
    std::size_t count = 0;
    const auto [ptr, ec] = std::from_chars(count_text.data(), count_text.data() + count_text.size(), count);
    if (!a || !b || ec != std::errc() || ptr != count_text.data() + count_text.size() || count < 1) {
        return std::nullopt;
    }
    return Grid{*a, *b, count};
}

std::optional<Complex> parse_complex_pair(const std::string& text) {
    const auto comma = text.find(',');
    if (comma == std::string::npos) return std::nullopt;
    const auto re = parse_double(std::string_view(text).substr(0, comma));
    const auto im = parse_double(std::string_view(text).substr(comma + 1));
    if (!re || !im) return std::nullopt;
    return Complex(*re, *im);
}

int run(const RunConfig& config, std::ostream& out, std::ostream& err) {
    if (config.inputs.size() != required_inputs(config.command)) {
        err << "error: expected " << required_inputs(config.command) << " input file(s)\n";
        return kExitUsage;
    }
    if (!(config.tol > 0.0)) {
        err << "error: --tol must be positive\n";
        return kExitUsage;
    }
    if (config.command == Command::Tf && !config.s) {
        err << "error: tf needs --s RE,IM\n";
        return kExitUsage;
    }
    if (config.command == Command::Freqresp && !config.grid) {
        err << "error: freqresp needs --grid a:b:n\n";
        return kExitUsage;
    }

    std::ostringstream buffer;
    int code = kExitOk;
    try {
        code = dispatch(config, buffer);
    } catch (const InputError& e) {
        err << "error: " << e.what() << "\n";
        return e.code();
    } catch (const AlgebraicLoop& e) {
        err << "algebraic loop: " << e.what() << "\n";
        return kExitSingular;
    } catch (const SingularAtS& e) {
        err << "singular: " << e.what() << "\n";
        return kExitSingular;
    } catch (const CayleySingular& e) {
        err << "singular: " << e.what() << "\n";
        return kExitSingular;
    } catch (const SingularMatrix& e) {
        err << "singular: " << e.what() << "\n";
        return kExitSingular;
    } catch (const OutsideDomain& e) {
        err << "singular: " << e.what() << "\n";
        return kExitSingular;
    } catch (const Error& e) {
        err << "invalid model: " << e.what() << "\n";
        return kExitValidation;
    }

    if (config.output) {
        std::ofstream file(*config.output, std::ios::binary);
        if (!file || !(file << buffer.str())) {
            err << "error: cannot write '" << *config.output << "'\n";
            return kExitUsage;
        }
    } else {
        out << buffer.str();
    }
    return code;
}

std::optional<int> parse_arguments(int argc, const char* const* argv, RunConfig& config,
                                   std::ostream& out, std::ostream& err) {
    // Option values such as "-5:5:11" or "-1,2" would otherwise be read as flags.
    std::vector<std::string> args;
    for (int k = 1; k < argc; ++k) {
        const std::string a = argv[k];
        if ((a == "--grid" || a == "--s") && k + 1 < argc && argv[k + 1][0] == '-') {
            args.push_back(a + "=" + argv[++k]);
        } else {
            args.push_back(a);
        }
    }
    std::reverse(args.begin(), args.end());

    CLI::App app{"Linear quantum feedback network tool", "qfn"};
    app.require_subcommand(1);
    app.fallthrough();
    std::string output;
    std::string format;
    double tol = config.tol;
    app.add_option("-o,--output", output, "Write data to this file instead of stdout");
    app.add_option("--format", format, "Output format")->check(CLI::IsMember({"table", "csv", "qnet"}));
    app.add_option("--tol", tol, "Validation tolerance");

    const std::map<std::string, std::pair<Command, std::string>> commands = {
        {"check", {Command::Check, "Validate every component and the reduced network"}},
        {"reduce", {Command::Reduce, "Eliminate internal channels and print the reduced component"}},
        {"tf", {Command::Tf, "Evaluate Xi(s) and xi(s)"}},
        {"freqresp", {Command::Freqresp, "Frequency response on the imaginary axis as CSV"}},
        {"series", {Command::Series, "Series product: the second file feeds the first"}},
        {"star", {Command::Star, "Redheffer star product of two components"}},
        {"strat2ito", {Command::Strat2Ito, "Convert an E, F, K triple to S, C, Omega"}},
        {"ito2strat", {Command::Ito2Strat, "Convert an S, C, Omega triple to E, F, K"}},
    };
    std::map<std::string, CLI::App*> subs;
    std::vector<std::string> files;
    std::string s_text;
    std::string grid_text;
    double sigma = config.sigma;
    std::size_t internal = config.internal;
    for (const auto& [name, entry] : commands) {
        CLI::App* sub = app.add_subcommand(name, entry.second);
        sub->add_option("files", files, "Input files")->required();
        if (name == "tf") sub->add_option("--s", s_text, "Laplace point RE,IM")->required();
        if (name == "freqresp") {
            sub->add_option("--grid", grid_text, "Frequency grid start:stop:count")->required();
            sub->add_option("--sigma", sigma, "Real offset of the evaluation points");
        }
        if (name == "star") sub->add_option("--internal", internal, "Number of inner channels");
        subs[name] = sub;
    }

    try {
        app.parse(args);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << "\n";
        return kExitUsage;
    }

    for (const auto& [name, sub] : subs) {
        if (sub->parsed()) config.command = commands.at(name).first;
    }
    config.inputs = files;
    if (!output.empty()) config.output = output;
    if (!format.empty()) {
        config.format = format == "table" ? OutputFormat::Table
                        : format == "csv" ? OutputFormat::Csv
                                          : OutputFormat::Qnet;
    }
    config.tol = tol;
    config.sigma = sigma;
    config.internal = internal;
    if (!s_text.empty()) {
        config.s = parse_complex_pair(s_text);
        if (!config.s) {
            err << "usage error: --s expects RE,IM\n";
            return kExitUsage;
        }
    }
    if (!grid_text.empty()) {
        config.grid = parse_grid(grid_text);
        if (!config.grid) {
            err << "usage error: --grid expects start:stop:count with count >= 1\n";
            return kExitUsage;
        }
    }
    return std::nullopt;
}

int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    RunConfig config;
    if (const auto early = parse_arguments(argc, argv, config, out, err)) return *early;
    return run(config, out, err);
}

}  // namespace qfn::cli

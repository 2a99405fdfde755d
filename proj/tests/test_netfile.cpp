#include "qfn/netfile.hpp"
#include "qfn/network.hpp"
#include "support/random.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

namespace qfn {
namespace {

using testing::Rng;
namespace fs = std::filesystem;

const fs::path kData = QFN_TEST_DATA_DIR;

std::string read(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::vector<fs::path> files_in(const fs::path& dir) {
    std::vector<fs::path> out;
    for (const auto& entry : fs::directory_iterator(dir)) out.push_back(entry.path());
    std::sort(out.begin(), out.end());
    return out;
}

// Source text from the reported (line, column) onward on that line.
std::string at_location(const std::string& src, std::size_t line, std::size_t column) {
    std::size_t pos = 0;
    for (std::size_t l = 1; l < line; ++l) pos = src.find('\n', pos) + 1;
    const std::size_t end = src.find('\n', pos);
    return src.substr(pos, end == std::string::npos ? std::string::npos : end - pos).substr(column - 1);
}

const char* kCavity = "component cav { inputs = 1; modes = 1; S = [[1]]; C = [[1]]; Omega = [[0]]; }\n";

TEST(Parse, SingleCavity) {
    const NetDocument doc = parse(kCavity);
    ASSERT_EQ(doc.components.size(), 1u);
    EXPECT_EQ(doc.components[0].name, "cav");
    EXPECT_TRUE(doc.edges.empty());
    EXPECT_EQ(doc.components[0].component, make_cavity({1.0, 0.0, 0.0}));
}

TEST(Parse, ComplexNumberForms) {
    const NetDocument doc = parse(
        "component m { inputs = 2; modes = 0; S = [[1.0, 0.5-0.25i], [2i, -1-2i]]; C = []; Omega = []; }");
    const ComplexMatrix& s = doc.components[0].component.S();
    EXPECT_EQ(s(0, 0), Complex(1.0, 0.0));
    EXPECT_EQ(s(0, 1), Complex(0.5, -0.25));
    EXPECT_EQ(s(1, 0), Complex(0.0, 2.0));
    EXPECT_EQ(s(1, 1), Complex(-1.0, -2.0));
}

TEST(Parse, SeriesWiringGivesUnitEta) {
    const NetDocument doc = parse(std::string(kCavity) +
                                  "network { use a : cav; use b : cav; connect a.out[0] -> b.in[0]; }");
    ASSERT_EQ(doc.edges.size(), 1u);
    const PartitionedComponent pc = build_partitioned(doc);
    EXPECT_TRUE(identical(pc.eta(), identity(1)));
    EXPECT_EQ(pc.internal_out(), (std::vector<std::size_t>{0}));
    EXPECT_EQ(pc.internal_in(), (std::vector<std::size_t>{1}));
}

TEST(Parse, OutputToOutputIsRejectedAtSecondOut) {
    const std::string src = std::string(kCavity) + "network { use a : cav; connect a.out[0] -> a.out[0]; }";
    try {
        parse(src);
        FAIL() << "expected ParseError";
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 2u);
        const std::size_t second_out = src.rfind("out[0]") - src.find('\n') - 1;
        EXPECT_EQ(e.column(), second_out + 1);
        EXPECT_EQ(at_location(src, e.line(), e.column()).substr(0, 3), "out");
    }
}

TEST(Parse, EndOfInputPointsPastLastToken) {
    try {
        parse("component cav {\n  inputs = 1");
        FAIL() << "expected ParseError";
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 2u);
        EXPECT_EQ(e.column(), 13u);
        EXPECT_EQ(e.snippet(), "  inputs = 1");
    }
}

TEST(Parse, BadFixturesReportExpectedLine) {
    const auto files = files_in(kData / "bad");
    ASSERT_GE(files.size(), 10u);
    for (const auto& path : files) {
        const std::string src = read(path);
        const std::string tag = "# expect-error-line: ";
        ASSERT_EQ(src.rfind(tag, 0), 0u) << path;
        const std::size_t expected = std::stoul(src.substr(tag.size()));
        try {
            parse(src);
            ADD_FAILURE() << path << " parsed without error";
        } catch (const ParseError& e) {
            EXPECT_EQ(e.line(), expected) << path << ": " << e.what();
            EXPECT_FALSE(e.snippet().empty()) << path;
            EXPECT_NE(e.snippet().find(at_location(src, e.line(), e.column())), std::string::npos) << path;
        }
    }
}

TEST(Parse, LocationsContainTheOffendingToken) {
    struct Case {
        std::string src;
        std::string token;
    };
    const std::vector<Case> cases = {
        {std::string(kCavity) + "component cav { inputs = 1; modes = 0; S = [[1]]; C = []; Omega = []; }", "cav"},
        {std::string(kCavity) + "network { use a : nope; }", "nope"},
        {std::string(kCavity) + "network { use a : cav; connect a.out[3] -> a.in[0]; }", "3"},
        {"component x { inputs = 1; modes = 1; S = [[1]]; C = [[1, 2]]; Omega = [[0]]; }", "[[1, 2]]"},
        {"component x { inputs = 1; colour = 2; }", "colour"},
        {std::string(kCavity) + "network { use a : cav; external a.in[0] as p; external a.in[0] as q; }", "0]"},
    };
    for (const auto& c : cases) {
        try {
            parse(c.src);
            ADD_FAILURE() << "no error for: " << c.src;
        } catch (const ParseError& e) {
            EXPECT_EQ(at_location(c.src, e.line(), e.column()).rfind(c.token, 0), 0u)
                << e.what() << " in: " << c.src;
        }
    }
}

TEST(BuildPartitioned, SeriesDocumentMatchesSeriesProduct) {
    const NetDocument doc = parse(read(kData / "corpus" / "series.qnet"));
    const LinearComponent reduced = feedback_reduce(build_partitioned(doc));
    const LinearComponent direct =
        series_product(doc.components[1].component, doc.components[0].component);
    EXPECT_LE(max_abs(reduced.S() - direct.S()), 1e-12);
    EXPECT_LE(max_abs(reduced.C() - direct.C()), 1e-12);
    EXPECT_LE(max_abs(reduced.Omega() - direct.Omega()), 1e-12);
    EXPECT_EQ(reduced.port_labels(), (std::vector<std::string>{"drive"}));
}

TEST(BuildPartitioned, NoEdgesKeepsEveryPortExternal) {
    const NetDocument doc = parse(read(kData / "corpus" / "no_network_two.qnet"));
    const PartitionedComponent pc = build_partitioned(doc);
    EXPECT_EQ(pc.eta().size(), 0);
    EXPECT_EQ(pc.external_in().size(), 2u);
    const LinearComponent red = feedback_reduce(pc);
    EXPECT_TRUE(identical(red.S(), pc.component().S()));
    EXPECT_TRUE(identical(red.C(), pc.component().C()));
    EXPECT_TRUE(identical(red.Omega(), pc.component().Omega()));
    EXPECT_EQ(red.port_labels(), (std::vector<std::string>{"left.0", "right.0"}));
}

TEST(BuildPartitioned, FigureSixMatchesBeamSplitterLoop) {
    const NetDocument doc = parse(read(kData / "corpus" / "figure6.qnet"));
    const LinearComponent reduced = feedback_reduce(build_partitioned(doc));
    const BeamSplitter t(doc.components[0].component.S(), 1, 1);
    const LinearComponent loop = beamsplitter_loop(t, doc.components[1].component);
    EXPECT_LE(max_abs(reduced.S() - loop.S()), 1e-12);
    EXPECT_LE(max_abs(reduced.C() - loop.C()), 1e-12);
    EXPECT_LE(max_abs(reduced.Omega() - loop.Omega()), 1e-12);
}

TEST(BuildPartitioned, DeclaredExternalsComeFirst) {
    const NetDocument doc = parse(read(kData / "corpus" / "ring.qnet"));
    const PartitionedComponent pc = build_partitioned(doc);
    // p occupies ports 0-1, q ports 2-3
    EXPECT_EQ(pc.external_in(), (std::vector<std::size_t>{2, 0}));
    EXPECT_EQ(pc.external_out(), (std::vector<std::size_t>{2, 0}));
    EXPECT_EQ(pc.external_labels(), (std::vector<std::string>{"in_q", "in_p"}));
}

TEST(BuildPartitioned, UnpairedOutputsFillInIndexOrder) {
    const NetDocument doc = parse(read(kData / "corpus" / "instance_reuse.qnet"));
    const PartitionedComponent pc = build_partitioned(doc);
    // b1: 0-1, b2: 2-3, arm: 4
    EXPECT_EQ(pc.external_in(), (std::vector<std::size_t>{1, 0}));
    EXPECT_EQ(pc.external_out(), (std::vector<std::size_t>{2, 3}));
    EXPECT_TRUE(validate(feedback_reduce(pc)).ok());
}

TEST(BuildPartitioned, PortBookkeepingOnCorpus) {
    for (const auto& path : files_in(kData / "corpus")) {
        const PartitionedComponent pc = build_partitioned(parse(read(path)));
        const std::size_t n = pc.component().n_ports();
        EXPECT_EQ(pc.internal_in().size() + pc.external_in().size(), n) << path;
        EXPECT_EQ(pc.internal_out().size() + pc.external_out().size(), n) << path;
    }
}

TEST(Serialize, CorpusRoundTripIsExact) {
    const auto files = files_in(kData / "corpus");
    ASSERT_EQ(files.size(), 20u);
    for (const auto& path : files) {
        const NetDocument doc = parse(read(path));
        const std::string text = serialize(doc);
        EXPECT_EQ(parse(text), doc) << path;
        EXPECT_EQ(serialize(parse(text)), text) << path;
        EXPECT_EQ(text.find('\r'), std::string::npos);
    }
}

TEST(Serialize, ComplexEntrySurvivesBitExactly) {
    const NetDocument doc = single_component_document(
        "m", LinearComponent(ComplexMatrix::Constant(1, 1, Complex(0.5, -0.25)), ComplexMatrix(1, 0),
                             ComplexMatrix(0, 0)));
    const std::string text = serialize(doc);
    EXPECT_NE(text.find("0.5-0.25i"), std::string::npos);
    EXPECT_EQ(parse(text), doc);
}

TEST(Serialize, ShuffledKeysComeOutInCanonicalOrder) {
    const std::string text = serialize(parse(read(kData / "corpus" / "shuffled_keys.qnet")));
    const std::vector<std::string> keys{"inputs =", "modes =", "S =", "C =", "Omega ="};
    std::size_t last = 0;
    for (const auto& k : keys) {
        const std::size_t pos = text.find(k);
        ASSERT_NE(pos, std::string::npos) << k;
        EXPECT_GT(pos, last) << k;
        last = pos;
    }
}

TEST(Serialize, SignedZerosAndExtremeValuesRoundTrip) {
    const std::vector<double> values{0.0, -0.0, 1e-300, -1e300, 0.1, 1.0 / 3.0, 5e-324, 123456789.123456789};
    for (double re : values) {
        for (double im : values) {
            const Complex z(re, im);
            const NetDocument doc = single_component_document(
                "z", LinearComponent(ComplexMatrix::Constant(1, 1, z), ComplexMatrix(1, 0), ComplexMatrix(0, 0)));
            const Complex back = parse(serialize(doc)).components[0].component.S()(0, 0);
            EXPECT_EQ(std::signbit(back.real()), std::signbit(re));
            EXPECT_EQ(std::signbit(back.imag()), std::signbit(im));
            EXPECT_EQ(back, z) << format_complex(z);
        }
    }
}

TEST(Serialize, RandomDocumentsRoundTrip) {
    Rng rng(81);
    for (int k = 0; k < 50; ++k) {
        NetDocument doc;
        const std::size_t count = rng.index(1, 3);
        for (std::size_t c = 0; c < count; ++c) {
            doc.components.push_back({"c" + std::to_string(c), rng.component(rng.index(0, 3), rng.index(0, 3))});
        }
        // wire instance pairs port-for-port where possible
        std::size_t inst = 0;
        for (const auto& def : doc.components) doc.instances.push_back({"i" + std::to_string(inst++), def.name});
        const auto& first = doc.components.front().component;
        if (doc.instances.size() >= 2 && first.n_ports() > 0 && doc.components[1].component.n_ports() > 0) {
            doc.edges.push_back({"i0", 0, "i1", 0});
            if (first.n_ports() > 1) doc.externals.push_back({"i0", 1, "ext"});
        }
        EXPECT_EQ(parse(serialize(doc)), doc);
    }
}

TEST(Assignments, RoundTrip) {
    Rng rng(82);
    const MatrixAssignments triple{{"E", rng.hermitian(2)}, {"F", rng.gaussian_matrix(2, 3)}, {"K", rng.hermitian(3)}};
    const MatrixAssignments back = parse_assignments(serialize_assignments(triple));
    ASSERT_EQ(back.size(), 3u);
    for (std::size_t k = 0; k < 3; ++k) {
        EXPECT_EQ(back[k].first, triple[k].first);
        EXPECT_TRUE(identical(back[k].second, triple[k].second));
    }
    EXPECT_THROW(parse_assignments("E = [[1]]; E = [[2]];"), ParseError);
}

}  // namespace
}  // namespace qfn

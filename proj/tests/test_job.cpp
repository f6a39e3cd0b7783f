#include <gtest/gtest.h>

#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>

#include "casimir/job.hpp"
#include "oracles.hpp"

using namespace casimir;
using namespace casimir::cli;

namespace {

struct CliRun {
    int code;
    std::string out;
    std::string err;
};

CliRun invoke(std::vector<std::string> args) {
    args.insert(args.begin(), "casimir");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = run_cli(int(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

// Value column of the single data row of a CSV result.
double csv_value(const std::string& csv, const std::string& column = "value") {
    std::istringstream is(csv);
    std::string line;
    std::vector<std::string> header;
    while (std::getline(is, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (header.empty()) {
            header = cli::detail::split(line, ',');
            continue;
        }
        const auto pos = std::find(header.begin(), header.end(), column) - header.begin();
        // Fields after a quoted one are counted from the end.
        const auto fields = cli::detail::split(line, ',');
        return std::stod(fields[fields.size() - (header.size() - pos)]);
    }
    return NAN;
}

}  // namespace

TEST(Angles, ParsesMultiplesOfPi) {
    const double pi = std::numbers::pi;
    EXPECT_EQ(cli::detail::parse_angle("pi"), pi);
    EXPECT_EQ(cli::detail::parse_angle("-pi/2"), -pi / 2);
    EXPECT_EQ(cli::detail::parse_angle("3*pi/2"), 3 * pi / 2);
    EXPECT_EQ(cli::detail::parse_angle("0.25"), 0.25);
    EXPECT_THROW(cli::detail::parse_angle("pie"), ValidationError);
    EXPECT_THROW(cli::detail::parse_angle("x"), ValidationError);
}

TEST(Matrix, ParsesComplexEntries) {
    const Mat2 m = cli::detail::parse_matrix("0,i;-i,0");
    EXPECT_EQ(m(0, 1), cplx(0, 1));
    EXPECT_EQ(m(1, 0), cplx(0, -1));
    const Mat2 n = cli::detail::parse_matrix("0.6+0.8i, 0; 0, 1e-1-2.5e+0i");
    EXPECT_EQ(n(0, 0), cplx(0.6, 0.8));
    EXPECT_EQ(n(1, 1), cplx(0.1, -2.5));
    EXPECT_THROW(cli::detail::parse_matrix("1,0,0;0,1"), ValidationError);
    EXPECT_THROW(cli::detail::parse_matrix("1,0"), ValidationError);
}

TEST(JobSpecConfig, RoundTrip) {
    JobSpec a;
    a.mode = "sweep";
    a.L = 0.1 + 0.2;
    a.D = 3;
    a.tol = 1e-11;
    a.alpha = std::numbers::pi / 3;
    a.beta = -0.123456789012345678;
    a.n1 = 0.6;
    a.n2 = 0.0;
    a.n3 = 0.8;
    a.potential = "pwc:[(1,0.1),(2,0.2)]";
    a.kmax = 33.5;
    a.sweep_mode = "comb";
    a.axis = {"L", 0.5, 2.0, 7};
    a.out = "results.json";
    a.format = "json";
    a.jobs = 3;
    EXPECT_EQ(parse_config(to_config(a)), a);

    JobSpec b;
    b.mode = "plates";
    b.matrix = "0,1;1,0";
    b.theta.reset();
    EXPECT_EQ(parse_config(to_config(b)), b);

    JobSpec c;
    c.mode = "comb";
    c.theta = 2.0;
    c.potential = "ddp:w0=1,w1=0.5,conv=flipped";
    EXPECT_EQ(parse_config(to_config(c)), c);
}

TEST(JobSpecConfig, FlagsOverrideFile) {
    const std::string path = ::testing::TempDir() + "casimir_job.ini";
    {
        std::ofstream f(path);
        f << "mode = \"plates\"\nL = 2\nalpha = 3.141592653589793\nD = 3\n";
    }
    const auto from_file = invoke({"--config", path});
    ASSERT_EQ(from_file.code, 0) << from_file.err;
    EXPECT_NEAR(csv_value(from_file.out), oracle::dirichlet_plates(3, 2.0), 1e-10);
    const auto overridden = invoke({"--config", path, "--L", "1"});
    ASSERT_EQ(overridden.code, 0) << overridden.err;
    EXPECT_NEAR(csv_value(overridden.out), oracle::dirichlet_plates(3, 1.0), 1e-10);
    std::remove(path.c_str());
}

TEST(Run, PlatesExample) {
    const auto r = invoke({"plates", "--alpha", "pi", "--beta", "0", "--L", "1", "--D", "3"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("# schema: casimir-results/1"), std::string::npos);
    EXPECT_NEAR(csv_value(r.out), -0.00685389194520063, 1e-10);
    EXPECT_GE(csv_value(r.out, "abs_error"), 0.0);
    EXPECT_GT(csv_value(r.out, "n_evals"), 0.0);
}

TEST(Run, MatrixAndThetaInputsAgree) {
    const auto a = invoke({"plates", "--theta", "pi/2"});
    const auto b = invoke({"plates", "--matrix", "0,i;-i,0"});
    ASSERT_EQ(a.code, 0) << a.err;
    ASSERT_EQ(b.code, 0) << b.err;
    EXPECT_NEAR(csv_value(a.out), oracle::quasi_periodic_plates(std::numbers::pi / 2, 1.0), 1e-9);
    EXPECT_NEAR(csv_value(a.out), csv_value(b.out), 1e-12);
}

TEST(Run, FreeCombIsZero) {
    const auto r = invoke({"comb", "--potential", "free", "--L", "1"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NEAR(csv_value(r.out), 0.0, 1e-8);
}

TEST(Run, BandsMatchKronigPenney) {
    const auto r = invoke({"bands", "--potential", "delta:w0=10", "--L", "1", "--kmax", "12", "--format", "json"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto doc = nlohmann::json::parse(r.out);
    EXPECT_EQ(doc["schema"], "casimir-results/1");
    const auto edges = oracle::kronig_penney_edges(10.0, 12.0);
    ASSERT_GE(doc["rows"].size(), 4u);
    for (int b = 0; b < 4; ++b) EXPECT_NEAR(doc["rows"][b]["k_lo"].get<double>(), edges[2 * b], 1e-8);
}

TEST(Run, SpectrumRows) {
    const auto r = invoke({"spectrum", "--alpha", "pi", "--L", "3.141592653589793", "--kmax", "5.5", "--format", "json"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto doc = nlohmann::json::parse(r.out);
    ASSERT_EQ(doc["rows"].size(), 5u);
    for (int n = 1; n <= 5; ++n) EXPECT_NEAR(doc["rows"][n - 1]["k"].get<double>(), n, 1e-10);
}

TEST(Run, SweepIsDeterministicAcrossThreadCounts) {
    const std::vector<std::string> base{"sweep", "--sweep-mode", "plates", "--param", "theta", "--from", "0.1", "--to",
                                        "3.1", "--count", "9"};
    auto serial = base;
    serial.insert(serial.end(), {"--jobs", "1"});
    auto parallel = base;
    parallel.insert(parallel.end(), {"--jobs", "4"});
    const auto a = invoke(serial);
    const auto b = invoke(parallel);
    const auto c = invoke(parallel);
    ASSERT_EQ(a.code, 0) << a.err;
    EXPECT_EQ(a.out, b.out);
    EXPECT_EQ(b.out, c.out);
    std::istringstream is(a.out);
    std::string line;
    int rows = 0;
    while (std::getline(is, line))
        if (!line.empty() && line[0] != '#') ++rows;
    EXPECT_EQ(rows, 10);
}

TEST(Run, OutputFilesAreBitIdentical) {
    const std::string p1 = ::testing::TempDir() + "casimir_a.json";
    const std::string p2 = ::testing::TempDir() + "casimir_b.json";
    for (const auto& p : {p1, p2})
        ASSERT_EQ(invoke({"sweep", "--sweep-mode", "plates", "--alpha", "0.4", "--beta", "0.3", "--param", "L", "--from", "0.5",
                          "--to", "2", "--count", "5", "--jobs", "3", "--format", "json", "--out", p})
                      .code,
                  0);
    auto slurp = [](const std::string& p) {
        std::ifstream f(p);
        return std::string(std::istreambuf_iterator<char>(f), {});
    };
    EXPECT_FALSE(slurp(p1).empty());
    EXPECT_EQ(slurp(p1), slurp(p2));
    std::remove(p1.c_str());
    std::remove(p2.c_str());
}

TEST(Run, ExitCodes) {
    const auto missing = invoke({});
    EXPECT_EQ(missing.code, kValidation);
    const auto bad_flag = invoke({"plates", "--bogus", "1"});
    EXPECT_EQ(bad_flag.code, kValidation);
    const auto bad_length = invoke({"plates", "--theta", "1", "--L", "-1"});
    EXPECT_EQ(bad_length.code, kValidation);
    EXPECT_EQ(bad_length.err, "error: validation: L: must be positive\n");
    EXPECT_EQ(invoke({"plates", "--theta", "1", "--alpha", "0"}).code, kValidation);
    EXPECT_EQ(invoke({"plates", "--matrix", "1,1;0,1"}).code, kValidation);
    EXPECT_EQ(invoke({"comb", "--potential", "delta:w0"}).code, kValidation);
    EXPECT_EQ(invoke({"sweep", "--param", "nope", "--from", "0", "--to", "1", "--count", "3", "--theta", "1"}).code,
              kValidation);
    EXPECT_EQ(invoke({"sweep", "--param", "L", "--from", "1", "--to", "1", "--count", "3", "--theta", "1"}).code,
              kValidation);

    const auto bound = invoke({"comb", "--potential", "delta:w0=-5"});
    EXPECT_EQ(bound.code, kPhysics);
    EXPECT_EQ(bound.err.rfind("error: physics: ", 0), 0u);
    EXPECT_EQ(std::count(bound.err.begin(), bound.err.end(), '\n'), 1);
    EXPECT_EQ(invoke({"plates", "--alpha", "-pi/2"}).code, kPhysics);
}

#include <pilb/config.hpp>
#include <pilb/scenario.hpp>

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

using namespace pilb;

namespace {

std::string error_of(std::string_view text, const std::vector<std::pair<std::string, std::string>>& overrides = {}) {
    try {
        parse_config(text, overrides);
    } catch (const ConfigError& e) {
        return e.what();
    }
    return {};
}

std::vector<std::vector<std::string>> csv_cells(const std::string& csv) {
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(csv);
    std::string line;
    while (std::getline(in, line)) {
        std::vector<std::string> cells;
        std::size_t start = 0;
        for (std::size_t i = 0; i <= line.size(); ++i) {
            if (i == line.size() || line[i] == ',') {
                cells.push_back(line.substr(start, i - start));
                start = i + 1;
            }
        }
        rows.push_back(cells);
    }
    return rows;
}

class TempFile {
public:
    TempFile(const std::string& name, const std::string& contents)
        : path_(std::filesystem::temp_directory_path() / ("pilb_test_" + name)) {
        std::ofstream(path_) << contents;
    }
    ~TempFile() { std::filesystem::remove(path_); }
    std::string path() const { return path_.string(); }

private:
    std::filesystem::path path_;
};

}  // namespace

TEST(ParseConfig, MinimalConfigGetsDefaults) {
    const auto cfg = parse_config("algorithm = binhash\nn = 100\nm = 10");
    EXPECT_EQ(cfg.algorithm, AlgorithmKind::BinHash);
    EXPECT_EQ(cfg.n, 100u);
    EXPECT_EQ(cfg.m, 10u);
    EXPECT_DOUBLE_EQ(cfg.alpha.value(), 2.0 - std::sqrt(2.0));
    EXPECT_DOUBLE_EQ(cfg.up_probability, 0.8);
    EXPECT_EQ(cfg.seed, 0u);
    EXPECT_EQ(cfg.trace, TraceKind::Churn);
    EXPECT_EQ(cfg.output, "-");
    EXPECT_TRUE(std::holds_alternative<IdenticalSizes>(cfg.sizes));
}

TEST(ParseConfig, CommentsBlankLinesAndOverrides) {
    const auto cfg = parse_config("# scenario\n\nalgorithm = preference  # inline\nn=5\nm = 3\nseed = 9\n",
                                  {{"seed", "11"}, {"m", "4"}});
    EXPECT_EQ(cfg.algorithm, AlgorithmKind::Preference);
    EXPECT_EQ(cfg.seed, 11u);
    EXPECT_EQ(cfg.m, 4u);
}

TEST(ParseConfig, AlphaOutOfRangeNamesKeyAndInterval) {
    const auto msg = error_of("alpha = 1.5");
    EXPECT_NE(msg.find("line 1"), std::string::npos) << msg;
    EXPECT_NE(msg.find("alpha"), std::string::npos) << msg;
    EXPECT_NE(msg.find("(0,1)"), std::string::npos) << msg;
}

TEST(ParseConfig, FlapNeedsTwoMachines) {
    const auto msg = error_of("trace = flap\nm = 1");
    EXPECT_NE(msg.find("line 2"), std::string::npos) << msg;
    EXPECT_NE(msg.find("'m'"), std::string::npos) << msg;
    EXPECT_NE(msg.find("flap"), std::string::npos) << msg;
}

TEST(ParseConfig, ErrorsNameKeyAndLine) {
    EXPECT_NE(error_of("algorithm = binhash\nspeed = 3").find("line 2: key 'speed': unknown key"), std::string::npos);
    EXPECT_NE(error_of("algorithm = binhash\nm = ten\nn = 1").find("line 2: key 'm': malformed"), std::string::npos);
    EXPECT_NE(error_of("algorithm = greedy\nm = 2\nn = 1").find("line 1: key 'algorithm'"), std::string::npos);
    EXPECT_NE(error_of("algorithm = binhash\nm = 2\nn = 1\nup_probability = 0").find("line 4"), std::string::npos);
    EXPECT_NE(error_of("algorithm = binhash\nm = 2\nn = 1\nabsent_machine = 2").find("absent_machine"),
              std::string::npos);
    EXPECT_NE(error_of("algorithm binhash").find("line 1"), std::string::npos);
    EXPECT_NE(error_of("m = 2\nn = 1").find("'algorithm': missing"), std::string::npos);
    EXPECT_NE(error_of("algorithm = binhash\nn = 1").find("'m': missing"), std::string::npos);
    EXPECT_NE(error_of("algorithm = binhash\nm = 3").find("'n': missing"), std::string::npos);
    EXPECT_NE(error_of("algorithm = binhash\nm = 3\nn = 2", {{"alpha", "0"}}).find("command line"),
              std::string::npos);
}

TEST(ParseConfig, SizesSources) {
    const auto listed = parse_config("algorithm = binhash\nm = 2\nsizes = 3, 1.5 2");
    EXPECT_EQ(listed.n, 3u);
    EXPECT_EQ(std::get<InlineSizes>(listed.sizes).sizes, (std::vector<double>{3, 1.5, 2}));
    EXPECT_NE(error_of("algorithm = binhash\nm = 2\nn = 4\nsizes = 1 2 3").find("'n'"), std::string::npos);

    const auto uni = parse_config("algorithm = binhash\nm = 2\nn = 4\nsizes = uniform(1, 5)");
    EXPECT_DOUBLE_EQ(std::get<UniformSizes>(uni.sizes).hi, 5.0);
    const auto par = parse_config("algorithm = binhash\nm = 2\nn = 4\nsizes = pareto(1.5,2)");
    EXPECT_DOUBLE_EQ(std::get<ParetoSizes>(par.sizes).shape, 1.5);
    const auto ident = parse_config("algorithm = binhash\nm = 2\nn = 4\nsizes = identical(2.5)");
    EXPECT_DOUBLE_EQ(std::get<IdenticalSizes>(ident.sizes).size, 2.5);

    EXPECT_NE(error_of("algorithm = binhash\nm = 2\nn = 4\nsizes = uniform(5,1)").find("sizes"), std::string::npos);
    EXPECT_NE(error_of("algorithm = binhash\nm = 2\nn = 4\nsizes = 1 -2").find("sizes"), std::string::npos);
    EXPECT_NE(error_of("algorithm = binhash\nm = 2\nsizes_file = /nonexistent/x").find("does not exist"),
              std::string::npos);
}

TEST(ParseConfig, TraceFileRules) {
    EXPECT_NE(error_of("algorithm = binhash\nm = 2\nn = 1\ntrace = file").find("trace_file"), std::string::npos);
    EXPECT_NE(error_of("algorithm = binhash\nm = 2\nn = 1\ntrace_file = x").find("only meaningful"),
              std::string::npos);
    EXPECT_NE(error_of("algorithm = binhash\nm = 2\nn = 1\nstate = 0 5").find("state"), std::string::npos);
}

TEST(RunScenario, ConstantTraceHasZeroReassignments) {
    const auto cfg = parse_config("algorithm = binhash\nn = 50\nm = 6\nup_probability = 1\nsteps = 20");
    const auto result = run_scenario(cfg);
    EXPECT_TRUE(result.violations.empty());
    const auto rows = csv_cells(result.csv);
    ASSERT_EQ(rows.size(), 21u);  // header + 19 transitions + TOTAL
    EXPECT_EQ(rows.front().size(), 8u);
    for (std::size_t i = 1; i + 1 < rows.size(); ++i) {
        EXPECT_EQ(rows[i][2], "0");
        EXPECT_EQ(rows[i][4], "");  // r* = 0, ratio left empty
    }
    EXPECT_EQ(rows.back()[0], "TOTAL");
    EXPECT_EQ(rows.back()[2], "0");
}

TEST(RunScenario, BinHashRowsRespectMakespanBound) {
    const auto cfg =
        parse_config("algorithm = binhash\nn = 300\nm = 12\nsizes = pareto(1.3, 1)\nsteps = 200\nup_probability = 0.6"
                     "\nseed = 5");
    const auto result = run_scenario(cfg);
    EXPECT_TRUE(result.violations.empty());
    const auto rows = csv_cells(result.csv);
    EXPECT_EQ(rows.front()[0] + "," + rows.front()[7], "step,makespan_ratio");
    for (std::size_t i = 1; i < rows.size(); ++i) {
        ASSERT_FALSE(rows[i][7].empty());
        EXPECT_LE(std::stod(rows[i][7]), cfg.alpha.makespan_coefficient() + 1e-5);
        for (const auto& cell : rows[i]) {
            EXPECT_EQ(cell.find("nan"), std::string::npos);
            EXPECT_EQ(cell.find("inf"), std::string::npos);
        }
    }
}

TEST(RunScenario, SameConfigGivesIdenticalBytes) {
    for (const char* algorithm : {"binhash", "preference"}) {
        const auto cfg = parse_config(std::string("algorithm = ") + algorithm +
                                      "\nn = 120\nm = 9\nsizes = uniform(1,10)\nsteps = 150\nseed = 3");
        EXPECT_EQ(run_scenario(cfg).csv, run_scenario(cfg).csv);
        auto other = cfg;
        other.seed = 4;
        EXPECT_NE(run_scenario(cfg).csv, run_scenario(other).csv);
    }
}

TEST(RunScenario, FileInputs) {
    const TempFile sizes("sizes.txt", "# sizes\n4 3\n2,1\n");
    const TempFile trace("trace.txt", "0 1 2\n\n1,2\n2 # last\n");
    const auto cfg = parse_config("algorithm = preference\nm = 3\ntrace = file\ntrace_file = " + trace.path() +
                                  "\nsizes_file = " + sizes.path());
    const auto result = run_scenario(cfg);
    EXPECT_TRUE(result.violations.empty());
    const auto rows = csv_cells(result.csv);
    ASSERT_EQ(rows.size(), 4u);
    EXPECT_EQ(rows[1][1], "2");
    EXPECT_EQ(rows[2][1], "1");
    EXPECT_EQ(make_sizes(cfg), (std::vector<double>{4, 3, 2, 1}));

    const TempFile bad("bad_trace.txt", "0 1\n7\n");
    auto broken = cfg;
    broken.trace_file = bad.path();
    try {
        run_scenario(broken);
        FAIL() << "expected InputError";
    } catch (const InputError& e) {
        EXPECT_NE(std::string(e.what()).find(bad.path() + ":2"), std::string::npos) << e.what();
    }

    auto mismatch = cfg;
    mismatch.n = 3;
    EXPECT_THROW(make_sizes(mismatch), InputError);
}

TEST(RenderAssignment, InputOrder) {
    const JobSet jobs({1, 5, 3});
    const auto cfg = parse_config("algorithm = binhash\nm = 4\nsizes = 1 5 3\nstate = 2");
    const auto out = render_assignment(jobs, BinHash(jobs, cfg.m, cfg.alpha, 1)(config_state(cfg)));
    EXPECT_EQ(out, "job,size,machine\n0,1,2\n1,5,2\n2,3,2\n");
}

TEST(FormatReal, SixSignificantDigits) {
    EXPECT_EQ(format_real(1.0 / 3.0), "0.333333");
    EXPECT_EQ(format_real(1234567.0), "1.23457e+06");
    EXPECT_EQ(format_real(std::nullopt), "");
}

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "cli.hpp"

namespace srgm::cli {
namespace {

namespace fs = std::filesystem;

class Cli : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() /
               ("srgm_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    std::string path(const std::string& name) const { return (dir_ / name).string(); }

    void write(const std::string& name, const std::string& text) const { std::ofstream(path(name)) << text; }

    std::string read(const std::string& name) const {
        std::ifstream in(path(name), std::ios::binary);
        std::stringstream s;
        s << in.rdbuf();
        return s.str();
    }

    int call(std::vector<std::string> args) {
        out_.str("");
        err_.str("");
        return run(args, out_, err_);
    }

    fs::path dir_;
    std::ostringstream out_, err_;
};

const std::string kGe4 = R"({"kind":"ge4","params":{"a":368,"b":0.292,"proportions":[0.121,0.064,0.0,0.815]}})";
const std::string kGo = R"({"kind":"go","params":{"a":500,"b":0.1}})";

TEST_F(Cli, ForecastReproducesTableRow) {
    write("ge4.json", kGe4);
    ASSERT_EQ(call({"forecast", "--spec", path("ge4.json"), "--observed", "298", "--mode", "table", "--out",
                    path("fc.csv")}),
              kOk)
        << err_.str();
    std::istringstream in(read("fc.csv"));
    const auto rows = csv::read(in);
    ASSERT_EQ(rows.size(), 2u);
    EXPECT_EQ(std::vector<std::string>(rows[1].fields.begin() + 7, rows[1].fields.begin() + 11),
              (std::vector<std::string>{"8", "4", "0", "57"}));
    std::istringstream plot(read("fc.plot.csv"));
    EXPECT_EQ(read_breakdown_csv(plot).size(), 1u);
}

TEST_F(Cli, ForecastBothModesWritesPlotSeries) {
    write("ge4.json", kGe4);
    ASSERT_EQ(call({"forecast", "--spec", path("ge4.json"), "--observed", "298", "--time", "20", "--out",
                    path("fc.csv"), "--plot", path("plot.csv"), "--grid-points", "11"}),
              kOk)
        << err_.str();
    std::istringstream in(read("plot.csv"));
    const auto rows = read_breakdown_csv(in);
    ASSERT_EQ(rows.size(), 12u);
    EXPECT_EQ(*rows.back().breakdown.time, 20.0);
    EXPECT_NE(read("fc.csv").find("ge4,model,368,298,20,"), std::string::npos);
}

TEST_F(Cli, ForecastNeedsObservedForBareSpec) {
    write("ge4.json", kGe4);
    EXPECT_EQ(call({"forecast", "--spec", path("ge4.json"), "--mode", "table", "--out", path("fc.csv")}), kUsage);
    EXPECT_NE(err_.str().find("--observed"), std::string::npos);
}

TEST_F(Cli, FitInsufficientDataIsADataError) {
    write("two.json", R"({"interval":"month","times":[1,2],"cumulative":[3,5]})");
    EXPECT_EQ(call({"fit", "--data", path("two.json"), "--models", "ge4", "--out", path("fits")}), kData);
    EXPECT_NE(err_.str().find("two.json"), std::string::npos);
    EXPECT_NE(err_.str().find("data points"), std::string::npos);
    EXPECT_TRUE(fs::exists(path("fits/comparison.csv")));
}

TEST_F(Cli, SimulateThenFitRecoversParameters) {
    write("go.json", kGo);
    ASSERT_EQ(call({"simulate", "--spec", path("go.json"), "--horizon", "60", "--seed", "11", "--out",
                    path("ev.csv"), "--intervals", "60"}),
              kOk)
        << err_.str();
    std::istringstream events(read("ev.csv"));
    const auto times = read_events_csv(events);
    EXPECT_FALSE(times.empty());
    ASSERT_EQ(call({"fit", "--data", path("ev.json"), "--models", "go", "--seed", "1", "--out", path("fits")}), kOk)
        << err_.str();
    const auto r = fit_result_from_json(nlohmann::json::parse(read("fits/go.json")));
    ASSERT_TRUE(r.spec);
    EXPECT_NEAR(*r.spec->params.a, 500.0, 50.0);
    EXPECT_NEAR(*r.spec->params.b, 0.1, 0.015);
    EXPECT_EQ(r.observed, static_cast<long>(times.size()));
}

TEST_F(Cli, IngestWritesDatasetAndRejects) {
    write("bugs.csv",
          "ID,Summary,Status,Opened,Assignee,Submitter,Resolution,Priority\n"
          "1,a,Closed,1/5/2003,x,y,Fixed,5\n"
          "2,b,Closed,13/45/2003,x,y,Fixed,5\n"
          "3,c,Closed,3/1/2003,x,y,Wont Fix,5\n"
          "4,d,Closed,3/9/2003,x,y,Fixed,5\n");
    ASSERT_EQ(call({"ingest", "--input", path("bugs.csv"), "--out", path("ds.json")}), kOk) << err_.str();
    const auto ds = dataset_from_json(nlohmann::json::parse(read("ds.json")));
    EXPECT_EQ(ds.cumulative, (std::vector<long>{1, 1, 2}));
    EXPECT_NE(err_.str().find("bugs.csv:3"), std::string::npos);
    EXPECT_NE(err_.str().find("bad date"), std::string::npos);
    EXPECT_NE(read("ds.rejects.csv").find("3,2,bad date"), std::string::npos);
}

TEST_F(Cli, IngestMissingColumnNamesFileAndLine) {
    write("bugs.csv", "ID,Summary\n1,a\n");
    EXPECT_EQ(call({"ingest", "--input", path("bugs.csv"), "--out", path("ds.json")}), kData);
    EXPECT_NE(err_.str().find("bugs.csv:1"), std::string::npos);
}

TEST_F(Cli, MalformedJsonNamesLine) {
    write("bad.json", "{\n  \"times\": [1, 2,\n");
    EXPECT_EQ(call({"fit", "--data", path("bad.json"), "--out", path("f")}), kData);
    EXPECT_NE(err_.str().find("bad.json:3"), std::string::npos) << err_.str();
}

TEST_F(Cli, UsageErrors) {
    EXPECT_EQ(call({}), kUsage);
    EXPECT_EQ(call({"fit", "--data", "x", "--out", "y", "--bogus"}), kUsage);
    EXPECT_EQ(call({"fit", "--data", "x"}), kUsage);
    EXPECT_EQ(call({"frobnicate"}), kUsage);
    write("go.json", kGo);
    EXPECT_EQ(call({"simulate", "--spec", path("go.json"), "--horizon", "-1", "--out", path("e.csv")}), kUsage);
    write("ds.json", R"({"times":[1,2,3,4],"cumulative":[1,2,3,4]})");
    EXPECT_EQ(call({"fit", "--data", path("ds.json"), "--models", "ge9", "--out", path("f")}), kUsage);
}

TEST_F(Cli, HelpListsEveryFlag) {
    const std::vector<std::pair<std::string, std::vector<std::string>>> commands{
        {"ingest", {"--input", "--interval", "--out", "--rejects", "--keep-all"}},
        {"fit", {"--data", "--models", "--seed", "--out", "--multistart", "--threads"}},
        {"forecast", {"--fit", "--spec", "--observed", "--time", "--mode", "--out", "--plot"}},
        {"simulate", {"--spec", "--horizon", "--seed", "--out", "--intervals", "--dataset"}},
        {"report", {"--data", "--input", "--out", "--models", "--seed", "--observed"}}};
    for (const auto& [cmd, flags] : commands) {
        ASSERT_EQ(call({cmd, "--help"}), kOk) << cmd;
        for (const auto& f : flags) EXPECT_NE(out_.str().find(f), std::string::npos) << cmd << " " << f;
    }
}

TEST_F(Cli, SeedFallsBackToEnvironment) {
    write("go.json", kGo);
    ::setenv("SRGM_SEED", "5", 1);
    ASSERT_EQ(call({"simulate", "--spec", path("go.json"), "--horizon", "30", "--out", path("a.csv")}), kOk);
    ::unsetenv("SRGM_SEED");
    ASSERT_EQ(call({"simulate", "--spec", path("go.json"), "--horizon", "30", "--seed", "5", "--out",
                    path("b.csv")}),
              kOk);
    EXPECT_EQ(read("a.csv"), read("b.csv"));
    ::setenv("SRGM_SEED", "five", 1);
    EXPECT_EQ(call({"simulate", "--spec", path("go.json"), "--horizon", "30", "--out", path("c.csv")}), kUsage);
    ::unsetenv("SRGM_SEED");
}

TEST_F(Cli, ReportBundlesOutputs) {
    write("go.json", kGo);
    ASSERT_EQ(call({"simulate", "--spec", path("go.json"), "--horizon", "60", "--seed", "2", "--out",
                    path("ev.csv"), "--intervals", "40"}),
              kOk);
    ASSERT_EQ(call({"report", "--data", path("ev.json"), "--models", "go,ge2,ge3", "--seed", "4", "--out",
                    path("rep")}),
              kOk)
        << err_.str();
    for (const char* f : {"rep/comparison.csv", "rep/forecast.csv", "rep/plot.csv", "rep/summary.txt",
                          "rep/dataset.json", "rep/fits/ge3.json"})
        EXPECT_TRUE(fs::exists(path(f))) << f;
    std::istringstream plot(read("rep/plot.csv"));
    EXPECT_FALSE(read_breakdown_csv(plot).empty());
    EXPECT_NE(read("rep/summary.txt").find("models by AIC"), std::string::npos);
}

TEST_F(Cli, ReportFromBugExport) {
    const std::string sample = std::string(SRGM_TEST_DATA_DIR) + "/squirrel_sample.csv";
    ASSERT_EQ(call({"report", "--input", sample, "--models", "go,dss", "--out", path("rep")}), kOk) << err_.str();
    const auto ds = dataset_from_json(nlohmann::json::parse(read("rep/dataset.json")));
    EXPECT_EQ(ds.total(), 9);
}

}  // namespace
}  // namespace srgm::cli

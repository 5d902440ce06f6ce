#include <gtest/gtest.h>

#include "hardy_henon/report.hpp"

using namespace hh;

namespace {

RunReport sample() {
  RunReport r;
  r.command = "verify-lemma";
  r.params = ProblemParams{3, 0.5, 0, 2};
  r.info("radii", std::vector<double>{0.5, 1, 2});
  r.check_le("max_rel_error", 1.234567890123456e-9, "tol_lemma", 1e-6);
  r.elapsed = 0.125;
  return r;
}

}  // namespace

TEST(Report, FieldOrderIsFixed) {
  const auto j = report_json(sample());
  std::vector<std::string> keys;
  for (auto it = j.begin(); it != j.end(); ++it) keys.push_back(it.key());
  EXPECT_EQ(keys, (std::vector<std::string>{"command", "params", "results", "tolerances", "status", "failures", "elapsed"}));
  std::vector<std::string> rk;
  for (auto it = j["results"][0].begin(); it != j["results"][0].end(); ++it) rk.push_back(it.key());
  EXPECT_EQ(rk, report_csv_columns());
}

TEST(Report, DeterministicBytes) {
  EXPECT_EQ(serialize_report(sample(), ReportFormat::Json), serialize_report(sample(), ReportFormat::Json));
  EXPECT_EQ(serialize_report(sample(), ReportFormat::Csv), serialize_report(sample(), ReportFormat::Csv));
}

TEST(Report, NumbersHaveTwelveSignificantDigits) {
  EXPECT_EQ(round12(1.234567890123456e-9), 1.23456789012e-9);
  EXPECT_EQ(round12(0.0), 0.0);
  const auto j = report_json(sample());
  EXPECT_EQ(j["results"][1]["value"].get<double>(), 1.23456789012e-9);
}

TEST(Report, EveryResultNamesItsTolerance) {
  const auto j = report_json(sample());
  for (const auto& e : j["results"]) {
    ASSERT_TRUE(e["tolerance"].is_string());
    EXPECT_TRUE(j["tolerances"].contains(e["tolerance"].get<std::string>()));
  }
}

TEST(Report, StatusAndFailures) {
  auto r = sample();
  EXPECT_EQ(report_json(r)["status"], "ok");
  r.check_le("residual", 1.0, "tol_solver", 1e-8);
  const auto j = report_json(r);
  EXPECT_EQ(j["status"], "tolerance_violation");
  EXPECT_EQ(j["failures"], Json::array({"residual"}));
}

TEST(Report, BooleanChecksRegisterTheirRule) {
  RunReport r;
  r.command = "x";
  r.check_true("positive", false, "maximum_principle", 0.0, -1e-3);
  const auto j = report_json(r);
  EXPECT_EQ(j["tolerances"]["maximum_principle"], 0.0);
  EXPECT_EQ(j["results"][0]["value"], -1e-3);
  EXPECT_EQ(j["status"], "tolerance_violation");
}

TEST(Report, NonFiniteValuesBecomeStrings) {
  RunReport r;
  r.command = "x";
  r.info("a", std::nan(""));
  r.info("b", -INFINITY);
  const auto j = report_json(r);
  EXPECT_EQ(j["results"][0]["value"], "nan");
  EXPECT_EQ(j["results"][1]["value"], "-inf");
  EXPECT_TRUE(j["params"].is_null());
}

TEST(Report, CsvHeaderAndQuoting) {
  RunReport r;
  r.command = "x";
  r.info("list, with comma", std::vector<int>{1, 2});
  const auto csv = serialize_report(r, ReportFormat::Csv);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "name,value,tolerance,limit,pass");
  EXPECT_NE(csv.find("\"list, with comma\",\"[1,2]\",print_digits,,true"), std::string::npos);
  EXPECT_EQ(csv.find('\r'), std::string::npos);
}

TEST(Report, CsvTableUsesLfAndHeader) {
  const auto t = csv_table({"s", "E"}, {{0.0, 0.5}, {1.0 / 3, -2.0}});
  EXPECT_EQ(t, "s,E\n0,0.333333333333\n0.5,-2\n");
}

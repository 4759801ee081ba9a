#include <gtest/gtest.h>

#include <array>
#include <cstdio>
#include <string>
#include <sys/wait.h>

#include "json.hpp"

namespace {

struct Result {
    int status = -1;
    std::string out;
};

std::string quote(const std::string &s) {
    std::string q = "'";
    for (char c : s)
        q += c == '\'' ? std::string("'\\''") : std::string(1, c);
    return q + "'";
}

// Runs the binary with the given arguments; stderr is discarded unless merged.
Result omega_run(const std::vector<std::string> &args, bool merge_stderr = false) {
    std::string cmd = OMEGA_BIN;
    for (const auto &a : args)
        cmd += " " + quote(a);
    cmd += merge_stderr ? " 2>&1" : " 2>/dev/null";
    Result r;
    FILE *p = popen(cmd.c_str(), "r");
    if (!p)
        return r;
    std::array<char, 4096> buf;
    for (std::size_t n; (n = fread(buf.data(), 1, buf.size(), p)) > 0;)
        r.out.append(buf.data(), n);
    const int st = pclose(p);
    r.status = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
    return r;
}

} // namespace

TEST(Cli, Cmp) {
    Result r = omega_run({"cmp", "x", "exp(x)"});
    EXPECT_EQ(r.status, 0);
    EXPECT_EQ(r.out, "<<\n");
    EXPECT_EQ(omega_run({"cmp", "exp(x)", "x^5"}).out, ">>\n");
    EXPECT_EQ(omega_run({"cmp", "2*x + 1", "x"}).out, "~~\n");
    EXPECT_EQ(omega_run({"cmp", "x + 1", "x"}).out, "~~ ~\n");
}

TEST(Cli, Expand) {
    Result r = omega_run({"expand", "1/(x*(1 - x^-1))", "-n", "4"});
    EXPECT_EQ(r.status, 0);
    EXPECT_EQ(r.out, "x^-1 + x^-2 + x^-3 + x^-4 + O(x^-5)\n");
    EXPECT_EQ(omega_run({"expand", "x^2 + 3*x - 1/2"}).out, "x^2 + 3*x - 1/2\n");
}

TEST(Cli, DiffAndCompose) {
    EXPECT_EQ(omega_run({"diff", "exp(x^2)"}).out, "2*x*exp(x^2)\n");
    EXPECT_EQ(omega_run({"compose", "log(x)", "exp(x)"}).out, "x\n");
    EXPECT_EQ(omega_run({"expand", "log(x) @ exp(x)"}).out, "x\n");
    EXPECT_EQ(omega_run({"expand", "D(exp(x^2))"}).out, "2*x*exp(x^2)\n");
}

TEST(Cli, Taylor) {
    Result r = omega_run({"taylor", "log(x)", "--at", "x", "--delta", "1", "-n", "2"});
    EXPECT_EQ(r.status, 0);
    EXPECT_NE(r.out.find("log(x) + x^-1 - 1/2*x^-2"), std::string::npos) << r.out;
    EXPECT_NE(r.out.find("remainder: O(x^-3)"), std::string::npos) << r.out;
    EXPECT_NE(r.out.find("verdict: pass"), std::string::npos) << r.out;
}

TEST(Cli, TaylorOutsideRegionIsUsageError) {
    Result r = omega_run({"taylor", "exp(x)", "--at", "x", "--delta", "2", "-n", "2"}, true);
    EXPECT_EQ(r.status, 2);
    EXPECT_NE(r.out.find("precondition"), std::string::npos) << r.out;
}

TEST(Cli, ParseAndDomainErrors) {
    Result r = omega_run({"expand", "log("}, true);
    EXPECT_EQ(r.status, 2);
    EXPECT_NE(r.out.find("column 5"), std::string::npos) << r.out;
    r = omega_run({"expand", "log(-x)"}, true);
    EXPECT_EQ(r.status, 2);
    EXPECT_NE(r.out.find("line 1, column 1"), std::string::npos) << r.out;
    EXPECT_EQ(omega_run({"compose", "x", "x^-1"}).status, 2);
    EXPECT_EQ(omega_run({"frobnicate"}).status, 2);
    EXPECT_EQ(omega_run({}).status, 2);
    EXPECT_EQ(omega_run({"check", "--suite", "nope", "--trials", "1"}).status, 2);
    EXPECT_EQ(omega_run({"check", "--trials", "0"}).status, 2);
}

TEST(Cli, BudgetErrors) {
    EXPECT_EQ(omega_run({"expand", "1/(1 - x^-1) - (1 + x^-1/(1 - x^-1))"}).status, 3);
    EXPECT_EQ(omega_run({"--max-depth", "1", "expand", "exp(exp(exp(x)))"}).status, 3);
}

TEST(Cli, HelpExitsZero) {
    EXPECT_EQ(omega_run({"--help"}).status, 0);
}

TEST(Cli, CheckJson) {
    Result r = omega_run({"check", "--suite", "monotonicity", "--trials", "100", "--seed", "42", "--json"});
    EXPECT_EQ(r.status, 0);
    const auto j = nlohmann::json::parse(r.out);
    EXPECT_EQ(j["format_version"], 1);
    EXPECT_EQ(j["failed"], 0);
    EXPECT_EQ(j["checkers"][0]["attempted"], 100);
}

TEST(Cli, CheckDeterministic) {
    const std::vector<std::string> args{"check", "--suite", "algebra,exp_rank,weak_mvp", "--trials", "10",
                                        "--seed", "5", "--json"};
    const Result a = omega_run(args), b = omega_run(args);
    EXPECT_EQ(a.status, 0);
    EXPECT_EQ(a.out, b.out);
    std::vector<std::string> threaded = args;
    threaded.insert(threaded.end(), {"--jobs", "2"});
    EXPECT_EQ(omega_run(threaded).out, a.out);
    const Result text = omega_run({"check", "--suite", "exp_rank", "--trials", "5", "--seed", "5"});
    EXPECT_EQ(text.status, 0);
    EXPECT_NE(text.out.find("exp_rank"), std::string::npos);
}

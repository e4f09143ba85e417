#include <gtest/gtest.h>

#include <algorithm>
#include <limits>

#include "patchsim/generator.hpp"
#include "patchsim/minilang/parser.hpp"

using namespace patchsim;
using namespace patchsim::minilang;

namespace {

const char* kGated =
    "fn entry(n) { if (n > 10) { return big(n); } return 0; }\n"
    "fn big(n) { return n - 10; }\n";

std::vector<TestInvocation> invs(std::initializer_list<const char*> calls) {
  std::vector<TestInvocation> out;
  for (auto c : calls) out.push_back(TestInvocation::parse(c));
  return out;
}

bool covers(const Program& p, const std::set<std::string>& m, const TestCase& t) {
  const auto r = run_traced(p, TestInvocation::parse(t.input));
  return !extract_context_spectrum(r.events, m).empty();
}

}  // namespace

TEST(Generate, OnlyCoveringTests) {
  const auto p = parse(kGated);
  const std::set<std::string> m = {"big"};
  const auto originals = invs({"entry(1)", "entry(3)"});
  const auto tests = generate_tests(p, m, originals);
  ASSERT_FALSE(tests.empty());  // 42 and 100 are in the default pool
  for (const auto& t : tests) {
    EXPECT_TRUE(covers(p, m, t)) << t.input;
    EXPECT_EQ(t.origin, TestOrigin::generated);
    EXPECT_EQ(t.result, TestResult::unknown);
  }
}

TEST(Generate, CapAndUniformSubset) {
  const auto p = parse("fn f(a, b) { return g(a, b); }\nfn g(a, b) { return a + b; }");
  const std::set<std::string> m = {"g"};
  const auto originals = invs({"f(1, 2)"});
  GenConfig all;
  all.max_selected = std::numeric_limits<std::size_t>::max();
  const auto everything = generate_tests(p, m, originals, all);
  ASSERT_GE(everything.size(), 35u);

  const auto capped = generate_tests(p, m, originals);
  ASSERT_EQ(capped.size(), 20u);
  for (const auto& t : capped) {
    EXPECT_TRUE(std::any_of(everything.begin(), everything.end(),
                            [&](const TestCase& e) { return e.input == t.input; }));
  }
  EXPECT_EQ(capped.front().id, "gen000");
  EXPECT_EQ(capped.back().id, "gen019");

  GenConfig exact = all;
  exact.max_selected = everything.size();
  EXPECT_EQ(generate_tests(p, m, originals, exact).size(), everything.size());
}

TEST(Generate, UnreachableMethodGivesNothing) {
  const auto p = parse("fn f(x) { return x; }\nfn dead(x) { return x + 1; }");
  EXPECT_TRUE(generate_tests(p, {"dead"}, invs({"f(1)"})).empty());
}

TEST(Generate, ReproducibleAndSeedSensitive) {
  const auto p = parse(kGated);
  const auto originals = invs({"entry(1)", "entry(12)"});
  const auto a = generate_tests(p, {"big"}, originals);
  const auto b = generate_tests(p, {"big"}, originals);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i].input, b[i].input);

  GenConfig other;
  other.seed = 1;
  const auto c = generate_tests(p, {"big"}, originals, other);
  bool differs = c.size() != a.size();
  for (std::size_t i = 0; !differs && i < a.size(); ++i) differs = a[i].input != c[i].input;
  EXPECT_TRUE(differs);
}

TEST(Generate, SkipsOriginalInputsAndDuplicates) {
  const auto p = parse(kGated);
  const auto originals = invs({"entry(42)", "entry(100)"});
  const auto tests = generate_tests(p, {"big"}, originals);
  std::set<std::string> seen;
  for (const auto& t : tests) {
    EXPECT_NE(t.input, "entry(42)");
    EXPECT_NE(t.input, "entry(100)");
    EXPECT_TRUE(seen.insert(t.input).second);
  }
}

TEST(Generate, ArrayShapesFollowOriginals) {
  const auto p = parse("fn f(xs) { return g(xs); }\nfn g(xs) { return len(xs); }");
  const auto tests = generate_tests(p, {"g"}, invs({"f([\"a\", null])"}));
  ASSERT_FALSE(tests.empty());
  for (const auto& t : tests) {
    const auto inv = TestInvocation::parse(t.input);
    ASSERT_EQ(inv.args.size(), 1u);
    ASSERT_TRUE(inv.args[0].is_array()) << t.input;
    for (const auto& e : *inv.args[0].as_array()) EXPECT_TRUE(e.is_string() || e.is_null()) << t.input;
  }
}

TEST(Generate, RequiresModifiedMethods) {
  EXPECT_THROW(generate_tests(parse(kGated), {}, invs({"entry(1)"})), Error);
}

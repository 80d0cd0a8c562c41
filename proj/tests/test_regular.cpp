#include <doctest.h>

#include "fixtures.hpp"
#include "slrkit/error.hpp"
#include "slrkit/regular.hpp"

using namespace slrkit;

namespace {

std::vector<std::string> conditions(const RegularityReport& r)
{
    std::vector<std::string> out;
    for (const auto& v : r.violations) {
        out.push_back(v.condition);
    }
    return out;
}

} // namespace

TEST_CASE("fixtures are regular with the expected productive predicates")
{
    const auto a = check_regular(fixture::productive_only());
    CHECK(a.regular);
    CHECK(a.productive == std::set<std::string>{"A", "B"});
    CHECK(a.unproductive.empty());

    const auto b = check_regular(fixture::mixed());
    CHECK(b.regular);
    CHECK(b.productive == std::set<std::string>{"A", "C"});
    CHECK(b.unproductive == std::set<std::string>{"B"});
    CHECK_NOTHROW(require_regular(fixture::mixed_rigid()));
}

TEST_CASE("rule forms")
{
    const Sid b = fixture::mixed();
    CHECK(rule_shape(b.rules[0]).form == RuleForm::Productive);
    CHECK(rule_shape(b.rules[1]).form == RuleForm::Recursive);
    CHECK(rule_shape(b.rules[2]).form == RuleForm::Union);
    CHECK(rule_shape(b.rules[3]).form == RuleForm::Productive);
    CHECK(rule_shape(fixture::productive_only().rules[2]).form == RuleForm::SingleAtom);
    CHECK(rule_shape(parse_sid("alphabet b/2 ; A(x1) <= emp ;").rules[0]).form == RuleForm::Union);
}

TEST_CASE("each crafted violation cites its condition")
{
    const std::vector<std::pair<std::string, std::string>> cases = {
        {"violation_1.sid", "1"}, {"violation_2a.sid", "2a"}, {"violation_2b.sid", "2b"},
        {"violation_3.sid", "3"}, {"violation_4.sid", "4"},
    };
    for (const auto& [file, condition] : cases) {
        CAPTURE(file);
        const Sid s = fixture::sid(file);
        const auto r = check_regular(s);
        CHECK_FALSE(r.regular);
        CHECK(conditions(r) == std::vector<std::string>{condition});
        CHECK_THROWS_AS(require_regular(s), Error);
    }
}

TEST_CASE("connectivity may pass through parameters")
{
    const Sid s = parse_sid("alphabet b/2 ; A() <= exists y . b(y,y) * B(y) ; "
                            "B(x1) <= exists y z . b(x1,y) * b(x1,z) * B(y) ; B(x1) <= b(x1,x1) ;");
    CHECK(check_regular(s).regular);
}

TEST_CASE("non-prenex bodies are rejected")
{
    const Sid s = parse_sid("alphabet b/2 ; A() <= exists y . b(y,y) * (exists z . b(y,z)) ;");
    const auto r = check_regular(s);
    CHECK_FALSE(r.regular);
    CHECK(conditions(r) == std::vector<std::string>{"2"});
}

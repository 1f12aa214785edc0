#include <doctest.h>

#include <random>

#include "depgauge/errors.hpp"
#include "depgauge/requirements.hpp"

using namespace depgauge;

TEST_CASE("name normalization per the index rules") {
    CHECK(normalize_package_name("A.B_c") == "a-b-c");
    CHECK(normalize_package_name("urllib3") == "urllib3");
    CHECK(normalize_package_name("Django") == "django");
    CHECK(normalize_package_name("zope.interface") == "zope-interface");
    CHECK(normalize_package_name("a--b__c..d") == "a-b-c-d");
    // Idempotent.
    for (const char* name : {"A.B_c", "x-Y.z", "PKG__name"}) {
        std::string once = normalize_package_name(name);
        CHECK(normalize_package_name(once) == once);
    }
}

TEST_CASE("requirement parsing") {
    Requirement basic = Requirement::parse("urllib3>=1.26.0");
    CHECK(basic.name.normalized == "urllib3");
    CHECK(basic.constraints.str() == ">=1.26.0");
    CHECK_FALSE(basic.marker);
    CHECK(basic.extras.empty());

    Requirement bare = Requirement::parse("pkg");
    CHECK(bare.name.normalized == "pkg");
    CHECK(bare.constraints.any_version());
    CHECK_FALSE(bare.marker);

    Requirement full = Requirement::parse("pkg[extra1]>=1.0; python_version >= \"3.8\"");
    CHECK(full.name.normalized == "pkg");
    CHECK(full.extras == std::set<std::string>{"extra1"});
    CHECK(full.constraints.str() == ">=1.0");
    REQUIRE(full.marker);
    CHECK(full.marker->str() == "python_version >= \"3.8\"");

    Requirement parens = Requirement::parse("requests (>=2.0, <3)");
    CHECK(parens.constraints.str() == ">=2.0,<3");

    Requirement url = Requirement::parse("pkg @ https://example.invalid/pkg-1.0.tar.gz");
    CHECK(url.url == "https://example.invalid/pkg-1.0.tar.gz");
    CHECK(url.constraints.any_version());

    CHECK_THROWS_AS(Requirement::parse(""), ParseError);
    CHECK_THROWS_AS(Requirement::parse("-pkg"), ParseError);
    CHECK_THROWS_AS(Requirement::parse("pkg >="), ParseError);
    CHECK_THROWS_AS(Requirement::parse("pkg[a >=1.0"), ParseError);
}

TEST_CASE("parse errors carry a byte offset") {
    try {
        Requirement::parse("pkg; python_version >=");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.offset() != std::string::npos);
    }
}

namespace {

std::string random_requirement(std::mt19937_64& rng) {
    std::uniform_int_distribution<int> coin(0, 1);
    std::uniform_int_distribution<int> pick(0, 4);
    static const char* names[] = {"pkg", "urllib3", "My.Package", "a_b-c", "numpy2"};
    static const char* specs[] = {"", ">=1.0", "==2.0.1", ">=1.5,<2.0,!=1.7", "~=1.4.2"};
    static const char* markers[] = {
        "", "python_version >= \"3.8\"", "sys_platform == \"linux\" and extra == \"fast\"",
        "os_name != \"nt\" or python_version < \"3.0\"", "not (os_name == \"nt\")"};

    std::string out = names[pick(rng)];
    if (coin(rng)) {
        out += "[extra1";
        if (coin(rng)) out += ",extra_two";
        out += "]";
    }
    out += specs[pick(rng)];
    const char* marker = markers[pick(rng)];
    if (*marker) {
        out += "; ";
        out += marker;
    }
    return out;
}

}  // namespace

TEST_CASE("requirement round-trip over a generated corpus") {
    std::mt19937_64 rng(77001);
    for (int i = 0; i < 1200; ++i) {
        std::string text = random_requirement(rng);
        CAPTURE(text);
        Requirement first = Requirement::parse(text);
        Requirement second = Requirement::parse(first.str());
        CHECK(first == second);
        CHECK(first.str() == second.str());
    }
}

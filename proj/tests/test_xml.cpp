#include "doctest.h"
#include "jade/xml.hpp"

using namespace jade;

TEST_CASE("xml parses elements, attributes, text") {
    auto res = xml::parse(R"(<?xml version="1.0"?>
<run seed="7" tick="0.1">
  <!-- arena -->
  <world w="10" h="8"/>
  <agent name="bob" color="#ff0000">hello &amp; goodbye</agent>
</run>)");
    REQUIRE(res.root.has_value());
    CHECK(!has_errors(res.diags));
    const auto& root = *res.root;
    CHECK(root.name == "run");
    REQUIRE(root.attr("seed") != nullptr);
    CHECK(*root.attr("seed") == "7");
    CHECK(root.attr("missing") == nullptr);
    REQUIRE(root.children.size() == 2);
    CHECK(root.children[0].name == "world");
    const auto* agent = root.first_child("agent");
    REQUIRE(agent != nullptr);
    CHECK(*agent->attr("name") == "bob");
    CHECK(agent->text == "hello & goodbye");
}

TEST_CASE("xml attribute order is preserved") {
    auto res = xml::parse(R"(<a z="1" y="2" x="3"/>)");
    REQUIRE(res.root.has_value());
    REQUIRE(res.root->attrs.size() == 3);
    CHECK(res.root->attrs[0].first == "z");
    CHECK(res.root->attrs[1].first == "y");
    CHECK(res.root->attrs[2].first == "x");
}

TEST_CASE("xml entities") {
    auto res = xml::parse("<a t=\"&lt;&gt;&quot;&apos;&amp;&#65;\">x&lt;y</a>");
    REQUIRE(res.root.has_value());
    CHECK(*res.root->attr("t") == "<>\"'&A");
    CHECK(res.root->text == "x<y");
}

TEST_CASE("xml mismatched tag reports location") {
    auto res = xml::parse("<a>\n  <b>\n  </c>\n</a>");
    CHECK(has_errors(res.diags));
    REQUIRE(!res.diags.empty());
    CHECK(res.diags[0].line == 3);
}

TEST_CASE("xml duplicate attribute is an error") {
    auto res = xml::parse(R"(<a x="1" x="2"/>)");
    CHECK(has_errors(res.diags));
}

TEST_CASE("xml unterminated document") {
    auto res = xml::parse("<a><b></b>");
    CHECK(has_errors(res.diags));
}

TEST_CASE("xml trailing content after root is an error") {
    auto res = xml::parse("<a/><b/>");
    CHECK(has_errors(res.diags));
}

TEST_CASE("xml children_named filters") {
    auto res = xml::parse("<r><p i=\"0\"/><q/><p i=\"1\"/></r>");
    REQUIRE(res.root.has_value());
    auto ps = res.root->children_named("p");
    REQUIRE(ps.size() == 2);
    CHECK(*ps[1]->attr("i") == "1");
}

#include "doctest.h"

#include "chiralvdw/errors.hpp"
#include "chiralvdw/structured_text.hpp"

using namespace chiralvdw;

TEST_CASE("parse scalars, lists and nested blocks") {
  const auto doc = TextDocument::parse(R"(
# header comment
scenario = scan
title = "two words"   # trailing comment
plate { chirality = -1; z0 = 0 }
grid {
  y = [0.5, 10, 40]
  inner { flag = true }
}
transition { omega = 1 }
transition { omega = 2 }
)");
  CHECK(doc.get_string("scenario") == "scan");
  CHECK(doc.get_string("title") == "two words");
  CHECK(doc.block("plate")->get_int("chirality") == -1);
  CHECK(doc.block("grid")->get_doubles("y") == std::vector<double>{0.5, 10, 40});
  CHECK(doc.block("grid")->block("inner")->get_bool("flag", false));
  CHECK(doc.blocks("transition").size() == 2);
  CHECK(doc.blocks("transition")[1]->get_double("omega") == 2.0);
  CHECK(doc.get_double("missing", 4.5) == 4.5);
  CHECK(doc.find_dotted("grid.inner.flag") != nullptr);
}

TEST_CASE("dotted overrides create or replace entries") {
  auto doc = TextDocument::parse("plate { chirality = 1 }\n");
  doc.set_dotted("plate.chirality", "-1");
  doc.set_dotted("quadrature.nodes", "64");
  doc.set_dotted("grid.y", "[1, 2]");
  CHECK(doc.block("plate")->get_int("chirality") == -1);
  CHECK(doc.block("quadrature")->get_int("nodes") == 64);
  CHECK(doc.block("grid")->get_doubles("y").size() == 2);
  CHECK_THROWS_AS(doc.set_dotted("a", "1 2"), ConfigError);
}

TEST_CASE("to_text round trip reproduces the document") {
  const auto doc = TextDocument::parse("a = 1\nb = \"x y\"\nc { d = [1, 2, 3], e { f = g } }\n");
  const auto again = TextDocument::parse(doc.to_text());
  CHECK(again.to_text() == doc.to_text());
  CHECK(again.get_string("b") == "x y");
  CHECK(again.block("c")->block("e")->get_string("f") == "g");
}

TEST_CASE("errors name the key and line") {
  CHECK_THROWS_AS(TextDocument::parse("a = \n"), ConfigError);
  CHECK_THROWS_AS(TextDocument::parse("block { a = 1\n"), ConfigError);
  CHECK_THROWS_AS(TextDocument::parse("}"), ConfigError);
  CHECK_THROWS_AS(TextDocument::parse("a 1"), ConfigError);
  const auto doc = TextDocument::parse("x = abc\nv = [1, 2]\n", "cfg");
  try {
    doc.get_double("x");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("'x'") != std::string::npos);
    CHECK(std::string(e.what()).find("cfg:1") != std::string::npos);
  }
  CHECK_THROWS_AS(doc.get_vector3("v"), ConfigError);
  CHECK_THROWS_AS(doc.get_string("nope"), ConfigError);
  CHECK_THROWS_AS(TextDocument::load("/nonexistent/x.cfg"), IoError);
}

/*
 * Copyright (C) 2026 The gbcalc Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <random>

#include "corpus.hpp"
#include "doctest.h"
#include "generator.hpp"
#include "gbcalc/parser.hpp"
#include "gbcalc/printer.hpp"
#include "gbcalc/validate.hpp"

using namespace gbcalc;

TEST_SUITE("syntax") {
  TEST_CASE("corpus programs survive print and reparse") {
    auto files = gbtest::corpus_programs();
    REQUIRE(files.size() >= 12);
    for (const auto& f : files) {
      CAPTURE(f);
      Program p = gbtest::load_program_file(f);
      Program q = parse_program(to_source(p));
      CHECK(p == q);
      CHECK(to_source(q) == to_source(p));
    }
  }

  TEST_CASE("generated programs survive print and reparse") {
    std::mt19937_64 rng(7);
    for (int i = 0; i < 200; ++i) {
      std::string src = gbtest::random_program(rng);
      CAPTURE(src);
      Program p = gbtest::load_program_text(src);
      CHECK(parse_program(to_source(p)) == p);
    }
  }

  TEST_CASE("method and sync bodies end in skip") {
    Program p = parse_program("class A { method m() { sync (this) { } } } main { }");
    auto parts = flatten_seq(*method_body(p, "A", "m"));
    REQUIRE(parts.size() == 2);
    CHECK(is_skip(*parts.back()));
    const auto& sync = std::get<SyncCmd>(parts[0]->node);
    CHECK(is_skip(*sync.body));
    CHECK(is_skip(*p.main_body()));
  }

  TEST_CASE("make_seq keeps sequences right-associated") {
    auto a = make_decl("a", make_var("this"));
    auto b = make_decl("b", make_var("this"));
    auto c = make_skip();
    auto left = make_seq(make_seq(a, b), c);
    auto right = make_seq(a, make_seq(b, c));
    CHECK(*left == *right);
    CHECK(flatten_seq(left).size() == 3);
    CHECK(head_of(left) == a);
  }

  TEST_CASE("lookup picks the nearest implementing class") {
    Program p = gbtest::load_program_file(gbtest::corpus_dir() + "/inherit.gbc");
    CHECK(lookup(p, "Derived", "poke") == std::optional<std::string>("Derived"));
    CHECK(lookup(p, "Derived", "run") == std::optional<std::string>("Base"));
    CHECK(lookup(p, "Base", "poke") == std::optional<std::string>("Base"));
    CHECK_FALSE(lookup(p, "Derived", "absent").has_value());
    CHECK_FALSE(lookup(p, "Object", "run").has_value());
  }

  TEST_CASE("lookup over a three-level chain") {
    Program p = parse_program(R"(
      class A { method m() { } method n() { } }
      class B extends A { method m() { } }
      class C extends B { }
      main { })");
    CHECK(*lookup(p, "C", "m") == "B");
    CHECK(*lookup(p, "C", "n") == "A");
    CHECK(*lookup(p, "B", "n") == "A");
  }

  TEST_CASE("validation") {
    auto check = [](const char* src, ViolationKind k) {
      CAPTURE(src);
      CHECK(validate_program(parse_program(src)).has(k));
    };
    check("class A { }", ViolationKind::MissingMain);
    check("main { decl x = this; decl x = this; }", ViolationKind::DuplicateDeclaration);
    check("main { decl x = y; }", ViolationKind::FreeVariable);
    check("class A extends B { } main { }", ViolationKind::UnknownParent);
    check("class A extends B { } class B extends A { } main { }",
          ViolationKind::CyclicInheritance);
    CHECK(validate_program(parse_program("main { decl x = this; x := this.f; }")).ok());
  }

  TEST_CASE("parse errors carry positions") {
    try {
      parse_program("main {\n  decl = this;\n}");
      FAIL("no error");
    } catch (const ParseError& e) {
      CHECK(e.line() == 2);
      CHECK(e.column() == 8);
    }
    CHECK_THROWS_AS(parse_program("main { decl itself = this; }"), ParseError);
    CHECK_THROWS_AS(parse_program("main { x.f.g := this; }"), ParseError);
    CHECK_THROWS_AS(parse_program("class Object { } main { }"), ParseError);
    CHECK_THROWS_AS(parse_program("main { } main { }"), ParseError);
    CHECK_THROWS_AS(parse_expression("itself.f"), ParseError);
    CHECK_NOTHROW(parse_expression("itself.f", true));
  }

  TEST_CASE("annotation files") {
    auto anns = parse_annotations(
        "# comment\n\nguard name field y by this.x\nguard value var K.m.w by itself\n");
    REQUIRE(anns.size() == 2);
    CHECK(std::get<FieldTarget>(anns[0].target).field == "y");
    CHECK(anns[0].semantics == ProtectionSemantics::Name);
    CHECK(to_string(*anns[0].guard) == "this.x");
    const auto& v = std::get<VarTarget>(anns[1].target);
    CHECK(v.class_name == "K");
    CHECK(v.method == "m");
    CHECK(v.var == "w");
    CHECK(anns[1].semantics == ProtectionSemantics::Value);
    for (const auto& a : anns) {
      auto again = parse_annotations(to_source(a));
      REQUIRE(again.size() == 1);
      CHECK(*again[0].guard == *a.guard);
      CHECK(again[0].target == a.target);
    }
    CHECK_THROWS_AS(parse_annotations("guard maybe field f by this"), ParseError);
  }

  TEST_CASE("location names") {
    CHECK(to_string(kInitLocation) == "l_init");
    CHECK(to_string(Location{1}) == "l0");
    CHECK(to_string(Location{7}) == "l6");
  }
}

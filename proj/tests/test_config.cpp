#include <cmath>
#include <cstdlib>
#include <sstream>
#include <string>

#include "doctest.h"
#include "passage/config.hpp"
#include "passage/csv.hpp"
#include "passage/errors.hpp"

using namespace passage;

namespace {

RunConfig parse(std::string_view text) { return parse_config(text); }

// Message of the ConfigError raised by parsing text, or "" if none.
std::string rejection(std::string_view text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return {};
}

bool mentions(const std::string& msg, std::string_view what) { return msg.find(what) != std::string::npos; }

}  // namespace

TEST_CASE("sell config") {
  const auto c = parse(R"j({"subcommand":"sell","gamma":1.1,"z":1,"q":0,"alpha":1,"bmax":30})j");
  CHECK(c.subcommand == Subcommand::Sell);
  CHECK(c.gamma == 1.1);
  CHECK(c.bmax == 30.0);
  CHECK(c.step() == 1e-3);
}

TEST_CASE("defaults") {
  const auto c = parse(R"j({"subcommand":"solve"})j");
  CHECK(c.tol == 1e-8);
  CHECK(c.paths == 100000);
  CHECK(c.seed == 42);
  CHECK(c.step() == doctest::Approx(1e-3 * (c.c_max - c.x_min)));
  CHECK(c.model.is_brownian());

  const auto s = parse(R"j({"subcommand":"scale","x_max":20})j");
  CHECK(s.step() == doctest::Approx(0.02));
  const auto given = parse(R"j({"subcommand":"solve","h":0.05})j");
  CHECK(given.step() == 0.05);
}

TEST_CASE("omega preconditions") {
  const auto msg = rejection(R"j({"subcommand":"solve","omega":{"tail":"constant","a":-1}})j");
  CHECK(mentions(msg, "omega.a"));
  CHECK(mentions(msg, "> 0"));
}

TEST_CASE("omega body must match its tail") {
  const auto c = parse(
      R"j({"subcommand":"solve","omega":{"body":"exp(x)","tail":{"exponential":{"gamma":1,"alpha":1}},"x_tail":0}})j");
  const auto w = c.omega.build();
  CHECK(w(0.0) == 1.0);
  CHECK(w(1.0) == doctest::Approx(std::exp(1.0)));
  CHECK(std::holds_alternative<TailExponential>(w.tail_class()));

  const auto bad = rejection(
      R"j({"subcommand":"solve","omega":{"body":"2*exp(x)","tail":{"exponential":{"gamma":1,"alpha":1}},"x_tail":0}})j");
  CHECK(mentions(bad, "omega"));
  CHECK(mentions(rejection(R"j({"subcommand":"solve","omega":{"body":"exp(","tail":"zero"}})j"), "omega.body"));
}

TEST_CASE("models") {
  const auto c = parse(
      R"j({"subcommand":"psi","model":{"family":"cramer_lundberg","premium":1.5,"jump_rate":1,"eta":1,"variance":0.5}})j");
  CHECK_FALSE(c.model.is_brownian());
  CHECK(c.model.variance() == 0.5);
  CHECK(mentions(rejection(R"j({"subcommand":"psi","model":{"family":"stable"}})j"), "model.family"));
  CHECK(mentions(rejection(R"j({"subcommand":"psi","model":{"family":"brownian","drift":0,"variance":-2}})j"),
                 "model"));
  CHECK(mentions(rejection(R"j({"subcommand":"psi","model":{"family":"brownian","drift":0,"variance":2,"mu":1}})j"),
                 "model.mu"));
}

TEST_CASE("strict schema") {
  CHECK(mentions(rejection(R"j({"subcommand":"solve","tolerance":1e-9})j"), "tolerance"));
  CHECK(mentions(rejection(R"j({"subcommand":"solve","tol":"small"})j"), "tol"));
  CHECK(mentions(rejection(R"j({"subcommand":"mc","paths":-5})j"), "paths"));
  CHECK(mentions(rejection(R"j({"subcommand":"mc","paths":1.5})j"), "paths"));
  CHECK(mentions(rejection(R"j({"subcommand":"fly"})j"), "subcommand"));
  CHECK(mentions(rejection(R"j({"subcommand":"solve","x_min":1})j"), "x_min"));
  CHECK_FALSE(rejection(R"j({"subcommand": "solve", )j").empty());
  CHECK_FALSE(rejection("[1, 2]").empty());
}

TEST_CASE("doubles round-trip through CSV") {
  for (double v : {0.1, 1.0 / 3.0, 6.02214076e23, -2.5e-308, 0.0}) {
    CHECK(std::strtod(format_double(v).c_str(), nullptr) == v);
  }
  std::ostringstream os;
  CsvWriter w(os, {"x", "H"});
  w.row({0.5, 1.25});
  CHECK(os.str() == "x,H\n0.5,1.25\n");
}

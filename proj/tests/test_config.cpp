#include "lrlab/config.hpp"

#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <functional>
#include <string>

using namespace lrlab;

namespace {

std::string error_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

const char* kDesk = R"(
# d=2 desk kernel
[kernel]
d = 2
alpha = 1.0
L = 5
M = 512
model = RW

[greens]
mu = 0.5, 0.9 0.99
series = true
)";

}  // namespace

TEST_CASE("sections flatten into dotted keys") {
  Config c = Config::parse(kDesk);
  CHECK(c.has("kernel.d"));
  CHECK(c.get_int("kernel.M") == 512);
  CHECK(c.get_double("kernel.alpha") == 1.0);
  CHECK(c.get_string("kernel.model") == "RW");
  CHECK(c.get_bool("greens.series"));
  CHECK(c.get_list("greens.mu") == std::vector<double>{0.5, 0.9, 0.99});
  CHECK(c.get_double_or("greens.tol", 1e-12) == 1e-12);
  CHECK(c.get_int_or("kernel.M", 7) == 512);
}

TEST_CASE("kernel section") {
  KernelConfig k = kernel_config(Config::parse(kDesk));
  CHECK(k.spec.d == 2);
  CHECK(k.spec.alpha == 1.0);
  CHECK(k.spec.L == 5.0);
  CHECK(k.spec.model == Model::RW);
  CHECK(k.M == 512);
  CHECK(k.tail_mass_cap == 0.1);
}

TEST_CASE("missing keys are all named") {
  Config c = Config::parse("[kernel]\nd = 1\nmodel = SAW\n");
  const std::string msg = error_of([&] { kernel_config(c); });
  CHECK(msg.find("kernel.alpha") != std::string::npos);
  CHECK(msg.find("kernel.L") != std::string::npos);
  CHECK(msg.find("kernel.M") != std::string::npos);
  CHECK(msg.find("kernel.d") == std::string::npos);
}

TEST_CASE("invalid values name the field") {
  auto msg_for = [](const std::string& body) {
    return error_of([&] { kernel_config(Config::parse("[kernel]\n" + body)); });
  };
  const std::string base = "d = 1\nalpha = 0.5\nL = 4\nmodel = RW\n";
  CHECK(msg_for(base + "M = 511\n").find("kernel.M") != std::string::npos);
  CHECK(msg_for(base + "M = 16\n").find("kernel.M: must exceed 4L") != std::string::npos);
  CHECK(msg_for(base + "M = 1e3\n").find("kernel.M") != std::string::npos);
  CHECK(msg_for("d = 1\nalpha = abc\nL = 4\nM = 64\nmodel = RW\n").find("kernel.alpha") != std::string::npos);
  CHECK(msg_for("d = 1\nalpha = 0.5\nL = 4\nM = 64\nmodel = XY\n").find("kernel.model") != std::string::npos);
  CHECK(msg_for("d = 0\nalpha = 0.5\nL = 4\nM = 64\nmodel = RW\n").find("kernel.d") != std::string::npos);
  CHECK(msg_for(base + "M = 64\ntail_mass_cap = -1\n").find("kernel.tail_mass_cap") != std::string::npos);
}

TEST_CASE("scalar parse errors") {
  Config c = Config::parse("[a]\nx = 1.5z\nn = -3\nb = maybe\nl = 1, two\n");
  CHECK_THROWS_AS(c.get_double("a.x"), ConfigError);
  CHECK(c.get_int("a.n") == -3);
  CHECK_THROWS_AS(c.get_u64("a.n"), ConfigError);
  CHECK_THROWS_AS(c.get_bool("a.b"), ConfigError);
  CHECK_THROWS_AS(c.get_list("a.l"), ConfigError);
  CHECK_THROWS_AS(c.get_string("a.missing"), ConfigError);
  CHECK_THROWS_AS(Config::parse("[a\nx = 1\n"), ConfigError);
}

TEST_CASE("load from disk") {
  const std::string path = "test_config_tmp.ini";
  {
    std::ofstream f(path);
    f << kDesk;
  }
  Config c = Config::load(path);
  CHECK(c.get_int("kernel.d") == 2);
  std::remove(path.c_str());
  CHECK_THROWS_AS(Config::load("no/such/file.ini"), ConfigError);
}

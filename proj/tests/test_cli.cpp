#include <doctest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
};

std::string quote(const std::string& s) {
  std::string q = "'";
  for (char c : s) q += c == '\'' ? std::string("'\\''") : std::string(1, c);
  return q + "'";
}

Run lmt(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + " " + quote(LMT_CLI_PATH) + " " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::string out;
  std::array<char, 4096> buf;
  while (std::size_t n = std::fread(buf.data(), 1, buf.size(), pipe)) out.append(buf.data(), n);
  const int status = pclose(pipe);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

class Scratch {
 public:
  Scratch() : root_(fs::temp_directory_path() / ("lmt_cli_" + std::to_string(::getpid()))) {
    fs::remove_all(root_);
    fs::create_directories(root_);
  }
  ~Scratch() { fs::remove_all(root_); }

  std::string write(const std::string& name, const std::string& text) const {
    std::ofstream(root_ / name, std::ios::binary) << text;
    return path(name);
  }
  std::string path(const std::string& name) const { return quote((root_ / name).string()); }
  fs::path raw(const std::string& name) const { return root_ / name; }

 private:
  fs::path root_;
};

}  // namespace

TEST_CASE("solve prints the optimum") {
  Scratch dir;
  const std::string p = dir.write("p.lmt",
                                  "(declare-bool p)\n"
                                  "(assert-soft p :id a :weight 1 :cost bool)\n"
                                  "(assert-soft (not p) :id b :weight 2 :cost bool)\n");
  const Run r = lmt("solve " + p);
  CHECK(r.code == 0);
  CHECK(r.out == "status optimum\nobjective 1\n(= p false)\n");
  CHECK(lmt("solve --mode omt " + p).out == r.out);
  CHECK(lmt("solve --mode maxsmt " + p).out == r.out);
}

TEST_CASE("solve exit codes") {
  Scratch dir;
  const Run infeasible = lmt("solve " + dir.write("i.lmt", "(declare-real x 0 10)(assert (< x 1))(assert (> x 2))"));
  CHECK(infeasible.code == 1);
  CHECK(infeasible.out == "status infeasible\n");

  CHECK(lmt("solve " + dir.write("bad.lmt", "(declare-real x 0 10)(assert (< x 1)")).code == 2);
  CHECK(lmt("solve " + dir.write("sort.lmt", "(declare-bool p)(assert (< p 1))")).code == 2);
  CHECK(lmt("solve " + dir.write("nb.lmt", "(declare-real x)")).code == 2);
  CHECK(lmt("solve " + dir.path("missing.lmt")).code == 3);
  CHECK(lmt("solve --frobnicate " + dir.path("i.lmt")).code == 3);
  CHECK(lmt("").code == 3);
  CHECK(lmt("solve --mode fast " + dir.path("i.lmt")).code == 3);

  const std::string linear = dir.write("lin.lmt",
                                       "(declare-real x 0 10)\n"
                                       "(assert-soft (<= x 3) :id a :weight 1 :cost linear)\n");
  CHECK(lmt("solve --mode maxsmt " + linear).code == 3);
  const Run omt = lmt("solve " + linear);
  CHECK(omt.code == 0);
  CHECK(omt.out.rfind("status optimum\nobjective 0\n", 0) == 0);
}

TEST_CASE("solve reports a timeout") {
  Scratch dir;
  std::string text;
  for (int i = 0; i < 24; ++i) text += "(declare-bool b" + std::to_string(i) + ")\n";
  for (int i = 0; i < 24; ++i) {
    const std::string a = "b" + std::to_string(i), b = "b" + std::to_string((i + 1) % 24);
    text += "(assert-soft (iff " + a + " " + b + ") :id s" + std::to_string(i) + " :weight " +
            std::to_string(i % 5 + 1) + " :cost bool)\n";
    text += "(assert-soft (not " + a + ") :id t" + std::to_string(i) + " :weight 1 :cost bool)\n";
  }
  const Run r = lmt("solve --timeout 0.000000001 " + dir.write("big.lmt", text));
  CHECK(r.code == 4);
  CHECK((r.out.rfind("status timeout\n", 0) == 0 || r.out.rfind("status unknown\n", 0) == 0));
}

TEST_CASE("gen, train, predict and eval form a deterministic pipeline") {
  Scratch dir;
  const std::string d = dir.path("h");
  REQUIRE(lmt("gen --task housing --seed 7 --n 6 --n-test 4 --out-dir " + d).code == 0);
  const fs::path h = dir.raw("h");
  for (const char* f : {"problem.lmt", "data.lmt", "test.lmt", "truth.model"}) CHECK(fs::exists(h / f));

  const std::string problem = quote((h / "problem.lmt").string());
  const std::string model = quote((h / "m.model").string());
  REQUIRE(lmt("train --problem " + problem + " --data " + quote((h / "data.lmt").string()) +
              " --C 100 --eps 0.001 --out " + model)
              .code == 0);
  CHECK(fs::exists(h / "m.model.log"));
  const std::string model_text = slurp(h / "m.model");
  CHECK(model_text.rfind("#C=100\n#eps=0.001\n#tau=0\n", 0) == 0);

  const std::string pred = quote((h / "pred.lmt").string());
  const std::string test = quote((h / "test.lmt").string());
  REQUIRE(lmt("predict --problem " + problem + " --model " + model + " --data " + test + " --out " + pred).code ==
          0);
  const Run ev = lmt("eval --pred " + pred + " --gold " + test);
  CHECK(ev.code == 0);
  CHECK(ev.out.rfind("examples=4\nmean_hamming=", 0) == 0);
  CHECK(ev.out.find("exact_recovery=") != std::string::npos);
  CHECK(slurp(h / "pred.lmt").find("(prediction (= ") == 0);

  // The truth model predicts the gold worlds exactly.
  const std::string truth = quote((h / "truth.model").string());
  const std::string tpred = quote((h / "tpred.lmt").string());
  REQUIRE(lmt("predict --problem " + problem + " --model " + truth + " --data " + test + " --out " + tpred).code ==
          0);
  CHECK(lmt("eval --pred " + tpred + " --gold " + test).out.find("exact_recovery=1\n") != std::string::npos);

  // A second pipeline run reproduces every byte.
  REQUIRE(lmt("gen --task housing --seed 7 --n 6 --n-test 4 --out-dir " + dir.path("h2")).code == 0);
  const fs::path h2 = dir.raw("h2");
  for (const char* f : {"problem.lmt", "data.lmt", "test.lmt", "truth.model"}) {
    CHECK(slurp(h / f) == slurp(h2 / f));
  }
  REQUIRE(lmt("train --problem " + problem + " --data " + quote((h2 / "data.lmt").string()) +
              " --C 100 --eps 0.001 --out " + quote((h2 / "m.model").string()))
              .code == 0);
  CHECK(slurp(h2 / "m.model") == model_text);
  CHECK(slurp(h2 / "m.model.log") == slurp(h / "m.model.log"));
}

TEST_CASE("the seed defaults to LMT_SEED") {
  Scratch dir;
  REQUIRE(lmt("gen --task activity --seed 5 --n 3 --out-dir " + dir.path("a")).code == 0);
  REQUIRE(lmt("gen --task activity --n 3 --out-dir " + dir.path("b"), "LMT_SEED=5").code == 0);
  REQUIRE(lmt("gen --task activity --n 3 --out-dir " + dir.path("c"), "LMT_SEED=6").code == 0);
  CHECK(slurp(dir.raw("a") / "data.lmt") == slurp(dir.raw("b") / "data.lmt"));
  CHECK(slurp(dir.raw("a") / "data.lmt") != slurp(dir.raw("c") / "data.lmt"));
  CHECK(lmt("gen --task activity --n 3 --out-dir " + dir.path("d"), "LMT_SEED=x").code == 3);
  CHECK(lmt("gen --task garden --n 3 --out-dir " + dir.path("e")).code == 3);
}

TEST_CASE("train and eval input errors") {
  Scratch dir;
  const std::string p = dir.write("p.lmt", "(declare-bool a)(declare-bool b)(assert-soft (or a b) :id s :weight 1 :cost bool)");
  const std::string d = dir.write("d.lmt", "(example (given (= a true)) (gold (= b false)))\n");
  const std::string out = dir.path("m.model");
  CHECK(lmt("train --problem " + p + " --data " + d + " --out " + out + " --C 0").code == 3);
  CHECK(lmt("train --problem " + p + " --data " + dir.write("x.lmt", "(example (gold))") + " --out " + out).code == 2);
  CHECK(lmt("train --problem " + p + " --data " + d + " --out " + out).code == 0);
  CHECK(lmt("predict --problem " + p + " --model " + dir.write("bad.model", "s -1\n") + " --data " + d +
            " --out " + dir.path("o.lmt"))
            .code == 2);
  CHECK(lmt("eval --pred " + dir.write("pr.lmt", "(prediction (= b true))\n(prediction (= b true))\n") + " --gold " + d).code ==
        2);
}

#include "cflab/checkpoint.hpp"
#include "cflab/commands.hpp"
#include "cflab/error.hpp"
#include "cflab/io.hpp"

#include <doctest.h>

#include <filesystem>
#include <sstream>

using namespace cflab;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag) {
    path = fs::temp_directory_path() / ("cflab_test_" + tag + "_" + std::to_string(::getpid()));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

struct Result {
  int code;
  std::string out, err;
};

Result cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

}  // namespace

TEST_SUITE("cli-io") {
  TEST_CASE("sha256") {
    CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  }

  TEST_CASE("checkpoint round trip and corruption") {
    Checkpoint cp("stats");
    cp.set_uint("n", 5000);
    cp.set_bigint("q", pow10(50) + 7);
    cp.set_real("sum", 0.1L);
    const std::string text = cp.serialize();
    const Checkpoint back = Checkpoint::parse(text);
    CHECK(back.kind() == "stats");
    CHECK(back.get_uint("n") == 5000);
    CHECK(back.get_bigint("q") == pow10(50) + 7);
    CHECK(back.get_real("sum") == 0.1L);
    CHECK_THROWS_AS(back.get("missing"), CheckpointError);

    std::string corrupted = text;
    corrupted[corrupted.find("5000")] = '6';
    CHECK_THROWS_AS(Checkpoint::parse(corrupted), CheckpointError);

    std::string body = text.substr(0, text.rfind("digest "));
    body.replace(0, body.find('\n'), "cflab-checkpoint 2");
    try {
      Checkpoint::parse(body + "digest " + sha256_hex(body) + "\n");
      FAIL("expected version error");
    } catch (const CheckpointError& e) {
      CHECK(std::string(e.what()).find("version") != std::string::npos);
    }
  }

  TEST_CASE("config validation") {
    const auto& cat = MersenneCatalog::builtin();
    RunConfig c;
    c.terms = 48;
    CHECK_THROWS_AS(c.validate(cat), ConfigError);
    c.terms = 47;
    CHECK_NOTHROW(c.validate(cat));
    c.precision = 0;
    CHECK_THROWS_AS(c.validate(cat), ConfigError);
    c.precision = 10;
    c.stride = 0;
    CHECK_THROWS_AS(c.validate(cat), ConfigError);
    c.stride = 1;
    c.statistics = {"median"};
    CHECK_THROWS_AS(c.validate(cat), ConfigError);
    CHECK_THROWS_AS(run_config_from_json({{"precison", 3}}), ConfigError);
    const RunConfig j = run_config_from_json({{"sequence", "dyadic"}, {"terms", 5}, {"mode", "paper"}});
    CHECK(j.sequence.kind == SequenceKind::dyadic);
    CHECK(run_config_from_json(to_json(j)).mode == ExpansionMode::paper);
    RunConfig p;
    p.preset = "desk";
    p.apply_preset();
    CHECK(p.terms == 18u);
    CHECK(p.precision == 10000u);
  }

  TEST_CASE("scientific format of 1/Q^2") {
    CHECK(format_inverse_square(BigInt(685)) == "2.131173743e-06");
    CHECK(format_inverse_square(BigInt(1)) == "1.000000000e+00");
    CHECK(format_inverse_square(BigInt(10)) == "1.000000000e-02");
    CHECK(format_inverse_square(BigInt(3)) == "1.111111111e-01");
  }

  TEST_CASE("sum command writes files and a manifest") {
    TempDir dir("sum");
    const auto r = cli({"sum", "mersenne", "12", "--precision", "52", "--out", dir.path.string()});
    CHECK(r.code == 0);
    CHECK(r.out.find("0.5164541789407885653304873429715228588159685534154197") != std::string::npos);
    CHECK(read_text_file(dir.path / "run_decimal.txt") == "0.5164541789407885653304873429715228588159685534154197\n");
    const auto manifest = nlohmann::json::parse(read_text_file(dir.path / "manifest.json"));
    CHECK(manifest["outputs"]["run_decimal.txt"]["sha256"] == sha256_file(dir.path / "run_decimal.txt"));
    CHECK(manifest["catalog_sha256"] == sha256_hex(MersenneCatalog::builtin().canonical_text()));

    // rerun: identical digests
    const auto first = manifest["outputs"];
    CHECK(cli({"sum", "mersenne", "12", "--precision", "52", "--out", dir.path.string()}).code == 0);
    CHECK(nlohmann::json::parse(read_text_file(dir.path / "manifest.json"))["outputs"] == first);

    const auto dy = cli({"sum", "dyadic", "4", "--exact"});
    CHECK(dy.out.find("0.40625") == std::string::npos);  // 4 terms adds 1/128
    CHECK(dy.out.find("0.4140625") != std::string::npos);
  }

  TEST_CASE("cf command") {
    const auto r = cli({"cf", "--rational", "331/651"});
    CHECK(r.code == 0);
    CHECK(r.out.find("quotients: 4") != std::string::npos);
    CHECK(r.out.find("largest: a_3 = 29") != std::string::npos);
    const auto wide = cli({"cf", "--rational", "1/3", "--mode", "certified", "--precision", "1"});
    CHECK(wide.code == 0);
  }

  TEST_CASE("config file and exit codes") {
    TempDir dir("codes");
    write_text_file(dir.path / "c.json", R"({"sequence": "mersenne", "terms": 13, "precision": 47})");
    const auto um = cli({"um", "--config", (dir.path / "c.json").string()});
    CHECK(um.code == 0);
    CHECK(um.out.find("0.31824815840584486942596202748140694243806236564") != std::string::npos);
    CHECK(um.out.find("3  2.131173743e-06") != std::string::npos);

    write_text_file(dir.path / "bad.json", R"({"terms": )");
    CHECK(cli({"um", "--config", (dir.path / "bad.json").string()}).code == 2);
    CHECK(cli({"um", "--terms", "48"}).code == 2);
    CHECK(cli({"sum", "primes", "3"}).code == 2);
    CHECK(cli({"bogus"}).code == 2);
    CHECK(cli({"sum", "--stride", "0", "mersenne", "3"}).code == 2);
    CHECK(cli({"um", "--terms", "3", "--digits", "12"}).code == 3);
    write_text_file(dir.path / "x.checkpoint", "cflab-checkpoint 1\nkind stats\ndigest 00\n");
    CHECK(cli({"resume", (dir.path / "x.checkpoint").string()}).code == 4);
  }

  TEST_CASE("diagnostics precision audit names n") {
    TempDir dir("audit");
    write_text_file(dir.path / "r.txt", "0.318248158405844869425962027481\n");
    const auto r = cli({"diagnostics", "--terms", "8", "--value", (dir.path / "r.txt").string()});
    CHECK(r.code == 3);
    CHECK(r.err.find("n = 5") != std::string::npos);
    const auto ok = cli({"diagnostics", "--terms", "8", "--value", (dir.path / "r.txt").string(),
                         "--delta-to", "3", "--summary", "--out", dir.path.string()});
    CHECK(ok.code == 0);
    CHECK(ok.out.find("mean delta") != std::string::npos);
    CHECK(fs::exists(dir.path / "run_diagnostics.json"));
    CHECK(fs::exists(dir.path / "run_diagnostics.csv"));
  }

  TEST_CASE("stats: interrupted and resumed run is byte-identical") {
    TempDir one("stats1"), two("stats2");
    const std::vector<std::string> base{"stats", "mersenne", "17", "--which", "khinchin,levy,signs,records,kuzmin",
                                        "--stride", "7", "--checkpoint-interval", "500"};
    auto with_out = [&](const fs::path& p, std::vector<std::string> extra) {
      auto a = base;
      a.push_back("--out");
      a.push_back(p.string());
      a.insert(a.end(), extra.begin(), extra.end());
      return cli(a);
    };
    REQUIRE(with_out(one.path, {}).code == 0);
    const auto stopped = with_out(two.path, {"--stop-after", "1234"});
    REQUIRE(stopped.code == 0);
    CHECK(stopped.out.find("stopped at n = 1234") != std::string::npos);
    CHECK(cli({"resume", (two.path / "run.checkpoint").string(), "--stop-after", "2000"}).code == 0);
    const auto resumed = cli({"resume", (two.path / "run.checkpoint").string()});
    CHECK(resumed.code == 0);
    for (const char* f : {"run_khinchin.csv", "run_levy.csv", "run_signs.csv", "run_records.csv", "run_kuzmin.csv"}) {
      CHECK_MESSAGE(read_text_file(one.path / f) == read_text_file(two.path / f), f);
    }
    const auto m1 = nlohmann::json::parse(read_text_file(one.path / "manifest.json"));
    const auto m2 = nlohmann::json::parse(read_text_file(two.path / "manifest.json"));
    CHECK(m1["outputs"] == m2["outputs"]);
    const auto again = cli({"resume", (two.path / "run.checkpoint").string()});
    CHECK(again.code == 0);
    CHECK(again.out.find("nothing to do") != std::string::npos);
  }

  TEST_CASE("cf: interrupted and resumed run is byte-identical") {
    TempDir one("cf1"), two("cf2");
    REQUIRE(cli({"cf", "mersenne", "15", "--out", one.path.string()}).code == 0);
    REQUIRE(cli({"cf", "mersenne", "15", "--out", two.path.string(), "--stop-after", "3000"}).code == 0);
    CHECK(cli({"resume", (two.path / "run.checkpoint").string()}).code == 0);
    CHECK(read_text_file(one.path / "run_cf.txt") == read_text_file(two.path / "run_cf.txt"));
    CHECK(read_text_file(one.path / "run_cf_summary.json") == read_text_file(two.path / "run_cf_summary.json"));
  }

  TEST_CASE("resume refuses a changed catalog") {
    TempDir dir("cat");
    REQUIRE(cli({"cf", "mersenne", "15", "--out", dir.path.string(), "--stop-after", "100"}).code == 0);
    write_text_file(dir.path / "cat.txt", "2\n3\n5\n");
    ::setenv("CFLAB_CATALOG", (dir.path / "cat.txt").c_str(), 1);
    CHECK(cli({"resume", (dir.path / "run.checkpoint").string()}).code == 4);
    ::unsetenv("CFLAB_CATALOG");
  }

  TEST_CASE("stats digits and kuzmin tables") {
    TempDir dir("digits");
    const auto r = cli({"stats", "mersenne", "12", "--precision", "200", "--which", "digits,kuzmin",
                        "--out", dir.path.string()});
    REQUIRE(r.code == 0);
    const std::string digits = read_text_file(dir.path / "run_digits.csv");
    CHECK(digits.rfind("digit,count,frequency\n", 0) == 0);
    CHECK(digits.find("total,200,1\n") != std::string::npos);
    const std::string k = read_text_file(dir.path / "run_kuzmin.csv");
    CHECK(k.find("1,") != std::string::npos);
    CHECK(k.find("0.4150374992788438") != std::string::npos);
  }
}

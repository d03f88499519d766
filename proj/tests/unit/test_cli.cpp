#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "ecglab/cli.hpp"
#include "ecglab/config.hpp"
#include "ecglab/hash.hpp"
#include "ecglab/parallel.hpp"
#include "ecglab/signal_io.hpp"
#include "ecglab/svg.hpp"

using namespace ecglab;
namespace fs = std::filesystem;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run run(std::vector<std::string> args) {
    args.insert(args.begin(), "ecglab");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = cli::main(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
    auto p = fs::temp_directory_path() / ("ecglab_cli_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream is(p, std::ios::binary);
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

bool contains(const std::string& s, const std::string& needle) { return s.find(needle) != std::string::npos; }

}  // namespace

TEST_CASE("config parsing") {
    std::istringstream is("# comment\nrun.seed = 7\n[noise]\nkind = drift\nsnr_db=-3.5\n\n[cnn]\nlevels = -6, 0, 6,12\nflag = yes\n");
    const Config c = Config::parse(is);
    CHECK(c.get_u64("run.seed", 0) == 7);
    CHECK(c.get_string("noise.kind", "") == "drift");
    CHECK(c.get_double("noise.snr_db", 0) == -3.5);
    CHECK(c.get_list("cnn.levels", {}) == std::vector<double>{-6, 0, 6, 12});
    CHECK(c.get_bool("cnn.flag", false));
    CHECK(c.get_int("cnn.missing", 42) == 42);
    CHECK(c.section("noise").get_string("kind", "") == "drift");
    CHECK_FALSE(c.section("noise").has("run.seed"));
    CHECK_THROWS_AS((void)c.get_int("noise.kind", 0), ConfigError);
    CHECK_THROWS_AS((void)c.get_u64("noise.snr_db", 0), ConfigError);
    CHECK_THROWS_AS((void)c.require("absent"), ConfigError);

    std::istringstream dup("a = 1\na = 2\n");
    CHECK_THROWS_AS(Config::parse(dup), ConfigError);
    std::istringstream junk("[broken\n");
    CHECK_THROWS_AS(Config::parse(junk), ConfigError);
    std::istringstream noeq("just words\n");
    CHECK_THROWS_AS(Config::parse(noeq), ConfigError);

    const std::string text = c.serialize();
    std::istringstream again(text);
    const Config d = Config::parse(again);
    CHECK(d.serialize() == text);
    CHECK(d.get_double("noise.snr_db", 0) == -3.5);
}

TEST_CASE("hashing") {
    CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
    CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
    CHECK(fnv1a64("foobar") == 0x85944171f73967e8ULL);
    CHECK(to_hex(0xabcULL) == "0000000000000abc");
    const auto dir = scratch("hash");
    std::ofstream(dir / "x.bin", std::ios::binary) << "foobar";
    CHECK(hash_file(dir / "x.bin") == "85944171f73967e8");
    CHECK_THROWS(hash_file(dir / "nope.bin"));
    fs::remove_all(dir);
}

TEST_CASE("worker count from the environment") {
    ::setenv("ECG_LAB_WORKERS", "3", 1);
    CHECK(worker_count() == 3);
    ::setenv("ECG_LAB_WORKERS", "zero", 1);
    CHECK_THROWS_AS(worker_count(), std::invalid_argument);
    ::unsetenv("ECG_LAB_WORKERS");
    CHECK(worker_count() >= 1);
}

TEST_CASE("signal overlay plot") {
    std::vector<Signal> sig;
    for (int k = 0; k < 3; ++k) {
        std::vector<double> v(360);
        for (std::size_t i = 0; i < v.size(); ++i) v[i] = std::sin(0.05 * static_cast<double>(i) * (k + 1));
        sig.emplace_back(v, 360);
    }
    const std::vector<std::string> labels{"clean", "noisy", "denoised"};
    const std::string a = svg::plot_signals(sig, labels, "demo");
    std::size_t lines = 0;
    for (auto p = a.find("<polyline"); p != std::string::npos; p = a.find("<polyline", p + 1)) ++lines;
    CHECK(lines == 3);
    CHECK(contains(a, "denoised"));
    CHECK(a == svg::plot_signals(sig, labels, "demo"));
    CHECK_THROWS(svg::plot_signals(std::span<const Signal>{}, std::span<const std::string>{}));
    const std::vector<std::string> two{"a", "b"};
    CHECK_THROWS(svg::plot_signals(sig, two));
}

TEST_CASE("command line exit codes") {
    CHECK(run({}).code == 2);
    CHECK(run({"--help"}).code == 0);
    const auto help = run({"synth", "--help"});
    CHECK(help.code == 0);
    CHECK(contains(help.out, "--duration"));
    CHECK(run({"frobnicate"}).code == 2);

    const auto dir = scratch("codes");
    const auto no_seed = run({"synth", "--out-dir", (dir / "a").string()});
    CHECK(no_seed.code == 2);
    CHECK(contains(no_seed.err, "run.seed"));
    CHECK(run({"synth", "--seed", "1", "--out-dir", (dir / "b").string(), "--duration", "abc"}).code == 2);
    CHECK(run({"add-noise", "--seed", "1", "--out-dir", (dir / "c").string(), "--input", (dir / "missing.txt").string()})
              .code == 2);
    CHECK(run({"synth", "--seed", "1", "--set", "novalue"}).code == 2);

    std::ofstream(dir / "bad.txt") << "not a signal\n";
    const auto broken = run({"plot", "--seed", "1", "--out-dir", (dir / "d").string(), "--inputs", (dir / "bad.txt").string()});
    CHECK(broken.code == 1);
    fs::remove_all(dir);
}

TEST_CASE("recipes through the command line") {
    const auto dir = scratch("recipes");
    const auto s = run({"synth", "--seed", "4", "--out-dir", (dir / "s").string(), "--duration", "5"});
    REQUIRE(s.code == 0);
    const Signal clean = io::load(dir / "s" / "synth.txt");
    CHECK(clean.size() == 1800);
    CHECK(fs::exists(dir / "s" / "synth.manifest"));

    const auto e = run({"eval", "--seed", "4", "--out-dir", (dir / "e").string(), "--clean",
                        (dir / "s" / "synth.txt").string(), "--pred", (dir / "s" / "synth.txt").string()});
    REQUIRE(e.code == 0);
    CHECK(contains(e.out, "avg RMS 0 mV"));
    CHECK(contains(slurp(dir / "e" / "eval.csv"), ",0,inf,1"));

    std::ofstream(dir / "run.cfg") << "[run]\nseed = 2\n[noise]\nkind = random\nsnr_db = 3\n";
    const auto n = run({"add-noise", "--config", (dir / "run.cfg").string(), "--out-dir", (dir / "n").string(),
                        "--input", (dir / "s" / "synth.txt").string()});
    REQUIRE(n.code == 0);
    CHECK(fs::exists(dir / "n" / "noisy.txt"));

    const auto d = run({"doe", "--seed", "1", "--out-dir", (dir / "doe").string(), "--fixture",
                        (fs::path(ECGLAB_DATA_DIR) / "table3.csv").string()});
    REQUIRE(d.code == 0);
    CHECK(contains(d.out, "best sim 46"));
    CHECK(contains(d.out, "shortlist of 18"));

    const auto r = run({"replay", (dir / "doe" / "doe.manifest").string()});
    CHECK(r.code == 0);
    CHECK(contains(r.out, "replay: identical"));
    const auto rn = run({"replay", (dir / "n" / "add-noise.manifest").string(), "--out-dir", (dir / "n2").string()});
    CHECK(rn.code == 0);
    CHECK(slurp(dir / "n" / "noisy.txt") == slurp(dir / "n2" / "noisy.txt"));
    fs::remove_all(dir);
}

#define DOCTEST_CONFIG_IMPLEMENT
#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "doctest.h"
#include "json.hpp"

using nlohmann::json;
namespace fs = std::filesystem;

static std::string g_bin;

namespace {

struct RunResult {
    int code = -1;
    std::string out;
};

RunResult run_cli(const std::string& args) {
    std::string cmd = "'" + g_bin + "' " + args + " 2>/dev/null";
    FILE* p = popen(cmd.c_str(), "r");
    REQUIRE(p != nullptr);
    RunResult r;
    char buf[4096];
    size_t n;
    while ((n = fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, n);
    int st = pclose(p);
    r.code = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
    return r;
}

json result_of(const RunResult& r) {
    REQUIRE(r.code == 0);
    return json::parse(r.out).at("result");
}

void write_file(const std::string& path, const std::string& body) {
    std::ofstream out(path, std::ios::trunc);
    out << body;
}

const std::string dir = "cli_io";

void make_fixtures() {
    static bool done = false;
    if (done) return;
    done = true;
    fs::create_directories(dir);
    write_file(dir + "/a2.txt", "2\n0 1 1\n");
    write_file(dir + "/k2.json", R"({"n":2,"arrows":[[0,1,2]]})");
    write_file(dir + "/k5.txt", "2\n0 1 5\n");
    write_file(dir + "/markov.txt", "3\n0 1 2\n1 2 2\n2 0 2\n");
    write_file(dir + "/kron.json",
               R"({"vertices":2,
                   "arrows":[{"name":"a","source":0,"target":1},{"name":"b","source":0,"target":1}],
                   "relations":[],
                   "nilpotency_bound":2})");
    write_file(dir + "/badalg.json",
               R"({"vertices":1,"arrows":[{"name":"x","source":0,"target":0}],"relations":[],"nilpotency_bound":3})");
    write_file(dir + "/band.json",
               R"({"m_minus":[1,0],"m_plus":[0,1],
                   "blocks":[[[{"coefficient":1,"path":["a"]},{"coefficient":2,"path":["b"]}]]]})");
    write_file(dir + "/band5.json",
               R"({"m_minus":[1,0],"m_plus":[0,1],
                   "blocks":[[[{"coefficient":1,"path":["a"]},{"coefficient":5,"path":["b"]}]]]})");
    write_file(dir + "/p12.json",
               R"({"m_minus":[1,0],"m_plus":[0,2],
                   "blocks":[[[{"coefficient":1,"path":["a"]}]],[[{"coefficient":1,"path":["b"]}]]]})");
    write_file(dir + "/shifted.json", R"({"m_minus":[1,1],"m_plus":[0,0],"blocks":[]})");
    write_file(dir + "/a2form.json", "[[0,1],[-1,0]]");
    write_file(dir + "/orthant.json", R"({"ambient_dim":2,"maximal_cones":[[[1,0],[0,1]]]})");
}

}  // namespace

TEST_CASE("fan on the two-vertex path quiver closes up into five cones") {
    make_fixtures();
    json r = result_of(run_cli("fan --quiver " + dir + "/a2.txt --depth 10"));
    CHECK(r.at("seed_count") == 5);
    CHECK(r.at("complete") == true);
    CHECK(r.at("fan").at("maximal_cones").size() == 5);
    CHECK(r.at("rays") == json::parse("[[-1,0],[-1,1],[0,-1],[0,1],[1,0]]"));
    CHECK(r.at("validity").at("valid") == true);
    CHECK(r.at("coverage").at("fraction").at("num") == "1");
    CHECK(r.at("coverage").at("fraction").at("den") == "1");
    CHECK(r.at("coverage").at("covered") == r.at("coverage").at("samples"));
}

TEST_CASE("mutate applies vertices left to right and is an involution") {
    make_fixtures();
    json once = result_of(run_cli("mutate --quiver " + dir + "/a2.txt --at 0"));
    CHECK(once.at("b") == json::parse("[[0,-1],[1,0]]"));
    json twice = result_of(run_cli("mutate --quiver " + dir + "/a2.txt --at 0 --at 0"));
    CHECK(twice.at("b") == json::parse("[[0,1],[-1,0]]"));
    CHECK(twice.at("arrows") == json::parse("[[0,1,1]]"));
}

TEST_CASE("class and classify name the standard families") {
    make_fixtures();
    json markov = result_of(run_cli("class --quiver " + dir + "/markov.txt"));
    CHECK(markov.at("verdict") == "finite");
    CHECK(markov.at("class_size") == 1);
    CHECK(result_of(run_cli("classify --quiver " + dir + "/k5.txt")).at("label") == "kronecker(5)");
    CHECK(result_of(run_cli("classify --quiver " + dir + "/markov.txt")).at("label") == "surface-or-unknown");
}

TEST_CASE("density reports are byte-deterministic") {
    make_fixtures();
    std::string args = "density --quiver " + dir + "/k2.json --depth 4 --samples 2000";
    RunResult r1 = run_cli(args), r2 = run_cli(args);
    CHECK(r1.code == 0);
    CHECK(r1.out == r2.out);
    json cov = json::parse(r1.out).at("result").at("coverage");
    double v = cov.at("value").get<double>();
    CHECK(v > 0.5);
    CHECK(v < 1.0);
}

TEST_CASE("halfspace finds the all-negative normal for the three-cycle quiver") {
    make_fixtures();
    json r = result_of(run_cli("halfspace --quiver " + dir + "/markov.txt --depth 4"));
    CHECK(r.at("found") == true);
    CHECK(r.at("normal") == json::parse("[-1,-1,-1]"));
}

TEST_CASE("alg presilt distinguishes rigid complexes from bands") {
    make_fixtures();
    json p = result_of(run_cli("alg presilt --algebra " + dir + "/kron.json --x " + dir + "/p12.json"));
    CHECK(p.at("presilting") == true);
    CHECK(p.at("g") == json::parse("[-1,2]"));
    json b = result_of(run_cli("alg presilt --algebra " + dir + "/kron.json --x " + dir + "/band.json"));
    CHECK(b.at("presilting") == false);
}

TEST_CASE("alg hom reports quotient dimensions at both shifts") {
    make_fixtures();
    json r = result_of(
        run_cli("alg hom --algebra " + dir + "/kron.json --x " + dir + "/band.json --y " + dir + "/band.json"));
    CHECK(r.at("hom")[0].at("shift") == 0);
    CHECK(r.at("hom")[0].at("dim") == 1);
    CHECK(r.at("hom")[1].at("shift") == 1);
    CHECK(r.at("hom")[1].at("dim") == 1);
    json z = result_of(
        run_cli("alg hom --algebra " + dir + "/kron.json --x " + dir + "/band.json --y " + dir + "/band5.json"));
    CHECK(z.at("hom")[1].at("dim") == 0);
}

TEST_CASE("alg cyl iterates the cylinder and returns a loadable complex") {
    make_fixtures();
    json r = result_of(run_cli("alg cyl --algebra " + dir + "/kron.json --u " + dir + "/shifted.json --along " + dir +
                               "/band.json"));
    CHECK(r.at("g") == json::parse("[-3,1]"));
    CHECK(r.at("complex").at("m_minus") == json::parse("[3,1]"));
    CHECK(r.at("complex").at("m_plus") == json::parse("[0,2]"));
    json r3 = result_of(run_cli("alg cyl --algebra " + dir + "/kron.json --u " + dir + "/shifted.json --along " + dir +
                                "/band.json --power 3"));
    CHECK(r3.at("g") == json::parse("[-7,5]"));

    // the emitted complex round-trips through a file
    write_file(dir + "/cyl1.json", r.at("complex").dump());
    json again = result_of(run_cli("alg presilt --algebra " + dir + "/kron.json --x " + dir + "/cyl1.json"));
    CHECK(again.at("presilting") == true);
    CHECK(again.at("g") == json::parse("[-3,1]"));
}

TEST_CASE("alg gdecomp is seed-reproducible and stable across seeds") {
    make_fixtures();
    std::string args = "alg gdecomp --algebra " + dir + "/kron.json --g=-1,2 --trials 3 --seed 7";
    RunResult r1 = run_cli(args), r2 = run_cli(args);
    CHECK(r1.code == 0);
    CHECK(r1.out == r2.out);
    json d = json::parse(r1.out).at("result");
    CHECK(d.at("stable") == true);
    REQUIRE(d.at("summands").size() == 1);
    CHECK(d.at("summands")[0].at("g") == json::parse("[-1,2]"));
    CHECK(d.at("summands")[0].at("kind") == "presilting");

    json other = result_of(run_cli("alg gdecomp --algebra " + dir + "/kron.json --g=-1,2 --trials 3 --seed 42"));
    CHECK(other.at("summands") == d.at("summands"));

    // seed 11's second sample has linearly dependent columns, so the complex
    // degenerates into a band plus a projective; the report must say so
    // instead of papering over the disagreement
    json unlucky = result_of(run_cli("alg gdecomp --algebra " + dir + "/kron.json --g=-1,2 --trials 3 --seed 11"));
    CHECK(unlucky.at("stable") == false);
    CHECK(unlucky.at("summands").empty());
    CHECK(unlucky.at("observed").size() == 2);
}

TEST_CASE("scatter complete emits the pentagon wall with exact coefficients") {
    make_fixtures();
    json r = result_of(run_cli("scatter complete --form " + dir + "/a2form.json --order 8"));
    REQUIRE(r.at("walls").size() == 3);
    const json& w = r.at("walls")[2];
    CHECK(w.at("d0") == json::parse("[1,1]"));
    CHECK(w.at("support_rays") == json::parse("[[-1,1]]"));
    REQUIRE(w.at("log_fn").size() == 4);
    CHECK(w.at("log_fn")[0] == json::parse(R"({"d":[1,1],"num":"1","den":"1"})"));
    CHECK(w.at("log_fn")[1] == json::parse(R"({"d":[2,2],"num":"-1","den":"4"})"));
}

TEST_CASE("scatter attach decorates fan facets") {
    make_fixtures();
    json r =
        result_of(run_cli("scatter attach --fan " + dir + "/orthant.json --form " + dir + "/a2form.json --order 3"));
    CHECK(r.at("warnings").empty());
    REQUIRE(r.at("walls").size() == 2);
    CHECK(r.at("walls")[0].at("d0") == json::parse("[1,0]"));
    CHECK(r.at("walls")[1].at("d0") == json::parse("[0,1]"));
}

TEST_CASE("cache hits are byte-identical and verification catches corruption") {
    make_fixtures();
    fs::remove_all(dir + "/cache");
    std::string base = "fan --quiver " + dir + "/k2.json --depth 3 --cache-dir " + dir + "/cache";
    RunResult miss = run_cli(base);
    RunResult hit = run_cli(base);
    CHECK(miss.code == 0);
    CHECK(miss.out == hit.out);
    CHECK(run_cli(base + " --verify-cache").code == 0);

    // corrupt the stored seed set; verification must fail loudly
    std::string entry;
    for (const auto& e : fs::directory_iterator(dir + "/cache")) entry = e.path().string();
    REQUIRE(!entry.empty());
    std::string bytes;
    {
        std::ifstream in(entry);
        bytes.assign(std::istreambuf_iterator<char>(in), {});
    }
    auto pos = bytes.find("\"complete\": false");
    REQUIRE(pos != std::string::npos);
    bytes.replace(pos, 17, "\"complete\": true ");
    write_file(entry, bytes);
    RunResult bad = run_cli(base + " --verify-cache");
    CHECK(bad.code == 1);
    CHECK(json::parse(bad.out).at("error").get<std::string>().find("cache verification failed") == 0);
}

TEST_CASE("the output flag writes the report atomically") {
    make_fixtures();
    std::string out = dir + "/fanout.json";
    fs::remove(out);
    RunResult r = run_cli("fan --quiver " + dir + "/a2.txt --depth 2 --output " + out);
    CHECK(r.code == 0);
    CHECK(r.out.empty());
    REQUIRE(fs::exists(out));
    CHECK_FALSE(fs::exists(out + ".tmp"));
    std::ifstream in(out);
    json rep = json::parse(in);
    CHECK(rep.at("command") == "fan");
    CHECK(rep.at("result").at("seed_count") == 5);
}

TEST_CASE("usage errors exit with code 2") {
    make_fixtures();
    CHECK(run_cli("frobnicate").code == 2);
    CHECK(run_cli("density --quiver " + dir + "/k2.json --depth 4 --samples 0").code == 2);
    CHECK(run_cli("fan --quiver " + dir + "/nosuch.txt --depth 2").code == 2);
    CHECK(run_cli("fan --quiver " + dir + "/a2.txt --depth 2 --format xml").code == 2);
    CHECK(run_cli("scatter complete --form " + dir + "/a2form.json --order 13").code == 2);
    CHECK(run_cli("fan --quiver " + dir + "/a2.txt").code == 2);  // missing --depth
    CHECK(run_cli("alg gdecomp --algebra " + dir + "/kron.json --g=x,y").code == 2);
    CHECK(run_cli("--help").code == 0);
}

TEST_CASE("domain errors exit with code 1 and a structured error") {
    make_fixtures();
    RunResult bad = run_cli("alg presilt --algebra " + dir + "/badalg.json --x " + dir + "/band.json");
    CHECK(bad.code == 1);
    json err = json::parse(bad.out);
    CHECK(err.contains("error"));
    CHECK(err.at("error").get<std::string>().find("x*x*x") != std::string::npos);

    CHECK(run_cli("mutate --quiver " + dir + "/a2.txt --at 9").code == 1);
    // g length not matching the algebra is a domain error, not a flag error
    CHECK(run_cli("alg gdecomp --algebra " + dir + "/kron.json --g=1,2,3").code == 1);
}

int main(int argc, char** argv) {
    if (argc > 1 && argv[1][0] != '-') g_bin = argv[1];
    if (g_bin.empty()) {
        std::fprintf(stderr, "usage: test_cli <path-to-gvfan-binary>\n");
        return 1;
    }
    doctest::Context ctx;
    ctx.applyCommandLine(1, argv);
    return ctx.run();
}

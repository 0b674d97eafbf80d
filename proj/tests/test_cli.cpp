#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "nntc/formula.hpp"

namespace fs = std::filesystem;

namespace {

const std::string cli = NNTC_CLI_PATH;

struct RunResult {
    int exit_code;
    std::string out;
};

fs::path scratch() {
    static fs::path dir = [] {
        fs::path d = fs::temp_directory_path() / "nntc_cli_tests";
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

void write_file(const fs::path& p, const std::string& text) {
    std::ofstream f(p);
    f << text;
}

std::string read_file(const fs::path& p) {
    std::ifstream f(p);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

RunResult run(const std::string& args) {
    fs::path log = scratch() / "out.txt";
    int status = std::system((cli + " " + args + " > " + log.string() + " 2>&1").c_str());
    int code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return {code, read_file(log)};
}

} // namespace

TEST_CASE("compile, verify, synth, extract round trip through the binary") {
    fs::path dir = scratch();
    write_file(dir / "f.etr", "x + y = z\nx * w = 1\n");
    write_file(dir / "sol.json", R"({"x":"2","y":"1","z":"3","w":"1/2"})");

    RunResult c = run("compile " + (dir / "f.etr").string() + " -o " +
                      (dir / "inst.json").string() + " --map " +
                      (dir / "map.json").string());
    CHECK(c.exit_code == 0);
    CHECK(fs::exists(dir / "inst.json"));
    CHECK(fs::exists(dir / "map.json"));

    RunResult s = run("synth " + (dir / "f.etr").string() + " --solution " +
                      (dir / "sol.json").string() + " -o " + (dir / "wit.json").string());
    CHECK(s.exit_code == 0);

    RunResult v = run("verify " + (dir / "inst.json").string() + " " +
                      (dir / "wit.json").string());
    CHECK(v.exit_code == 0);
    CHECK(v.out.find("accepted") != std::string::npos);
    CHECK(v.out.find("cost 0") != std::string::npos);

    RunResult e = run("extract " + (dir / "inst.json").string() + " " +
                      (dir / "wit.json").string() + " --map " +
                      (dir / "map.json").string() + " -o " + (dir / "back.json").string());
    CHECK(e.exit_code == 0);
    nntc::EtrInvFormula f = nntc::parse_etr_inv("x + y = z\nx * w = 1\n");
    nntc::Assignment back = nntc::parse_assignment(f, read_file(dir / "back.json"));
    CHECK(back.values[0] == nntc::Scalar::exact(2));
    CHECK(back.values[3] == nntc::Scalar::exact(1, 2));
}

TEST_CASE("verify rejects a wrong witness with exit code 1") {
    fs::path dir = scratch();
    write_file(dir / "g.etr", "x + y = z\n");
    write_file(dir / "gsol.json", R"({"x":"1","y":"2","z":"3"})");
    CHECK(run("compile " + (dir / "g.etr").string() + " -o " +
              (dir / "ginst.json").string())
              .exit_code == 0);
    CHECK(run("synth " + (dir / "g.etr").string() + " --solution " +
              (dir / "gsol.json").string() + " -o " + (dir / "gwit.json").string())
              .exit_code == 0);

    // corrupt one weight value (": \"3\"" is z's value slot; keys never match)
    std::string wit = read_file(dir / "gwit.json");
    size_t pos = wit.find(": \"3\"");
    REQUIRE(pos != std::string::npos);
    wit.replace(pos, 5, ": \"9\"");
    write_file(dir / "gbad.json", wit);

    RunResult v = run("verify " + (dir / "ginst.json").string() + " " +
                      (dir / "gbad.json").string());
    CHECK(v.exit_code == 1);
    CHECK(v.out.find("rejected") != std::string::npos);
}

TEST_CASE("synth with an unsatisfying assignment exits 1") {
    fs::path dir = scratch();
    write_file(dir / "g.etr", "x + y = z\n");
    write_file(dir / "bad.json", R"({"x":"1","y":"2","z":"7"})");
    RunResult s = run("synth " + (dir / "g.etr").string() + " --solution " +
                      (dir / "bad.json").string() + " -o " + (dir / "nope.json").string());
    CHECK(s.exit_code == 1);
}

TEST_CASE("usage and schema problems exit 2") {
    fs::path dir = scratch();
    CHECK(run("bogus-subcommand").exit_code == 2);
    CHECK(run("compile").exit_code == 2);

    write_file(dir / "syntax.etr", "x + = z\n");
    CHECK(run("compile " + (dir / "syntax.etr").string() + " -o " +
              (dir / "never.json").string())
              .exit_code == 2);

    write_file(dir / "unsupported.etr", "x * y = 2\n");
    CHECK(run("compile " + (dir / "unsupported.etr").string() + " -o " +
              (dir / "never.json").string())
              .exit_code == 2);

    write_file(dir / "notjson.json", "garbage");
    write_file(dir / "g.etr", "x + y = z\n");
    CHECK(run("compile " + (dir / "g.etr").string() + " -o " +
              (dir / "ginst.json").string())
              .exit_code == 0);
    CHECK(run("verify " + (dir / "ginst.json").string() + " " +
              (dir / "notjson.json").string())
              .exit_code == 2);
}

TEST_CASE("solve with a grid finds an exact witness for a small instance") {
    fs::path dir = scratch();
    write_file(dir / "inv.etr", "x * y = 1\n");
    CHECK(run("compile " + (dir / "inv.etr").string() + " -o " +
              (dir / "inv_inst.json").string() + " --map " +
              (dir / "inv_map.json").string() + " --stop-after restricted")
              .exit_code == 0);
    RunResult s = run("solve " + (dir / "inv_inst.json").string() +
                      " --grid -2,-1,-1/2,1/2,1,2 --budget 2000000000 -o " +
                      (dir / "inv_wit.json").string());
    CHECK(s.exit_code == 0);
    RunResult v = run("verify " + (dir / "inv_inst.json").string() + " " +
                      (dir / "inv_wit.json").string());
    CHECK(v.exit_code == 0);

    RunResult miss = run("solve " + (dir / "inv_inst.json").string() +
                         " --grid 3,5 --budget 2000000000");
    CHECK(miss.exit_code == 1);
}

TEST_CASE("stats and dot run on a compiled instance") {
    fs::path dir = scratch();
    write_file(dir / "g.etr", "x + y = z\n");
    CHECK(run("compile " + (dir / "g.etr").string() + " -o " +
              (dir / "ginst.json").string())
              .exit_code == 0);
    RunResult st = run("stats " + (dir / "ginst.json").string());
    CHECK(st.exit_code == 0);
    CHECK(st.out.find("inputs") != std::string::npos);
    CHECK(st.out.find("edges") != std::string::npos);

    RunResult d = run("dot " + (dir / "ginst.json").string() + " -o " +
                      (dir / "g.dot").string());
    CHECK(d.exit_code == 0);
    CHECK(read_file(dir / "g.dot").find("digraph") != std::string::npos);
}

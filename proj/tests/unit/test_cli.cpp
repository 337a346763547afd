#include <doctest.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <unistd.h>

namespace fs = std::filesystem;

namespace {

struct Run {
    int code = -1;
    std::string out;
};

// Runs the CLI with stderr discarded and returns its exit code and stdout.
Run cli(const std::string& args) {
    const std::string cmd = std::string("\"") + NETCG_CLI + "\" " + args + " 2>/dev/null";
    Run r;
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::array<char, 4096> buf{};
    std::size_t n = 0;
    while ((n = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), n);
    const int status = pclose(pipe);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

std::string slurp(const fs::path& p) {
    std::ifstream is(p, std::ios::binary);
    std::ostringstream os;
    os << is.rdbuf();
    return os.str();
}

std::string field(const std::string& text, const std::string& key) {
    std::smatch m;
    const std::regex re("(^|\\s)" + key + "=(\\S+)");
    return std::regex_search(text, m, re) ? m[2].str() : std::string{};
}

struct Scratch {
    fs::path dir;
    Scratch() {
        dir = fs::temp_directory_path() / ("netcg_cli_" + std::to_string(::getpid()));
        fs::create_directories(dir);
    }
    ~Scratch() { fs::remove_all(dir); }
    std::string operator/(const std::string& name) const { return (dir / name).string(); }
};

}  // namespace

TEST_CASE("exit codes") {
    Scratch tmp;
    CHECK(cli("--help").code == 0);
    CHECK(cli("").code == 2);
    CHECK(cli("generate --nodes").code == 2);
    CHECK(cli("solve --method nope --problem x").code == 2);
    CHECK(cli("solve --problem " + tmp / "missing.json").code == 2);
    CHECK(cli("generate --nodes 1 -o " + tmp / "p.json").code == 3);

    std::ofstream(tmp / "bad.json") << R"({"m": 2, "agents": [{"id": 0, "support": [0, 1],
        "S_hat": [1, 0, 0, 0], "s_hat": [0, 1]}]})";
    CHECK(cli("solve --method cg --problem " + tmp / "bad.json").code == 4);
    CHECK(cli("solve --method dcg --problem " + tmp / "bad.json").code == 4);
}

TEST_CASE("generate reports rank and kernel size") {
    Scratch tmp;
    const Run path = cli("generate --topology path --nodes 10 --ntheta 10 --ny 500 -o " + tmp / "path.json");
    REQUIRE(path.code == 0);
    CHECK(field(path.out, "m") == "90");
    CHECK(field(path.out, "rank") == "90");
    CHECK(field(path.out, "n0") == "0");

    const Run strong = cli("generate --topology strong-mesh --ny 500 -o " + tmp / "strong.json");
    REQUIRE(strong.code == 0);
    CHECK(field(strong.out, "m") == "240");
    CHECK(field(strong.out, "rank") == "90");
    CHECK(field(strong.out, "n0") == "150");

    const Run random = cli("generate --topology random --nodes 1000 --edges 1500 --ntheta 1 --seed 7 -o " +
                           tmp / "random.json");
    REQUIRE(random.code == 0);
    CHECK(field(random.out, "edges") == "1500");
    CHECK(field(random.out, "rank") == "skipped");
    CHECK(fs::exists(tmp / "random.json"));
}

TEST_CASE("generate is reproducible") {
    Scratch tmp;
    REQUIRE(cli("generate --topology weak-mesh --ntheta 3 --seed 4 -o " + tmp / "a.json").code == 0);
    REQUIRE(cli("generate --topology weak-mesh --ntheta 3 --seed 4 -o " + tmp / "b.json").code == 0);
    CHECK(slurp(tmp / "a.json") == slurp(tmp / "b.json"));
    const Run to_stdout = cli("generate --topology weak-mesh --ntheta 3 --seed 4");
    CHECK(to_stdout.out == slurp(tmp / "a.json"));
}

TEST_CASE("cg and dcg take the same number of iterations") {
    Scratch tmp;
    REQUIRE(cli("generate --topology strong-mesh --ntheta 2 --ny 100 --seed 3 -o " + tmp / "p.json").code == 0);
    const Run cg = cli("solve --method cg --tol 1e-8 --problem " + tmp / "p.json");
    const Run dcg = cli("solve --method dcg --tol 1e-8 --problem " + tmp / "p.json");
    REQUIRE(cg.code == 0);
    REQUIRE(dcg.code == 0);
    CHECK(field(cg.out, "status") == "converged");
    CHECK(field(cg.out, "iterations") == field(dcg.out, "iterations"));
}

TEST_CASE("trace and sweep CSVs are byte-identical across reruns") {
    Scratch tmp;
    REQUIRE(cli("generate --topology star --nodes 6 --ntheta 2 --ny 20 -o " + tmp / "p.json").code == 0);
    for (const char* name : {"t1.csv", "t2.csv"})
        REQUIRE(cli("solve --method dcg --problem " + tmp / "p.json" + " --trace " + tmp / name).code == 0);
    CHECK(slurp(tmp / "t1.csv") == slurp(tmp / "t2.csv"));
    CHECK(slurp(tmp / "t1.csv").rfind("iter,residual_norm,seminorm_error,bound,global_sums,neighbor_msgs,rounds\n", 0) == 0);

    for (const char* name : {"s1.csv", "s2.csv"})
        REQUIRE(cli("sweep --problem " + tmp / "p.json" + " --points 4 --threads 2 -o " + tmp / name).code == 0);
    CHECK(slurp(tmp / "s1.csv") == slurp(tmp / "s2.csv"));
}

TEST_CASE("sweep with a single grid point") {
    Scratch tmp;
    REQUIRE(cli("generate --topology path --nodes 4 --ntheta 1 --ny 10 -o " + tmp / "p.json").code == 0);
    const Run r = cli("sweep --problem " + tmp / "p.json" + " --rho-min 1 --rho-max 1 --points 1");
    REQUIRE(r.code == 0);
    std::istringstream lines(r.out);
    std::string line;
    std::vector<std::string> rows;
    while (std::getline(lines, line)) rows.push_back(line);
    REQUIRE(rows.size() == 3);
    CHECK(rows[0] == "method,rho,iterations,final_residual,hit_cap");
    CHECK(rows[1].rfind("dcg,,", 0) == 0);
    CHECK(rows[2].rfind("dadmm,1,", 0) == 0);
}

TEST_CASE("spectrum of a hand-written path Laplacian") {
    Scratch tmp;
    std::ofstream(tmp / "lap.json") << R"({"m": 3, "agents": [{"id": 0, "support": [0, 1, 2],
        "S_hat": [1, -1, 0, -1, 2, -1, 0, -1, 1], "s_hat": [1, 0, -1]}]})";
    const Run r = cli("spectrum --problem " + tmp / "lap.json");
    REQUIRE(r.code == 0);
    CHECK(field(r.out, "rank") == "2");
    CHECK(field(r.out, "n0") == "1");
    CHECK(std::stod(field(r.out, "kappa")) == doctest::Approx(3.0));
    const auto pos = r.out.find("eigenvalues");
    REQUIRE(pos != std::string::npos);
    std::istringstream eig(r.out.substr(pos + 11));
    double a = 1, b = 0, c = 0;
    eig >> a >> b >> c;
    CHECK(std::abs(a) <= 1e-12);
    CHECK(b == doctest::Approx(1.0));
    CHECK(c == doctest::Approx(3.0));
}

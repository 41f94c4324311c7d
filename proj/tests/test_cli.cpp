#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <unistd.h>

#include <filesystem>

#include "json.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct RunResult {
    int code = -1;
    std::string out, err;
};

const fs::path& work_dir() {
    static const fs::path p = [] {
        fs::path d = fs::temp_directory_path() /
                     ("schro_cli_test_" + std::to_string(::getpid()));
        fs::create_directories(d);
        return d;
    }();
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

RunResult run_cli(const std::string& args) {
    static int counter = 0;
    const char* bin = std::getenv("SCHRO_BIN");
    REQUIRE(bin != nullptr);
    fs::path out = work_dir() / ("out" + std::to_string(counter) + ".txt");
    fs::path err = work_dir() / ("err" + std::to_string(counter) + ".txt");
    ++counter;
    std::string cmd = "\"" + std::string(bin) + "\" " + args + " > \"" + out.string() +
                      "\" 2> \"" + err.string() + "\"";
    int st = std::system(cmd.c_str());
    RunResult r;
    r.code = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
    r.out = slurp(out);
    r.err = slurp(err);
    return r;
}

fs::path write_config(const std::string& name, const std::string& text) {
    fs::path p = work_dir() / name;
    std::ofstream(p) << text;
    return p;
}

const std::string kPotential1d = "seed = 3\n"
                                 "[potential]\n"
                                 "kind = power_decay\n"
                                 "sign = positive\n"
                                 "alpha = 1\n"
                                 "K = 1\n"
                                 "dim = 1\n"
                                 "[mc]\n"
                                 "n_paths = 4000\n"
                                 "n_steps = 64\n"
                                 "antithetic = true\n";

json load_json(const fs::path& p) {
    REQUIRE(fs::exists(p));
    return json::parse(slurp(p));
}

} // namespace

TEST_CASE("selftest and usage basics") {
    auto st = run_cli("selftest");
    CHECK(st.code == 0);
    CHECK(st.out.find("selftest: all checks passed") != std::string::npos);

    auto help = run_cli("--help");
    CHECK(help.code == 0);
    CHECK(help.out.find("Usage") != std::string::npos);
    CHECK(help.out.find("verify") != std::string::npos);

    CHECK(run_cli("frobnicate").code == 1);
    CHECK(run_cli("kernel --x 0 --y 0").code == 1);       // missing required --t
    CHECK(run_cli("--format yaml selftest").code == 1);   // invalid format choice
}

TEST_CASE("kernel subcommand emits json and csv records") {
    auto cfg = write_config("kernel.ini", kPotential1d);
    fs::path out = work_dir() / "k1";
    auto r = run_cli("--config \"" + cfg.string() + "\" --seed 5 --out \"" + out.string() +
                     "\" --format csv kernel --t 1 --x 0 --y 0.5");
    CHECK(r.code == 0);
    CHECK(r.out.find("kernel: p(1)") != std::string::npos);

    auto j = load_json(out / "kernel.json");
    CHECK(j["t"].get<double>() == 1.0);
    CHECK(j["seed"].get<std::uint64_t>() == 5);
    CHECK(j["method"].get<std::string>() == "fkmc_bridge");
    CHECK(j["n_paths"].get<long>() == 4000);
    double v = j["value"].get<double>();
    CHECK(v > 0.0);
    CHECK(v < 0.3521);  // repulsive potential stays below the free kernel
    CHECK(j["stderr"].get<double>() > 0.0);
    CHECK(j.contains("timestamp"));

    std::istringstream csv(slurp(out / "kernel.csv"));
    std::string header;
    std::getline(csv, header);
    CHECK(header == "t,value,stderr,n_paths,n_steps,method,seed");
}

TEST_CASE("survival and dirichlet subcommands produce sane estimates") {
    auto cfg = write_config("surv.ini", kPotential1d);
    fs::path out = work_dir() / "s1";
    auto r = run_cli("--config \"" + cfg.string() + "\" --out \"" + out.string() +
                     "\" survival --t 1 --x 2");
    CHECK(r.code == 0);
    auto j = load_json(out / "survival.json");
    double v = j["value"].get<double>();
    CHECK(v > 0.0);
    CHECK(v < 1.0);

    auto mc = write_config("mc.ini", "seed = 9\n[mc]\nn_paths = 20000\nn_steps = 128\n");
    fs::path dout = work_dir() / "d1";
    auto rd = run_cli("--config \"" + mc.string() + "\" --out \"" + dout.string() +
                      "\" dirichlet --t 0.5 --x 0.2 --y -0.1 --radius 1");
    CHECK(rd.code == 0);
    auto jd = load_json(dout / "dirichlet.json");
    CHECK(jd["method"].get<std::string>() == "fkmc_killed");
    double exact = jd["exact_series"].get<double>();
    CHECK(exact == doctest::Approx(0.4935109044929472).epsilon(1e-9));
    double dv = jd["value"].get<double>();
    double ds = jd["stderr"].get<double>();
    CHECK(std::abs(dv - exact) <= 4.0 * ds + 1e-3);
}

TEST_CASE("green subcommand integrates the kernel in time") {
    auto cfg = write_config("green.ini", "seed = 2\n"
                                         "[potential]\n"
                                         "kind = power_decay\n"
                                         "sign = positive\n"
                                         "alpha = 1\n"
                                         "K = 0.5\n"
                                         "dim = 3\n"
                                         "[mc]\n"
                                         "n_paths = 2000\n"
                                         "n_steps = 64\n");
    fs::path out = work_dir() / "g1";
    auto r = run_cli("--config \"" + cfg.string() + "\" --out \"" + out.string() +
                     "\" green --x 0,0,0 --y 0.5,0,0");
    CHECK(r.code == 0);
    auto j = load_json(out / "green.json");
    CHECK(j["value"].get<double>() > 0.0);
    CHECK(j["stderr"].get<double>() >= 0.0);
    CHECK(j["n_nodes"].get<int>() >= 100);
    // repulsive G sits below the free Green function 1/(2 pi r) at r = 0.5
    CHECK(j["value"].get<double>() < 1.0 / (2.0 * 3.14159265358979 * 0.5));
}

TEST_CASE("duhamel subcommand signals divergence through the exit code") {
    std::string base = "[potential]\nkind = power_decay\nsign = negative\nalpha = 1\ndim = 3\n";
    auto strong = write_config("du5.ini", base + "K = 5\n");
    fs::path out = work_dir() / "du1";
    auto r = run_cli("--config \"" + strong.string() + "\" --out \"" + out.string() +
                     "\" duhamel --t-max 1 --n-time 16 --x-max 6 --n-space 80 --n-terms 12");
    CHECK(r.code == 2);
    CHECK(r.out.find("diverged") != std::string::npos);
    auto j = load_json(out / "duhamel.json");
    CHECK(j["diverged"].get<bool>());

    auto weak = write_config("du005.ini", base + "K = 0.05\n");
    fs::path out2 = work_dir() / "du2";
    auto r2 = run_cli("--config \"" + weak.string() + "\" --out \"" + out2.string() +
                      "\" duhamel --t-max 1 --n-time 16 --x-max 6 --n-space 80 --n-terms 12");
    CHECK(r2.code == 0);
    CHECK(r2.out.find("converged") != std::string::npos);
    CHECK_FALSE(load_json(out2 / "duhamel.json")["diverged"].get<bool>());
}

TEST_CASE("verify subcommand reports a band and honors seeds and thread counts") {
    fs::path o1 = work_dir() / "v1", o2 = work_dir() / "v2", o3 = work_dir() / "v3";
    auto r1 = run_cli("--seed 3 --threads 1 --out \"" + o1.string() +
                      "\" verify --suite thm1.1 --scale 0.02");
    CHECK(r1.code == 0);
    CHECK(r1.out.find("verify thm1.1: band") != std::string::npos);
    CHECK(r1.out.find("pass") != std::string::npos);

    auto j1 = load_json(o1 / "report.json");
    CHECK(j1["pass"].get<bool>());
    CHECK_FALSE(j1["invalid"].get<bool>());
    CHECK(j1["band"].get<double>() > 1.0);
    CHECK(j1["band"].get<double>() <= 25.0);
    CHECK(j1["band_ceiling"].get<double>() == 25.0);
    CHECK(j1["samples"].size() == 60);
    for (const char* key : {"ratio_min", "ratio_max", "n_used", "n_excluded", "n_rejected",
                            "n_containment_failed", "fitted_args", "envelope"})
        CHECK(j1.contains(key));
    CHECK(fs::exists(o1 / "report.csv"));

    // same seed, different worker count: byte-identical modulo the timestamp
    auto r2 = run_cli("--seed 3 --threads 4 --out \"" + o2.string() +
                      "\" verify --suite thm1.1 --scale 0.02");
    CHECK(r2.code == 0);
    auto j2 = load_json(o2 / "report.json");
    j1.erase("timestamp");
    j2.erase("timestamp");
    CHECK(j1 == j2);

    // an absurdly low ceiling turns the same run into a reported failure
    auto r3 = run_cli("--seed 3 --threads 1 --out \"" + o3.string() +
                      "\" verify --suite thm1.1 --scale 0.02 --band-ceiling 1.001");
    CHECK(r3.code == 2);
    CHECK(r3.out.find("FAIL") != std::string::npos);
    CHECK_FALSE(load_json(o3 / "report.json")["pass"].get<bool>());
}

TEST_CASE("scan subcommand tabulates the series and finds the origin crossover") {
    auto cfg = write_config("scan.ini", "seed = 4\n"
                                        "[potential]\n"
                                        "kind = power_decay\n"
                                        "sign = positive\n"
                                        "alpha = 1\n"
                                        "K = 1\n"
                                        "dim = 1\n"
                                        "[mc]\n"
                                        "n_paths = 3000\n"
                                        "n_steps = 64\n"
                                        "antithetic = true\n"
                                        "[grid]\n"
                                        "ts = 0.25, 0.5, 1, 2, 4, 8\n"
                                        "radii = 0\n"
                                        "estimator = fkmc\n");
    fs::path out = work_dir() / "sc1";
    auto r = run_cli("--config \"" + cfg.string() + "\" --out \"" + out.string() + "\" scan");
    CHECK(r.code == 0);
    CHECK(r.out.find("scan: 6 points") != std::string::npos);

    std::istringstream csv(slurp(out / "scan.csv"));
    std::string header;
    std::getline(csv, header);
    CHECK(header == "t,x_norm,y_norm,dist,estimate,stderr,q,log_ratio,branch,regime");
    int lines = 0;
    for (std::string line; std::getline(csv, line);) ++lines;
    CHECK(lines == 6);

    auto j = load_json(out / "scan.json");
    REQUIRE(j["switches"].size() == 1);
    CHECK(j["switches"][0]["found"].get<bool>());
    double ts = j["switches"][0]["t_switch"].get<double>();
    CHECK(ts > 1.0 / 3.0);  // transition time at the origin is 1
    CHECK(ts < 3.0);
}

TEST_CASE("config problems exit with code 1 and a pointed message") {
    auto r = run_cli("kernel --t 1 --x 0 --y 0");
    CHECK(r.code == 1);
    CHECK(r.err.find("missing [potential] section") != std::string::npos);

    auto bad = write_config("bad.ini", "seed = 1\n[potential]\nbogus_key = 3\n");
    auto r2 = run_cli("--config \"" + bad.string() + "\" kernel --t 1 --x 0 --y 0");
    CHECK(r2.code == 1);
    CHECK(r2.err.find("unknown key 'bogus_key'") != std::string::npos);
    CHECK(r2.err.find("valid keys") != std::string::npos);

    auto r3 = run_cli("--config /nonexistent/nope.ini selftest");
    (void)r3;  // selftest ignores the config; loading happens per-subcommand
    auto r4 = run_cli("--config /nonexistent/nope.ini kernel --t 1 --x 0 --y 0");
    CHECK(r4.code == 1);
    CHECK(r4.err.find("cannot open") != std::string::npos);
}

#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "ffb/config.hpp"
#include "ffb/experiments.hpp"

using namespace ffb;

namespace {
std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}
} // namespace

TEST_CASE("config parser round trip") {
    auto cfg = Config::parse_string("# comment\nexperiment = scaling_identity\n"
                                    "sigma = 0.5\ngrid.nx = 65 # trailing\n"
                                    "sigma_list = 0.3, 0.5, 0.7\n");
    CHECK(cfg.get_string("experiment") == "scaling_identity");
    CHECK(cfg.get_double("sigma", 0) == 0.5);
    CHECK(cfg.get_int("grid.nx", 0) == 65);
    auto lst = cfg.get_list("sigma_list", {});
    REQUIRE(lst.size() == 3);
    CHECK(lst[1] == 0.5);
    CHECK(cfg.hash() == Config::parse_string(cfg.raw_text()).hash());
}

TEST_CASE("config errors carry line numbers") {
    CHECK_THROWS_WITH_AS(Config::parse_string("a = 1\nbroken line\n"),
                         doctest::Contains("line 2"), config_error);
    auto cfg = Config::parse_string("x = not_a_number\n");
    try {
        cfg.get_double("x", 0);
        CHECK(false);
    } catch (const config_error& e) {
        CHECK(std::string(e.what()).find("line 1") != std::string::npos);
    }
    CHECK_THROWS_AS(Config::parse_string("k = 1\nk = 2\n"), config_error);
}

TEST_CASE("registry lists exactly the eleven experiments") {
    CHECK(experiment_registry().size() == 11);
    for (const auto& e : experiment_registry()) {
        CHECK(find_experiment(e.name) == &e);
        CHECK(!e.doc.empty());
    }
    CHECK(find_experiment("no_such_thing") == nullptr);
    CHECK(nearest_experiment("scaling_identiy") == "scaling_identity");
    CHECK(nearest_experiment("barier_frac") == "barrier_frac");
}

TEST_CASE("scaling identity experiment runs fast and deterministically") {
    auto cfg = Config::parse_string("experiment = scaling_identity\n");
    std::filesystem::path out1 = std::filesystem::temp_directory_path() / "ffb_det_1";
    std::filesystem::path out2 = std::filesystem::temp_directory_path() / "ffb_det_2";
    std::filesystem::remove_all(out1);
    std::filesystem::remove_all(out2);
    for (auto& out : {out1, out2}) {
        ExperimentContext ctx(cfg, out);
        ctx.manifest().experiment = "scaling_identity";
        experiments::scaling_identity(ctx);
        ctx.write_manifest();
        CHECK(ctx.manifest().all_pass());
    }
    CHECK(slurp(out1 / "scaling_identity.csv") == slurp(out2 / "scaling_identity.csv"));
    CHECK(!slurp(out1 / "scaling_identity.csv").empty());
}

#ifdef FFB_BIN_PATH
TEST_CASE("binary exit codes") {
    std::filesystem::path tmp = std::filesystem::temp_directory_path() / "ffb_cli";
    std::filesystem::create_directories(tmp);
    auto write = [&](const std::string& name, const std::string& text) {
        std::ofstream(tmp / name) << text;
        return (tmp / name).string();
    };
    std::string bin = FFB_BIN_PATH;
    std::string good = write("good.cfg", "experiment = scaling_identity\noutput_dir = " +
                                             (tmp / "out").string() + "\n");
    std::string bad = write("bad.cfg", "experiment = scaling_identiy\n");
    std::string broken = write("broken.cfg", "experiment scaling_identity\n");
    CHECK(std::system((bin + " run " + good + " > /dev/null").c_str()) == 0);
    CHECK(WEXITSTATUS(std::system((bin + " run " + bad + " 2> /dev/null").c_str())) == 2);
    CHECK(WEXITSTATUS(std::system((bin + " validate " + broken + " 2> /dev/null").c_str())) == 2);
    CHECK(WEXITSTATUS(std::system((bin + " validate " + good + " 2> /dev/null").c_str())) == 0);
    CHECK(std::system((bin + " list > /dev/null").c_str()) == 0);
}
#endif

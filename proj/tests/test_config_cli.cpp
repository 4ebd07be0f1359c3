#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "hcran/config.hpp"
#include "hcran/csv.hpp"

using namespace hcran;
namespace fs = std::filesystem;

namespace {

const fs::path kSource = HCRAN_SOURCE_DIR;
const fs::path kCli = HCRAN_CLI_PATH;
const fs::path kScratch = fs::path(HCRAN_BINARY_DIR) / "cli_scratch";

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

int cli(const std::string& args, const std::string& env = "") {
    const std::string cmd = env + (env.empty() ? "" : " ") + "\"" + kCli.string() + "\" run " + args +
                            " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

fs::path write_file(const std::string& name, const std::string& text) {
    fs::create_directories(kScratch);
    const fs::path p = kScratch / name;
    std::ofstream(p) << text;
    return p;
}

std::size_t count_lines(const std::string& s) {
    std::size_t n = 0;
    for (char c : s) n += c == '\n';
    return n;
}

}  // namespace

TEST_CASE("the shipped config reproduces the defaults") {
    const ExperimentConfig ec = load_config(kSource / "configs" / "paper_vi.cfg");
    REQUIRE_NOTHROW(ec.validate());
    const NetworkConfig n = ec.scenario.network;
    const NetworkConfig d;
    CHECK(n.num_rrh == d.num_rrh);
    CHECK(n.num_hue == d.num_hue);
    CHECK(n.num_rue == d.num_rue);
    CHECK(n.num_rb_rrh + n.num_rb_hpn == 20);
    CHECK(n.bandwidth_total == 300e3);
    CHECK(n.p_max_rrh == 3.0);
    CHECK(n.p_max_hpn == 10.0);
    CHECK(n.control_v == 1000.0);
    CHECK(ec.scenario.arrivals.mean_rue == 6000.0);
    CHECK(ec.scenario.arrivals.mean_hue == 3000.0);
    CHECK(ec.scenario.run.slots == 5000);
    CHECK(ec.run_jccro);
    CHECK_FALSE(ec.run_msr);
    CHECK_FALSE(ec.axis.has_value());
}

TEST_CASE("config parsing") {
    ExperimentConfig ec = parse_config("[network]\ncontrol_v = 250\nutility = log\n[run]\nslots = 7\n"
                                       "[experiment]\nsweep_axis = lambda\nsweep_values = 100, 200,400\n"
                                       "schemes = jccro,msr\n");
    CHECK(ec.scenario.network.control_v == 250.0);
    CHECK(ec.scenario.network.utility_kind == UtilityKind::Logarithmic);
    CHECK(ec.scenario.run.slots == 7);
    CHECK(ec.axis == SweepAxis::Lambda);
    CHECK(ec.values == std::vector<double>{100.0, 200.0, 400.0});
    CHECK(ec.run_msr);
    CHECK_NOTHROW(ec.validate());

    CHECK_THROWS_AS(parse_config("[network]\nbogus = 1\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[nowhere]\nslots = 1\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[run]\nslots = many\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[run]\nslots = -3\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[run]\nwarm_start = maybe\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[network]\ncontrol_v = 1e3x\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[network\n"), ConfigError);

    ExperimentConfig bad = parse_config("[experiment]\nsweep_axis = V\nsweep_values = 10,10\n");
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = parse_config("[network]\np_max_rrh = -1\n");
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    CHECK_THROWS_AS(load_config(kScratch / "missing.cfg"), ConfigError);

    CHECK(parse_values("10,100,1000") == std::vector<double>{10.0, 100.0, 1000.0});
    CHECK(parse_values(" 1e3 ,") == std::vector<double>{1000.0});
    CHECK_THROWS_AS(parse_values("1,two"), ConfigError);
}

TEST_CASE("number formatting") {
    CHECK(format_number(0.0) == "0");
    CHECK(format_number(-0.0) == "0");
    CHECK(format_number(1.5) == "1.5");
    CHECK(format_number(6000.0) == "6000");
    CHECK(format_number(1.0 / 3.0) == "0.333333333");
    CHECK(format_number(1e-20) == "1e-20");
    CHECK(format_number(std::numeric_limits<double>::infinity()) == "inf");
}

TEST_CASE("command line") {
    const std::string config = "--config \"" + (kSource / "configs" / "paper_vi.cfg").string() + "\"";
    const fs::path a = kScratch / "a", b = kScratch / "b";
    fs::remove_all(a);
    fs::remove_all(b);

    REQUIRE(cli(config + " --sweep V 10,100,1000 --slots 20 --out \"" + a.string() + "\"") == 0);
    REQUIRE(cli(config + " --sweep V 10,100,1000 --slots 20 --out \"" + b.string() + "\"") == 0);
    const std::string summary = slurp(a / "run_summary.csv");
    CHECK(count_lines(summary) == 4);  // header and three runs
    CHECK(summary == slurp(b / "run_summary.csv"));
    for (const auto& e : fs::directory_iterator(a)) {
        CHECK(slurp(e.path()) == slurp(b / e.path().filename()));
    }
    CHECK(fs::exists(a / "trace_jccro_V_2.csv"));
    CHECK(count_lines(slurp(a / "trace_jccro_V_0.csv")) == 21);

    // The environment supplies what the command line leaves out.
    const fs::path c = kScratch / "c", d = kScratch / "d";
    fs::remove_all(c);
    fs::remove_all(d);
    REQUIRE(cli(config + " --slots 10 --no-trace --out \"" + c.string() + "\"", "HCRAN_SEED=9") == 0);
    REQUIRE(cli(config + " --slots 10 --no-trace --seed 9 --out \"" + d.string() + "\"") == 0);
    CHECK(slurp(c / "run_summary.csv") == slurp(d / "run_summary.csv"));
    CHECK_FALSE(fs::exists(c / "trace_jccro.csv"));

    CHECK(cli("--config \"" + write_file("bad.cfg", "[network]\nbogus = 1\n").string() + "\"") == 2);
    CHECK(cli(config + " --sweep V 100,10 --slots 5") == 2);
    CHECK(cli(config + " --sweep mass 1,2 --slots 5") == 2);
    CHECK(cli("--slots 5") == 2);
    CHECK(cli(config + " --slots 5 --out /proc/hcran_no_such_dir") == 3);

    const fs::path flagged = write_file("msr.cfg", "[network]\nee_required = 1e6\n[run]\nslots = 3\n"
                                                   "[experiment]\nschemes = msr\n");
    const std::string out = " --out \"" + (kScratch / "e").string() + "\"";
    CHECK(cli("--config \"" + flagged.string() + "\"" + out) == 0);
    CHECK(cli("--config \"" + flagged.string() + "\" --fail-on-flag" + out) == 5);
}

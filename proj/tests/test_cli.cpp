#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

using nlohmann::json;

namespace {

struct RunResult {
    int code = -1;
    std::string out;
    std::string err;
};

std::string tmp_dir() {
    static std::string dir = [] {
        char tmpl[] = "/tmp/harqlink_cli_XXXXXX";
        char* d = mkdtemp(tmpl);
        REQUIRE(d != nullptr);
        return std::string(d);
    }();
    return dir;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void spit(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    out << content;
    REQUIRE(out.good());
}

RunResult run_cli(const std::string& args, const std::string& env_prefix = "") {
    static int counter = 0;
    std::string out_path = tmp_dir() + "/out" + std::to_string(counter);
    std::string err_path = tmp_dir() + "/err" + std::to_string(counter);
    ++counter;
    std::string cmd = env_prefix;
    if (!cmd.empty()) {
        cmd += " ";
    }
    cmd += std::string(CLI_BIN_PATH) + " " + args + " >" + out_path + " 2>" + err_path;
    int rc = std::system(cmd.c_str());
    RunResult r;
    r.code = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
    r.out = slurp(out_path);
    r.err = slurp(err_path);
    return r;
}

const char* kSystemBlock = R"(  "system": {
    "frame_duration_s": 1e-4,
    "sensing_duration_s": 2e-5,
    "bandwidth_hz": 1e6,
    "primary_activity_prob": 0.1,
    "noise_variance": 1.0,
    "primary_signal_variance": 1.0,
    "fading_mean_power": 1.0,
    "power_busy_db": 0.0,
    "power_idle_db": 10.0,
    "detection_threshold": 1.4,
    "packet_bits": 240,
    "deadline_frames": 4,
    "qos_exponent_per_bit": 0.001
  })";

std::string write_config(const std::string& name, const std::string& extra_sections) {
    std::string path = tmp_dir() + "/" + name;
    std::string body = "{\n";
    body += kSystemBlock;
    if (!extra_sections.empty()) {
        body += ",\n" + extra_sections;
    }
    body += "\n}\n";
    spit(path, body);
    return path;
}

std::vector<std::string> lines_of(const std::string& text) {
    std::vector<std::string> lines;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        lines.push_back(line);
    }
    return lines;
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream in(line);
    while (std::getline(in, cell, ',')) {
        cells.push_back(cell);
    }
    if (!line.empty() && line.back() == ',') {
        cells.push_back("");
    }
    return cells;
}

const char* kFastSim = R"(  "sim": {
    "frames": 40000,
    "seed": 5,
    "batches": 20,
    "sensing_mode": "statistical",
    "theta_grid": [1e-4]
  })";

}  // namespace

TEST_CASE("version flag and argument errors") {
    RunResult r = run_cli("--version");
    CHECK(r.code == 0);
    CHECK(r.out.find("harqlink 0.1.0") != std::string::npos);

    CHECK(run_cli("").code == 2);
    CHECK(run_cli("analyze").code == 2);
    CHECK(run_cli("analyze --config /nonexistent_config.json").code == 2);
    CHECK(run_cli("frobnicate --config x").code == 2);
}

TEST_CASE("analyze reports the closed-form metrics") {
    std::string cfg = write_config("analyze.json", "");
    RunResult r = run_cli("analyze --config " + cfg);
    REQUIRE(r.code == 0);
    json j = json::parse(r.out);

    CHECK(j["tool"]["name"] == "harqlink");
    CHECK(j["command"] == "analyze");
    CHECK(j["config"]["system"]["packet_bits"] == 240);
    CHECK(j["derived"]["sensing_samples"] == 20);
    CHECK(j["derived"]["decode_threshold"].get<double>() == doctest::Approx(7.0));
    CHECK(j["derived"]["false_alarm_prob"].get<double>() ==
          doctest::Approx(0.0478071091714342).epsilon(1e-12));
    CHECK(j["derived"]["detection_prob"].get<double>() ==
          doctest::Approx(0.9234950597581429).epsilon(1e-12));

    auto p = j["chain"]["attempt_fail_probs"].get<std::vector<double>>();
    REQUIRE(p.size() == 4);
    CHECK(p[0] == doctest::Approx(0.5725136032489937).epsilon(1e-12));
    CHECK(j["chain"]["p_lost"].get<double>() ==
          doctest::Approx(0.02101819803664752).epsilon(1e-12));
    CHECK(j["chain"]["service_rate_bcu"].get<double>() ==
          doctest::Approx(1.2713949382130976).epsilon(1e-12));

    CHECK(j["effective_capacity"]["renewal"]["bcu"].get<double>() ==
          doctest::Approx(1.2345927757942329).epsilon(1e-9));
    CHECK(j["effective_capacity"]["truncated"]["bcu"].get<double>() ==
          doctest::Approx(1.6415904134661794).epsilon(1e-9));
}

TEST_CASE("analyze writes to a file when asked") {
    std::string cfg = write_config("analyze_out.json", "");
    std::string out_file = tmp_dir() + "/analyze_report.json";
    RunResult r = run_cli("analyze --config " + cfg + " --out " + out_file);
    CHECK(r.code == 0);
    CHECK(r.out.empty());
    json j = json::parse(slurp(out_file));
    CHECK(j["command"] == "analyze");
}

TEST_CASE("configuration errors name the offending key") {
    std::string bad_key = tmp_dir() + "/bad_key.json";
    spit(bad_key, R"({"system": {"bandwith_hz": 1}})");
    RunResult r = run_cli("analyze --config " + bad_key);
    CHECK(r.code == 2);
    CHECK(r.err.find("system.bandwith_hz") != std::string::npos);
    CHECK(r.err.find("unknown key") != std::string::npos);

    std::string cfg = write_config("bad_value.json", "");
    std::string text = slurp(cfg);
    text.replace(text.find("\"packet_bits\": 240"), 18, "\"packet_bits\": -5");
    spit(cfg, text);
    r = run_cli("analyze --config " + cfg);
    CHECK(r.code == 2);
    CHECK(r.err.find("packet_bits") != std::string::npos);

    std::string missing = tmp_dir() + "/missing.json";
    spit(missing, R"({"system": {"frame_duration_s": 1e-4}})");
    r = run_cli("analyze --config " + missing);
    CHECK(r.code == 2);
    CHECK(r.err.find("required key is missing") != std::string::npos);

    std::string malformed = tmp_dir() + "/malformed.json";
    spit(malformed, "{ nope");
    r = run_cli("analyze --config " + malformed);
    CHECK(r.code == 2);
}

TEST_CASE("sweep emits the CSV schema") {
    std::string cfg = write_config(
        "sweep.json",
        R"(  "sweeps": [{"axis": "packet_bits", "values": [200, 220, 240], "tag": "m4"}])");
    RunResult r = run_cli("sweep --config " + cfg);
    REQUIRE(r.code == 0);

    std::vector<std::string> lines = lines_of(r.out);
    REQUIRE(lines.size() == 8);  // 3 preamble + argmax + header + 3 rows
    CHECK(lines[0].find("# tool=harqlink version=0.1.0") == 0);
    CHECK(lines[1] == "# command=sweep axis=packet_bits tag=m4");
    CHECK(lines[2].find("# config=") == 0);
    CHECK(lines[3].find("# goodput_argmax packet_bits=240") == 0);
    CHECK(lines[4] ==
          "axis,value,p_f,p_d,q1,q2,q3,q4,kappa,p_0,p_1,p_2,p_3,pi_0,p_lost,"
          "service_rate_bcu,goodput_bcu,effcap_bcu_renewal,effcap_bcu_truncated");

    std::vector<std::string> row = split_csv(lines[7]);
    REQUIRE(row.size() == 19);
    CHECK(row[0] == "packet_bits");
    CHECK(row[1] == "240");
    CHECK(std::stod(row[8]) == doctest::Approx(7.0));
    CHECK(std::stod(row[9]) == doctest::Approx(0.5725136032489937).epsilon(1e-11));
    CHECK(std::stod(row[16]) == doctest::Approx(1.2446725076189434).epsilon(1e-11));

    // byte-identical on a second run
    RunResult again = run_cli("sweep --config " + cfg);
    CHECK(again.out == r.out);
}

TEST_CASE("deadline sweeps pad the per-attempt columns") {
    std::string cfg = write_config(
        "deadline.json",
        R"(  "sweeps": [{"axis": "deadline", "values": [1, 2, 4]}])");
    // zero QoS exponent: the capacity column degenerates to the service rate
    std::string text = slurp(cfg);
    text.replace(text.find("\"qos_exponent_per_bit\": 0.001"), 29,
                 "\"qos_exponent_per_bit\": 0.0");
    spit(cfg, text);

    RunResult r = run_cli("sweep --config " + cfg);
    REQUIRE(r.code == 0);
    std::vector<std::string> lines = lines_of(r.out);
    REQUIRE(lines.size() == 7);  // no argmax line on a deadline axis
    CHECK(lines[3].find("p_0,p_1,p_2,p_3") != std::string::npos);

    std::vector<std::string> one = split_csv(lines[4]);
    REQUIRE(one.size() == 19);
    CHECK(one[0] == "deadline");
    CHECK(one[1] == "1");
    CHECK(one[9] != "");   // p_0 present
    CHECK(one[10] == "");  // p_1..p_3 padded out
    CHECK(one[11] == "");
    CHECK(one[12] == "");
    CHECK(one[17] == one[15]);  // theta = 0 limit equals the service rate
    CHECK(one[18] == "");       // no finite limit for the published recursion

    std::vector<std::string> four = split_csv(lines[6]);
    CHECK(four[1] == "4");
    CHECK(four[12] != "");
}

TEST_CASE("multiple sweeps write tagged files") {
    std::string cfg = write_config(
        "multi.json",
        R"(  "sweeps": [
    {"axis": "packet_bits", "values": [220, 240], "tag": "bits",
     "overrides": {"deadline_frames": 2}},
    {"axis": "lambda", "values": [1.0, 1.4, 1.8], "tag": "thresh"}
  ])");
    std::string out_base = tmp_dir() + "/multi.csv";
    RunResult r = run_cli("sweep --config " + cfg + " --out " + out_base);
    REQUIRE(r.code == 0);

    std::string bits = slurp(tmp_dir() + "/multi_bits.csv");
    std::string thresh = slurp(tmp_dir() + "/multi_thresh.csv");
    REQUIRE(!bits.empty());
    REQUIRE(!thresh.empty());

    // the override trims the deadline, so only two attempt columns appear
    CHECK(bits.find("kappa,p_0,p_1,pi_0") != std::string::npos);
    CHECK(lines_of(bits).size() == 7);   // preamble, argmax, header, two rows
    CHECK(lines_of(thresh).size() == 7); // preamble, header, three rows
    std::vector<std::string> row = split_csv(lines_of(thresh)[4]);
    CHECK(row[0] == "lambda");
    CHECK(row[1] == "1");
    // a lower detector threshold raises both error rates
    CHECK(std::stod(row[2]) > 0.0478);
    CHECK(std::stod(row[3]) > 0.9235);

    std::string no_sweeps = write_config("nosweeps.json", "");
    RunResult bad = run_cli("sweep --config " + no_sweeps);
    CHECK(bad.code == 2);
    CHECK(bad.err.find("at least one sweep") != std::string::npos);
}

TEST_CASE("simulate is reproducible and seed-sensitive") {
    std::string cfg = write_config("sim.json", kFastSim);

    RunResult a = run_cli("simulate --config " + cfg);
    REQUIRE(a.code == 0);
    RunResult b = run_cli("simulate --config " + cfg);
    CHECK(a.out == b.out);

    RunResult c = run_cli("simulate --config " + cfg + " --seed 6");
    REQUIRE(c.code == 0);
    CHECK(a.out != c.out);

    json ja = json::parse(a.out);
    CHECK(ja["command"] == "simulate");
    CHECK(ja["config"]["sim"]["seed"] == 5);
    CHECK(ja["simulation"]["frames"] == 40000);
    CHECK(ja["simulation"]["sensing_mode"] == "statistical");
    std::string variant = ja["simulation"]["kernel_variant"].get<std::string>();
    CHECK((variant == "scalar" || variant == "avx2"));
    REQUIRE(ja["simulation"]["effective_capacity"].size() == 1);
    CHECK(ja["simulation"]["effective_capacity"][0]["theta_per_bit"].get<double>() ==
          doctest::Approx(1e-4));

    // worker count steers scheduling only; the whole document must come out
    // byte for byte the same
    RunResult w1 = run_cli("simulate --config " + cfg + " --workers 1");
    RunResult w3 = run_cli("simulate --config " + cfg + " --workers 3");
    REQUIRE(w1.code == 0);
    REQUIRE(w3.code == 0);
    CHECK(w1.out == w3.out);
    CHECK(w1.out == a.out);
}

TEST_CASE("simulate honors mode and kernel overrides") {
    std::string cfg = write_config("sim_phys.json", kFastSim);
    RunResult r = run_cli("simulate --config " + cfg + " --mode physical --frames 20000");
    REQUIRE(r.code == 0);
    json j = json::parse(r.out);
    CHECK(j["config"]["sim"]["sensing_mode"] == "physical");
    CHECK(j["simulation"]["sensing_mode"] == "physical");
    CHECK(j["simulation"]["frames"] == 20000);

    RunResult scalar_run =
        run_cli("simulate --config " + cfg, "HARQLINK_KERNEL=scalar");
    REQUIRE(scalar_run.code == 0);
    json js = json::parse(scalar_run.out);
    CHECK(js["simulation"]["kernel_variant"] == "scalar");

    // a bad kernel request warns and falls back instead of dying
    RunResult bogus = run_cli("simulate --config " + cfg, "HARQLINK_KERNEL=turbo9");
    CHECK(bogus.code == 0);
    CHECK(bogus.err.find("turbo9") != std::string::npos);
    CHECK(bogus.err.find("using scalar kernels") != std::string::npos);
    json jb = json::parse(bogus.out);
    CHECK(jb["simulation"]["kernel_variant"] == "scalar");
}

TEST_CASE("validate runs its check battery") {
    std::string cfg = write_config("validate.json", kFastSim);
    RunResult r = run_cli("validate --config " + cfg);
    REQUIRE((r.code == 0 || r.code == 1));
    json j = json::parse(r.out);
    CHECK(j["command"] == "validate");

    int passed = 0;
    int failed = 0;
    bool saw_root_check = false;
    for (const auto& c : j["checks"]) {
        std::string status = c["status"].get<std::string>();
        (status == "pass" ? passed : failed) += 1;
        std::string name = c["name"].get<std::string>();
        if (name == "root_vs_spectral") {
            saw_root_check = true;
        }
        // closed-form cross-checks must never fail; only the Monte Carlo
        // agreement checks are allowed to trip on a short run
        if (name.rfind("mc_", 0) != 0 && name != "sensing_mode_agreement") {
            CAPTURE(name);
            CHECK(status == "pass");
        }
    }
    CHECK(saw_root_check);
    CHECK(j["summary"]["passed"] == passed);
    CHECK(j["summary"]["failed"] == failed);
    CHECK(j["summary"]["ok"] == (failed == 0));
    CHECK((r.code == 0) == (failed == 0));
    CHECK(!j["truncated_variant_record"].empty());
    CHECK(!j["notes"].empty());
}

TEST_CASE("validate catches a corrupted root check") {
    std::string cfg = write_config("corrupt.json", kFastSim);
    RunResult r = run_cli("validate --config " + cfg + " --corrupt-p");
    CHECK(r.code == 1);
    json j = json::parse(r.out);
    bool found = false;
    for (const auto& c : j["checks"]) {
        if (c["name"] == "root_vs_spectral") {
            found = true;
            CHECK(c["status"] == "fail");
            CHECK(c["detail"]["corrupted_input"] == true);
        }
    }
    CHECK(found);
}

// test_cli.cpp — config parsing, output formats and the rabiqpt executable

#include "rabiqpt/cli/commands.hpp"
#include "rabiqpt/cli/config.hpp"
#include "rabiqpt/cli/output.hpp"
#include "rabiqpt/cli/toml_lite.hpp"

#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace rabiqpt;
using namespace rabiqpt::cli;
namespace fs = std::filesystem;

namespace {

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const fs::path& p, const std::string& text) {
    fs::create_directories(p.parent_path());
    std::ofstream(p, std::ios::binary) << text;
}

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("rabiqpt_cli_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

// Runs the installed-layout executable and returns its exit status.
int run_tool(const std::string& args, std::string* stderr_text = nullptr) {
    const fs::path err = fs::temp_directory_path() / "rabiqpt_cli_stderr.txt";
    const std::string cmd = std::string(RABIQPT_TOOL_PATH) + " " + args + " > /dev/null 2> " + err.string();
    const int status = std::system(cmd.c_str());
    if (stderr_text) *stderr_text = read_file(err);
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string config_error(const std::string& text) {
    try {
        parse_config(text, "test.toml");
    } catch (const ConfigError& e) {
        return e.what();
    }
    return {};
}

const char* kSmallQuench = R"(
[run]
output_dir = "OUT"

[space]
cutoff = 8

[quench]
record_times_us = [0.0, 1.5, 3.0]

[tomography]
reconstruction_cutoff = 6
)";

std::string small_quench(const fs::path& out) {
    std::string text = kSmallQuench;
    text.replace(text.find("OUT"), 3, out.string());
    return text;
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        std::vector<std::string> cells;
        std::istringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        rows.push_back(cells);
    }
    return rows;
}

}  // namespace

// ---------------------------------------------------------------- TOML subset

TEST(Toml, ParsesScalarsArraysAndComments) {
    const TomlDocument d = parse_toml("a = 1\n[t]  # c\nb = \"x y\"\nc = [1.5, -2, 3e2]\nd = true\n");
    ASSERT_EQ(d.tables.size(), 2u);
    EXPECT_EQ(std::get<std::int64_t>(d.tables[0].find("a")->value.data), 1);
    const TomlTable* t = d.find("t");
    ASSERT_NE(t, nullptr);
    EXPECT_EQ(t->line, 2);
    EXPECT_EQ(std::get<std::string>(t->find("b")->value.data), "x y");
    EXPECT_EQ(std::get<TomlArray>(t->find("c")->value.data).size(), 3u);
    EXPECT_TRUE(std::get<bool>(t->find("d")->value.data));
    EXPECT_EQ(t->find("d")->line, 5);
}

TEST(Toml, RejectsUnsupportedSyntaxWithLineNumbers) {
    for (const auto& [text, line] : std::vector<std::pair<std::string, int>>{
             {"a = 1\nb.c = 2\n", 2},
             {"x = 1\n\ny = {a = 1}\n", 3},
             {"s = 'lit'\n", 1},
             {"a = [[1]]\n", 1},
             {"a = nan\n", 1},
             {"a = 1\na = 2\n", 2},
             {"[t]\n[t]\n", 2},
             {"a = \"open\n", 1}}) {
        try {
            parse_toml(text, "f.toml");
            ADD_FAILURE() << "accepted: " << text;
        } catch (const ConfigError& e) {
            EXPECT_NE(std::string(e.what()).find("f.toml:" + std::to_string(line) + ":"), std::string::npos) << e.what();
        }
    }
}

TEST(Toml, FormatDoubleRoundTrips) {
    for (double v : {0.1, 1.0, -0.45, 25.97, 1e-7, 123456789.125, 2.0 / 3.0}) {
        const std::string s = format_double(v);
        EXPECT_EQ(std::stod(s), v) << s;
        EXPECT_NE(s.find_first_of(".e"), std::string::npos) << s;
    }
}

// ---------------------------------------------------------------- config

TEST(Config, DefaultsParseFromEmptyText) {
    const ExperimentConfig cfg = parse_config("");
    EXPECT_EQ(cfg, ExperimentConfig{});
    EXPECT_NEAR(to_mhz(cfg.quench_schedule().eta), 0.735, 1e-12);
}

TEST(Config, UnknownKeyReportedWithLine) {
    const std::string e = config_error("[space]\ncutoff = 20\ncutof = 3\n");
    EXPECT_NE(e.find("test.toml:3:"), std::string::npos) << e;
    EXPECT_NE(e.find("cutof"), std::string::npos) << e;
}

TEST(Config, AllErrorsCollected) {
    const std::string e = config_error("[space]\ncutoff = \"big\"\n[bogus]\n[schedule]\nxi0 = -1.0\n");
    EXPECT_NE(e.find("test.toml:2:"), std::string::npos) << e;
    EXPECT_NE(e.find("test.toml:3:"), std::string::npos) << e;
    EXPECT_NE(e.find("test.toml:5:"), std::string::npos) << e;
}

TEST(Config, SemanticCrossChecks) {
    EXPECT_NE(config_error("[quench]\nrecord_times_us = [4.0]\n").find("record"), std::string::npos);
    EXPECT_NE(config_error("[quench]\nmodel = \"full\"\n").find("lab"), std::string::npos);
    EXPECT_NE(config_error("[space]\nqubit_levels = 3\n").find("effective"), std::string::npos);
    EXPECT_NE(config_error("[decoherence]\nframe = \"rotating\"\n").find("test.toml:2:"), std::string::npos);
}

TEST(Config, RoundTripIsIdentity) {
    ExperimentConfig cfg;
    cfg.run.seed = 12345;
    cfg.space.cutoff = 33;
    cfg.drive.phi2 = -0.45;
    cfg.drive.eps2_mhz = 1.0 / 3.0;
    cfg.quench.record_times_us = {0.0, 0.1, 2.95};
    cfg.calibration.phases = {-0.9, -0.6, -0.3, 0.0, 0.3};
    cfg.tomography.source = "coherent";
    cfg.decoherence.frame = "effective";
    const std::string text = serialize_config(cfg);
    const ExperimentConfig back = parse_config(text);
    EXPECT_EQ(back, cfg);
    EXPECT_EQ(serialize_config(back), text);
}

TEST(Config, PresetsValidateAndRoundTrip) {
    for (const char* name : {"paper_quench.toml", "calibration.toml", "tomography_demo.toml"}) {
        const ExperimentConfig cfg = load_config(std::string(RABIQPT_PRESET_DIR) + "/" + name);
        EXPECT_EQ(parse_config(serialize_config(cfg)), cfg) << name;
    }
}

TEST(Config, UnitConversionAtBoundary) {
    const ExperimentConfig cfg = parse_config("[drive]\ng_mhz = 20.0\n[decoherence]\nt1_us = 10.0\n");
    EXPECT_NEAR(cfg.drive_params().g, mhz(20.0), 1e-6);
    EXPECT_NEAR(cfg.rates().gamma1, 1e5, 1e-6);
    EXPECT_NEAR(cfg.drive_params().nu2, cfg.drive_params().B0(), 1e-6);
}

// ---------------------------------------------------------------- output formats

TEST(Output, NumberFormattingUsesDotAndRoundTrips) {
    EXPECT_EQ(format_number(0.5), "0.5");
    EXPECT_EQ(format_number(-0.0), "0");
    EXPECT_EQ(format_number(3.0), "3");
    for (double v : {1e-300, 0.1 + 0.2, -12345.678}) EXPECT_EQ(std::stod(format_number(v)), v);
}

TEST(Output, CsvHeaderAndWidth) {
    CsvTable t({"a", "b", "c"});
    t.add_row({1.5, std::int64_t{2}, std::string("x")});
    EXPECT_EQ(t.str(), "a,b,c\n1.5,2,x\n");
    EXPECT_ANY_THROW(t.add_row({1.0}));
}

TEST(Output, Sha256KnownVector) {
    EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(Output, MatrixJsonRoundTrip) {
    Matrix m(2, 2);
    m << cd{1.0, 0.5}, cd{-0.25, 0.0}, cd{0.0, 3.0}, cd{1e-9, -2.0};
    EXPECT_TRUE(matrix_from_json(matrix_json(m)) == m);
}

TEST(Output, ManifestChecksumsMatchFiles) {
    const fs::path dir = scratch("manifest");
    OutputDir out(dir.string());
    out.write("a.txt", "hello\n");
    out.write("sub/b.csv", "x\n1\n");
    EXPECT_THROW(out.write("a.txt", "again"), std::logic_error);
    out.finish("test", "cfg", 5);
    const Json manifest = Json::parse(read_file(dir / "manifest.json"));
    const auto& files = manifest.at("files");
    ASSERT_EQ(files.size(), 3u);
    for (std::size_t i = 0; i + 1 < files.size(); ++i) {
        const std::string path = files[i].at("path");
        EXPECT_EQ(files[i].at("sha256").get<std::string>(), sha256_hex(read_file(dir / path)));
    }
    EXPECT_EQ(files.back().at("path").get<std::string>(), "manifest.json");
    EXPECT_TRUE(files.back().at("sha256").is_null());
    EXPECT_EQ(manifest.at("config_sha256").get<std::string>(), sha256_hex("cfg"));
}

// ---------------------------------------------------------------- verbs in process

TEST(Quench, CsvSchemaAndScheduleColumn) {
    const fs::path dir = scratch("quench_csv");
    const ExperimentConfig cfg = parse_config(small_quench(dir / "out"));
    std::ostringstream log, err;
    ASSERT_EQ(cmd_quench(cfg, log, err), kExitNumerical) << err.str();  // cutoff 8 trips the truncation alarm
    const auto rows = parse_csv(read_file(dir / "out" / "quench.csv"));
    ASSERT_EQ(rows.size(), 4u);
    EXPECT_EQ(rows[0], (std::vector<std::string>{"t_us", "xi", "Omega_mhz", "delta_mhz", "nbar", "P_g", "P_e", "P_f",
                                                 "parity"}));
    const double expected[3][2] = {{0.0, 0.5}, {1.5, 1.5}, {3.0, 2.5}};
    for (int k = 0; k < 3; ++k) {
        EXPECT_NEAR(std::stod(rows[k + 1][0]), expected[k][0], 1e-12);
        EXPECT_NEAR(std::stod(rows[k + 1][1]), expected[k][1], 1e-12);
        for (const auto& cell : rows[k + 1]) EXPECT_EQ(cell.find(';'), std::string::npos);
    }
    EXPECT_TRUE(fs::exists(dir / "out" / "summary.json"));
    EXPECT_TRUE(fs::exists(dir / "out" / "manifest.json"));
}

TEST(Quench, EmptyRecordTimesWriteSummaryOnly) {
    const fs::path dir = scratch("quench_empty");
    ExperimentConfig cfg;
    cfg.run.output_dir = (dir / "out").string();
    cfg.space.cutoff = 6;
    std::ostringstream log, err;
    EXPECT_EQ(cmd_quench(cfg, log, err), kExitOk);
    std::vector<std::string> names;
    for (const auto& e : fs::directory_iterator(dir / "out")) names.push_back(e.path().filename().string());
    std::sort(names.begin(), names.end());
    EXPECT_EQ(names, (std::vector<std::string>{"manifest.json", "summary.json"}));
}

TEST(Calibrate, TooFewPhasesIsConfigError) {
    const fs::path dir = scratch("cal_few");
    const fs::path cfg_path = dir / "c.toml";
    write_file(cfg_path, "[run]\noutput_dir = \"" + (dir / "out").string() + "\"\n[calibration]\nphases = [-0.45]\n");
    std::string err;
    EXPECT_EQ(run_tool("calibrate --config " + cfg_path.string(), &err), kExitConfig);
    EXPECT_NE(err.find("5 phases"), std::string::npos) << err;
}

// ---------------------------------------------------------------- executable

TEST(Tool, ValidateConfigOnPresets) {
    for (const char* name : {"paper_quench.toml", "calibration.toml", "tomography_demo.toml"}) {
        EXPECT_EQ(run_tool(std::string("validate-config --config ") + RABIQPT_PRESET_DIR + "/" + name), kExitOk) << name;
    }
}

TEST(Tool, ConfigProblemsExitTwo) {
    const fs::path dir = scratch("exit_two");
    write_file(dir / "bad.toml", "[space]\ncutoff = 0\n");
    std::string err;
    EXPECT_EQ(run_tool("validate-config --config " + (dir / "bad.toml").string(), &err), kExitConfig);
    EXPECT_NE(err.find("bad.toml:2:"), std::string::npos) << err;
    EXPECT_EQ(run_tool("quench --config " + (dir / "missing.toml").string()), kExitConfig);
    EXPECT_EQ(run_tool("quench"), kExitConfig);
    EXPECT_EQ(run_tool("frobnicate --config x"), kExitConfig);
    write_file(dir / "ok.toml", "");
    EXPECT_EQ(run_tool("validate-config --config " + (dir / "ok.toml").string() + " --threads 0"), kExitConfig);
}

TEST(Tool, NumericalAlarmExitsThree) {
    const fs::path dir = scratch("exit_three");
    write_file(dir / "q.toml", small_quench(dir / "out"));
    std::string err;
    EXPECT_EQ(run_tool("quench --config " + (dir / "q.toml").string(), &err), kExitNumerical);
    EXPECT_NE(err.find("truncation"), std::string::npos) << err;
    EXPECT_TRUE(fs::exists(dir / "out" / "quench.csv"));  // partial outputs are kept
}

TEST(Tool, RerunsAreByteIdentical) {
    const fs::path dir = scratch("rerun");
    write_file(dir / "q.toml", "[space]\ncutoff = 20\n[schedule]\ntf_us = 1.0\n[quench]\nrecord_times_us = [0.0, 0.5, 1.0]\n"
                                "write_states = true\n[tomography]\ntimes_us = [1.0]\n");
    // Same --out both times: the output directory is part of the hashed config.
    const std::string cmd = "quench --config " + (dir / "q.toml").string() + " --out " + (dir / "b").string();
    ASSERT_EQ(run_tool(cmd), kExitOk);
    fs::rename(dir / "b", dir / "a");
    ASSERT_EQ(run_tool(cmd), kExitOk);
    std::size_t compared = 0;
    for (const auto& e : fs::recursive_directory_iterator(dir / "a")) {
        if (!e.is_regular_file()) continue;
        const fs::path rel = fs::relative(e.path(), dir / "a");
        EXPECT_EQ(read_file(e.path()), read_file(dir / "b" / rel)) << rel;
        ++compared;
    }
    EXPECT_GE(compared, 6u);  // csv, summary, manifest and three states
}

TEST(Tool, SeedOverrideChangesNoisyTomography) {
    const fs::path dir = scratch("seed");
    write_file(dir / "t.toml", "[space]\ncutoff = 10\n[tomography]\nsource = \"coherent\"\nalpha_re = 0.5\n"
                                "reconstruction_cutoff = 6\ngrid_points = 11\ntau_count = 200\nnoise_sigma = 0.01\n");
    const std::string base = "tomography --config " + (dir / "t.toml").string();
    ASSERT_EQ(run_tool(base + " --seed 1 --out " + (dir / "a").string()), kExitOk);
    ASSERT_EQ(run_tool(base + " --seed 1 --out " + (dir / "b").string()), kExitOk);
    ASSERT_EQ(run_tool(base + " --seed 2 --out " + (dir / "c").string()), kExitOk);
    const std::string a = read_file(dir / "a" / "wigner_000.csv");
    EXPECT_FALSE(a.empty());
    EXPECT_EQ(a, read_file(dir / "b" / "wigner_000.csv"));
    EXPECT_NE(a, read_file(dir / "c" / "wigner_000.csv"));
}

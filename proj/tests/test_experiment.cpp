#include "medtilt/experiment.hpp"

#include <gtest/gtest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

using namespace medtilt;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name)
{
    const auto dir = fs::temp_directory_path() / "medtilt_test_experiment";
    fs::create_directories(dir);
    return dir / name;
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct CliResult {
    int code;
    std::string out;
};

CliResult run_cli(const std::string& args)
{
    const auto log = scratch("stdout.txt");
    const std::string cmd = std::string(MEDTILT_CLI) + " " + args + " > " + log.string() + " 2>/dev/null";
    const int status = std::system(cmd.c_str());
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp(log)};
}

ExperimentConfig small(Command c, OutputFormat f = OutputFormat::csv)
{
    ExperimentConfig cfg;
    cfg.command = c;
    cfg.t_min = -2;
    cfg.t_max = 2;
    cfg.t_points = 5;
    cfg.output_format = f;
    cfg.output_path = scratch("out").string();
    return cfg;
}

} // namespace

TEST(Command, NamesRoundTrip)
{
    for (const auto& [c, name] : kCommandNames) EXPECT_EQ(parse_command(name), c);
    EXPECT_THROW(parse_command("median_gapp"), ConfigParse);
    EXPECT_THROW(parse_format("xml"), ConfigParse);
}

TEST(Config, JsonMerge)
{
    ExperimentConfig cfg;
    apply_json_config(cfg, nlohmann::json::parse(R"j({
        "measure": "perturbed_cosine(0.5)", "command": "sign-kernel", "t_range": [-1, 3],
        "t_points": 9, "quadrature": {"rel_tol": 1e-9}, "output_path": "x.json",
        "output_format": "json", "choquet": {"kernel_tol": 1e-12}})j"));
    EXPECT_EQ(cfg.measure, "perturbed_cosine(0.5)");
    EXPECT_EQ(cfg.command, Command::sign_kernel);
    EXPECT_EQ(cfg.t_min, -1.0);
    EXPECT_EQ(cfg.t_max, 3.0);
    EXPECT_EQ(cfg.t_points, 9u);
    EXPECT_EQ(cfg.quadrature.rel_tol, 1e-9);
    EXPECT_EQ(cfg.quadrature.abs_tol, QuadratureConfig{}.abs_tol);
    EXPECT_EQ(cfg.output_format, OutputFormat::json);
    EXPECT_EQ(cfg.choquet.kernel_tol, 1e-12);
    EXPECT_NO_THROW(cfg.validate());
}

TEST(Config, Rejections)
{
    ExperimentConfig cfg;
    EXPECT_THROW(apply_json_config(cfg, nlohmann::json::parse(R"j({"colour": 1})j")), ConfigParse);
    EXPECT_THROW(apply_json_config(cfg, nlohmann::json::parse(R"j({"t_range": [1]})j")), ConfigParse);
    EXPECT_THROW(apply_json_config(cfg, nlohmann::json::parse(R"j({"t_points": "many"})j")), ConfigParse);
    EXPECT_THROW(apply_json_config(cfg, nlohmann::json::parse(R"j({"quadrature": {"order": 3}})j")), ConfigParse);
    EXPECT_THROW(apply_json_config(cfg, nlohmann::json::parse("[1,2]")), ConfigParse);
    EXPECT_THROW(apply_json_config_file(cfg, "/nonexistent/cfg.json"), ConfigParse);

    auto bad = small(Command::median_gap);
    bad.t_min = 3;
    EXPECT_THROW(bad.validate(), ConfigParse);
    bad = small(Command::full_report);
    EXPECT_THROW(bad.validate(), ConfigParse);
    bad = small(Command::median_gap);
    bad.output_path.clear();
    EXPECT_THROW(bad.validate(), ConfigParse);
    bad = small(Command::median_gap);
    bad.t_points = 1;
    bad.t_min = bad.t_max = 0.5;
    EXPECT_NO_THROW(bad.validate());
}

TEST(Serialization, CsvSchema)
{
    const auto out = execute(small(Command::median_gap));
    std::istringstream in(out.content);
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line, "t,residual,error_estimate");
    int rows = 0;
    while (std::getline(in, line)) {
        EXPECT_EQ(std::count(line.begin(), line.end(), ','), 2);
        ++rows;
    }
    EXPECT_EQ(rows, 5);
    EXPECT_LE(out.summary.max_abs_residual, 1e-8);
}

TEST(Serialization, JsonRoundTrip)
{
    const auto cfg = small(Command::deriva, OutputFormat::json);
    auto c2 = cfg;
    c2.measure = "perturbed_cosine(0.5)";
    const auto out = execute(c2);
    const auto doc = nlohmann::json::parse(out.content);
    EXPECT_EQ(doc.at("command"), "deriva");
    EXPECT_EQ(doc.at("measure"), "perturbed_cosine(0.5)");
    const auto rep = diagnostic_from_json(doc);
    const auto direct = scan(build_measure(PerturbedCosineSpec{0.5}), Diagnostic::deriva, linspace(-2, 2, 5));
    EXPECT_EQ(rep.t_grid, direct.t_grid);
    EXPECT_EQ(rep.residuals, direct.residuals);
    EXPECT_EQ(rep.max_abs_residual, direct.max_abs_residual);
    EXPECT_EQ(diagnostic_json(rep), diagnostic_json(direct));
}

TEST(Serialization, FormatNumberRoundTrips)
{
    for (double v : {0.1, -1e-300, 123456.789, 0.278062510602951}) EXPECT_EQ(std::stod(format_number(v)), v);
}

TEST(Execute, EveryCommandProducesOutput)
{
    for (const auto& [c, name] : kCommandNames) {
        auto cfg = small(c, OutputFormat::json);
        cfg.measure = "perturbed_quadratic(1)";
        if (c == Command::choquet_iterate) {
            cfg.steps = 2;
            cfg.choquet.grid_min = -20;
            cfg.choquet.grid_max = 20;
        }
        const auto out = execute(cfg);
        const auto doc = nlohmann::json::parse(out.content);
        EXPECT_EQ(doc.at("command"), std::string(name));
        EXPECT_TRUE(std::isfinite(out.summary.max_abs_residual)) << name;
    }
}

TEST(Execute, FullReportSections)
{
    auto cfg = small(Command::full_report, OutputFormat::json);
    const auto doc = nlohmann::json::parse(execute(cfg).content);
    for (const char* k : {"median_gap", "sign_kernel", "deriva", "mean_median", "symmetry", "lipschitz", "summary"})
        EXPECT_TRUE(doc.contains(k)) << k;
}

TEST(Execute, Deterministic)
{
    auto cfg = small(Command::symmetry_sweep, OutputFormat::json);
    cfg.measure = "gaussian_mixture(0.5,-1,0.5,1,1.5)";
    EXPECT_EQ(execute(cfg).content, execute(cfg).content);
}

TEST(Execute, ErrorClasses)
{
    auto cfg = small(Command::median_gap);
    cfg.measure = "perturbed_cosine(2)";
    try {
        execute(cfg);
        FAIL();
    } catch (const std::exception& e) {
        EXPECT_EQ(exit_code_for(e), kExitMeasure);
    }
    cfg = small(Command::median_gap);
    cfg.output_path = "/nonexistent/dir/out.csv";
    try {
        run(cfg);
        FAIL();
    } catch (const std::exception& e) {
        EXPECT_EQ(exit_code_for(e), kExitIo);
    }
    EXPECT_EQ(exit_code_for(BracketInvalid("x")), kExitNumerical);
    EXPECT_EQ(exit_code_for(std::logic_error("x")), kExitInternal);
}

TEST(Cli, SuccessAndSummaryLine)
{
    const auto out = scratch("cli.csv");
    const auto r = run_cli("median-gap --measure 'gaussian(0,1)' --t-points 7 --out " + out.string());
    EXPECT_EQ(r.code, 0);
    EXPECT_EQ(r.out.rfind("max|residual| = ", 0), 0u) << r.out;
    EXPECT_EQ(slurp(out).rfind("t,residual,error_estimate\n", 0), 0u);
}

TEST(Cli, ConfigFileWithOverride)
{
    const auto cfg = scratch("cfg.json");
    const auto out = scratch("cfg_out.json");
    std::ofstream(cfg) << R"j({"measure": "perturbed_cosine(0.5)", "t_range": [-1, 1], "t_points": 3,
                             "output_format": "json", "output_path": "ignored.json"})j";
    const auto r = run_cli("deriva --config " + cfg.string() + " --out " + out.string());
    ASSERT_EQ(r.code, 0);
    const auto doc = nlohmann::json::parse(slurp(out));
    EXPECT_EQ(doc.at("t").size(), 3u);
}

TEST(Cli, ExitCodes)
{
    const auto out = scratch("codes.csv").string();
    EXPECT_EQ(run_cli("").code, kExitConfig);
    EXPECT_EQ(run_cli("median-gap --bogus 1 --out " + out).code, kExitConfig);
    EXPECT_EQ(run_cli("median-gap --t-min 2 --t-max 1 --out " + out).code, kExitConfig);
    EXPECT_EQ(run_cli("median-gap --measure 'perturbed_cosine(1.5)' --out " + out).code, kExitMeasure);
    EXPECT_EQ(run_cli("median-gap --measure 'gaussian(0,1)' --t-points 3 --out /nonexistent/x.csv").code, kExitIo);
    EXPECT_EQ(run_cli("median-gap --measure 'gaussian(0,1)' --t-min 9 --t-max 10 --t-points 2 --out " + out).code,
              kExitNumerical);
}

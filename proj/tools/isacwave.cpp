// isacwave: run experiment scenarios, render plots, validate configs.

#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "isac/harness.hpp"

namespace h = isac::harness;

namespace {

enum Exit { kOk = 0, kConfig = 1, kNumerical = 2, kCheck = 3 };

struct RunArgs {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> trials;
    std::string out;
    int threads = 0;
    std::string format = "csv";
    bool check = false;
    bool plots = false;
};

int cmd_run(const RunArgs& a) {
    h::ExperimentConfig cfg = h::load_config(a.config);
    if (a.seed) cfg.root_seed = *a.seed;
    if (a.trials) {
        if (*a.trials < 1) throw h::ConfigError("trials", "must be >= 1");
        cfg.trials = *a.trials;
    }
    const std::string dir = !a.out.empty() ? a.out : !cfg.output_dir.empty() ? cfg.output_dir : h::default_output_dir();
    const auto records = h::run_scenario(cfg, {a.threads});

    std::filesystem::create_directories(dir);
    const std::string path = (std::filesystem::path(dir) / (cfg.scenario + "." + a.format)).string();
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    if (a.format == "json") h::write_json(records, out);
    else h::write_csv(records, out);
    std::cout << "wrote " << records.size() << " records to " << path << "\n";
    if (a.plots)
        for (const auto& p : h::emit_plots(records, dir)) std::cout << "wrote " << p << "\n";

    if (!a.check) return kOk;
    bool ok = true;
    for (const auto& c : h::check_records(cfg.scenario, records)) {
        std::cout << (c.pass ? "PASS " : "FAIL ") << c.name << (c.detail.empty() ? "" : " (" + c.detail + ")") << "\n";
        ok = ok && c.pass;
    }
    return ok ? kOk : kCheck;
}

int cmd_plot(const std::vector<std::string>& files, const std::string& out, const std::string& format) {
    std::vector<h::ResultRecord> all;
    for (const auto& f : files) {
        std::ifstream in(f);
        if (!in) throw std::runtime_error("cannot open " + f);
        auto rs = h::read_csv(in);
        all.insert(all.end(), rs.begin(), rs.end());
    }
    for (const auto& p : h::emit_plots(all, out.empty() ? h::default_output_dir() : out, format))
        std::cout << "wrote " << p << "\n";
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"isacwave: ISAC waveform experiment runner"};
    app.require_subcommand(1);

    RunArgs ra;
    auto* run = app.add_subcommand("run", "Run a scenario config and write its records");
    run->add_option("config", ra.config, "Scenario config (JSON)")->required();
    run->add_option("--seed", ra.seed, "Override the root seed");
    run->add_option("--trials", ra.trials, "Override trials per sweep point");
    run->add_option("--out", ra.out, "Output directory (default: $ISACWAVE_OUT_DIR or ./results)");
    run->add_option("--threads", ra.threads, "OpenMP threads (0 = runtime default)")->check(CLI::NonNegativeNumber);
    run->add_option("--format", ra.format, "Record format")->check(CLI::IsMember({"csv", "json"}));
    run->add_flag("--check", ra.check, "Evaluate the scenario's acceptance predicates");
    run->add_flag("--plots", ra.plots, "Also write SVG plots next to the records");

    std::vector<std::string> csvs;
    std::string plot_out, plot_format = "svg";
    auto* plot = app.add_subcommand("plot", "Render plot files from CSV records");
    plot->add_option("csv", csvs, "Record files")->required();
    plot->add_option("--out", plot_out, "Output directory");
    plot->add_option("--type", plot_format, "Plot file type")->check(CLI::IsMember({"svg", "dat"}));

    auto* list = app.add_subcommand("list-scenarios", "List the shipped scenario ids");

    std::string vcfg;
    auto* validate = app.add_subcommand("validate", "Check a config against the schema");
    validate->add_option("config", vcfg, "Scenario config (JSON)")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kConfig;
    }

    try {
        if (*run) return cmd_run(ra);
        if (*plot) return cmd_plot(csvs, plot_out, plot_format);
        if (*list) {
            for (const auto& s : h::scenarios()) std::cout << s.id << "\t" << s.title << "\n";
            return kOk;
        }
        if (*validate) {
            const auto cfg = h::load_config(vcfg);
            std::cout << vcfg << ": ok (" << cfg.scenario << ")\n";
            return kOk;
        }
    } catch (const h::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kConfig;
    } catch (const std::invalid_argument& e) {
        std::cerr << "invalid input: " << e.what() << "\n";
        return kConfig;
    } catch (const isac::NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return kNumerical;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kNumerical;
    }
    return kOk;
}

// ruin2d: config-driven experiments for the two-company renewal ruin model.
//
//   ruin2d <command> --config cfg.json [--out path] [--format csv|json]
//          [--seed n] [--workers n] [--trace]
//
// Exit codes: 0 success, 1 check failure, 2 config error, 3 numerical error.

#include <cstdio>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "ruin2d/commands.hpp"

namespace {

void write_table(const ruin2d::Table& t, const std::string& path, const std::string& format) {
    std::ofstream file;
    std::ostream* os = &std::cout;
    if (path != "-") {
        file.open(path, std::ios::binary);
        if (!file) throw ruin2d::ConfigError("output.path", "cannot write '" + path + "'");
        os = &file;
    }
    if (format == "json")
        ruin2d::write_json(*os, t);
    else
        ruin2d::write_csv(*os, t);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Two-company renewal ruin model: simulation versus asymptotic approximations"};
    app.require_subcommand(1, 1);

    std::string config_path, out_path, format, trace_path;
    std::optional<std::uint64_t> seed;
    std::optional<unsigned> workers;
    bool trace = false;

    for (const char* name : {"dist-check", "approx", "compare", "limitlaw", "lemma"}) {
        auto* sub = app.add_subcommand(name);
        sub->add_option("--config", config_path, "JSON experiment config")->required()->check(CLI::ExistingFile);
        sub->add_option("--out", out_path, "report path ('-' for stdout)");
        sub->add_option("--format", format, "report format")->check(CLI::IsMember({"csv", "json"}));
        sub->add_option("--seed", seed, "override run.seed");
        sub->add_option("--workers", workers, "override run.workers")->check(CLI::PositiveNumber);
        sub->add_flag("--trace", trace, "write per-event trace of the first paths (compare)");
        sub->add_option("--trace-out", trace_path, "trace CSV path (default: <out>.trace.csv or stderr)");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : ruin2d::kExitConfig;
    }
    const std::string command = app.get_subcommands().front()->get_name();

    try {
        auto cfg = ruin2d::load_config(config_path);
        // Precedence: flags over environment over file.
        ruin2d::apply_environment(cfg);
        if (!out_path.empty()) cfg.output.path = out_path;
        if (!format.empty()) cfg.output.format = format;
        if (seed) cfg.run.seed = *seed;
        if (workers) cfg.run.workers = *workers;
        if (trace) cfg.output.trace = true;
        if (!trace_path.empty()) cfg.output.trace_path = trace_path;

        std::vector<ruin2d::TraceRow> rows;
        const auto result = ruin2d::run_command(command, cfg, &rows);
        write_table(result.table, cfg.output.path, cfg.output.format);
        if (cfg.output.trace && command == "compare") {
            std::string tp = cfg.output.trace_path;
            if (tp.empty()) tp = cfg.output.path == "-" ? "" : cfg.output.path + ".trace.csv";
            if (tp.empty())
                ruin2d::write_csv(std::cerr, ruin2d::trace_table(rows));
            else
                write_table(ruin2d::trace_table(rows), tp, "csv");
        }
        for (const auto& line : result.table.summary) std::cerr << line << "\n";
        return result.exit_code;
    } catch (const std::exception& e) {
        std::cerr << "ruin2d " << command << ": " << e.what() << "\n";
        return ruin2d::exit_code_for(e);
    }
}

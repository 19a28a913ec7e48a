// vnlab: run <config.json> [--out DIR] | list

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "vnlab/errors.hpp"
#include "vnlab/experiments.hpp"

#ifndef VNLAB_VERSION
#define VNLAB_VERSION "unknown"
#endif

namespace fs = std::filesystem;

namespace {

constexpr int kValidation = 2;
constexpr int kNumerical = 3;

unsigned thread_budget() {
    unsigned n = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("TOOL_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v > 0) n = std::min<unsigned>(n, unsigned(v));
    }
    return n;
}

bool write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    out << content;
    return bool(out);
}

int run(const std::string& config_path, const std::string& out_flag) {
    std::ifstream in(config_path);
    if (!in) {
        std::cerr << "vnlab: cannot read " << config_path << '\n';
        return kValidation;
    }
    vnlab::ExperimentConfig cfg;
    vnlab::ExperimentResult result;
    try {
        std::stringstream buf;
        buf << in.rdbuf();
        cfg = vnlab::parse_config(nlohmann::json::parse(buf.str()));
        result = vnlab::run_experiment(cfg, thread_budget());
    } catch (const nlohmann::json::parse_error& e) {
        std::cerr << "vnlab: malformed JSON: " << e.what() << '\n';
        return kValidation;
    } catch (const vnlab::Error& e) {
        std::cerr << "vnlab: " << e.what() << '\n';
        return e.is_numerical() ? kNumerical : kValidation;
    }

    fs::path dir = !out_flag.empty() ? fs::path(out_flag) : fs::path(cfg.output_dir.value_or("."));
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) {
        std::cerr << "vnlab: cannot create " << dir << ": " << ec.message() << '\n';
        return kValidation;
    }
    for (const auto& a : result.csvs)
        if (!write_file(dir / a.name, a.content)) {
            std::cerr << "vnlab: cannot write " << (dir / a.name) << '\n';
            return kValidation;
        }
    const auto doc = vnlab::result_document(cfg, result, VNLAB_VERSION);
    if (!write_file(dir / "result.json", doc.dump(2) + "\n")) {
        std::cerr << "vnlab: cannot write " << (dir / "result.json") << '\n';
        return kValidation;
    }
    std::cout << cfg.kind << ": verdict " << (result.verdict ? "true" : "false") << ", wrote " << dir.string()
              << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"von Neumann algebra control experiments"};
    app.set_version_flag("--version", std::string(VNLAB_VERSION));
    app.require_subcommand(1);

    std::string config_path, out_dir;
    auto* run_cmd = app.add_subcommand("run", "run the experiment described by a JSON config");
    run_cmd->add_option("config", config_path, "experiment config")->required();
    run_cmd->add_option("--out", out_dir, "output directory (overrides output_dir in the config)");
    auto* list_cmd = app.add_subcommand("list", "list experiment kinds and their fields");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kValidation;
    }
    if (list_cmd->parsed()) {
        std::cout << vnlab::list_experiments();
        return 0;
    }
    return run(config_path, out_dir);
}

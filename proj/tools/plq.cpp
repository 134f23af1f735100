#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "plq/scenario.hpp"

namespace fs = std::filesystem;

namespace {

std::string utc_timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::string read_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw plq::ConfigError("--config", "cannot open '" + path + "'");
    std::ostringstream s;
    s << f.rdbuf();
    return s.str();
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Chiral bound states and spin dynamics in phononic cavity lattices"};
    std::vector<std::string> presets;
    std::string config_path;
    std::string out_dir = "out";
    std::optional<std::uint64_t> seed;
    std::vector<std::string> overrides;
    bool list = false;
    app.add_option("-p,--preset", presets, "preset or preset group (repeatable)");
    app.add_option("-c,--config", config_path, "JSON configuration file");
    app.add_option("-o,--out", out_dir, "output directory")->capture_default_str();
    app.add_option("-s,--seed", seed, "master seed for disorder ensembles");
    app.add_option("--set", overrides, "override a config value, e.g. --set lattice.delta=0.4");
    app.add_flag("--list-presets", list, "list built-in presets and exit");
    CLI11_PARSE(app, argc, argv);

    try {
        if (list) {
            for (const auto& name : plq::preset_names()) {
                const plq::Json cfg = plq::preset_config(name);
                std::printf("%-12s %s\n", name.c_str(), cfg.at("task").get<std::string>().c_str());
            }
            return 0;
        }
        if (presets.empty() == config_path.empty())
            throw plq::ConfigError("", "give exactly one of --preset or --config (see --list-presets)");

        std::vector<plq::Json> configs;
        if (!config_path.empty()) {
            plq::Json cfg = plq::parse_config(read_file(config_path), config_path);
            if (cfg.is_object() && !cfg.contains("name")) cfg["name"] = fs::path(config_path).stem().string();
            configs.push_back(std::move(cfg));
        } else {
            for (const auto& p : presets)
                for (const auto& leaf : plq::resolve_preset(p)) configs.push_back(plq::preset_config(leaf));
        }

        plq::Json manifest = {{"created_utc", utc_timestamp()}, {"runs", plq::Json::array()}};
        for (auto& cfg : configs) {
            for (const auto& o : overrides) plq::apply_override(cfg, o);
            if (seed && cfg.is_object() && cfg.contains("disorder")) cfg["seed"] = *seed;
            const std::string name = cfg.is_object() ? cfg.value("name", std::string("config")) : "config";
            std::fprintf(stderr, "running %s\n", name.c_str());
            const plq::RunOutput r = plq::run_scenario(cfg, fs::path(out_dir) / name);
            {
                std::ofstream f(fs::path(out_dir) / name / "config.json", std::ios::binary);
                f << r.config.dump(2) << '\n';
            }
            std::vector<std::string> files = r.files;
            files.push_back("config.json");
            plq::Json entry = {{"name", name}, {"directory", name}, {"config", r.config}, {"files", files}};
            if (r.summary.is_object() && r.summary.contains("seeds")) entry["realization_seeds"] = r.summary["seeds"];
            manifest["runs"].push_back(std::move(entry));
        }
        std::ofstream f(fs::path(out_dir) / "manifest.json", std::ios::binary);
        f << manifest.dump(2) << '\n';
        return 0;
    } catch (const plq::ConfigError& e) {
        std::fprintf(stderr, "plq: configuration error: %s\n", e.what());
        return 2;
    } catch (const plq::InvalidArgument& e) {
        std::fprintf(stderr, "plq: invalid argument: %s\n", e.what());
        return 2;
    } catch (const plq::NumericalError& e) {
        std::fprintf(stderr, "plq: numerical error: %s\n", e.what());
        return 3;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "plq: %s\n", e.what());
        return 1;
    }
}

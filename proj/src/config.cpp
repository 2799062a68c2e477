#include "entroscale/config.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "entroscale/error.hpp"

namespace entroscale::cli {
namespace {

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

std::uint64_t parse_u64(const std::string& key, const std::string& value) {
    if (value.empty() || value[0] == '-')
        throw Error(ErrorCode::ConfigError, key + " expects a non-negative integer");
    char* end = nullptr;
    std::uint64_t v = std::strtoull(value.c_str(), &end, 10);
    if (!end || *end != '\0')
        throw Error(ErrorCode::ConfigError, key + " expects an integer, got '" + value + "'");
    return v;
}

double parse_real(const std::string& key, const std::string& value) {
    char* end = nullptr;
    double v = std::strtod(value.c_str(), &end);
    if (value.empty() || !end || *end != '\0')
        throw Error(ErrorCode::ConfigError, key + " expects a number, got '" + value + "'");
    return v;
}

std::vector<std::size_t> parse_size_list(const std::string& key, const std::string& value) {
    std::vector<std::size_t> out;
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty())
            throw Error(ErrorCode::ConfigError, key + " has an empty list entry");
        out.push_back(std::size_t(parse_u64(key, item)));
    }
    if (out.empty()) throw Error(ErrorCode::ConfigError, key + " expects a non-empty list");
    return out;
}

} // namespace

void apply_config_line(ExperimentConfig& cfg, const std::string& key, const std::string& value) {
    auto u64 = [&] { return parse_u64(key, value); };
    auto cnt = [&] { return std::size_t(parse_u64(key, value)); };
    auto real = [&] { return parse_real(key, value); };

    if (key == "seed") cfg.seed = u64();
    else if (key == "out_dir") cfg.out_dir = value;
    else if (key == "d") cfg.d = cnt();
    else if (key == "d_r") cfg.d_r = cnt();
    else if (key == "d_key") cfg.d_key = cnt();
    else if (key == "q_rows") cfg.q_rows = cnt();
    else if (key == "trials") cfg.trials = cnt();
    else if (key == "sizes") cfg.sizes = parse_size_list(key, value);
    else if (key == "train_tokens") cfg.train_tokens = cnt();
    else if (key == "verify_sizes") cfg.verify_sizes = parse_size_list(key, value);
    else if (key == "decomp_cases") cfg.decomp_cases = cnt();
    else if (key == "moment_grid") cfg.moment_grid = cnt();
    else if (key == "toy_patch") cfg.toy_patch = cnt();
    else if (key == "toy_d_model") cfg.toy_d_model = cnt();
    else if (key == "toy_d_key") cfg.toy_d_key = cnt();
    else if (key == "toy_d_ff") cfg.toy_d_ff = cnt();
    else if (key == "toy_layers") cfg.toy_layers = cnt();
    else if (key == "toy_d_sin") cfg.toy_d_sin = cnt();
    else if (key == "toy_diff_steps") cfg.toy_diff_steps = cnt();
    else if (key == "toy_beta_start") cfg.toy_beta_start = real();
    else if (key == "toy_beta_end") cfg.toy_beta_end = real();
    else if (key == "toy_train_steps") cfg.toy_train_steps = cnt();
    else if (key == "toy_batch") cfg.toy_batch = cnt();
    else if (key == "toy_lr") cfg.toy_lr = real();
    else if (key == "toy_momentum") cfg.toy_momentum = real();
    else if (key == "toy_image_size") cfg.toy_image_size = cnt();
    else if (key == "checkpoint") cfg.checkpoint = value;
    else if (key == "height") cfg.height = cnt();
    else if (key == "width") cfg.width = cnt();
    else if (key == "policy") {
        if (value != "fixed" && value != "scaled")
            throw Error(ErrorCode::ConfigError, "policy must be 'fixed' or 'scaled'");
        cfg.policy = value;
    } else {
        throw Error(ErrorCode::ConfigError, "unknown config key '" + key + "'");
    }
}

void load_config_file(ExperimentConfig& cfg, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::IoError, "cannot read config file: " + path);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        std::size_t eq = t.find('=');
        if (eq == std::string::npos)
            throw Error(ErrorCode::ConfigError,
                        path + ":" + std::to_string(lineno) + ": expected key=value");
        apply_config_line(cfg, trim(t.substr(0, eq)), trim(t.substr(eq + 1)));
    }
}

} // namespace entroscale::cli

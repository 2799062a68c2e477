#include "entroscale/commands.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include "entroscale/attention.hpp"
#include "entroscale/checkpoint.hpp"
#include "entroscale/entropy_theory.hpp"
#include "entroscale/error.hpp"
#include "entroscale/textio.hpp"
#include "entroscale/toy_diffusion.hpp"

namespace entroscale::cli {
namespace {

using attention::ScalePolicy;

// Stream map for RngStream(seed).split(tag). Tags are reserved per purpose so
// no two draws within a command ever share a stream:
//   1          query matrix construction
//   10, 11     fixed / scaled N-scans
//   100 + i    decomposition identity case i
//   200 + k    Monte Carlo verification at size index k
//   2000       training (splits further internally)
//   3000       sampling
constexpr std::uint64_t kTagQueries = 1;
constexpr std::uint64_t kTagScanFixed = 10;
constexpr std::uint64_t kTagScanScaled = 11;
constexpr std::uint64_t kTagDecomp = 100;
constexpr std::uint64_t kTagVerifyMc = 200;
constexpr std::uint64_t kTagTrain = 2000;
constexpr std::uint64_t kTagSample = 3000;

void ensure_out_dir(const ExperimentConfig& cfg) {
    std::error_code ec;
    std::filesystem::create_directories(cfg.out_dir, ec);
    if (ec || !std::filesystem::is_directory(cfg.out_dir))
        throw Error(ErrorCode::IoError, "cannot create output directory: " + cfg.out_dir);
}

std::string out_path(const ExperimentConfig& cfg, const std::string& name) {
    return cfg.out_dir + "/" + name;
}

// Isotropic token model: mu = 0, Sigma = I_d, W projecting onto the first
// d_r coordinates. With +/-1 query entries this pins the score variance to
// lambda^2 * d_r, so the fixed factor 1/sqrt(d_key) gives sigma^2 = d_r/d_key.
theory::GaussianTokenModel reference_model(const ExperimentConfig& cfg) {
    theory::GaussianTokenModel model;
    model.mu_x.assign(cfg.d, 0.0);
    model.sigma_x = Matrix::identity(cfg.d);
    model.w_k = Matrix::eye(cfg.d, cfg.d_r);
    return model;
}

Matrix reference_queries(const ExperimentConfig& cfg) {
    RngStream rng = RngStream(cfg.seed).split(kTagQueries);
    Matrix q(cfg.q_rows, cfg.d_r);
    for (std::size_t i = 0; i < q.size(); ++i)
        q.data()[i] = rng.next_uniform() < 0.5 ? -1.0 : 1.0;
    return q;
}

void validate_theory_config(const ExperimentConfig& cfg) {
    if (cfg.trials < 2) throw Error(ErrorCode::ConfigError, "trials must be >= 2");
    if (cfg.d < 1 || cfg.d_r < 1 || cfg.d_key < 1)
        throw Error(ErrorCode::ConfigError, "model dimensions must be >= 1");
    if (cfg.q_rows < 1) throw Error(ErrorCode::ConfigError, "q_rows must be >= 1");
}

std::string pass_cell(bool ok) { return ok ? "1" : "0"; }

diffusion::TrainConfig toy_config(const ExperimentConfig& cfg) {
    diffusion::TrainConfig tc;
    tc.image_size = cfg.toy_image_size;
    tc.train_steps = cfg.toy_train_steps;
    tc.batch = cfg.toy_batch;
    tc.lr = cfg.toy_lr;
    tc.momentum = cfg.toy_momentum;
    tc.diff_steps = cfg.toy_diff_steps;
    tc.beta_start = cfg.toy_beta_start;
    tc.beta_end = cfg.toy_beta_end;
    tc.net.patch = cfg.toy_patch;
    tc.net.d_model = cfg.toy_d_model;
    tc.net.d_key = cfg.toy_d_key;
    tc.net.d_ff = cfg.toy_d_ff;
    tc.net.n_layers = cfg.toy_layers;
    tc.net.d_sin = cfg.toy_d_sin;
    return tc;
}

void validate_toy_config(const ExperimentConfig& cfg) {
    if (cfg.toy_patch < 1) throw Error(ErrorCode::ConfigError, "toy_patch must be >= 1");
    if (cfg.toy_image_size < cfg.toy_patch || cfg.toy_image_size % cfg.toy_patch != 0)
        throw Error(ErrorCode::ConfigError, "toy_image_size must be a multiple of toy_patch");
    if (cfg.toy_layers < 1) throw Error(ErrorCode::ConfigError, "toy_layers must be >= 1");
    if (cfg.toy_d_sin < 2 || cfg.toy_d_sin % 2 != 0)
        throw Error(ErrorCode::ConfigError, "toy_d_sin must be even and >= 2");
    if (cfg.toy_batch < 1) throw Error(ErrorCode::ConfigError, "toy_batch must be >= 1");
    if (!(cfg.toy_momentum >= 0.0) || cfg.toy_momentum >= 1.0)
        throw Error(ErrorCode::ConfigError, "toy_momentum must be in [0, 1)");
    if (!std::isfinite(cfg.toy_lr) || cfg.toy_lr < 0.0)
        throw Error(ErrorCode::ConfigError, "toy_lr must be a finite non-negative number");
    if (cfg.toy_diff_steps < 2)
        throw Error(ErrorCode::ConfigError, "toy_diff_steps must be >= 2");
    if (!(cfg.toy_beta_start > 0.0) || !(cfg.toy_beta_end >= cfg.toy_beta_start) ||
        !(cfg.toy_beta_end < 1.0))
        throw Error(ErrorCode::ConfigError, "toy betas must satisfy 0 < start <= end < 1");
}

ScalePolicy::Kind policy_kind(const ExperimentConfig& cfg) {
    return cfg.policy == "scaled" ? ScalePolicy::Kind::EntropyPreserving
                                  : ScalePolicy::Kind::Fixed;
}

std::string scan_csv(const theory::ScanResult& scan) {
    CsvTable table;
    table.header = {"n", "ln_n", "lambda", "mean_entropy", "stderr"};
    for (const auto& row : scan.rows)
        table.add_row({std::to_string(row.n), format_g17(row.log_n), format_g17(row.lambda),
                       format_g17(row.mean_entropy), format_g17(row.stderr_)});
    table.footer_comments.push_back("fit slope=" + format_g17(scan.fit.slope) +
                                    " intercept=" + format_g17(scan.fit.intercept) +
                                    " r2=" + format_g17(scan.fit.r_squared));
    return table.render();
}

int exit_code_for(const Error& e) {
    switch (e.code()) {
        case ErrorCode::ConfigError:
        case ErrorCode::IncompatibleResolution: return 2;
        case ErrorCode::IoError: return 3;
        case ErrorCode::CheckpointError: return 4;
        default: return 1;
    }
}

} // namespace

int cmd_verify_theory(const ExperimentConfig& cfg) {
    validate_theory_config(cfg);
    if (cfg.decomp_cases < 1)
        throw Error(ErrorCode::ConfigError, "decomp_cases must be >= 1");
    if (cfg.moment_grid < 2)
        throw Error(ErrorCode::ConfigError, "moment_grid must be >= 2");
    if (cfg.verify_sizes.empty())
        throw Error(ErrorCode::ConfigError, "verify_sizes must be non-empty");
    ensure_out_dir(cfg);

    CsvTable table;
    table.header = {"check_name", "n", "predicted", "measured", "stderr", "pass"};
    bool all_pass = true;

    // Empirical decomposition identity, random instances of every size.
    {
        double worst = 0.0;
        for (std::size_t i = 0; i < cfg.decomp_cases; ++i) {
            RngStream rng = RngStream(cfg.seed).split(kTagDecomp + i);
            std::size_t n = 1 + std::size_t(rng.next_uniform() * 512.0);
            if (n > 512) n = 512;
            double lambda = 0.5 * rng.next_uniform();
            double key_scale = 0.5 + 2.0 * rng.next_uniform();
            std::vector<double> q(8);
            for (double& v : q) v = rng.next_gaussian();
            Matrix keys(n, 8);
            for (std::size_t j = 0; j < keys.size(); ++j)
                keys.data()[j] = key_scale * rng.next_gaussian();
            auto terms = theory::empirical_decomposition(q, keys, lambda);
            double lhs = terms.log_n + terms.log_mean_exp - terms.tilted_mean_ratio;
            double rel = std::fabs(lhs - terms.exact_entropy) /
                         std::max(1.0, std::fabs(terms.exact_entropy));
            if (rel > worst) worst = rel;
        }
        bool ok = worst <= 1e-9;
        all_pass = all_pass && ok;
        table.add_row({"decomposition_identity", std::to_string(cfg.decomp_cases), format_g17(0.0),
                       format_g17(worst), format_g17(0.0), pass_cell(ok)});
    }

    // Closed-form Gaussian exp moments against the quadrature oracle.
    {
        std::size_t g = cfg.moment_grid;
        double worst_exp = 0.0, worst_yexp = 0.0;
        for (std::size_t a = 0; a < g; ++a)
            for (std::size_t b = 0; b < g; ++b) {
                theory::RowMoments m;
                m.mu = -3.0 + 6.0 * double(a) / double(g - 1);
                m.sigma2 = 4.0 * double(b) / double(g - 1);
                auto closed = theory::gaussian_exp_moments(m);
                auto quad = theory::gaussian_exp_moments_quadrature(m);
                double re = std::fabs(closed.e_exp - quad.e_exp) / std::fabs(quad.e_exp);
                double ry = std::fabs(closed.e_yexp - quad.e_yexp) / std::fabs(quad.e_yexp);
                if (re > worst_exp) worst_exp = re;
                if (ry > worst_yexp) worst_yexp = ry;
            }
        bool ok_exp = worst_exp <= 1e-8;
        bool ok_yexp = worst_yexp <= 1e-8;
        all_pass = all_pass && ok_exp && ok_yexp;
        std::string n_cell = std::to_string(g * g);
        table.add_row({"moment_quadrature_exp", n_cell, format_g17(0.0), format_g17(worst_exp),
                       format_g17(0.0), pass_cell(ok_exp)});
        table.add_row({"moment_quadrature_yexp", n_cell, format_g17(0.0), format_g17(worst_yexp),
                       format_g17(0.0), pass_cell(ok_yexp)});
    }

    // Entropy law: Monte Carlo mean against ln N - sigma^2/2.
    {
        theory::GaussianTokenModel model = reference_model(cfg);
        Matrix q = reference_queries(cfg);
        theory::KeyDistribution kd = theory::key_distribution(model);
        double lambda =
            attention::scale_factor(ScalePolicy::fixed(), cfg.train_tokens, cfg.d_key);
        for (std::size_t k = 0; k < cfg.verify_sizes.size(); ++k) {
            std::size_t n = cfg.verify_sizes[k];
            double predicted = 0.0;
            for (std::size_t i = 0; i < q.rows(); ++i) {
                std::span<const double> qi(q.row_ptr(i), q.cols());
                predicted += theory::predicted_entropy(n, theory::row_moments(qi, lambda, kd));
            }
            predicted /= double(q.rows());
            auto mc = theory::monte_carlo_entropy(model, q, n, lambda, cfg.trials,
                                                  RngStream(cfg.seed).split(kTagVerifyMc + k));
            double tol = std::max(3.0 * mc.stderr_, 0.05);
            bool ok = std::fabs(mc.mean - predicted) <= tol;
            all_pass = all_pass && ok;
            table.add_row({"entropy_law", std::to_string(n), format_g17(predicted),
                           format_g17(mc.mean), format_g17(mc.stderr_), pass_cell(ok)});
        }
    }

    write_text_file(out_path(cfg, "theory.csv"), table.render());
    return all_pass ? 0 : 1;
}

int cmd_entropy_scan(const ExperimentConfig& cfg) {
    validate_theory_config(cfg);
    if (cfg.sizes.size() < 2)
        throw Error(ErrorCode::ConfigError, "entropy scan needs at least two sizes");
    for (std::size_t i = 0; i < cfg.sizes.size(); ++i) {
        if (cfg.sizes[i] < 4)
            throw Error(ErrorCode::ConfigError, "scan sizes must be >= 4");
        if (i > 0 && cfg.sizes[i] <= cfg.sizes[i - 1])
            throw Error(ErrorCode::ConfigError, "scan sizes must be strictly ascending");
    }
    if (cfg.train_tokens < 2)
        throw Error(ErrorCode::ConfigError, "train_tokens must be >= 2");
    ensure_out_dir(cfg);

    theory::GaussianTokenModel model = reference_model(cfg);
    Matrix q = reference_queries(cfg);

    auto fixed = theory::entropy_logN_scan(model, q, ScalePolicy::fixed(), cfg.d_key, cfg.sizes,
                                           cfg.trials, RngStream(cfg.seed).split(kTagScanFixed));
    auto scaled = theory::entropy_logN_scan(model, q, ScalePolicy::entropy_preserving(cfg.train_tokens),
                                            cfg.d_key, cfg.sizes, cfg.trials,
                                            RngStream(cfg.seed).split(kTagScanScaled));

    write_text_file(out_path(cfg, "scan_fixed.csv"), scan_csv(fixed));
    write_text_file(out_path(cfg, "scan_scaled.csv"), scan_csv(scaled));

    SvgSeries sf, ss;
    sf.label = "fixed";
    sf.color = "#1f77b4";
    sf.has_fit = true;
    sf.fit_slope = fixed.fit.slope;
    sf.fit_intercept = fixed.fit.intercept;
    for (const auto& row : fixed.rows) sf.points.emplace_back(row.log_n, row.mean_entropy);
    ss.label = "scaled";
    ss.color = "#d62728";
    ss.has_fit = true;
    ss.fit_slope = scaled.fit.slope;
    ss.fit_intercept = scaled.fit.intercept;
    for (const auto& row : scaled.rows) ss.points.emplace_back(row.log_n, row.mean_entropy);
    write_text_file(out_path(cfg, "scan.svg"),
                    render_svg_chart("ln N", "mean entropy (nats)", {sf, ss}));
    return 0;
}

int cmd_train_toy(const ExperimentConfig& cfg) {
    validate_toy_config(cfg);
    ensure_out_dir(cfg);

    diffusion::TrainConfig tc = toy_config(cfg);
    std::size_t img = cfg.toy_image_size;
    diffusion::DataGenerator gen = [img](RngStream& rng) {
        return diffusion::two_blob_image(img, rng);
    };
    diffusion::TrainState state =
        diffusion::train(tc, gen, RngStream(cfg.seed).split(kTagTrain));

    CsvTable loss;
    loss.header = {"step", "loss"};
    for (std::size_t i = 0; i < state.loss_history.size(); ++i)
        loss.add_row({std::to_string(i), format_g17(state.loss_history[i])});
    write_text_file(out_path(cfg, "loss.csv"), loss.render());
    diffusion::save_checkpoint(cfg.checkpoint_path(), state);
    return state.aborted ? 1 : 0;
}

int cmd_sample_toy(const ExperimentConfig& cfg) {
    ensure_out_dir(cfg);
    diffusion::TrainState state = diffusion::load_checkpoint(cfg.checkpoint_path());

    std::size_t patch = state.params.cfg.patch;
    if (cfg.height < patch || cfg.width < patch || cfg.height % patch != 0 ||
        cfg.width % patch != 0)
        throw Error(ErrorCode::ConfigError,
                    "height/width must be positive multiples of the checkpoint patch size");

    RngStream rng = RngStream(cfg.seed).split(kTagSample);
    diffusion::SampleResult res =
        diffusion::sample(state, cfg.height, cfg.width, policy_kind(cfg), rng);

    CsvTable trace;
    trace.header = {"timestep", "layer_id", "n_tokens", "policy", "mean_entropy"};
    for (const auto& rec : res.trace)
        trace.add_row({std::to_string(rec.timestep), std::to_string(rec.layer_id),
                       std::to_string(rec.n_tokens),
                       rec.policy == ScalePolicy::Kind::Fixed ? "fixed" : "scaled",
                       format_g17(rec.mean_entropy)});
    write_text_file(out_path(cfg, "entropy_trace.csv"), trace.render());
    write_text_file(out_path(cfg, "sample.pgm"), render_pgm(res.image));
    return 0;
}

namespace {

const char kUsage[] =
    "usage: entroscale <verify-theory|entropy-scan|train-toy|sample-toy>"
    " [--config FILE] [--KEY VALUE]...\n";

} // namespace

int run_cli(int argc, const char* const* argv) {
    if (argc < 2) {
        std::fputs(kUsage, stderr);
        return 2;
    }
    std::string command = argv[1];

    ExperimentConfig cfg;
    std::vector<std::pair<std::string, std::string>> overrides;
    std::string config_file;
    try {
        for (int i = 2; i < argc; ++i) {
            std::string arg = argv[i];
            if (arg.rfind("--", 0) != 0)
                throw Error(ErrorCode::ConfigError, "expected --key, got '" + arg + "'");
            if (i + 1 >= argc)
                throw Error(ErrorCode::ConfigError, "missing value for '" + arg + "'");
            std::string key = arg.substr(2);
            std::string value = argv[++i];
            if (key == "config") config_file = value;
            else overrides.emplace_back(key, value);
        }
        if (!config_file.empty()) load_config_file(cfg, config_file);
        for (const auto& [key, value] : overrides) apply_config_line(cfg, key, value);

        if (command == "verify-theory") return cmd_verify_theory(cfg);
        if (command == "entropy-scan") return cmd_entropy_scan(cfg);
        if (command == "train-toy") return cmd_train_toy(cfg);
        if (command == "sample-toy") return cmd_sample_toy(cfg);
        std::fputs(kUsage, stderr);
        return 2;
    } catch (const Error& e) {
        std::fprintf(stderr, "entroscale: %s\n", e.what());
        return exit_code_for(e);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "entroscale: %s\n", e.what());
        return 1;
    }
}

} // namespace entroscale::cli

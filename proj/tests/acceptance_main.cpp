// Release gate: one check per line, spec'd tolerances baked in, nonzero exit
// on any failure. Each criterion is self-contained and timed.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "entroscale/attention.hpp"
#include "entroscale/entropy_theory.hpp"
#include "entroscale/error.hpp"
#include "entroscale/matrix.hpp"
#include "entroscale/rng.hpp"
#include "entroscale/toy_diffusion.hpp"

using namespace entroscale;
using attention::ScalePolicy;
using Kind = ScalePolicy::Kind;

namespace {

struct Gate {
    int failures = 0;

    void run(int id, const char* what, double budget_seconds,
             const std::function<bool(std::string&)>& body) {
        std::string detail;
        auto start = std::chrono::steady_clock::now();
        bool ok = false;
        try {
            ok = body(detail);
        } catch (const std::exception& e) {
            detail = std::string("exception: ") + e.what();
        }
        double elapsed =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (budget_seconds > 0.0 && elapsed > budget_seconds) {
            ok = false;
            detail += detail.empty() ? "" : "; ";
            detail += "over time budget";
        }
        std::printf("%s criterion %2d: %s (%.1fs)%s%s\n", ok ? "PASS" : "FAIL", id, what,
                    elapsed, detail.empty() ? "" : " -- ", detail.c_str());
        std::fflush(stdout);
        if (!ok) ++failures;
    }
};

Matrix random_matrix(std::size_t r, std::size_t c, RngStream& rng) {
    Matrix m(r, c);
    for (std::size_t i = 0; i < m.size(); ++i) m.data()[i] = rng.next_gaussian();
    return m;
}

theory::GaussianTokenModel isotropic_model(std::size_t d) {
    theory::GaussianTokenModel model;
    model.mu_x.assign(d, 0.0);
    model.sigma_x = Matrix::identity(d);
    model.w_k = Matrix::identity(d);
    return model;
}

Matrix sign_queries(std::size_t rows, std::size_t d, RngStream& rng) {
    Matrix q(rows, d);
    for (std::size_t i = 0; i < q.size(); ++i)
        q.data()[i] = rng.next_uniform() < 0.5 ? -1.0 : 1.0;
    return q;
}

const diffusion::TrainState& reference_training() {
    static diffusion::TrainState state = [] {
        diffusion::TrainConfig cfg; // 8x8 images, 500 steps, reference net
        auto gen = [&cfg](RngStream& rng) { return diffusion::two_blob_image(cfg.image_size, rng); };
        return diffusion::train(cfg, gen, RngStream(42).split(2000));
    }();
    return state;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in.good()) return std::string("<unreadable:") + path + ">";
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

int run_cli(const std::string& args) {
    std::string cmd =
        std::string("\"") + ENTROSCALE_CLI_PATH + "\" " + args + " > acc_scratch/cli.log 2>&1";
    int status = std::system(cmd.c_str());
    return status == -1 ? -1 : WEXITSTATUS(status);
}

} // namespace

int main() {
    Gate gate;

    gate.run(1, "entropy decomposition identity within 1e-9 over 1000 random cases", 5.0,
             [](std::string& detail) {
                 double worst = 0.0;
                 for (std::size_t i = 0; i < 1000; ++i) {
                     RngStream rng = RngStream(2026).split(i);
                     std::size_t n = 1 + (rng.next_u64() % 512);
                     double lambda = 0.5 * rng.next_uniform();
                     double key_scale = 0.5 + 2.0 * rng.next_uniform();
                     Matrix keys = random_matrix(n, 8, rng);
                     for (std::size_t j = 0; j < keys.size(); ++j) keys.data()[j] *= key_scale;
                     Matrix qm = random_matrix(1, 8, rng);
                     std::vector<double> q(qm.data(), qm.data() + 8);
                     auto terms = theory::empirical_decomposition(q, keys, lambda);
                     double lhs = terms.log_n + terms.log_mean_exp - terms.tilted_mean_ratio;
                     double rel = std::fabs(lhs - terms.exact_entropy) /
                                  std::max(1.0, std::fabs(terms.exact_entropy));
                     worst = std::max(worst, rel);
                 }
                 detail = "worst rel " + std::to_string(worst);
                 return worst <= 1e-9;
             });

    gate.run(2, "closed-form tilted moments match quadrature to 1e-8 on a 100-point grid", 5.0,
             [](std::string& detail) {
                 double worst = 0.0;
                 for (int a = 0; a < 10; ++a)
                     for (int b = 0; b < 10; ++b) {
                         theory::RowMoments m;
                         m.mu = -3.0 + 6.0 * a / 9.0;
                         m.sigma2 = 4.0 * b / 9.0;
                         auto closed = theory::gaussian_exp_moments(m);
                         auto quad = theory::gaussian_exp_moments_quadrature(m);
                         double r1 = std::fabs(quad.e_exp - closed.e_exp) /
                                     std::max(1e-300, std::fabs(closed.e_exp));
                         double r2 = std::fabs(quad.e_yexp - closed.e_yexp) /
                                     std::max(1.0, std::fabs(closed.e_yexp));
                         worst = std::max({worst, r1, r2});
                     }
                 detail = "worst rel " + std::to_string(worst);
                 return worst <= 1e-8;
             });

    gate.run(3, "measured entropy sits on ln N - 1/2 for a unit-variance score model", 60.0,
             [](std::string& detail) {
                 const std::size_t d = 64;
                 auto model = isotropic_model(d);
                 RngStream qrng = RngStream(42).split(1);
                 Matrix q = sign_queries(4, d, qrng);
                 double lambda = attention::scale_factor(ScalePolicy::fixed(), 0, d);
                 bool ok = true;
                 std::size_t idx = 0;
                 for (std::size_t n : {1024ul, 2048ul, 4096ul}) {
                     auto mc = theory::monte_carlo_entropy(model, q, n, lambda, 200,
                                                           RngStream(42).split(200 + idx));
                     double predicted = std::log(double(n)) - 0.5;
                     double diff = std::fabs(mc.mean - predicted);
                     if (diff > std::max(3.0 * mc.stderr_, 0.05)) ok = false;
                     detail += (idx ? " " : "") + std::to_string(n) + ":" +
                               std::to_string(diff).substr(0, 8);
                     ++idx;
                 }
                 return ok;
             });

    // Shared scans for criteria 4 and 5, reference sizes and streams.
    const std::vector<std::size_t> sizes = {64, 128, 256, 512, 1024, 2048, 4096};
    auto model = isotropic_model(64);
    RngStream qrng = RngStream(42).split(1);
    Matrix q = sign_queries(4, 64, qrng);
    auto fixed_scan = theory::entropy_logN_scan(model, q, ScalePolicy::fixed(), 64, sizes, 200,
                                                RngStream(42).split(10));
    auto scaled_scan =
        theory::entropy_logN_scan(model, q, ScalePolicy::entropy_preserving(512), 64, sizes,
                                  200, RngStream(42).split(11));

    gate.run(4, "fixed-scale entropy grows like ln N: slope in [0.95,1.05], r2 >= 0.999", 0.0,
             [&](std::string& detail) {
                 detail = "slope " + std::to_string(fixed_scan.fit.slope) + ", r2 " +
                          std::to_string(fixed_scan.fit.r_squared);
                 return fixed_scan.fit.slope >= 0.95 && fixed_scan.fit.slope <= 1.05 &&
                        fixed_scan.fit.r_squared >= 0.999;
             });

    gate.run(5, "rescaling flattens entropy growth and corrects each row directionally", 0.0,
             [&](std::string& detail) {
                 bool flatter = std::fabs(scaled_scan.fit.slope) < fixed_scan.fit.slope;
                 std::size_t violations = 0;
                 RngStream rng(77, 0);
                 int done = 0;
                 while (done < 200) {
                     std::size_t n = 16ul << (rng.next_u64() % 7);
                     std::size_t t = 16ul << (rng.next_u64() % 7);
                     if (n == t) continue;
                     ++done;
                     Matrix qq = random_matrix(n, 8, rng);
                     Matrix kk = random_matrix(n, 8, rng);
                     double lf = attention::scale_factor(ScalePolicy::fixed(), n, 8);
                     double ls =
                         attention::scale_factor(ScalePolicy::entropy_preserving(t), n, 8);
                     auto hf = attention::row_entropy(attention::attention_map(qq, kk, lf));
                     auto hs = attention::row_entropy(attention::attention_map(qq, kk, ls));
                     for (std::size_t i = 0; i < n; ++i) {
                         double gap = hs.per_row[i] - hf.per_row[i];
                         if (n < t && gap < -1e-9) ++violations;
                         if (n > t && gap > 1e-9) ++violations;
                     }
                 }
                 detail = "scaled slope " + std::to_string(scaled_scan.fit.slope) + ", " +
                          std::to_string(violations) + " row violations";
                 return flatter && violations == 0;
             });

    gate.run(6, "scale factor equals 1/sqrt(d) at the training width and increases with N", 0.0,
             [](std::string& detail) {
                 for (std::size_t t : {2ul, 64ul, 512ul, 4096ul})
                     for (std::size_t d : {4ul, 16ul, 64ul, 256ul}) {
                         double ep = attention::scale_factor(
                             ScalePolicy::entropy_preserving(t), t, d);
                         if (ep != std::sqrt(1.0 / double(d))) {
                             detail = "mismatch at T=" + std::to_string(t);
                             return false;
                         }
                     }
                 auto ep512 = ScalePolicy::entropy_preserving(512);
                 double prev = 0.0;
                 for (int i = 0; i < 50; ++i) {
                     std::size_t n = 2 + std::size_t(i) * 100;
                     double lam = attention::scale_factor(ep512, n, 64);
                     if (lam <= prev) {
                         detail = "not increasing at N=" + std::to_string(n);
                         return false;
                     }
                     prev = lam;
                 }
                 return true;
             });

    gate.run(7, "mean attention entropy never rises as the scale grows, 1000 instances", 0.0,
             [](std::string& detail) {
                 RngStream rng(88, 0);
                 double worst = -1.0;
                 for (int rep = 0; rep < 1000; ++rep) {
                     std::size_t n = 2 + (rng.next_u64() % 127);
                     std::size_t d = 2 + (rng.next_u64() % 15);
                     Matrix qq = random_matrix(n, d, rng);
                     Matrix kk = random_matrix(n, d, rng);
                     double l1 = rng.next_uniform();
                     double l2 = l1 + rng.next_uniform();
                     double h1 = attention::row_entropy(attention::attention_map(qq, kk, l1)).mean;
                     double h2 = attention::row_entropy(attention::attention_map(qq, kk, l2)).mean;
                     worst = std::max(worst, h2 - h1);
                 }
                 detail = "worst increase " + std::to_string(worst);
                 return worst <= 1e-9;
             });

    gate.run(8, "denoiser gradient matches central differences to 1e-4 on 50 coordinates", 0.0,
             [](std::string& detail) {
                 RngStream init(9, 0);
                 auto params =
                     diffusion::DenoiserParams::random_init(diffusion::DenoiserConfig{}, init);
                 auto sched = diffusion::make_schedule(200, 1e-4, 0.02);
                 RngStream data(9, 1);
                 std::vector<Matrix> x0s = {diffusion::two_blob_image(8, data),
                                            diffusion::two_blob_image(8, data)};
                 std::vector<std::size_t> ts = {17, 140};
                 std::vector<Matrix> epss = {random_matrix(8, 8, data),
                                             random_matrix(8, 8, data)};
                 auto lg = diffusion::loss_and_grad_batch(params, x0s, ts, epss, sched,
                                                          Kind::Fixed);
                 auto analytic = lg.grad.to_flat();
                 auto flat = params.to_flat();
                 const double h = 1e-5;
                 RngStream pick(9, 2);
                 auto probe = params;
                 double worst = 0.0;
                 for (int rep = 0; rep < 50; ++rep) {
                     std::size_t idx = pick.next_u64() % flat.size();
                     auto bumped = flat;
                     bumped[idx] = flat[idx] + h;
                     probe.from_flat(bumped);
                     double up = diffusion::loss_and_grad_batch(probe, x0s, ts, epss, sched,
                                                                Kind::Fixed)
                                     .loss;
                     bumped[idx] = flat[idx] - h;
                     probe.from_flat(bumped);
                     double down = diffusion::loss_and_grad_batch(probe, x0s, ts, epss, sched,
                                                                  Kind::Fixed)
                                       .loss;
                     double fd = (up - down) / (2.0 * h);
                     double rel = std::fabs(analytic[idx] - fd) /
                                  std::max({std::fabs(analytic[idx]), std::fabs(fd), 1e-6});
                     worst = std::max(worst, rel);
                 }
                 detail = "worst rel " + std::to_string(worst);
                 return worst <= 1e-4;
             });

    gate.run(9, "same-seed sampling at the training width matches bitwise across policies", 0.0,
             [](std::string& detail) {
                 const auto& state = reference_training();
                 if (state.aborted) {
                     detail = "training aborted";
                     return false;
                 }
                 RngStream r1(7, 0), r2(7, 0);
                 auto fixed = diffusion::sample(state, 8, 8, Kind::Fixed, r1);
                 auto scaled = diffusion::sample(state, 8, 8, Kind::EntropyPreserving, r2);
                 return fixed.image == scaled.image;
             });

    gate.run(10, "rescaling narrows the entropy gap to the trained width in >=80% of records",
             120.0, [](std::string& detail) {
                 const auto& state = reference_training();
                 RngStream r0(50, 0);
                 auto ref = diffusion::sample(state, 8, 8, Kind::Fixed, r0);
                 std::size_t layers = state.params.cfg.n_layers;
                 auto ref_at = [&](std::size_t t, std::size_t l) {
                     return ref.trace[(state.sched.steps - 1 - t) * layers + l].mean_entropy;
                 };
                 std::size_t wins = 0, total = 0;
                 for (std::size_t side : {4ul, 16ul}) {
                     RngStream f(51, side), s(51, side);
                     auto fixed = diffusion::sample(state, side, side, Kind::Fixed, f);
                     auto scaled =
                         diffusion::sample(state, side, side, Kind::EntropyPreserving, s);
                     for (std::size_t i = 0; i < fixed.trace.size(); ++i) {
                         double base = ref_at(fixed.trace[i].timestep, fixed.trace[i].layer_id);
                         double gap_fixed = std::fabs(fixed.trace[i].mean_entropy - base);
                         double gap_scaled = std::fabs(scaled.trace[i].mean_entropy - base);
                         if (gap_scaled <= gap_fixed + 1e-12) ++wins;
                         ++total;
                     }
                 }
                 double frac = double(wins) / double(total);
                 detail = "win fraction " + std::to_string(frac);
                 return frac >= 0.8;
             });

    gate.run(11, "rerunning every command with an identical config is byte reproducible", 0.0,
             [](std::string& detail) {
                 namespace fs = std::filesystem;
                 fs::create_directories("acc_scratch");
                 auto cfg_text = [](const std::string& out) {
                     std::ostringstream ss;
                     ss << "seed = 7\nout_dir = " << out << "\n"
                        << "d = 8\nd_r = 8\nd_key = 8\nq_rows = 2\ntrials = 12\n"
                        << "sizes = 16,32,64\ntrain_tokens = 32\nverify_sizes = 256\n"
                        << "decomp_cases = 25\nmoment_grid = 3\n"
                        << "toy_image_size = 4\ntoy_train_steps = 8\ntoy_batch = 2\n"
                        << "toy_diff_steps = 8\ntoy_d_model = 8\ntoy_d_key = 4\n"
                        << "toy_d_ff = 8\ntoy_layers = 2\ntoy_d_sin = 4\n"
                        << "height = 4\nwidth = 4\npolicy = scaled\n";
                     return ss.str();
                 };
                 for (const char* run : {"a", "b"}) {
                     std::ofstream out(std::string("acc_scratch/") + run + ".cfg",
                                       std::ios::binary | std::ios::trunc);
                     out << cfg_text(std::string("acc_scratch/") + run);
                 }
                 const char* commands[] = {"verify-theory", "entropy-scan", "train-toy",
                                           "sample-toy"};
                 for (const char* cmd : commands)
                     for (const char* run : {"a", "b"}) {
                         int code = run_cli(std::string(cmd) + " --config acc_scratch/" + run +
                                            ".cfg");
                         if (code != 0) {
                             detail = std::string(cmd) + " exited " + std::to_string(code);
                             return false;
                         }
                     }
                 const char* files[] = {"theory.csv",      "scan_fixed.csv", "scan_scaled.csv",
                                        "scan.svg",        "loss.csv",       "toy.ckpt",
                                        "entropy_trace.csv", "sample.pgm"};
                 for (const char* f : files) {
                     if (read_file(std::string("acc_scratch/a/") + f) !=
                         read_file(std::string("acc_scratch/b/") + f)) {
                         detail = std::string(f) + " differs between reruns";
                         return false;
                     }
                 }
                 return true;
             });

    if (gate.failures == 0) {
        std::printf("all 11 criteria hold\n");
        return 0;
    }
    std::printf("%d criteria failing\n", gate.failures);
    return 1;
}

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "lathresh/bench.hpp"
#include "lathresh/rng.hpp"

namespace fs = std::filesystem;
using namespace lathresh;

namespace {

// Exit codes: 0 success, 1 I/O or input parse, 2 flagged non-convergence,
// 64 usage.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::ofstream open_out(const fs::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    return out;
}

NormalizedHistogram load_histogram(const fs::path& input, GrayImage* image_out) {
    const std::string ext = input.extension().string();
    if (ext == ".pgm") {
        GrayImage img = read_pgm_file(input);
        if (image_out) *image_out = img;
        return compute_histogram(img);
    }
    if (ext == ".csv") {
        if (image_out)
            throw UsageError("this command needs a .pgm input, not a histogram CSV");
        std::ifstream in(input);
        if (!in) throw std::runtime_error("cannot open " + input.string());
        return read_histogram_csv(in);
    }
    throw UsageError("input must be a .pgm image or a gray,h histogram .csv");
}

// Mixture argument: inline JSON when it starts with '{', else a file path.
Mixture mixture_from_arg(const std::string& arg) {
    if (!arg.empty() && arg.front() == '{') {
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(arg);
        } catch (const nlohmann::json::parse_error& e) {
            throw UsageError(std::string("bad inline mixture json: ") + e.what());
        }
        return mixture_from_json(j);
    }
    std::ifstream in(arg);
    if (!in) throw std::runtime_error("cannot open mixture json " + arg);
    nlohmann::json j;
    in >> j;
    return mixture_from_json(j);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, sep)) out.push_back(tok);
    return out;
}

double parse_num(const std::string& tok, const char* what) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(tok, &pos);
        if (pos != tok.size() || !std::isfinite(v)) throw std::invalid_argument(tok);
        return v;
    } catch (const std::exception&) {
        throw UsageError(std::string("bad ") + what + ": '" + tok + "'");
    }
}

// Flags shared by fit and segment.
struct FitFlags {
    std::string input;
    std::string method = "la";
    int classes = 4;
    int iterations = 2000;
    std::uint64_t seed = 0;
    double gw = 0.02;
    double gh = 0.3;
    double omega = 0.01;
    int window = 25;
    std::string init;
    std::string trace_path;
    std::string out_path;
    std::string density_dir;
    std::vector<int> density_iters;
};

void add_fit_flags(CLI::App* cmd, FitFlags& f, bool segment) {
    cmd->add_option("input", f.input,
                    segment ? "input image (.pgm)" : "input image (.pgm) or histogram (.csv)")
        ->required();
    cmd->add_option("--method", f.method, "fitter: la, em or lm")
        ->check(CLI::IsMember({"la", "em", "lm"}));
    cmd->add_option("--classes", f.classes, "number of pixel classes K")
        ->check(CLI::Range(2, 32));
    cmd->add_option("--iterations", f.iterations, "iteration budget")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--seed", f.seed, "RNG seed (la)");
    cmd->add_option("--gw", f.gw, "reinforcement width factor g_w")->check(CLI::PositiveNumber);
    cmd->add_option("--gh", f.gh, "reinforcement height factor g_h")->check(CLI::PositiveNumber);
    cmd->add_option("--omega", f.omega, "prior-sum penalty weight")
        ->check(CLI::NonNegativeNumber);
    cmd->add_option("--window", f.window, "reference window size m (la)")
        ->check(CLI::Range(2, 100000));
    cmd->add_option("--init", f.init, "initial mixture, json file or inline json (em/lm)");
    cmd->add_option("--trace", f.trace_path, "write per-iteration trace CSV here");
    cmd->add_option("--out", f.out_path, "write the fit report JSON here (default stdout)");
    cmd->add_option("--density-dir", f.density_dir, "write la density snapshots here");
    cmd->add_option("--density-iters", f.density_iters,
                    "iterations to snapshot, comma separated")
        ->delimiter(',');
}

FitReport run_fit(const FitFlags& f, const NormalizedHistogram& hist,
                  std::string* init_note) {
    if (f.method == "la") {
        LaConfig cfg;
        cfg.classes = f.classes;
        cfg.iterations = f.iterations;
        cfg.g_w = f.gw;
        cfg.g_h = f.gh;
        cfg.omega = f.omega;
        cfg.window_m = f.window;
        cfg.seed = f.seed;
        if (!f.density_dir.empty()) {
            fs::create_directories(f.density_dir);
            cfg.snapshot_dir = f.density_dir;
            cfg.snapshot_iters = f.density_iters;
        }
        if (!f.init.empty())
            std::cerr << "note: --init is ignored by the la method\n";
        *init_note = "uniform-density";
        return fit_la(hist, cfg);
    }
    std::optional<Mixture> init;
    if (!f.init.empty()) {
        init = mixture_from_arg(f.init);
        if (init->classes() != f.classes)
            throw UsageError("--init component count does not match --classes");
        *init_note = "user";
    } else {
        *init_note = "quantile";
    }
    if (f.method == "em") {
        EmConfig cfg;
        cfg.max_iter = f.iterations;
        cfg.omega = f.omega;
        cfg.init = init;
        return fit_em(hist, f.classes, cfg);
    }
    LmConfig cfg;
    cfg.max_iter = f.iterations;
    cfg.omega = f.omega;
    cfg.init = init;
    return fit_lm(hist, f.classes, cfg);
}

void write_report_outputs(const FitFlags& f, const FitReport& rep,
                          const std::string& init_note) {
    nlohmann::ordered_json j = report_to_json(rep);
    j["seed"] = f.seed;
    j["init"] = init_note;
    const std::string text = j.dump(2) + "\n";
    if (f.out_path.empty()) {
        std::cout << text;
    } else {
        open_out(f.out_path) << text;
    }
    if (!f.trace_path.empty()) {
        auto out = open_out(f.trace_path);
        write_trace_csv(rep, out);
    }
}

int cmd_fit(const FitFlags& f) {
    NormalizedHistogram hist = load_histogram(f.input, nullptr);
    std::string init_note;
    FitReport rep = run_fit(f, hist, &init_note);
    write_report_outputs(f, rep, init_note);
    if (!rep.converged()) {
        std::cerr << "fit did not converge:";
        for (const auto& flag : rep.flags) std::cerr << ' ' << flag;
        std::cerr << '\n';
        return 2;
    }
    return 0;
}

std::vector<std::uint8_t> make_labels(const std::string& spec, const Mixture& sorted,
                                      int classes) {
    std::vector<std::uint8_t> labels;
    if (spec == "means") {
        for (const auto& c : sorted.components) {
            const double v = std::clamp(std::round(c.mu), 0.0, 255.0);
            labels.push_back(static_cast<std::uint8_t>(v));
        }
    } else if (spec == "indices") {
        for (int i = 0; i < classes; ++i) labels.push_back(static_cast<std::uint8_t>(i));
    } else if (spec.rfind("levels:", 0) == 0) {
        for (const auto& tok : split(spec.substr(7), ',')) {
            const double v = parse_num(tok, "label level");
            if (v < 0 || v > 255 || v != std::floor(v))
                throw UsageError("label levels must be integers in [0,255]");
            labels.push_back(static_cast<std::uint8_t>(v));
        }
        if (static_cast<int>(labels.size()) != classes)
            throw UsageError("levels: needs exactly K values");
    } else {
        throw UsageError("--labels must be means, indices or levels:a,b,...");
    }
    return labels;
}

int cmd_segment(const FitFlags& f, const std::string& seg_path,
                const std::string& labels_spec) {
    GrayImage img;
    NormalizedHistogram hist = load_histogram(f.input, &img);
    std::string init_note;
    FitReport rep = run_fit(f, hist, &init_note);
    write_report_outputs(f, rep, init_note);

    if (!rep.thresholds.empty()) {
        const Mixture sorted = sorted_by_mu(rep.mixture);
        const std::vector<std::uint8_t> labels =
            make_labels(labels_spec, sorted, f.classes);
        const GrayImage seg = render_segmentation(img, rep.thresholds, labels);
        write_pgm_file(seg, seg_path);

        if (!rep.converged()) {
            std::cerr << "fit did not converge:";
            for (const auto& flag : rep.flags) std::cerr << ' ' << flag;
            std::cerr << '\n';
            return 2;
        }
        const std::set<std::uint8_t> present(seg.pixels.begin(), seg.pixels.end());
        if (static_cast<int>(present.size()) < f.classes) {
            std::cerr << "segmentation is degenerate: " << present.size() << " of "
                      << f.classes << " classes present in the output\n";
            return 2;
        }
        return 0;
    }
    std::cerr << "segmentation failed: no usable thresholds (";
    for (const auto& flag : rep.flags) std::cerr << ' ' << flag;
    std::cerr << " )\n";
    return 2;
}

struct CompareFlags {
    std::string input;
    std::string methods = "la,em,lm";
    int repeats = 1;
    std::uint64_t seed = 0;
    std::string init_mode = "shared-random";
    int classes = 4;
    int iterations = 2000;
    double gw = 0.02;
    double gh = 0.3;
    double omega = 0.01;
    int window = 25;
    std::string out_path;
};

int cmd_compare(const CompareFlags& f) {
    NormalizedHistogram hist = load_histogram(f.input, nullptr);

    CompareConfig cfg;
    cfg.methods = split(f.methods, ',');
    if (cfg.methods.empty()) throw UsageError("--methods needs at least one method");
    for (const auto& m : cfg.methods)
        if (m != "la" && m != "em" && m != "lm")
            throw UsageError("unknown method '" + m + "' in --methods");
    cfg.repeats = f.repeats;
    cfg.seed = f.seed;
    cfg.classes = f.classes;
    cfg.la.classes = f.classes;
    cfg.la.iterations = f.iterations;
    cfg.la.g_w = f.gw;
    cfg.la.g_h = f.gh;
    cfg.la.omega = f.omega;
    cfg.la.window_m = f.window;
    cfg.em.max_iter = f.iterations;
    cfg.em.omega = f.omega;
    cfg.lm.max_iter = f.iterations;
    cfg.lm.omega = f.omega;

    if (f.init_mode == "shared-random") {
        cfg.init_mode = InitMode::kSharedRandom;
    } else if (f.init_mode == "per-run-random") {
        cfg.init_mode = InitMode::kPerRunRandom;
    } else if (f.init_mode.rfind("fixed:", 0) == 0) {
        cfg.init_mode = InitMode::kFixed;
        cfg.fixed_init = mixture_from_arg(f.init_mode.substr(6));
        if (cfg.fixed_init->classes() != f.classes)
            throw UsageError("fixed init component count does not match --classes");
    } else {
        throw UsageError("--init-mode must be shared-random, per-run-random or fixed:<json>");
    }

    const std::vector<CompareRow> rows = run_compare(hist, cfg);
    if (f.out_path.empty()) {
        write_compare_csv(rows, f.classes, std::cout);
    } else {
        auto out = open_out(f.out_path);
        write_compare_csv(rows, f.classes, out);
    }
    return 0;
}

int cmd_synth(const std::string& spec, const std::string& out_path,
              const std::string& image_arg, const std::string& image_out,
              std::uint64_t seed) {
    Mixture mix;
    for (const auto& part : split(spec, ';')) {
        const auto nums = split(part, ',');
        if (nums.size() != 3)
            throw UsageError("component '" + part + "' is not p,mu,sigma");
        GaussianComponent c;
        c.p = parse_num(nums[0], "component weight");
        c.mu = parse_num(nums[1], "component mean");
        c.sigma = parse_num(nums[2], "component sigma");
        if (c.sigma <= 0) throw UsageError("component sigma must be > 0");
        mix.components.push_back(c);
    }
    if (mix.components.empty()) throw UsageError("empty mixture spec");
    if (std::abs(mix.prior_sum() - 1.0) > 0.05)
        throw UsageError("mixture weights must sum to 1 within 0.05");

    const NormalizedHistogram hist = synth_histogram(mix);
    if (out_path.empty()) {
        write_histogram_csv(hist, std::cout);
    } else {
        auto out = open_out(out_path);
        write_histogram_csv(hist, out);
    }

    if (!image_arg.empty()) {
        if (image_out.empty()) throw UsageError("--image needs --image-out <pgm>");
        const auto dims = split(image_arg, 'x');
        if (dims.size() != 2) throw UsageError("--image must be WxH");
        const double w = parse_num(dims[0], "image width");
        const double h = parse_num(dims[1], "image height");
        if (w < 1 || h < 1 || w != std::floor(w) || h != std::floor(h) || w * h > 5e7)
            throw UsageError("--image dimensions must be positive integers");

        std::array<double, kGrayLevels> cum{};
        double acc = 0.0;
        for (int g = 0; g < kGrayLevels; ++g) {
            acc += hist.bins[g];
            cum[g] = acc;
        }
        cum[kGrayLevels - 1] = 1.0;

        GrayImage img;
        img.width = static_cast<int>(w);
        img.height = static_cast<int>(h);
        img.pixels.resize(static_cast<std::size_t>(img.width) * img.height);
        std::mt19937_64 rng(splitmix64(seed));
        for (auto& px : img.pixels) {
            const double z = uniform53(rng);
            const auto it = std::upper_bound(cum.begin(), cum.end(), z);
            px = static_cast<std::uint8_t>(std::min<std::ptrdiff_t>(
                it - cum.begin(), kGrayLevels - 1));
        }
        write_pgm_file(img, image_out);
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Multilevel gray-image thresholding via Gaussian-mixture histogram fits"};
    app.require_subcommand(1);

    FitFlags fit_flags;
    CLI::App* fit = app.add_subcommand("fit", "fit a mixture to an image or histogram");
    add_fit_flags(fit, fit_flags, false);

    FitFlags seg_flags;
    std::string seg_path;
    std::string labels_spec = "means";
    CLI::App* segment = app.add_subcommand("segment", "fit, threshold and render classes");
    add_fit_flags(segment, seg_flags, true);
    segment->add_option("--seg", seg_path, "output segmented PGM path")->required();
    segment->add_option("--labels", labels_spec, "means | indices | levels:a,b,...");

    CompareFlags cmp;
    CLI::App* compare = app.add_subcommand("compare", "benchmark fitters on one input");
    compare->add_option("input", cmp.input, "input image (.pgm) or histogram (.csv)")
        ->required();
    compare->add_option("--methods", cmp.methods, "comma list from la,em,lm");
    compare->add_option("--repeats", cmp.repeats, "runs per method")
        ->check(CLI::PositiveNumber);
    compare->add_option("--seed", cmp.seed, "base seed for run derivation");
    compare->add_option("--init-mode", cmp.init_mode,
                        "shared-random | per-run-random | fixed:<json>");
    compare->add_option("--classes", cmp.classes, "number of pixel classes K")
        ->check(CLI::Range(2, 32));
    compare->add_option("--iterations", cmp.iterations, "iteration budget per run")
        ->check(CLI::PositiveNumber);
    compare->add_option("--gw", cmp.gw, "la reinforcement width factor")
        ->check(CLI::PositiveNumber);
    compare->add_option("--gh", cmp.gh, "la reinforcement height factor")
        ->check(CLI::PositiveNumber);
    compare->add_option("--omega", cmp.omega, "prior-sum penalty weight")
        ->check(CLI::NonNegativeNumber);
    compare->add_option("--window", cmp.window, "la reference window size")
        ->check(CLI::Range(2, 100000));
    compare->add_option("--out", cmp.out_path, "write the CSV here (default stdout)");

    std::string synth_spec;
    std::string synth_out;
    std::string image_arg;
    std::string image_out;
    std::uint64_t synth_seed = 0;
    CLI::App* synth = app.add_subcommand("synth", "generate a mixture histogram / image");
    synth->add_option("spec", synth_spec, "components as p,mu,sigma;p,mu,sigma;...")
        ->required();
    synth->add_option("--out", synth_out, "histogram CSV path (default stdout)");
    synth->add_option("--image", image_arg, "also sample a WxH image");
    synth->add_option("--image-out", image_out, "path for the sampled PGM");
    synth->add_option("--seed", synth_seed, "sampling seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 64;
    }

    try {
        if (fit->parsed()) return cmd_fit(fit_flags);
        if (segment->parsed()) return cmd_segment(seg_flags, seg_path, labels_spec);
        if (compare->parsed()) return cmd_compare(cmp);
        if (synth->parsed())
            return cmd_synth(synth_spec, synth_out, image_arg, image_out, synth_seed);
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return 64;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}

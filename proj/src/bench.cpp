#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "lathresh/bench.hpp"
#include "lathresh/rng.hpp"

namespace lathresh {

namespace {

constexpr std::uint64_t kInitStream = 0x1A17;  // clear of the automaton streams

std::vector<double> flatten(const Mixture& mix) {
    std::vector<double> v;
    v.reserve(3 * mix.components.size());
    for (const auto& c : mix.components) {
        v.push_back(c.p);
        v.push_back(c.mu);
        v.push_back(c.sigma);
    }
    return v;
}

CompareRow failure_row(const std::string& method, int run, std::uint64_t seed,
                       int classes, const std::vector<double>& init,
                       const std::string& what) {
    CompareRow row;
    row.method = method;
    row.run = run;
    row.seed = seed;
    row.final_j = std::numeric_limits<double>::quiet_NaN();
    row.iters_converge = 0;
    row.wall_millis = std::numeric_limits<double>::quiet_NaN();
    row.params.assign(3 * classes, std::numeric_limits<double>::quiet_NaN());
    row.init = init;
    row.flags = "failed:" + what;
    return row;
}

std::string join_flags(const std::vector<std::string>& flags) {
    std::string s;
    for (const auto& f : flags) {
        if (!s.empty()) s += ';';
        s += f;
    }
    return s;
}

double parse_double(const std::string& tok) {
    if (tok.empty()) return std::numeric_limits<double>::quiet_NaN();
    std::size_t pos = 0;
    const double v = std::stod(tok, &pos);
    if (pos != tok.size()) throw std::invalid_argument("compare csv: bad number " + tok);
    return v;
}

}  // namespace

Mixture random_init(int classes, std::uint64_t seed) {
    if (classes < 1) throw std::invalid_argument("random_init: need at least one class");
    std::mt19937_64 rng(splitmix64(seed));
    Mixture mix;
    mix.components.resize(classes);
    double total = 0.0;
    for (auto& c : mix.components) {
        c.mu = uniform53(rng) * 255.0;
        c.sigma = 4.0 + uniform53(rng) * 60.0;
        c.p = 0.75 + 0.5 * uniform53(rng);  // near-equal weights before normalizing
        total += c.p;
    }
    for (auto& c : mix.components) c.p /= total;
    return mix;
}

std::vector<CompareRow> run_compare(const NormalizedHistogram& hist,
                                    const CompareConfig& cfg) {
    if (cfg.repeats < 1) throw std::invalid_argument("run_compare: repeats must be >= 1");
    if (cfg.methods.empty()) throw std::invalid_argument("run_compare: no methods");
    for (const auto& m : cfg.methods)
        if (m != "la" && m != "em" && m != "lm")
            throw std::invalid_argument("run_compare: unknown method " + m);
    if (cfg.init_mode == InitMode::kFixed && !cfg.fixed_init)
        throw std::invalid_argument("run_compare: fixed init mode without an init");
    if (cfg.init_mode == InitMode::kFixed &&
        cfg.fixed_init->classes() != cfg.classes)
        throw std::invalid_argument("run_compare: fixed init has wrong class count");

    std::vector<CompareRow> rows;
    rows.reserve(cfg.methods.size() * cfg.repeats);
    for (std::size_t mi = 0; mi < cfg.methods.size(); ++mi) {
        const std::string& method = cfg.methods[mi];
        for (int run = 0; run < cfg.repeats; ++run) {
            const std::uint64_t run_seed = stream_seed(cfg.seed, static_cast<std::uint64_t>(run));
            Mixture init;
            switch (cfg.init_mode) {
                case InitMode::kSharedRandom:
                    init = random_init(cfg.classes, stream_seed(run_seed, kInitStream));
                    break;
                case InitMode::kFixed:
                    init = *cfg.fixed_init;
                    break;
                case InitMode::kPerRunRandom:
                    init = random_init(cfg.classes, stream_seed(run_seed, kInitStream + 1 + mi));
                    break;
            }
            const std::vector<double> init_flat = flatten(init);

            FitReport rep;
            const auto t0 = std::chrono::steady_clock::now();
            try {
                if (method == "la") {
                    LaConfig la = cfg.la;
                    la.classes = cfg.classes;
                    la.seed = run_seed;
                    rep = fit_la(hist, la);
                } else if (method == "em") {
                    EmConfig em = cfg.em;
                    em.init = init;
                    rep = fit_em(hist, cfg.classes, em);
                } else {
                    LmConfig lm = cfg.lm;
                    lm.init = init;
                    rep = fit_lm(hist, cfg.classes, lm);
                }
            } catch (const std::exception& e) {
                rows.push_back(failure_row(method, run, run_seed, cfg.classes, init_flat,
                                           e.what()));
                continue;
            }
            const auto t1 = std::chrono::steady_clock::now();

            CompareRow row;
            row.method = method;
            row.run = run;
            row.seed = run_seed;
            row.final_j = rep.final_j;
            row.iters_converge = rep.iterations_to_converge;
            row.wall_millis =
                std::chrono::duration<double, std::milli>(t1 - t0).count();
            row.params = flatten(sorted_by_mu(rep.mixture));
            row.init = init_flat;
            row.flags = join_flags(rep.flags);
            rows.push_back(std::move(row));
        }
    }
    return rows;
}

void write_compare_csv(const std::vector<CompareRow>& rows, int classes,
                       std::ostream& out) {
    out << "method,run,seed,final_J,iters_converge,wall_millis";
    for (int i = 1; i <= classes; ++i)
        out << ",p" << i << ",mu" << i << ",sigma" << i;
    for (int i = 1; i <= classes; ++i)
        out << ",init_p" << i << ",init_mu" << i << ",init_sigma" << i;
    out << ",flags\n";

    char buf[64];
    auto num = [&](double v) {
        std::snprintf(buf, sizeof(buf), "%.17g", v);
        out << ',' << buf;
    };
    for (const auto& row : rows) {
        if (row.params.size() != static_cast<std::size_t>(3 * classes) ||
            row.init.size() != static_cast<std::size_t>(3 * classes))
            throw std::invalid_argument("compare csv: row does not match class count");
        out << row.method << ',' << row.run << ',' << row.seed;
        num(row.final_j);
        out << ',' << row.iters_converge;
        num(row.wall_millis);
        for (double v : row.params) num(v);
        for (double v : row.init) num(v);
        out << ',' << row.flags << '\n';
    }

    // Per-method mean/std over clean rows (sample std, n-1).
    std::vector<std::string> methods;
    for (const auto& row : rows)
        if (std::find(methods.begin(), methods.end(), row.method) == methods.end())
            methods.push_back(row.method);

    out << "# summary\n";
    out << "# method,n";
    out << ",mean_final_J,std_final_J,mean_iters,std_iters,mean_wall_millis,std_wall_millis";
    for (int i = 1; i <= classes; ++i)
        out << ",mean_p" << i << ",std_p" << i << ",mean_mu" << i << ",std_mu" << i
            << ",mean_sigma" << i << ",std_sigma" << i;
    out << '\n';
    for (const auto& method : methods) {
        const int metric_count = 3 + 3 * classes;
        std::vector<double> sum(metric_count, 0.0), sumsq(metric_count, 0.0);
        int n = 0;
        for (const auto& row : rows) {
            if (row.method != method) continue;
            if (row.flags.rfind("failed", 0) == 0) continue;
            std::vector<double> vals;
            vals.reserve(metric_count);
            vals.push_back(row.final_j);
            vals.push_back(row.iters_converge);
            vals.push_back(row.wall_millis);
            for (double v : row.params) vals.push_back(v);
            for (int c = 0; c < metric_count; ++c) {
                sum[c] += vals[c];
                sumsq[c] += vals[c] * vals[c];
            }
            ++n;
        }
        out << "# " << method << ',' << n;
        for (int c = 0; c < metric_count; ++c) {
            const double mean = n > 0 ? sum[c] / n : std::numeric_limits<double>::quiet_NaN();
            double sd = 0.0;
            if (n > 1) {
                const double ss = std::max(sumsq[c] - n * mean * mean, 0.0);
                sd = std::sqrt(ss / (n - 1));
            }
            num(mean);
            num(sd);
        }
        out << '\n';
    }
}

std::vector<CompareRow> read_compare_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line))
        throw std::invalid_argument("compare csv: empty input");
    if (line.rfind("method,run,seed,final_J,iters_converge,wall_millis,p1,", 0) != 0)
        throw std::invalid_argument("compare csv: unexpected header");
    int param_cols = 0;
    {
        std::stringstream hs(line);
        std::string tok;
        while (std::getline(hs, tok, ','))
            if (!tok.empty() && tok[0] == 'p' &&
                tok.find_first_not_of("0123456789", 1) == std::string::npos)
                ++param_cols;
    }
    const int classes = param_cols;
    const std::size_t expected = 6 + 6 * static_cast<std::size_t>(classes) + 1;

    std::vector<CompareRow> rows;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::vector<std::string> toks;
        std::string tok;
        std::stringstream ls(line);
        while (std::getline(ls, tok, ',')) toks.push_back(tok);
        if (line.back() == ',') toks.push_back("");  // empty trailing flags cell
        if (toks.size() != expected)
            throw std::invalid_argument("compare csv: wrong column count in row");
        CompareRow row;
        row.method = toks[0];
        row.run = std::stoi(toks[1]);
        row.seed = std::stoull(toks[2]);
        row.final_j = parse_double(toks[3]);
        row.iters_converge = std::stoi(toks[4]);
        row.wall_millis = parse_double(toks[5]);
        for (int c = 0; c < 3 * classes; ++c)
            row.params.push_back(parse_double(toks[6 + c]));
        for (int c = 0; c < 3 * classes; ++c)
            row.init.push_back(parse_double(toks[6 + 3 * classes + c]));
        row.flags = toks.back();
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace lathresh

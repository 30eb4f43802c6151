#include "rou/cli.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "rou/errors.hpp"
#include "rou/spectral.hpp"

namespace rou::cli {

namespace {

using nlohmann::json;

double rounded(double x) { return std::stod(format_number(x)); }

double median(std::vector<double> xs) {
    if (xs.empty()) return std::numeric_limits<double>::quiet_NaN();
    std::sort(xs.begin(), xs.end());
    const std::size_t m = xs.size() / 2;
    return xs.size() % 2 ? xs[m] : 0.5 * (xs[m - 1] + xs[m]);
}

std::string trim(std::string s) {
    while (!s.empty() && (s.back() == '\r' || s.back() == ' ' || s.back() == '\t')) s.pop_back();
    std::size_t b = 0;
    while (b < s.size() && (s[b] == ' ' || s[b] == '\t')) ++b;
    return s.substr(b);
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) out.push_back(trim(field));
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

std::optional<double> parse_double(const std::string& s) {
    double x = 0.0;
    const char* end = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(s.data(), end, x);
    if (ec != std::errc() || ptr != end || s.empty()) return std::nullopt;
    return x;
}

template <typename T>
T json_get(const json& j, const char* key) {
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw UsageError(std::string("config: bad value for '") + key + "': " + e.what());
    }
}

std::ofstream open_output(const std::string& path) {
    const std::filesystem::path p(path);
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open output file " + path);
    return f;
}

// Writes to --out when given, else to the command's stdout stream.
template <typename F>
void emit(const std::string& out_path, std::ostream& fallback, F&& write) {
    if (out_path.empty()) {
        write(fallback);
        return;
    }
    std::ofstream f = open_output(out_path);
    write(f);
    if (!f) throw std::runtime_error("write failed for " + out_path);
}

}  // namespace

void ExperimentConfig::validate() const {
    try {
        true_params.validate();
        D_sigma.validate();
    } catch (const DomainError& e) {
        throw UsageError(std::string("config: ") + e.what());
    }
    if (!(h > 0.0)) throw UsageError("config: h must be positive");
    if (n_list.empty()) throw UsageError("config: n_list must be nonempty");
    for (std::size_t n : n_list) {
        if (n < 2) throw UsageError("config: every n must be >= 2");
    }
    if (substeps < 1) throw UsageError("config: substeps must be >= 1");
    if (N < 1) throw UsageError("config: N must be >= 1");
    if (seeds.empty()) throw UsageError("config: seeds must be nonempty");
}

ExperimentConfig parse_config(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw UsageError(std::string("config: invalid JSON: ") + e.what());
    }
    if (!j.is_object()) throw UsageError("config: top level must be an object");
    ExperimentConfig c;
    for (const auto& [key, value] : j.items()) {
        if (key == "true_params") {
            if (!value.is_object()) throw UsageError("config: true_params must be an object");
            for (const auto& [k, v] : value.items()) {
                if (k != "kappa" && k != "theta" && k != "sigma") throw UsageError("config: unknown true_params key " + k);
            }
            if (value.contains("kappa")) c.true_params.kappa = json_get<double>(value, "kappa");
            if (value.contains("theta")) c.true_params.theta = json_get<double>(value, "theta");
            if (value.contains("sigma")) c.true_params.sigma = json_get<double>(value, "sigma");
        } else if (key == "h") {
            c.h = json_get<double>(j, "h");
        } else if (key == "n_list") {
            c.n_list = json_get<std::vector<std::size_t>>(j, "n_list");
        } else if (key == "substeps") {
            c.substeps = json_get<int>(j, "substeps");
        } else if (key == "N") {
            c.N = json_get<int>(j, "N");
        } else if (key == "D_sigma") {
            const auto d = json_get<std::vector<double>>(j, "D_sigma");
            if (d.size() != 2) throw UsageError("config: D_sigma must be [lo, hi]");
            c.D_sigma = {d[0], d[1]};
        } else if (key == "seeds") {
            c.seeds = json_get<std::vector<std::uint64_t>>(j, "seeds");
        } else if (key == "output_dir") {
            c.output_dir = json_get<std::string>(j, "output_dir");
        } else {
            throw UsageError("config: unknown key " + key);
        }
    }
    c.validate();
    return c;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw UsageError("config: cannot read " + path);
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_config(ss.str());
}

std::string format_number(double x) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 10);
    if (ec != std::errc()) return "nan";
    return std::string(buf, ptr);
}

void write_path_csv(std::ostream& out, const Path& path) {
    out << "index,time,value\n";
    for (std::size_t k = 0; k < path.values.size(); ++k) {
        out << (k + 1) << ',' << format_number((k + 1) * path.config.h) << ','
            << format_number(path.values[k]) << '\n';
    }
}

std::vector<double> read_values_csv(std::istream& in) {
    std::vector<double> values;
    std::string line;
    std::size_t line_no = 0;
    std::size_t width = 0;
    std::size_t column = 0;
    bool first = true;
    while (std::getline(in, line)) {
        ++line_no;
        line = trim(line);
        if (line.empty()) continue;
        const std::vector<std::string> fields = split_csv(line);
        if (first) {
            first = false;
            width = fields.size();
            column = width - 1;
            const bool header = std::any_of(fields.begin(), fields.end(),
                                            [](const std::string& f) { return !parse_double(f); });
            if (header) {
                const auto it = std::find(fields.begin(), fields.end(), "value");
                if (it != fields.end()) column = static_cast<std::size_t>(it - fields.begin());
                continue;
            }
        }
        if (fields.size() != width) {
            throw UsageError("line " + std::to_string(line_no) + ": expected " + std::to_string(width) +
                             " fields, got " + std::to_string(fields.size()));
        }
        const auto x = parse_double(fields[column]);
        if (!x || !std::isfinite(*x)) {
            throw UsageError("line " + std::to_string(line_no) + ": not a number: '" + fields[column] + "'");
        }
        if (*x < 0.0) throw UsageError("line " + std::to_string(line_no) + ": negative observation");
        values.push_back(*x);
    }
    if (values.size() < 2) throw UsageError("input: need at least 2 observations, got " + std::to_string(values.size()));
    return values;
}

std::string estimation_report_json(const EstimationResult& r) {
    json diag = {
        {"m1", rounded(r.moments.m1)},
        {"m2", rounded(r.moments.m2)},
        {"m3", rounded(r.moments.m3)},
        {"iterations_uv", r.iterations_uv},
        {"residual_uv", rounded(r.residual_uv)},
        {"residual_sigma", rounded(r.residual_sigma)},
        {"sigma_lo", rounded(r.bracket_sigma.lo)},
        {"sigma_hi", rounded(r.bracket_sigma.hi)},
        {"sigma_at_boundary", r.sigma_at_boundary},
        {"truncation_tail", rounded(r.truncation_tail)},
    };
    json j = {
        {"theta_hat", rounded(r.theta_hat)},
        {"kappa_hat", rounded(r.kappa_hat)},
        {"sigma_hat", rounded(r.sigma_hat)},
        {"sigma_c_hat", rounded(r.sigma_c_hat)},
        {"u_hat", rounded(r.u_hat)},
        {"v_hat", rounded(r.v_hat)},
        {"n", r.moments.n},
        {"h", rounded(r.moments.h)},
        {"diagnostics", diag},
    };
    return j.dump(2) + "\n";
}

std::vector<Table1Row> run_table1(const ExperimentConfig& cfg, unsigned threads) {
    cfg.validate();
    std::vector<std::size_t> ns = cfg.n_list;
    std::sort(ns.begin(), ns.end());
    ns.erase(std::unique(ns.begin(), ns.end()), ns.end());
    std::vector<std::uint64_t> seeds = cfg.seeds;
    std::sort(seeds.begin(), seeds.end());
    seeds.erase(std::unique(seeds.begin(), seeds.end()), seeds.end());

    // rows[i_n * seeds + i_seed]
    std::vector<Table1Row> rows(ns.size() * seeds.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t s = next++; s < seeds.size(); s = next++) {
            SimConfig sim;
            sim.h = cfg.h;
            sim.n = ns.back();
            sim.substeps = cfg.substeps;
            sim.seed = seeds[s];
            std::optional<Path> path;
            std::string sim_error;
            try {
                path = simulate_path(cfg.true_params, sim);
            } catch (const std::exception& e) {
                sim_error = std::string("simulate: ") + e.what();
            }
            for (std::size_t i = 0; i < ns.size(); ++i) {
                Table1Row& row = rows[i * seeds.size() + s];
                row.n = ns[i];
                row.seed = seeds[s];
                if (!path) {
                    row.error = sim_error;
                    continue;
                }
                try {
                    row.result = estimate_all(std::span<const double>(path->values.data(), ns[i]), cfg.h,
                                              cfg.D_sigma, cfg.N);
                } catch (const std::exception& e) {
                    row.error = e.what();
                }
            }
        }
    };
    unsigned count = threads ? threads : std::max(1u, std::thread::hardware_concurrency());
    count = static_cast<unsigned>(std::min<std::size_t>(count, seeds.size()));
    {
        std::vector<std::jthread> pool;
        for (unsigned t = 1; t < count; ++t) pool.emplace_back(worker);
        worker();
    }
    return rows;
}

std::vector<Table1Summary> summarize_table1(const std::vector<Table1Row>& rows) {
    std::vector<std::size_t> ns;
    for (const auto& r : rows) ns.push_back(r.n);
    std::sort(ns.begin(), ns.end());
    ns.erase(std::unique(ns.begin(), ns.end()), ns.end());
    std::vector<Table1Summary> out;
    for (std::size_t n : ns) {
        std::vector<double> k, t, s, c;
        Table1Summary sum;
        sum.n = n;
        for (const auto& r : rows) {
            if (r.n != n) continue;
            if (!r.result) {
                ++sum.failures;
                continue;
            }
            k.push_back(r.result->kappa_hat);
            t.push_back(r.result->theta_hat);
            s.push_back(r.result->sigma_hat);
            c.push_back(r.result->sigma_c_hat);
        }
        sum.kappa_median = median(k);
        sum.theta_median = median(t);
        sum.sigma_median = median(s);
        sum.sigma_c_median = median(c);
        out.push_back(sum);
    }
    return out;
}

void write_table1_csv(std::ostream& out, const std::vector<Table1Row>& rows,
                      const std::vector<Table1Summary>& summary) {
    out << "n,seed,kappa_hat,theta_hat,sigma_hat,sigma_c_hat,error\n";
    for (const auto& r : rows) {
        out << r.n << ',' << r.seed << ',';
        if (r.result) {
            out << format_number(r.result->kappa_hat) << ',' << format_number(r.result->theta_hat) << ','
                << format_number(r.result->sigma_hat) << ',' << format_number(r.result->sigma_c_hat) << ",\n";
        } else {
            std::string msg = r.error;
            std::replace(msg.begin(), msg.end(), ',', ';');
            std::replace(msg.begin(), msg.end(), '\n', ' ');
            out << ",,,," << msg << '\n';
        }
    }
    out << "# summary: median over successful seeds\n";
    out << "n,kappa_hat_median,theta_hat_median,sigma_hat_median,sigma_c_hat_median,failures\n";
    for (const auto& s : summary) {
        out << s.n << ',' << format_number(s.kappa_median) << ',' << format_number(s.theta_median) << ','
            << format_number(s.sigma_median) << ',' << format_number(s.sigma_c_median) << ',' << s.failures << '\n';
    }
}

void write_table1_pivot(std::ostream& out, const std::vector<Table1Summary>& summary) {
    out << "estimator";
    for (const auto& s : summary) out << ',' << s.n;
    out << '\n';
    const std::pair<const char*, double Table1Summary::*> lines[] = {
        {"kappa_hat", &Table1Summary::kappa_median},
        {"theta_hat", &Table1Summary::theta_median},
        {"sigma_hat", &Table1Summary::sigma_median},
        {"sigma_c_hat", &Table1Summary::sigma_c_median},
    };
    for (const auto& [name, field] : lines) {
        out << name;
        for (const auto& s : summary) out << ',' << format_number(s.*field);
        out << '\n';
    }
}

std::vector<double> make_grid(double lo, double hi, double step) {
    std::vector<double> grid;
    if (!(step > 0.0) || lo > hi) return grid;
    const auto count = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9)) + 1;
    for (std::size_t k = 0; k < count; ++k) grid.push_back(lo + step * k);
    return grid;
}

std::vector<CurvePoint> deriv_curve(double u, double v, double h, const std::vector<double>& sigma_grid,
                                    int truncation) {
    if (sigma_grid.empty()) throw UsageError("deriv-curve: empty sigma grid");
    SpectralOptions opts;
    opts.truncation = truncation;
    const SpectralBasis basis = SpectralBasis::build(u, v, opts);
    std::vector<CurvePoint> curve;
    curve.reserve(sigma_grid.size());
    for (double s : sigma_grid) curve.push_back({s, dg3_dsigma2(basis, s, h) / h});
    return curve;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Generalized-moment estimation for the reflected Ornstein-Uhlenbeck process", "rou"};
    app.set_help_flag("--help", "Print help and exit");
    app.require_subcommand(1);

    // Shared flags.
    std::string config_path;
    std::uint64_t seed = 1;
    double h = 0.5;
    std::size_t n = 0;
    std::string out_path;
    ROUParams params{1.0, 1.0, 0.5};
    int substeps = 200;
    int truncation = 12;
    double sigma_lo = 0.05;
    double sigma_hi = 5.0;

    auto* sim = app.add_subcommand("simulate", "Simulate one reflected OU path to CSV (index,time,value)");
    auto* est = app.add_subcommand("estimate", "Estimate (kappa, theta, sigma) from a CSV path; JSON report");
    auto* tab = app.add_subcommand("table1", "Replicated estimation experiment over n_list x seeds");
    auto* crv = app.add_subcommand("deriv-curve", "CSV of (1/h) d g3 / d sigma^2 over a sigma grid");

    std::vector<CLI::Option*> config_opts, seed_opts, h_opts, n_opts, kappa_opts, theta_opts, sigma_opts,
        substeps_opts, trunc_opts, lo_opts, hi_opts;
    for (auto* sub : {sim, est, tab, crv}) {
        sub->set_help_flag("--help", "Print help and exit");
        config_opts.push_back(sub->add_option("--config", config_path, "JSON experiment config")->check(CLI::ExistingFile));
        h_opts.push_back(sub->add_option("--h", h, "Observation step"));
        sub->add_option("--out", out_path,
                        sub == tab ? "Output CSV (default: <output_dir>/table1.csv)" : "Output file (default: stdout)");
    }
    for (auto* sub : {sim, tab}) {
        seed_opts.push_back(sub->add_option("--seed", seed, "Random seed"));
        n_opts.push_back(sub->add_option("--n", n, "Number of observations"));
        kappa_opts.push_back(sub->add_option("--kappa", params.kappa, "True kappa"));
        theta_opts.push_back(sub->add_option("--theta", params.theta, "True theta"));
        sigma_opts.push_back(sub->add_option("--sigma", params.sigma, "True sigma"));
        substeps_opts.push_back(sub->add_option("--substeps", substeps, "Euler sub-steps per h"));
    }
    for (auto* sub : {est, tab, crv}) trunc_opts.push_back(sub->add_option("--N", truncation, "Spectral truncation"));
    for (auto* sub : {est, tab}) {
        lo_opts.push_back(sub->add_option("--sigma-lo", sigma_lo, "Lower end of D_sigma"));
        hi_opts.push_back(sub->add_option("--sigma-hi", sigma_hi, "Upper end of D_sigma"));
    }
    std::optional<double> x0;
    sim->add_option("--x0", x0, "Initial state (default: stationary draw)");
    std::string input_path;
    est->add_option("input,--input", input_path, "CSV path produced by `simulate`")->required();
    std::vector<std::uint64_t> seeds;
    auto* seeds_opt = tab->add_option("--seeds", seeds, "Seed list");
    std::vector<std::size_t> n_list;
    auto* n_list_opt = tab->add_option("--n-list", n_list, "Observation counts")->delimiter(',');
    unsigned threads = 0;
    tab->add_option("--threads", threads, "Worker threads (0: all cores)");
    double u = 1.0;
    double v = 2.0 * std::numbers::sqrt2;
    auto* u_opt = crv->add_option("--u", u, "u = theta");
    auto* v_opt = crv->add_option("--v", v, "v = sqrt(2 kappa) theta / sigma");
    double s_min = 0.1, s_max = 2.0, s_step = 0.02;
    crv->add_option("--sigma-min", s_min, "First sigma of the grid")->capture_default_str();
    crv->add_option("--sigma-max", s_max, "Last sigma of the grid (inclusive)")->capture_default_str();
    crv->add_option("--sigma-step", s_step, "Grid step")->capture_default_str();
    std::vector<double> sigma_grid;
    auto* grid_opt = crv->add_option("--sigma-grid", sigma_grid, "Explicit sigma values")->delimiter(',');

    std::vector<const char*> args(argv, argv + argc);
    try {
        app.parse(argc, args.data());
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << "\n";
        return kExitUsage;
    }

    auto given = [](const std::vector<CLI::Option*>& opts) {
        return std::any_of(opts.begin(), opts.end(), [](const CLI::Option* o) { return o->count() > 0; });
    };

    try {
        ExperimentConfig cfg;
        if (!config_path.empty()) cfg = load_config(config_path);
        if (given(h_opts)) cfg.h = h;
        if (given(kappa_opts)) cfg.true_params.kappa = params.kappa;
        if (given(theta_opts)) cfg.true_params.theta = params.theta;
        if (given(sigma_opts)) cfg.true_params.sigma = params.sigma;
        if (given(substeps_opts)) cfg.substeps = substeps;
        if (given(trunc_opts)) cfg.N = truncation;
        if (given(lo_opts)) cfg.D_sigma.lo = sigma_lo;
        if (given(hi_opts)) cfg.D_sigma.hi = sigma_hi;
        if (given(seed_opts)) cfg.seeds = {seed};
        if (seeds_opt->count() > 0) cfg.seeds = seeds;
        if (given(n_opts)) cfg.n_list = {n};
        if (n_list_opt->count() > 0) cfg.n_list = n_list;
        cfg.validate();

        if (sim->parsed()) {
            SimConfig sc;
            sc.h = cfg.h;
            sc.n = cfg.n_list.front();
            sc.substeps = cfg.substeps;
            sc.seed = cfg.seeds.front();
            sc.x0 = x0;
            try {
                sc.validate();
            } catch (const DomainError& e) {
                throw UsageError(e.what());
            }
            const Path path = simulate_path(cfg.true_params, sc);
            emit(out_path, out, [&](std::ostream& os) { write_path_csv(os, path); });
        } else if (est->parsed()) {
            std::ifstream in(input_path, std::ios::binary);
            if (!in) throw UsageError("cannot read input " + input_path);
            const std::vector<double> values = read_values_csv(in);
            const EstimationResult r = estimate_all(values, cfg.h, cfg.D_sigma, cfg.N);
            emit(out_path, out, [&](std::ostream& os) { os << estimation_report_json(r); });
        } else if (tab->parsed()) {
            const std::vector<Table1Row> rows = run_table1(cfg, threads);
            const std::vector<Table1Summary> summary = summarize_table1(rows);
            const std::string path = out_path.empty() ? (std::filesystem::path(cfg.output_dir) / "table1.csv").string()
                                                      : out_path;
            emit(path, out, [&](std::ostream& os) { write_table1_csv(os, rows, summary); });
            write_table1_pivot(out, summary);
        } else if (crv->parsed()) {
            if (!u_opt->count() && !v_opt->count() && !config_path.empty()) {
                const ReparamUV q = to_uv(cfg.true_params);
                u = q.u;
                v = q.v;
            }
            std::vector<double> grid = grid_opt->count() ? sigma_grid : make_grid(s_min, s_max, s_step);
            if (grid.empty()) throw UsageError("deriv-curve: empty sigma grid");
            if (!(u > 0.0) || !(v > 0.0)) throw UsageError("deriv-curve: u and v must be positive");
            for (double s : grid) {
                if (!(s > 0.0)) throw UsageError("deriv-curve: sigma values must be positive");
            }
            const std::vector<CurvePoint> curve = deriv_curve(u, v, cfg.h, grid, cfg.N);
            emit(out_path, out, [&](std::ostream& os) {
                os << "sigma,deriv\n";
                for (const auto& p : curve) os << format_number(p.sigma) << ',' << format_number(p.deriv) << '\n';
            });
        }
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitNumerical;
    }
    return kExitOk;
}

}  // namespace rou::cli

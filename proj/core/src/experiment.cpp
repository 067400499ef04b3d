#include "curvatlas/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>
#include <thread>

#include "curvatlas/capacity.hpp"
#include "curvatlas/crossings.hpp"
#include "curvatlas/metric.hpp"
#include "curvatlas/regularity.hpp"

namespace curvatlas {

namespace {

constexpr const char* kVersion = "curvatlas 1.0.0";

std::string fstr(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    std::size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        double out = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("trailing");
        return out;
    } catch (const std::exception&) {
        throw ConfigError("config: key '" + key + "': not a number: '" + v + "'");
    }
}

long parse_long(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        long out = std::stol(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("trailing");
        return out;
    } catch (const std::exception&) {
        throw ConfigError("config: key '" + key + "': not an integer: '" + v + "'");
    }
}

std::uint64_t parse_u64(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        std::uint64_t out = std::stoull(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("trailing");
        return out;
    } catch (const std::exception&) {
        throw ConfigError("config: key '" + key + "': not an unsigned integer: '" + v + "'");
    }
}

std::vector<double> parse_list(const std::string& key, const std::string& v) {
    std::vector<double> out;
    std::string item;
    std::istringstream is(v);
    while (std::getline(is, item, ',')) {
        item = trim(item);
        if (item.empty()) continue;
        out.push_back(parse_double(key, item));
    }
    return out;
}

// Standard error of the least-squares slope over the (x, y) pairs.
double slope_stderr(const std::vector<double>& xs, const std::vector<double>& ys,
                    double slope, double intercept) {
    const std::size_t n = xs.size();
    if (n < 3) return 0.0;
    double mx = 0.0;
    for (double x : xs) mx += x;
    mx /= static_cast<double>(n);
    double sxx = 0.0, ssr = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        const double r = ys[i] - intercept - slope * xs[i];
        ssr += r * r;
    }
    if (sxx <= 0.0) return 0.0;
    return std::sqrt(ssr / static_cast<double>(n - 2) / sxx);
}

double fit_stderr(const CrossingEstimate& est) {
    std::vector<double> xs, ys;
    for (const auto& cell : est.table) {
        if (cell.p > 0.0) {
            xs.push_back(std::log(1.0 / cell.ratio));
            ys.push_back(std::log(cell.p));
        }
    }
    return slope_stderr(xs, ys, est.fit.exponent, est.fit.intercept);
}

struct TrialOut {
    std::vector<std::string> lines;
    std::vector<double> values;
    bool ok = true;
    std::string error;
};

// Runs fn(trial, out) for every trial index, optionally across threads.
// Outputs are merged in trial order, so the schedule cannot affect results.
std::vector<TrialOut> parallel_trials(long trials, int threads,
                                      const std::function<void(long, TrialOut&)>& fn) {
    std::vector<TrialOut> results(static_cast<std::size_t>(trials));
    auto run_one = [&](long t) {
        TrialOut& out = results[static_cast<std::size_t>(t)];
        try {
            fn(t, out);
        } catch (const std::exception& e) {
            out.ok = false;
            out.error = e.what();
        }
    };
    threads = std::max(1, threads);
    if (threads == 1 || trials <= 1) {
        for (long t = 0; t < trials; ++t) run_one(t);
    } else {
        std::atomic<long> next{0};
        auto worker = [&]() {
            for (long t; (t = next.fetch_add(1)) < trials;) run_one(t);
        };
        std::vector<std::thread> pool;
        const int n = std::min<long>(threads, trials);
        pool.reserve(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    return results;
}

// Collects per-trial lines, enforces the 1% failed-trial budget, and returns
// the failure count.
long merge_trials(const std::vector<TrialOut>& results, ResultRecord& rec) {
    long failed = 0;
    for (std::size_t t = 0; t < results.size(); ++t) {
        if (!results[t].ok) {
            ++failed;
            rec.metrics.push_back("trial=" + std::to_string(t) +
                                  " failed error=" + results[t].error);
        } else {
            for (const auto& line : results[t].lines) rec.metrics.push_back(line);
        }
    }
    if (failed * 100 > static_cast<long>(results.size()))
        throw ExperimentAbort("failed trials (" + std::to_string(failed) + "/" +
                              std::to_string(results.size()) + ") exceed the 1% budget");
    return failed;
}

const PolyCurve& principal_curve(const CurveConfig& F) {
    if (F.curves.empty()) throw std::runtime_error("empty configuration");
    std::size_t best = 0;
    double len = -1.0;
    for (std::size_t i = 0; i < F.curves.size(); ++i) {
        if (F.curves[i].length() > len) {
            len = F.curves[i].length();
            best = i;
        }
    }
    return F.curves[best];
}

ScaleLadder ladder_for(const ExperimentConfig& cfg, const CurveConfig& F) {
    ScaleLadder lad;
    lad.gamma = cfg.param("gamma", 8.0);
    lad.k0 = static_cast<int>(cfg.param("k0", 6.0));
    lad.k_max = static_cast<int>(cfg.param("kmax", static_cast<double>(lad.k0)));
    lad.L0 = cfg.param("L0", span(principal_curve(F)));
    lad.validate();
    return lad;
}

void run_lambda_scan(const ExperimentConfig& cfg, ResultRecord& rec) {
    std::vector<int> ks = cfg.k_values;
    if (ks.empty()) ks.push_back(1);
    for (int k : ks) {
        CrossingEstimate est = estimate_lambda(cfg.generator, k, cfg.ratios, cfg.trials,
                                               cfg.seed, 1);
        const double se = fit_stderr(est);
        rec.metrics.push_back("lambda k=" + std::to_string(k) + " value=" +
                              fstr(est.fit.exponent) + " stderr=" + fstr(se) + " cells=" +
                              std::to_string(est.table.size()) + " excluded=" +
                              std::to_string(est.excluded_cells) + " fit_ok=" +
                              (est.fit_ok ? "1" : "0"));
        rec.tables["lambda_k" + std::to_string(k)] = est.csv();
    }
}

void run_rho_scan(const ExperimentConfig& cfg, ResultRecord& rec) {
    // Build a well separated axis-aligned cylinder family across the middle
    // of a probe sample's bounding box: unit u, length u, width u/2, gaps 2u
    // (>= the cylinder diameter sqrt(u^2 + u^2/4)).
    const CurveConfig probe = draw_config(cfg.generator, 0);
    const PolyCurve& c = principal_curve(probe);
    Box bb{c.vertices().front(), c.vertices().front()};
    for (const auto& cur : probe.curves)
        for (const auto& v : cur.vertices())
            for (int d = 0; d < bb.dim(); ++d) {
                bb.lo[d] = std::min(bb.lo[d], v[d]);
                bb.hi[d] = std::max(bb.hi[d], v[d]);
            }
    const int count = std::max(1, static_cast<int>(cfg.param("k", 3.0)));
    const double W = bb.hi[0] - bb.lo[0];
    if (!(W > 0.0)) throw ConfigError("rho_scan: degenerate sample domain");
    const double u = W / (3.0 * count);
    Point mid = bb.lo;
    for (int d = 0; d < bb.dim(); ++d) mid[d] = 0.5 * (bb.lo[d] + bb.hi[d]);
    std::vector<Cylinder> family;
    for (int i = 0; i < count; ++i) {
        Cylinder cyl;
        cyl.face_a = mid;
        cyl.face_b = mid;
        cyl.face_a[0] = bb.lo[0] + 3.0 * i * u;
        cyl.face_b[0] = cyl.face_a[0] + u;
        cyl.width = 0.5 * u;
        family.push_back(cyl);
    }
    CrossingEstimate est = estimate_rho(cfg.generator, family, cfg.trials, cfg.seed);
    rec.metrics.push_back("rho log=" + fstr(est.fit.exponent) + " value=" +
                          fstr(std::exp(est.fit.exponent)) + " stderr=" + fstr(fit_stderr(est)) +
                          " cells=" + std::to_string(est.table.size()) + " fit_ok=" +
                          (est.fit_ok ? "1" : "0"));
    rec.tables["rho"] = est.csv();
}

void run_sparsity(const ExperimentConfig& cfg, ResultRecord& rec) {
    const bool anchored = cfg.param("anchored", 1.0) != 0.0;
    const double tol = cfg.param("tol", -1.0);
    const double m = cfg.param("m", 2.0);
    auto results = parallel_trials(cfg.trials, cfg.threads, [&](long t, TrialOut& out) {
        const CurveConfig F = draw_config(cfg.generator, static_cast<std::uint64_t>(t));
        const ScaleLadder lad = ladder_for(cfg, F);
        const RunScan scan = detect_straight_runs(F, lad, tol, anchored);
        const SparsityVerdict v = sparsity_check(scan, lad);
        std::string line = "trial=" + std::to_string(t) + " sparse=" + (v.sparse ? "1" : "0") +
                           " runs=" + std::to_string(scan.runs.size()) +
                           " skipped=" + std::to_string(scan.skipped_scales) +
                           " chain=" + std::to_string(v.witness.size());
        if (!cfg.ratios.empty()) {
            std::vector<GammaReport> reports;
            const double bound =
                dimension_lower_bound(F, static_cast<int>(m), cfg.ratios, lad, &reports);
            line += " dim_lower=" + fstr(bound);
        }
        out.lines.push_back(line);
        out.values.push_back(v.sparse ? 1.0 : 0.0);
    });
    const long failed = merge_trials(results, rec);
    double frac = 0.0;
    long ok = 0;
    for (const auto& r : results)
        if (r.ok) {
            frac += r.values[0];
            ++ok;
        }
    if (ok > 0) frac /= static_cast<double>(ok);
    rec.metrics.push_back("sparse_fraction=" + fstr(frac) + " trials=" +
                          std::to_string(cfg.trials) + " failed=" + std::to_string(failed));
    rec.failed_trials = failed;
}

void run_dimension(const ExperimentConfig& cfg, ResultRecord& rec) {
    const double eps = cfg.param("eps", 0.25);
    auto results = parallel_trials(cfg.trials, cfg.threads, [&](long t, TrialOut& out) {
        const CurveConfig F = draw_config(cfg.generator, static_cast<std::uint64_t>(t));
        const PolyCurve& c = principal_curve(F);
        double lmin = cfg.param("l_min", 0.0), lmax = cfg.param("l_max", 0.0);
        if (!(lmin > 0.0) || !(lmax > 0.0)) default_window(c, lmin, lmax);
        const DimensionSummary ds = dimension_summary(c, eps, lmin, lmax);
        out.lines.push_back("trial=" + std::to_string(t) + " " + ds.tau.record("tau"));
        out.lines.push_back("trial=" + std::to_string(t) + " " + ds.dim_box.record("dimB"));
        out.lines.push_back("trial=" + std::to_string(t) + " alpha_lower=" +
                            fstr(ds.alpha_lower) + " ordering_ok=" + (ds.ordering_ok ? "1" : "0"));
        out.values = {ds.dim_box.exponent, ds.tau.exponent};
    });
    const long failed = merge_trials(results, rec);
    double db = 0.0, tau = 0.0;
    long ok = 0;
    for (const auto& r : results)
        if (r.ok) {
            db += r.values[0];
            tau += r.values[1];
            ++ok;
        }
    if (ok > 0) {
        db /= static_cast<double>(ok);
        tau /= static_cast<double>(ok);
    }
    rec.metrics.push_back("dim_box_mean=" + fstr(db) + " tau_mean=" + fstr(tau) + " trials=" +
                          std::to_string(cfg.trials) + " failed=" + std::to_string(failed));
    rec.failed_trials = failed;

    // Log-log table for trial 0.
    {
        const CurveConfig F = draw_config(cfg.generator, 0);
        const PolyCurve& c = principal_curve(F);
        double lmin = cfg.param("l_min", 0.0), lmax = cfg.param("l_max", 0.0);
        if (!(lmin > 0.0) || !(lmax > 0.0)) default_window(c, lmin, lmax);
        std::ostringstream os;
        os.precision(17);
        os << "l,partition,box\n";
        for (double l = lmax; l >= lmin * (1.0 - 1e-12); l *= 0.5)
            os << l << ',' << partition_count(c, l) << ',' << box_count(c, l) << '\n';
        rec.tables["scales"] = os.str();
    }
}

void run_capacity(const ExperimentConfig& cfg, ResultRecord& rec) {
    const double gamma = cfg.param("gamma", 5.0);
    const int m = static_cast<int>(cfg.param("m", 4.0));
    const int kmax = static_cast<int>(cfg.param("kmax", 2.0));
    const int k0 = static_cast<int>(cfg.param("k0", 0.0));
    const double beta = std::sqrt(static_cast<double>(m) * (m + 1.0));
    const double s = cfg.param("s", std::log(beta) / std::log(gamma) * 0.999);
    const double l = cfg.param("l", 0.0);
    const double qp_tol = cfg.param("qp_tol", 1e-9);
    auto results = parallel_trials(cfg.trials, cfg.threads, [&](long t, TrialOut& out) {
        const CurveConfig F = draw_config(cfg.generator, static_cast<std::uint64_t>(t));
        const FractalHierarchy h = build_hierarchy(principal_curve(F), gamma, m, kmax);
        const DiscreteMeasure mu = hierarchy_measure(h);
        const CapacityResult qp = capacity_qp(mu.support, s, l, qp_tol);
        const double lower = capacity_lower_bound(h, s, k0);
        out.lines.push_back("trial=" + std::to_string(t) + " " + qp.record());
        out.lines.push_back("trial=" + std::to_string(t) + " capacity_lower=" + fstr(lower) +
                            " points=" + std::to_string(mu.support.size()));
        out.values = {qp.capacity, lower};
    });
    const long failed = merge_trials(results, rec);
    rec.metrics.push_back("s=" + fstr(s) + " l=" + fstr(l) + " trials=" +
                          std::to_string(cfg.trials) + " failed=" + std::to_string(failed));
    rec.failed_trials = failed;
}

void run_distance(const ExperimentConfig& cfg, ResultRecord& rec) {
    const double tol = cfg.param("tol", -1.0);
    auto results = parallel_trials(cfg.trials, cfg.threads, [&](long t, TrialOut& out) {
        const CurveConfig A = draw_config(cfg.generator, 2 * static_cast<std::uint64_t>(t));
        const CurveConfig B = draw_config(cfg.generator, 2 * static_cast<std::uint64_t>(t) + 1);
        const double d = config_distance(A, B, tol);
        out.lines.push_back("trial=" + std::to_string(t) + " distance=" + fstr(d));
        out.values.push_back(d);
    });
    const long failed = merge_trials(results, rec);
    double mean = 0.0, worst = 0.0;
    long ok = 0;
    for (const auto& r : results)
        if (r.ok) {
            mean += r.values[0];
            worst = std::max(worst, r.values[0]);
            ++ok;
        }
    if (ok > 0) mean /= static_cast<double>(ok);
    rec.metrics.push_back("distance_mean=" + fstr(mean) + " distance_max=" + fstr(worst) +
                          " trials=" + std::to_string(cfg.trials) + " failed=" +
                          std::to_string(failed));
    rec.failed_trials = failed;
    std::ostringstream os;
    os.precision(17);
    os << "trial,distance\n";
    for (std::size_t t = 0; t < results.size(); ++t)
        if (results[t].ok) os << t << ',' << results[t].values[0] << '\n';
    rec.tables["distance"] = os.str();
}

}  // namespace

ExperimentKind experiment_kind_from_string(const std::string& s) {
    if (s == "lambda_scan") return ExperimentKind::lambda_scan;
    if (s == "rho_scan") return ExperimentKind::rho_scan;
    if (s == "sparsity") return ExperimentKind::sparsity;
    if (s == "dimension") return ExperimentKind::dimension;
    if (s == "capacity") return ExperimentKind::capacity;
    if (s == "distance") return ExperimentKind::distance;
    throw ConfigError("config: unknown experiment kind '" + s + "'");
}

std::string to_string(ExperimentKind k) {
    switch (k) {
        case ExperimentKind::lambda_scan: return "lambda_scan";
        case ExperimentKind::rho_scan: return "rho_scan";
        case ExperimentKind::sparsity: return "sparsity";
        case ExperimentKind::dimension: return "dimension";
        case ExperimentKind::capacity: return "capacity";
        case ExperimentKind::distance: return "distance";
    }
    return "unknown";
}

double ExperimentConfig::param(const std::string& key, double fallback) const {
    auto it = params.find(key);
    return it == params.end() ? fallback : it->second;
}

void ExperimentConfig::validate() const {
    if (trials < 1) throw ConfigError("config: trials must be >= 1");
    if (threads < 1) throw ConfigError("config: threads must be >= 1");
    if (experiment == ExperimentKind::lambda_scan) {
        if (ratios.empty()) throw ConfigError("config: lambda_scan needs ratios");
        for (double r : ratios)
            if (!(r > 0.0) || !(r < 1.0))
                throw ConfigError("config: lambda_scan ratios must lie in (0,1)");
        for (int k : k_values)
            if (k < 1) throw ConfigError("config: k values must be >= 1");
    }
}

ExperimentConfig parse_experiment_config(std::istream& is) {
    ExperimentConfig cfg;
    std::string line, section = "experiment";
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError("config line " + std::to_string(lineno) + ": bad section");
            section = trim(line.substr(1, line.size() - 2));
            if (section != "experiment" && section != "generator")
                throw ConfigError("config: unknown section [" + section + "]");
            continue;
        }
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(lineno) + ": expected key=value");
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        if (key.empty()) throw ConfigError("config line " + std::to_string(lineno) + ": empty key");
        if (section == "experiment") {
            if (key == "kind") cfg.experiment = experiment_kind_from_string(val);
            else if (key == "trials") cfg.trials = parse_long(key, val);
            else if (key == "seed") cfg.seed = parse_u64(key, val);
            else if (key == "threads") cfg.threads = static_cast<int>(parse_long(key, val));
            else if (key == "out" || key == "output" || key == "output_path") cfg.output_path = val;
            else if (key == "ratios" || key == "scales" || key == "gammas")
                cfg.ratios = parse_list(key, val);
            else if (key == "k") {
                cfg.k_values.clear();
                for (double v : parse_list(key, val)) cfg.k_values.push_back(static_cast<int>(v));
            } else cfg.params[key] = parse_double(key, val);
        } else {  // generator
            if (key == "kind") {
                try {
                    cfg.generator.kind = generator_kind_from_string(val);
                } catch (const std::exception& e) {
                    throw ConfigError(std::string("config: ") + e.what());
                }
            } else if (key == "seed") cfg.generator.seed = parse_u64(key, val);
            else cfg.generator.params[key] = parse_double(key, val);
        }
    }
    cfg.validate();
    return cfg;
}

ExperimentConfig load_experiment_config(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("config: cannot open '" + path + "'");
    return parse_experiment_config(is);
}

std::string ResultRecord::metrics_text() const {
    std::ostringstream os;
    os << "experiment=" << experiment_id << '\n';
    os << "[parameters]\n";
    for (const auto& p : parameters) os << p << '\n';
    os << "[metrics]\n";
    for (const auto& m : metrics) os << m << '\n';
    return os.str();
}

std::string ResultRecord::records_text() const {
    std::ostringstream os;
    os << metrics_text();
    os << "[meta]\n";
    os << "wall_time_sec=" << wall_time_sec << '\n';
    os << "version=" << code_version << '\n';
    return os.str();
}

ResultRecord run_experiment(const ExperimentConfig& cfg) {
    cfg.validate();
    ResultRecord rec;
    rec.experiment_id = to_string(cfg.experiment);
    rec.code_version = kVersion;
    rec.parameters.push_back("generator=" + to_string(cfg.generator.kind));
    rec.parameters.push_back("generator_seed=" + std::to_string(cfg.generator.seed));
    for (const auto& [k, v] : cfg.generator.params)
        rec.parameters.push_back("generator." + k + "=" + fstr(v));
    rec.parameters.push_back("trials=" + std::to_string(cfg.trials));
    rec.parameters.push_back("seed=" + std::to_string(cfg.seed));
    if (!cfg.ratios.empty()) {
        std::string s = "scales=";
        for (std::size_t i = 0; i < cfg.ratios.size(); ++i)
            s += (i ? "," : "") + fstr(cfg.ratios[i]);
        rec.parameters.push_back(s);
    }
    if (!cfg.k_values.empty()) {
        std::string s = "k=";
        for (std::size_t i = 0; i < cfg.k_values.size(); ++i)
            s += (i ? "," : "") + std::to_string(cfg.k_values[i]);
        rec.parameters.push_back(s);
    }
    for (const auto& [k, v] : cfg.params) rec.parameters.push_back(k + "=" + fstr(v));

    const auto t0 = std::chrono::steady_clock::now();
    try {
        switch (cfg.experiment) {
            case ExperimentKind::lambda_scan: run_lambda_scan(cfg, rec); break;
            case ExperimentKind::rho_scan: run_rho_scan(cfg, rec); break;
            case ExperimentKind::sparsity: run_sparsity(cfg, rec); break;
            case ExperimentKind::dimension: run_dimension(cfg, rec); break;
            case ExperimentKind::capacity: run_capacity(cfg, rec); break;
            case ExperimentKind::distance: run_distance(cfg, rec); break;
        }
    } catch (const ConfigError&) {
        throw;
    } catch (const ExperimentAbort&) {
        throw;
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("config: ") + e.what());
    } catch (const std::exception& e) {
        throw ExperimentAbort(e.what());
    }
    rec.wall_time_sec =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return rec;
}

void emit_table(const ResultRecord& rec, const std::string& format, const std::string& path) {
    auto write_file = [](const std::string& p, const std::string& text) {
        std::ofstream os(p, std::ios::binary);
        if (!os) throw std::runtime_error("cannot open output file '" + p + "'");
        os << text;
        if (!os) throw std::runtime_error("write failed for '" + p + "'");
    };
    if (format == "records") {
        write_file(path + ".records", rec.records_text());
        return;
    }
    if (format != "csv") throw ConfigError("emit_table: unknown format '" + format + "'");
    if (rec.tables.empty()) {
        write_file(path + ".csv", "key,value\n");
        return;
    }
    for (const auto& [name, csv] : rec.tables) write_file(path + "." + name + ".csv", csv);
}

}  // namespace curvatlas

#include "isinglab/experiment.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <condition_variable>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include "json.hpp"

#include "isinglab/animals.hpp"
#include "isinglab/contours.hpp"
#include "isinglab/errors.hpp"
#include "isinglab/exact.hpp"
#include "isinglab/field.hpp"
#include "isinglab/montecarlo.hpp"
#include "isinglab/rng.hpp"
#include "isinglab/version.hpp"

namespace fs = std::filesystem;

namespace isinglab {

namespace {

std::string fmt(double v) {
    std::array<char, 40> buf;
    auto [p, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), p);
}

std::string fmt(long v) { return std::to_string(v); }
std::string fmt(int v) { return std::to_string(v); }
std::string fmt(std::uint64_t v) { return std::to_string(v); }

std::string join(const std::vector<std::string>& parts, char sep) {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i) out.push_back(sep);
        out += parts[i];
    }
    return out;
}

std::string now_iso8601() {
    std::time_t t =
        std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string hex16(std::uint64_t v) {
    static const char* digits = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[std::size_t(i)] = digits[v & 0xf];
        v >>= 4;
    }
    return out;
}

std::string canonical_config(const RunConfig& c) {
    std::ostringstream ss;
    ss << c.kind << '|' << c.d;
    for (int v : c.L) ss << ' ' << v;
    ss << '|';
    for (double v : c.alpha) ss << ' ' << fmt(v);
    ss << '|';
    for (double v : c.beta) ss << ' ' << fmt(v);
    ss << '|';
    for (double v : c.h_star) ss << ' ' << fmt(v);
    ss << '|';
    for (double v : c.J) ss << ' ' << fmt(v);
    ss << '|';
    for (const auto& v : c.boundary) ss << ' ' << v;
    ss << '|';
    for (int v : c.R) ss << ' ' << v;
    ss << '|';
    for (auto v : c.seeds) ss << ' ' << v;
    ss << '|' << c.sweeps << ' ' << c.burn_in << ' ' << c.thin << ' '
       << c.algorithm << ' ' << c.init << ' ' << c.n_samples << ' '
       << fmt(c.b_star) << ' ' << fmt(c.b);
    ss << '|' << (c.truncation_radius ? fmt(*c.truncation_radius) : "none");
    ss << '|' << c.site_cap << ' ' << c.max_size << ' ' << c.box_radius << ' '
       << c.max_boundary;
    return ss.str();
}

std::string region_descriptor(const Region& r) {
    std::vector<std::string> parts;
    parts.reserve(r.size());
    for (const Site& s : r.sites()) {
        std::string p = std::to_string(s.x) + ":" + std::to_string(s.y);
        if (r.dim() == 3) p += ":" + std::to_string(s.z);
        parts.push_back(std::move(p));
    }
    return join(parts, ';');
}

Algorithm algorithm_from(const std::string& name) {
    if (name == "metropolis") return Algorithm::metropolis;
    if (name == "wolff") return Algorithm::wolff;
    return Algorithm::mixed;
}

InitMode init_from(const std::string& name) {
    if (name == "all_plus") return InitMode::all_plus;
    if (name == "all_minus") return InitMode::all_minus;
    if (name == "random") return InitMode::random;
    return InitMode::ground_uniform;
}

struct Point {
    std::map<std::string, std::string> fields;
    std::function<std::vector<std::string>(std::string* diag)> work;
};

void append_diag(std::string* diag, const nlohmann::json& doc) {
    if (!diag) return;
    *diag += doc.dump();
    *diag += '\n';
}

nlohmann::json diagnostics_doc(const ClusterDiagnostics& cd,
                               const std::map<std::string, std::string>& fields,
                               long sweep) {
    nlohmann::json doc;
    for (const auto& [k, v] : fields) doc[k] = v;
    doc["sweep"] = sweep;
    doc["C_L_size"] = cd.C_L.size();
    std::vector<long> mk;
    for (const auto& [k, v] : cd.M_k_sizes) mk.push_back(v);
    doc["M_k"] = mk;
    if (cd.has_s_sequence) {
        doc["s"] = cd.s_sequence;
        doc["G_event"] = cd.G_event;
        doc["b_ok"] = cd.b_ok;
    }
    doc["penetration_empty"] = cd.penetration_empty;
    return doc;
}

std::vector<Point> build_points(const RunConfig& cfg, bool diagnostics) {
    std::vector<Point> points;
    ExactOptions eopts;
    eopts.site_cap = cfg.site_cap;

    auto field_of = [&cfg](double h, double a) {
        return FieldSpec(h, a, cfg.truncation_radius);
    };

    if (cfg.kind == "exact-verify") {
        for (int L : cfg.L)
            for (double a : cfg.alpha)
                for (double bt : cfg.beta)
                    for (double h : cfg.h_star)
                        for (double j : cfg.J) {
                            Point p;
                            p.fields = {{"L", fmt(L)},      {"alpha", fmt(a)},
                                        {"beta", fmt(bt)},  {"h_star", fmt(h)},
                                        {"J", fmt(j)},      {"d", fmt(cfg.d)}};
                            p.work = [=, &cfg](std::string*) {
                                Region region = cube(L, cfg.d);
                                CouplingSpec c(j, bt);
                                FieldSpec f = field_of(h, a);
                                double hsum = field_sum(region, f);
                                std::string trunc = cfg.truncation_radius
                                                        ? fmt(*cfg.truncation_radius)
                                                        : "none";
                                std::vector<std::string> rows;
                                for (const char* bname : {"plus", "minus"}) {
                                    Boundary bd = std::string(bname) == "plus"
                                                      ? Boundary::plus()
                                                      : Boundary::minus();
                                    for (const char* cname :
                                         {"unrestricted", "slim_only"}) {
                                        auto con =
                                            std::string(cname) == "unrestricted"
                                                ? EnsembleConstraint::unrestricted()
                                                : EnsembleConstraint::slim_only();
                                        ExactResult r = partition_function(
                                            region, bd, c, f, con, eopts);
                                        double fw = 0.0;
                                        bool has_fw = r.expectations.count(
                                            "field_weighted_magnetization");
                                        if (has_fw)
                                            fw = r.expectations.at(
                                                "field_weighted_magnetization");
                                        rows.push_back(join(
                                            {fmt(cfg.d), fmt(L), fmt(a), fmt(bt),
                                             fmt(h), fmt(j), trunc, bname, cname,
                                             fmt(r.log_Z), fmt(r.config_count),
                                             fmt(r.expectations.at("magnetization")),
                                             fmt(r.expectations.at(
                                                 site_key(Site{0, 0, 0}))),
                                             has_fw ? fmt(fw) : "nan", fmt(hsum)},
                                            ','));
                                    }
                                }
                                return rows;
                            };
                            points.push_back(std::move(p));
                        }
    } else if (cfg.kind == "peierls-scan") {
        for (int L : cfg.L)
            for (double a : cfg.alpha)
                for (double bt : cfg.beta)
                    for (double h : cfg.h_star)
                        for (double j : cfg.J) {
                            Point p;
                            p.fields = {{"L", fmt(L)},      {"alpha", fmt(a)},
                                        {"beta", fmt(bt)},  {"h_star", fmt(h)},
                                        {"J", fmt(j)},      {"d", fmt(cfg.d)}};
                            p.work = [=, &cfg](std::string*) {
                                Region box = cube(L, cfg.d);
                                CouplingSpec c(j, bt);
                                FieldSpec f = field_of(h, a);
                                std::vector<std::string> rows;
                                for_each_candidate_interior(
                                    box, std::size_t(cfg.max_size),
                                    [&](const Region& I) {
                                        PeierlsCondition pc =
                                            peierls_condition(I, c, f);
                                        std::string ratio = "nan", bound = "nan",
                                                    ok = "nan";
                                        if (pc.holds) {
                                            PeierlsRatio pr = peierls_ratio_check(
                                                I, c, f, eopts);
                                            ratio = fmt(pr.ratio);
                                            bound = fmt(pr.bound);
                                            ok = pr.ok ? "1" : "0";
                                        }
                                        rows.push_back(join(
                                            {fmt(cfg.d), fmt(L), fmt(a), fmt(bt),
                                             fmt(h), fmt(j), region_descriptor(I),
                                             fmt(long(I.size())),
                                             fmt(boundary_edge_count(I)),
                                             fmt(field_sum(I, f)), fmt(pc.lhs),
                                             fmt(pc.rhs), pc.holds ? "1" : "0",
                                             ratio, bound, ok},
                                            ','));
                                        return true;
                                    });
                                return rows;
                            };
                            points.push_back(std::move(p));
                        }
    } else if (cfg.kind == "field-scan") {
        for (double a : cfg.alpha)
            for (double bt : cfg.beta)
                for (double h : cfg.h_star)
                    for (double j : cfg.J) {
                        Point p;
                        p.fields = {{"alpha", fmt(a)},
                                    {"beta", fmt(bt)},
                                    {"h_star", fmt(h)},
                                    {"J", fmt(j)},
                                    {"d", fmt(cfg.d)}};
                        p.work = [=, &cfg](std::string*) {
                            CouplingSpec c(j, bt);
                            FieldSpec f = field_of(h, a);
                            int rmax = *std::max_element(cfg.R.begin(),
                                                         cfg.R.end());
                            std::vector<double> profile =
                                ball_field_sum_profile(rmax, f, cfg.d);
                            auto n0 = lemma21_threshold_scan(c, f, cfg.d, rmax);
                            double cthr =
                                std::pow(2.0 * cfg.d,
                                         double(cfg.d) / double(cfg.d - 1));
                            int rtrunc = truncation_radius_for(c, f, cthr, cfg.d);
                            std::string trunc =
                                cfg.truncation_radius
                                    ? fmt(*cfg.truncation_radius)
                                    : "none";
                            std::vector<std::string> rows;
                            for (int R : cfg.R) {
                                rows.push_back(join(
                                    {fmt(cfg.d), fmt(a), fmt(bt), fmt(h), fmt(j),
                                     trunc, fmt(R),
                                     fmt(long(ball(R, cfg.d).size())),
                                     fmt(profile[std::size_t(R)]),
                                     fmt(profile[std::size_t(R)] /
                                         std::pow(double(R), double(cfg.d - 1))),
                                     n0 ? fmt(*n0) : "none", fmt(rtrunc)},
                                    ','));
                            }
                            return rows;
                        };
                        points.push_back(std::move(p));
                    }
    } else if (cfg.kind == "mc-gap") {
        for (int L : cfg.L)
            for (double a : cfg.alpha)
                for (double bt : cfg.beta)
                    for (double h : cfg.h_star)
                        for (double j : cfg.J)
                            for (const std::string& bd : cfg.boundary)
                                for (std::uint64_t seed : cfg.seeds) {
                                    Point p;
                                    p.fields = {
                                        {"L", fmt(L)},      {"alpha", fmt(a)},
                                        {"beta", fmt(bt)},  {"h_star", fmt(h)},
                                        {"J", fmt(j)},      {"d", fmt(cfg.d)},
                                        {"boundary", bd},   {"seed", fmt(seed)}};
                                    const auto fields = p.fields;
                                    p.work = [=, &cfg](std::string* diag) {
                                        ChainConfig cc;
                                        cc.dim = cfg.d;
                                        cc.L = L;
                                        cc.boundary = bd == "plus"
                                                          ? Boundary::plus()
                                                          : Boundary::minus();
                                        cc.c = CouplingSpec(j, bt);
                                        cc.f = field_of(h, a);
                                        cc.sweeps = cfg.sweeps;
                                        cc.burn_in = cfg.burn_in;
                                        cc.thin = cfg.thin;
                                        cc.algorithm =
                                            algorithm_from(cfg.algorithm);
                                        cc.init = init_from(cfg.init);
                                        std::string desc = cfg.kind + "|" +
                                                           fmt(L) + "|" + bd +
                                                           "|" + fmt(a) + "|" +
                                                           fmt(bt) + "|" + fmt(h) +
                                                           "|" + fmt(j);
                                        cc.seed = seed ^ fnv1a(desc);
                                        SampleHook hook;
                                        bool want_diag = diag && bd == "minus";
                                        double bval =
                                            cfg.b > 0
                                                ? cfg.b
                                                : (a < 1.0
                                                       ? 0.009 /
                                                             double(a_sequence(
                                                                        a, cfg.d)
                                                                        .n_star)
                                                       : 0.009);
                                        if (want_diag)
                                            hook = [&, bval](
                                                       const SpinConfig& s,
                                                       long t) {
                                                ClusterDiagnostics cd =
                                                    diagnose_cluster(
                                                        s, L, a, bval,
                                                        cfg.b_star);
                                                append_diag(
                                                    diag,
                                                    diagnostics_doc(cd, fields,
                                                                    t));
                                            };
                                        ChainResult r = run_chain(cc, hook);
                                        std::vector<std::string> rows;
                                        for (const char* obs :
                                             {"sigma0", "magnetization"}) {
                                            const Estimate& e =
                                                std::string(obs) == "sigma0"
                                                    ? r.sigma0
                                                    : r.magnetization;
                                            rows.push_back(join(
                                                {fmt(L), fmt(cfg.d), fmt(a),
                                                 fmt(bt), fmt(h), fmt(j), bd,
                                                 cfg.algorithm, fmt(seed), obs,
                                                 fmt(e.mean), fmt(e.std_error),
                                                 fmt(long(e.n_samples)),
                                                 fmt(e.autocorrelation_time)},
                                                ','));
                                        }
                                        return rows;
                                    };
                                    points.push_back(std::move(p));
                                }
    } else if (cfg.kind == "penetration") {
        for (int L : cfg.L)
            for (double a : cfg.alpha)
                for (double bt : cfg.beta)
                    for (double h : cfg.h_star)
                        for (double j : cfg.J)
                            for (std::uint64_t seed : cfg.seeds) {
                                Point p;
                                p.fields = {{"L", fmt(L)},     {"alpha", fmt(a)},
                                            {"beta", fmt(bt)}, {"h_star", fmt(h)},
                                            {"J", fmt(j)},     {"d", fmt(cfg.d)},
                                            {"seed", fmt(seed)}};
                                const auto fields = p.fields;
                                p.work = [=, &cfg](std::string* diag) {
                                    ChainConfig cc;
                                    cc.dim = cfg.d;
                                    cc.L = L;
                                    cc.boundary = Boundary::minus();
                                    cc.c = CouplingSpec(j, bt);
                                    cc.f = field_of(h, a);
                                    cc.burn_in = cfg.burn_in;
                                    cc.thin = cfg.thin;
                                    cc.algorithm = algorithm_from(cfg.algorithm);
                                    cc.init = init_from(cfg.init);
                                    std::string desc = cfg.kind + "|" + fmt(L) +
                                                       "|" + fmt(a) + "|" +
                                                       fmt(bt) + "|" + fmt(h) +
                                                       "|" + fmt(j);
                                    cc.seed = seed ^ fnv1a(desc);
                                    cc.sweeps = cc.resolved_burn_in() +
                                                cfg.n_samples * cc.thin;
                                    const int m = int(std::floor(
                                        double(L) * (1.0 - cfg.b_star)));
                                    double bval =
                                        cfg.b > 0
                                            ? cfg.b
                                            : (a < 1.0
                                                   ? 0.009 /
                                                         double(
                                                             a_sequence(a, cfg.d)
                                                                 .n_star)
                                                   : 0.009);
                                    long hits = 0;
                                    run_chain(cc, [&](const SpinConfig& s,
                                                      long t) {
                                        Region cl = minus_boundary_cluster(s);
                                        bool empty = true;
                                        for (const Site& site : cl.sites())
                                            if (linf_norm(site) <= m) {
                                                empty = false;
                                                break;
                                            }
                                        if (empty) ++hits;
                                        if (diag && a < 1.0) {
                                            ClusterDiagnostics cd =
                                                diagnose_cluster(s, L, a, bval,
                                                                 cfg.b_star);
                                            append_diag(
                                                diag, diagnostics_doc(cd, fields,
                                                                      t));
                                        }
                                    });
                                    BinomialCI ci =
                                        binomial_ci(hits, cfg.n_samples);
                                    return std::vector<std::string>{join(
                                        {fmt(L), fmt(cfg.d), fmt(a), fmt(bt),
                                         fmt(h), fmt(j), fmt(cfg.b_star),
                                         fmt(seed), fmt(cfg.n_samples), fmt(hits),
                                         fmt(double(hits) / double(cfg.n_samples)),
                                         fmt(ci.lo), fmt(ci.hi)},
                                        ',')};
                                };
                                points.push_back(std::move(p));
                            }
    } else if (cfg.kind == "animals") {
        for (double bt : cfg.beta)
            for (double j : cfg.J) {
                Point p;
                p.fields = {{"beta", fmt(bt)}, {"J", fmt(j)}, {"d", fmt(cfg.d)}};
                p.work = [=, &cfg](std::string*) {
                    auto counts =
                        star_animal_counts(std::size_t(cfg.max_size), cfg.d);
                    std::vector<std::string> rows;
                    double partial = 0.0;
                    for (std::size_t n = 1; n < counts.size(); ++n) {
                        partial += double(counts[n]) *
                                   std::exp(-2.0 * bt * j * double(n));
                        rows.push_back(join({fmt(cfg.d), fmt(bt), fmt(j),
                                             fmt(long(n)),
                                             fmt(std::uint64_t(counts[n])),
                                             fmt(partial)},
                                            ','));
                    }
                    return rows;
                };
                points.push_back(std::move(p));
            }
    } else if (cfg.kind == "fat-sum") {
        for (double a : cfg.alpha)
            for (double bt : cfg.beta)
                for (double h : cfg.h_star)
                    for (double j : cfg.J) {
                        Point p;
                        p.fields = {{"alpha", fmt(a)},
                                    {"beta", fmt(bt)},
                                    {"h_star", fmt(h)},
                                    {"J", fmt(j)},
                                    {"d", fmt(cfg.d)}};
                        p.work = [=, &cfg](std::string*) {
                            CouplingSpec c(j, bt);
                            FieldSpec f = field_of(h, a);
                            FatSum fs = fat_sum_partial(c, f, cfg.box_radius,
                                                        cfg.max_boundary);
                            return std::vector<std::string>{join(
                                {fmt(cfg.d), fmt(a), fmt(bt), fmt(h), fmt(j),
                                 fmt(cfg.box_radius), fmt(cfg.max_boundary),
                                 fmt(fs.terms), fmt(fs.value)},
                                ',')};
                        };
                        points.push_back(std::move(p));
                    }
    }
    (void)diagnostics;
    return points;
}

}  // namespace

const std::map<std::string, std::string>& csv_schemas() {
    static const std::map<std::string, std::string> schemas = {
        {"exact-verify",
         "d,L,alpha,beta,h_star,J,truncation_radius,boundary,constraint,log_Z,"
         "config_count,magnetization,sigma_origin,field_weighted_magnetization,"
         "field_sum"},
        {"peierls-scan",
         "d,L,alpha,beta,h_star,J,interior,size,boundary_edges,field_sum,"
         "peierls_lhs,peierls_rhs,peierls_holds,ratio,bound,holds"},
        {"field-scan",
         "d,alpha,beta,h_star,J,truncation_radius,R,ball_sites,ball_field_sum,"
         "surface_normalized,lemma21_min_volume,truncation_radius_formula"},
        {"mc-gap",
         "L,d,alpha,beta,h_star,J,boundary,algorithm,seed,observable,mean,"
         "std_error,n_samples,tau"},
        {"penetration",
         "L,d,alpha,beta,h_star,J,b_star,seed,n_samples,hits,fraction,ci_lo,"
         "ci_hi"},
        {"animals", "d,beta,J,size,count,partial_sum"},
        {"fat-sum",
         "d,alpha,beta,h_star,J,box_radius,max_boundary,terms,value"},
    };
    return schemas;
}

std::vector<RunRecord> run(const RunConfig& cfg, const RunOptions& opts) {
    cfg.validate();
    const std::string out_dir = opts.out_dir.empty() ? cfg.out_dir : opts.out_dir;
    const int workers = std::max(1, opts.workers);

    std::vector<Point> points = build_points(cfg, opts.diagnostics);
    if (points.empty()) throw ValidationError("experiment grid is empty");

    const std::string kind_dir = out_dir + "/" + cfg.kind;
    fs::create_directories(kind_dir);
    const std::string hash = hex16(fnv1a(canonical_config(cfg)));

    std::vector<RunRecord> records(points.size());
    std::vector<std::string> diags(points.size());
    std::vector<char> done(points.size(), 0);
    std::atomic<std::size_t> next{0};
    std::mutex mtx;
    std::condition_variable cv;

    auto worker = [&] {
        for (;;) {
            std::size_t i = next.fetch_add(1);
            if (i >= points.size()) return;
            RunRecord r;
            r.kind = cfg.kind;
            r.point = points[i].fields;
            r.version = ISINGLAB_VERSION;
            r.rng_id = RNG_ID;
            r.started_at = now_iso8601();
            try {
                r.csv_rows =
                    points[i].work(opts.diagnostics ? &diags[i] : nullptr);
                r.status = "ok";
            } catch (const std::exception& e) {
                r.status = "error";
                r.error = e.what();
            }
            r.finished_at = now_iso8601();
            {
                std::lock_guard<std::mutex> lock(mtx);
                records[i] = std::move(r);
                done[i] = 1;
            }
            cv.notify_all();
        }
    };

    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);

    const std::string csv_path = kind_dir + "/run-" + hash + ".csv";
    try {
        std::ofstream csv(csv_path, std::ios::trunc);
        if (!csv) throw ValidationError("cannot write " + csv_path);
        csv << csv_schemas().at(cfg.kind) << "\n";
        std::ofstream diagf;
        if (opts.diagnostics) {
            diagf.open(kind_dir + "/diagnostics-" + hash + ".jsonl",
                       std::ios::trunc);
            if (!diagf)
                throw ValidationError("cannot write diagnostics file");
        }
        for (std::size_t i = 0; i < points.size(); ++i) {
            {
                std::unique_lock<std::mutex> lock(mtx);
                cv.wait(lock, [&] { return done[i] == 1; });
            }
            const RunRecord& r = records[i];
            for (const std::string& row : r.csv_rows) csv << row << "\n";
            csv.flush();
            if (opts.diagnostics && !diags[i].empty()) diagf << diags[i];

            nlohmann::json manifest;
            manifest["kind"] = r.kind;
            manifest["version"] = r.version;
            manifest["rng_id"] = r.rng_id;
            manifest["point"] = r.point;
            manifest["status"] = r.status;
            if (!r.error.empty()) manifest["error"] = r.error;
            manifest["rows"] = r.csv_rows.size();
            manifest["started_at"] = r.started_at;
            manifest["finished_at"] = r.finished_at;
            char idx[16];
            std::snprintf(idx, sizeof idx, "%04zu", i);
            std::ofstream mf(kind_dir + "/manifest-" + hash + "-" + idx +
                             ".json");
            if (!mf) throw ValidationError("cannot write manifest");
            mf << manifest.dump(2) << "\n";
        }
    } catch (...) {
        next.store(points.size());
        for (auto& t : pool) t.join();
        throw;
    }
    for (auto& t : pool) t.join();
    return records;
}

namespace {

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    for (;;) {
        std::size_t comma = line.find(',', start);
        if (comma == std::string::npos) {
            out.push_back(line.substr(start));
            return out;
        }
        out.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
}

// rows per kind, already schema-checked
std::map<std::string, std::vector<std::vector<std::string>>> load_results(
    const std::string& results_dir) {
    std::map<std::string, std::vector<std::vector<std::string>>> rows;
    for (const std::string& kind : experiment_kinds()) {
        fs::path dir = fs::path(results_dir) / kind;
        if (!fs::exists(dir)) continue;
        std::vector<fs::path> files;
        for (const auto& entry : fs::directory_iterator(dir)) {
            std::string name = entry.path().filename().string();
            if (name.rfind("run-", 0) == 0 &&
                entry.path().extension() == ".csv")
                files.push_back(entry.path());
        }
        std::sort(files.begin(), files.end());
        for (const fs::path& file : files) {
            std::ifstream in(file);
            std::string header;
            if (!std::getline(in, header)) continue;
            if (!header.empty() && header.back() == '\r') header.pop_back();
            if (header != csv_schemas().at(kind))
                throw ValidationError("schema mismatch in " + file.string());
            std::string line;
            while (std::getline(in, line)) {
                if (!line.empty() && line.back() == '\r') line.pop_back();
                if (!line.empty()) rows[kind].push_back(split_csv(line));
            }
        }
    }
    return rows;
}

int column(const std::string& kind, const std::string& name) {
    std::vector<std::string> cols = split_csv(csv_schemas().at(kind));
    for (std::size_t i = 0; i < cols.size(); ++i)
        if (cols[i] == name) return int(i);
    throw ValidationError("no column " + name + " for " + kind);
}

}  // namespace

Report report(const std::string& results_dir) {
    auto rows = load_results(results_dir);
    Report rep;
    std::ostringstream text;

    if (rows.count("mc-gap")) {
        const auto& rs = rows.at("mc-gap");
        int cL = column("mc-gap", "L"), cB = column("mc-gap", "boundary");
        int cObs = column("mc-gap", "observable");
        int cMean = column("mc-gap", "mean"), cSe = column("mc-gap", "std_error");
        int cAlpha = column("mc-gap", "alpha"), cBeta = column("mc-gap", "beta");
        int cSeed = column("mc-gap", "seed");
        // key: alpha|beta|seed|L -> (mean, se) per boundary
        std::map<std::string, std::array<double, 4>> gap;
        std::map<std::string, std::array<bool, 2>> have;
        for (const auto& r : rs) {
            if (r[std::size_t(cObs)] != "sigma0") continue;
            std::string key = r[std::size_t(cAlpha)] + "|" +
                              r[std::size_t(cBeta)] + "|" +
                              r[std::size_t(cSeed)] + "|" + r[std::size_t(cL)];
            bool plus = r[std::size_t(cB)] == "plus";
            double mean = std::stod(r[std::size_t(cMean)]);
            double se = std::stod(r[std::size_t(cSe)]);
            auto& slot = gap[key];
            auto& seen = have[key];
            slot[plus ? 0 : 2] = mean;
            slot[plus ? 1 : 3] = se;
            seen[plus ? 0 : 1] = true;
        }
        std::string plot = "alpha,beta,seed,L,gap,std_error\n";
        text << "gap vs L (m_plus(0) - m_minus(0))\n";
        text << "  alpha    beta    seed  L     gap        se\n";
        bool any = false;
        for (const auto& [key, slot] : gap) {
            if (!have[key][0] || !have[key][1]) continue;
            any = true;
            double g = slot[0] - slot[2];
            double se = std::sqrt(slot[1] * slot[1] + slot[3] * slot[3]);
            std::string k2 = key;
            std::replace(k2.begin(), k2.end(), '|', ',');
            plot += k2 + "," + fmt(g) + "," + fmt(se) + "\n";
            std::string pretty = k2;
            std::replace(pretty.begin(), pretty.end(), ',', ' ');
            text << "  " << pretty << "  " << fmt(g) << "  " << fmt(se) << "\n";
        }
        if (any) {
            rep.plot_files["gap_vs_L.csv"] = plot;
            rep.no_data = false;
        }
        text << "\n";
    }

    if (rows.count("penetration")) {
        const auto& rs = rows.at("penetration");
        int cL = column("penetration", "L");
        int cAlpha = column("penetration", "alpha");
        int cBeta = column("penetration", "beta");
        int cFrac = column("penetration", "fraction");
        int cLo = column("penetration", "ci_lo"), cHi = column("penetration", "ci_hi");
        std::string plot = "alpha,beta,L,fraction,ci_lo,ci_hi\n";
        text << "penetration fraction (empty-core samples)\n";
        text << "  alpha    beta    L     fraction   ci_lo      ci_hi\n";
        for (const auto& r : rs) {
            plot += r[std::size_t(cAlpha)] + "," + r[std::size_t(cBeta)] + "," +
                    r[std::size_t(cL)] + "," + r[std::size_t(cFrac)] + "," +
                    r[std::size_t(cLo)] + "," + r[std::size_t(cHi)] + "\n";
            text << "  " << r[std::size_t(cAlpha)] << "  "
                 << r[std::size_t(cBeta)] << "  " << r[std::size_t(cL)] << "  "
                 << r[std::size_t(cFrac)] << "  " << r[std::size_t(cLo)] << "  "
                 << r[std::size_t(cHi)] << "\n";
        }
        if (!rs.empty()) {
            rep.plot_files["penetration_vs_L.csv"] = plot;
            rep.no_data = false;
        }
        text << "\n";
    }

    if (rows.count("exact-verify")) {
        const auto& rs = rows.at("exact-verify");
        int cL = column("exact-verify", "L");
        int cAlpha = column("exact-verify", "alpha");
        int cBeta = column("exact-verify", "beta");
        int cH = column("exact-verify", "h_star");
        int cBd = column("exact-verify", "boundary");
        int cCon = column("exact-verify", "constraint");
        int cZ = column("exact-verify", "log_Z");
        int cFs = column("exact-verify", "field_sum");
        std::map<std::string, std::array<double, 3>> slim;  // logZ-,logZ+,fsum
        std::map<std::string, std::array<bool, 2>> have;
        std::map<std::string, double> betas;
        for (const auto& r : rs) {
            if (r[std::size_t(cCon)] != "slim_only") continue;
            std::string key = r[std::size_t(cAlpha)] + "|" +
                              r[std::size_t(cBeta)] + "|" + r[std::size_t(cH)] +
                              "|" + r[std::size_t(cL)];
            bool minus = r[std::size_t(cBd)] == "minus";
            auto& slot = slim[key];
            slot[minus ? 0 : 1] = std::stod(r[std::size_t(cZ)]);
            slot[2] = std::stod(r[std::size_t(cFs)]);
            have[key][minus ? 0 : 1] = true;
            betas[key] = std::stod(r[std::size_t(cBeta)]);
        }
        std::string plot = "alpha,beta,h_star,L,log_ratio,fitted_c2\n";
        text << "fitted c2 (slim ensembles)\n";
        text << "  alpha    beta    h_star  L     log_ratio  fitted_c2\n";
        bool any = false;
        for (const auto& [key, slot] : slim) {
            if (!have[key][0] || !have[key][1]) continue;
            any = true;
            double lr = slot[0] - slot[1];
            double c2 = slot[2] > 0 ? -lr / (betas[key] * slot[2]) : 0.0;
            std::string k2 = key;
            std::replace(k2.begin(), k2.end(), '|', ',');
            plot += k2 + "," + fmt(lr) + "," + fmt(c2) + "\n";
            std::string pretty = k2;
            std::replace(pretty.begin(), pretty.end(), ',', ' ');
            text << "  " << pretty << "  " << fmt(lr) << "  " << fmt(c2) << "\n";
        }
        if (any) {
            rep.plot_files["fitted_c2.csv"] = plot;
            rep.no_data = false;
        }
        text << "\n";
    }

    if (rows.count("animals")) {
        const auto& rs = rows.at("animals");
        std::string plot = csv_schemas().at("animals") + "\n";
        text << "star animal partial sums\n";
        text << "  d  beta  J  size  count  partial_sum\n";
        for (const auto& r : rs) {
            plot += join(r, ',') + "\n";
            text << "  " << join(r, ' ') << "\n";
        }
        if (!rs.empty()) {
            rep.plot_files["animal_partial_sum.csv"] = plot;
            rep.no_data = false;
        }
        text << "\n";
    }

    for (const std::string& kind :
         {std::string("peierls-scan"), std::string("field-scan"),
          std::string("fat-sum")}) {
        if (rows.count(kind) && !rows.at(kind).empty()) {
            text << kind << ": " << rows.at(kind).size() << " rows\n";
            rep.no_data = false;
        }
    }

    if (rep.no_data) {
        rep.text = "no data\n";
        return rep;
    }
    rep.text = text.str();

    fs::path plots = fs::path(results_dir) / "plots";
    fs::create_directories(plots);
    for (const auto& [name, content] : rep.plot_files) {
        std::ofstream out(plots / name, std::ios::trunc);
        if (!out) throw ValidationError("cannot write plot file " + name);
        out << content;
    }
    return rep;
}

}  // namespace isinglab

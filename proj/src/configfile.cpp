#include "isinglab/configfile.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "isinglab/animals.hpp"
#include "isinglab/errors.hpp"
#include "isinglab/field.hpp"
#include "isinglab/montecarlo.hpp"

namespace isinglab {

namespace {

struct Token {
    std::string text;
    int line;
    int col;
};

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
        s.remove_suffix(1);
    return s;
}

long to_long(const Token& t) {
    long v = 0;
    auto [p, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
    if (ec != std::errc{} || p != t.text.data() + t.text.size())
        throw ParseError("expected integer, got '" + t.text + "'", t.line, t.col);
    return v;
}

std::uint64_t to_u64(const Token& t) {
    std::uint64_t v = 0;
    auto [p, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
    if (ec != std::errc{} || p != t.text.data() + t.text.size())
        throw ParseError("expected unsigned integer, got '" + t.text + "'", t.line,
                         t.col);
    return v;
}

double to_double(const Token& t) {
    double v = 0;
    auto [p, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
    if (ec != std::errc{} || p != t.text.data() + t.text.size())
        throw ParseError("expected number, got '" + t.text + "'", t.line, t.col);
    return v;
}

std::vector<Token> split_list(std::string_view value, int line, int col0) {
    std::vector<Token> out;
    std::size_t start = 0;
    while (start <= value.size()) {
        std::size_t comma = value.find(',', start);
        std::size_t end = comma == std::string_view::npos ? value.size() : comma;
        std::string_view raw = value.substr(start, end - start);
        std::string_view item = trim(raw);
        if (item.empty())
            throw ParseError("empty list element", line, col0 + int(start));
        int col = col0 + int(start) + int(item.data() - raw.data());
        out.push_back({std::string(item), line, col});
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

template <typename T, typename F>
std::vector<T> map_list(const std::vector<Token>& ts, F f) {
    std::vector<T> out;
    out.reserve(ts.size());
    for (const Token& t : ts) out.push_back(f(t));
    return out;
}

}  // namespace

const std::vector<std::string>& experiment_kinds() {
    static const std::vector<std::string> kinds = {
        "exact-verify", "peierls-scan", "field-scan", "mc-gap",
        "penetration",  "animals",      "fat-sum"};
    return kinds;
}

RunConfig parse_config(const std::string& text) {
    RunConfig cfg;
    std::istringstream in(text);
    std::string raw;
    int lineno = 0;
    std::string section;

    static const std::set<std::string> sections = {"experiment", "grid", "mc",
                                                   "field", "caps", "output"};

    while (std::getline(in, raw)) {
        ++lineno;
        std::string line = raw;
        if (auto hash = line.find('#'); hash != std::string::npos)
            line.erase(hash);
        std::string_view body = trim(line);
        if (body.empty()) continue;

        if (body.front() == '[') {
            if (body.back() != ']')
                throw ParseError("unterminated section header", lineno,
                                 int(line.find('[')) + 1);
            std::string name(trim(body.substr(1, body.size() - 2)));
            if (!sections.count(name))
                throw ParseError("unknown section [" + name + "]", lineno,
                                 int(line.find('[')) + 1);
            section = name;
            continue;
        }

        std::size_t eq = body.find('=');
        int key_col = int(line.find_first_not_of(" \t")) + 1;
        if (eq == std::string_view::npos)
            throw ParseError("expected 'key = value'", lineno, key_col);
        std::string key(trim(body.substr(0, eq)));
        std::string_view value = trim(body.substr(eq + 1));
        if (key.empty()) throw ParseError("missing key", lineno, key_col);
        if (section.empty())
            throw ParseError("key '" + key + "' outside any section", lineno,
                             key_col);
        if (value.empty())
            throw ParseError("missing value for '" + key + "'", lineno, key_col);

        int value_col = key_col + int(value.data() - body.data());
        std::vector<Token> items = split_list(value, lineno, value_col);
        const Token& one = items.front();
        auto scalar = [&]() -> const Token& {
            if (items.size() != 1)
                throw ParseError("'" + key + "' takes a single value", lineno,
                                 one.col);
            return one;
        };

        bool known = true;
        if (section == "experiment") {
            if (key == "kind")
                cfg.kind = scalar().text;
            else
                known = false;
        } else if (section == "grid") {
            if (key == "d")
                cfg.d = int(to_long(scalar()));
            else if (key == "L")
                cfg.L = map_list<int>(items, [](const Token& t) {
                    return int(to_long(t));
                });
            else if (key == "alpha")
                cfg.alpha = map_list<double>(items, to_double);
            else if (key == "beta")
                cfg.beta = map_list<double>(items, to_double);
            else if (key == "h_star")
                cfg.h_star = map_list<double>(items, to_double);
            else if (key == "J")
                cfg.J = map_list<double>(items, to_double);
            else if (key == "boundary")
                cfg.boundary = map_list<std::string>(
                    items, [](const Token& t) { return t.text; });
            else if (key == "R")
                cfg.R = map_list<int>(items, [](const Token& t) {
                    return int(to_long(t));
                });
            else
                known = false;
        } else if (section == "mc") {
            if (key == "seeds")
                cfg.seeds = map_list<std::uint64_t>(items, to_u64);
            else if (key == "sweeps")
                cfg.sweeps = to_long(scalar());
            else if (key == "burn_in")
                cfg.burn_in = to_long(scalar());
            else if (key == "thin")
                cfg.thin = to_long(scalar());
            else if (key == "algorithm")
                cfg.algorithm = scalar().text;
            else if (key == "init")
                cfg.init = scalar().text;
            else if (key == "n_samples")
                cfg.n_samples = to_long(scalar());
            else if (key == "b_star")
                cfg.b_star = to_double(scalar());
            else if (key == "b")
                cfg.b = to_double(scalar());
            else
                known = false;
        } else if (section == "field") {
            if (key == "truncation_radius")
                cfg.truncation_radius = int(to_long(scalar()));
            else
                known = false;
        } else if (section == "caps") {
            if (key == "site_cap")
                cfg.site_cap = std::size_t(to_long(scalar()));
            else if (key == "max_size")
                cfg.max_size = int(to_long(scalar()));
            else if (key == "box_radius")
                cfg.box_radius = int(to_long(scalar()));
            else if (key == "max_boundary")
                cfg.max_boundary = to_long(scalar());
            else
                known = false;
        } else if (section == "output") {
            if (key == "dir")
                cfg.out_dir = scalar().text;
            else
                known = false;
        }
        if (!known)
            throw ParseError("unknown key '" + key + "' in section [" + section +
                                 "]",
                             lineno, key_col);
    }
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open config file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

void RunConfig::validate() const {
    const auto& kinds = experiment_kinds();
    if (std::find(kinds.begin(), kinds.end(), kind) == kinds.end())
        throw ValidationError("unknown experiment kind '" + kind + "'");
    if (d != 2 && d != 3) throw ValidationError("d must be 2 or 3");
    if (site_cap < 1 || site_cap > 30)
        throw ValidationError("site_cap must be between 1 and 30");
    if (out_dir.empty()) throw ValidationError("output dir must not be empty");

    // every (alpha, h_star, J, beta) point must construct
    for (double a : alpha)
        for (double h : h_star) (void)FieldSpec(h, a, truncation_radius);
    for (double j : J)
        for (double bt : beta) (void)CouplingSpec(j, bt);

    const bool mc_kind = kind == "mc-gap" || kind == "penetration";
    if (mc_kind) {
        if (L.empty()) throw ValidationError("grid L must be nonempty");
        if (seeds.empty()) throw ValidationError("mc seeds must be nonempty");
        for (int l : L) {
            ChainConfig cc;
            cc.dim = d;
            cc.L = l;
            cc.sweeps = sweeps;
            cc.burn_in = burn_in;
            cc.thin = thin;
            cc.validate();
        }
        if (algorithm != "metropolis" && algorithm != "wolff" &&
            algorithm != "mixed")
            throw ValidationError("algorithm must be metropolis, wolff or mixed");
        if (init != "ground_uniform" && init != "all_plus" &&
            init != "all_minus" && init != "random")
            throw ValidationError(
                "init must be ground_uniform, all_plus, all_minus or random");
    }
    if (kind == "mc-gap")
        for (const std::string& bd : boundary)
            if (bd != "plus" && bd != "minus")
                throw ValidationError("boundary must be plus or minus");
    if (kind == "penetration") {
        if (!(b_star > 0.5) || !(b_star < 1.0))
            throw ValidationError("b_star must be in (1/2,1)");
        if (n_samples < 1) throw ValidationError("n_samples must be >= 1");
        if (b >= 0 && !(b > 0)) throw ValidationError("b must be > 0");
    }
    if (kind == "exact-verify") {
        for (int l : L) {
            if (l < 0) throw ValidationError("L must be >= 0");
            long sites = 1;
            for (int i = 0; i < d; ++i) sites *= 2L * l + 1;
            if (sites > long(site_cap))
                throw ValidationError(
                    "exact-verify region " + std::to_string(sites) +
                    " sites exceeds site_cap " + std::to_string(site_cap));
        }
    }
    if (kind == "peierls-scan") {
        if (max_size < 1 || max_size > 12)
            throw ValidationError("peierls-scan max_size must be in [1,12]");
        for (int l : L)
            if (l < 1 || l > 3)
                throw ValidationError("peierls-scan L must be in [1,3]");
    }
    if (kind == "field-scan") {
        if (R.empty()) throw ValidationError("field-scan needs grid R values");
        for (int r : R)
            if (r < 1 || r > 2000)
                throw ValidationError("field-scan R must be in [1,2000]");
    }
    if (kind == "animals") {
        if (max_size < 1 || std::size_t(max_size) > star_animal_default_cap(d))
            throw ValidationError(
                "animals max_size must be in [1," +
                std::to_string(star_animal_default_cap(d)) + "]");
    }
    if (kind == "fat-sum") {
        if (d != 2) throw ValidationError("fat-sum supports d=2 only");
        if (box_radius < 1 || box_radius > 8)
            throw ValidationError("fat-sum box_radius must be in [1,8]");
        if (max_boundary < 4)
            throw ValidationError("fat-sum max_boundary must be >= 4");
        double cap = std::pow(double(max_boundary) / (2.0 * d),
                              double(d) / double(d - 1));
        if (cap > 10.0 + 1e-9)
            throw ValidationError(
                "fat-sum max_boundary implies interiors above the size cap");
    }
}

}  // namespace isinglab

// bgamma: command-line front end for the bilateral Gamma library.
//
// Exit codes: 0 ok, 2 usage, 3 bad data, 4 numerical failure, 5 verification
// failure. Errors go to stderr as "code:<n> <message>".

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <system_error>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "bgamma/bgamma.hpp"
#include "bgamma/verify.hpp"

namespace {

using Json = nlohmann::ordered_json;
using bgamma::BgParams;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct DataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string fmt(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::optional<double> parse_double(const std::string& text) {
    const std::string t = trim(text);
    if (t.empty()) return std::nullopt;
    double v = 0.0;
    const char* first = t.data();
    if (*first == '+') ++first;
    const auto r = std::from_chars(first, t.data() + t.size(), v);
    if (r.ec != std::errc() || r.ptr != t.data() + t.size() || !std::isfinite(v)) return std::nullopt;
    return v;
}

std::vector<double> parse_list(const std::string& text, const char* what) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        auto v = parse_double(item);
        if (!v) throw UsageError(std::string("cannot parse ") + what + ": '" + text + "'");
        out.push_back(*v);
    }
    return out;
}

BgParams params_from_list(const std::vector<double>& v, const char* what) {
    if (v.size() != 4)
        throw UsageError(std::string(what) + " needs four values: alpha+,lambda+,alpha-,lambda-");
    try {
        return BgParams(v[0], v[1], v[2], v[3]);
    } catch (const bgamma::DomainError& e) {
        throw UsageError(std::string(what) + ": " + e.what());
    }
}

Json params_json(const BgParams& p) {
    return Json{{"alpha_plus", p.alpha_plus()},
                {"lambda_plus", p.lambda_plus()},
                {"alpha_minus", p.alpha_minus()},
                {"lambda_minus", p.lambda_minus()}};
}

BgParams params_from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open parameter file " + path);
    Json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw DataError("parameter file " + path + " is not valid JSON");
    }
    try {
        if (j.contains("params") && j["params"].is_array())
            return params_from_list(j["params"].get<std::vector<double>>(), "params file");
        return params_from_list({j.at("alpha_plus").get<double>(), j.at("lambda_plus").get<double>(),
                                 j.at("alpha_minus").get<double>(), j.at("lambda_minus").get<double>()},
                                "params file");
    } catch (const Json::exception&) {
        throw DataError("parameter file " + path +
                        " needs alpha_plus, lambda_plus, alpha_minus, lambda_minus or a params array");
    }
}

bgamma::EvalPolicy policy_from_env() {
    auto read = [](const char* name) -> std::optional<double> {
        const char* v = std::getenv(name);
        if (!v || !*v) return std::nullopt;
        auto d = parse_double(v);
        if (!d) throw UsageError(std::string("cannot parse environment variable ") + name);
        return d;
    };
    const bgamma::EvalPolicy defaults;
    const double rel = read("BGAMMA_REL_TOL").value_or(defaults.rel_tol());
    const double terms = read("BGAMMA_MAX_TERMS").value_or(static_cast<double>(defaults.max_terms()));
    const double quad = read("BGAMMA_QUAD_ABS_TOL").value_or(defaults.quad_abs_tol());
    const double sw = read("BGAMMA_ASYMPTOTIC_SWITCH_Z").value_or(defaults.asymptotic_switch_z());
    if (terms != std::floor(terms)) throw UsageError("BGAMMA_MAX_TERMS must be an integer");
    try {
        return bgamma::EvalPolicy(rel, static_cast<long>(terms), quad, sw);
    } catch (const std::exception& e) {
        throw UsageError(std::string("invalid evaluation policy from environment: ") + e.what());
    }
}

Json policy_json(const bgamma::EvalPolicy& p) {
    return Json{{"rel_tol", p.rel_tol()},
                {"max_terms", p.max_terms()},
                {"quad_abs_tol", p.quad_abs_tol()},
                {"asymptotic_switch_z", p.asymptotic_switch_z()}};
}

// Numbers from stdin, one per line; blank lines and '#' comments are skipped.
std::vector<double> read_stdin_column() {
    std::vector<double> out;
    std::vector<std::size_t> bad;
    std::string line;
    std::size_t n = 0;
    while (std::getline(std::cin, line)) {
        ++n;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        auto v = parse_double(t);
        if (!v)
            bad.push_back(n);
        else
            out.push_back(*v);
    }
    if (!bad.empty()) {
        std::string msg = "non-numeric input on line(s)";
        for (auto b : bad) msg += " " + std::to_string(b);
        throw DataError(msg);
    }
    return out;
}

// One numeric column of a CSV file. A non-numeric first row is a header;
// any other non-numeric row is an error reported with its line number.
std::vector<double> read_csv_column(std::istream& in, std::size_t column) {
    std::vector<double> out;
    std::vector<std::size_t> bad;
    std::string line;
    std::size_t n = 0;
    bool first_row = true;
    while (std::getline(in, line)) {
        ++n;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        std::vector<std::string> cells;
        std::stringstream ss(t);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        std::optional<double> v;
        if (column < cells.size()) v = parse_double(cells[column]);
        if (!v) {
            if (!first_row) bad.push_back(n);
        } else {
            out.push_back(*v);
        }
        first_row = false;
    }
    if (!bad.empty()) {
        std::string msg = "non-numeric value in column " + std::to_string(column) + " on line(s)";
        for (std::size_t i = 0; i < bad.size() && i < 20; ++i) msg += " " + std::to_string(bad[i]);
        if (bad.size() > 20) msg += " ... (" + std::to_string(bad.size()) + " rows)";
        throw DataError(msg);
    }
    return out;
}

Json near_zero_json(const bgamma::NearZeroClass& c) {
    Json j{{"tag", std::string(bgamma::to_string(c.tag))}};
    if (c.tag == bgamma::NearZeroClass::Tag::PowerDivergence) {
        j["alpha_exp"] = c.alpha_exp;
        j["c1"] = c.c1;
    }
    if (c.tag == bgamma::NearZeroClass::Tag::SlowlyVaryingDivergence) j["c2"] = c.c2;
    return j;
}

struct Options {
    std::string params_text;
    std::string params_file;
    std::vector<std::string> xs;
    std::vector<std::string> us;
    std::size_t n = 0;
    std::uint64_t seed = 0;
    std::string input = "-";
    std::size_t column = 0;
    std::string init_text;
    int starts = 5;
    long max_iter = 2000;
    std::vector<std::string> plot_params;
    std::string grid = "-3,3,601";
    std::vector<std::string> targets;
    double threshold_scale = 1.0;
    std::size_t fft_size = 65536;
    std::size_t mc_draws = 1000000;
};

class Runner {
  public:
    Runner(const Options& o, bgamma::EvalPolicy policy) : opt_(o), policy_(policy) {}

    BgParams params() const {
        if (!opt_.params_text.empty()) return params_from_list(parse_list(opt_.params_text, "--params"), "--params");
        if (!opt_.params_file.empty()) return params_from_file(opt_.params_file);
        throw UsageError("parameters required: --params a+,l+,a-,l- or --params-file");
    }

    Json config(const std::string& command, const std::optional<BgParams>& p) const {
        Json c{{"command", command}};
        if (p) c["params"] = params_json(*p);
        c["policy"] = policy_json(policy_);
        return c;
    }

    int pointwise(const std::string& command) {
        const BgParams p = params();
        const bool is_quantile = command == "quantile";
        const auto& flag_values = is_quantile ? opt_.us : opt_.xs;
        std::vector<double> points;
        if (flag_values.empty()) {
            points = read_stdin_column();
        } else {
            for (const auto& s : flag_values)
                for (double v : parse_list(s, is_quantile ? "--u" : "--x")) points.push_back(v);
        }
        Json c = config(command, p);
        std::cout << "# config " << c.dump() << '\n';
        for (double v : points) {
            double r;
            if (command == "pdf") {
                r = bgamma::pdf(p, v, policy_);
            } else if (command == "cdf") {
                r = bgamma::cdf(p, v, policy_);
            } else {
                if (!(v > 0.0 && v < 1.0)) throw DataError("quantile level must lie in (0,1): " + fmt(v));
                r = bgamma::quantile(p, v, policy_);
            }
            std::cout << fmt(v) << ',' << fmt(r) << '\n';
        }
        return 0;
    }

    int moments() {
        const BgParams p = params();
        const auto m = bgamma::moments(p);
        Json j{{"config", config("moments", p)},
               {"mean", m.mean},
               {"variance", m.variance},
               {"skewness", m.skewness},
               {"kurtosis", m.kurtosis}};
        std::cout << j.dump(2) << '\n';
        return 0;
    }

    int mode() {
        const BgParams p = params();
        const auto m = bgamma::mode(p, policy_);
        Json j{{"config", config("mode", p)}, {"mode", m.mode}, {"bracket", {m.lower, m.upper}}};
        std::cout << j.dump(2) << '\n';
        return 0;
    }

    int classify() {
        const BgParams p = params();
        const auto r = bgamma::shape_report(p, policy_);
        Json j{{"config", config("classify", p)},
               {"taxonomy", std::string(bgamma::to_string(r.taxonomy))},
               {"smoothness_n", r.smoothness_n},
               {"mode", r.mode.mode},
               {"mode_bracket", {r.mode.lower, r.mode.upper}},
               {"near_zero", {{"plus", near_zero_json(r.near_zero_plus)},
                              {"minus", near_zero_json(r.near_zero_minus)}}},
               {"tail_exponents", {r.tail_exponents.first, r.tail_exponents.second}},
               {"tail_rates", {r.tail_rates.first, r.tail_rates.second}},
               {"tail_constants", {r.tail_constants.first, r.tail_constants.second}}};
        std::cout << j.dump(2) << '\n';
        return 0;
    }

    int sample() {
        const BgParams p = params();
        if (opt_.n == 0) throw UsageError("--n must be at least 1");
        bgamma::RngState rng(opt_.seed);
        const auto draws = bgamma::sample(p, opt_.n, rng);
        Json c = config("sample", p);
        c["n"] = opt_.n;
        c["seed"] = opt_.seed;
        std::cout << "# config " << c.dump() << '\n';
        std::string out;
        for (double v : draws) {
            out += fmt(v);
            out += '\n';
        }
        std::cout << out;
        return 0;
    }

    int fit() {
        std::vector<double> data;
        if (opt_.input == "-") {
            data = read_csv_column(std::cin, opt_.column);
        } else {
            std::ifstream in(opt_.input);
            if (!in) throw DataError("cannot open input file " + opt_.input);
            data = read_csv_column(in, opt_.column);
        }
        if (data.size() < 20) throw DataError("fit needs at least 20 data points, got " + std::to_string(data.size()));
        std::optional<BgParams> init;
        if (!opt_.init_text.empty()) init = params_from_list(parse_list(opt_.init_text, "--init"), "--init");
        bgamma::FitOptions fo;
        fo.starts = opt_.starts;
        fo.max_iterations = opt_.max_iter;
        bgamma::RngState rng(opt_.seed);
        const auto r = bgamma::fit_mle(data, init, rng, fo, policy_);
        Json c = config("fit", std::nullopt);
        c["input"] = opt_.input;
        c["column"] = opt_.column;
        c["seed"] = opt_.seed;
        c["starts"] = opt_.starts;
        c["max_iterations"] = opt_.max_iter;
        if (init) c["init"] = params_json(*init);
        Json j{{"config", c},
               {"n", data.size()},
               {"params", params_json(r.params)},
               {"log_likelihood", r.log_likelihood},
               {"iterations", r.iterations},
               {"converged", r.converged},
               {"init_params", params_json(r.init_params)},
               {"best_start", r.best_start},
               {"perturbed_zeros", r.perturbed_zeros}};
        std::cout << j.dump(2) << '\n';
        if (!r.converged) throw NumericalError("fit did not converge from any start");
        return 0;
    }

    int plot_data() {
        const auto g = parse_list(opt_.grid, "--grid");
        if (g.size() != 3 || !(g[1] > g[0]) || g[2] < 2 || g[2] != std::floor(g[2]))
            throw UsageError("--grid needs min,max,count with max > min and integer count >= 2");
        std::vector<std::pair<std::string, BgParams>> sets;
        if (opt_.plot_params.empty()) {
            // Illustrative panel with one member of each shape class at
            // lambda+ = lambda- = 1.
            sets = {{"Pole", BgParams(0.4, 1, 0.4, 1)},
                    {"SteepCusp", BgParams(0.7, 1, 0.7, 1)},
                    {"OffsetInfiniteSlope", BgParams(1.5, 1, 0.3, 1)},
                    {"ExponentialPeak", BgParams(1, 1, 1, 1)},
                    {"Smooth", BgParams(2, 1, 2, 1)}};
        } else {
            int k = 1;
            for (const auto& s : opt_.plot_params)
                sets.emplace_back("p" + std::to_string(k++), params_from_list(parse_list(s, "--params"), "--params"));
        }
        Json c = config("plot-data", std::nullopt);
        Json list = Json::array();
        for (const auto& [label, p] : sets) list.push_back({{"label", label}, {"params", params_json(p)}});
        c["sets"] = list;
        c["grid"] = {g[0], g[1], static_cast<long>(g[2])};
        std::cout << "# config " << c.dump() << '\n';
        std::cout << 'x';
        for (const auto& s : sets) std::cout << ',' << s.first;
        std::cout << '\n';
        const long count = static_cast<long>(g[2]);
        for (long i = 0; i < count; ++i) {
            double x = g[0] + (g[1] - g[0]) * static_cast<double>(i) / static_cast<double>(count - 1);
            if (std::abs(x) < 1e-12 * (g[1] - g[0])) x = 0.0;
            std::cout << fmt(x);
            for (const auto& s : sets) {
                double v;
                try {
                    v = bgamma::pdf(s.second, x, policy_);
                } catch (const bgamma::PoleError&) {
                    v = std::numeric_limits<double>::infinity();
                }
                std::cout << ',' << fmt(v);
            }
            std::cout << '\n';
        }
        return 0;
    }

    int verify() {
        bgamma::oracle::VerifyOptions vo;
        if (!opt_.params_text.empty() || !opt_.params_file.empty()) vo.params = {params()};
        if (!(opt_.threshold_scale > 0.0)) throw UsageError("--threshold-scale must be positive");
        vo.threshold_scale = opt_.threshold_scale;
        if (opt_.fft_size < 4096 || (opt_.fft_size & (opt_.fft_size - 1)) != 0)
            throw UsageError("--fft-size must be a power of two >= 4096");
        vo.fft_size = opt_.fft_size;
        if (opt_.mc_draws < 10000) throw UsageError("--mc-draws must be at least 10000");
        vo.mc_draws = opt_.mc_draws;
        vo.seed = opt_.seed;
        vo.policy = policy_;
        auto targets = opt_.targets.empty() ? bgamma::oracle::verification_targets() : opt_.targets;
        const auto known = bgamma::oracle::verification_targets();
        for (const auto& t : targets)
            if (std::find(known.begin(), known.end(), t) == known.end())
                throw UsageError("unknown verification target: " + t);

        Json c = config("verify", std::nullopt);
        Json plist = Json::array();
        for (const auto& p : vo.params) plist.push_back(params_json(p));
        c["params"] = plist;
        c["threshold_scale"] = vo.threshold_scale;
        c["fft_size"] = vo.fft_size;
        c["mc_draws"] = vo.mc_draws;
        c["seed"] = vo.seed;

        Json out = Json::array();
        bool all = true;
        for (const auto& t : targets) {
            const auto r = bgamma::oracle::run_verification(t, vo);
            all = all && r.passed;
            Json j{{"target", r.target},
                   {"max_abs_err", r.max_abs_err},
                   {"max_rel_err", r.max_rel_err},
                   {"abs_threshold", r.abs_threshold ? Json(*r.abs_threshold) : Json(nullptr)},
                   {"rel_threshold", r.rel_threshold ? Json(*r.rel_threshold) : Json(nullptr)},
                   {"grid", r.grid},
                   {"passed", r.passed},
                   {"config", c}};
            out.push_back(j);
        }
        std::cout << out.dump(2) << '\n';
        return all ? 0 : 5;
    }

  private:
    const Options& opt_;
    bgamma::EvalPolicy policy_;
};

int fail(int code, const std::string& msg) {
    std::cout.flush();
    std::cerr << "code:" << code << ' ' << msg << '\n';
    return code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Bilateral Gamma distribution tool.\n"
                 "Parameters are always given in the order alpha+,lambda+,alpha-,lambda-."};
    app.require_subcommand(1);
    Options o;

    auto add_params = [&](CLI::App* sub) {
        sub->add_option("--params", o.params_text, "alpha+,lambda+,alpha-,lambda- (this order)");
        sub->add_option("--params-file", o.params_file, "JSON file with the four parameters");
    };

    auto* pdf = app.add_subcommand("pdf", "density at --x values (or stdin)");
    auto* cdf = app.add_subcommand("cdf", "distribution function at --x values (or stdin)");
    auto* quant = app.add_subcommand("quantile", "quantiles at --u levels (or stdin)");
    for (auto* s : {pdf, cdf}) {
        add_params(s);
        s->add_option("--x", o.xs, "evaluation point(s); repeatable or comma separated");
    }
    add_params(quant);
    quant->add_option("--u", o.us, "probability level(s) in (0,1)");

    auto* mom = app.add_subcommand("moments", "mean, variance, skewness, kurtosis as JSON");
    auto* mode = app.add_subcommand("mode", "mode and its bracket as JSON");
    auto* cls = app.add_subcommand("classify", "full shape report as JSON");
    for (auto* s : {mom, mode, cls}) add_params(s);

    auto* smp = app.add_subcommand("sample", "random draws, one per line");
    add_params(smp);
    smp->add_option("--n", o.n, "number of draws")->required();
    smp->add_option("--seed", o.seed, "generator seed");

    auto* fit = app.add_subcommand("fit", "maximum-likelihood fit of a CSV column");
    fit->add_option("--input", o.input, "CSV file, '-' for stdin");
    fit->add_option("--column", o.column, "zero-based column index");
    fit->add_option("--seed", o.seed, "seed for the multi-start perturbations");
    fit->add_option("--init", o.init_text, "starting parameters alpha+,lambda+,alpha-,lambda-");
    fit->add_option("--starts", o.starts, "number of optimizer starts")->check(CLI::Range(1, 100));
    fit->add_option("--max-iter", o.max_iter, "iteration cap per start")->check(CLI::Range(1L, 1000000L));

    auto* plot = app.add_subcommand("plot-data", "density curves on a grid as CSV");
    plot->add_option("--params", o.plot_params, "parameter set; repeat for several curves");
    plot->add_option("--grid", o.grid, "min,max,count");

    auto* ver = app.add_subcommand("verify", "compare against reference implementations");
    add_params(ver);
    ver->add_option("--targets", o.targets, "subset of: pdf_quadrature laplace vg pdf_fft moments")
        ->delimiter(',');
    ver->add_option("--threshold-scale", o.threshold_scale, "multiply every threshold");
    ver->add_option("--fft-size", o.fft_size, "grid size of the Fourier oracle");
    ver->add_option("--mc-draws", o.mc_draws, "Monte Carlo sample size");
    ver->add_option("--seed", o.seed, "Monte Carlo seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        return fail(2, e.what());
    }

    try {
        Runner run(o, policy_from_env());
        if (*pdf) return run.pointwise("pdf");
        if (*cdf) return run.pointwise("cdf");
        if (*quant) return run.pointwise("quantile");
        if (*mom) return run.moments();
        if (*mode) return run.mode();
        if (*cls) return run.classify();
        if (*smp) return run.sample();
        if (*fit) return run.fit();
        if (*plot) return run.plot_data();
        if (*ver) {
            const int rc = run.verify();
            if (rc != 0) return fail(rc, "verification failed");
            return 0;
        }
        return fail(2, "no subcommand");
    } catch (const UsageError& e) {
        return fail(2, e.what());
    } catch (const DataError& e) {
        return fail(3, e.what());
    } catch (const bgamma::FitError& e) {
        return fail(3, e.what());
    } catch (const bgamma::PoleError& e) {
        return fail(4, e.what());
    } catch (const bgamma::DomainError& e) {
        return fail(3, e.what());
    } catch (const bgamma::ContractError& e) {
        return fail(3, e.what());
    } catch (const NumericalError& e) {
        return fail(4, e.what());
    } catch (const bgamma::EvaluationError& e) {
        return fail(4, e.what());
    } catch (const bgamma::OracleError& e) {
        return fail(4, e.what());
    } catch (const std::exception& e) {
        return fail(4, e.what());
    }
}

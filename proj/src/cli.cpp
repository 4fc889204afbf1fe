#include "cvoodg/cli.hpp"

#include <atomic>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <map>
#include <memory>
#include <ostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "cvoodg/serialize.hpp"
#include "cvoodg/suites.hpp"

namespace cvoodg::cli {

using nlohmann::json;

namespace {

struct ConfigError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

double parse_double(const std::string& s, const std::string& what) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument("");
        return v;
    } catch (const std::exception&) {
        throw std::invalid_argument("malformed number for " + what + ": '" + s + "'");
    }
}

int parse_int(const std::string& s, const std::string& what) {
    try {
        std::size_t pos = 0;
        const int v = std::stoi(s, &pos);
        if (pos != s.size()) throw std::invalid_argument("");
        return v;
    } catch (const std::exception&) {
        throw std::invalid_argument("malformed integer for " + what + ": '" + s + "'");
    }
}

// key = value lines; '#' starts a comment.
std::map<std::string, std::string> read_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file " + path);
    std::map<std::string, std::string> kv;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(path + ":" + std::to_string(lineno) + ": expected key = value");
        kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    return kv;
}

bool has_flag(const std::vector<std::string>& args, const std::string& name) {
    const std::string flag = "--" + name;
    for (const auto& a : args)
        if (a == flag || a.rfind(flag + "=", 0) == 0) return true;
    return false;
}

// Flags on the command line win over the file, which wins over defaults.
std::vector<std::string> merge_config(std::vector<std::string> args) {
    std::string path;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
        if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
    }
    if (path.empty()) return args;
    auto kv = read_config(path);
    static const std::vector<std::string> commands{"bound", "extend", "verify", "sweep"};
    const bool has_command =
        std::any_of(args.begin(), args.end(), [](const std::string& a) {
            return std::find(commands.begin(), commands.end(), a) != commands.end();
        });
    if (auto it = kv.find("command"); it != kv.end()) {
        if (!has_command) args.insert(args.begin(), it->second);
        kv.erase(it);
    }
    for (const auto& [k, v] : kv) {
        if (has_flag(args, k)) continue;
        if (v == "true") {
            args.push_back("--" + k);
        } else if (v == "false") {
            continue;
        } else {
            args.push_back("--" + k);
            args.push_back(v);
        }
    }
    return args;
}

int resolve_threads(int flag) {
    if (flag > 0) return flag;
    if (const char* env = std::getenv("CV_OODG_THREADS")) {
        const int v = parse_int(env, "CV_OODG_THREADS");
        if (v < 1) throw std::invalid_argument("CV_OODG_THREADS must be positive");
        return v;
    }
    return 1;
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep)) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

// "fock:0..4" -> fock:0 ... fock:4; other specs pass through.
std::vector<std::string> expand_states(const std::vector<std::string>& raw) {
    std::vector<std::string> out;
    for (const auto& group : raw)
        for (const auto& s : split(group, ';')) {
            const auto dots = s.find("..");
            if (s.rfind("fock:", 0) == 0 && dots != std::string::npos) {
                const int a = parse_int(s.substr(5, dots - 5), "fock range");
                const int b = parse_int(s.substr(dots + 2), "fock range");
                if (a < 0 || b < a) throw std::invalid_argument("empty fock range " + s);
                for (int m = a; m <= b; ++m) out.push_back("fock:" + std::to_string(m));
            } else {
                out.push_back(s);
            }
        }
    return out;
}

struct CurveOptions {
    std::string cls = "phase_rotation";
    double eps0 = 0.1;
    double tau = 1.0;
    double hull_max = 100.0;
    int hull_points = 201;
};

struct BuiltCurve {
    BoundCurve curve;
    bool hulled = false;
};

BuiltCurve build_curve(const CurveOptions& o, bool hull_if_needed) {
    const ClassTag tag = parse_class_tag(o.cls);
    if (tag == ClassTag::custom) throw std::invalid_argument("class 'custom' needs a curve file");
    const InDistributionGuarantee g{o.eps0, o.tau};
    g.validate();
    if (!(o.hull_max > 0.0) || o.hull_points < 3) throw std::invalid_argument("hull grid must be positive");
    BoundCurve c = make_curve(tag, g, GridSpec{o.hull_max, o.hull_points});
    if (hull_if_needed && !c.concavified())
        return {concave_hull(c, o.hull_max, o.hull_points, HullMode::certified), true};
    return {c, false};
}

json curve_json(const CurveOptions& o, const BuiltCurve& b) {
    return {{"class", cvoodg::to_string(b.curve.tag())},
            {"eps0", o.eps0},
            {"tau", o.tau},
            {"concavified", b.curve.concavified()},
            {"hulled", b.hulled}};
}

std::string opt_cell(const std::optional<double>& v) { return v ? io::format_double(*v) : ""; }

std::string report_csv_row(double nbar, const BoundReport& r, const CurveOptions& o, const std::string& cls,
                           const std::string& state) {
    std::ostringstream row;
    row << io::format_double(nbar) << ',' << io::format_double(r.value) << ',' << cls << ','
        << io::format_double(o.eps0) << ',' << io::format_double(o.tau) << ',' << opt_cell(r.params.s) << ','
        << (r.params.M ? std::to_string(*r.params.M) : "") << ',' << opt_cell(r.params.kappa) << ',' << state << ','
        << r.branch;
    return row.str();
}

constexpr const char* kReportCsvHeader = "nbar,epsilon,class,eps0,tau,s,M,kappa,state,branch";

class Output {
public:
    Output(const std::string& path, std::ostream& fallback) : path_(path), fallback_(fallback) {
        if (!path_.empty()) {
            file_ = std::make_unique<std::ofstream>(path_, std::ios::binary | std::ios::trunc);
            if (!*file_) throw ConfigError("cannot write output file " + path_);
        }
    }
    std::ostream& stream() { return file_ ? *file_ : fallback_; }

private:
    std::string path_;
    std::ostream& fallback_;
    std::unique_ptr<std::ofstream> file_;
};

template <class F>
void parallel_for(std::size_t n, int threads, F&& body) {
    if (threads <= 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(n);
    std::vector<std::thread> pool;
    const int t = static_cast<int>(std::min<std::size_t>(threads, n));
    for (int w = 0; w < t; ++w)
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < n; i = next++) {
                try {
                    body(i);
                } catch (...) {
                    errors[i] = std::current_exception();
                }
            }
        });
    for (auto& th : pool) th.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

void add_curve_options(CLI::App* app, CurveOptions& o, const std::string& class_flag) {
    app->add_option(class_flag, o.cls, "bound curve class")->capture_default_str();
    app->add_option("--eps0", o.eps0, "in-distribution error eps0 in [0, 2]")->capture_default_str();
    app->add_option("--tau", o.tau, "in-distribution amplitude tau > 0")->capture_default_str();
    app->add_option("--hull-max", o.hull_max, "n-bar range of the concave-hull grid")->capture_default_str();
    app->add_option("--hull-points", o.hull_points, "points of the concave-hull grid")->capture_default_str();
}

}  // namespace

std::vector<double> parse_list(const std::string& text) {
    std::vector<double> out;
    for (const auto& item : split(text, ',')) out.push_back(parse_double(item, "list"));
    return out;
}

InputStateSpec parse_state(const std::string& text) {
    const auto colon = text.find(':');
    if (colon == std::string::npos) throw std::invalid_argument("state must look like kind:value, got '" + text + "'");
    const std::string kind = text.substr(0, colon);
    const std::string val = text.substr(colon + 1);
    if (kind == "fock") {
        const int m = parse_int(val, "fock");
        if (m < 0) throw std::invalid_argument("fock index must be non-negative");
        return state::Fock{m};
    }
    if (kind == "classical" || kind == "energy-only") {
        const double n = parse_double(val, kind);
        if (!(n >= 0.0)) throw std::invalid_argument(kind + " energy must be non-negative");
        if (kind == "classical") return state::Classical{n};
        return state::EnergyOnly{n};
    }
    if (kind == "spat") {
        const double q = parse_double(val, "spat");
        if (!(q > 0.0)) throw std::invalid_argument("spat q must be positive");
        return state::SPAT{q};
    }
    if (kind == "squeezed") {
        const double l = parse_double(val, "squeezed");
        if (!(l > 0.0 && l < 1.0)) throw std::invalid_argument("squeezed lambda must lie in (0, 1)");
        return state::SqueezedVacuum{l};
    }
    if (kind == "known-fock") return state::KnownFock{io::read_fock_matrix(val)};
    throw std::invalid_argument("unknown state kind '" + kind + "'");
}

double state_nbar(const InputStateSpec& s) {
    return std::visit(
        [](const auto& st) -> double {
            using T = std::decay_t<decltype(st)>;
            if constexpr (std::is_same_v<T, state::Classical> || std::is_same_v<T, state::EnergyOnly>)
                return st.nbar;
            else if constexpr (std::is_same_v<T, state::FiniteNegativity>)
                return st.profile.nbar();
            else if constexpr (std::is_same_v<T, state::SPAT>)
                return 1.0 + 2.0 * st.q;
            else if constexpr (std::is_same_v<T, state::Fock>)
                return st.m;
            else if constexpr (std::is_same_v<T, state::SqueezedVacuum>)
                return st.lambda * st.lambda / (1.0 - st.lambda * st.lambda);
            else
                return st.rho.mean_photon_number();
        },
        s);
}

int run(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
    std::vector<std::string> args;
    try {
        args = merge_config(raw_args);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return invalid_config;
    }

    CLI::App app{"Out-of-distribution error bounds for learned continuous-variable channels", "cv-oodg"};
    app.require_subcommand(1);
    std::string config_path;
    std::uint64_t seed = 0;
    int threads = 0;
    std::string output;
    std::string bound_format = "csv", extend_format = "json", verify_format = "json", sweep_format = "csv";

    auto common = [&](CLI::App* sub, std::string& format) {
        sub->add_option("--config", config_path, "key = value file; command-line flags take precedence");
        sub->add_option("--seed", seed, "seed for randomised checks")->capture_default_str();
        sub->add_option("--threads", threads, "worker threads (falls back to CV_OODG_THREADS)");
        sub->add_option("--output", output, "output file (default: stdout)");
        sub->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    };

    // bound
    CurveOptions bound_opts;
    double nbar_max = 20.0;
    int points = 200;
    bool hull = false;
    auto* bound = app.add_subcommand("bound", "emit a coherent-state bound curve over an n-bar grid");
    add_curve_options(bound, bound_opts, "--class");
    bound->add_option("--nbar-max", nbar_max, "grid upper end")->capture_default_str();
    bound->add_option("--points", points, "grid points")->capture_default_str();
    bound->add_flag("--hull", hull, "replace a non-concave curve by its certified concave hull");
    common(bound, bound_format);

    // extend
    CurveOptions ext_opts;
    std::string state_text;
    bool fail_on_trivial = false;
    auto* extend_cmd = app.add_subcommand("extend", "bound the output distance for a given input state");
    add_curve_options(extend_cmd, ext_opts, "--curve");
    extend_cmd->add_option("--state", state_text, "fock:m, classical:x, energy-only:x, spat:q, squeezed:l, known-fock:file")
        ->required();
    extend_cmd->add_flag("--fail-on-trivial", fail_on_trivial, "exit 3 when the bound is the trivial value 2");
    common(extend_cmd, extend_format);

    // verify
    std::string suite = "all";
    std::string pair_class = "phase_rotation";
    double v_eps0 = 0.1, v_tau = 1.0;
    std::string curve_file;
    int random_pairs = 8;
    auto* verify = app.add_subcommand("verify", "run oracle suites; exit 1 on any violation");
    verify->add_option("--suite", suite, "suite name")->check(CLI::IsMember(oracle::suite_names()))
        ->capture_default_str();
    verify->add_option("--class", pair_class, "channel pair class")->capture_default_str();
    verify->add_option("--eps0", v_eps0, "eps0")->capture_default_str();
    verify->add_option("--tau", v_tau, "tau")->capture_default_str();
    verify->add_option("--curve-file", curve_file, "CSV curve (nbar, epsilon) replacing the matching curves");
    verify->add_option("--random-pairs", random_pairs, "sampled pairs per class")->capture_default_str();
    common(verify, verify_format);

    // sweep
    CurveOptions sw_opts;
    std::string eps0_list;
    std::vector<std::string> sweep_states;
    auto* sweep = app.add_subcommand("sweep", "eps0 x state grid of extended bounds");
    add_curve_options(sweep, sw_opts, "--curve");
    sweep->add_option("--eps0-list", eps0_list, "comma-separated eps0 values")->required();
    sweep->add_option("--state", sweep_states, "state spec; repeatable, ';'-separated, fock:a..b ranges")->required();
    common(sweep, sweep_format);

    try {
        std::vector<std::string> rev(args.rbegin(), args.rend());
        app.parse(rev);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return ok;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return invalid_config;
    }

    try {
        if (*bound) {
            if (points < 2 || !(nbar_max > 0.0)) throw ConfigError("grid needs points >= 2 and nbar-max > 0");
            const BuiltCurve bc = build_curve(bound_opts, hull);
            const InDistributionGuarantee g{bound_opts.eps0, bound_opts.tau};
            const bool universal = bc.curve.tag() == ClassTag::universal;
            const auto grid = linear_grid(0.0, nbar_max, points);
            std::vector<double> eps(grid.size()), svals(grid.size(), 0.0);
            parallel_for(grid.size(), resolve_threads(threads), [&](std::size_t i) {
                eps[i] = bc.curve(grid[i]);
                if (universal) svals[i] = universal_coherent_point(g, std::sqrt(grid[i])).s;
            });
            Output o(output, out);
            const std::string cls = cvoodg::to_string(bc.curve.tag());
            if (bound_format == "json") {
                json j = curve_json(bound_opts, bc);
                j["schema"] = io::kCurveSchema;
                json rows = json::array();
                for (std::size_t i = 0; i < grid.size(); ++i) {
                    json r = {{"nbar", grid[i]}, {"epsilon", eps[i]}};
                    if (universal) r["s"] = svals[i];
                    rows.push_back(r);
                }
                j["rows"] = rows;
                o.stream() << io::dump_json(j);
            } else {
                o.stream() << io::kCsvSchema << "\n" << "nbar,epsilon,class,eps0,tau" << (universal ? ",s" : "") << "\n";
                for (std::size_t i = 0; i < grid.size(); ++i) {
                    o.stream() << io::format_double(grid[i]) << ',' << io::format_double(eps[i]) << ',' << cls << ','
                               << io::format_double(bound_opts.eps0) << ',' << io::format_double(bound_opts.tau);
                    if (universal) o.stream() << ',' << io::format_double(svals[i]);
                    o.stream() << "\n";
                }
            }
            return ok;
        }

        if (*extend_cmd) {
            const InputStateSpec st = parse_state(state_text);
            const BuiltCurve bc = build_curve(ext_opts, true);
            const BoundReport r = extend(bc.curve, st);
            Output o(output, out);
            if (extend_format == "json") {
                json j = io::to_json(r);
                j["state"] = state_text;
                j["nbar"] = state_nbar(st);
                j["curve"] = curve_json(ext_opts, bc);
                o.stream() << io::dump_json(j);
            } else {
                o.stream() << io::kCsvSchema << "\n" << kReportCsvHeader << "\n"
                           << report_csv_row(state_nbar(st), r, ext_opts, cvoodg::to_string(bc.curve.tag()), state_text)
                           << "\n";
            }
            if (fail_on_trivial && r.value >= 2.0) {
                err << "trivial bound (value 2) for " << state_text << "\n";
                return trivial;
            }
            return ok;
        }

        if (*verify) {
            oracle::SuiteOptions so;
            so.pair_class = oracle::parse_pair_class(pair_class);
            so.guarantee = {v_eps0, v_tau};
            so.guarantee.validate();
            so.seed = seed;
            so.random_pairs = random_pairs;
            so.threads = resolve_threads(threads);
            if (!curve_file.empty()) so.curve_override = io::read_curve_csv(curve_file, so.guarantee);
            if (verify_format != "json") throw ConfigError("verify writes JSON reports only");
            const oracle::VerificationReport rep = oracle::run_suite(suite, so);
            Output o(output, out);
            o.stream() << io::dump_json(io::to_json(rep));
            if (!rep.passed()) {
                for (const auto& a : rep.assertions) {
                    if (a.ok()) continue;
                    err << "violation: " << a.name << " max_slack=" << io::format_double(a.max_slack) << " at";
                    for (const auto& [k, v] : a.worst_point) err << ' ' << k << '=' << io::format_double(v);
                    err << "\n";
                }
                return violation;
            }
            return ok;
        }

        if (*sweep) {
            const auto eps = parse_list(eps0_list);
            const auto states = expand_states(sweep_states);
            if (eps.empty() || states.empty()) throw ConfigError("sweep grid is empty");
            std::vector<InputStateSpec> specs;
            for (const auto& s : states) specs.push_back(parse_state(s));
            std::vector<BuiltCurve> curves;
            for (double e : eps) {
                CurveOptions c = sw_opts;
                c.eps0 = e;
                curves.push_back(build_curve(c, true));
            }
            const std::size_t n = specs.size() * eps.size();
            std::vector<BoundReport> reports(n);
            parallel_for(n, resolve_threads(threads), [&](std::size_t i) {
                reports[i] = extend(curves[i % eps.size()].curve, specs[i / eps.size()]);
            });
            Output o(output, out);
            if (sweep_format == "json") {
                json rows = json::array();
                for (std::size_t i = 0; i < n; ++i) {
                    json j = io::to_json(reports[i]);
                    j["state"] = states[i / eps.size()];
                    j["nbar"] = state_nbar(specs[i / eps.size()]);
                    j["eps0"] = eps[i % eps.size()];
                    rows.push_back(j);
                }
                json j = {{"schema", "cv-oodg/sweep/1"},
                          {"curve", cvoodg::to_string(curves.front().curve.tag())},
                          {"tau", sw_opts.tau},
                          {"rows", rows}};
                o.stream() << io::dump_json(j);
            } else {
                o.stream() << io::kCsvSchema << "\n" << kReportCsvHeader << "\n";
                for (std::size_t i = 0; i < n; ++i) {
                    CurveOptions c = sw_opts;
                    c.eps0 = eps[i % eps.size()];
                    o.stream() << report_csv_row(state_nbar(specs[i / eps.size()]), reports[i], c,
                                                 cvoodg::to_string(curves.front().curve.tag()), states[i / eps.size()])
                               << "\n";
                }
            }
            return ok;
        }
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << "\n";
        return invalid_config;
    } catch (const std::domain_error& e) {
        err << "error: " << e.what() << "\n";
        return invalid_config;
    }
    return invalid_config;
}

}  // namespace cvoodg::cli

// SPDX-License-Identifier: Apache-2.0
// volsre command-line front end. Every run writes config.json (the fully
// resolved configuration), its outputs and a MANIFEST of SHA-256 hashes into
// --out-dir. Exit codes: 0 success, 1 usage or I/O error, 2 infeasible or
// failed diagnostic.

#include <CLI11.hpp>
#include <json.hpp>
#include <openssl/evp.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "volsre/asymptotics.hpp"
#include "volsre/error.hpp"
#include "volsre/estimate.hpp"
#include "volsre/filter.hpp"
#include "volsre/invertibility.hpp"
#include "volsre/io.hpp"
#include "volsre/simulate.hpp"
#include "volsre/study.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace volsre;

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitInfeasible = 2;

struct DiagnosticFailure : std::runtime_error
{
    using std::runtime_error::runtime_error;
};

//---------------------------------------------------------------------------//
// Hashing and output directory
//---------------------------------------------------------------------------//

std::string sha256_hex(const std::string& bytes)
{
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1)
        throw InputError("SHA-256 failed");
    std::string hex;
    char buf[3];
    for (unsigned int i = 0; i < len; ++i)
    {
        std::snprintf(buf, sizeof buf, "%02x", md[i]);
        hex += buf;
    }
    return hex;
}

std::string read_file(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    if (!in)
        throw InputError("cannot open " + p.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

class RunDir
{
  public:
    explicit RunDir(fs::path dir) : dir_(std::move(dir))
    {
        std::error_code ec;
        fs::create_directories(dir_, ec);
        if (ec)
            throw InputError("cannot create " + dir_.string() + ": " + ec.message());
    }

    void write(const std::string& name, const std::string& content)
    {
        std::ofstream out(dir_ / name, std::ios::binary);
        out << content;
        if (!out)
            throw InputError("cannot write " + (dir_ / name).string());
        files_[name] = sha256_hex(content);
    }

    void write_json(const std::string& name, const json& j) { write(name, j.dump(2) + "\n"); }

    void finish()
    {
        std::string m;
        for (const auto& [name, hash] : files_)
            m += hash + "  " + name + "\n";
        std::ofstream out(dir_ / "MANIFEST", std::ios::binary);
        out << m;
        if (!out)
            throw InputError("cannot write MANIFEST");
    }

  private:
    fs::path dir_;
    std::map<std::string, std::string> files_;
};

//---------------------------------------------------------------------------//
// Flag parsing helpers
//---------------------------------------------------------------------------//

std::vector<std::string> split(const std::string& s, char sep)
{
    std::vector<std::string> parts;
    std::string cur;
    std::istringstream ss(s);
    while (std::getline(ss, cur, sep))
        parts.push_back(cur);
    return parts;
}

double to_double(const std::string& s)
{
    std::size_t pos = 0;
    double v = 0.0;
    try
    {
        v = std::stod(s, &pos);
    }
    catch (const std::exception&)
    {
        throw InputError("not a number: '" + s + "'");
    }
    if (pos != s.size())
        throw InputError("not a number: '" + s + "'");
    return v;
}

std::uint64_t to_count(const std::string& s)
{
    std::uint64_t v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc() || ptr != s.data() + s.size())
        throw InputError("not a non-negative integer: '" + s + "'");
    return v;
}

json parse_theta_flag(const std::string& s)
{
    json a = json::array();
    for (const auto& p : split(s, ','))
        a.push_back(to_double(p));
    return a;
}

json parse_box_flag(const std::string& s)
{
    json a = json::array();
    for (const auto& p : split(s, ','))
    {
        const auto lh = split(p, ':');
        if (lh.size() != 2)
            throw InputError("box entries are lo:hi, got '" + p + "'");
        a.push_back({to_double(lh[0]), to_double(lh[1])});
    }
    return a;
}

//---------------------------------------------------------------------------//
// Resolved configuration
//---------------------------------------------------------------------------//

ModelKind cfg_model(const json& c) { return parse_model(c.at("model").get<std::string>()); }

ParamVector cfg_theta(const json& c, const char* key = "theta")
{
    const ModelKind model = cfg_model(c);
    const json& a = c.at(key);
    if (!a.is_array() || a.size() != param_count(model))
        throw InputError(std::string(key) + " needs " + std::to_string(param_count(model)) + " values for " +
                         std::string(to_string(model)));
    ParamVector t;
    for (std::size_t i = 0; i < a.size(); ++i)
        t[i] = a[i].get<double>();
    return t;
}

ParamBox cfg_box(const json& c)
{
    const ModelKind model = cfg_model(c);
    const json& a = c.at("box");
    if (!a.is_array() || a.size() != param_count(model))
        throw InputError("box needs " + std::to_string(param_count(model)) + " intervals");
    ParamBox box;
    for (std::size_t i = 0; i < a.size(); ++i)
        box.axes[i] = {a[i].at(0).get<double>(), a[i].at(1).get<double>()};
    require_valid_box(model, box);
    return box;
}

json box_json(const ParamBox& box, ModelKind model)
{
    json a = json::array();
    for (std::size_t i = 0; i < param_count(model); ++i)
        a.push_back({box.axes[i].lo, box.axes[i].hi});
    return a;
}

FitOptions cfg_fit(const json& c)
{
    FitOptions o;
    o.starts = c.at("starts").get<std::size_t>();
    o.penalty = c.at("penalty").get<double>();
    o.margin = c.at("margin").get<double>();
    o.tol = c.at("tol").get<double>();
    o.max_iter = c.at("max_iter").get<std::size_t>();
    o.seed = c.at("seed").get<std::uint64_t>();
    o.burn = c.at("burn").get<std::size_t>();
    if (!c.at("g_init").is_null())
        o.g_init = c.at("g_init").get<double>();
    return o;
}

json fit_defaults()
{
    const FitOptions d;
    return {{"starts", d.starts}, {"penalty", d.penalty}, {"margin", d.margin}, {"tol", d.tol},
            {"max_iter", d.max_iter}, {"burn", d.burn}, {"g_init", nullptr}};
}

json defaults(const std::string& cmd)
{
    json c = {{"command", cmd}, {"model", "egarch11"}, {"seed", 0}};
    if (cmd == "simulate")
        c.update({{"theta", nullptr}, {"dist", "normal"}, {"n", nullptr}, {"burn_in", kDefaultBurnIn}});
    else if (cmd == "fit")
    {
        c.update({{"input", nullptr}, {"box", nullptr}});
        c.update(fit_defaults());
    }
    else if (cmd == "diagnose")
        c.update({{"theta", nullptr}, {"dist", "normal"}, {"m", 100000}, {"trunc", kDefaultTrunc}, {"input", ""}});
    else if (cmd == "study")
    {
        c.update({{"theta", nullptr}, {"dist", "normal"}, {"n", nullptr}, {"reps", nullptr}, {"burn_in", kDefaultBurnIn},
                  {"box", nullptr}, {"m", kDefaultBReplications}, {"L", kDefaultBTrunc}, {"lyap_m", 100000},
                  {"trunc", kDefaultTrunc}});
        c.update(fit_defaults());
    }
    else if (cmd == "scan")
        c.update({{"box", nullptr}, {"grid", nullptr}, {"dist", "normal"}, {"m", 20000}, {"trunc", kDefaultTrunc}});
    else if (cmd == "profile")
        c.update({{"input", nullptr}, {"theta", nullptr}, {"axis", nullptr}, {"grid", nullptr}, {"burn", kDefaultBurn}});
    else if (cmd == "asymptotics")
        c.update({{"theta", nullptr}, {"dist", "normal"}, {"m", kDefaultBReplications}, {"L", kDefaultBTrunc},
                  {"n", nullptr}});
    return c;
}

/// Fills model-dependent defaults and rejects missing required keys.
void complete(json& c)
{
    const ModelKind model = cfg_model(c);
    c["model"] = std::string(to_string(model));
    if (c.contains("box") && c["box"].is_null())
        c["box"] = box_json(default_box(model), model);
    if (c.contains("dist"))
        c["dist"] = parse_dist(c["dist"].get<std::string>()).name();
    for (const auto& [k, v] : c.items())
        if (v.is_null() && k != "g_init")
            throw InputError("missing required setting '" + k + "'");
}

std::vector<double> read_input(const json& c)
{
    std::ifstream in(c.at("input").get<std::string>());
    if (!in)
        throw InputError("cannot open input " + c.at("input").get<std::string>());
    return read_observations_csv(in);
}

template <class T, class W>
std::string to_text(const T& value, W writer)
{
    std::ostringstream ss;
    writer(value, ss);
    return ss.str();
}

void require_egarch(ModelKind model, const char* what)
{
    if (model != ModelKind::Egarch11)
        throw InputError(std::string(what) + " is available for egarch11 only");
}

//---------------------------------------------------------------------------//
// Commands
//---------------------------------------------------------------------------//

void cmd_simulate(const json& c, RunDir& out)
{
    const ModelKind model = cfg_model(c);
    const Path p = simulate(model, cfg_theta(c), parse_dist(c["dist"].get<std::string>()), c["n"].get<std::size_t>(),
                            c["burn_in"].get<std::size_t>(), c["seed"].get<std::uint64_t>());
    out.write("path.csv", to_text(p, write_path_csv));
}

void cmd_fit(const json& c, RunDir& out)
{
    const ModelKind model = cfg_model(c);
    const std::vector<double> x = read_input(c);
    const FitOptions opts = cfg_fit(c);
    const FitResult f = fit(model, x, cfg_box(c), opts);
    const FilterTrajectory traj = run_filter(model, f.theta_hat, x, opts.g_init, opts.burn);
    const Forecast fc = forecast(model, f.theta_hat, x, opts.g_init);
    json j = to_json(f, model);
    j["forecast_next"] = fc.next;
    j["lyapunov"] = to_json(empirical_lyapunov(model, f.theta_hat, x));
    out.write_json("fit.json", j);
    out.write("trajectory.csv", to_text(traj, write_trajectory_csv));
}

/// Writes diagnose.json; true when invertibility (EGARCH) or stationarity
/// (GARCH) is certified and, for EGARCH, (MM') holds.
bool diagnose(const json& c, RunDir& out)
{
    const ModelKind model = cfg_model(c);
    const ParamVector theta = cfg_theta(c);
    require_admissible(model, theta);
    const InnovationDist dist = parse_dist(c["dist"].get<std::string>());
    json j = json::object();
    bool ok = true;
    if (model == ModelKind::Egarch11)
    {
        const std::size_t m = c.contains("lyap_m") ? c["lyap_m"].get<std::size_t>() : c["m"].get<std::size_t>();
        const LyapunovReport r = model_implied_lyapunov(theta, dist, m, c["trunc"].get<std::size_t>(),
                                                        c["seed"].get<std::uint64_t>());
        const InnovationMoments mom = innovation_moments(theta, dist);
        const MmPrimeCheck mm = check_mm_prime(mom);
        j["model_implied_lyapunov"] = to_json(r);
        j["moments"] = to_json(mom);
        j["mm_prime"] = {{"ok", mm.ok}, {"margin", mm.margin}};
        ok = r.value < 0.0 && mm.ok;
    }
    else
    {
        const double s = stationarity_lyapunov_exact(theta, dist);
        j["stationarity_lyapunov"] = s;
        ok = s < 0.0 && theta.beta < 1.0;
    }
    if (c.contains("input") && c["input"].is_string() && !c["input"].get<std::string>().empty())
        j["empirical_lyapunov"] = to_json(empirical_lyapunov(model, theta, read_input(c)));
    j["ok"] = ok;
    out.write_json("diagnose.json", j);
    return ok;
}

Eigen::MatrixXd b_matrix(const json& c, ModelKind model, const ParamVector& theta, const InnovationDist& dist)
{
    const auto m = c["m"].get<std::size_t>();
    const auto L = c["L"].get<std::size_t>();
    const auto seed = c["seed"].get<std::uint64_t>();
    return model == ModelKind::Egarch11 ? b_matrix_mc(theta, dist, m, L, seed).b
                                        : garch_b_matrix_mc(theta, dist, m, L, seed).b;
}

void cmd_study(const json& c, RunDir& out, unsigned workers)
{
    if (!diagnose(c, out))
        throw DiagnosticFailure("study: theta0 fails the diagnostics (see diagnose.json)");
    StudyOptions o;
    o.model = cfg_model(c);
    o.theta0 = cfg_theta(c);
    o.dist = parse_dist(c["dist"].get<std::string>());
    o.n = c["n"].get<std::size_t>();
    o.reps = c["reps"].get<std::size_t>();
    o.seed = c["seed"].get<std::uint64_t>();
    o.burn_in = c["burn_in"].get<std::size_t>();
    o.box = cfg_box(c);
    o.fit = cfg_fit(c);
    o.workers = workers;
    const AsymptoticReport a = asymptotic_variance(b_matrix(c, o.model, o.theta0, o.dist), o.dist.fourth_moment(), o.n);
    o.V = a.V;
    const StudyResult r = run_study(o);
    out.write("study.csv", to_text(r.rows, write_study_csv));
    json s = to_json(r.summary, o.model);
    s["V"] = matrix_json(a.V);
    out.write_json("summary.json", s);
}

void cmd_scan(const json& c, RunDir& out)
{
    require_egarch(cfg_model(c), "scan");
    const json& g = c.at("grid");
    if (!g.is_array() || g.size() != 4)
        throw InputError("scan grid needs 4 counts");
    std::array<std::size_t, 4> grid{};
    for (std::size_t i = 0; i < 4; ++i)
        grid[i] = g[i].get<std::size_t>();
    const auto pts = region_scan(cfg_box(c), grid, parse_dist(c["dist"].get<std::string>()), c["m"].get<std::size_t>(),
                                 c["trunc"].get<std::size_t>(), c["seed"].get<std::uint64_t>());
    out.write("scan.csv", to_text(pts, write_scan_csv));
}

void cmd_profile(const json& c, RunDir& out)
{
    const ModelKind model = cfg_model(c);
    const std::string axis_name = c.at("axis").get<std::string>();
    const auto it = std::find(kParamNames.begin(), kParamNames.begin() + param_count(model), axis_name);
    if (it == kParamNames.begin() + param_count(model))
        throw InputError("unknown axis '" + axis_name + "'");
    const json& g = c.at("grid");
    const double lo = g.at("lo").get<double>(), hi = g.at("hi").get<double>();
    const auto count = g.at("count").get<std::size_t>();
    if (count == 0)
        throw InputError("profile grid needs at least one point");
    std::vector<double> grid(count);
    for (std::size_t i = 0; i < count; ++i)
        grid[i] = count == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1);
    const auto x = read_input(c);
    const auto pts = profile(model, x, cfg_theta(c), static_cast<std::size_t>(it - kParamNames.begin()), grid,
                             c["burn"].get<std::size_t>());
    out.write("profile.csv", to_text(pts, write_profile_csv));
}

void cmd_asymptotics(const json& c, RunDir& out)
{
    const ModelKind model = cfg_model(c);
    const ParamVector theta = cfg_theta(c);
    require_admissible(model, theta);
    const InnovationDist dist = parse_dist(c["dist"].get<std::string>());
    json j = json::object();
    bool ok = std::isfinite(dist.fourth_moment());
    if (model == ModelKind::Egarch11)
    {
        const InnovationMoments mom = innovation_moments(theta, dist);
        const MmPrimeCheck mm = check_mm_prime(mom);
        j["moments"] = to_json(mom);
        j["mm_prime"] = {{"ok", mm.ok}, {"margin", mm.margin}};
        ok = mm.ok;
        if (ok)
        {
            const BDiagClosed cf = b_diag_closed_form(theta, mom);
            j["b_diag_closed_form"] = cf.diag;
            j["b22_printed"] = cf.b22_printed;
        }
    }
    if (!ok)
    {
        j["ok"] = false;
        out.write_json("asymptotics.json", j);
        throw DiagnosticFailure("asymptotics: the asymptotic covariance does not exist at theta0");
    }
    const auto m = c["m"].get<std::size_t>();
    const auto L = c["L"].get<std::size_t>();
    const auto seed = c["seed"].get<std::uint64_t>();
    const BMatrixEstimate b = model == ModelKind::Egarch11 ? b_matrix_mc(theta, dist, m, L, seed)
                                                           : garch_b_matrix_mc(theta, dist, m, L, seed);
    j["b_mc"] = matrix_json(b.b);
    j["b_mc_se"] = matrix_json(b.se);
    j["b_mc_tail_bound"] = b.tail_bound;
    j["report"] = to_json(asymptotic_variance(b.b, dist.fourth_moment(), c["n"].get<std::size_t>()));
    j["ok"] = true;
    out.write_json("asymptotics.json", j);
}

//---------------------------------------------------------------------------//
// Flag surface
//---------------------------------------------------------------------------//

struct Flags
{
    std::string config;
    std::string out_dir;
    unsigned workers = 0;
    std::map<std::string, std::string> text;  // raw flag values by config key
};

void add_flags(CLI::App* sub, Flags& f, const std::vector<std::string>& keys)
{
    sub->add_option("--config", f.config, "JSON config file; flags override it");
    sub->add_option("--out-dir", f.out_dir, "output directory")->required();
    sub->add_option("--workers", f.workers, "worker threads (0 = all cores); does not change results");
    static const std::map<std::string, std::pair<std::string, std::string>> known = {
        {"model", {"--model", "garch11 or egarch11"}},
        {"theta", {"--theta", "comma-separated parameters (alpha,beta,gamma[,delta])"}},
        {"box", {"--box", "comma-separated lo:hi per parameter"}},
        {"dist", {"--dist", "normal or t:<nu>"}},
        {"n", {"--n", "sample size"}},
        {"reps", {"--reps", "replications"}},
        {"seed", {"--seed", "seed"}},
        {"trunc", {"--trunc", "MA truncation for the model-implied Lyapunov coefficient"}},
        {"burn", {"--burn", "filter burn-in excluded from QLIK"}},
        {"burn_in", {"--burn-in", "discarded simulation steps"}},
        {"input", {"--input", "CSV with column x"}},
        {"m", {"--m", "Monte Carlo replications"}},
        {"L", {"--L", "gradient series length"}},
        {"starts", {"--starts", "multi-start count"}},
        {"axis", {"--axis", "profiled parameter"}},
        {"grid", {"--grid", "profile: lo:hi:count; scan: four counts a,b,g,d"}},
    };
    for (const auto& k : keys)
    {
        const auto& [flag, help] = known.at(k);
        sub->add_option(flag, f.text[k], help);
    }
}

json flag_value(const std::string& key, const std::string& raw, const std::string& cmd)
{
    if (key == "theta")
        return parse_theta_flag(raw);
    if (key == "box")
        return parse_box_flag(raw);
    if (key == "grid")
    {
        if (cmd == "profile")
        {
            const auto p = split(raw, ':');
            if (p.size() != 3)
                throw InputError("profile grid is lo:hi:count");
            return {{"lo", to_double(p[0])}, {"hi", to_double(p[1])}, {"count", to_count(p[2])}};
        }
        json a = json::array();
        for (const auto& s : split(raw, ','))
            a.push_back(to_count(s));
        return a;
    }
    if (key == "model" || key == "dist" || key == "input" || key == "axis")
        return raw;
    return to_count(raw);
}

json resolve(const std::string& cmd, const Flags& f, CLI::App* sub)
{
    json c = defaults(cmd);
    if (!f.config.empty())
    {
        json file;
        try
        {
            file = json::parse(read_file(f.config));
        }
        catch (const json::parse_error& e)
        {
            throw InputError(f.config + ": " + e.what());
        }
        for (const auto& [k, v] : file.items())
        {
            if (!c.contains(k))
                throw InputError(f.config + ": unknown setting '" + k + "' for " + cmd);
            if (k == "command" && v != cmd)
                throw InputError(f.config + ": config is for '" + v.get<std::string>() + "'");
            c[k] = v;
        }
    }
    for (const auto& [k, raw] : f.text)
    {
        const CLI::Option* opt = sub->get_option_no_throw(k == "burn_in" ? "--burn-in" : "--" + k);
        if (opt != nullptr && opt->count() > 0)
            c[k] = flag_value(k, raw, cmd);
    }
    complete(c);
    if (c.contains("input"))
        c["input_sha256"] = c["input"].is_string() && !c["input"].get<std::string>().empty()
                                ? json(sha256_hex(read_file(c["input"].get<std::string>())))
                                : json(nullptr);
    return c;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"volsre: GARCH(1,1) / EGARCH(1,1) filtering, estimation and invertibility diagnostics"};
    app.require_subcommand(1);
    Flags f;
    const std::vector<std::pair<std::string, std::vector<std::string>>> commands = {
        {"simulate", {"model", "theta", "dist", "n", "seed", "burn_in"}},
        {"fit", {"model", "box", "input", "seed", "burn", "starts"}},
        {"diagnose", {"model", "theta", "dist", "m", "seed", "trunc", "input"}},
        {"study", {"model", "theta", "box", "dist", "n", "reps", "seed", "burn", "burn_in", "trunc", "m", "L", "starts"}},
        {"scan", {"box", "dist", "m", "seed", "trunc", "grid"}},
        {"profile", {"model", "theta", "input", "axis", "grid", "burn"}},
        {"asymptotics", {"model", "theta", "dist", "n", "m", "L", "seed"}},
    };
    std::map<std::string, CLI::App*> subs;
    for (const auto& [name, keys] : commands)
    {
        subs[name] = app.add_subcommand(name);
        add_flags(subs[name], f, keys);
    }
    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError& e)
    {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    std::string cmd;
    for (const auto& [name, sub] : subs)
        if (sub->parsed())
            cmd = name;
    try
    {
        const json c = resolve(cmd, f, subs[cmd]);
        RunDir out(f.out_dir);
        out.write_json("config.json", c);
        int code = 0;
        try
        {
            if (cmd == "simulate")
                cmd_simulate(c, out);
            else if (cmd == "fit")
                cmd_fit(c, out);
            else if (cmd == "diagnose")
                code = diagnose(c, out) ? 0 : kExitInfeasible;
            else if (cmd == "study")
                cmd_study(c, out, f.workers);
            else if (cmd == "scan")
                cmd_scan(c, out);
            else if (cmd == "profile")
                cmd_profile(c, out);
            else if (cmd == "asymptotics")
                cmd_asymptotics(c, out);
        }
        catch (...)
        {
            out.finish();
            throw;
        }
        out.finish();
        return code;
    }
    catch (const InfeasibleError& e)
    {
        std::cerr << "infeasible: " << e.what() << "\n";
        return kExitInfeasible;
    }
    catch (const DiagnosticFailure& e)
    {
        std::cerr << e.what() << "\n";
        return kExitInfeasible;
    }
    catch (const std::exception& e)
    {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
}

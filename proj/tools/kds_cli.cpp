// kds: command-line front end.
//
//   kds metric info | angular table | radial wronskian | qnm find | qnm scan
//       | greens apply | tdwave run | verify
//
// Every flag mirrors a config key "section.key"; flags override the file given
// with --config. Exit status: 0 success, 1 domain error, 2 usage error.

#include "kds/acceptance.hpp"
#include "kds/angular.hpp"
#include "kds/config.hpp"
#include "kds/errors.hpp"
#include "kds/greens.hpp"
#include "kds/radial.hpp"
#include "kds/resonances.hpp"
#include "kds/tdwave.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <array>
#include <cctype>
#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <set>
#include <sstream>
#include <thread>

namespace fs = std::filesystem;
using namespace kds;

namespace {

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Binding {
    std::string key;
    std::string flag;
    std::string value;
    CLI::Option* opt = nullptr;
    bool is_flag = false;
};

class Settings {
public:
    Config cfg;
    std::map<std::string, std::string> flag_of;  // keys set from the command line

    std::string origin(const std::string& key) const {
        const auto it = flag_of.find(key);
        return it != flag_of.end() ? it->second : "config key " + key;
    }

    std::string str(const std::string& key, const std::string& def) {
        const std::string v = cfg.get_string(key, def);
        used_.set(key, v);
        return v;
    }
    double num(const std::string& key, double def) {
        const auto v = list(key, {def});
        if (v.size() != 1) throw UsageError(origin(key) + " expects one number");
        return v[0];
    }
    int integer(const std::string& key, int def) {
        const double v = num(key, def);
        if (v != std::floor(v) || std::abs(v) > 1e9) throw UsageError(origin(key) + " expects an integer");
        return int(v);
    }
    bool boolean(const std::string& key, bool def) {
        const std::string v = str(key, def ? "true" : "false");
        if (v == "true" || v == "1") return true;
        if (v == "false" || v == "0") return false;
        throw UsageError(origin(key) + " expects true or false");
    }
    std::vector<double> list(const std::string& key, const std::vector<double>& def) {
        std::vector<double> out;
        try {
            out = cfg.get_list(key, def);
        } catch (const ConfigError&) {
            throw UsageError(origin(key) + " expects comma-separated numbers, got '" + cfg.get_string(key, "") + "'");
        }
        std::string s;
        for (std::size_t i = 0; i < out.size(); ++i) s += (i ? "," : "") + fmt(out[i]);
        used_.set(key, s);
        return out;
    }
    std::vector<double> list_n(const std::string& key, const std::vector<double>& def, std::size_t n,
                               const std::string& shape) {
        const auto v = list(key, def);
        if (v.size() != n) throw UsageError(origin(key) + " expects " + shape);
        return v;
    }
    cplx complex(const std::string& key, cplx def) {
        const auto v = list(key, {def.real(), def.imag()});
        if (v.size() == 1) return {v[0], 0.0};
        if (v.size() != 2) throw UsageError(origin(key) + " expects re or re,im");
        return {v[0], v[1]};
    }
    std::pair<int, int> range(const std::string& key, std::pair<int, int> def) {
        const auto v = list(key, {double(def.first), double(def.second)});
        if (v.size() == 1 && v[0] == std::floor(v[0])) return {int(v[0]), int(v[0])};
        if (v.size() != 2 || v[0] != std::floor(v[0]) || v[1] != std::floor(v[1]) || v[0] > v[1])
            throw UsageError(origin(key) + " expects lo,hi integers with lo <= hi");
        return {int(v[0]), int(v[1])};
    }

    /// Effective configuration: every key read, with defaults filled in.
    std::vector<std::string> echo() const { return used_.echo(); }

private:
    Config used_;
};

std::string timestamp() {
    const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

class Output {
public:
    Output(Settings& s, std::string command) : s_(s), command_(std::move(command)) {
        dir_ = s.str("run.out", ".");
    }

    /// Opens dir/name and writes the header; `prefix` starts comment lines.
    std::ofstream open(const std::string& name, const std::vector<std::string>& notes = {},
                       const std::string& prefix = "# ") {
        fs::create_directories(dir_);
        const fs::path path = fs::path(dir_) / name;
        std::ofstream f(path);
        if (!f) throw UsageError("cannot write " + path.string());
        f << prefix << "kds " << command_ << "\n";
        f << prefix << "timestamp " << timestamp() << "\n";
        for (const auto& line : s_.echo()) f << prefix << "config " << line << "\n";
        for (const auto& n : notes) f << prefix << n << "\n";
        written_.push_back(path.string());
        return f;
    }
    std::string files() const {
        std::string s;
        for (const auto& w : written_) s += (s.empty() ? "" : ", ") + w;
        return s;
    }

private:
    Settings& s_;
    std::string command_;
    std::string dir_;
    std::vector<std::string> written_;
};

BlackHoleParams params_of(Settings& s) {
    return derive_params(s.num("params.M0", 0.1), s.num("params.Lambda", 3.0), s.num("params.a", 0.0),
                         s.num("params.m_field", 0.0));
}

int workers_of(Settings& s) {
    const int w = s.integer("run.workers", 0);
    if (w < 0) throw UsageError(s.origin("run.workers") + " must be >= 0");
    return w > 0 ? w : int(std::max(1u, std::thread::hardware_concurrency()));
}

// ---- commands -------------------------------------------------------------

int cmd_metric_info(Settings& s) {
    const BlackHoleParams p = params_of(s);
    Output out(s, "metric info");
    auto f = out.open("metric_info.csv");
    f << "quantity,value\n";
    const std::vector<std::pair<std::string, double>> rows{
        {"r_minus", p.r_minus}, {"r_plus", p.r_plus}, {"A_minus", p.A_minus}, {"A_plus", p.A_plus}, {"alpha", p.alpha}};
    for (const auto& [k, v] : rows) f << k << "," << fmt(v) << "\n";
    std::cout << "r_minus=" << fmt(p.r_minus) << " r_plus=" << fmt(p.r_plus) << " A_minus=" << fmt(p.A_minus)
              << " A_plus=" << fmt(p.A_plus) << " alpha=" << fmt(p.alpha) << "\n";
    return 0;
}

int cmd_angular_table(Settings& s) {
    const BlackHoleParams p = params_of(s);
    const cplx omega = s.complex("angular.omega", 0.0);
    const auto [k_lo, k_hi] = s.range("angular.k_range", {0, 0});
    const int l_max = s.integer("angular.l_max", 6);
    const int n_req = s.integer("angular.n", 0);
    Output out(s, "angular table");
    auto f = out.open("angular_table.csv");
    f << "k,l,re_lambda,im_lambda,residual,converged,basis_size\n";
    int rows = 0;
    for (int k = k_lo; k <= k_hi; ++k) {
        const int n = n_req > 0 ? n_req : default_angular_size(p, omega, k);
        for (const auto& b : angular_eigs(p, omega, k, n)) {
            if (b.l > l_max) break;
            f << b.k << "," << b.l << "," << fmt(b.lambda.real()) << "," << fmt(b.lambda.imag()) << ","
              << fmt(b.residual) << "," << (b.converged ? 1 : 0) << "," << b.basis_size << "\n";
            ++rows;
        }
    }
    std::cout << "angular table: " << rows << " branches -> " << out.files() << "\n";
    return 0;
}

int cmd_radial_wronskian(Settings& s) {
    const BlackHoleParams p = params_of(s);
    const cplx omega = s.complex("radial.omega", 0.0);
    const cplx lambda = s.complex("radial.lambda", 0.0);
    const int k = s.integer("radial.k", 0);
    const int n_series = s.integer("radial.n_series", 64);
    const bool dump = s.boolean("radial.dump_tortoise", false);
    const TortoiseMap map = build_tortoise(p, default_anchor(p), n_series);
    const WronskianValue w = wronskian(map, omega, lambda, k, true);
    Output out(s, "radial wronskian");
    auto f = out.open("wronskian.csv");
    f << "re_omega,im_omega,re_lambda,im_lambda,k,re_W,im_W,scale,re_W_normalized,im_W_normalized,constancy_defect,"
         "ode_steps\n";
    f << fmt(omega.real()) << "," << fmt(omega.imag()) << "," << fmt(lambda.real()) << "," << fmt(lambda.imag()) << ","
      << k << "," << fmt(w.W.real()) << "," << fmt(w.W.imag()) << "," << fmt(w.scale) << "," << fmt(w.normalized.real())
      << "," << fmt(w.normalized.imag()) << "," << fmt(w.constancy_defect) << "," << w.stats.steps << "\n";
    if (dump) {
        auto t = out.open("tortoise.csv", {"anchor r0=" + fmt(map.r0()) + " X0=" + fmt(map.X0())});
        t << "r,x\n";
        for (std::size_t i = 0; i < map.table_r().size(); ++i)
            t << fmt(map.table_r()[i]) << "," << fmt(map.table_x()[i]) << "\n";
    }
    std::cout << "W=" << fmt(w.W.real()) << (w.W.imag() < 0 ? "" : "+") << fmt(w.W.imag())
              << "i constancy_defect=" << fmt(w.constancy_defect) << " -> " << out.files() << "\n";
    return 0;
}

void write_resonances(Output& out, const std::string& stem, const std::vector<Resonance>& rs,
                      const std::vector<std::string>& notes) {
    auto j = out.open(stem + ".jsonl", notes, "# ");
    auto c = out.open(stem + ".csv", notes);
    c << "k,l,re_omega,im_omega,re_lambda,im_lambda,residual,provenance\n";
    for (const auto& r : rs) {
        nlohmann::json rec{{"k", r.k},
                           {"l", r.l},
                           {"re_omega", r.omega.real()},
                           {"im_omega", r.omega.imag()},
                           {"re_lambda", r.lambda.real()},
                           {"im_lambda", r.lambda.imag()},
                           {"residual", r.residual},
                           {"provenance", r.provenance}};
        if (!r.diagnostic.empty()) rec["diagnostic"] = r.diagnostic;
        j << rec.dump() << "\n";
        c << r.k << "," << r.l << "," << fmt(r.omega.real()) << "," << fmt(r.omega.imag()) << ","
          << fmt(r.lambda.real()) << "," << fmt(r.lambda.imag()) << "," << fmt(r.residual) << ",\"" << r.provenance
          << "\"\n";
    }
}

int cmd_qnm_find(Settings& s) {
    const BlackHoleParams p = params_of(s);
    const bool wkb = s.boolean("qnm.wkb", false);
    const double tol = s.num("qnm.tol", 1e-10);
    const ModeSolver solver(p);
    std::vector<Resonance> found;
    std::vector<std::string> notes;
    if (wkb) {
        const int l_max = s.integer("qnm.l_max", 3);
        const int n_max = s.integer("qnm.n_max", 0);
        if (l_max < 1 || n_max < 0) throw UsageError("--l-max must be >= 1 and --n-max >= 0");
        Output out(s, "qnm find");
        for (const auto& seed : sds_wkb_seeds(p, l_max, n_max)) {
            try {
                Resonance r = refine(solver, seed.omega, 0, seed.l, tol);
                r.provenance = seed.provenance + "; newton";
                found.push_back(r);
            } catch (const Error& e) {
                notes.push_back("seed l=" + std::to_string(seed.l) + " n=" + std::to_string(seed.n) + " failed: " +
                                e.what());
            }
        }
        if (found.empty()) throw NoConvergence("no WKB seed converged");
        write_resonances(out, "qnm_find", found, notes);
        std::cout << "qnm find: " << found.size() << " modes from WKB seeds -> " << out.files() << "\n";
        return 0;
    }
    const cplx seed = s.complex("qnm.seed", {NAN, NAN});
    if (std::isnan(seed.real())) throw UsageError("qnm find needs --seed-omega re,im or --wkb");
    const int k = s.integer("qnm.k", 0);
    const int l = s.integer("qnm.l", std::abs(k));
    Output out(s, "qnm find");
    Resonance r = refine(solver, seed, k, l, tol);
    found.push_back(r);
    write_resonances(out, "qnm_find", found, notes);
    std::cout << "omega=" << fmt(r.omega.real()) << (r.omega.imag() < 0 ? "" : "+") << fmt(r.omega.imag())
              << "i residual=" << fmt(r.residual) << " -> " << out.files() << "\n";
    return 0;
}

int cmd_qnm_scan(Settings& s) {
    const BlackHoleParams p = params_of(s);
    if (!s.cfg.has("qnm.box")) throw UsageError("--box is required (re_min,re_max,im_min,im_max)");
    const auto b = s.list_n("qnm.box", {}, 4, "re_min,re_max,im_min,im_max");
    const Box box{b[0], b[1], b[2], b[3]};
    if (!box.valid()) throw UsageError(s.origin("qnm.box") + " needs re_min < re_max and im_min < im_max");
    const auto k_range = s.range("qnm.k_range", {0, 0});
    const auto l_range = s.range("qnm.l_range", {std::abs(k_range.first), std::abs(k_range.first) + 2});
    ScanOptions opt;
    opt.n_re = s.integer("qnm.n_re", 1);
    opt.n_im = s.integer("qnm.n_im", 1);
    opt.n_contour = s.integer("qnm.n_contour", 128);
    opt.max_depth = s.integer("qnm.max_depth", 12);
    opt.tol = s.num("qnm.tol", 1e-10);
    opt.workers = workers_of(s);
    if (opt.n_re < 1 || opt.n_im < 1 || opt.n_contour < 8) throw UsageError("scan grid sizes must be positive");
    const ModeSolver solver(p);
    Output out(s, "qnm scan");
    const ScanResult res = scan(solver, box, k_range, l_range, opt);
    std::vector<std::string> notes{"total winding " + std::to_string(res.total_count)};
    for (const auto& i : res.issues)
        notes.push_back("issue k=" + std::to_string(i.k) + " l=" + std::to_string(i.l) + " cell [" +
                        fmt(i.cell.re_min) + "," + fmt(i.cell.re_max) + "]x[" + fmt(i.cell.im_min) + "," +
                        fmt(i.cell.im_max) + "]: " + i.message);
    write_resonances(out, "qnm_scan", res.resonances, notes);
    std::cout << "qnm scan: " << res.resonances.size() << " resonances, " << res.issues.size() << " issues -> "
              << out.files() << "\n";
    return 0;
}

int cmd_greens_apply(Settings& s) {
    const BlackHoleParams p = params_of(s);
    const std::string src = s.str("greens.source", "");
    if (src.empty()) throw UsageError("greens apply needs --source FILE (columns x,mu,re_f,im_f)");
    ResolventRequest req;
    req.omega = s.complex("greens.omega", {1.0, -0.1});
    req.k = s.integer("greens.k", 0);
    req.L_max = s.integer("greens.L_max", 4);
    req.delta_r = s.num("greens.delta_r", -1.0);

    std::ifstream in(src);
    if (!in) throw UsageError("cannot read " + src);
    std::vector<std::array<double, 4>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#' || std::isalpha(static_cast<unsigned char>(line[0]))) continue;
        std::array<double, 4> r{};
        std::stringstream ss(line);
        std::string cell;
        for (int c = 0; c < 4; ++c) {
            if (!std::getline(ss, cell, ',')) throw UsageError(src + ": expected 4 columns in '" + line + "'");
            try {
                r[c] = std::stod(cell);
            } catch (const std::exception&) {
                throw UsageError(src + ": not a number: '" + cell + "'");
            }
        }
        rows.push_back(r);
    }
    std::set<double> xs, mus;
    for (const auto& r : rows) {
        xs.insert(r[0]);
        mus.insert(r[1]);
    }
    req.x_grid.assign(xs.begin(), xs.end());
    req.n_mu = int(mus.size());
    if (req.n_mu < 2) throw UsageError(src + ": needs at least two mu values");
    const std::vector<double> nodes = mu_nodes(req.n_mu);
    auto mu_index = [&](double mu) {
        for (int j = 0; j < req.n_mu; ++j)
            if (std::abs(nodes[j] - mu) < 1e-10) return j;
        throw UsageError(src + ": mu=" + fmt(mu) + " is not a Gauss-Legendre node of order " +
                         std::to_string(req.n_mu));
    };
    req.f = Eigen::MatrixXcd::Zero(int(xs.size()), req.n_mu);
    std::map<double, int> x_index;
    for (int i = 0; i < int(req.x_grid.size()); ++i) x_index[req.x_grid[i]] = i;
    for (const auto& r : rows) req.f(x_index[r[0]], mu_index(r[1])) = cplx(r[2], r[3]);

    const TortoiseMap map = build_tortoise(p, default_anchor(p));
    const ResolventResult res = resolvent_apply(map, req);
    std::vector<std::string> notes{"residual " + fmt(res.residual),
                                   std::string("truncation_warning ") + (res.truncation_warning ? "1" : "0")};
    for (const auto& t : res.terms)
        notes.push_back("branch l=" + std::to_string(t.l) + " lambda=" + fmt(t.lambda.real()) + "," +
                        fmt(t.lambda.imag()) + " norm=" + fmt(t.norm));
    Output out(s, "greens apply");
    auto f = out.open("greens_u.csv", notes);
    f << "x,mu,re_u,im_u\n";
    for (int i = 0; i < res.u.rows(); ++i)
        for (int j = 0; j < res.u.cols(); ++j)
            f << fmt(res.x_grid[i]) << "," << fmt(res.mu[j]) << "," << fmt(res.u(i, j).real()) << ","
              << fmt(res.u(i, j).imag()) << "\n";
    std::cout << "greens apply: residual=" << fmt(res.residual) << (res.truncation_warning ? " (truncation warning)" : "")
              << " -> " << out.files() << "\n";
    return 0;
}

int cmd_tdwave_run(Settings& s) {
    const BlackHoleParams p = params_of(s);
    if (p.a != 0.0) throw NonzeroSpinUnsupported("time-domain evolution separates only for a = 0");
    const TortoiseMap map = build_tortoise(p, default_anchor(p));
    const double x_top = map.x_of_r(3.0 * p.M0);
    const int l = s.integer("tdwave.l", 1);
    const double T = s.num("tdwave.T", 14.0);
    WaveOptions wo;
    wo.dx = s.num("tdwave.dx", wo.dx);
    wo.dt_out = s.num("tdwave.dt_out", 0.02);
    wo.cfl = s.num("tdwave.cfl", wo.cfl);
    if (s.cfg.has("tdwave.dt")) wo.dt = s.num("tdwave.dt", NAN);
    const std::vector<double> probes = s.list("tdwave.probes", {x_top + 1.0});
    const auto u = s.list_n("tdwave.u0", {x_top, 1.0, 1.0}, 3, "center,width,amplitude");
    const auto v = s.list_n("tdwave.v0", {x_top, 1.0, 0.0}, 3, "center,width,amplitude");
    const std::vector<double> fit = s.list("tdwave.fit", {});
    if (!fit.empty() && fit.size() != 2) throw UsageError(s.origin("tdwave.fit") + " expects t_start,t_end");
    const Gaussian gu{u[0], u[1], u[2]}, gv{v[0], v[1], v[2]};

    const WaveSeries ws = evolve(map, l, gu, gv, T, probes, wo);
    std::vector<std::string> notes{"grid x in [" + fmt(ws.x_left) + ", " + fmt(ws.x_right) + "] dx=" + fmt(ws.dx) +
                                   " dt=" + fmt(ws.dt)};
    std::string summary = "tdwave run: " + std::to_string(ws.t.size()) + " samples";
    if (l == 0) {
        const double pred = plateau_prediction(map, 0, gu, gv, ws.x_left, ws.x_right);
        notes.push_back("plateau_prediction " + fmt(pred));
        summary += " plateau_prediction=" + fmt(pred) + " final=" + fmt(ws.u[0].back());
    }
    if (!fit.empty()) {
        const RingdownFit rf = ringdown_fit(ws.t, ws.u[0], fit[0], fit[1]);
        notes.push_back("ringdown omega " + fmt(rf.omega.real()) + "," + fmt(rf.omega.imag()) + " fit_residual " +
                        fmt(rf.fit_residual));
        summary += " omega=" + fmt(rf.omega.real()) + (rf.omega.imag() < 0 ? "" : "+") + fmt(rf.omega.imag()) + "i";
    }
    Output out(s, "tdwave run");
    auto f = out.open("tdwave.csv", notes);
    f << "t";
    for (std::size_t q = 0; q < probes.size(); ++q) f << ",u_" << q;
    f << ",energy\n";
    for (std::size_t n = 0; n < ws.t.size(); ++n) {
        f << fmt(ws.t[n]);
        for (const auto& series : ws.u) f << "," << fmt(series[n]);
        f << "," << fmt(ws.energy[n]) << "\n";
    }
    std::cout << summary << " -> " << out.files() << "\n";
    return 0;
}

int cmd_verify(Settings& s) {
    AcceptanceOptions opt;
    opt.seed = static_cast<unsigned long>(s.integer("run.seed", 20261018));
    opt.workers = workers_of(s);
    for (double id : s.list("verify.only", {})) {
        if (id != std::floor(id) || id < 1 || id > 8) throw UsageError(s.origin("verify.only") + " takes ids 1..8");
        opt.only.push_back(int(id));
    }
    Output out(s, "verify");
    bool all = true;
    const auto results = run_acceptance(opt, [&](const CriterionResult& r) {
        std::cout << format_result(r) << std::endl;
        all = all && r.pass;
    });
    auto f = out.open("acceptance.csv");
    f << "id,name,pass,detail\n";
    for (const auto& r : results) f << r.id << ",\"" << r.name << "\"," << (r.pass ? 1 : 0) << ",\"" << r.detail << "\"\n";
    std::cout << "verify: " << (all ? "all criteria pass" : "some criteria FAIL") << " -> " << out.files() << "\n";
    return all ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Kerr-de Sitter resonance toolkit"};
    app.require_subcommand(1);
    std::vector<std::unique_ptr<Binding>> bindings;
    auto bind = [&](CLI::App* where, const std::string& flag, const std::string& key, const std::string& help) {
        auto b = std::make_unique<Binding>();
        b->key = key;
        b->flag = flag;
        b->opt = where->add_option(flag, b->value, help);
        bindings.push_back(std::move(b));
    };
    auto bind_flag = [&](CLI::App* where, const std::string& flag, const std::string& key, const std::string& help) {
        auto b = std::make_unique<Binding>();
        b->key = key;
        b->flag = flag;
        b->is_flag = true;
        b->opt = where->add_flag(flag, help);
        bindings.push_back(std::move(b));
    };

    std::string config_path;
    app.add_option("--config", config_path, "key = value file with [section] headers");
    bind(&app, "--out", "run.out", "output directory (default .)");
    bind(&app, "--workers", "run.workers", "worker threads (0: all cores)");
    bind(&app, "--seed", "run.seed", "seed for random test data");
    bind(&app, "--M0", "params.M0", "mass");
    bind(&app, "--Lambda", "params.Lambda", "cosmological constant");
    bind(&app, "--a", "params.a", "rotation parameter");
    bind(&app, "--m-field", "params.m_field", "Klein-Gordon mass");

    std::map<CLI::App*, std::function<int(Settings&)>> leaves;
    auto leaf = [&](CLI::App* parent, const std::string& name, const std::string& help,
                    std::function<int(Settings&)> fn) {
        CLI::App* sub = parent->add_subcommand(name, help);
        sub->fallthrough();
        leaves[sub] = std::move(fn);
        return sub;
    };
    auto group = [&](const std::string& name, const std::string& help) {
        CLI::App* g = app.add_subcommand(name, help);
        g->require_subcommand(1);
        g->fallthrough();
        return g;
    };

    CLI::App* metric = group("metric", "background geometry");
    leaf(metric, "info", "horizons and surface gravities", cmd_metric_info);

    CLI::App* angular = group("angular", "angular eigenproblem");
    CLI::App* at = leaf(angular, "table", "eigenvalue table", cmd_angular_table);
    bind(at, "--omega", "angular.omega", "frequency re[,im]");
    bind(at, "--k-range", "angular.k_range", "k or k_lo,k_hi");
    bind(at, "--l-max", "angular.l_max", "largest l reported");
    bind(at, "--n", "angular.n", "basis size (0: default)");

    CLI::App* radial = group("radial", "radial ODE");
    CLI::App* rw = leaf(radial, "wronskian", "Wronskian of the outgoing solutions", cmd_radial_wronskian);
    bind(rw, "--omega", "radial.omega", "frequency re[,im]");
    bind(rw, "--lambda", "radial.lambda", "separation constant re[,im]");
    bind(rw, "--k", "radial.k", "azimuthal number");
    bind(rw, "--n-series", "radial.n_series", "boundary series length");
    bind_flag(rw, "--dump-tortoise", "radial.dump_tortoise", "also write the r(x) table");

    CLI::App* qnm = group("qnm", "resonances");
    CLI::App* qf = leaf(qnm, "find", "Newton refinement from a seed", cmd_qnm_find);
    bind(qf, "--seed-omega", "qnm.seed", "seed re,im");
    bind(qf, "--k", "qnm.k", "azimuthal number");
    bind(qf, "--l", "qnm.l", "angular label");
    bind(qf, "--tol", "qnm.tol", "Newton tolerance");
    bind_flag(qf, "--wkb", "qnm.wkb", "seed from the barrier-top lattice (a = 0)");
    bind(qf, "--l-max", "qnm.l_max", "largest l for --wkb");
    bind(qf, "--n-max", "qnm.n_max", "largest overtone for --wkb");
    CLI::App* qs = leaf(qnm, "scan", "argument-principle box scan", cmd_qnm_scan);
    bind(qs, "--box", "qnm.box", "re_min,re_max,im_min,im_max");
    bind(qs, "--k-range", "qnm.k_range", "k or k_lo,k_hi");
    bind(qs, "--l-range", "qnm.l_range", "l or l_lo,l_hi");
    bind(qs, "--n-re", "qnm.n_re", "initial cells along Re");
    bind(qs, "--n-im", "qnm.n_im", "initial cells along Im");
    bind(qs, "--n-contour", "qnm.n_contour", "contour points per cell");
    bind(qs, "--max-depth", "qnm.max_depth", "subdivision limit");
    bind(qs, "--tol", "qnm.tol", "Newton tolerance");

    CLI::App* greens = group("greens", "separated resolvent");
    CLI::App* ga = leaf(greens, "apply", "apply the resolvent to a source", cmd_greens_apply);
    bind(ga, "--source", "greens.source", "CSV with columns x,mu,re_f,im_f");
    bind(ga, "--omega", "greens.omega", "frequency re[,im]");
    bind(ga, "--k", "greens.k", "azimuthal number");
    bind(ga, "--L-max", "greens.L_max", "angular branches summed");
    bind(ga, "--delta-r", "greens.delta_r", "K_r margin");

    CLI::App* tdwave = group("tdwave", "time-domain evolution (a = 0)");
    CLI::App* tr = leaf(tdwave, "run", "evolve Gaussian data", cmd_tdwave_run);
    bind(tr, "--l", "tdwave.l", "angular number");
    bind(tr, "--T", "tdwave.T", "final time");
    bind(tr, "--dx", "tdwave.dx", "grid step");
    bind(tr, "--dt", "tdwave.dt", "time step (default from CFL)");
    bind(tr, "--dt-out", "tdwave.dt_out", "output interval");
    bind(tr, "--cfl", "tdwave.cfl", "Courant factor");
    bind(tr, "--probes", "tdwave.probes", "probe x list");
    bind(tr, "--u0", "tdwave.u0", "Gaussian center,width,amplitude");
    bind(tr, "--v0", "tdwave.v0", "Gaussian center,width,amplitude for u_t");
    bind(tr, "--fit", "tdwave.fit", "ringdown window t_start,t_end");

    CLI::App* verify = leaf(&app, "verify", "run the acceptance suite", cmd_verify);
    bind(verify, "--only", "verify.only", "criterion ids");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    std::set<std::string> allowed;
    for (const auto& b : bindings) allowed.insert(b->key);
    try {
        Settings s;
        if (!config_path.empty()) {
            s.cfg = Config::load(config_path);
            s.cfg.require_known(allowed);
        }
        for (const auto& b : bindings) {
            if (b->opt->count() == 0) continue;
            s.cfg.set(b->key, b->is_flag ? "true" : b->value);
            s.flag_of[b->key] = b->flag;
        }
        for (const auto& [sub, fn] : leaves)
            if (sub->parsed()) return fn(s);
        std::cerr << "error: no command given\n";
        return 2;
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const ConfigError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

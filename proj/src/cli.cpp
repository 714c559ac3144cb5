#include "equiconv/cli.hpp"

#include <spdlog/spdlog.h>

#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include "equiconv/catalog.hpp"
#include "equiconv/criterion.hpp"
#include "equiconv/errors.hpp"
#include "equiconv/expansion.hpp"
#include "equiconv/regularity.hpp"
#include "equiconv/singular.hpp"
#include "equiconv/solver.hpp"
#include "equiconv/torus.hpp"

namespace equiconv::cli {

using io::json;

namespace {

const char* kCommands[] = {"classify", "spectrum", "expand", "equiconv", "torus-demo", "schrodinger-sf", "oskina"};

template <class T>
void read(const json& j, const std::string& key, const std::string& path, T& target) {
    if (!j.contains(key)) return;
    try {
        target = j.at(key).get<T>();
    } catch (const json::exception& e) {
        io::config_error(path + "." + key, e.what());
    }
}

void require(bool ok, const std::string& path, const std::string& what) {
    if (!ok) io::config_error(path, what);
}

double read_h(const json& j, const std::string& path) {
    if (j.is_string() && (j == "inf" || j == "infinity")) return singular::kInfinity;
    if (j.is_number()) return j.get<double>();
    io::config_error(path, "expected a number or \"inf\"");
}

json h_to_json(double h) { return std::isinf(h) ? json("inf") : json(h); }

std::string fmt_cplx(cplx z) {
    z += cplx{0.0, 0.0};  // turns -0 into +0
    std::ostringstream s;
    s.precision(12);
    s << z.real() << (z.imag() < 0 ? "-" : "+") << std::abs(z.imag()) << "i";
    return s.str();
}

void check_ranges(const ExperimentConfig& c) {
    bool known = false;
    for (const char* k : kCommands) known = known || c.command == k;
    require(known, "command", "unknown command '" + c.command + "'");
    require(c.grid >= 2 && c.grid <= 100000, "grid", "must be in [2, 100000]");
    require(c.tol > 0.0 && c.tol <= 1e-2, "tol", "must be in (0, 1e-2]");
    require(c.decay_factor > 0.0 && c.decay_factor < 1.0, "decay_factor", "must be in (0, 1)");
    require(c.schedule.k_min >= 1 && c.schedule.k_max >= c.schedule.k_min, "schedule", "needs 1 <= k_min <= k_max");
    for (double r : c.schedule.radii) require(r > 0.0, "schedule.radii", "radii must be positive");
    require(c.sum_method == "auto" || c.sum_method == "contour" || c.sum_method == "residue", "sum_method",
            "expected auto, contour or residue");
    for (const auto& m : c.methods)
        require(m == "contour" || m == "residue" || m == "sigma" || m == "free_term", "methods",
                "unknown method '" + m + "'");
    require(c.spectrum.R > 0.0 && c.spectrum.strip > 0.0, "spectrum", "R and strip must be positive");
    require(c.torus.M >= 1 && c.torus.M <= 1 << 16, "torus.M", "must be in [1, 65536]");
    require(c.torus.trials >= 0, "torus.trials", "must be nonnegative");
    require(c.schrodinger.potential == "zero" || c.schrodinger.potential == "box" || c.schrodinger.potential == "bump",
            "schrodinger.potential", "expected zero, box or bump");
    require(!std::isnan(c.schrodinger.h), "schrodinger.h", "must be a number or inf");
    require(!c.schrodinger.t_list.empty(), "schrodinger.t_list", "must not be empty");
    require(c.schrodinger.b > 0.0 && c.schrodinger.grid >= 1, "schrodinger", "needs b > 0 and grid >= 1");
    require(c.oskina.n >= 4 && c.oskina.n % 2 == 0, "oskina.n", "must be even and at least 4");
    require(c.random.count >= 0, "random.count", "must be nonnegative");
    for (int n : c.random.n_values) require(n >= 1 && n <= 8, "random.n", "orders must be in [1, 8]");

    const bool needs_op = c.command == "spectrum" || c.command == "expand" || c.command == "equiconv" ||
                          (c.command == "classify" && c.random.count == 0);
    require(!needs_op || !c.operators.empty(), "operators", "command '" + c.command + "' needs an operator");
    if (c.command == "equiconv") require(c.operators.size() <= 2, "operators", "equiconv takes one or two operators");
    const bool needs_f = c.command == "expand" || c.command == "equiconv";
    require(!needs_f || c.function.has_value(), "function", "command '" + c.command + "' needs a function");
}

json write_json(const std::filesystem::path& path, const json& j, RunResult& res) {
    io::write_atomic(path, j.dump(2) + "\n");
    res.files.push_back(path);
    return j;
}

void write_text(const std::filesystem::path& path, const std::string& s, RunResult& res) {
    io::write_atomic(path, s);
    res.files.push_back(path);
}

expansion::RadiusSchedule schedule_for(const ExperimentConfig& c) {
    if (!c.schedule.radii.empty()) {
        expansion::RadiusSchedule s;
        s.alpha = std::nan("");
        s.radii = c.schedule.radii;
        for (std::size_t i = 0; i < s.radii.size(); ++i) s.k.push_back(static_cast<int>(i));
        return s;
    }
    return expansion::choose_radii(c.operators, c.schedule.k_min, c.schedule.k_max, c.schedule.eps_min);
}

RunResult run_classify(const ExperimentConfig& c, const std::filesystem::path& out) {
    RunResult res;
    json ops = json::array();
    for (const auto& op : c.operators) {
        auto rep = regularity::classify(op);
        json o = {{"label", op.label}, {"n", op.n()}, {"chi", rep.chi}, {"theta_01", io::from_cplx(rep.theta_01)},
                  {"verdict", regularity::to_string(rep.verdict)},
                  {"square_verdict", regularity::to_string(regularity::classify(regularity::square_operator(op)).verdict)}};
        if (rep.theta_10) o["theta_10"] = io::from_cplx(*rep.theta_10);
        ops.push_back(o);
        spdlog::debug("classified {}: {}", op.label, regularity::to_string(rep.verdict));
    }
    json j = {{"config", config_to_json(c)}, {"operators", ops}};
    int agree = 0;
    if (c.random.count > 0) {
        std::mt19937_64 rng(c.seed);
        for (int i = 0; i < c.random.count; ++i) {
            model::OperatorSpec op;
            op.expr.n = c.random.n_values[static_cast<std::size_t>(i) % c.random.n_values.size()];
            op.bc = catalog::random_bc(op.n(), rng);
            op.label = "random";
            const auto v = regularity::classify(op).verdict;
            agree += v == regularity::classify(regularity::square_operator(op)).verdict;
        }
        j["squaring"] = {{"count", c.random.count}, {"agree", agree}, {"seed", c.seed}};
    }
    write_json(out / "classify.json", j, res);
    std::ostringstream s;
    for (std::size_t i = 0; i < c.operators.size(); ++i) {
        const auto& o = ops[i];
        s << (i ? "; " : "") << c.operators[i].label << " " << o["verdict"].get<std::string>()
          << " theta=" << fmt_cplx(io::to_cplx(o["theta_01"], "theta_01"));
    }
    if (c.random.count > 0)
        s << (c.operators.empty() ? "" : "; ") << "squaring agreement " << agree << "/" << c.random.count;
    res.summary = s.str();
    return res;
}

RunResult run_spectrum(const ExperimentConfig& c, const std::filesystem::path& out) {
    RunResult res;
    const auto& op = c.operators.front();
    solver::SearchOptions so;
    so.strip = c.spectrum.strip;
    auto cv = solver::find_char_values(op, c.spectrum.R, so);
    json vals = json::array();
    std::vector<io::PlotRow> rows;
    for (std::size_t i = 0; i < cv.values.size(); ++i) {
        const auto& v = cv.values[i];
        vals.push_back({{"rho", io::from_cplx(v.rho)}, {"lambda", io::from_cplx(v.lambda)},
                        {"multiplicity", v.multiplicity}, {"progression", v.progression},
                        {"fit_residual", v.fit_residual}});
        const int k = static_cast<int>(i) + 1;
        const double r = std::abs(v.rho);
        rows.push_back({k, r, "rho_re", v.rho.real()});
        rows.push_back({k, r, "rho_im", v.rho.imag()});
        rows.push_back({k, r, "fit_residual", v.fit_residual});
    }
    json progs = json::array();
    for (const auto& p : cv.progressions) progs.push_back({{"c", io::from_cplx(p.c)}, {"members", p.members}});
    write_json(out / "spectrum.json", {{"config", config_to_json(c)}, {"R", cv.R}, {"values", vals}, {"progressions", progs}},
               res);
    io::emit_plotdata(out / "spectrum.csv", rows);
    res.files.push_back(out / "spectrum.csv");
    res.summary = op.label + ": " + std::to_string(cv.values.size()) + " characteristic values with |rho| <= " +
                  io::format_number(c.spectrum.R);
    return res;
}

RunResult run_expand(const ExperimentConfig& c, const std::filesystem::path& out, Exec exec) {
    RunResult res;
    const auto& op = c.operators.front();
    const auto f = c.function->build();
    const auto sched = schedule_for(c);
    const RVec x = uniform_grid(static_cast<std::size_t>(c.grid));
    std::optional<solver::CharValueSet> cv;
    std::vector<std::string> header{"r", "x"};
    for (const auto& m : c.methods) {
        header.push_back(m + "_re");
        header.push_back(m + "_im");
    }
    std::vector<std::vector<std::string>> cells;
    double max_diff = 0.0;
    for (double r : sched.radii) {
        std::vector<CVec> cols;
        for (const auto& m : c.methods) {
            if (m == "contour" || m == "free_term") {
                expansion::ContourOptions co;
                co.exec = exec;
                co.free_term = m == "free_term";
                cols.push_back(expansion::S_r_contour(op, f, r, x, co).values);
            } else if (m == "residue") {
                if (!cv) cv = solver::find_char_values(op, sched.radii.back() + 2.0);
                expansion::ResidueOptions ro;
                ro.exec = exec;
                cols.push_back(expansion::S_r_residues(op, f, r, x, *cv, ro).values);
            } else {
                cols.push_back(expansion::sigma_r(f, r, x, exec, c.tol).values);
            }
        }
        for (std::size_t a = 0; a < cols.size(); ++a)
            for (std::size_t b = a + 1; b < cols.size(); ++b)
                if (c.methods[a] != "sigma" && c.methods[b] != "sigma" && c.methods[a] != "free_term" &&
                    c.methods[b] != "free_term")
                    max_diff = std::max(max_diff, sup_abs_diff(cols[a], cols[b]));
        for (std::size_t i = 0; i < x.size(); ++i) {
            std::vector<std::string> row{io::format_number(r), io::format_number(x[i])};
            for (const auto& col : cols) {
                row.push_back(io::format_number(col[i].real()));
                row.push_back(io::format_number(col[i].imag()));
            }
            cells.push_back(row);
        }
        spdlog::debug("expanded at r = {}", r);
    }
    write_text(out / "expand.csv", io::csv(header, cells), res);
    write_json(out / "expand.json",
               {{"config", config_to_json(c)}, {"radii", sched.radii}, {"max_method_difference", max_diff}}, res);
    res.summary = op.label + ": " + std::to_string(sched.radii.size()) + " radii, max method difference " +
                  io::format_number(max_diff);
    return res;
}

json table_json(const criterion::Table& t) {
    json a = json::array();
    for (const auto& row : t) {
        json r = json::array();
        for (const auto& z : row) r.push_back(io::from_cplx(z));
        a.push_back(r);
    }
    return a;
}

RunResult run_equiconv(const ExperimentConfig& c, const std::filesystem::path& out, Exec exec) {
    RunResult res;
    const auto f = c.function->build();
    const auto sched = schedule_for(c);
    criterion::ReportOptions ro;
    ro.grid = uniform_grid(static_cast<std::size_t>(c.grid));
    ro.decay_factor = c.decay_factor;
    ro.quad_tol = c.tol;
    ro.exec = exec;
    ro.method = c.sum_method == "contour"   ? criterion::SumMethod::Contour
                : c.sum_method == "residue" ? criterion::SumMethod::Residue
                                            : criterion::SumMethod::Auto;
    auto rep = criterion::whole_interval_report(c.operators, f, sched, ro);
    std::vector<io::PlotRow> rows;
    json curves = json::array();
    for (const auto& cu : rep.curves) {
        for (std::size_t i = 0; i < cu.values.size(); ++i) rows.push_back({rep.k[i], rep.radii[i], cu.name, cu.values[i]});
        curves.push_back({{"name", cu.name}, {"values", cu.values}, {"decreased", cu.decreased}});
    }
    json nd = {{"det1", io::from_cplx(rep.nondeg.det1)}, {"det2", io::from_cplx(rep.nondeg.det2)},
               {"span_phi", rep.nondeg.span_phi}, {"span_psi", rep.nondeg.span_psi},
               {"span_ok", rep.nondeg.span_ok}, {"base_rank", rep.nondeg.base_rank},
               {"psi_pair", rep.nondeg.psi_pair}};
    json j = {{"config", config_to_json(c)}, {"mode", rep.mode}, {"labels", rep.labels},
              {"alpha", table_json(rep.alpha)}, {"alpha_from_square", rep.alpha_from_square},
              {"nondegeneracy", nd}, {"radii", rep.radii}, {"k", rep.k}, {"curves", curves},
              {"verdict_family", rep.verdict_family}, {"verdict", criterion::to_string(rep.verdict)}};
    write_json(out / "equiconv.json", j, res);
    io::emit_plotdata(out / "equiconv_curves.csv", rows);
    res.files.push_back(out / "equiconv_curves.csv");
    res.summary = criterion::to_string(rep.verdict);
    return res;
}

RunResult run_torus(const ExperimentConfig& c, const std::filesystem::path& out, Exec exec) {
    RunResult res;
    RVec radii;
    for (double m : c.torus.multipliers) radii.push_back(2.0 * kPi * m);
    auto rows = torus::localization_demo(radii, c.torus.M, exec);
    std::vector<std::vector<std::string>> cells;
    json jr = json::array();
    for (const auto& r : rows) {
        cells.push_back({io::format_number(r.r), io::format_number(r.bound), io::format_number(r.a_norm),
                         io::format_number(r.pf_norm)});
        jr.push_back({{"r", r.r}, {"bound", r.bound}, {"a_norm", r.a_norm}, {"pf_norm", r.pf_norm}});
    }
    write_text(out / "torus.csv", io::csv({"r", "bound", "a_norm", "pf_norm"}, cells), res);
    json j = {{"config", config_to_json(c)},
              {"rows", jr},
              {"note", "bound is the cutoff upper bound ||gamma_K S_r(F)||_A; the A(K) infimum is not computed"}};
    if (c.torus.trials > 0) {
        std::mt19937_64 rng(c.seed);
        std::normal_distribution<double> g(0.0, 1.0);
        std::uniform_int_distribution<int> mf(1, 40), mg(0, 12);
        std::uniform_real_distribution<double> rr(0.0, 2.0 * kPi * 45);
        double worst = 0.0;
        int violations = 0;
        for (int t = 0; t < c.torus.trials; ++t) {
            torus::CoefficientSequence F(mf(rng)), gam(mg(rng), torus::Kind::SmoothMultiplier);
            for (auto& v : F.c) v = cplx{g(rng), g(rng)};
            for (auto& v : gam.c) v = cplx{g(rng), g(rng)};
            const double lhs = torus::norms(torus::commutator(F, gam, rr(rng), Exec::Serial)).a_norm;
            const double rhs = torus::norms(gam).derivative_a_norm * torus::norms(F).pf_norm;
            violations += lhs > rhs + 1e-12 * (1.0 + rhs);
            if (rhs > 0.0) worst = std::max(worst, lhs / rhs);
        }
        j["commutator"] = {{"trials", c.torus.trials}, {"violations", violations}, {"max_ratio", worst}, {"seed", c.seed}};
    }
    write_json(out / "torus.json", j, res);
    res.summary = rows.empty() ? "no radii"
                               : "localization bound " + io::format_number(rows.front().bound) + " -> " +
                                     io::format_number(rows.back().bound);
    return res;
}

RunResult run_schrodinger(const ExperimentConfig& c, const std::filesystem::path& out, Exec exec) {
    RunResult res;
    const auto& s = c.schrodinger;
    singular::Potential q = s.potential == "box"    ? singular::Potential::box(s.height, s.radius)
                            : s.potential == "bump" ? singular::Potential::bump(s.height, s.radius)
                                                    : singular::Potential::zero();
    singular::ResidualOptions ro;
    ro.oracle = {s.b_max, s.N};
    ro.grid = s.grid;
    ro.exec = exec;
    auto cur = singular::levitan_marchenko_residuals(q, s.h, s.t_list, s.b, ro);
    std::vector<io::PlotRow> rows;
    for (std::size_t i = 0; i < cur.t.size(); ++i) {
        const int k = static_cast<int>(i);
        rows.push_back({k, cur.t[i], "oracle_gap", cur.oracle_gap[i]});
        rows.push_back({k, cur.t[i], "correction_residual", cur.correction_residual[i]});
        rows.push_back({k, cur.t[i], "oscillation_residual", cur.oscillation_residual[i]});
    }
    io::emit_plotdata(out / "schrodinger.csv", rows);
    res.files.push_back(out / "schrodinger.csv");
    auto clean = [](const RVec& v) {
        json a = json::array();
        for (double d : v) a.push_back(std::isnan(d) ? json(nullptr) : json(d));
        return a;
    };
    write_json(out / "schrodinger.json",
               {{"config", config_to_json(c)}, {"h", h_to_json(s.h)}, {"t", cur.t}, {"oracle_gap", clean(cur.oracle_gap)},
                {"correction_residual", clean(cur.correction_residual)}, {"oscillation_residual", clean(cur.oscillation_residual)}},
               res);
    std::ostringstream sum;
    sum << "h=" << (std::isinf(s.h) ? std::string("inf") : io::format_number(s.h)) << " oracle_gap "
        << io::format_number(cur.oracle_gap.front()) << " -> " << io::format_number(cur.oracle_gap.back());
    if (!std::isinf(s.h))
        sum << ", correction_residual " << io::format_number(cur.correction_residual.front()) << " -> " << io::format_number(cur.correction_residual.back());
    res.summary = sum.str();
    return res;
}

RunResult run_oskina(const ExperimentConfig& c, const std::filesystem::path& out) {
    RunResult res;
    const auto& o = c.oskina;
    std::vector<io::PlotRow> rows;
    json vals = json::array();
    for (std::size_t i = 0; i < o.r_list.size(); ++i) {
        const cplx L = expansion::oskina_kernel(o.n, o.r_list[i], o.x, o.xi, o.t);
        rows.push_back({static_cast<int>(i), o.r_list[i], "kernel_re", L.real()});
        rows.push_back({static_cast<int>(i), o.r_list[i], "kernel_im", L.imag()});
        vals.push_back(io::from_cplx(L));
    }
    io::emit_plotdata(out / "oskina.csv", rows);
    res.files.push_back(out / "oskina.csv");
    write_json(out / "oskina.json", {{"config", config_to_json(c)}, {"r", o.r_list}, {"kernel", vals}}, res);
    res.summary = "remainder kernel at " + std::to_string(o.r_list.size()) + " radii";
    return res;
}

} // namespace

ExperimentConfig config_from_json(const json& j) {
    if (!j.is_object()) io::config_error("$", "expected an object");
    ExperimentConfig c;
    read(j, "command", "", c.command);
    if (c.command.empty()) io::config_error("command", "missing");
    if (j.contains("operator")) c.operators.push_back(io::operator_from_json(j.at("operator"), "operator"));
    if (j.contains("operators")) {
        const auto& a = j.at("operators");
        if (!a.is_array()) io::config_error("operators", "expected an array");
        for (std::size_t i = 0; i < a.size(); ++i)
            c.operators.push_back(io::operator_from_json(a[i], "operators[" + std::to_string(i) + "]"));
    }
    if (j.contains("function")) c.function = io::function_from_json(j.at("function"), "function");
    if (j.contains("schedule")) {
        const auto& s = j.at("schedule");
        read(s, "k_min", "schedule", c.schedule.k_min);
        read(s, "k_max", "schedule", c.schedule.k_max);
        read(s, "radii", "schedule", c.schedule.radii);
        read(s, "eps_min", "schedule", c.schedule.eps_min);
    }
    read(j, "grid", "", c.grid);
    read(j, "methods", "", c.methods);
    read(j, "sum_method", "", c.sum_method);
    read(j, "tol", "", c.tol);
    read(j, "decay_factor", "", c.decay_factor);
    read(j, "seed", "", c.seed);
    if (j.contains("spectrum")) {
        read(j.at("spectrum"), "R", "spectrum", c.spectrum.R);
        read(j.at("spectrum"), "strip", "spectrum", c.spectrum.strip);
    }
    if (j.contains("torus")) {
        const auto& t = j.at("torus");
        read(t, "M", "torus", c.torus.M);
        read(t, "multipliers", "torus", c.torus.multipliers);
        read(t, "trials", "torus", c.torus.trials);
    }
    if (j.contains("schrodinger")) {
        const auto& s = j.at("schrodinger");
        auto& d = c.schrodinger;
        if (s.contains("q")) {
            const auto& q = s.at("q");
            read(q, "type", "schrodinger.q", d.potential);
            read(q, "height", "schrodinger.q", d.height);
            read(q, "radius", "schrodinger.q", d.radius);
        }
        if (s.contains("h")) d.h = read_h(s.at("h"), "schrodinger.h");
        read(s, "b_max", "schrodinger", d.b_max);
        read(s, "N", "schrodinger", d.N);
        read(s, "t_list", "schrodinger", d.t_list);
        read(s, "b", "schrodinger", d.b);
        read(s, "grid", "schrodinger", d.grid);
    }
    if (j.contains("oskina")) {
        const auto& o = j.at("oskina");
        read(o, "n", "oskina", c.oskina.n);
        read(o, "r_list", "oskina", c.oskina.r_list);
        read(o, "x", "oskina", c.oskina.x);
        read(o, "xi", "oskina", c.oskina.xi);
        read(o, "t", "oskina", c.oskina.t);
    }
    if (j.contains("random")) {
        read(j.at("random"), "count", "random", c.random.count);
        read(j.at("random"), "n", "random", c.random.n_values);
    }
    check_ranges(c);
    return c;
}

json config_to_json(const ExperimentConfig& c) {
    json ops = json::array();
    for (const auto& op : c.operators) ops.push_back(io::operator_to_json(op));
    json j = {{"command", c.command},
              {"operators", ops},
              {"schedule",
               {{"k_min", c.schedule.k_min}, {"k_max", c.schedule.k_max}, {"radii", c.schedule.radii},
                {"eps_min", c.schedule.eps_min}}},
              {"grid", c.grid},
              {"methods", c.methods},
              {"sum_method", c.sum_method},
              {"tol", c.tol},
              {"decay_factor", c.decay_factor},
              {"seed", c.seed},
              {"spectrum", {{"R", c.spectrum.R}, {"strip", c.spectrum.strip}}},
              {"torus", {{"M", c.torus.M}, {"multipliers", c.torus.multipliers}, {"trials", c.torus.trials}}},
              {"schrodinger",
               {{"q", {{"type", c.schrodinger.potential}, {"height", c.schrodinger.height}, {"radius", c.schrodinger.radius}}},
                {"h", h_to_json(c.schrodinger.h)},
                {"b_max", c.schrodinger.b_max},
                {"N", c.schrodinger.N},
                {"t_list", c.schrodinger.t_list},
                {"b", c.schrodinger.b},
                {"grid", c.schrodinger.grid}}},
              {"oskina",
               {{"n", c.oskina.n}, {"r_list", c.oskina.r_list}, {"x", c.oskina.x}, {"xi", c.oskina.xi}, {"t", c.oskina.t}}},
              {"random", {{"count", c.random.count}, {"n", c.random.n_values}}}};
    if (c.function) j["function"] = io::function_to_json(*c.function);
    return j;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) io::config_error("--config", "cannot open " + path.string());
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        io::config_error("--config", std::string("parse error: ") + e.what());
    }
    return config_from_json(j);
}

RunResult run(const ExperimentConfig& config, const std::filesystem::path& out_dir, Exec exec) {
    spdlog::debug("running {}", config.command);
    if (config.command == "classify") return run_classify(config, out_dir);
    if (config.command == "spectrum") return run_spectrum(config, out_dir);
    if (config.command == "expand") return run_expand(config, out_dir, exec);
    if (config.command == "equiconv") return run_equiconv(config, out_dir, exec);
    if (config.command == "torus-demo") return run_torus(config, out_dir, exec);
    if (config.command == "schrodinger-sf") return run_schrodinger(config, out_dir, exec);
    if (config.command == "oskina") return run_oskina(config, out_dir);
    io::config_error("command", "unknown command '" + config.command + "'");
}

int exit_code(const std::exception& e) {
    if (const auto* err = dynamic_cast<const Error*>(&e)) return err->is_domain() ? 2 : 1;
    return 1;
}

std::string error_json(const std::exception& e) {
    json j;
    if (const auto* err = dynamic_cast<const Error*>(&e)) {
        j = {{"error", err->code()}, {"message", err->what()}, {"domain", err->is_domain()}};
    } else {
        j = {{"error", "Internal"}, {"message", e.what()}, {"domain", false}};
    }
    return j.dump();
}

} // namespace equiconv::cli

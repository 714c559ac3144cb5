#include "equiconv/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "equiconv/catalog.hpp"
#include "equiconv/errors.hpp"

namespace equiconv::io {

namespace {

template <class T>
T get(const json& j, const std::string& key, const std::string& path) {
    if (!j.is_object() || !j.contains(key)) config_error(path + "." + key, "missing");
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        config_error(path + "." + key, e.what());
    }
}

template <class T>
T get_or(const json& j, const std::string& key, const std::string& path, T fallback) {
    if (!j.is_object() || !j.contains(key)) return fallback;
    return get<T>(j, key, path);
}

CVec cvec_from_json(const json& j, const std::string& path) {
    if (!j.is_array()) config_error(path, "expected an array");
    CVec v;
    for (std::size_t i = 0; i < j.size(); ++i) v.push_back(to_cplx(j[i], path + "[" + std::to_string(i) + "]"));
    return v;
}

json cvec_to_json(const CVec& v) {
    json a = json::array();
    for (const auto& z : v) a.push_back(from_cplx(z));
    return a;
}

model::OperatorSpec catalog_operator(const std::string& name, const std::string& path) {
    if (name == "dirichlet2") return catalog::dirichlet2();
    if (name == "neumann2") return catalog::neumann2();
    if (name == "periodic2") return catalog::periodic2();
    if (name == "decomposing2") return catalog::decomposing2();
    if (name == "skew2") return catalog::skew2();
    if (name == "clamped4") return catalog::clamped4();
    if (name == "dirichlet2_linear_potential") return catalog::dirichlet2_linear_potential();
    config_error(path, "unknown catalog operator '" + name + "'");
}

model::CoefficientDescriptor coefficient_from_json(const json& j, const std::string& path) {
    const auto kind = get<std::string>(j, "kind", path);
    if (kind == "polynomial") return model::CoefficientDescriptor::polynomial(cvec_from_json(j.at("coeffs"), path + ".coeffs"));
    if (kind == "step")
        return model::CoefficientDescriptor::step(get<RVec>(j, "breaks", path), cvec_from_json(j.at("values"), path + ".values"));
    if (kind == "samples")
        return model::CoefficientDescriptor::dense(cvec_from_json(j.at("samples"), path + ".samples"),
                                                   get_or<bool>(j, "smooth", path, false));
    config_error(path + ".kind", "expected polynomial, step or samples");
}

json coefficient_to_json(const model::CoefficientDescriptor& c) {
    switch (c.kind) {
        case model::CoefficientKind::Polynomial: return {{"kind", "polynomial"}, {"coeffs", cvec_to_json(c.poly)}};
        case model::CoefficientKind::Step:
            return {{"kind", "step"}, {"breaks", c.step_breaks}, {"values", cvec_to_json(c.step_values)}};
        case model::CoefficientKind::Samples:
            return {{"kind", "samples"}, {"samples", cvec_to_json(c.samples)}, {"smooth", c.smooth}};
    }
    return {};
}

double bump01(double u) {
    // C-infinity bump on (-1, 1), normalized to 1 at u = 0.
    if (std::abs(u) >= 1.0) return 0.0;
    return std::exp(1.0 - 1.0 / (1.0 - u * u));
}

} // namespace

void config_error(const std::string& path, const std::string& what) { fail("ConfigInvalid", path + ": " + what); }

cplx to_cplx(const json& j, const std::string& path) {
    if (j.is_number()) return cplx{j.get<double>()};
    if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
        return cplx{j[0].get<double>(), j[1].get<double>()};
    config_error(path, "expected a number or [re, im]");
}

json from_cplx(cplx z) { return json::array({z.real(), z.imag()}); }

model::OperatorSpec operator_from_json(const json& j, const std::string& path) {
    if (!j.is_object()) config_error(path, "expected an object");
    if (j.contains("catalog")) {
        auto op = catalog_operator(get<std::string>(j, "catalog", path), path + ".catalog");
        if (j.contains("label")) op.label = get<std::string>(j, "label", path);
        return op;
    }
    model::OperatorSpec op;
    op.expr.n = get<int>(j, "n", path);
    op.label = get_or<std::string>(j, "label", path, "custom");
    if (j.contains("coefficients")) {
        const auto& cs = j.at("coefficients");
        if (!cs.is_object()) config_error(path + ".coefficients", "expected an object keyed by order");
        for (const auto& [key, val] : cs.items()) {
            int k = 0;
            try {
                k = std::stoi(key);
            } catch (...) {
                config_error(path + ".coefficients." + key, "key must be an integer order");
            }
            op.expr.coefficients[k] = coefficient_from_json(val, path + ".coefficients." + key);
        }
    }
    const std::string bpath = path + ".bc";
    if (!j.contains("bc")) config_error(bpath, "missing");
    const auto& bc = j.at("bc");
    if (bc.contains("forms")) {
        std::vector<model::RawForm> forms;
        const auto& fs = bc.at("forms");
        if (!fs.is_array()) config_error(bpath + ".forms", "expected an array");
        for (std::size_t i = 0; i < fs.size(); ++i) {
            const std::string p = bpath + ".forms[" + std::to_string(i) + "]";
            if (!fs[i].contains("at0") || !fs[i].contains("at1")) config_error(p, "needs at0 and at1");
            forms.push_back({cvec_from_json(fs[i].at("at0"), p + ".at0"), cvec_from_json(fs[i].at("at1"), p + ".at1")});
        }
        op.bc = model::normalize_bc(forms);
    } else if (bc.contains("rows")) {
        const auto& rs = bc.at("rows");
        for (std::size_t i = 0; i < rs.size(); ++i) {
            const std::string p = bpath + ".rows[" + std::to_string(i) + "]";
            model::BoundaryRow row;
            row.sigma = get<int>(rs[i], "sigma", p);
            row.a = to_cplx(rs[i].at("a"), p + ".a");
            row.b = to_cplx(rs[i].at("b"), p + ".b");
            if (rs[i].contains("lower"))
                for (std::size_t t = 0; t < rs[i].at("lower").size(); ++t) {
                    const auto& lj = rs[i].at("lower")[t];
                    const std::string lp = p + ".lower[" + std::to_string(t) + "]";
                    row.lower.push_back({get<int>(lj, "order", lp), to_cplx(lj.at("at0"), lp + ".at0"),
                                         to_cplx(lj.at("at1"), lp + ".at1")});
                }
            op.bc.rows.push_back(row);
        }
    } else {
        config_error(bpath, "needs forms or rows");
    }
    try {
        op.validate();
    } catch (const Error& e) {
        config_error(path, e.what());
    }
    return op;
}

json operator_to_json(const model::OperatorSpec& op) {
    json coeffs = json::object();
    for (const auto& [k, c] : op.expr.coefficients) coeffs[std::to_string(k)] = coefficient_to_json(c);
    json rows = json::array();
    for (const auto& r : op.bc.rows) {
        json lower = json::array();
        for (const auto& l : r.lower) lower.push_back({{"order", l.order}, {"at0", from_cplx(l.at0)}, {"at1", from_cplx(l.at1)}});
        rows.push_back({{"sigma", r.sigma}, {"a", from_cplx(r.a)}, {"b", from_cplx(r.b)}, {"lower", lower}});
    }
    return {{"n", op.expr.n}, {"label", op.label}, {"coefficients", coeffs}, {"bc", {{"rows", rows}}}};
}

model::SampledFunction FunctionDescriptor::build() const {
    if (!catalog.empty()) {
        if (catalog == "zero") return model::SampledFunction([](double) { return cplx{0.0}; }, static_cast<std::size_t>(N));
        if (catalog == "whole_interval_f0") return catalog::whole_interval_f0();
        for (const auto& nf : catalog::test_functions())
            if (nf.name == catalog) return nf.f;
        config_error("function.catalog", "unknown catalog function '" + catalog + "'");
    }
    RVec breaks;
    for (const auto& t : terms)
        for (double e : {t.a, t.b})
            if (e > 0.0 && e < 1.0) breaks.push_back(e);
    std::sort(breaks.begin(), breaks.end());
    breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
    auto ts = terms;
    auto eval = [ts](double x) {
        cplx v{0.0};
        for (const auto& t : ts) {
            if (x < t.a || x > t.b) continue;
            if (t.fn == "sin") v += t.c * std::sin(t.k * x + t.phase);
            else if (t.fn == "cos") v += t.c * std::cos(t.k * x + t.phase);
            else if (t.fn == "exp") v += t.c * std::exp(t.k * x + t.phase);
            else if (t.fn == "pow") v += t.c * std::pow(x, t.k);
            else if (t.fn == "indicator") v += t.c;
            else if (t.fn == "bump") v += t.c * bump01((2.0 * x - t.a - t.b) / (t.b - t.a));
        }
        return v;
    };
    return model::SampledFunction(eval, static_cast<std::size_t>(N), breaks);
}

FunctionDescriptor function_from_json(const json& j, const std::string& path) {
    FunctionDescriptor f;
    if (j.is_string()) {
        f.catalog = j.get<std::string>();
        return f;
    }
    if (!j.is_object()) config_error(path, "expected a catalog name or an object");
    f.N = get_or<int>(j, "N", path, 400);
    if (f.N < 8) config_error(path + ".N", "must be at least 8");
    if (j.contains("catalog")) {
        f.catalog = get<std::string>(j, "catalog", path);
        return f;
    }
    const std::string tp = path + ".terms";
    if (!j.contains("terms") || !j.at("terms").is_array()) config_error(tp, "expected an array");
    for (std::size_t i = 0; i < j.at("terms").size(); ++i) {
        const auto& tj = j.at("terms")[i];
        const std::string p = tp + "[" + std::to_string(i) + "]";
        FunctionTerm t;
        t.fn = get<std::string>(tj, "fn", p);
        if (t.fn != "sin" && t.fn != "cos" && t.fn != "exp" && t.fn != "pow" && t.fn != "indicator" && t.fn != "bump")
            config_error(p + ".fn", "expected sin, cos, exp, pow, indicator or bump");
        if (tj.contains("c")) t.c = to_cplx(tj.at("c"), p + ".c");
        t.k = get_or<double>(tj, "k", p, 1.0);
        t.phase = get_or<double>(tj, "phase", p, 0.0);
        t.a = get_or<double>(tj, "a", p, 0.0);
        t.b = get_or<double>(tj, "b", p, 1.0);
        if (!(t.a < t.b)) config_error(p, "needs a < b");
        f.terms.push_back(t);
    }
    return f;
}

json function_to_json(const FunctionDescriptor& f) {
    if (!f.catalog.empty()) return {{"catalog", f.catalog}, {"N", f.N}};
    json terms = json::array();
    for (const auto& t : f.terms)
        terms.push_back({{"fn", t.fn}, {"c", from_cplx(t.c)}, {"k", t.k}, {"phase", t.phase}, {"a", t.a}, {"b", t.b}});
    return {{"terms", terms}, {"N", f.N}};
}

void write_atomic(const std::filesystem::path& path, const std::string& content) {
    namespace fs = std::filesystem;
    std::error_code ec;
    if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
    if (ec) fail("IoError", "cannot create " + path.parent_path().string() + ": " + ec.message());
    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) fail("IoError", "cannot open " + tmp.string());
        out << content;
        out.flush();
        if (!out) fail("IoError", "write failed for " + tmp.string());
    }
    fs::rename(tmp, path, ec);
    if (ec) fail("IoError", "cannot rename into " + path.string() + ": " + ec.message());
}

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.11e", v);
    return buf;
}

std::string csv(const std::vector<std::string>& header, const std::vector<std::vector<std::string>>& rows) {
    std::ostringstream s;
    auto line = [&](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) s << (i ? "," : "") << cells[i];
        s << '\n';
    };
    line(header);
    for (const auto& r : rows) line(r);
    return s.str();
}

std::string plotdata_csv(const std::vector<PlotRow>& rows) {
    std::vector<std::vector<std::string>> cells;
    for (const auto& r : rows) cells.push_back({std::to_string(r.k), format_number(r.r), r.name, format_number(r.value)});
    return csv({"k", "r", "name", "value"}, cells);
}

void emit_plotdata(const std::filesystem::path& path, const std::vector<PlotRow>& rows) {
    write_atomic(path, plotdata_csv(rows));
}

} // namespace equiconv::io

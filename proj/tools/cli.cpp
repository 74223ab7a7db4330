#include "cli.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "fracprop/error.hpp"
#include "fracprop/fracops.hpp"
#include "fracprop/mlf.hpp"
#include "fracprop/propagator.hpp"
#include "fracprop/spectral.hpp"

#ifndef FRACPROP_VERSION
#define FRACPROP_VERSION "0.0.0"
#endif

namespace fracprop::cli {

namespace {

constexpr std::string_view kVersionLine = "fracprop " FRACPROP_VERSION;

std::string fmt(const char* spec, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, spec, v);
    return buf;
}

std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(first, last - first + 1));
}

bool parse_double(std::string_view s, double& out) {
    if (!s.empty() && s.front() == '+') {
        s.remove_prefix(1);
    }
    const char* end = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(s.data(), end, out);
    return ec == std::errc() && ptr == end;
}

template <class Int>
Int parse_integer(std::string_view s, std::string_view flag) {
    Int v{};
    const std::string t = trim(s);
    auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (t.empty() || ec != std::errc() || ptr != t.data() + t.size()) {
        throw ConfigError(std::string(flag) + ": expected a nonnegative integer, got '" +
                          std::string(s) + "'");
    }
    return v;
}

double parse_scalar(std::string_view s, std::string_view flag) {
    const std::vector<double> v = parse_list(s, flag);
    if (v.size() != 1) {
        throw ConfigError(std::string(flag) + ": expected a single number, got '" +
                          std::string(s) + "'");
    }
    return v.front();
}

std::string join(const std::vector<double>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i > 0) {
            out += ',';
        }
        out += fmt("%.17g", v[i]);
    }
    return out;
}

[[noreturn]] void fail(std::string_view flag, const std::string& msg) {
    throw ConfigError(std::string(flag) + ": " + msg);
}

void require_finite(const std::vector<double>& v, std::string_view flag) {
    for (double x : v) {
        if (!std::isfinite(x)) {
            fail(flag, "values must be finite");
        }
    }
}

void require_single(const std::vector<double>& v, std::string_view flag) {
    if (v.size() != 1) {
        fail(flag, "expected exactly one value");
    }
}

void require_orders(const std::vector<double>& v, std::string_view flag, bool allow_one) {
    if (v.empty()) {
        fail(flag, "is required");
    }
    require_finite(v, flag);
    for (double a : v) {
        if (!(a > 0.0) || a > 1.0 || (!allow_one && a == 1.0)) {
            fail(flag, std::string("order ") + fmt("%.17g", a) +
                           (allow_one ? " outside (0, 1]" : " outside (0, 1)"));
        }
    }
}

void require_nonnegative(const std::vector<double>& v, std::string_view flag) {
    if (v.empty()) {
        fail(flag, "is required");
    }
    require_finite(v, flag);
    for (double x : v) {
        if (x < 0.0) {
            fail(flag, "values must be >= 0");
        }
    }
}

void require_positive(double x, std::string_view flag) {
    if (!(x > 0.0) || !std::isfinite(x)) {
        fail(flag, "must be positive and finite");
    }
}

std::pair<std::string, std::string> split_source(const std::string& spec, std::string_view flag) {
    const auto colon = spec.find(':');
    if (colon == std::string::npos) {
        fail(flag, "expected KIND:VALUE, got '" + spec + "'");
    }
    return {spec.substr(0, colon), spec.substr(colon + 1)};
}

struct GridSpec {
    std::size_t n;
    double length;
};

GridSpec parse_grid(const std::string& spec) {
    const std::vector<double> v = parse_list(spec, "--grid");
    if (v.size() != 2) {
        fail("--grid", "expected N,L");
    }
    const double n = v[0];
    if (!(n >= 2.0) || n > 1 << 24 || n != std::floor(n)) {
        fail("--grid", "N must be an integer >= 2");
    }
    const auto ni = static_cast<std::size_t>(n);
    if ((ni & (ni - 1)) != 0) {
        fail("--grid", "N must be a power of two");
    }
    require_positive(v[1], "--grid");
    return {ni, v[1]};
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open '" + path + "'");
    }
    std::ostringstream s;
    s << in.rdbuf();
    if (in.bad()) {
        throw IoError("cannot read '" + path + "'");
    }
    return s.str();
}

std::vector<std::string> tokens(const std::string& text) {
    std::istringstream in(text);
    std::vector<std::string> out;
    std::string tok;
    while (in >> tok) {
        out.push_back(tok);
    }
    return out;
}

ComplexMatrix read_matrix_file(const std::string& path) {
    const std::vector<std::string> tok = tokens(read_file(path));
    if (tok.empty()) {
        fail("--matrix", "file '" + path + "' is empty");
    }
    const auto n = parse_integer<std::size_t>(tok[0], "--matrix");
    if (n == 0 || tok.size() != 1 + n * n) {
        fail("--matrix", "file '" + path + "' must hold n followed by n*n entries");
    }
    ComplexMatrix m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            try {
                m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                    parse_complex(tok[1 + i * n + j]);
            } catch (const ConfigError& e) {
                fail("--matrix", "file '" + path + "': " + e.what());
            }
        }
    }
    return m;
}

SpectralModel build_model(const RunConfig& c) {
    if (!c.grid.empty()) {
        const GridSpec g = parse_grid(c.grid);
        return PeriodicGrid(g.n, g.length);
    }
    const auto [kind, value] = split_source(c.matrix, "--matrix");
    if (kind == "diag") {
        const std::vector<double> a = parse_list(value, "--matrix");
        return decompose(HermitianModel::diagonal(a));
    }
    if (kind == "file") {
        return decompose(HermitianModel(read_matrix_file(value)));
    }
    fail("--matrix", "unknown source '" + kind + "' (use diag: or file:)");
}

State build_state(const RunConfig& c, const SpectralModel& model) {
    const std::size_t dim = model_dim(model);
    const auto [kind, value] = split_source(c.state, "--state");
    ComplexVector v = ComplexVector::Zero(static_cast<Eigen::Index>(dim));
    if (kind == "basis") {
        const auto i = parse_integer<std::size_t>(value, "--state");
        if (i >= dim) {
            fail("--state", "basis index " + std::to_string(i) + " out of range for dimension " +
                                std::to_string(dim));
        }
        v[static_cast<Eigen::Index>(i)] = 1.0;
    } else if (kind == "gaussian") {
        const auto* grid = std::get_if<PeriodicGrid>(&model);
        if (grid == nullptr) {
            fail("--state", "gaussian data needs a --grid model");
        }
        const std::vector<double> p = parse_list(value, "--state");
        if (p.size() != 2) {
            fail("--state", "expected gaussian:CENTER,WIDTH");
        }
        require_positive(p[1], "--state");
        for (std::size_t j = 0; j < dim; ++j) {
            const double d = grid->position(j) - p[0];
            v[static_cast<Eigen::Index>(j)] = std::exp(-d * d / (2.0 * p[1] * p[1]));
        }
    } else if (kind == "file") {
        const std::vector<std::string> tok = tokens(read_file(value));
        if (tok.size() != dim) {
            fail("--state", "file '" + value + "' holds " + std::to_string(tok.size()) +
                                " entries, model dimension is " + std::to_string(dim));
        }
        for (std::size_t j = 0; j < dim; ++j) {
            v[static_cast<Eigen::Index>(j)] = parse_complex(tok[j]);
        }
    } else {
        fail("--state", "unknown preset '" + kind + "' (use basis:, gaussian: or file:)");
    }
    return State(std::move(v));
}

State random_state(std::size_t dim, std::mt19937_64& rng) {
    auto uniform = [&] { return static_cast<double>(rng() >> 11) * 0x1.0p-53 * 2.0 - 1.0; };
    ComplexVector v(static_cast<Eigen::Index>(dim));
    for (Eigen::Index j = 0; j < v.size(); ++j) {
        const double re = uniform();
        v[j] = {re, uniform()};
    }
    return State(std::move(v));
}

MLOptions ml_options(const RunConfig& c) {
    MLOptions o;
    o.tol = c.tol;
    return o;
}

Table run_ml_eval(const RunConfig& c) {
    Table table{{"alpha", "t", "omega", "re", "im", "modulus", "method", "err_est"}, {}};
    const MLOptions opts = ml_options(c);
    for (double a : c.alpha) {
        for (double t : c.t) {
            for (double w : c.omega) {
                MLValue v;
                try {
                    v = ml_ray_eval(RayPoint(FractionalOrder(a), t, w), opts);
                } catch (const Error& e) {
                    std::ostringstream msg;
                    msg << "evaluation failed at alpha=" << a << ", t=" << t << ", omega=" << w
                        << ": " << e.what();
                    throw EvaluationFailure(msg.str(), w);
                }
                table.rows.push_back({a, t, w, v.value.real(), v.value.imag(), std::abs(v.value),
                                      std::string(to_string(v.method)), v.err_est});
            }
        }
    }
    return table;
}

Table run_bound_sweep(const RunConfig& c) {
    Table table{{"alpha", "omega_max", "sup_modulus", "argmax_omega"}, {}};
    const MLOptions opts = ml_options(c);
    for (double a : c.alpha) {
        std::vector<double> maxima{c.omega_max};
        if (c.compare) {
            maxima.push_back(2.0 * c.omega_max);
        }
        for (double wmax : maxima) {
            const SupSweep s = ml_sup_sweep(FractionalOrder(a), wmax, c.n, opts);
            table.rows.push_back({a, wmax, s.sup, s.argmax});
        }
    }
    return table;
}

Table run_state_dump(const RunConfig& c, const SpectralModel& model, const State& u0) {
    const SolutionFamily family(model, FractionalOrder(c.alpha.front()), ml_options(c));
    const State u = propagate(family, c.t.front(), u0);
    Table table{{"index", "re", "im"}, {}};
    for (std::size_t j = 0; j < u.size(); ++j) {
        const auto z = u.values()[static_cast<Eigen::Index>(j)];
        table.rows.push_back({static_cast<long long>(j), z.real(), z.imag()});
    }
    return table;
}

Table run_trace_norm(const RunConfig& c, const SpectralModel& model, const State& u0) {
    std::vector<double> ts = c.ts;
    if (ts.empty()) {
        const double horizon = c.t.front();
        for (std::size_t k = 0; k <= c.steps; ++k) {
            ts.push_back(horizon * static_cast<double>(k) / static_cast<double>(c.steps));
        }
    }
    const SolutionFamily family(model, FractionalOrder(c.alpha.front()), ml_options(c));
    Table table{{"t", "norm"}, {}};
    for (const NormSample& s : norm_trace(family, u0, ts)) {
        table.rows.push_back({s.t, s.norm});
    }
    return table;
}

Table run_alpha_sweep(const RunConfig& c, const SpectralModel& model, const State& u0) {
    Table table{{"alpha", "error", "status"}, {}};
    for (const AlphaError& e : alpha_sweep(model, c.alpha_sweep, c.t.front(), u0, ml_options(c))) {
        table.rows.push_back({e.alpha, e.error, e.failure.empty() ? std::string("ok") : e.failure});
    }
    return table;
}

Table run_certify(const RunConfig& c, const SpectralModel& model, const State& u0) {
    const SolutionFamily family(model, FractionalOrder(c.alpha.front()), ml_options(c));
    const double horizon = c.t.front();
    const Certificate coarse = residual_certify(family, TimeGrid::covering(horizon, c.h), u0);
    const Certificate fine = residual_certify(family, TimeGrid::covering(horizon, 0.5 * c.h), u0);
    Table table{{"h", "residual", "residual_half", "rate", "skipped_nodes"}, {}};
    table.rows.push_back({c.h, coarse.residual, fine.residual,
                          std::log2(coarse.residual / fine.residual),
                          static_cast<long long>(coarse.skipped_nodes)});
    return table;
}

Table run_adjoint_check(const RunConfig& c, const SpectralModel& model, const State& u0) {
    const SolutionFamily family(model, FractionalOrder(c.alpha.front()), ml_options(c));
    const double t = c.t.front();
    std::mt19937_64 rng(c.seed);
    const State psi = random_state(model_dim(model), rng);
    const State phi = random_state(model_dim(model), rng);

    const std::complex<double> lhs = propagate(family, t, psi).values().dot(phi.values());
    const std::complex<double> rhs = psi.values().dot(adjoint_propagate(family, t, phi).values());

    const std::vector<double> g = gram_multiplier(family, t);
    const std::vector<std::complex<double>> gc(g.begin(), g.end());
    const ComplexVector gram = apply_spectral(model, gc, u0).values();
    const ComplexVector uu_star =
        propagate(family, t, adjoint_propagate(family, t, u0)).values();
    const ComplexVector u_star_u =
        adjoint_propagate(family, t, propagate(family, t, u0)).values();

    Table table{{"quantity", "value"}, {}};
    table.rows.push_back({std::string("identity_defect"),
                          (propagate(family, 0.0, u0).values() - u0.values()).norm()});
    table.rows.push_back({std::string("inner_product_defect"), std::abs(lhs - rhs)});
    table.rows.push_back({std::string("gram_defect"),
                          std::max((uu_star - gram).norm(), (u_star_u - gram).norm())});
    table.rows.push_back({std::string("commutation_defect"), commutation_defect(family, t, u0)});
    return table;
}

Table run_propagate(const RunConfig& c) {
    const SpectralModel model = build_model(c);
    const State u0 = build_state(c, model);
    switch (c.mode) {
        case Mode::StateDump:
            return run_state_dump(c, model, u0);
        case Mode::TraceNorm:
            return run_trace_norm(c, model, u0);
        case Mode::AlphaSweep:
            return run_alpha_sweep(c, model, u0);
        case Mode::Certify:
            return run_certify(c, model, u0);
        case Mode::AdjointCheck:
            return run_adjoint_check(c, model, u0);
    }
    throw ConfigError("unknown propagate mode");
}

Table run_semigroup_check(const RunConfig& c) {
    const double a = c.alpha.front();
    const double horizon = c.t.front();
    auto path = [&](double t) -> std::complex<double> {
        if (c.path == "t") {
            return t;
        }
        if (c.path == "sin") {
            return std::sin(t);
        }
        return 1.0;
    };
    Table table{{"alpha", "beta", "h", "defect"}, {}};
    for (double h : {c.h, 0.5 * c.h}) {
        const SampledPath u = SampledPath::sample(TimeGrid::covering(horizon, h), path);
        table.rows.push_back({a, c.beta, h, semigroup_defect(a, c.beta, u)});
    }
    return table;
}

std::string csv_cell(const Cell& cell) {
    if (const auto* d = std::get_if<double>(&cell)) {
        return fmt("%.12g", *d);
    }
    if (const auto* i = std::get_if<long long>(&cell)) {
        return std::to_string(*i);
    }
    const std::string& s = std::get<std::string>(cell);
    if (s.find_first_of(",\"\n") == std::string::npos) {
        return s;
    }
    std::string q = "\"";
    for (char ch : s) {
        q += ch;
        if (ch == '"') {
            q += '"';
        }
    }
    return q + "\"";
}

template <class E>
E enum_from(std::string_view s, std::initializer_list<E> all, std::string_view key) {
    for (E e : all) {
        if (to_string(e) == s) {
            return e;
        }
    }
    throw ConfigError("header: unknown " + std::string(key) + " '" + std::string(s) + "'");
}

}  // namespace

std::string_view to_string(Command c) {
    switch (c) {
        case Command::MlEval:
            return "ml-eval";
        case Command::BoundSweep:
            return "bound-sweep";
        case Command::Propagate:
            return "propagate";
        case Command::SemigroupCheck:
            return "semigroup-check";
    }
    return "?";
}

std::string_view to_string(Mode m) {
    switch (m) {
        case Mode::StateDump:
            return "state";
        case Mode::TraceNorm:
            return "trace-norm";
        case Mode::AlphaSweep:
            return "alpha-sweep";
        case Mode::Certify:
            return "certify";
        case Mode::AdjointCheck:
            return "adjoint-check";
    }
    return "?";
}

std::string_view to_string(Format f) {
    return f == Format::Csv ? "csv" : "json";
}

std::complex<double> parse_complex(std::string_view token) {
    const std::string s = trim(token);
    auto bad = [&]() -> ConfigError {
        return ConfigError("cannot parse complex number '" + s + "'");
    };
    if (s.empty()) {
        throw bad();
    }
    double re = 0.0;
    double im = 0.0;
    if (s.back() != 'j') {
        if (!parse_double(s, re)) {
            throw bad();
        }
        return re;
    }
    const std::string_view body(s.data(), s.size() - 1);
    std::size_t split = std::string_view::npos;
    for (std::size_t i = body.size(); i-- > 1;) {
        if ((body[i] == '+' || body[i] == '-') && body[i - 1] != 'e' && body[i - 1] != 'E') {
            split = i;
            break;
        }
    }
    std::string_view re_part;
    std::string_view im_part = body;
    if (split != std::string_view::npos) {
        re_part = body.substr(0, split);
        im_part = body.substr(split);
    }
    if (im_part.empty() || im_part == "+") {
        im = 1.0;
    } else if (im_part == "-") {
        im = -1.0;
    } else if (!parse_double(im_part, im)) {
        throw bad();
    }
    if (!re_part.empty() && !parse_double(re_part, re)) {
        throw bad();
    }
    return {re, im};
}

std::vector<double> parse_list(std::string_view text, std::string_view flag) {
    std::vector<double> out;
    if (trim(text).empty()) {
        fail(flag, "expected a number or comma-separated list");
    }
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = text.find(',', start);
        const std::string item =
            trim(text.substr(start, comma == std::string_view::npos ? text.npos : comma - start));
        double v = 0.0;
        if (!parse_double(item, v)) {
            fail(flag, "cannot parse '" + item + "' as a number");
        }
        out.push_back(v);
        if (comma == std::string_view::npos) {
            return out;
        }
        start = comma + 1;
    }
}

void validate(const RunConfig& c) {
    if (!(c.tol > 0.0) || !std::isfinite(c.tol)) {
        fail("--tol", "must be positive and finite");
    }
    switch (c.command) {
        case Command::MlEval:
            require_orders(c.alpha, "--alpha", true);
            require_nonnegative(c.t, "--t");
            require_nonnegative(c.omega, "--omega");
            return;
        case Command::BoundSweep:
            require_orders(c.alpha, "--alpha", true);
            require_positive(c.omega_max, "--omega-max");
            if (c.n < 2) {
                fail("--n", "must be >= 2");
            }
            return;
        case Command::SemigroupCheck:
            require_single(c.alpha, "--alpha");
            require_positive(c.alpha.front(), "--alpha");
            require_positive(c.beta, "--beta");
            require_positive(c.h, "--h");
            require_single(c.t, "--t");
            require_positive(c.t.front(), "--t");
            if (c.t.front() / c.h < 1.0) {
                fail("--h", "step must not exceed the horizon --t");
            }
            if (c.path != "one" && c.path != "t" && c.path != "sin") {
                fail("--path", "expected one, t or sin");
            }
            return;
        case Command::Propagate:
            break;
    }

    if (c.matrix.empty() == c.grid.empty()) {
        fail("--matrix/--grid", "exactly one model source is required");
    }
    if (!c.grid.empty()) {
        parse_grid(c.grid);
    } else {
        const auto [kind, value] = split_source(c.matrix, "--matrix");
        if (kind == "diag") {
            const std::vector<double> a = parse_list(value, "--matrix");
            require_nonnegative(a, "--matrix");
        } else if (kind != "file") {
            fail("--matrix", "unknown source '" + kind + "' (use diag: or file:)");
        }
    }
    split_source(c.state, "--state");
    require_single(c.t, "--t");
    require_nonnegative(c.t, "--t");

    if (c.mode == Mode::AlphaSweep) {
        require_orders(c.alpha_sweep, "--alpha-sweep", false);
        return;
    }
    require_single(c.alpha, "--alpha");
    require_orders(c.alpha, "--alpha", true);
    if (c.mode == Mode::TraceNorm) {
        require_finite(c.ts, "--ts");
        for (std::size_t i = 0; i < c.ts.size(); ++i) {
            if (c.ts[i] < 0.0 || (i > 0 && c.ts[i] < c.ts[i - 1])) {
                fail("--ts", "times must be nonnegative and ascending");
            }
        }
        if (c.ts.empty() && c.steps == 0) {
            fail("--steps", "must be >= 1");
        }
    }
    if (c.mode == Mode::Certify) {
        if (!c.grid.empty()) {
            fail("--certify", "residual certification needs a --matrix model");
        }
        require_positive(c.h, "--h");
        require_positive(c.t.front(), "--t");
        if (std::llround(c.t.front() / c.h) + 1 < 100) {
            fail("--h", "certification needs at least 100 time nodes on [0, t]");
        }
    }
}

std::vector<std::pair<std::string, std::string>> config_entries(const RunConfig& c) {
    return {
        {"command", std::string(to_string(c.command))},
        {"mode", std::string(to_string(c.mode))},
        {"alpha", join(c.alpha)},
        {"t", join(c.t)},
        {"omega", join(c.omega)},
        {"ts", join(c.ts)},
        {"steps", std::to_string(c.steps)},
        {"alpha_sweep", join(c.alpha_sweep)},
        {"beta", fmt("%.17g", c.beta)},
        {"h", fmt("%.17g", c.h)},
        {"omega_max", fmt("%.17g", c.omega_max)},
        {"n", std::to_string(c.n)},
        {"compare", c.compare ? "true" : "false"},
        {"matrix", c.matrix},
        {"grid", c.grid},
        {"state", c.state},
        {"path", c.path},
        {"seed", std::to_string(c.seed)},
        {"tol", fmt("%.17g", c.tol)},
        {"format", std::string(to_string(c.format))},
    };
}

RunConfig config_from_entries(const std::vector<std::pair<std::string, std::string>>& entries) {
    RunConfig c;
    auto list = [](const std::string& v, std::string_view key) {
        return v.empty() ? std::vector<double>{} : parse_list(v, key);
    };
    for (const auto& [key, value] : entries) {
        if (key == "command") {
            c.command = enum_from(value,
                                  {Command::MlEval, Command::BoundSweep, Command::Propagate,
                                   Command::SemigroupCheck},
                                  key);
        } else if (key == "mode") {
            c.mode = enum_from(value,
                               {Mode::StateDump, Mode::TraceNorm, Mode::AlphaSweep, Mode::Certify,
                                Mode::AdjointCheck},
                               key);
        } else if (key == "alpha") {
            c.alpha = list(value, key);
        } else if (key == "t") {
            c.t = list(value, key);
        } else if (key == "omega") {
            c.omega = list(value, key);
        } else if (key == "ts") {
            c.ts = list(value, key);
        } else if (key == "steps") {
            c.steps = parse_integer<std::size_t>(value, key);
        } else if (key == "alpha_sweep") {
            c.alpha_sweep = list(value, key);
        } else if (key == "beta") {
            c.beta = parse_scalar(value, key);
        } else if (key == "h") {
            c.h = parse_scalar(value, key);
        } else if (key == "omega_max") {
            c.omega_max = parse_scalar(value, key);
        } else if (key == "n") {
            c.n = parse_integer<std::size_t>(value, key);
        } else if (key == "compare") {
            c.compare = value == "true";
        } else if (key == "matrix") {
            c.matrix = value;
        } else if (key == "grid") {
            c.grid = value;
        } else if (key == "state") {
            c.state = value;
        } else if (key == "path") {
            c.path = value;
        } else if (key == "seed") {
            c.seed = parse_integer<std::uint64_t>(value, key);
        } else if (key == "tol") {
            c.tol = parse_scalar(value, key);
        } else if (key == "format") {
            c.format = enum_from(value, {Format::Csv, Format::Json}, key);
        } else {
            throw ConfigError("header: unknown key '" + key + "'");
        }
    }
    return c;
}

RunConfig parse_header(std::string_view text) {
    std::vector<std::pair<std::string, std::string>> entries;
    std::istringstream in{std::string(text)};
    std::string line;
    while (std::getline(in, line) && !line.empty() && line.front() == '#') {
        const std::string body = line.size() > 2 ? line.substr(2) : std::string();
        const auto eq = body.find(" = ");
        if (eq == std::string::npos) {
            continue;
        }
        entries.emplace_back(body.substr(0, eq), body.substr(eq + 3));
    }
    return config_from_entries(entries);
}

ParseResult parse_args(int argc, const char* const* argv) {
    RunConfig c;
    std::string out;
    std::string alpha, t, omega, ts, alpha_sweep, format = "csv";
    std::string beta = "0.5", h = "1e-3", omega_max = "1e6", tol = "1e-10";
    bool trace_norm = false, certify = false, adjoint_check = false;

    CLI::App app{"Time-fractional Schroedinger propagation experiments", "fracprop"};
    app.set_version_flag("--version", std::string(kVersionLine));
    app.set_help_flag("--help", "Print this help message and exit");
    app.require_subcommand(1);

    // -h would clash with the --h step option.
    auto common = [&](CLI::App* sub) {
        sub->add_option("--tol", tol, "Mittag-Leffler accuracy target");
        sub->add_option("--format", format, "csv or json");
        sub->add_option("--out", out, "output file (default stdout)");
    };

    CLI::App* ml = app.add_subcommand("ml-eval", "E_alpha((-it)^alpha omega) at points");
    ml->set_help_flag("--help", "Print this help message and exit");
    ml->add_option("--alpha", alpha, "order(s), comma-separated")->required();
    ml->add_option("--t", t, "time(s), comma-separated");
    ml->add_option("--omega", omega, "spectral value(s), comma-separated")->required();
    common(ml);

    CLI::App* bound = app.add_subcommand("bound-sweep", "sup over omega of |E_alpha|");
    bound->set_help_flag("--help", "Print this help message and exit");
    bound->add_option("--alpha", alpha, "order(s), comma-separated")->required();
    bound->add_option("--omega-max", omega_max, "largest omega on the sweep grid");
    bound->add_option("--n", c.n, "number of log-spaced grid points");
    bound->add_flag("--compare", c.compare, "also sweep with omega_max doubled");
    common(bound);

    CLI::App* prop = app.add_subcommand("propagate", "apply U_alpha(t) to an initial state");
    prop->set_help_flag("--help", "Print this help message and exit");
    prop->add_option("--alpha", alpha, "order");
    prop->add_option("--t", t, "time, or horizon for --certify and --trace-norm");
    prop->add_option("--matrix", c.matrix, "diag:a1,a2,... or file:PATH");
    prop->add_option("--grid", c.grid, "N,L periodic grid for -d^2/dx^2");
    prop->add_option("--state", c.state, "basis:I, gaussian:CENTER,WIDTH or file:PATH");
    prop->add_flag("--trace-norm", trace_norm, "norm of u(t) at --ts or --steps times");
    prop->add_option("--ts", ts, "ascending times for --trace-norm");
    prop->add_option("--steps", c.steps, "uniform steps on [0, t] for --trace-norm");
    prop->add_option("--alpha-sweep", alpha_sweep, "orders in (0,1) compared with e^{-itA}");
    prop->add_flag("--certify", certify, "equation residual at h and h/2");
    prop->add_option("--h", h, "time step for --certify");
    prop->add_flag("--adjoint-check", adjoint_check, "adjoint, gram and commutation defects");
    prop->add_option("--seed", c.seed, "seed for the random test vectors");
    common(prop);

    CLI::App* semi = app.add_subcommand("semigroup-check", "J^{a+b} u versus J^a J^b u");
    semi->set_help_flag("--help", "Print this help message and exit");
    semi->add_option("--alpha", alpha, "order a");
    semi->add_option("--beta", beta, "order b");
    semi->add_option("--h", h, "time step (also run at h/2)");
    semi->add_option("--t", t, "horizon");
    semi->add_option("--path", c.path, "one, t or sin");
    common(semi);

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        std::ostringstream o;
        std::ostringstream ignored;
        app.exit(e, o, ignored);
        return {{c, out}, o.str().empty() ? std::string(kVersionLine) + "\n" : o.str()};
    } catch (const CLI::ParseError& e) {
        throw ConfigError(e.what());
    }

    if (ml->parsed()) {
        c.command = Command::MlEval;
    } else if (bound->parsed()) {
        c.command = Command::BoundSweep;
    } else if (prop->parsed()) {
        c.command = Command::Propagate;
    } else {
        c.command = Command::SemigroupCheck;
    }

    if (!alpha.empty()) {
        c.alpha = parse_list(alpha, "--alpha");
    } else if (c.command == Command::SemigroupCheck) {
        c.alpha = {0.5};
    }
    c.t = t.empty() ? std::vector<double>{1.0} : parse_list(t, "--t");
    if (!omega.empty()) {
        c.omega = parse_list(omega, "--omega");
    }
    if (!ts.empty()) {
        c.ts = parse_list(ts, "--ts");
    }
    c.beta = parse_scalar(beta, "--beta");
    c.h = parse_scalar(h, "--h");
    c.omega_max = parse_scalar(omega_max, "--omega-max");
    c.tol = parse_scalar(tol, "--tol");
    if (format == "csv") {
        c.format = Format::Csv;
    } else if (format == "json") {
        c.format = Format::Json;
    } else {
        fail("--format", "expected csv or json, got '" + format + "'");
    }

    if (c.command == Command::Propagate) {
        const int modes = int(trace_norm) + int(certify) + int(adjoint_check) +
                          int(!alpha_sweep.empty());
        if (modes > 1) {
            fail("propagate", "choose at most one of --trace-norm, --alpha-sweep, --certify, "
                              "--adjoint-check");
        }
        if (trace_norm) {
            c.mode = Mode::TraceNorm;
        } else if (certify) {
            c.mode = Mode::Certify;
        } else if (adjoint_check) {
            c.mode = Mode::AdjointCheck;
        } else if (!alpha_sweep.empty()) {
            c.mode = Mode::AlphaSweep;
            c.alpha_sweep = parse_list(alpha_sweep, "--alpha-sweep");
        }
    }

    validate(c);
    return {{c, out}, {}};
}

Table run(const RunConfig& config) {
    switch (config.command) {
        case Command::MlEval:
            return run_ml_eval(config);
        case Command::BoundSweep:
            return run_bound_sweep(config);
        case Command::Propagate:
            return run_propagate(config);
        case Command::SemigroupCheck:
            return run_semigroup_check(config);
    }
    throw ConfigError("unknown command");
}

std::string render(const RunConfig& config, const Table& table) {
    const auto entries = config_entries(config);
    if (config.format == Format::Json) {
        nlohmann::ordered_json doc;
        doc["version"] = std::string(kVersionLine);
        nlohmann::ordered_json cfg = nlohmann::ordered_json::object();
        for (const auto& [k, v] : entries) {
            cfg[k] = v;
        }
        doc["config"] = cfg;
        doc["columns"] = table.columns;
        nlohmann::ordered_json rows = nlohmann::ordered_json::array();
        for (const auto& row : table.rows) {
            nlohmann::ordered_json r = nlohmann::ordered_json::array();
            for (const Cell& cell : row) {
                std::visit([&](const auto& v) { r.push_back(v); }, cell);
            }
            rows.push_back(std::move(r));
        }
        doc["rows"] = std::move(rows);
        return doc.dump(2) + "\n";
    }

    std::string text = "# " + std::string(kVersionLine) + "\n";
    for (const auto& [k, v] : entries) {
        text += "# " + k + " = " + v + "\n";
    }
    for (std::size_t i = 0; i < table.columns.size(); ++i) {
        text += (i > 0 ? "," : "") + table.columns[i];
    }
    text += "\n";
    for (const auto& row : table.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            text += (i > 0 ? "," : "") + csv_cell(row[i]);
        }
        text += "\n";
    }
    return text;
}

void write_output(const std::string& path, const std::string& text, std::ostream& out) {
    if (path.empty()) {
        out << text;
        out.flush();
        if (!out) {
            throw IoError("cannot write to standard output");
        }
        return;
    }
    namespace fs = std::filesystem;
    const fs::path target(path);
    fs::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) {
            throw IoError("cannot open '" + tmp.string() + "' for writing");
        }
        f << text;
        f.close();
        if (!f) {
            std::error_code ignored;
            fs::remove(tmp, ignored);
            throw IoError("cannot write '" + tmp.string() + "'");
        }
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) {
        std::error_code ignored;
        fs::remove(tmp, ignored);
        throw IoError("cannot rename '" + tmp.string() + "' to '" + path + "': " + ec.message());
    }
}

int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    ParseResult parsed;
    try {
        parsed = parse_args(argc, argv);
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << "\n";
        return 1;
    }
    if (!parsed.help_text.empty()) {
        out << parsed.help_text;
        return 0;
    }
    const RunConfig& config = parsed.invocation.config;
    try {
        const Table table = run(config);
        write_output(parsed.invocation.out, render(config, table), out);
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << "\n";
        return 1;
    } catch (const IoError& e) {
        err << "i/o error: " << e.what() << "\n";
        return 3;
    } catch (const Error& e) {
        err << "numerical error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}

}  // namespace fracprop::cli

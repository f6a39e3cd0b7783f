#pragma once

// Command-line jobs: a flat JobSpec that can be filled from flags or an
// INI-style config file, validated, executed and written as CSV or JSON.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "casimir/boundary.hpp"
#include "casimir/energy.hpp"
#include "casimir/errors.hpp"
#include "casimir/potential.hpp"
#include "casimir/scattering.hpp"
#include "casimir/spectral.hpp"

namespace casimir::cli {

inline constexpr std::string_view kSchema = "casimir-results/1";

enum ExitCode : int { kOk = 0, kValidation = 2, kPhysics = 3, kNumerical = 4 };

struct SweepAxis {
    std::string param;
    double from = 0.0;
    double to = 0.0;
    int count = 0;

    bool operator==(const SweepAxis&) const = default;
};

struct JobSpec {
    std::string mode;
    double L = 1.0;
    double D = 1.0;
    double tol = 1e-10;
    std::optional<double> alpha;
    std::optional<double> beta;
    double n1 = 0.0;
    double n2 = 0.0;
    double n3 = 1.0;
    std::string matrix;
    std::optional<double> theta;
    std::string potential = "free";
    double kmax = 20.0;
    std::string sweep_mode = "plates";
    SweepAxis axis;
    std::string out = "-";
    std::string format = "csv";
    int jobs = 1;

    bool operator==(const JobSpec&) const = default;
};

namespace detail {

using casimir::detail::format_double;
using casimir::detail::parse_double;
using casimir::detail::trim;

// Plain numbers, or multiples of pi: "pi", "-pi/2", "3*pi/2", "0.5pi".
inline double parse_angle(std::string_view text) {
    std::string s = trim(text);
    const auto p = s.find("pi");
    if (p == std::string::npos) return parse_double(s, "angle");
    std::string coef = trim(std::string_view(s).substr(0, p));
    std::string rest = trim(std::string_view(s).substr(p + 2));
    if (!coef.empty() && coef.back() == '*') coef = trim(std::string_view(coef).substr(0, coef.size() - 1));
    double c = 1.0;
    if (coef == "-")
        c = -1.0;
    else if (!coef.empty() && coef != "+")
        c = parse_double(coef, "angle");
    double den = 1.0;
    if (!rest.empty()) {
        if (rest.front() != '/') throw ValidationError("cannot parse angle from '" + s + "'");
        den = parse_double(std::string_view(rest).substr(1), "angle");
        if (den == 0.0) throw ValidationError("angle: division by zero");
    }
    return c * std::numbers::pi / den;
}

// "1", "-2.5", "i", "-i", "3i", "1+2i", "1e-3-4e-2i".
inline cplx parse_complex(std::string_view text) {
    const std::string s = trim(text);
    if (s.empty()) throw ValidationError("matrix: empty entry");
    if (s.back() != 'i') return {parse_double(s, "matrix entry"), 0.0};
    const std::string body = s.substr(0, s.size() - 1);
    std::size_t split = std::string::npos;
    for (std::size_t i = body.size(); i-- > 1;) {
        if ((body[i] == '+' || body[i] == '-') && body[i - 1] != 'e' && body[i - 1] != 'E') {
            split = i;
            break;
        }
    }
    auto imag = [](const std::string& t) {
        if (t.empty() || t == "+") return 1.0;
        if (t == "-") return -1.0;
        return parse_double(t, "matrix entry");
    };
    if (split == std::string::npos) return {0.0, imag(body)};
    return {parse_double(body.substr(0, split), "matrix entry"), imag(body.substr(split))};
}

inline std::vector<std::string> split(std::string_view s, char sep) {
    std::vector<std::string> out;
    std::size_t pos = 0;
    while (true) {
        const auto next = s.find(sep, pos);
        out.emplace_back(s.substr(pos, next == std::string_view::npos ? std::string_view::npos : next - pos));
        if (next == std::string_view::npos) break;
        pos = next + 1;
    }
    return out;
}

inline Mat2 parse_matrix(std::string_view text) {
    const auto rows = split(text, ';');
    if (rows.size() != 2) throw ValidationError("matrix: expected \"a,b;c,d\"");
    Mat2 m;
    for (int r = 0; r < 2; ++r) {
        const auto cols = split(rows[r], ',');
        if (cols.size() != 2) throw ValidationError("matrix: expected \"a,b;c,d\"");
        for (int c = 0; c < 2; ++c) m(r, c) = parse_complex(cols[c]);
    }
    return m;
}

inline bool is_mode(std::string_view m) {
    return m == "plates" || m == "comb" || m == "bands" || m == "spectrum" || m == "sweep";
}

inline const std::vector<std::string>& sweep_params() {
    static const std::vector<std::string> names{"L", "D", "alpha", "beta", "theta", "w0", "w1", "v0", "a"};
    return names;
}

inline bool uses_boundary(std::string_view mode) { return mode == "plates" || mode == "spectrum"; }

inline int boundary_sources(const JobSpec& job) {
    return int(!job.matrix.empty()) + int(job.theta.has_value()) + int(job.alpha.has_value() || job.beta.has_value());
}

}  // namespace detail

inline BoundaryCondition boundary_of(const JobSpec& job) {
    if (!job.matrix.empty()) return BoundaryCondition::from_matrix(detail::parse_matrix(job.matrix));
    if (job.theta) return boundary::quasi_periodic(*job.theta);
    return build_unitary({job.alpha.value_or(0.0), job.beta.value_or(0.0), {job.n1, job.n2, job.n3}});
}

/// Throws ValidationError describing the first problem found.
inline void validate(const JobSpec& job) {
    if (!detail::is_mode(job.mode)) throw ValidationError("mode: unknown '" + job.mode + "'");
    if (!(job.L > 0.0) || !std::isfinite(job.L)) throw ValidationError("L: must be positive");
    if (!(job.D >= 1.0) || !std::isfinite(job.D)) throw ValidationError("D: must be >= 1");
    if (!(job.tol > 0.0)) throw ValidationError("tol: must be positive");
    if (!(job.kmax > 0.0)) throw ValidationError("kmax: must be positive");
    if (job.jobs < 1) throw ValidationError("jobs: must be >= 1");
    if (job.format != "csv" && job.format != "json") throw ValidationError("format: must be csv or json");
    (void)parse_potential(job.potential);

    const std::string& eval_mode = job.mode == "sweep" ? job.sweep_mode : job.mode;
    if (job.mode == "sweep") {
        if (eval_mode != "plates" && eval_mode != "comb") throw ValidationError("sweep_mode: must be plates or comb");
        const auto& names = detail::sweep_params();
        if (std::find(names.begin(), names.end(), job.axis.param) == names.end())
            throw ValidationError("param: unknown sweep parameter '" + job.axis.param + "'");
        if (job.axis.count < 2) throw ValidationError("count: a sweep needs at least 2 points");
        if (!std::isfinite(job.axis.from) || !std::isfinite(job.axis.to) || job.axis.from == job.axis.to)
            throw ValidationError("range: from and to must be finite and distinct");
    }
    if (detail::uses_boundary(eval_mode)) {
        int sources = detail::boundary_sources(job);
        if (job.mode == "sweep" && sources == 0 &&
            (job.axis.param == "alpha" || job.axis.param == "beta" || job.axis.param == "theta"))
            sources = 1;
        if (sources == 0) throw ValidationError("boundary: give --alpha/--beta, --matrix or --theta");
        if (sources > 1) throw ValidationError("boundary: --alpha/--beta, --matrix and --theta are exclusive");
        if (detail::boundary_sources(job) == 1) (void)boundary_of(job);
    } else if (!job.matrix.empty() || job.alpha || job.beta) {
        throw ValidationError("boundary: " + eval_mode + " does not take boundary flags");
    }
}

/// Flat key = value text, readable by the --config option.
inline std::string to_config(const JobSpec& job) {
    using detail::format_double;
    std::ostringstream os;
    auto num = [&](std::string_view key, double v) { os << key << " = " << format_double(v) << '\n'; };
    auto str = [&](std::string_view key, const std::string& v) { os << key << " = \"" << v << "\"\n"; };
    str("mode", job.mode);
    num("L", job.L);
    num("D", job.D);
    num("tol", job.tol);
    if (job.alpha) num("alpha", *job.alpha);
    if (job.beta) num("beta", *job.beta);
    num("n1", job.n1);
    num("n2", job.n2);
    num("n3", job.n3);
    if (!job.matrix.empty()) str("matrix", job.matrix);
    if (job.theta) num("theta", *job.theta);
    str("potential", job.potential);
    num("kmax", job.kmax);
    str("sweep_mode", job.sweep_mode);
    if (!job.axis.param.empty()) str("param", job.axis.param);
    num("from", job.axis.from);
    num("to", job.axis.to);
    os << "count = " << job.axis.count << '\n';
    str("out", job.out);
    str("format", job.format);
    os << "jobs = " << job.jobs << '\n';
    return os.str();
}

/// Registers every flag on `app`, writing into `job`.
inline void configure_app(CLI::App& app, JobSpec& job) {
    auto angle = [&app](const std::string& name, std::optional<double>& slot, const std::string& help) {
        app.add_option_function<std::string>(
            "--" + name, [&slot](const std::string& s) { slot = detail::parse_angle(s); }, help);
    };
    app.add_option("mode", job.mode, "plates | comb | bands | spectrum | sweep")->required();
    app.add_option("--L", job.L, "plate separation or lattice spacing");
    app.add_option("--D", job.D, "spatial dimension for plates");
    app.add_option("--tol", job.tol, "absolute quadrature tolerance");
    angle("alpha", job.alpha, "boundary phase alpha (accepts pi multiples)");
    angle("beta", job.beta, "boundary angle beta (accepts pi multiples)");
    app.add_option("--n1", job.n1, "boundary axis n, first component");
    app.add_option("--n2", job.n2, "second component of n");
    app.add_option("--n3", job.n3, "third component of n");
    app.add_option("--matrix", job.matrix, "boundary matrix \"a,b;c,d\", entries re+imi");
    angle("theta", job.theta, "quasi-periodic angle (plates) or Bloch angle (comb)");
    app.add_option("--potential", job.potential, "free | delta:w0= | ddp:w0=,w1= | barrier:v0=,a= | pwc:[(v,a),...]");
    app.add_option("--kmax", job.kmax, "upper momentum for bands and spectrum");
    app.add_option("--sweep-mode,--sweep_mode", job.sweep_mode, "plates or comb");
    app.add_option("--param", job.axis.param, "swept parameter");
    app.add_option("--from", job.axis.from, "first value of the swept parameter");
    app.add_option("--to", job.axis.to, "last value of the swept parameter");
    app.add_option("--count", job.axis.count, "number of sweep points, at least 2");
    app.add_option("--out", job.out, "output path, - for stdout");
    app.add_option("--format", job.format, "csv or json");
    app.add_option("--jobs", job.jobs, "worker threads for sweeps");
    app.set_config("--config", "", "INI-style job file; flags override it");
}

/// Parses a config text produced by to_config (or written by hand).
inline JobSpec parse_config(const std::string& text) {
    JobSpec job;
    CLI::App app;
    configure_app(app, job);
    std::istringstream is(text);
    app.parse_from_stream(is);
    return job;
}

// Results: an ordered list of columns and rows of JSON values.
struct ResultTable {
    std::string mode;
    std::vector<std::string> columns;
    std::vector<nlohmann::ordered_json> rows;
};

namespace detail {

inline EnergyOptions energy_options(const JobSpec& job) {
    EnergyOptions opt;
    opt.quadrature.abs_tol = job.tol;
    opt.n_samples = 0;
    return opt;
}

inline nlohmann::ordered_json energy_row(const EnergyResult& r) {
    nlohmann::ordered_json row;
    row["value"] = r.value;
    row["abs_error"] = r.abs_error_estimate;
    row["n_evals"] = r.n_evaluations;
    return row;
}

inline nlohmann::ordered_json plates_row(const JobSpec& job) {
    const auto bc = boundary_of(job);
    const auto r = plate_energy(bc, job.L, job.D, energy_options(job));
    nlohmann::ordered_json row;
    row["L"] = job.L;
    row["D"] = job.D;
    if (!job.matrix.empty())
        row["boundary"] = "matrix:" + job.matrix;
    else if (job.theta)
        row["boundary"] = "theta=" + format_double(*job.theta);
    else
        row["boundary"] = "alpha=" + format_double(job.alpha.value_or(0.0)) +
                          ",beta=" + format_double(job.beta.value_or(0.0)) + ",n=(" + format_double(job.n1) + "," +
                          format_double(job.n2) + "," + format_double(job.n3) + ")";
    row.update(energy_row(r));
    return row;
}

inline nlohmann::ordered_json comb_row(const JobSpec& job) {
    const auto v = parse_potential(job.potential);
    const auto opt = energy_options(job);
    const auto r = job.theta ? cell_energy_theta(v, job.L, *job.theta, opt) : comb_energy(v, job.L, opt);
    nlohmann::ordered_json row;
    row["L"] = job.L;
    row["potential"] = to_string(v);
    row["theta"] = job.theta ? nlohmann::ordered_json(*job.theta) : nlohmann::ordered_json(nullptr);
    row.update(energy_row(r));
    return row;
}

inline std::vector<std::string> keys_of(const nlohmann::ordered_json& row) {
    std::vector<std::string> out;
    for (auto it = row.begin(); it != row.end(); ++it) out.push_back(it.key());
    return out;
}

// Copy of `job` evaluated at one point of the sweep axis.
inline JobSpec sweep_point(const JobSpec& job, double x) {
    JobSpec p = job;
    p.mode = job.sweep_mode;
    const std::string& name = job.axis.param;
    if (name == "L") {
        p.L = x;
    } else if (name == "D") {
        p.D = x;
    } else if (name == "alpha") {
        p.alpha = x;
    } else if (name == "beta") {
        p.beta = x;
    } else if (name == "theta") {
        p.theta = x;
    } else {
        auto v = parse_potential(job.potential).variant();
        bool used = false;
        std::visit(
            [&](auto& q) {
                using Q = std::decay_t<decltype(q)>;
                if constexpr (std::is_same_v<Q, potential::Delta>) {
                    if (name == "w0") q.w0 = x, used = true;
                } else if constexpr (std::is_same_v<Q, potential::DeltaPrime>) {
                    if (name == "w0") q.w0 = x, used = true;
                    if (name == "w1") q.w1 = x, used = true;
                } else if constexpr (std::is_same_v<Q, potential::SquareBarrier>) {
                    if (name == "v0") q.height = x, used = true;
                    if (name == "a") q.width = x, used = true;
                }
            },
            v);
        if (!used) throw ValidationError("param: '" + name + "' is not a parameter of potential " + job.potential);
        p.potential = to_string(PotentialModel(std::move(v)));
    }
    return p;
}

}  // namespace detail

/// Evaluates a validated job. Sweep points run on up to job.jobs threads;
/// rows are stored in input order and the first failing point (in input
/// order) is rethrown.
inline ResultTable run(const JobSpec& job) {
    validate(job);
    ResultTable table;
    table.mode = job.mode;

    if (job.mode == "plates" || job.mode == "comb") {
        table.rows.push_back(job.mode == "plates" ? detail::plates_row(job) : detail::comb_row(job));
    } else if (job.mode == "bands") {
        const auto bands = band_structure(parse_potential(job.potential), job.L, job.kmax);
        for (std::size_t i = 0; i < bands.bands.size(); ++i) {
            nlohmann::ordered_json row;
            row["band"] = i + 1;
            row["k_lo"] = bands.bands[i].k_lo;
            row["k_hi"] = bands.bands[i].k_hi;
            row["abs_error"] = 1e-13;
            table.rows.push_back(std::move(row));
        }
        table.columns = {"band", "k_lo", "k_hi", "abs_error"};
    } else if (job.mode == "spectrum") {
        const auto roots = real_spectrum(boundary_of(job), job.L, job.kmax);
        for (std::size_t i = 0; i < roots.size(); ++i) {
            nlohmann::ordered_json row;
            row["index"] = i + 1;
            row["k"] = roots[i];
            row["abs_error"] = 1e-12;
            table.rows.push_back(std::move(row));
        }
        table.columns = {"index", "k", "abs_error"};
    } else {
        const int n = job.axis.count;
        std::vector<JobSpec> points;
        for (int i = 0; i < n; ++i) {
            const double x = job.axis.from + (job.axis.to - job.axis.from) * i / (n - 1);
            points.push_back(detail::sweep_point(job, x));
            validate(points.back());
        }
        std::vector<nlohmann::ordered_json> rows(n);
        std::vector<std::exception_ptr> errors(n);
        std::atomic<int> next{0};
        auto worker = [&] {
            for (int i; (i = next.fetch_add(1)) < n;) {
                try {
                    auto body = points[i].mode == "plates" ? detail::plates_row(points[i]) : detail::comb_row(points[i]);
                    nlohmann::ordered_json row;
                    row[job.axis.param] = job.axis.from + (job.axis.to - job.axis.from) * i / (n - 1);
                    row.update(body);
                    rows[i] = std::move(row);
                } catch (...) {
                    errors[i] = std::current_exception();
                }
            }
        };
        std::vector<std::jthread> pool;
        const int threads = std::min(job.jobs, n);
        for (int t = 1; t < threads; ++t) pool.emplace_back(worker);
        worker();
        pool.clear();
        for (const auto& e : errors)
            if (e) std::rethrow_exception(e);
        table.rows = std::move(rows);
    }
    if (table.columns.empty() && !table.rows.empty()) table.columns = detail::keys_of(table.rows.front());
    return table;
}

namespace detail {

inline std::string csv_field(const nlohmann::ordered_json& v) {
    if (v.is_null()) return {};
    if (v.is_number_float()) return format_double(v.get<double>());
    if (v.is_number()) return v.dump();
    std::string s = v.get<std::string>();
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
    return q + "\"";
}

}  // namespace detail

inline void write_csv(const ResultTable& t, std::ostream& os) {
    os << "# schema: " << kSchema << "\n# mode: " << t.mode << '\n';
    for (std::size_t i = 0; i < t.columns.size(); ++i) os << (i ? "," : "") << t.columns[i];
    os << '\n';
    for (const auto& row : t.rows) {
        for (std::size_t i = 0; i < t.columns.size(); ++i)
            os << (i ? "," : "") << detail::csv_field(row.at(t.columns[i]));
        os << '\n';
    }
}

inline void write_json(const ResultTable& t, std::ostream& os) {
    nlohmann::ordered_json doc;
    doc["schema"] = kSchema;
    doc["mode"] = t.mode;
    doc["columns"] = t.columns;
    doc["rows"] = t.rows;
    os << doc.dump(2) << '\n';
}

inline void write(const ResultTable& t, const JobSpec& job, std::ostream& stdout_stream) {
    auto emit = [&](std::ostream& os) { job.format == "json" ? write_json(t, os) : write_csv(t, os); };
    if (job.out.empty() || job.out == "-") {
        emit(stdout_stream);
        return;
    }
    std::ofstream f(job.out);
    if (!f) throw ValidationError("out: cannot open '" + job.out + "' for writing");
    emit(f);
}

/// Full command-line entry point. Errors are reported on `err` as a single
/// line "error: <kind>: <message>" and mapped to ExitCode.
inline int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    JobSpec job;
    CLI::App app{"Casimir energies for plates with general boundary conditions and 1D combs"};
    configure_app(app, job);
    auto one_line = [](std::string s) {
        for (char& c : s)
            if (c == '\n' || c == '\r') c = ' ';
        return s;
    };
    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "error: validation: " << one_line(e.what()) << '\n';
        return kValidation;
    } catch (const ValidationError& e) {
        err << "error: validation: " << one_line(e.what()) << '\n';
        return kValidation;
    }
    try {
        write(run(job), job, out);
    } catch (const ValidationError& e) {
        err << "error: validation: " << one_line(e.what()) << '\n';
        return kValidation;
    } catch (const PhysicsError& e) {
        err << "error: physics: " << one_line(e.what()) << '\n';
        return kPhysics;
    } catch (const Error& e) {
        err << "error: numerical: " << one_line(e.what()) << '\n';
        return kNumerical;
    }
    return kOk;
}

}  // namespace casimir::cli

#include "specgconv/filter_design.hpp"

#include "specgconv/csv.hpp"
#include "specgconv/error.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <numbers>

namespace specgconv {
namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void require_positive_lambda_max(double lambda_max, const char* family) {
    if (!(lambda_max > 0.0)) {
        throw invalid_argument(std::string(family) + " design needs lambda_max > 0 (graph has no edges?)");
    }
}

std::string number(double v) {
    char buf[40];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

Vector chebyshev_response(int k, const Vector& lambda, double lambda_max) {
    const Index n = lambda.size();
    Vector prev2 = Vector::Ones(n);
    if (k == 1) return prev2;
    const Vector second = (2.0 / lambda_max) * lambda.array() - 1.0;
    Vector prev1 = second;
    for (int j = 3; j <= k; ++j) {
        Vector next = 2.0 * second.cwiseProduct(prev1) - prev2;
        prev2 = std::move(prev1);
        prev1 = std::move(next);
    }
    return prev1;
}

Vector cayley_column(int s, const Vector& lambda, double h) {
    Vector out(lambda.size());
    for (Index i = 0; i < lambda.size(); ++i) {
        const double theta = cayley_theta(h * lambda(i));
        if (s == 1) {
            out(i) = 1.0;
        } else if (s % 2 == 0) {
            out(i) = std::cos((s / 2) * theta);
        } else {
            out(i) = -std::sin(((s - 1) / 2) * theta);
        }
    }
    return out;
}

struct ParsedCall {
    std::string name;
    std::map<std::string, std::string> args;
};

std::string strip(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return std::string(s);
}

ParsedCall parse_call(std::string_view text) {
    ParsedCall call;
    const std::string body = strip(text);
    const auto open = body.find('(');
    if (open == std::string::npos) {
        call.name = body;
        return call;
    }
    if (body.back() != ')') throw config_error("design '" + body + "' is missing a closing parenthesis");
    call.name = strip(std::string_view(body).substr(0, open));
    const std::string inner = body.substr(open + 1, body.size() - open - 2);
    std::size_t start = 0;
    while (start <= inner.size()) {
        std::size_t comma = inner.find(',', start);
        if (comma == std::string::npos) comma = inner.size();
        const std::string item = strip(std::string_view(inner).substr(start, comma - start));
        if (!item.empty()) {
            const auto eq = item.find('=');
            if (eq == std::string::npos) throw config_error("design argument '" + item + "' is not key=value");
            call.args[strip(std::string_view(item).substr(0, eq))] = strip(std::string_view(item).substr(eq + 1));
        }
        start = comma + 1;
    }
    return call;
}

double take_double(ParsedCall& call, const std::string& key) {
    auto it = call.args.find(key);
    if (it == call.args.end()) throw config_error(call.name + ": missing argument '" + key + "'");
    double v = 0.0;
    const std::string& s = it->second;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) {
        throw config_error(call.name + ": argument " + key + "='" + s + "' is not a number");
    }
    call.args.erase(it);
    return v;
}

int take_int(ParsedCall& call, const std::string& key) {
    const double v = take_double(call, key);
    if (v != std::floor(v)) throw config_error(call.name + ": argument " + key + " must be an integer");
    return static_cast<int>(v);
}

} // namespace

void validate(const FilterDesign& d) {
    std::visit(overloaded{
                   [](const design::LowPass& p) {
                       if (!(p.eta > 0.0)) throw invalid_argument("lowpass: eta must be positive");
                   },
                   [](const design::BandPass& p) {
                       if (!(p.center >= 0.0 && p.center <= 1.0))
                           throw invalid_argument("bandpass: center must lie in [0,1] (fraction of lambda_max)");
                       if (!(p.gamma > 0.0)) throw invalid_argument("bandpass: gamma must be positive");
                   },
                   [](const design::ExpLowPass& p) {
                       if (!(p.tau > 0.0)) throw invalid_argument("explowpass: tau must be positive");
                   },
                   [](const design::ChebBasis& p) {
                       if (p.k < 1) throw invalid_argument("cheb: k must be >= 1");
                   },
                   [](const design::CayleyBasis& p) {
                       if (!(p.h > 0.0)) throw invalid_argument("cayley: h must be positive");
                       if (p.r < 1) throw invalid_argument("cayley: r must be >= 1");
                       if (p.s < 1 || p.s > 2 * p.r + 1) throw invalid_argument("cayley: s must lie in [1, 2r+1]");
                   },
                   [](const auto&) {},
               },
               d);
}

Vector evaluate(const FilterDesign& d, const Vector& lambda, double lambda_max) {
    validate(d);
    const Index n = lambda.size();
    return std::visit(
        overloaded{
            [&](const design::LowPass& p) -> Vector {
                require_positive_lambda_max(lambda_max, "lowpass");
                return (1.0 - lambda.array() / lambda_max).pow(p.eta).matrix();
            },
            [&](const design::HighPass&) -> Vector {
                require_positive_lambda_max(lambda_max, "highpass");
                return lambda / lambda_max;
            },
            [&](const design::BandPass& p) -> Vector {
                return (-p.gamma * (p.center * lambda_max - lambda.array()).square()).exp().matrix();
            },
            [&](const design::AllPass&) -> Vector { return Vector::Ones(n); },
            [&](const design::ExpLowPass& p) -> Vector { return (-lambda.array() / p.tau).exp().matrix(); },
            [&](const design::OneMinusRatio&) -> Vector {
                require_positive_lambda_max(lambda_max, "oneminusratio");
                return (1.0 - lambda.array() / lambda_max).matrix();
            },
            [&](const design::ChebBasis& p) -> Vector {
                require_positive_lambda_max(lambda_max, "cheb");
                return chebyshev_response(p.k, lambda, lambda_max);
            },
            [&](const design::CayleyBasis& p) -> Vector { return cayley_column(p.s, lambda, p.h); },
            [&](const design::Tabulated& p) -> Vector {
                if (p.values.size() != n) {
                    throw invalid_argument("tabulated design has " + std::to_string(p.values.size()) +
                                           " values but the basis has " + std::to_string(n) + " eigenvalues");
                }
                return p.values;
            },
        },
        d);
}

std::string to_string(const FilterDesign& d) {
    return std::visit(overloaded{
                          [](const design::LowPass& p) { return "lowpass(eta=" + number(p.eta) + ")"; },
                          [](const design::HighPass&) { return std::string("highpass"); },
                          [](const design::BandPass& p) {
                              return "bandpass(c=" + number(p.center) + ",gamma=" + number(p.gamma) + ")";
                          },
                          [](const design::AllPass&) { return std::string("allpass"); },
                          [](const design::ExpLowPass& p) { return "explowpass(tau=" + number(p.tau) + ")"; },
                          [](const design::OneMinusRatio&) { return std::string("oneminusratio"); },
                          [](const design::ChebBasis& p) { return "cheb(k=" + std::to_string(p.k) + ")"; },
                          [](const design::CayleyBasis& p) {
                              return "cayley(s=" + std::to_string(p.s) + ",h=" + number(p.h) +
                                     ",r=" + std::to_string(p.r) + ")";
                          },
                          [](const design::Tabulated& p) { return "tabulated(file=" + p.source + ")"; },
                      },
                      d);
}

FilterDesign parse_design(std::string_view text, const std::filesystem::path& base_dir) {
    ParsedCall call = parse_call(text);
    FilterDesign result;
    if (call.name == "lowpass") {
        result = design::LowPass{take_double(call, "eta")};
    } else if (call.name == "highpass") {
        result = design::HighPass{};
    } else if (call.name == "bandpass") {
        const double c = take_double(call, "c");
        result = design::BandPass{c, take_double(call, "gamma")};
    } else if (call.name == "allpass") {
        result = design::AllPass{};
    } else if (call.name == "explowpass") {
        result = design::ExpLowPass{take_double(call, "tau")};
    } else if (call.name == "oneminusratio") {
        result = design::OneMinusRatio{};
    } else if (call.name == "cheb") {
        result = design::ChebBasis{take_int(call, "k")};
    } else if (call.name == "cayley") {
        const int s = take_int(call, "s");
        const double h = take_double(call, "h");
        result = design::CayleyBasis{s, h, take_int(call, "r")};
    } else if (call.name == "tabulated") {
        auto it = call.args.find("file");
        if (it == call.args.end()) throw config_error("tabulated: missing argument 'file'");
        const std::string source = it->second;
        call.args.erase(it);
        std::filesystem::path path(source);
        if (path.is_relative() && !base_dir.empty()) path = base_dir / path;
        const Matrix m = csv::read_matrix(path);
        if (m.cols() != 1) throw config_error("tabulated: " + path.string() + " must have exactly one column");
        result = design::Tabulated{m.col(0), source};
    } else {
        throw config_error("unknown design family '" + call.name + "'");
    }
    if (!call.args.empty()) throw config_error(call.name + ": unexpected argument '" + call.args.begin()->first + "'");
    try {
        validate(result);
    } catch (const Error& e) {
        throw config_error(e.what());
    }
    return result;
}

double cayley_theta(double x) { return std::atan2(-1.0, x) - std::atan2(1.0, x); }

Matrix cayley_bmatrix(const Vector& lambda, double h, int r) {
    if (!(h > 0.0)) throw invalid_argument("cayley: h must be positive");
    if (r < 1) throw invalid_argument("cayley: r must be >= 1");
    Matrix b(lambda.size(), 2 * r + 1);
    for (int s = 1; s <= 2 * r + 1; ++s) b.col(s - 1) = cayley_column(s, lambda, h);
    return b;
}

Matrix bmatrix(std::span<const FilterDesign> designs, const SpectralBasis& basis) {
    if (designs.empty()) throw invalid_argument("B-matrix needs at least one design");
    Matrix b(basis.size(), static_cast<Index>(designs.size()));
    for (std::size_t s = 0; s < designs.size(); ++s) b.col(static_cast<Index>(s)) = evaluate(designs[s], basis);
    return b;
}

Vector gcn_theoretical_profile(double average_degree, const Vector& lambda) {
    if (!(average_degree > 0.0)) throw invalid_argument("average degree must be positive");
    return (1.0 - lambda.array() * (average_degree / (average_degree + 1.0))).matrix();
}

double gcn_cutoff(double average_degree) {
    if (!(average_degree > 0.0)) throw invalid_argument("average degree must be positive");
    return (average_degree + 1.0) / average_degree;
}

double coverage(std::span<const FilterDesign> designs, const SpectralBasis& basis) {
    constexpr int kGrid = 256;
    const double lambda_max = basis.lambda_max();
    Vector grid(kGrid);
    for (int i = 0; i < kGrid; ++i) grid(i) = lambda_max * i / (kGrid - 1);

    const Vector& eig = basis.eigenvalues;
    auto interpolate = [&eig](const Vector& values, double x) {
        const double* begin = eig.data();
        const double* end = eig.data() + eig.size();
        const double* hi = std::upper_bound(begin, end, x);
        if (hi == begin) return values(0);
        if (hi == end) return values(eig.size() - 1);
        const Index j = hi - begin;
        const double x0 = eig(j - 1), x1 = eig(j);
        const double t = x1 > x0 ? (x - x0) / (x1 - x0) : 0.0;
        return (1.0 - t) * values(j - 1) + t * values(j);
    };

    Vector total = Vector::Zero(kGrid);
    for (const FilterDesign& d : designs) {
        if (const auto* tab = std::get_if<design::Tabulated>(&d)) {
            if (tab->values.size() != eig.size()) throw invalid_argument("tabulated design does not match basis size");
            for (int i = 0; i < kGrid; ++i) total(i) += interpolate(tab->values, grid(i));
        } else {
            total += evaluate(d, grid, lambda_max);
        }
    }
    return total.minCoeff();
}

} // namespace specgconv

#include "ramanecho/envelope.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>

#include "ramanecho/config.hpp"
#include "ramanecho/errors.hpp"

namespace ramanecho {

double FieldEnvelope::energy() const {
    double s = 0.0;
    for (std::size_t i = 1; i < samples.size(); ++i)
        s += 0.5 * (axis[i] - axis[i - 1]) * (std::norm(samples[i]) + std::norm(samples[i - 1]));
    return s;
}

void FieldEnvelope::validate() const {
    if (axis.size() != samples.size()) throw DomainError("envelope axis and samples differ in length");
    for (std::size_t i = 1; i < axis.size(); ++i)
        if (!(axis[i] > axis[i - 1])) throw GridError("envelope axis is not strictly increasing");
    for (const auto& v : samples)
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) throw DomainError("envelope has nonfinite samples");
}

FieldEnvelope gaussian_pulse(const std::vector<double>& tau, double t0, double width, cplx amplitude, double chirp) {
    if (!(width > 0.0)) throw DomainError("pulse width must be > 0");
    FieldEnvelope e;
    e.axis = tau;
    e.samples.resize(tau.size());
    for (std::size_t i = 0; i < tau.size(); ++i) {
        const double d = tau[i] - t0;
        e.samples[i] = amplitude * std::exp(cplx(-0.5 * d * d / (width * width), chirp * d * d));
    }
    return e;
}

cplx sample_at(const FieldEnvelope& e, double t) {
    const auto& x = e.axis;
    const std::size_t n = x.size();
    if (n == 0 || t < x.front() || t > x.back()) return 0.0;
    if (n == 1) return e.samples[0];
    std::size_t i = static_cast<std::size_t>(std::upper_bound(x.begin(), x.end(), t) - x.begin());
    if (i == 0) i = 1;
    if (i >= n) i = n - 1;
    --i;  // x[i] <= t <= x[i+1]
    const double h = x[i + 1] - x[i];
    const double s = (t - x[i]) / h;
    const cplx p1 = e.samples[i];
    const cplx p2 = e.samples[i + 1];
    // one-sided tangents at the ends
    const cplx m1 = i > 0 ? (p2 - e.samples[i - 1]) * (h / (x[i + 1] - x[i - 1])) : (p2 - p1);
    const cplx m2 = i + 2 < n ? (e.samples[i + 2] - p1) * (h / (x[i + 2] - x[i])) : (p2 - p1);
    const double s2 = s * s, s3 = s2 * s;
    return (2 * s3 - 3 * s2 + 1) * p1 + (s3 - 2 * s2 + s) * m1 + (-2 * s3 + 3 * s2) * p2 + (s3 - s2) * m2;
}

double fwhm(const FieldEnvelope& e) {
    const std::size_t n = e.size();
    if (n < 3) throw DomainError("fwhm needs at least three samples");
    std::size_t im = 0;
    for (std::size_t i = 1; i < n; ++i)
        if (std::norm(e.samples[i]) > std::norm(e.samples[im])) im = i;
    const double half = 0.5 * std::norm(e.samples[im]);
    if (half == 0.0) throw DomainError("fwhm of a zero envelope");
    std::size_t a = im, b = im;
    while (a > 0 && std::norm(e.samples[a]) > half) --a;
    while (b + 1 < n && std::norm(e.samples[b]) > half) ++b;
    if (std::norm(e.samples[a]) > half || std::norm(e.samples[b]) > half)
        throw DomainError("pulse is not contained in the window");
    auto cross = [&](std::size_t lo, std::size_t hi) {
        const double ya = std::norm(e.samples[lo]), yb = std::norm(e.samples[hi]);
        return e.axis[lo] + (half - ya) / (yb - ya) * (e.axis[hi] - e.axis[lo]);
    };
    return cross(b - 1, b) - cross(a, a + 1);
}

double peak_time(const FieldEnvelope& e) {
    const std::size_t n = e.size();
    if (n == 0) throw DomainError("peak of an empty envelope");
    std::size_t im = 0;
    for (std::size_t i = 1; i < n; ++i)
        if (std::norm(e.samples[i]) > std::norm(e.samples[im])) im = i;
    if (im == 0 || im + 1 == n) return e.axis[im];
    const double y0 = std::norm(e.samples[im - 1]), y1 = std::norm(e.samples[im]), y2 = std::norm(e.samples[im + 1]);
    const double den = y0 - 2 * y1 + y2;
    if (den == 0.0) return e.axis[im];
    const double h = 0.5 * (e.axis[im + 1] - e.axis[im - 1]);
    return e.axis[im] + 0.5 * h * (y0 - y2) / den;
}

double centroid(const FieldEnvelope& e) {
    double num = 0.0, den = 0.0;
    for (std::size_t i = 1; i < e.size(); ++i) {
        const double dt = e.axis[i] - e.axis[i - 1];
        const double a = std::norm(e.samples[i - 1]), b = std::norm(e.samples[i]);
        num += 0.5 * dt * (a * e.axis[i - 1] + b * e.axis[i]);
        den += 0.5 * dt * (a + b);
    }
    if (den == 0.0) throw DomainError("centroid of a zero envelope");
    return num / den;
}

std::vector<cplx> spectrum(const FieldEnvelope& e, const std::vector<double>& nu) {
    std::vector<cplx> out(nu.size());
    for (std::size_t k = 0; k < nu.size(); ++k) {
        cplx s = 0.0;
        for (std::size_t i = 1; i < e.size(); ++i) {
            const double dt = e.axis[i] - e.axis[i - 1];
            s += 0.5 * dt *
                 (e.samples[i - 1] * std::polar(1.0, nu[k] * e.axis[i - 1]) + e.samples[i] * std::polar(1.0, nu[k] * e.axis[i]));
        }
        out[k] = s;
    }
    return out;
}

FieldEnvelope from_spectrum(const std::vector<double>& nu, const std::vector<cplx>& s, const std::vector<double>& tau) {
    FieldEnvelope e;
    e.axis = tau;
    e.samples.assign(tau.size(), 0.0);
    for (std::size_t i = 0; i < tau.size(); ++i) {
        cplx acc = 0.0;
        for (std::size_t k = 1; k < nu.size(); ++k) {
            const double dn = nu[k] - nu[k - 1];
            acc += 0.5 * dn * (s[k - 1] * std::polar(1.0, -nu[k - 1] * tau[i]) + s[k] * std::polar(1.0, -nu[k] * tau[i]));
        }
        e.samples[i] = acc / (2.0 * std::numbers::pi);
    }
    return e;
}

double relative_l2(const FieldEnvelope& a, const FieldEnvelope& b) {
    FieldEnvelope d = b;
    for (std::size_t i = 0; i < b.size(); ++i) d.samples[i] = sample_at(a, b.axis[i]) - b.samples[i];
    const double nb = b.energy();
    if (nb == 0.0) throw DomainError("relative error against a zero reference");
    return std::sqrt(d.energy() / nb);
}

void write_envelope_csv(const FieldEnvelope& e, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw IoError("cannot write envelope: " + path);
    f << "# axis=" << (e.kind == AxisKind::time ? "time" : "frequency") << " z=" << format_double(e.z)
      << " direction=" << (e.direction == Direction::forward ? "forward" : "backward") << "\n";
    f << (e.kind == AxisKind::time ? "tau" : "nu") << ",re,im\n";
    for (std::size_t i = 0; i < e.size(); ++i)
        f << format_double(e.axis[i]) << ',' << format_double(e.samples[i].real()) << ','
          << format_double(e.samples[i].imag()) << '\n';
    if (!f) throw IoError("write failed: " + path);
}

FieldEnvelope read_envelope_csv(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw IoError("cannot read envelope: " + path);
    FieldEnvelope e;
    std::string line;
    while (std::getline(f, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            std::istringstream ss(line.substr(1));
            std::string tok;
            while (ss >> tok) {
                const auto eq = tok.find('=');
                if (eq == std::string::npos) continue;
                const std::string k = tok.substr(0, eq), v = tok.substr(eq + 1);
                if (k == "axis") e.kind = v == "frequency" ? AxisKind::frequency : AxisKind::time;
                else if (k == "z") e.z = std::stod(v);
                else if (k == "direction") e.direction = v == "backward" ? Direction::backward : Direction::forward;
            }
            continue;
        }
        if (!std::isdigit(static_cast<unsigned char>(line[0])) && line[0] != '-' && line[0] != '+' && line[0] != '.')
            continue;  // header row
        double t, re, im;
        if (std::sscanf(line.c_str(), "%lf,%lf,%lf", &t, &re, &im) != 3)
            throw IoError(path + ": malformed row `" + line + "`");
        e.axis.push_back(t);
        e.samples.emplace_back(re, im);
    }
    e.validate();
    return e;
}

}  // namespace ramanecho

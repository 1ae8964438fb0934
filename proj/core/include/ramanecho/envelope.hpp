#pragma once

#include <string>
#include <vector>

#include "ramanecho/params.hpp"

namespace ramanecho {

enum class Direction { forward, backward };
enum class AxisKind { time, frequency };

struct FieldEnvelope {
    std::vector<double> axis;
    std::vector<cplx> samples;
    AxisKind kind = AxisKind::time;
    double z = 0.0;
    Direction direction = Direction::forward;

    std::size_t size() const { return samples.size(); }
    // trapezoid on the axis
    double energy() const;
    void validate() const;
};

// A exp(-(t-t0)^2/(2 w^2) + i c (t-t0)^2); w is the amplitude standard deviation,
// so the spectral amplitude has standard deviation 1/w.
FieldEnvelope gaussian_pulse(const std::vector<double>& tau, double t0, double width, cplx amplitude = 1.0,
                             double chirp = 0.0);

// Catmull-Rom interpolation; zero outside the axis.
cplx sample_at(const FieldEnvelope& e, double t);

// Full width at half maximum of |E|^2, half-max crossings linearly interpolated.
double fwhm(const FieldEnvelope& e);
// Peak of |E|^2 refined by a parabola through the three top samples.
double peak_time(const FieldEnvelope& e);
double centroid(const FieldEnvelope& e);

// int E(t) exp(i nu t) dt by the trapezoid rule at the requested frequencies.
std::vector<cplx> spectrum(const FieldEnvelope& e, const std::vector<double>& nu);
// inverse: (1/2pi) int S(nu) exp(-i nu t) d nu
FieldEnvelope from_spectrum(const std::vector<double>& nu, const std::vector<cplx>& s, const std::vector<double>& tau);

// Relative L2 distance ||a - b|| / ||b|| after interpolating a onto b's axis.
double relative_l2(const FieldEnvelope& a, const FieldEnvelope& b);

// `# axis=<time|frequency> z=<z> direction=<forward|backward>` then `t,re,im` rows.
void write_envelope_csv(const FieldEnvelope& e, const std::string& path);
FieldEnvelope read_envelope_csv(const std::string& path);

}  // namespace ramanecho

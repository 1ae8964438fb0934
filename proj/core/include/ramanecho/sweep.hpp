#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "ramanecho/config.hpp"
#include "ramanecho/pipeline.hpp"

namespace ramanecho {

enum class Observable { remnant_r13, eps_t, eps_r, gamma_factor, overall_eff, fidelity };
enum class AxisSpacing { linear, log };
enum class Format { csv, json };

std::string to_string(Observable o);
Observable parse_observable(const std::string& s);
Format parse_format(const std::string& s);

// Any pipeline key. `list`, when non-empty, replaces the range.
struct SweepAxis {
    std::string name;
    double min = 0.0;
    double max = 1.0;
    int count = 2;
    AxisSpacing spacing = AxisSpacing::linear;
    std::vector<double> list;

    std::vector<double> values() const;
    void validate() const;
};

// "name=min:max:count[:log]" or "name=v1,v2,..."
SweepAxis parse_axis(const std::string& text);

struct SweepSpec {
    std::vector<SweepAxis> axes;  // at most three, first axis slowest
    std::vector<Observable> observables;
    Config fixed;

    // Also loads both ends of every axis so out-of-domain ranges fail before the sweep.
    void validate() const;
};

struct SweepRow {
    std::vector<double> axes;
    std::vector<double> values;  // one per column; NaN where the point failed
    std::string error;
};

struct SweepResult {
    std::vector<std::string> axis_names;
    std::vector<std::string> columns;  // observables, then derived normalisations
    std::vector<SweepRow> rows;
    std::vector<std::pair<std::string, std::string>> header;
};

// Resolved configuration of one grid point (axis values in axis order).
PipelineSpec sweep_point(const SweepSpec& spec, const std::vector<double>& at);

// Row-major over the axes; per-point failures land in the error column.
SweepResult run_sweep(const SweepSpec& spec, int jobs = 1);

// Axes and fixed values of the figure presets 2..7.
SweepSpec figure_preset(int figure);

// CSV: `# key=value` header lines, one column row, 17 significant digits. JSON mirrors it.
void emit(const SweepResult& r, Format f, std::ostream& os);
void emit(const SweepResult& r, Format f, const std::string& path);
SweepResult parse_result(std::istream& is, Format f);

std::string version();

}  // namespace ramanecho

#pragma once

#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "gfcap/capacity.hpp"

namespace gfcap {

// CSV writers.  Numbers use %.10g so repeated runs are byte-identical.
void write_slice_csv(std::ostream& os, const std::vector<HeightAnalysis>& runs);
void write_critical_csv(std::ostream& os, const std::vector<HeightAnalysis>& runs);
void write_ranks_csv(std::ostream& os, const std::vector<HeightAnalysis>& runs);
void write_capacities_csv(std::ostream& os, const std::vector<HeightAnalysis>& runs);

// Static SVG: projected curves, lobes shaded, crossings marked with their signs.
void write_diagram_svg(std::ostream& os, const std::vector<HeightAnalysis>& runs);

// "key = value" lines, '#' starts a comment.  Throws a config error on malformed lines.
std::map<std::string, std::string> parse_config(const std::string& text);
std::map<std::string, std::string> read_config_file(const std::string& path);

// "a:b:step" (inclusive), "a,b,c" or a single number
std::vector<double> parse_heights(const std::string& text);

// flag value, else config value, else $GFCAP_OUT, else "gfcap_out"
std::string output_directory(const std::string& flag, const std::map<std::string, std::string>& config);

std::string format_number(double v);

} // namespace gfcap

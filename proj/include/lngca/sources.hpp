#pragma once

#include "lngca/rng.hpp"
#include "lngca/types.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace lngca {

/// One of the 18 named non-Gaussian source distributions (letters a to r).
/// Draws are rescaled with the population mean and standard deviation, so
/// each source has mean 0 and variance 1 in population.
struct SourceSpec {
    char id = 'a';
    std::string family;
    std::string params;
    double skewness = 0.0;   ///< population skewness after standardization
    double kurtosis = 3.0;   ///< population kurtosis (infinity when undefined)
};

/// The library in letter order.
const std::vector<SourceSpec>& source_library();
/// Looks up a letter; throws InputError for anything outside a..r.
const SourceSpec& source_spec(char id);
/// Parses a string of letters ("all" for the whole library).
std::vector<SourceSpec> source_specs(std::string_view ids);

/// n population-standardized draws.
Vector draw_source(const SourceSpec& spec, Index n, Rng& rng);

/// n x specs.size() matrix; column j drawn from specs[j] and then
/// standardized to sample mean 0 and (1/n) variance 1.
SampleMatrix gen_sources(const std::vector<SourceSpec>& specs, Index n, Rng& rng);

/// n x cols matrix of standard Gaussians, each column sample-standardized.
Matrix gaussian_noise(Index n, Index cols, Rng& rng);

}  // namespace lngca

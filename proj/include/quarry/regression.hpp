#ifndef QUARRY_REGRESSION_HPP
#define QUARRY_REGRESSION_HPP

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "quarry/arch.hpp"

namespace quarry {

// Thrown when the design matrix is rank deficient and the ridge fallback is
// disabled.
struct RankDeficiencyError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Sample {
    std::vector<double> features;
    double target = 0.0;
};

// Polynomial surrogate over min-max normalized features. Coefficients are
// stored in graded-lexicographic monomial order (degree ascending, then
// exponent tuples lexicographically descending); that order is part of the
// model-file schema.
struct PolynomialModel {
    std::uint32_t degree = 0;
    std::vector<std::string> feature_names;
    std::vector<double> shift;  // per-feature min
    std::vector<double> scale;  // per-feature (max - min), 1 if degenerate
    std::vector<double> coefficients;
    double cv_rmse = 0.0;
    bool degenerate = false;    // design matrix was rank deficient
    bool ridge_used = false;    // solver fell back to ridge (penalty 1e-8)
    std::string target_name;

    bool operator==(const PolynomialModel&) const = default;
};

// Numeric design features of a config, fixed order:
// [pe_rows, pe_cols, glb_bytes, ifmap_spad_bytes, filter_spad_bytes,
//  psum_spad_bytes, act_bits, wgt_bits]
extern const std::vector<std::string> kDesignFeatureNames;
std::vector<double> design_features(const AcceleratorConfig& cfg);

// All exponent tuples over n_features with total degree <= degree, in the
// schema order above. Count is C(n_features + degree, degree).
std::vector<std::vector<std::uint32_t>> monomial_exponents(std::size_t n_features,
                                                           std::uint32_t degree);
std::uint64_t monomial_count(std::size_t n_features, std::uint32_t degree);

// k-fold CV RMSE at a fixed degree. Folds come from a seeded shuffle followed
// by a contiguous split; deterministic for a fixed seed.
double cv_error(const std::vector<Sample>& samples, std::uint32_t degree,
                std::uint32_t k, std::uint64_t seed, bool allow_ridge = true);

// Tries degrees 1..max_degree, keeps the one with minimal CV RMSE (near-zero
// errors count as ties, broken toward the smaller degree), then refits on all
// samples. Throws on fewer than 2k samples, k < 2, max_degree < 1, ragged
// features, or rank deficiency when allow_ridge is false.
PolynomialModel fit_poly(const std::vector<Sample>& samples, std::uint32_t max_degree,
                         std::uint32_t k, std::uint64_t seed, bool allow_ridge = true);

// Evaluates the polynomial on normalized features. Throws on length mismatch.
double predict(const PolynomialModel& model, const std::vector<double>& features);

PolynomialModel parse_model(const std::string& text);
std::string model_to_json_text(const PolynomialModel& model);

}  // namespace quarry

#endif

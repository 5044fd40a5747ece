#include "quarry/regression.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>

#include <Eigen/Dense>
#include <json.hpp>

#include "quarry/util.hpp"

namespace quarry {

using nlohmann::json;

const std::vector<std::string> kDesignFeatureNames = {
    "pe_rows", "pe_cols", "glb_bytes", "ifmap_spad_bytes",
    "filter_spad_bytes", "psum_spad_bytes", "act_bits", "wgt_bits"};

std::vector<double> design_features(const AcceleratorConfig& cfg) {
    return {static_cast<double>(cfg.pe_rows),
            static_cast<double>(cfg.pe_cols),
            static_cast<double>(cfg.glb_bytes),
            static_cast<double>(cfg.ifmap_spad_bytes),
            static_cast<double>(cfg.filter_spad_bytes),
            static_cast<double>(cfg.psum_spad_bytes),
            static_cast<double>(act_bits(cfg.pe_type)),
            static_cast<double>(wgt_bits(cfg.pe_type))};
}

namespace {

void gen_exponents(std::size_t pos, std::uint32_t remaining, std::vector<std::uint32_t>& cur,
                   std::vector<std::vector<std::uint32_t>>& out) {
    if (pos + 1 == cur.size()) {
        cur[pos] = remaining;
        out.push_back(cur);
        return;
    }
    for (std::uint32_t e = remaining + 1; e-- > 0;) {
        cur[pos] = e;
        gen_exponents(pos + 1, remaining - e, cur, out);
    }
}

}  // namespace

std::vector<std::vector<std::uint32_t>> monomial_exponents(std::size_t n_features,
                                                           std::uint32_t degree) {
    if (n_features == 0) throw std::invalid_argument("monomial_exponents: no features");
    std::vector<std::vector<std::uint32_t>> out;
    std::vector<std::uint32_t> cur(n_features, 0);
    for (std::uint32_t g = 0; g <= degree; ++g) gen_exponents(0, g, cur, out);
    return out;
}

std::uint64_t monomial_count(std::size_t n_features, std::uint32_t degree) {
    // C(n + d, d)
    std::uint64_t c = 1;
    for (std::uint32_t i = 1; i <= degree; ++i)
        c = c * (n_features + i) / i;
    return c;
}

namespace {

struct Normalization {
    std::vector<double> shift;
    std::vector<double> scale;
};

Normalization compute_normalization(const std::vector<Sample>& samples) {
    const std::size_t nf = samples.front().features.size();
    Normalization nz;
    nz.shift.assign(nf, 0.0);
    nz.scale.assign(nf, 1.0);
    for (std::size_t f = 0; f < nf; ++f) {
        double lo = samples[0].features[f], hi = lo;
        for (const auto& s : samples) {
            lo = std::min(lo, s.features[f]);
            hi = std::max(hi, s.features[f]);
        }
        nz.shift[f] = lo;
        nz.scale[f] = hi > lo ? hi - lo : 1.0;
    }
    return nz;
}

double eval_monomials(const std::vector<std::vector<std::uint32_t>>& exps,
                      const std::vector<double>& coefs, const std::vector<double>& x) {
    double y = 0.0;
    for (std::size_t j = 0; j < exps.size(); ++j) {
        double term = coefs[j];
        for (std::size_t f = 0; f < x.size(); ++f) {
            for (std::uint32_t e = 0; e < exps[j][f]; ++e) term *= x[f];
        }
        y += term;
    }
    return y;
}

Eigen::MatrixXd design_matrix(const std::vector<const Sample*>& rows,
                              const Normalization& nz,
                              const std::vector<std::vector<std::uint32_t>>& exps) {
    const std::size_t nf = nz.shift.size();
    Eigen::MatrixXd X(rows.size(), exps.size());
    std::vector<double> x(nf);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (std::size_t f = 0; f < nf; ++f)
            x[f] = (rows[i]->features[f] - nz.shift[f]) / nz.scale[f];
        for (std::size_t j = 0; j < exps.size(); ++j) {
            double term = 1.0;
            for (std::size_t f = 0; f < nf; ++f)
                for (std::uint32_t e = 0; e < exps[j][f]; ++e) term *= x[f];
            X(i, j) = term;
        }
    }
    return X;
}

// Rank-revealing complete orthogonal decomposition: collinear monomials
// (common once categorical-ish features repeat few values) yield the
// minimum-norm least-squares solution instead of garbage. Exact rank
// deficiency is reported through `degenerate`; ridge (penalty 1e-8) remains
// as a flagged last resort should the decomposition not produce a usable
// solution.
Eigen::VectorXd solve_least_squares(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                                    bool allow_ridge, bool& degenerate, bool& ridge_used) {
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(X);
    if (cod.rank() < static_cast<Eigen::Index>(X.cols())) {
        degenerate = true;
        if (!allow_ridge)
            throw RankDeficiencyError(
                "design matrix is rank deficient (collinear monomials) and ridge fallback is "
                "disabled");
    }
    Eigen::VectorXd beta = cod.solve(y);
    if (beta.allFinite()) return beta;

    ridge_used = true;
    constexpr double kRidgePenalty = 1e-8;
    Eigen::MatrixXd gram = X.transpose() * X;
    gram.diagonal().array() += kRidgePenalty;
    return gram.ldlt().solve(X.transpose() * y);
}

// Deterministic Fisher-Yates; std::shuffle's draw sequence is
// implementation-defined, so the fold split is pinned by hand.
std::vector<std::size_t> shuffled_indices(std::size_t n, std::uint64_t seed) {
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::mt19937_64 rng(seed);
    for (std::size_t i = n; i-- > 1;) {
        std::size_t j = static_cast<std::size_t>(rng() % (i + 1));
        std::swap(idx[i], idx[j]);
    }
    return idx;
}

void check_preconditions(const std::vector<Sample>& samples, std::uint32_t k) {
    if (k < 2) throw std::invalid_argument("fit: k must be >= 2");
    if (samples.size() < 2 * static_cast<std::size_t>(k)) {
        std::ostringstream oss;
        oss << "fit: need at least 2k samples (" << 2 * k << "), got " << samples.size();
        throw std::invalid_argument(oss.str());
    }
    const std::size_t nf = samples.front().features.size();
    if (nf == 0) throw std::invalid_argument("fit: samples have no features");
    for (const auto& s : samples) {
        if (s.features.size() != nf)
            throw std::invalid_argument("fit: inconsistent feature vector lengths");
        if (!std::isfinite(s.target)) throw std::invalid_argument("fit: non-finite target");
        for (double f : s.features)
            if (!std::isfinite(f)) throw std::invalid_argument("fit: non-finite feature");
    }
}

double target_rms(const std::vector<Sample>& samples) {
    double acc = 0.0;
    for (const auto& s : samples) acc += s.target * s.target;
    return std::sqrt(acc / static_cast<double>(samples.size()));
}

double cv_error_impl(const std::vector<Sample>& samples,
                     const std::vector<std::vector<std::uint32_t>>& exps,
                     const Normalization& nz, std::uint32_t k, std::uint64_t seed,
                     bool allow_ridge, bool& degenerate, bool& ridge_used) {
    const std::size_t n = samples.size();
    std::vector<std::size_t> order = shuffled_indices(n, seed);

    double sq_sum = 0.0;
    for (std::uint32_t fold = 0; fold < k; ++fold) {
        const std::size_t lo = fold * n / k;
        const std::size_t hi = (fold + 1) * n / k;

        std::vector<const Sample*> train;
        train.reserve(n - (hi - lo));
        for (std::size_t i = 0; i < n; ++i)
            if (i < lo || i >= hi) train.push_back(&samples[order[i]]);

        Eigen::VectorXd y(train.size());
        for (std::size_t i = 0; i < train.size(); ++i) y(i) = train[i]->target;
        Eigen::MatrixXd X = design_matrix(train, nz, exps);
        Eigen::VectorXd beta = solve_least_squares(X, y, allow_ridge, degenerate, ridge_used);

        std::vector<const Sample*> held;
        for (std::size_t i = lo; i < hi; ++i) held.push_back(&samples[order[i]]);
        Eigen::MatrixXd Xh = design_matrix(held, nz, exps);
        Eigen::VectorXd pred = Xh * beta;
        for (std::size_t i = 0; i < held.size(); ++i) {
            double err = pred(i) - held[i]->target;
            sq_sum += err * err;
        }
    }
    return std::sqrt(sq_sum / static_cast<double>(n));
}

}  // namespace

double cv_error(const std::vector<Sample>& samples, std::uint32_t degree, std::uint32_t k,
                std::uint64_t seed, bool allow_ridge) {
    if (samples.empty()) throw std::invalid_argument("fit: no samples");
    check_preconditions(samples, k);
    if (degree < 1) throw std::invalid_argument("fit: degree must be >= 1");
    auto exps = monomial_exponents(samples.front().features.size(), degree);
    auto nz = compute_normalization(samples);
    bool degenerate = false, ridge_used = false;
    return cv_error_impl(samples, exps, nz, k, seed, allow_ridge, degenerate, ridge_used);
}

PolynomialModel fit_poly(const std::vector<Sample>& samples, std::uint32_t max_degree,
                         std::uint32_t k, std::uint64_t seed, bool allow_ridge) {
    if (samples.empty()) throw std::invalid_argument("fit: no samples");
    check_preconditions(samples, k);
    if (max_degree < 1) throw std::invalid_argument("fit: max_degree must be >= 1");

    const std::size_t nf = samples.front().features.size();
    const Normalization nz = compute_normalization(samples);

    // CV errors indistinguishable from zero (relative to the target scale)
    // count as ties so that noise-free generators of low degree are not
    // displaced by rounding noise at higher degrees; ties go to the smaller
    // degree.
    const double zero_floor = 1e-10 * std::max(1e-300, target_rms(samples));

    std::uint32_t best_degree = 0;
    double best_raw = 0.0, best_eff = 0.0;
    for (std::uint32_t d = 1; d <= max_degree; ++d) {
        auto exps = monomial_exponents(nf, d);
        bool fold_degenerate = false, fold_ridge = false;
        double raw = cv_error_impl(samples, exps, nz, k, seed, allow_ridge, fold_degenerate,
                                   fold_ridge);
        double eff = std::max(raw, zero_floor);
        if (best_degree == 0 || eff < best_eff) {
            best_degree = d;
            best_raw = raw;
            best_eff = eff;
        }
    }

    auto exps = monomial_exponents(nf, best_degree);
    std::vector<const Sample*> all;
    all.reserve(samples.size());
    for (const auto& s : samples) all.push_back(&s);
    Eigen::VectorXd y(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) y(i) = samples[i].target;

    bool degenerate = false, ridge_used = false;
    Eigen::MatrixXd X = design_matrix(all, nz, exps);
    Eigen::VectorXd beta = solve_least_squares(X, y, allow_ridge, degenerate, ridge_used);

    PolynomialModel model;
    model.degree = best_degree;
    model.feature_names.resize(nf);
    for (std::size_t f = 0; f < nf; ++f) model.feature_names[f] = "x" + std::to_string(f);
    model.shift = nz.shift;
    model.scale = nz.scale;
    model.coefficients.assign(beta.data(), beta.data() + beta.size());
    model.cv_rmse = best_raw;
    model.degenerate = degenerate;
    model.ridge_used = ridge_used;
    return model;
}

double predict(const PolynomialModel& model, const std::vector<double>& features) {
    if (features.size() != model.shift.size()) {
        std::ostringstream oss;
        oss << "predict: feature vector length " << features.size() << " does not match model ("
            << model.shift.size() << ")";
        throw std::invalid_argument(oss.str());
    }
    std::vector<double> x(features.size());
    for (std::size_t f = 0; f < features.size(); ++f)
        x[f] = (features[f] - model.shift[f]) / model.scale[f];
    auto exps = monomial_exponents(features.size(), model.degree);
    if (exps.size() != model.coefficients.size())
        throw std::invalid_argument("predict: coefficient count does not match degree");
    return eval_monomials(exps, model.coefficients, x);
}

PolynomialModel parse_model(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw std::runtime_error(std::string("malformed model document: ") + e.what());
    }
    PolynomialModel m;
    try {
        m.degree = j.at("degree").get<std::uint32_t>();
        m.feature_names = j.at("feature_names").get<std::vector<std::string>>();
        m.shift = j.at("normalization").at("shift").get<std::vector<double>>();
        m.scale = j.at("normalization").at("scale").get<std::vector<double>>();
        m.coefficients = j.at("coefficients").get<std::vector<double>>();
        m.cv_rmse = j.at("cv_rmse").get<double>();
        m.degenerate = j.at("degenerate").get<bool>();
        m.ridge_used = j.at("ridge_used").get<bool>();
        if (j.contains("target")) m.target_name = j.at("target").get<std::string>();
    } catch (const json::exception& e) {
        throw std::runtime_error(std::string("malformed model document: ") + e.what());
    }
    if (m.shift.size() != m.feature_names.size() || m.scale.size() != m.feature_names.size())
        throw std::runtime_error("model document: normalization length mismatch");
    if (m.coefficients.size() != monomial_count(m.feature_names.size(), m.degree))
        throw std::runtime_error("model document: coefficient count does not match degree");
    return m;
}

std::string model_to_json_text(const PolynomialModel& m) {
    json j;
    j["degree"] = m.degree;
    j["feature_names"] = m.feature_names;
    j["normalization"] = {{"shift", m.shift}, {"scale", m.scale}};
    j["monomial_order"] = "graded-lex";
    j["coefficients"] = m.coefficients;
    j["cv_rmse"] = m.cv_rmse;
    j["degenerate"] = m.degenerate;
    j["ridge_used"] = m.ridge_used;
    if (!m.target_name.empty()) j["target"] = m.target_name;
    return j.dump(2) + "\n";
}

}  // namespace quarry

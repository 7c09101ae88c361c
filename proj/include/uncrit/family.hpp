#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "uncrit/common.hpp"
#include "uncrit/rng.hpp"

namespace uncrit {

/// Linear multiparameter family of discrete fields:
///   f_a = g[0] + sum_i a_i * g[i],  i = 1..m.
/// g[0] is the offset/mean field, g[1..m] are the modes.
struct LinearFamily {
    std::vector<std::vector<double>> g; // (m+1) vectors of length n
    std::string grid_ref;

    int mode_count() const { return static_cast<int>(g.size()) - 1; }
    int vertex_count() const { return g.empty() ? 0 : static_cast<int>(g[0].size()); }

    void validate() const {
        if (g.size() < 2) throw parse_error("family needs g0 and at least one mode (m >= 1)");
        const std::size_t n = g[0].size();
        if (n == 0) throw parse_error("family fields are empty");
        for (const auto& gi : g) {
            if (gi.size() != n) throw parse_error("family fields have inconsistent lengths");
            for (double v : gi)
                if (!std::isfinite(v)) throw parse_error("family contains a non-finite value");
        }
    }

    double value_at(int v, std::span<const double> a) const {
        double s = g[0][v];
        for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * g[i + 1][v];
        return s;
    }

    /// f_a componentwise. |a| must equal m.
    std::vector<double> evaluate(std::span<const double> a) const {
        if (static_cast<int>(a.size()) != mode_count())
            throw config_error("evaluate: parameter dimension mismatch");
        std::vector<double> out(g[0]);
        for (std::size_t i = 0; i < a.size(); ++i) {
            const double ai = a[i];
            const auto& gi = g[i + 1];
            for (std::size_t v = 0; v < out.size(); ++v) out[v] += ai * gi[v];
        }
        return out;
    }
};

/// Distribution of the parameter random variable: independent standard normal
/// components (the default) or a general Gaussian given by a mean vector and a
/// covariance factor L with Sigma = L L^T.
class ParameterDistribution {
public:
    static ParameterDistribution standard_normal(int m) {
        if (m < 1) throw config_error("distribution dimension must be >= 1");
        ParameterDistribution d;
        d.m_ = m;
        return d;
    }

    static ParameterDistribution gaussian(std::vector<double> mean,
                                          std::vector<std::vector<double>> factor) {
        ParameterDistribution d;
        d.m_ = static_cast<int>(mean.size());
        if (d.m_ < 1) throw config_error("distribution dimension must be >= 1");
        if (factor.size() != mean.size()) throw config_error("covariance factor has wrong row count");
        for (const auto& row : factor)
            if (row.size() != mean.size()) throw config_error("covariance factor is not square");
        // Full rank required.
        Eigen::MatrixXd L(d.m_, d.m_);
        for (int i = 0; i < d.m_; ++i)
            for (int j = 0; j < d.m_; ++j) L(i, j) = factor[i][j];
        Eigen::FullPivLU<Eigen::MatrixXd> lu(L);
        if (lu.rank() < d.m_) throw config_error("covariance factor is rank deficient");
        d.mean_ = std::move(mean);
        d.factor_ = std::move(factor);
        d.standard_ = false;
        return d;
    }

    int dim() const { return m_; }
    bool is_standard_normal() const { return standard_; }
    const std::vector<double>& mean() const { return mean_; }
    const std::vector<std::vector<double>>& factor() const { return factor_; }

    /// Draw one sample: out = mean + L z with z iid standard normal.
    void sample(RandomStream& rng, std::span<double> out) const {
        std::vector<double> z(m_);
        for (int i = 0; i < m_; ++i) z[i] = rng.gaussian();
        if (standard_) {
            std::copy(z.begin(), z.end(), out.begin());
            return;
        }
        for (int i = 0; i < m_; ++i) {
            double s = mean_[i];
            for (int j = 0; j < m_; ++j) s += factor_[i][j] * z[j];
            out[i] = s;
        }
    }

    /// 1D marginal helpers, valid for m == 1 (used by the analytic module).
    double pdf1(double a) const {
        require1();
        const double mu = standard_ ? 0.0 : mean_[0];
        const double sigma = standard_ ? 1.0 : std::abs(factor_[0][0]);
        const double z = (a - mu) / sigma;
        return std::exp(-0.5 * z * z) / (sigma * 2.5066282746310005024);
    }

    double cdf1(double a) const {
        require1();
        const double mu = standard_ ? 0.0 : mean_[0];
        const double sigma = standard_ ? 1.0 : std::abs(factor_[0][0]);
        return 0.5 * std::erfc(-(a - mu) / (sigma * 1.4142135623730950488));
    }

private:
    void require1() const {
        if (m_ != 1) throw config_error("1D density/CDF requested from a multi-dimensional distribution");
    }

    int m_ = 1;
    bool standard_ = true;
    std::vector<double> mean_;
    std::vector<std::vector<double>> factor_;
};

/// Standard normal pdf / cdf / quantile (Acklam's approximation polished with
/// one Halley step; good to ~1e-15).
inline double normal_pdf(double x) { return std::exp(-0.5 * x * x) / 2.5066282746310005024; }
inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / 1.4142135623730950488); }

inline double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) throw config_error("normal_quantile: p must be in (0,1)");
    static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
                               1.383577518672690e+02,  -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
                               6.680131188771972e+01,  -1.328068155288572e+01};
    static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
                               -2.549732539343734e+00, 4.374664141464968e+00,  2.938163982698783e+00};
    static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
                               3.754408661907416e+00};
    const double plow = 0.02425;
    double x;
    if (p < plow) {
        const double q = std::sqrt(-2.0 * std::log(p));
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    } else if (p <= 1.0 - plow) {
        const double q = p - 0.5, r = q * q;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    } else {
        const double q = std::sqrt(-2.0 * std::log(1.0 - p));
        x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    const double e = normal_cdf(x) - p;
    const double u = e * 2.5066282746310005024 * std::exp(0.5 * x * x);
    return x - u / (1.0 + 0.5 * x * u);
}

/// Deterministic batch of parameter samples. Generation is chunked (4096
/// samples per chunk, each chunk on its own derived sub-stream), so the batch
/// is reproducible independently of how work would be partitioned.
class SampleBatch {
public:
    static constexpr std::int64_t kChunk = 4096;

    static SampleBatch generate(const ParameterDistribution& dist, std::int64_t count,
                                std::uint64_t seed) {
        if (count < 1) throw config_error("sample count must be >= 1");
        SampleBatch b;
        b.m_ = dist.dim();
        b.count_ = count;
        b.seed_ = seed;
        b.data_.resize(static_cast<std::size_t>(count) * b.m_);
        for (std::int64_t c = 0; c * kChunk < count; ++c) {
            RandomStream rng(derive_stream_seed(seed, static_cast<std::uint64_t>(c)));
            const std::int64_t lo = c * kChunk;
            const std::int64_t hi = std::min(count, lo + kChunk);
            for (std::int64_t i = lo; i < hi; ++i)
                dist.sample(rng, std::span<double>(b.data_.data() + i * b.m_, b.m_));
        }
        return b;
    }

    int dim() const { return m_; }
    std::int64_t size() const { return count_; }
    std::uint64_t seed() const { return seed_; }
    std::span<const double> sample(std::int64_t i) const {
        return {data_.data() + i * m_, static_cast<std::size_t>(m_)};
    }

private:
    int m_ = 0;
    std::int64_t count_ = 0;
    std::uint64_t seed_ = 0;
    std::vector<double> data_;
};

/// Convenience wrapper matching the operation contract.
inline std::vector<std::vector<double>> sample_parameters(const ParameterDistribution& dist,
                                                          std::int64_t count, std::uint64_t seed) {
    SampleBatch b = SampleBatch::generate(dist, count, seed);
    std::vector<std::vector<double>> out(static_cast<std::size_t>(count));
    for (std::int64_t i = 0; i < count; ++i) {
        auto s = b.sample(i);
        out[static_cast<std::size_t>(i)].assign(s.begin(), s.end());
    }
    return out;
}

/// Result of the orthogonal-mode decomposition of an ensemble.
/// Modes are scaled by sigma_i / sqrt(r-1) so member coefficients are
/// standardized scores with unit sample variance; a standard-normal
/// ParameterDistribution is then the natural parameter model.
struct EofResult {
    LinearFamily family;
    std::vector<double> explained_variance;        // per retained mode
    std::vector<std::vector<double>> coefficients; // [mode][member], standardized
    std::vector<double> singular_values;           // all positive singular values
    int positive_rank = 0;
    bool rank_deficient = false;
};

/// Orthogonal decomposition of an ensemble (one member per row, n columns)
/// into mean field + m scaled modes. Optional per-vertex weights w apply the
/// inner product <u, v>_w = sum w_i u_i v_i (modes are returned unweighted).
inline EofResult eof_decompose(const std::vector<std::vector<double>>& ensemble, int m,
                               const std::vector<double>* weights = nullptr) {
    const int r = static_cast<int>(ensemble.size());
    if (r < 2) throw config_error("eof: need at least 2 ensemble members");
    const int n = static_cast<int>(ensemble[0].size());
    for (const auto& row : ensemble)
        if (static_cast<int>(row.size()) != n) throw parse_error("eof: ragged ensemble matrix");
    if (m < 1) throw config_error("eof: m must be >= 1");
    if (m > std::min(r - 1, n))
        throw config_error("eof: m = " + std::to_string(m) + " exceeds min(r-1, n) = " +
                           std::to_string(std::min(r - 1, n)));
    if (weights) {
        if (static_cast<int>(weights->size()) != n) throw config_error("eof: weight vector length mismatch");
        for (double w : *weights)
            if (!(w > 0.0)) throw config_error("eof: weights must be positive");
    }

    Eigen::MatrixXd X(r, n);
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < n; ++j) X(i, j) = ensemble[i][j];
    Eigen::RowVectorXd mean = X.colwise().mean();
    Eigen::MatrixXd Xc = X.rowwise() - mean;
    if (weights)
        for (int j = 0; j < n; ++j) Xc.col(j) *= std::sqrt((*weights)[j]);

    Eigen::JacobiSVD<Eigen::MatrixXd> svd(Xc, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    const double tol = sv.size() ? sv(0) * std::max(r, n) * 1e-14 : 0.0;
    int rank = 0;
    while (rank < sv.size() && sv(rank) > tol) ++rank;
    if (rank < m)
        throw numeric_error("eof: centered ensemble has rank " + std::to_string(rank) +
                            " (zero variance beyond that); cannot extract m = " + std::to_string(m) +
                            " modes");

    EofResult res;
    res.positive_rank = rank;
    res.rank_deficient = rank < std::min(r - 1, n);
    res.singular_values.assign(sv.data(), sv.data() + rank);
    double total_var = 0.0;
    for (int i = 0; i < rank; ++i) total_var += sv(i) * sv(i);

    res.family.g.resize(m + 1);
    res.family.g[0].assign(mean.data(), mean.data() + n);
    const double scale = std::sqrt(static_cast<double>(r - 1));
    for (int i = 0; i < m; ++i) {
        Eigen::VectorXd mode = svd.matrixV().col(i) * (sv(i) / scale);
        if (weights)
            for (int j = 0; j < n; ++j) mode(j) /= std::sqrt((*weights)[j]);
        res.family.g[i + 1].assign(mode.data(), mode.data() + n);
        res.explained_variance.push_back(sv(i) * sv(i) / total_var);
        Eigen::VectorXd coeff = svd.matrixU().col(i) * scale;
        res.coefficients.emplace_back(coeff.data(), coeff.data() + r);
    }
    res.family.validate();
    return res;
}

} // namespace uncrit

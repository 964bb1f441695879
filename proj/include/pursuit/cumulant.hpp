#ifndef PURSUIT_CUMULANT_HPP_INCLUDED
#define PURSUIT_CUMULANT_HPP_INCLUDED

// Sample cumulants of projected data and the Jones-Sibson moment index
//
//   I_n(h) = (n/6) B1(h)^2 + (n/24) B2(h)^2,
//
// where B1 = K3 / K2^{3/2} and B2 = K4 / K2^2 are the sample skewness and
// kurtosis of z_t = <x_t, h>.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "pursuit/direction.hpp"

namespace pursuit {

/// Raised when a sample has zero variance, so skewness and kurtosis are undefined.
class DegenerateSampleError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// n x q observations, row t is x_t. Requires n >= 5, q >= 2, finite entries.
class DataMatrix {
public:
    DataMatrix(std::size_t n, std::size_t q, std::vector<double> values)
        : n_(n), q_(q), values_(std::move(values))
    {
        if (n_ < 5)
            throw std::invalid_argument("DataMatrix: need at least 5 observations, got " + std::to_string(n_));
        if (q_ < 2)
            throw std::invalid_argument("DataMatrix: need at least 2 columns, got " + std::to_string(q_));
        if (values_.size() != n_ * q_)
            throw std::invalid_argument("DataMatrix: value count does not match n*q");
        if (!std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); }))
            throw std::invalid_argument("DataMatrix: non-finite entry");
    }

    std::size_t n() const { return n_; }
    std::size_t q() const { return q_; }
    std::span<double const> row(std::size_t t) const { return {values_.data() + t * q_, q_}; }
    double operator()(std::size_t t, std::size_t j) const { return values_[t * q_ + j]; }
    std::vector<double> const& values() const { return values_; }

private:
    std::size_t n_;
    std::size_t q_;
    std::vector<double> values_;
};

/// Which cumulant estimators feed the skewness and kurtosis.
enum class CumulantConvention {
    moments,      ///< k2 = m2, k3 = m3, k4 = m4 - 3 m2^2
    k_statistics  ///< Fisher's unbiased k-statistics
};

struct CumulantSet {
    double k2;
    double k3;
    double k4;
    double b1;
    double b2;
};

namespace detail {

// k2 = a2 m2, k3 = a3 m3, k4 = a4 m4 - c4 m2^2
struct CumulantWeights {
    double a2, a3, a4, c4;
};

inline CumulantWeights cumulant_weights(std::size_t n_obs, CumulantConvention conv)
{
    if (conv == CumulantConvention::moments)
        return {1.0, 1.0, 1.0, 3.0};
    if (n_obs < 4)
        throw std::invalid_argument("k-statistics need at least 4 observations");
    double const n = static_cast<double>(n_obs);
    double const d1 = n - 1.0, d2 = n - 2.0, d3 = n - 3.0;
    return {n / d1, n * n / (d1 * d2), n * n * (n + 1.0) / (d1 * d2 * d3), 3.0 * n * n / (d2 * d3)};
}

inline void require_spread(double m2, double scale)
{
    // m2 at the level of rounding noise relative to the data means a constant sample
    if (!(m2 > 1e-24 * std::max(scale, 1e-300)))
        throw DegenerateSampleError("degenerate sample: projected data has zero variance");
}

inline CumulantSet cumulants_from_moments(double m2, double m3, double m4, CumulantWeights const& w)
{
    double const k2 = w.a2 * m2;
    double const k3 = w.a3 * m3;
    double const k4 = w.a4 * m4 - w.c4 * m2 * m2;
    return {k2, k3, k4, k3 / std::pow(k2, 1.5), k4 / (k2 * k2)};
}

}  // namespace detail

/// z_t = <x_t, h>
inline std::vector<double> project(DataMatrix const& data, UnitDirection const& h)
{
    if (data.q() != h.q())
        throw std::invalid_argument("project: data has " + std::to_string(data.q())
                                    + " columns but direction has dimension " + std::to_string(h.q()));
    std::vector<double> z(data.n());
    for (std::size_t t = 0; t < data.n(); ++t)
        z[t] = dot(data.row(t), h.components());
    return z;
}

/// Central moments m_r = (1/n) sum (z_t - mean)^r, then cumulants, skewness, kurtosis.
inline CumulantSet sample_cumulants(std::span<double const> z,
                                    CumulantConvention conv = CumulantConvention::moments)
{
    std::size_t const n = z.size();
    if (n < 2)
        throw std::invalid_argument("sample_cumulants: need at least 2 observations");
    auto const w = detail::cumulant_weights(n, conv);

    double mean = 0.0, sq = 0.0;
    for (double v : z) {
        mean += v;
        sq += v * v;
    }
    mean /= static_cast<double>(n);
    sq /= static_cast<double>(n);

    double m2 = 0.0, m3 = 0.0, m4 = 0.0;
    for (double v : z) {
        double const d = v - mean;
        double const d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    m2 /= static_cast<double>(n);
    m3 /= static_cast<double>(n);
    m4 /= static_cast<double>(n);
    detail::require_spread(m2, sq);
    return detail::cumulants_from_moments(m2, m3, m4, w);
}

inline double index_from_cumulants(CumulantSet const& c, std::size_t n)
{
    double const nn = static_cast<double>(n);
    return nn / 6.0 * c.b1 * c.b1 + nn / 24.0 * c.b2 * c.b2;
}

/// I_n(h), computed directly from the projected sample.
inline double moment_index(DataMatrix const& data, UnitDirection const& h,
                           CumulantConvention conv = CumulantConvention::moments)
{
    auto const z = project(data, h);
    return index_from_cumulants(sample_cumulants(z, conv), data.n());
}

/// Central moment tensors of the data up to order four, so that
/// m_r(h) = M_r[h, ..., h] is a polynomial in h. Row-major layout.
class MomentTensors {
public:
    explicit MomentTensors(DataMatrix const& data) : n_(data.n()), q_(data.q())
    {
        std::size_t const q = q_;
        mean_.assign(q, 0.0);
        for (std::size_t t = 0; t < n_; ++t)
            for (std::size_t j = 0; j < q; ++j)
                mean_[j] += data(t, j);
        for (auto& m : mean_)
            m /= static_cast<double>(n_);

        m2_.assign(q * q, 0.0);
        m3_.assign(q * q * q, 0.0);
        m4_.assign(q * q * q * q, 0.0);
        std::vector<double> d(q);
        for (std::size_t t = 0; t < n_; ++t) {
            for (std::size_t j = 0; j < q; ++j)
                d[j] = data(t, j) - mean_[j];
            for (std::size_t i = 0; i < q; ++i) {
                for (std::size_t j = 0; j < q; ++j) {
                    double const dij = d[i] * d[j];
                    m2_[i * q + j] += dij;
                    for (std::size_t k = 0; k < q; ++k) {
                        double const dijk = dij * d[k];
                        std::size_t const ijk = (i * q + j) * q + k;
                        m3_[ijk] += dijk;
                        double* row = &m4_[ijk * q];
                        for (std::size_t l = 0; l < q; ++l)
                            row[l] += dijk * d[l];
                    }
                }
            }
        }
        double const inv = 1.0 / static_cast<double>(n_);
        for (auto& v : m2_) v *= inv;
        for (auto& v : m3_) v *= inv;
        for (auto& v : m4_) v *= inv;

        // scale reference for the degeneracy test: largest raw second moment
        for (std::size_t j = 0; j < q; ++j)
            scale_ = std::max(scale_, m2_[j * q + j] + mean_[j] * mean_[j]);
    }

    std::size_t n() const { return n_; }
    std::size_t q() const { return q_; }
    double scale() const { return scale_; }

    /// Throws DegenerateSampleError when the sample covariance is (numerically) singular.
    void require_full_rank() const
    {
        std::size_t const q = q_;
        double top = 0.0;
        for (std::size_t j = 0; j < q; ++j)
            top = std::max(top, m2_[j * q + j]);
        std::vector<double> a = m2_;
        for (std::size_t c = 0; c < q; ++c) {
            double piv = a[c * q + c];
            for (std::size_t k = 0; k < c; ++k)
                piv -= a[c * q + k] * a[c * q + k];
            if (!(piv > 1e-12 * top))
                throw DegenerateSampleError("degenerate sample: observations lie in a proper affine subspace");
            double const root = std::sqrt(piv);
            a[c * q + c] = root;
            for (std::size_t r = c + 1; r < q; ++r) {
                double v = a[r * q + c];
                for (std::size_t k = 0; k < c; ++k)
                    v -= a[r * q + k] * a[c * q + k];
                a[r * q + c] = v / root;
            }
        }
    }

    struct Moments {
        double m2, m3, m4;
        std::vector<double> grad2, grad3, grad4;  // gradients in h, filled on request
    };

    Moments moments(UnitDirection const& h, bool with_gradient) const
    {
        if (h.q() != q_)
            throw std::invalid_argument("MomentTensors: direction dimension mismatch");
        std::size_t const q = q_;
        // v2[i] = M2[i,.] h, v3[i] = M3[i,.,.] h h, v4[i] = M4[i,.,.,.] h h h
        std::vector<double> v2(q, 0.0), v3(q, 0.0), v4(q, 0.0);
        for (std::size_t i = 0; i < q; ++i) {
            double s2 = 0.0, s3 = 0.0, s4 = 0.0;
            for (std::size_t j = 0; j < q; ++j) {
                s2 += m2_[i * q + j] * h[j];
                double t3 = 0.0, t4 = 0.0;
                for (std::size_t k = 0; k < q; ++k) {
                    std::size_t const ijk = (i * q + j) * q + k;
                    t3 += m3_[ijk] * h[k];
                    double const* row = &m4_[ijk * q];
                    double t4l = 0.0;
                    for (std::size_t l = 0; l < q; ++l)
                        t4l += row[l] * h[l];
                    t4 += t4l * h[k];
                }
                s3 += t3 * h[j];
                s4 += t4 * h[j];
            }
            v2[i] = s2;
            v3[i] = s3;
            v4[i] = s4;
        }
        Moments out{dot(v2, h.components()), dot(v3, h.components()), dot(v4, h.components()), {}, {}, {}};
        if (with_gradient) {
            // the tensors are symmetric, so d/dh M_r[h^r] = r M_r[h^{r-1}, .]
            out.grad2.resize(q);
            out.grad3.resize(q);
            out.grad4.resize(q);
            for (std::size_t i = 0; i < q; ++i) {
                out.grad2[i] = 2.0 * v2[i];
                out.grad3[i] = 3.0 * v3[i];
                out.grad4[i] = 4.0 * v4[i];
            }
        }
        return out;
    }

private:
    std::size_t n_;
    std::size_t q_;
    double scale_ = 0.0;
    std::vector<double> mean_;
    std::vector<double> m2_, m3_, m4_;
};

/// I_n(.) backed by precomputed moment tensors; each evaluation is O(q^4), independent of n.
class MomentIndex {
public:
    explicit MomentIndex(DataMatrix const& data, CumulantConvention conv = CumulantConvention::moments)
        : tensors_(data), weights_(detail::cumulant_weights(data.n(), conv))
    {
        tensors_.require_full_rank();
    }

    std::size_t q() const { return tensors_.q(); }
    std::size_t n() const { return tensors_.n(); }

    CumulantSet cumulants(UnitDirection const& h) const
    {
        auto const m = tensors_.moments(h, false);
        detail::require_spread(m.m2, tensors_.scale());
        return detail::cumulants_from_moments(m.m2, m.m3, m.m4, weights_);
    }

    double value(UnitDirection const& h) const { return index_from_cumulants(cumulants(h), n()); }

    /// Tangent-space gradient (I - h h') grad I_n(h).
    std::vector<double> gradient(UnitDirection const& h) const
    {
        auto const m = tensors_.moments(h, true);
        detail::require_spread(m.m2, tensors_.scale());
        auto const& w = weights_;
        auto const c = detail::cumulants_from_moments(m.m2, m.m3, m.m4, w);
        double const nn = static_cast<double>(n());
        double const k2 = c.k2;

        std::vector<double> g(q());
        for (std::size_t i = 0; i < q(); ++i) {
            double const dk2 = w.a2 * m.grad2[i];
            double const dk3 = w.a3 * m.grad3[i];
            double const dk4 = w.a4 * m.grad4[i] - 2.0 * w.c4 * m.m2 * m.grad2[i];
            double const db1 = dk3 / std::pow(k2, 1.5) - 1.5 * c.k3 * std::pow(k2, -2.5) * dk2;
            double const db2 = dk4 / (k2 * k2) - 2.0 * c.k4 / (k2 * k2 * k2) * dk2;
            g[i] = nn / 3.0 * c.b1 * db1 + nn / 12.0 * c.b2 * db2;
        }
        return tangent_projection(h, g);
    }

private:
    MomentTensors tensors_;
    detail::CumulantWeights weights_;
};

/// Tangent-space gradient of I_n at h.
inline std::vector<double> moment_index_gradient(DataMatrix const& data, UnitDirection const& h,
                                                 CumulantConvention conv = CumulantConvention::moments)
{
    if (data.q() != h.q())
        throw std::invalid_argument("moment_index_gradient: dimension mismatch");
    return MomentIndex(data, conv).gradient(h);
}

}  // namespace pursuit

#endif  // PURSUIT_CUMULANT_HPP_INCLUDED

#include "idiobot/stats.hpp"

#include <boost/math/distributions/students_t.hpp>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace idiobot {

double mean(std::span<const double> xs) {
    if (xs.empty()) throw std::invalid_argument("mean of an empty sample");
    return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

double sample_variance(std::span<const double> xs) {
    if (xs.size() < 2) throw std::invalid_argument("variance needs at least two values");
    const double m = mean(xs);
    double ss = 0.0;
    for (double x : xs) ss += (x - m) * (x - m);
    return ss / static_cast<double>(xs.size() - 1);
}

double t_test_one_tailed(std::span<const double> a, std::span<const double> b) {
    if (a.size() < 2 || b.size() < 2) throw std::invalid_argument("t-test needs two values per sample");
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    const double ma = mean(a), mb = mean(b);
    const double qa = sample_variance(a) / na;
    const double qb = sample_variance(b) / nb;
    if (!std::isfinite(qa) || !std::isfinite(qb)) throw std::invalid_argument("t-test on non-finite data");

    const double se2 = qa + qb;
    if (se2 == 0.0) {
        if (ma == mb) return 50.0;
        return ma < mb ? 100.0 : 0.0;
    }
    const double t = (mb - ma) / std::sqrt(se2);
    const double df = se2 * se2 / (qa * qa / (na - 1.0) + qb * qb / (nb - 1.0));
    const boost::math::students_t dist(df);
    return 100.0 * boost::math::cdf(dist, t);
}

}  // namespace idiobot

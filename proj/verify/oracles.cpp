#include "oracles.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <random>

namespace idiobot::oracle {
namespace {

std::size_t first_max(const std::vector<double>& v) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < v.size(); ++i) {
        if (v[i] > v[best]) best = i;
    }
    return best;
}

bool presents(const NetworkInput& in, std::size_t j) {
    return std::find(in.presenting.begin(), in.presenting.end(), j) != in.presenting.end();
}

}  // namespace

NetworkOutput direct_step(const NetworkInput& in) {
    const std::size_t n = in.paratope.rows();
    const std::size_t l = in.paratope.cols();
    const Matrix& P = in.paratope;
    const Matrix& I = in.idiotope;

    // Antigen array and U.
    Matrix U(n, l, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < l; ++j) {
            double g = 0.0;
            if (presents(in, j)) {
                if (in.dominant && j == *in.dominant) {
                    g = P(i, j) > 0.0 ? 2.0 : 0.0;
                } else {
                    g = 0.25;
                }
            }
            U(i, j) = P(i, j) * g;
        }
    }
    std::vector<double> s1(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < l; ++j) s1[i] += U(i, j);
    }

    NetworkOutput out;
    out.alpha = first_max(s1);
    if (!(s1[out.alpha] > 0.0)) out.alpha = 0;
    const std::size_t a = out.alpha;

    std::vector<double> H(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        if (i == a) continue;
        for (std::size_t j : in.presenting) {
            if (P(i, j) != 0.0) H[i] = 1.0;
        }
    }

    Matrix V(n, l, 0.0), W(n, l, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t m = 0; m < l; ++m) {
            V(i, m) = P(a, m) * I(i, m) * H[i];
            W(i, m) = (1.0 - P(i, m)) * I(a, m) * H[i];
        }
    }

    out.s2.assign(n, 0.0);
    out.s3.assign(n, 0.0);
    out.sg.assign(n, 0.0);
    out.c_raw.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        double v = 0.0, w = 0.0;
        for (std::size_t m = 0; m < l; ++m) {
            v += V(i, m);
            w += W(i, m);
        }
        const double cc = in.c[i] * in.c[a];
        out.s2[i] = v * cc;
        out.s3[i] = w * cc;
        out.sg[i] = s1[i] - in.k1 * out.s2[i] + out.s3[i];
        out.c_raw[i] = std::max(in.floor, in.c[i] + in.b * out.sg[i] - in.k2 * in.c[i]);
    }

    const double total = std::accumulate(out.c_raw.begin(), out.c_raw.end(), 0.0);
    const double target = in.unit_sum ? 1.0 : static_cast<double>(n);
    out.c_norm.resize(n);
    for (std::size_t i = 0; i < n; ++i) out.c_norm[i] = out.c_raw[i] * target / total;
    out.beta = first_max(out.c_norm);
    return out;
}

NetworkInput random_instance(std::uint64_t seed, std::size_t max_n, std::size_t max_l) {
    std::mt19937_64 gen(seed);
    auto uni = [&](double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(gen); };
    auto pick = [&](std::size_t lo, std::size_t hi) {
        return std::uniform_int_distribution<std::size_t>(lo, hi)(gen);
    };

    NetworkInput in;
    const std::size_t n = pick(2, max_n);
    const std::size_t l = pick(1, max_l);
    in.paratope = Matrix(n, l);
    in.idiotope = Matrix(n, l);
    static constexpr std::array<double, 3> kIdiotopeValues = {0.0, 0.5, 1.0};
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < l; ++j) {
            in.paratope(i, j) = uni(0.0, 1.0) < 0.15 ? 0.0 : uni(0.0, 2.0);
            in.idiotope(i, j) = kIdiotopeValues[pick(0, 2)];
        }
    }
    in.c.resize(n);
    for (double& c : in.c) c = uni(0.05, 3.0);

    for (std::size_t j = 0; j < l; ++j) {
        if (uni(0.0, 1.0) < 0.6) in.presenting.push_back(j);
    }
    if (!in.presenting.empty()) in.dominant = in.presenting[pick(0, in.presenting.size() - 1)];
    in.b = uni(1.0, 160.0);
    in.k1 = uni(0.3, 1.0);
    in.k2 = uni(0.0, 0.2);
    return in;
}

double ray_cast(Vec2 origin, Vec2 dir, std::span<const Segment> segments, double max_range) {
    double best = max_range;
    for (const Segment& s : segments) {
        // origin + t * dir = s.a + u * (s.b - s.a)
        const double ex = s.b.x - s.a.x, ey = s.b.y - s.a.y;
        const double det = dir.x * (-ey) - dir.y * (-ex);
        const double rx = s.a.x - origin.x, ry = s.a.y - origin.y;
        if (det == 0.0) {
            // Parallel: only a collinear overlap can be hit, at its nearest end.
            if (rx * dir.y - ry * dir.x != 0.0) continue;
            for (Vec2 p : {s.a, s.b}) {
                const double t = (p.x - origin.x) * dir.x + (p.y - origin.y) * dir.y;
                if (t >= 0.0) best = std::min(best, t);
            }
            const double ta = (s.a.x - origin.x) * dir.x + (s.a.y - origin.y) * dir.y;
            const double tb = (s.b.x - origin.x) * dir.x + (s.b.y - origin.y) * dir.y;
            if ((ta <= 0.0 && tb >= 0.0) || (tb <= 0.0 && ta >= 0.0)) best = 0.0;
            continue;
        }
        const double t = (rx * (-ey) - ry * (-ex)) / det;
        const double u = (dir.x * ry - dir.y * rx) / det;
        if (t >= 0.0 && u >= 0.0 && u <= 1.0) best = std::min(best, t);
    }
    return best;
}

double ray_march(Vec2 origin, Vec2 dir, std::span<const Segment> segments, double max_range, double tol) {
    auto side = [](const Segment& s, Vec2 p) {
        return (s.b.x - s.a.x) * (p.y - s.a.y) - (s.b.y - s.a.y) * (p.x - s.a.x);
    };
    auto crossed = [&](double t0, double t1) {
        const Vec2 p0{origin.x + dir.x * t0, origin.y + dir.y * t0};
        const Vec2 p1{origin.x + dir.x * t1, origin.y + dir.y * t1};
        for (const Segment& s : segments) {
            const double a = side(s, p0), b = side(s, p1);
            if ((a > 0.0 && b > 0.0) || (a < 0.0 && b < 0.0)) continue;
            const Segment path{p0, p1};
            const double c = side(path, s.a), d = side(path, s.b);
            if ((c > 0.0 && d > 0.0) || (c < 0.0 && d < 0.0)) continue;
            return true;
        }
        return false;
    };
    const double step = 1e-3;
    for (double t = 0.0; t < max_range; t += step) {
        const double t1 = std::min(t + step, max_range);
        if (!crossed(t, t1)) continue;
        double lo = t, hi = t1;
        while (hi - lo > tol) {
            const double mid = 0.5 * (lo + hi);
            if (crossed(lo, mid)) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        return hi;
    }
    return max_range;
}

double welch_t(std::span<const double> a, std::span<const double> b) {
    auto moments = [](std::span<const double> x) {
        double m = 0.0;
        for (double v : x) m += v;
        m /= static_cast<double>(x.size());
        double ss = 0.0;
        for (double v : x) ss += (v - m) * (v - m);
        return std::pair{m, ss / static_cast<double>(x.size() - 1)};
    };
    const auto [ma, va] = moments(a);
    const auto [mb, vb] = moments(b);
    return (mb - ma) / std::sqrt(va / static_cast<double>(a.size()) + vb / static_cast<double>(b.size()));
}

double permutation_level(std::span<const double> a, std::span<const double> b, std::size_t resamples,
                         std::uint64_t seed) {
    const double observed = welch_t(a, b);
    std::vector<double> pooled(a.begin(), a.end());
    pooled.insert(pooled.end(), b.begin(), b.end());
    std::mt19937_64 gen(seed);
    std::size_t at_least = 0;
    for (std::size_t r = 0; r < resamples; ++r) {
        std::shuffle(pooled.begin(), pooled.end(), gen);
        const std::span<const double> all(pooled);
        if (welch_t(all.first(a.size()), all.subspan(a.size())) >= observed) ++at_least;
    }
    const double p = static_cast<double>(at_least) / static_cast<double>(resamples);
    return (1.0 - p) * 100.0;
}

namespace {

constexpr std::array<PublishedRow, 10> kPublishedM1 = {{
    {"id", 218, 21, 180},
    {"r1", 414, 62, 419},
    {"r2", 317, 39, 293},
    {"r3", 295, 55, 335},
    {"r4", 290, 45, 298},
    {"r5", 296, 43, 296},
    {"r6", 313, 54, 342},
    {"r7", 302, 42, 296},
    {"r8", 259, 39, 263},
    {"r9", 293, 48, 312},
}};

}  // namespace

std::span<const PublishedRow> published_m1() { return kPublishedM1; }

double published_phi() {
    // Every system ran the same number of times, so the grand means are the
    // means of the per-system means.
    double t = 0.0, s = 0.0;
    for (const PublishedRow& r : kPublishedM1) {
        t += r.T;
        s += r.sigma;
    }
    return t / s;
}

double published_fitness(double T, double sigma, double phi) { return 0.5 * (T + phi * sigma); }

}  // namespace idiobot::oracle

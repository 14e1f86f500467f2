#include "uavcomp/geometry.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <map>
#include <numbers>
#include <ostream>
#include <sstream>

#include "uavcomp/error.hpp"

namespace uavcomp {

double HeightLaw::sample(Engine& rng) const {
    if (degenerate()) return h_min;
    return std::uniform_real_distribution<double>(h_min, h_max)(rng);
}

void validate(const HeightLaw& law, const HeightLimits& limits) {
    if (!std::isfinite(law.h_min) || !std::isfinite(law.h_max)) throw ConfigError("height", "non-finite bound");
    if (law.kind == HeightLaw::Kind::fixed && law.h_min != law.h_max)
        throw ConfigError("height", "fixed law needs h_min == h_max");
    if (law.h_min > law.h_max) throw ConfigError("height.min_m", "exceeds height.max_m");
    if (law.h_min <= 0.0) throw ConfigError("height.min_m", "must be positive");
    if (law.h_min < limits.lo || law.h_max > limits.hi)
        throw ConfigError("height", "outside the admissible band [" + std::to_string(limits.lo) + ", " +
                                        std::to_string(limits.hi) + "] m");
}

std::vector<double> sample_heights(std::size_t n, const HeightLaw& law, Engine& rng) {
    std::vector<double> h(n);
    for (auto& v : h) v = law.sample(rng);
    return h;
}

void validate(const DeploymentSpec& spec) {
    if (!(spec.density > 0.0) || !std::isfinite(spec.density)) throw ConfigError("density", "must be positive");
    if (!(spec.region_radius > 0.0) || !std::isfinite(spec.region_radius))
        throw ConfigError("region_radius_m", "must be positive");
    if (!(spec.margin >= 1.0)) throw ConfigError("margin", "must be at least 1");
    validate(spec.heights, spec.limits);
}

Deployment sample_deployment(const DeploymentSpec& spec, Engine& rng) {
    const double radius = spec.region_radius * spec.margin;
    const double mean = spec.density * std::numbers::pi * radius * radius;
    std::poisson_distribution<long> count(mean);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    Deployment dep;
    dep.sampling_radius = radius;
    dep.density = spec.density;
    for (int attempt = 0;; ++attempt) {
        if (attempt > spec.max_resamples)
            throw InsufficientDeploymentError("deployment: density too low for the serving set");
        const long n = count(rng);
        if (n < static_cast<long>(spec.min_count)) {
            ++dep.resamples;
            continue;
        }
        dep.planar.resize(n, 2);
        dep.heights.resize(n);
        for (long i = 0; i < n; ++i) {
            const double r = radius * std::sqrt(unit(rng));
            const double phi = 2.0 * std::numbers::pi * unit(rng);
            dep.planar(i, 0) = r * std::cos(phi);
            dep.planar(i, 1) = r * std::sin(phi);
            dep.heights(i) = spec.heights.sample(rng);
        }
        return dep;
    }
}

Deployment sample_deployment(const DeploymentSpec& spec, std::uint64_t seed) {
    validate(spec);
    Engine rng = make_engine(seed, stream::deployment);
    Deployment dep = sample_deployment(spec, rng);
    dep.seed = seed;
    return dep;
}

std::vector<Eigen::Index> nearest_uavs(const Deployment& dep, const Eigen::Vector2d& ue, std::size_t k,
                                       DistanceMode mode) {
    if (static_cast<std::size_t>(dep.size()) < k)
        throw InsufficientDeploymentError("fewer UAVs than the requested serving set");
    std::vector<std::pair<double, Eigen::Index>> keyed(dep.size());
    for (Eigen::Index i = 0; i < dep.size(); ++i) {
        double d2 = (dep.planar.row(i).transpose() - ue).squaredNorm();
        if (mode == DistanceMode::slant) d2 += dep.heights(i) * dep.heights(i);
        keyed[i] = {d2, i};
    }
    std::partial_sort(keyed.begin(), keyed.begin() + k, keyed.end());
    std::vector<Eigen::Index> out(k);
    for (std::size_t j = 0; j < k; ++j) out[j] = keyed[j].second;
    return out;
}

CompSet select_comp_set(const Deployment& dep, const Eigen::Vector2d& ue, DistanceMode mode) {
    const auto idx = nearest_uavs(dep, ue, 4, mode);
    CompSet cs;
    cs.mode = mode;
    for (int j = 0; j < 4; ++j) {
        cs.indices[j] = idx[j];
        double d2 = (dep.planar.row(idx[j]).transpose() - ue).squaredNorm();
        if (mode == DistanceMode::slant) d2 += dep.heights(idx[j]) * dep.heights(idx[j]);
        cs.distances[j] = std::sqrt(d2);
    }
    return cs;
}

// ---- predicates -----------------------------------------------------------

namespace {

#if defined(__SIZEOF_FLOAT128__)
using Wide = __float128;
#else
using Wide = long double;
#endif

constexpr double kEps = std::numeric_limits<double>::epsilon() * 0.5;

template <class T>
int sign_of(T v) {
    return (v > T(0)) - (v < T(0));
}

}  // namespace

int orientation(const Eigen::Vector2d& a, const Eigen::Vector2d& b, const Eigen::Vector2d& c) {
    const double l = (b.x() - a.x()) * (c.y() - a.y());
    const double r = (b.y() - a.y()) * (c.x() - a.x());
    const double det = l - r;
    const double bound = (3.0 + 16.0 * kEps) * kEps * (std::abs(l) + std::abs(r));
    if (std::abs(det) > bound) return sign_of(det);
    const Wide wl = (Wide(b.x()) - Wide(a.x())) * (Wide(c.y()) - Wide(a.y()));
    const Wide wr = (Wide(b.y()) - Wide(a.y())) * (Wide(c.x()) - Wide(a.x()));
    return sign_of(wl - wr);
}

int incircle(const Eigen::Vector2d& a, const Eigen::Vector2d& b, const Eigen::Vector2d& c,
             const Eigen::Vector2d& d) {
    const double adx = a.x() - d.x(), ady = a.y() - d.y();
    const double bdx = b.x() - d.x(), bdy = b.y() - d.y();
    const double cdx = c.x() - d.x(), cdy = c.y() - d.y();
    const double alift = adx * adx + ady * ady;
    const double blift = bdx * bdx + bdy * bdy;
    const double clift = cdx * cdx + cdy * cdy;
    const double bc = bdx * cdy - bdy * cdx;
    const double ca = cdx * ady - cdy * adx;
    const double ab = adx * bdy - ady * bdx;
    const double det = alift * bc + blift * ca + clift * ab;
    const double permanent = alift * (std::abs(bdx * cdy) + std::abs(bdy * cdx)) +
                             blift * (std::abs(cdx * ady) + std::abs(cdy * adx)) +
                             clift * (std::abs(adx * bdy) + std::abs(ady * bdx));
    const double bound = (10.0 + 96.0 * kEps) * kEps * permanent;
    if (std::abs(det) > bound) return sign_of(det);

    const Wide wadx = Wide(a.x()) - Wide(d.x()), wady = Wide(a.y()) - Wide(d.y());
    const Wide wbdx = Wide(b.x()) - Wide(d.x()), wbdy = Wide(b.y()) - Wide(d.y());
    const Wide wcdx = Wide(c.x()) - Wide(d.x()), wcdy = Wide(c.y()) - Wide(d.y());
    const Wide w = (wadx * wadx + wady * wady) * (wbdx * wcdy - wbdy * wcdx) +
                   (wbdx * wbdx + wbdy * wbdy) * (wcdx * wady - wcdy * wadx) +
                   (wcdx * wcdx + wcdy * wcdy) * (wadx * wbdy - wady * wbdx);
    return sign_of(w);
}

// ---- Bowyer-Watson --------------------------------------------------------

namespace {

using Tri = std::array<int, 3>;

void check_input(const Eigen::MatrixX2d& pts) {
    const Eigen::Index n = pts.rows();
    if (n < 3) throw DegenerateInputError("delaunay: need at least three points");
    if (!pts.allFinite()) throw DegenerateInputError("delaunay: non-finite coordinate");
    const Eigen::Vector2d lo = pts.colwise().minCoeff();
    const Eigen::Vector2d hi = pts.colwise().maxCoeff();
    const double diag2 = (hi - lo).squaredNorm();
    const double eps_geo = 1e-9 * diag2;

    std::vector<Eigen::Index> order(n);
    for (Eigen::Index i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
        return pts(a, 0) < pts(b, 0) || (pts(a, 0) == pts(b, 0) && pts(a, 1) < pts(b, 1));
    });
    const double tol = std::sqrt(eps_geo);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = i + 1; j < n && pts(order[j], 0) - pts(order[i], 0) <= tol; ++j) {
            if ((pts.row(order[i]) - pts.row(order[j])).squaredNorm() <= eps_geo)
                throw DegenerateInputError("delaunay: duplicate points " + std::to_string(order[i]) + " and " +
                                           std::to_string(order[j]));
        }
    }
    // Collinearity: every point within eps of the line through the two farthest-apart extremes.
    const Eigen::Vector2d p0 = pts.row(order.front());
    const Eigen::Vector2d p1 = pts.row(order.back());
    const Eigen::Vector2d dir = p1 - p0;
    double worst = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        const Eigen::Vector2d v = pts.row(i).transpose() - p0;
        worst = std::max(worst, std::abs(dir.x() * v.y() - dir.y() * v.x()));
    }
    if (worst <= eps_geo) throw DegenerateInputError("delaunay: all points collinear");
}

struct Mesh {
    std::vector<Eigen::Vector2d> v;
    std::vector<Tri> t;
    std::vector<char> alive;
};

std::uint64_t edge_key(int a, int b) {
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 32) | static_cast<std::uint32_t>(b);
}

// Close concave notches along the boundary left behind by super-triangle removal.
void fill_pockets(std::vector<Tri>& tris, const std::vector<Eigen::Vector2d>& v) {
    for (bool changed = true; changed;) {
        changed = false;
        std::map<std::uint64_t, int> directed;
        for (const Tri& t : tris)
            for (int e = 0; e < 3; ++e) directed[edge_key(t[e], t[(e + 1) % 3])] = 1;
        std::map<int, int> next;  // boundary edge u -> w
        for (const Tri& t : tris)
            for (int e = 0; e < 3; ++e) {
                const int a = t[e], b = t[(e + 1) % 3];
                if (!directed.count(edge_key(b, a))) next[a] = b;
            }
        for (const auto& [u, w] : next) {
            auto it = next.find(w);
            if (it == next.end()) continue;
            const int x = it->second;
            if (x == u) continue;
            if (orientation(v[u], v[w], v[x]) >= 0) continue;
            // Candidate (u, x, w) is counter-clockwise; it must not swallow another vertex.
            bool empty = true;
            for (std::size_t p = 0; p < v.size() && empty; ++p) {
                const int q = static_cast<int>(p);
                if (q == u || q == w || q == x) continue;
                if (orientation(v[u], v[x], v[q]) > 0 && orientation(v[x], v[w], v[q]) > 0 &&
                    orientation(v[w], v[u], v[q]) > 0)
                    empty = false;
            }
            if (!empty) continue;
            tris.push_back({u, x, w});
            changed = true;
            break;
        }
    }
}

// Lawson flips until every interior edge is locally Delaunay.
void legalize(std::vector<Tri>& tris, const std::vector<Eigen::Vector2d>& v) {
    for (int pass = 0; pass < 1000; ++pass) {
        std::map<std::uint64_t, std::pair<int, int>> owner;  // directed edge -> (triangle, slot)
        for (int i = 0; i < static_cast<int>(tris.size()); ++i)
            for (int e = 0; e < 3; ++e) owner[edge_key(tris[i][e], tris[i][(e + 1) % 3])] = {i, e};
        bool flipped = false;
        std::vector<char> touched(tris.size(), 0);
        for (const auto& [key, te] : owner) {
            const auto [ti, e] = te;
            if (touched[ti]) continue;
            const int a = tris[ti][e], b = tris[ti][(e + 1) % 3], c = tris[ti][(e + 2) % 3];
            auto twin = owner.find(edge_key(b, a));
            if (twin == owner.end()) continue;
            const auto [tj, f] = twin->second;
            if (touched[tj]) continue;
            const int d = tris[tj][(f + 2) % 3];
            if (incircle(v[a], v[b], v[c], v[d]) <= 0) continue;
            if (orientation(v[c], v[d], v[a]) * orientation(v[c], v[d], v[b]) >= 0) continue;
            tris[ti] = {a, d, c};
            tris[tj] = {d, b, c};
            touched[ti] = touched[tj] = 1;
            flipped = true;
        }
        if (!flipped) return;
    }
    throw NumericError("delaunay: edge flipping did not terminate");
}

}  // namespace

Triangulation delaunay(const Eigen::MatrixX2d& pts) {
    check_input(pts);
    const int n = static_cast<int>(pts.rows());
    Mesh m;
    m.v.reserve(n + 3);
    for (int i = 0; i < n; ++i) m.v.emplace_back(pts(i, 0), pts(i, 1));
    const Eigen::Vector2d lo = pts.colwise().minCoeff();
    const Eigen::Vector2d hi = pts.colwise().maxCoeff();
    const Eigen::Vector2d mid = 0.5 * (lo + hi);
    const double span = std::max((hi - lo).maxCoeff(), 1e-12);
    const double k = 100.0 * span;
    m.v.emplace_back(mid.x() - k, mid.y() - k);
    m.v.emplace_back(mid.x() + k, mid.y() - k);
    m.v.emplace_back(mid.x(), mid.y() + k);
    m.t.push_back({n, n + 1, n + 2});
    m.alive.push_back(1);

    std::vector<int> bad;
    std::map<std::uint64_t, int> edge_count;
    for (int p = 0; p < n; ++p) {
        bad.clear();
        for (int i = 0; i < static_cast<int>(m.t.size()); ++i) {
            if (!m.alive[i]) continue;
            const Tri& t = m.t[i];
            if (incircle(m.v[t[0]], m.v[t[1]], m.v[t[2]], m.v[p]) > 0) bad.push_back(i);
        }
        if (bad.empty()) {
            // A point exactly on circumcircles only: split the containing triangle instead.
            for (int i = 0; i < static_cast<int>(m.t.size()); ++i) {
                if (!m.alive[i]) continue;
                const Tri& t = m.t[i];
                if (orientation(m.v[t[0]], m.v[t[1]], m.v[p]) >= 0 &&
                    orientation(m.v[t[1]], m.v[t[2]], m.v[p]) >= 0 &&
                    orientation(m.v[t[2]], m.v[t[0]], m.v[p]) >= 0) {
                    bad.push_back(i);
                    break;
                }
            }
        }
        edge_count.clear();
        for (int i : bad) {
            const Tri& t = m.t[i];
            for (int e = 0; e < 3; ++e) {
                const int a = std::min(t[e], t[(e + 1) % 3]), b = std::max(t[e], t[(e + 1) % 3]);
                ++edge_count[edge_key(a, b)];
            }
        }
        std::vector<std::pair<int, int>> rim;
        for (int i : bad) {
            const Tri& t = m.t[i];
            for (int e = 0; e < 3; ++e) {
                const int a = t[e], b = t[(e + 1) % 3];
                if (edge_count[edge_key(std::min(a, b), std::max(a, b))] == 1) rim.emplace_back(a, b);
            }
            m.alive[i] = 0;
        }
        for (const auto& [a, b] : rim) {
            // Rim edges keep the orientation of the removed triangle, so (a, b, p) is CCW
            // unless p is collinear with the edge; skip those slivers.
            if (orientation(m.v[a], m.v[b], m.v[p]) <= 0) continue;
            m.t.push_back({a, b, p});
            m.alive.push_back(1);
        }
    }

    std::vector<Tri> tris;
    for (std::size_t i = 0; i < m.t.size(); ++i) {
        if (!m.alive[i]) continue;
        const Tri& t = m.t[i];
        if (t[0] >= n || t[1] >= n || t[2] >= n) continue;
        tris.push_back(t);
    }
    m.v.resize(n);
    fill_pockets(tris, m.v);
    legalize(tris, m.v);
    std::sort(tris.begin(), tris.end());
    return Triangulation{std::move(tris)};
}

std::array<Eigen::Vector3d, 4> formation_target(const Deployment& dep, const Triangulation& tri,
                                                const HeightLaw& law, Engine& rng) {
    if (tri.triangles.empty()) throw DegenerateInputError("formation_target: empty triangulation");
    std::uniform_int_distribution<std::size_t> pick(0, tri.triangles.size() - 1);
    const auto& t = tri.triangles[pick(rng)];
    std::array<Eigen::Vector3d, 4> out;
    Eigen::Vector2d centroid = Eigen::Vector2d::Zero();
    for (int j = 0; j < 3; ++j) {
        out[j] = dep.position(t[j]);
        centroid += dep.planar.row(t[j]).transpose() / 3.0;
    }
    out[3] = {centroid.x(), centroid.y(), law.sample(rng)};
    return out;
}

// ---- CSV ------------------------------------------------------------------

void write_deployment_csv(std::ostream& os, const Deployment& dep) {
    os << "id,x_m,y_m,h_m\n";
    char buf[128];
    for (Eigen::Index i = 0; i < dep.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%ld,%.17g,%.17g,%.17g\n", static_cast<long>(i), dep.planar(i, 0),
                      dep.planar(i, 1), dep.heights(i));
        os << buf;
    }
}

namespace {

double parse_double(const std::string& s, int line) {
    double v = 0.0;
    const char* b = s.data();
    const char* e = b + s.size();
    while (b < e && *b == ' ') ++b;
    auto [ptr, ec] = std::from_chars(b, e, v);
    if (ec != std::errc() || ptr != e || !std::isfinite(v))
        throw ConfigError("deployment_csv", "bad number '" + s + "' on line " + std::to_string(line));
    return v;
}

}  // namespace

Deployment read_deployment_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line)) throw ConfigError("deployment_csv", "empty file");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "id,x_m,y_m,h_m") throw ConfigError("deployment_csv", "header must be id,x_m,y_m,h_m");
    std::vector<std::array<double, 3>> rows;
    int lineno = 1;
    while (std::getline(is, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string field;
        std::vector<std::string> f;
        while (std::getline(ss, field, ',')) f.push_back(field);
        if (f.size() != 4) throw ConfigError("deployment_csv", "expected 4 fields on line " + std::to_string(lineno));
        rows.push_back({parse_double(f[1], lineno), parse_double(f[2], lineno), parse_double(f[3], lineno)});
    }
    Deployment dep;
    dep.planar.resize(static_cast<Eigen::Index>(rows.size()), 2);
    dep.heights.resize(static_cast<Eigen::Index>(rows.size()));
    double rmax = 0.0;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        dep.planar(i, 0) = rows[i][0];
        dep.planar(i, 1) = rows[i][1];
        dep.heights(i) = rows[i][2];
        rmax = std::max(rmax, std::hypot(rows[i][0], rows[i][1]));
    }
    dep.sampling_radius = rmax;
    return dep;
}

}  // namespace uavcomp

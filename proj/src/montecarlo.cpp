#include "uavcomp/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <thread>

#include "uavcomp/error.hpp"

namespace uavcomp {

std::string Scheme::name() const {
    switch (kind) {
        case Kind::proposed: return "proposed_delaunay4";
        case Kind::no_comp: return "no_comp";
        case Kind::conventional:
            return "conventional_" + std::to_string(n) + (distance_only ? "_distance" : "");
    }
    return "?";
}

Scheme Scheme::parse(const std::string& name) {
    if (name == "proposed_delaunay4" || name == "proposed") return proposed();
    if (name == "no_comp") return no_comp();
    const std::string prefix = "conventional_";
    if (name.rfind(prefix, 0) == 0 && name.size() > prefix.size()) {
        const char c = name[prefix.size()];
        const std::string rest = name.substr(prefix.size() + 1);
        if (c >= '1' && c <= '4' && (rest.empty() || rest == "_distance")) return conventional(c - '0', !rest.empty());
    }
    throw ConfigError("scheme", "unknown scheme '" + name + "'");
}

void validate(const McConfig& cfg) {
    if (cfg.trials < 1) throw ConfigError("trials", "must be at least 1");
    validate(cfg.network);
    if (!(cfg.region_radius > 0.0)) throw ConfigError("region_radius_m", "must be positive");
    if (!(cfg.margin >= 1.0)) throw ConfigError("margin", "must be at least 1");
    if (cfg.scheme.kind == Scheme::Kind::conventional && (cfg.scheme.n < 1 || cfg.scheme.n > 4))
        throw ConfigError("scheme", "conventional scheme needs 1 <= n <= 4");
    for (std::size_t i = 0; i < cfg.gamma_grid.size(); ++i) {
        if (!(cfg.gamma_grid[i] > 0.0)) throw ConfigError("gamma_db", "thresholds must be positive in linear scale");
        if (i > 0 && !(cfg.gamma_grid[i] > cfg.gamma_grid[i - 1]))
            throw ConfigError("gamma_db", "grid must be strictly increasing");
    }
}

DeploymentSpec deployment_spec(const McConfig& cfg) {
    DeploymentSpec spec;
    spec.density = cfg.network.density;
    spec.region_radius = cfg.region_radius;
    spec.margin = cfg.margin;
    spec.heights = cfg.network.heights;
    spec.min_count = static_cast<std::size_t>(cfg.network.serving_count) + 1;
    return spec;
}

TrialDraw draw_trial(const McConfig& cfg, std::uint64_t trial_index) {
    Engine rng = make_engine(cfg.master_seed, stream::trial, trial_index);
    TrialDraw d;
    d.deployment = sample_deployment(deployment_spec(cfg), rng);
    d.fading = sample_fading(cfg.network.fading, d.deployment.size(), rng);
    return d;
}

namespace {

// log of squared slant range to the UE at the origin, one entry per UAV.
Eigen::VectorXd log_range2(const Deployment& dep) {
    return (dep.planar.rowwise().squaredNorm() + dep.heights.cwiseAbs2()).array().log();
}

// Amplitude gains d^{-alpha/2}.
Eigen::VectorXd path_gains(const Eigen::VectorXd& log_d2, double alpha) {
    return (-0.25 * alpha * log_d2.array()).exp();
}

bool alpha_independent(const Scheme& s) {
    return s.kind != Scheme::Kind::conventional || s.distance_only;
}

std::vector<Eigen::Index> select(const TrialDraw& draw, const Scheme& scheme, const Eigen::VectorXd& gains) {
    const Deployment& dep = draw.deployment;
    const Eigen::Vector2d ue = Eigen::Vector2d::Zero();
    switch (scheme.kind) {
        case Scheme::Kind::proposed: {
            const CompSet c = select_comp_set(dep, ue);
            return {c.indices.begin(), c.indices.end()};
        }
        case Scheme::Kind::no_comp: return nearest_uavs(dep, ue, 1);
        case Scheme::Kind::conventional: break;
    }
    if (scheme.distance_only) return nearest_uavs(dep, ue, scheme.n, DistanceMode::slant);
    // Rank by instantaneous received power d^-alpha |h|^2; ties go to the lower index.
    const Eigen::Index n = dep.size();
    if (n < scheme.n) throw InsufficientDeploymentError("fewer UAVs than the requested serving set");
    const Eigen::VectorXd power = (gains.array() * draw.fading.amplitude.array()).square();
    std::vector<Eigen::Index> idx(n);
    std::iota(idx.begin(), idx.end(), Eigen::Index{0});
    std::partial_sort(idx.begin(), idx.begin() + scheme.n, idx.end(), [&](Eigen::Index a, Eigen::Index b) {
        return power(a) > power(b) || (power(a) == power(b) && a < b);
    });
    idx.resize(scheme.n);
    return idx;
}

SirSample sir_from_gains(const Eigen::VectorXd& gains, const std::vector<Eigen::Index>& serving,
                         const FadingDraw& fading, std::vector<char>& mask) {
    mask.assign(gains.size(), 0);
    double amp = 0.0;
    for (Eigen::Index i : serving) {
        mask[i] = 1;
        amp += gains(i) * fading.amplitude(i);
    }
    double intf = 0.0;
    for (Eigen::Index i = 0; i < gains.size(); ++i)
        if (!mask[i]) intf += gains(i) * gains(i) * fading.power(i);
    SirSample s{amp * amp, intf, 0.0};
    s.sir = intf > 0.0 ? s.signal / intf : std::numeric_limits<double>::infinity();
    return s;
}

}  // namespace

std::vector<Eigen::Index> serving_set(const TrialDraw& draw, const Scheme& scheme, double alpha) {
    return select(draw, scheme, path_gains(log_range2(draw.deployment), alpha));
}

SirSample evaluate_trial(const TrialDraw& draw, const Scheme& scheme, double alpha) {
    const Eigen::VectorXd g = path_gains(log_range2(draw.deployment), alpha);
    std::vector<char> mask;
    return sir_from_gains(g, select(draw, scheme, g), draw.fading, mask);
}

SirSample run_trial(const McConfig& cfg, std::uint64_t trial_index) {
    return evaluate_trial(draw_trial(cfg, trial_index), cfg.scheme, cfg.network.alpha);
}

namespace {

unsigned worker_count(unsigned requested, std::size_t work) {
    unsigned t = requested ? requested : std::max(1u, std::thread::hardware_concurrency());
    return static_cast<unsigned>(std::min<std::size_t>(t, std::max<std::size_t>(work, 1)));
}

}  // namespace

BatchResult run_batch(const McConfig& cfg, const std::vector<Scheme>& schemes, const std::vector<double>& alphas) {
    validate(cfg);
    if (schemes.empty() || alphas.empty()) throw DomainError("run_batch: need at least one scheme and one alpha");
    BatchResult out;
    out.schemes = schemes;
    out.alphas = alphas;
    out.samples.assign(schemes.size() * alphas.size(), std::vector<SirSample>(cfg.trials));
    std::vector<int> resamples(cfg.trials, 0);

    // Each trial writes only its own slots, so the result does not depend on the split.
    auto work = [&](std::size_t begin, std::size_t end) {
        std::vector<char> mask;
        for (std::size_t t = begin; t < end; ++t) {
            const TrialDraw d = draw_trial(cfg, t);
            resamples[t] = d.deployment.resamples;
            const Eigen::VectorXd log_d2 = log_range2(d.deployment);
            std::vector<std::vector<Eigen::Index>> fixed(schemes.size());
            for (std::size_t s = 0; s < schemes.size(); ++s)
                if (alpha_independent(schemes[s])) fixed[s] = select(d, schemes[s], log_d2);
            for (std::size_t a = 0; a < alphas.size(); ++a) {
                const Eigen::VectorXd g = path_gains(log_d2, alphas[a]);
                for (std::size_t s = 0; s < schemes.size(); ++s) {
                    const auto serving = alpha_independent(schemes[s]) ? fixed[s] : select(d, schemes[s], g);
                    out.samples[s * alphas.size() + a][t] = sir_from_gains(g, serving, d.fading, mask);
                }
            }
        }
    };
    const unsigned nt = worker_count(cfg.threads, cfg.trials);
    if (nt == 1) {
        work(0, cfg.trials);
    } else {
        std::vector<std::thread> pool;
        std::vector<std::exception_ptr> errors(nt);
        const std::size_t chunk = (cfg.trials + nt - 1) / nt;
        for (unsigned w = 0; w < nt; ++w) {
            const std::size_t b = std::min(cfg.trials, w * chunk), e = std::min(cfg.trials, b + chunk);
            pool.emplace_back([&, w, b, e] {
                try {
                    work(b, e);
                } catch (...) {
                    errors[w] = std::current_exception();
                }
            });
        }
        for (auto& th : pool) th.join();
        for (auto& ex : errors)
            if (ex) std::rethrow_exception(ex);
    }
    out.resamples = std::accumulate(resamples.begin(), resamples.end(), 0L);
    return out;
}

std::vector<MetricEstimate> coverage_from_samples(const std::vector<SirSample>& samples,
                                                  const std::vector<double>& gamma_grid) {
    std::vector<MetricEstimate> out;
    const double n = static_cast<double>(samples.size());
    for (double g : gamma_grid) {
        std::size_t hits = 0;
        for (const auto& s : samples) hits += s.sir > g;
        MetricEstimate m;
        m.trials_used = samples.size();
        m.value = n > 0 ? hits / n : 0.0;
        m.std_err = n > 1 ? std::sqrt(m.value * (1.0 - m.value) / n) : 0.0;
        out.push_back(m);
    }
    return out;
}

MetricEstimate rate_from_samples(const std::vector<SirSample>& samples) {
    MetricEstimate m;
    m.trials_used = samples.size();
    if (samples.empty()) return m;
    // Ordered two-pass reduction keeps the result independent of threading.
    double sum = 0.0;
    for (const auto& s : samples) sum += std::log1p(s.sir);
    const double n = static_cast<double>(samples.size());
    m.value = sum / n;
    if (samples.size() > 1) {
        double ss = 0.0;
        for (const auto& s : samples) {
            const double d = std::log1p(s.sir) - m.value;
            ss += d * d;
        }
        m.std_err = std::sqrt(ss / (n - 1.0) / n);
    }
    return m;
}

std::vector<MetricEstimate> estimate_coverage(const McConfig& cfg) {
    const BatchResult b = run_batch(cfg, {cfg.scheme}, {cfg.network.alpha});
    return coverage_from_samples(b.at(0, 0), cfg.gamma_grid);
}

MetricEstimate estimate_rate(const McConfig& cfg) {
    const BatchResult b = run_batch(cfg, {cfg.scheme}, {cfg.network.alpha});
    return rate_from_samples(b.at(0, 0));
}

Histogram empirical_pdf(const std::vector<double>& samples, const BinSpec& spec) {
    if (samples.size() < 2) throw DomainError("empirical_pdf: need at least two samples");
    if (spec.bins < 1) throw DomainError("empirical_pdf: need at least one bin");
    double lo = spec.lo, hi = spec.hi;
    if (lo == hi) {
        const auto [mn, mx] = std::minmax_element(samples.begin(), samples.end());
        lo = *mn;
        hi = *mx;
    }
    Histogram h;
    if (lo == hi) {
        // All samples equal: one unit-width bin centred on the value.
        h.edges = Eigen::Vector2d(lo - 0.5, lo + 0.5);
        h.density = Eigen::VectorXd::Ones(1);
        return h;
    }
    if (!(hi > lo)) throw DomainError("empirical_pdf: empty range");
    if (spec.log_spaced && !(lo > 0.0)) throw DomainError("empirical_pdf: log bins need a positive range");
    const int nb = spec.bins;
    h.edges.resize(nb + 1);
    for (int i = 0; i <= nb; ++i) {
        const double u = static_cast<double>(i) / nb;
        h.edges(i) = spec.log_spaced ? lo * std::pow(hi / lo, u) : lo + (hi - lo) * u;
    }
    h.edges(nb) = hi;
    Eigen::VectorXd counts = Eigen::VectorXd::Zero(nb);
    for (double x : samples) {
        if (!(x >= lo && x <= hi)) {
            ++h.outside;
            continue;
        }
        auto it = std::upper_bound(h.edges.data(), h.edges.data() + nb + 1, x);
        int k = static_cast<int>(it - h.edges.data()) - 1;
        counts(std::clamp(k, 0, nb - 1)) += 1.0;
    }
    const double total = counts.sum();
    if (total == 0.0) throw DomainError("empirical_pdf: no samples inside the requested range");
    const Eigen::VectorXd width = h.edges.tail(nb) - h.edges.head(nb);
    h.density = counts.array() / (width.array() * total);
    return h;
}

double sup_cdf_distance(std::vector<double> samples, const std::function<double(double)>& cdf,
                        std::size_t max_points) {
    if (samples.empty()) throw DomainError("sup_cdf_distance: no samples");
    std::sort(samples.begin(), samples.end());
    const std::size_t n = samples.size();
    const double dn = static_cast<double>(n);
    auto at = [&](std::size_t i) {
        const double f = cdf(samples[i]);
        return std::max(std::abs(i / dn - f), std::abs((i + 1) / dn - f));
    };
    double sup = 0.0;
    if (max_points == 0 || max_points >= n) {
        for (std::size_t i = 0; i < n; ++i) sup = std::max(sup, at(i));
        return sup;
    }
    // Both CDFs are monotone, so skipping order statistics misses at most one grid gap.
    for (std::size_t k = 0; k < max_points; ++k) {
        const std::size_t i = (k * (n - 1)) / (max_points - 1);
        sup = std::max(sup, at(i));
    }
    return sup;
}

std::vector<double> extract(const std::vector<SirSample>& samples, double SirSample::*field) {
    std::vector<double> out;
    out.reserve(samples.size());
    for (const auto& s : samples) out.push_back(s.*field);
    return out;
}

}  // namespace uavcomp

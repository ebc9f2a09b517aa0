// SPDX-License-Identifier: MIT
#include "chaosbound/sampler.hpp"

#include "chaosbound/errors.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <thread>

namespace chaosbound {

namespace {

/// Runs fn(s) for s in [0, count) on up to hardware_concurrency threads.
/// The first exception thrown by any shard is rethrown.
template <class F>
void for_each_shard(std::size_t count, F&& fn) {
    const std::size_t workers =
        std::min<std::size_t>(count, std::max<std::size_t>(1, std::thread::hardware_concurrency()));
    if (workers <= 1) {
        for (std::size_t s = 0; s < count; ++s) {
            fn(s);
        }
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t s = next++; s < count; s = next++) {
                try {
                    fn(s);
                } catch (...) {
                    const std::lock_guard lock(error_mutex);
                    if (!error) {
                        error = std::current_exception();
                    }
                }
            }
        });
    }
    for (auto& t : pool) {
        t.join();
    }
    if (error) {
        std::rethrow_exception(error);
    }
}

std::size_t shard_begin(std::size_t shard, std::size_t samples, std::size_t shards) {
    return shard * samples / shards;
}

double median_of(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

/// 3 * sqrt(pi/2) * 1.4826 * MAD / sqrt(K): three standard errors of a median
/// under approximate normality of the shard values.
double median_half_width(const std::vector<double>& values, double median) {
    std::vector<double> dev(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
        dev[i] = std::abs(values[i] - median);
    }
    const double mad = median_of(std::move(dev));
    return 3.0 * 1.2533141373155 * 1.482602218505602 * mad / std::sqrt(static_cast<double>(values.size()));
}

void wilson(std::size_t hits, std::size_t n, TailEstimate& out) {
    constexpr double z = 3.0;
    const double nn = static_cast<double>(n);
    const double ph = static_cast<double>(hits) / nn;
    const double denom = 1.0 + z * z / nn;
    const double centre = (ph + z * z / (2.0 * nn)) / denom;
    const double spread = z * std::sqrt(ph * (1.0 - ph) / nn + z * z / (4.0 * nn * nn)) / denom;
    out.probability = ph;
    out.lower = std::max(0.0, centre - spread);
    out.upper = std::min(1.0, centre + spread);
    out.hits = hits;
    out.samples = n;
}

void check_sizes(std::size_t samples, std::size_t shards) {
    if (shards == 0 || samples < shards) {
        throw InvalidInput("sampling: need at least one sample per shard");
    }
}

}  // namespace

ChaosSpec::ChaosSpec(CoefficientTensor a, DistributionMatrix dists, ChaosMode mode)
    : a_(std::move(a)), dists_(std::move(dists)), mode_(mode) {
    dists_.check_matches(a_);
    if (mode_ == ChaosMode::undecoupled) {
        if (!a_.has_equal_dims() || !a_.is_symmetric_tetrahedral(1e-12)) {
            throw InvalidInput("undecoupled chaos: tensor must be symmetric and vanish on repeated indices");
        }
        if (!dists_.rows_identical()) {
            throw InvalidInput("undecoupled chaos: every axis must use the same generator laws");
        }
    }
}

ChaosSampler::ChaosSampler(const ChaosSpec& spec) : spec_(&spec) {
    const int d = spec.tensor().order();
    const int rows = spec.mode() == ChaosMode::decoupled ? d : 1;
    for (int j = 0; j < rows; ++j) {
        rows_.emplace_back(spec.tensor().dim(j));
    }
    for (int j = 0; j < d; ++j) {
        views_.emplace_back(rows_[spec.mode() == ChaosMode::decoupled ? static_cast<std::size_t>(j) : 0]);
    }
}

double ChaosSampler::operator()(Stream& stream) {
    const auto& dists = spec_->dists();
    for (std::size_t j = 0; j < rows_.size(); ++j) {
        auto& row = rows_[j];
        for (std::size_t i = 0; i < row.size(); ++i) {
            row[i] = dists.at(static_cast<int>(j), i).sample(stream);
        }
    }
    return contract_vectors(spec_->tensor(), views_, scratch_);
}

double sample_chaos(const ChaosSpec& spec, Stream& stream) {
    ChaosSampler sampler(spec);
    return sampler(stream);
}

std::size_t SampleSet::size() const {
    std::size_t n = 0;
    for (const auto& s : shards) {
        n += s.size();
    }
    return n;
}

SampleSet draw_samples(const ChaosSpec& spec, std::size_t samples, std::size_t shards, std::uint64_t seed,
                       StreamTag tag) {
    check_sizes(samples, shards);
    SampleSet set;
    set.shards.resize(shards);
    for_each_shard(shards, [&](std::size_t s) {
        const std::size_t count = shard_begin(s + 1, samples, shards) - shard_begin(s, samples, shards);
        auto& out = set.shards[s];
        out.resize(count);
        if (spec.tensor().is_zero()) {
            return;
        }
        Stream stream(seed, make_stream_id(tag, s));
        ChaosSampler sampler(spec);
        for (double& v : out) {
            v = sampler(stream);
        }
    });
    return set;
}

MomentEstimate moment_from_samples(const SampleSet& set, double p) {
    if (!(p >= 1.0) || !std::isfinite(p)) {
        throw InvalidInput("moment: p must be a finite real >= 1");
    }
    MomentEstimate out;
    out.p = p;
    out.samples = set.size();
    out.shards = set.shards.size();
    std::vector<double> norms;
    norms.reserve(set.shards.size());
    for (const auto& shard : set.shards) {
        long double sum = 0.0L;
        for (double v : shard) {
            sum += std::pow(static_cast<long double>(std::abs(v)), static_cast<long double>(p));
        }
        const long double mean = sum / static_cast<long double>(std::max<std::size_t>(1, shard.size()));
        const auto norm = static_cast<double>(std::pow(mean, 1.0L / static_cast<long double>(p)));
        if (!std::isfinite(static_cast<double>(mean)) || !std::isfinite(norm)) {
            throw EstimatorUnstable(p, "moment: |S|^p overflowed at p = " + std::to_string(p));
        }
        norms.push_back(norm);
    }
    out.estimate = median_of(norms);
    out.half_width = median_half_width(norms, out.estimate);
    return out;
}

MomentEstimate estimate_moment(const ChaosSpec& spec, double p, std::size_t samples, std::size_t shards,
                               std::uint64_t seed) {
    if (!(p >= 1.0)) {
        throw InvalidInput("moment: p must be >= 1");
    }
    if (samples < 10000 || shards < 8) {
        throw InvalidInput("moment: need at least 10^4 samples in at least 8 shards");
    }
    return moment_from_samples(draw_samples(spec, samples, shards, seed), p);
}

TailEstimate tail_from_samples(const SampleSet& set, double threshold) {
    TailEstimate out;
    out.threshold = threshold;
    std::size_t hits = 0;
    for (const auto& shard : set.shards) {
        for (double v : shard) {
            hits += std::abs(v) >= threshold ? 1 : 0;
        }
    }
    wilson(hits, set.size(), out);
    return out;
}

TailEstimate estimate_tail(const ChaosSpec& spec, double threshold, std::size_t samples, std::uint64_t seed,
                           std::size_t shards) {
    if (!(threshold >= 0.0)) {
        throw InvalidInput("tail: threshold must be >= 0");
    }
    return tail_from_samples(draw_samples(spec, samples, shards, seed), threshold);
}

DecoupleComparison decouple_compare(const CoefficientTensor& a, const DistributionMatrix& dists, double p,
                                    std::size_t samples, std::uint64_t seed, std::size_t shards) {
    const ChaosSpec undecoupled(a, dists, ChaosMode::undecoupled);
    const ChaosSpec decoupled(a, dists, ChaosMode::decoupled);
    DecoupleComparison out;
    out.undecoupled =
        moment_from_samples(draw_samples(undecoupled, samples, shards, seed, StreamTag::mc_shard_undecoupled), p);
    out.decoupled =
        moment_from_samples(draw_samples(decoupled, samples, shards, seed, StreamTag::mc_shard_decoupled), p);
    const double u = out.undecoupled.estimate;
    const double v = out.decoupled.estimate;
    if (u == 0.0 && v == 0.0) {
        out.ratio = 1.0;
        out.ratio_half_width = 0.0;
    } else {
        out.ratio = u / v;
        out.ratio_half_width = out.ratio * (out.undecoupled.half_width / u + out.decoupled.half_width / v);
    }
    return out;
}

TetrahedralSplit tetrahedral_eval_and_split(double constant, std::span<const CoefficientTensor> parts,
                                            std::span<const TailFunction> row, double p, std::size_t samples,
                                            std::uint64_t seed, std::size_t shards) {
    check_sizes(samples, shards);
    if (!std::isfinite(constant)) {
        throw InvalidInput("tetrahedral: constant term must be finite");
    }
    const std::size_t n = row.size();
    for (std::size_t j = 0; j < parts.size(); ++j) {
        const auto& part = parts[j];
        if (part.order() != static_cast<int>(j) + 1) {
            throw InvalidInput("tetrahedral: part " + std::to_string(j + 1) + " must have order " +
                               std::to_string(j + 1));
        }
        for (int axis = 0; axis < part.order(); ++axis) {
            if (part.dim(axis) != n) {
                throw InvalidInput("tetrahedral: every dim must equal the number of generators");
            }
        }
        if (!part.is_symmetric_tetrahedral(1e-12)) {
            throw InvalidInput("tetrahedral: part " + std::to_string(j + 1) +
                               " must be symmetric and vanish on repeated indices");
        }
    }
    const std::size_t degrees = parts.size();
    // Per degree (index 0 is the whole sum), per shard.
    std::vector<SampleSet> sets(degrees + 1);
    for (auto& s : sets) {
        s.shards.resize(shards);
    }
    for_each_shard(shards, [&](std::size_t s) {
        const std::size_t count = shard_begin(s + 1, samples, shards) - shard_begin(s, samples, shards);
        for (auto& set : sets) {
            set.shards[s].resize(count);
        }
        Stream stream(seed, make_stream_id(StreamTag::tetrahedral, s));
        std::vector<double> x(n);
        std::vector<std::span<const double>> views(kMaxOrder, std::span<const double>(x));
        std::vector<double> scratch;
        for (std::size_t r = 0; r < count; ++r) {
            for (std::size_t i = 0; i < n; ++i) {
                x[i] = row[i].sample(stream);
            }
            double total = constant;
            for (std::size_t j = 0; j < degrees; ++j) {
                const double v = contract_vectors(parts[j], std::span(views).first(j + 1), scratch);
                sets[j + 1].shards[s][r] = v;
                total += v;
            }
            sets[0].shards[s][r] = total;
        }
    });

    TetrahedralSplit out;
    out.whole = moment_from_samples(sets[0], p);
    MomentEstimate zero;
    zero.p = p;
    zero.estimate = std::abs(constant);
    zero.samples = samples;
    zero.shards = shards;
    out.parts.push_back(zero);
    out.parts_sum = zero.estimate;
    for (std::size_t j = 0; j < degrees; ++j) {
        out.parts.push_back(moment_from_samples(sets[j + 1], p));
        out.parts_sum += out.parts.back().estimate;
    }
    if (out.whole.estimate == 0.0) {
        out.ratio = out.parts_sum == 0.0 ? 1.0 : std::numeric_limits<double>::infinity();
    } else {
        out.ratio = out.parts_sum / out.whole.estimate;
    }
    return out;
}

}  // namespace chaosbound

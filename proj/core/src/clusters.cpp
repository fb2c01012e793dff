#include "spectrace/clusters.hpp"

#include "spectrace/error.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

namespace spectrace {

namespace {

int cluster_index(double lambda) {
    const double root = (-1.0 + std::sqrt(std::max(0.0, 1.0 + 4.0 * lambda))) / 2.0;
    return static_cast<int>(std::max(0L, std::lround(root)));
}

} // namespace

std::vector<double> ClusteredSpectrum::reliable_flat() const {
    std::vector<double> out;
    for (const auto& [k, vals] : clusters) {
        if (k > k_max_reliable)
            break;
        out.insert(out.end(), vals.begin(), vals.end());
    }
    std::sort(out.begin(), out.end());
    return out;
}

int ClusteredSpectrum::k_top() const {
    return clusters.empty() ? -1 : clusters.rbegin()->first;
}

ClusteredSpectrum assemble_clusters(const std::vector<double>& eigenvalues, int k_cap,
                                    const std::string& provenance, double shift) {
    if (!std::is_sorted(eigenvalues.begin(), eigenvalues.end()))
        throw InvalidArgumentError("assemble_clusters: eigenvalue list must be ascending");
    ClusteredSpectrum out;
    out.k_max_reliable = k_cap;
    out.provenance = provenance;
    for (double lambda : eigenvalues)
        out.clusters[cluster_index(lambda - shift)].push_back(lambda);
    for (const auto& [k, vals] : out.clusters) {
        if (k > k_cap)
            continue;
        const int expected = 2 * k + 1;
        if (static_cast<int>(vals.size()) != expected)
            throw ClusterIntegrityError(
                fmt::format("assemble_clusters: cluster k = {} has {} eigenvalues, "
                            "expected {} (truncation too small or clusters overlap)",
                            k, vals.size(), expected),
                k);
    }
    // A validated range must also be gap-free: a hole below k_cap means the
    // solver skipped a cluster entirely.
    for (int k = 0; k <= k_cap; ++k)
        if (!out.clusters.count(k))
            throw ClusterIntegrityError(
                fmt::format("assemble_clusters: cluster k = {} is empty below the "
                            "validated cap {}",
                            k, k_cap),
                k);
    return out;
}

std::vector<ClusterMoments> cluster_statistics(const ClusteredSpectrum& spectrum) {
    std::vector<ClusterMoments> out;
    for (const auto& [k, vals] : spectrum.clusters) {
        if (k > spectrum.k_max_reliable)
            break;
        ClusterMoments m;
        m.k = k;
        const double ref = static_cast<double>(k) * (k + 1);
        for (double v : vals) {
            const double d = v - ref;
            m.sum_shift += d;
            m.sum_sq_shift += d * d;
        }
        m.mean_shift = m.sum_shift / (2 * k + 1);
        out.push_back(m);
    }
    return out;
}

std::vector<ClusterMoments> cluster_statistics(const ClusteredSpectrum& spectrum,
                                               const ClusteredSpectrum& reference) {
    std::vector<ClusterMoments> out;
    const int k_common = std::min(spectrum.k_max_reliable, reference.k_max_reliable);
    for (const auto& [k, vals] : spectrum.clusters) {
        if (k > k_common)
            break;
        const auto it = reference.clusters.find(k);
        if (it == reference.clusters.end() || it->second.size() != vals.size())
            throw InvalidArgumentError(
                fmt::format("cluster_statistics: cluster k = {} misaligned between the two "
                            "spectra ({} vs {} entries)",
                            k, vals.size(),
                            it == reference.clusters.end() ? 0 : it->second.size()));
        ClusterMoments m;
        m.k = k;
        for (std::size_t i = 0; i < vals.size(); ++i) {
            const double d = vals[i] - it->second[i];
            m.sum_shift += d;
            m.sum_sq_shift += d * d;
        }
        m.mean_shift = m.sum_shift / (2 * k + 1);
        out.push_back(m);
    }
    return out;
}

} // namespace spectrace

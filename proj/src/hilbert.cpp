#include "gaudin/hilbert.hpp"

#include "gaudin/errors.hpp"

#include <cmath>
#include <numeric>

namespace gaudin {

LocalSpace LocalSpace::boson(int cutoff) {
    if (cutoff < 0) throw ValidationError("boson cutoff must be non-negative");
    return {Kind::boson, cutoff + 1, 0.0};
}

LocalSpace LocalSpace::spin(Spin s) { return {Kind::spin, s.degeneracy(), s.value()}; }

LocalSpace LocalSpace::truncated_spin(double s, int dim) {
    if (dim < 1 || dim > static_cast<int>(std::lround(2.0 * s)) + 1) {
        throw ValidationError("truncated spin window must fit inside the irrep");
    }
    return {Kind::spin, dim, s};
}

double LocalSpace::raise(int j) const {
    if (j + 1 >= dim) return 0.0;
    if (kind == Kind::boson) return std::sqrt(j + 1.0);
    const double mu = j - s;
    return std::sqrt(s * (s + 1.0) - mu * (mu + 1.0));
}

double LocalSpace::weight(int j) const { return kind == Kind::boson ? j : j - s; }

HilbertBasis::HilbertBasis(std::vector<LocalSpace> sites, SectorFilter filter, int excitations)
    : sites_(std::move(sites)), filter_(filter), sector_(excitations) {
    if (sites_.empty()) throw ValidationError("Hilbert basis needs at least one site");
    double full = 1.0;
    for (const auto& s : sites_) {
        if (s.dim < 1) throw ValidationError("local dimension must be positive");
        full *= s.dim;
    }
    if (full > 1e9) throw ValidationError("Hilbert space too large for the dense oracle");
    std::vector<int> cur(sites_.size(), 0);
    while (true) {
        const int total = std::accumulate(cur.begin(), cur.end(), 0);
        const bool keep = filter_ == SectorFilter::none || (filter_ == SectorFilter::exactly && total == sector_) ||
                          (filter_ == SectorFilter::at_most && total <= sector_);
        if (keep) {
            lookup_.emplace(key(cur), static_cast<Eigen::Index>(states_.size()));
            states_.push_back(cur);
        }
        bool done = true;
        for (std::size_t k = sites_.size(); k-- > 0;) {
            if (++cur[k] < sites_[k].dim) {
                done = false;
                break;
            }
            cur[k] = 0;
        }
        if (done) break;
    }
    if (states_.empty()) throw ValidationError("excitation sector is empty for this basis");
}

BasisPtr HilbertBasis::make(std::vector<LocalSpace> sites, SectorFilter filter, int excitations) {
    return std::make_shared<const HilbertBasis>(std::move(sites), filter, excitations);
}

std::uint64_t HilbertBasis::key(const std::vector<int>& local) const {
    std::uint64_t k = 0;
    for (std::size_t i = 0; i < sites_.size(); ++i) k = k * static_cast<std::uint64_t>(sites_[i].dim) + local[i];
    return k;
}

std::optional<Eigen::Index> HilbertBasis::index_of(const std::vector<int>& local) const {
    if (local.size() != sites_.size()) return std::nullopt;
    for (std::size_t i = 0; i < local.size(); ++i) {
        if (local[i] < 0 || local[i] >= sites_[i].dim) return std::nullopt;
    }
    auto it = lookup_.find(key(local));
    if (it == lookup_.end()) return std::nullopt;
    return it->second;
}

int HilbertBasis::excitations(Eigen::Index i) const {
    const auto& s = state(i);
    return std::accumulate(s.begin(), s.end(), 0);
}

bool HilbertBasis::same_as(const HilbertBasis& other) const {
    if (this == &other) return true;
    if (sites_.size() != other.sites_.size() || filter_ != other.filter_ || sector_ != other.sector_) return false;
    for (std::size_t i = 0; i < sites_.size(); ++i) {
        if (sites_[i].kind != other.sites_[i].kind || sites_[i].dim != other.sites_[i].dim ||
            sites_[i].s != other.sites_[i].s) {
            return false;
        }
    }
    return true;
}

}  // namespace gaudin

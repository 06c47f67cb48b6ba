// hilbert.hpp — truncated tensor-product bases of boson modes and quasispin
// irreps, optionally restricted to a fixed number of excitations.
#pragma once

#include "gaudin/algebra.hpp"

#include <Eigen/Dense>

#include <memory>
#include <optional>
#include <unordered_map>
#include <vector>

namespace gaudin {

// Local state j counts excitations: the Fock number n for a boson, mu + s for
// a spin. A truncated spin keeps the lowest `dim` weights of spin s.
struct LocalSpace {
    enum class Kind { boson, spin };
    Kind kind{Kind::spin};
    int dim{2};
    double s{0.5};

    static LocalSpace boson(int cutoff);
    static LocalSpace spin(Spin s);
    static LocalSpace truncated_spin(double s, int dim);

    // Matrix elements of the raising operator |j> -> |j+1> and the weight of |j>.
    double raise(int j) const;
    double weight(int j) const;
};

enum class SectorFilter { none, exactly, at_most };

class HilbertBasis {
public:
    HilbertBasis(std::vector<LocalSpace> sites, SectorFilter filter = SectorFilter::none, int excitations = 0);

    static std::shared_ptr<const HilbertBasis> make(std::vector<LocalSpace> sites,
                                                    SectorFilter filter = SectorFilter::none, int excitations = 0);

    const std::vector<LocalSpace>& sites() const noexcept { return sites_; }
    Eigen::Index dim() const noexcept { return static_cast<Eigen::Index>(states_.size()); }
    const std::vector<int>& state(Eigen::Index i) const { return states_.at(static_cast<std::size_t>(i)); }
    std::optional<Eigen::Index> index_of(const std::vector<int>& local) const;
    int excitations(Eigen::Index i) const;

    SectorFilter filter() const noexcept { return filter_; }
    int sector() const noexcept { return sector_; }

    // Same sites, filter and state list.
    bool same_as(const HilbertBasis& other) const;

private:
    std::uint64_t key(const std::vector<int>& local) const;

    std::vector<LocalSpace> sites_;
    SectorFilter filter_;
    int sector_;
    std::vector<std::vector<int>> states_;
    std::unordered_map<std::uint64_t, Eigen::Index> lookup_;
};

using BasisPtr = std::shared_ptr<const HilbertBasis>;

struct StateVector {
    BasisPtr basis;
    Eigen::VectorXcd amplitudes;

    double norm() const { return amplitudes.norm(); }
};

}  // namespace gaudin
